#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "forgesim/determinants.hpp"
#include "forgesim/forging.hpp"
#include "forgesim/tomography.hpp"

namespace forgesim {

/// Density operator restricted to the determinants of one sector (rows and
/// columns indexed like CIVector amplitudes).
struct SectorDensity {
  Sector sector;
  Eigen::MatrixXcd matrix;
  /// Trace of the sector block before renormalization.
  double captured_trace = 1.0;
};

/// Transition operators M_kl = U|x_k><x_l|U^dagger reconstructed from the
/// forged preparations: M_kk from x_k, M_kl = 1/2 sum_p i^p rho(phi^p_kl).
std::vector<std::vector<Eigen::MatrixXcd>> forged_transition_operators(
    const ForgedTomography& tomo, int n_bitstrings);

/// Sector block of rho = sum_kl lambda_k lambda_l M_kl (x) M_kl, without
/// renormalization.
SectorDensity forged_sector_density(const ForgedTomography& tomo, const Eigen::VectorXd& schmidt,
                                    const Sector& sector);
/// Same block for every (n_alpha', n_beta') sector of the register.
std::vector<SectorDensity> forged_all_sector_densities(const ForgedTomography& tomo,
                                                       const Eigen::VectorXd& schmidt,
                                                       int n_orbitals);

/// Zeroes every row and column of a 2N-qubit density (index alpha << N |
/// beta) outside the sector and renormalizes the trace. Throws
/// NumericalError if the captured trace is below 1e-10.
DensityMatrix project_sector(const DensityMatrix& rho, const Sector& sector);
/// Compact form of the same projection.
SectorDensity restrict_to_sector(const DensityMatrix& rho, const Sector& sector);
/// Renormalizes a sector block in place; throws below 1e-10 captured trace.
void renormalize(SectorDensity& rho);

struct CIExtraction {
  CIVector vector;
  bool used_fallback = false;
};

/// Column `reference` of rho, normalized (ket of rho = |psi><psi| up to a
/// phase fixed by making the reference amplitude real and positive). Falls
/// back to the dominant eigenvector when the column norm is <= threshold.
CIExtraction extract_ci_vector(const SectorDensity& rho, std::size_t reference,
                               double threshold = 1e-8);
/// Reference = Hartree-Fock determinant.
CIExtraction extract_ci_vector(const SectorDensity& rho);

struct PurifiedSample {
  std::uint64_t seed = 0;
  double raw_energy = 0.0;       // Tr[H rho] / Tr[rho] on the sector block
  double purified_energy = 0.0;  // <psi|H|psi> of the extracted CI vector
  CIExtraction ci;
};

/// One tomography sweep per seed; seeds are used as given.
std::vector<PurifiedSample> purified_energy_samples(const ForgedAnsatz& ansatz,
                                                    const ActiveSpaceHamiltonian& ham, int shots,
                                                    const std::vector<std::uint64_t>& seeds,
                                                    const TomographyOptions& options = {});

}  // namespace forgesim
