#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "forgesim/determinants.hpp"
#include "forgesim/forging.hpp"
#include "forgesim/purify.hpp"
#include "forgesim/tomography.hpp"

namespace forgesim {

/// Product of ladder operators, applied right to left. Empty = identity.
struct Excitation {
  std::vector<Ladder> ladders;
  std::string label;

  bool is_identity() const { return ladders.empty(); }
};

/// Identity, then singles a+_a a_i per spin, same-spin doubles
/// a+_a a+_b a_j a_i (i<j, a<b) per spin, then opposite-spin doubles
/// a+_a(alpha) a+_b(beta) a_j(beta) a_i(alpha). Occupied/virtual refer to the
/// Hartree-Fock determinant of the sector.
struct ExcitationBasis {
  int n_orbitals = 0;
  std::vector<Excitation> operators;

  std::size_t size() const { return operators.size(); }
};

ExcitationBasis build_excitations(int n_orbitals, int n_alpha, int n_beta);

/// Matrix of an excitation within one sector (it conserves n_alpha, n_beta).
Eigen::SparseMatrix<double> excitation_matrix(const Excitation& op, const Sector& sector);

struct SubspaceProblem {
  Eigen::MatrixXcd h;
  Eigen::MatrixXcd s;

  /// <H> of the reference, H00 / S00.
  double reference_energy() const { return h(0, 0).real() / s(0, 0).real(); }
};

/// Pure-state route: H_IJ = <O_I psi|H|O_J psi>, S_IJ = <O_I psi|O_J psi>.
SubspaceProblem subspace_matrices(const CIVector& psi, const ActiveSpaceHamiltonian& ham,
                                  const ExcitationBasis& basis);
/// Trace route Tr[O_I^dagger H O_J rho] over one sector block.
SubspaceProblem subspace_matrices(const SectorDensity& rho, const ActiveSpaceHamiltonian& ham,
                                  const ExcitationBasis& basis);
/// Trace route summed over several sector blocks (no projection).
SubspaceProblem subspace_matrices(const std::vector<SectorDensity>& blocks,
                                  const ActiveSpaceHamiltonian& ham, const ExcitationBasis& basis);

struct SubspaceSolution {
  Eigen::VectorXd energies;            // ascending
  Eigen::MatrixXcd coefficients;       // one column per energy
  int retained_rank = 0;
};

/// Canonical orthogonalization: overlap eigenvectors with eigenvalue below
/// `overlap_cutoff` are discarded. Throws NumericalError if none remain.
SubspaceSolution solve_generalized(const SubspaceProblem& problem, double overlap_cutoff = 1e-8);

enum class QseSource { Exact, Sampled, Purified };

struct QseOptions {
  QseSource source = QseSource::Exact;
  int shots = 1024;
  std::uint64_t seed = 0;
  /// Empty: 1e-8 for exact and purified input, 10 * median error for sampled.
  std::optional<double> overlap_cutoff;
  /// Sampled input only: project onto the sector before building H and S
  /// (true) or build them from every sector block of the raw state (false).
  bool project_first = true;
  TomographyOptions tomography;
};

struct QseResult {
  double energy = 0.0;
  double reference_energy = 0.0;
  int retained_rank = 0;
  std::size_t basis_size = 0;
  double overlap_cutoff = 0.0;
  bool used_fallback = false;
  std::optional<CIVector> purified_state;
};

inline constexpr double kDefaultOverlapCutoff = 1e-8;

QseResult ef_qse_energy(const ForgedAnsatz& ansatz, const ActiveSpaceHamiltonian& ham,
                        const QseOptions& options = {});

}  // namespace forgesim
