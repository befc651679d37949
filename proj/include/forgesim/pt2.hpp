#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "forgesim/determinants.hpp"
#include "forgesim/hamiltonian.hpp"

namespace forgesim {

/// H = H_D + V over the full orbital set. H_D keeps the exact Hamiltonian
/// inside the active window (with the core mean field folded in) and the
/// generalized Fock operator on the core-core and virtual-virtual blocks.
/// Both H_D and V are stored as integral sets, so their matrices come from
/// the same determinant machinery as H.
struct DyallPartition {
  ActiveSpaceHamiltonian full;
  ActiveWindow window;
  /// Active-space Hamiltonian (frozen core folded into h1 and e_core).
  ActiveSpaceHamiltonian active;
  /// Generalized Fock matrix from the reference density, all orbitals.
  Eigen::MatrixXd fock;
  ActiveSpaceHamiltonian dyall;
  ActiveSpaceHamiltonian perturbation;

  int n_core() const { return window.start; }
  int n_virtual() const { return full.n_orbitals() - window.start - window.size; }
  /// Partition with V -> lambda V (and H -> H_D + lambda V).
  DyallPartition scaled(double lambda) const;
};

/// `reference` lives in the active sector (window.size orbitals, non-core
/// electrons); its spin-summed 1-RDM enters the Fock operator.
DyallPartition build_dyall(const ActiveSpaceHamiltonian& full, const ActiveWindow& window,
                           const CIVector& reference);

/// Places an active-space CI vector into the full sector: core doubly
/// occupied, virtuals empty.
CIVector embed_active(const CIVector& active, const ActiveSpaceHamiltonian& full,
                      const ActiveWindow& window);

struct PT2Options {
  double degeneracy_threshold = 1e-8;
  double numerator_floor = 1e-10;
  /// Largest H_D block diagonalized densely.
  std::size_t block_capacity = 6000;
  int jobs = 1;
};

struct PT2Result {
  double delta_e = 0.0;
  int n_terms = 0;
  /// Sampling route only.
  std::vector<double> samples;
  double std_error = 0.0;
  int n_failed = 0;
  std::vector<std::string> warnings;
};

/// -sum_nu |<nu|V|psi0>|^2 / (E_nu - e0) over the eigenstates of H_D in the
/// full sector. Terms with a numerator below the floor are skipped; a
/// coupled state with E_nu - e0 below the degeneracy threshold raises
/// IntruderStateError.
PT2Result pt2_correction(const DyallPartition& partition, const CIVector& psi0, double e0,
                         const PT2Options& options = {});

/// Runs pt2_correction per sample with e0 = <psi|H_active|psi>. Samples that
/// hit an intruder state are excluded and reported in `warnings`. The std_error
/// is std / sqrt(n) over the successful samples.
PT2Result pt2_with_sampling(const DyallPartition& partition, const std::vector<CIVector>& samples,
                            const PT2Options& options = {});

}  // namespace forgesim
