#pragma once

#include "forgesim/determinants.hpp"

namespace forgesim {

/// Exact lowest eigenpair of a sector-restricted Hamiltonian.
struct FCIResult {
  double energy = 0.0;
  CIVector state;
  std::size_t dimension = 0;
};

/// Sectors up to this size use a dense eigensolver; larger ones use Davidson.
inline constexpr std::size_t kDenseFciLimit = 2500;
/// Largest sector accepted at all.
inline constexpr std::size_t kFciCapacity = 200000;

/// Ground state in `sector` (defaults to the Hamiltonian's own electron
/// counts). Phase: largest amplitude real and positive.
FCIResult fci_ground_state(const ActiveSpaceHamiltonian& ham);
FCIResult fci_ground_state(const ActiveSpaceHamiltonian& ham, const Sector& sector);

/// Lowest eigenpair of a sparse symmetric matrix by Davidson iteration with a
/// diagonal preconditioner.
std::pair<double, Eigen::VectorXd> davidson_lowest(const Eigen::SparseMatrix<double>& h,
                                                   double tol = 1e-11, int max_iter = 500);

}  // namespace forgesim
