#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "forgesim/hamiltonian.hpp"

namespace forgesim {

/// Occupation string of one spin sector, in the statevector index layout:
/// orbital p occupies bit qubit_bit(p, N).
using Bitstring = std::uint32_t;

Bitstring parse_bitstring(const std::string& s);
std::string format_bitstring(Bitstring b, int n_orbitals);
/// Lowest-n orbitals occupied.
Bitstring hartree_fock_bitstring(int n_orbitals, int n_electrons);

/// Spin-orbital ladder operator. Spin-orbital j = spin * N + orbital.
struct Ladder {
  int spin_orbital;
  bool create;
};

/// Applies `ops` right-to-left (operator product as written) to the
/// determinant `det`, a 2N-bit combined index (alpha << N | beta).
/// Returns the new determinant and its sign, or nullopt if annihilated.
std::optional<std::pair<std::uint64_t, int>> apply_ladders(std::span<const Ladder> ops,
                                                           std::uint64_t det, int n_orbitals);

/// Determinant basis with fixed (n_alpha, n_beta).
class Sector {
 public:
  Sector() = default;
  Sector(int n_orbitals, int n_alpha, int n_beta);

  int n_orbitals() const { return n_orbitals_; }
  int n_alpha() const { return n_alpha_; }
  int n_beta() const { return n_beta_; }
  std::size_t dim() const { return alpha_.size() * beta_.size(); }
  const std::vector<Bitstring>& alpha_strings() const { return alpha_; }
  const std::vector<Bitstring>& beta_strings() const { return beta_; }

  Bitstring alpha_of(std::size_t i) const { return alpha_[i / beta_.size()]; }
  Bitstring beta_of(std::size_t i) const { return beta_[i % beta_.size()]; }
  /// 2N-qubit index alpha << N | beta of determinant i.
  std::uint64_t full_index(std::size_t i) const {
    return (std::uint64_t{alpha_of(i)} << n_orbitals_) | beta_of(i);
  }
  /// Sector position of a determinant, if it belongs to the sector.
  std::optional<std::size_t> find(Bitstring alpha, Bitstring beta) const;
  std::optional<std::size_t> find_full(std::uint64_t full) const;
  std::size_t hartree_fock_index() const;
  std::string label(std::size_t i) const;

  friend bool operator==(const Sector& a, const Sector& b) {
    return a.n_orbitals_ == b.n_orbitals_ && a.n_alpha_ == b.n_alpha_ && a.n_beta_ == b.n_beta_;
  }

 private:
  int n_orbitals_ = 0, n_alpha_ = 0, n_beta_ = 0;
  std::vector<Bitstring> alpha_, beta_;
  std::vector<int> alpha_pos_, beta_pos_;
};

/// Normalized amplitude vector over the determinants of one sector.
struct CIVector {
  Sector sector;
  Eigen::VectorXcd amplitudes;

  /// Renormalize and rotate the global phase so that amplitude `anchor` is
  /// real and positive (largest-magnitude entry when anchor is absent/zero).
  void normalize(std::optional<std::size_t> anchor = std::nullopt);
  /// Embed into the full 4^N space, alpha (x) beta.
  Eigen::VectorXcd to_fock() const;
};

/// Sparse Hamiltonian restricted to a sector, built by direct ladder-operator
/// application on determinants (independent of the Pauli route).
Eigen::SparseMatrix<double> sector_hamiltonian(const ActiveSpaceHamiltonian& ham,
                                               const Sector& sector);
/// Dense Hamiltonian on the whole 4^N Fock space (all sectors). Small N only.
Eigen::MatrixXd fock_hamiltonian(const ActiveSpaceHamiltonian& ham);

/// Spin-summed one-particle density gamma_pq = <psi| sum_s a+_ps a_qs |psi>.
Eigen::MatrixXd one_rdm(const CIVector& psi);

double expectation(const Eigen::SparseMatrix<double>& h, const Eigen::VectorXcd& v);

}  // namespace forgesim
