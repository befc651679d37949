#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "forgesim/pauli.hpp"

namespace forgesim {

/// Second-quantized Hamiltonian of an active space in chemists' notation:
///
///   H = e_core + sum_{pq,s} h1[p,q] a+_ps a_qs
///             + 1/2 sum_{pqrs,st} (pq|rs) a+_ps a+_rt a_st a_qs
class ActiveSpaceHamiltonian {
 public:
  ActiveSpaceHamiltonian() = default;
  ActiveSpaceHamiltonian(int n_orbitals, int n_alpha, int n_beta);

  int n_orbitals() const { return n_orbitals_; }
  int n_alpha() const { return n_alpha_; }
  int n_beta() const { return n_beta_; }

  double one(int p, int q) const { return h1_(p, q); }
  double two(int p, int q, int r, int s) const { return h2_[index(p, q, r, s)]; }
  double e_core() const { return e_core_; }

  const Eigen::MatrixXd& h1() const { return h1_; }

  /// Set h1[p,q] and h1[q,p].
  void set_one(int p, int q, double v);
  /// Set (pq|rs) and all seven symmetry-equivalent entries.
  void set_two(int p, int q, int r, int s, double v);
  void set_e_core(double v) { e_core_ = v; }
  void set_electrons(int n_alpha, int n_beta);

  /// Throws ValidationError on broken symmetry or electron counts.
  void validate(double tol = 1e-12) const;

 private:
  std::size_t index(int p, int q, int r, int s) const {
    const std::size_t n = n_orbitals_;
    return ((p * n + q) * n + r) * n + s;
  }

  int n_orbitals_ = 0;
  int n_alpha_ = 0;
  int n_beta_ = 0;
  Eigen::MatrixXd h1_;
  std::vector<double> h2_;
  double e_core_ = 0.0;
};

ActiveSpaceHamiltonian parse_fcidump(std::istream& in);
ActiveSpaceHamiltonian read_fcidump(const std::filesystem::path& path);
/// Writes unique entries (|v| > tol) in the layout read by parse_fcidump.
void write_fcidump(std::ostream& out, const ActiveSpaceHamiltonian& ham, double tol = 1e-14);

/// Contiguous block of spatial orbitals; orbitals below `start` are the
/// doubly-occupied core, orbitals at or above `start + size` are virtual.
struct ActiveWindow {
  int start = 0;
  int size = 0;
};

/// Frozen-core reduction of a full-space Hamiltonian onto an active window.
/// The core mean field is folded into the one-body integrals and e_core.
ActiveSpaceHamiltonian active_space_hamiltonian(const ActiveSpaceHamiltonian& full,
                                                const ActiveWindow& window);

/// One A (x) B term of the spin-factorized Hamiltonian.
struct SpinTerm {
  enum class Kind { AlphaOnly, BetaOnly, Cross };
  Kind kind;
  PauliSum alpha;  // acts on the alpha register
  PauliSum beta;   // acts on the beta register
  double coefficient = 1.0;
};

/// H = constant + sum_mu coefficient_mu A_mu (x) B_mu, each factor acting on
/// N qubits (one per spatial orbital, Jordan-Wigner within the spin sector).
struct SpinFactorizedHamiltonian {
  int n_qubits = 0;
  double constant = 0.0;
  std::vector<SpinTerm> terms;

  /// Dense 4^N matrix on alpha (x) beta. Only for small N.
  Eigen::MatrixXcd reassemble() const;
};

SpinFactorizedHamiltonian spin_factorize(const ActiveSpaceHamiltonian& ham,
                                         double prune_tol = 1e-12);

/// Number-conserving excitation a+_p a_q on N modes, Jordan-Wigner encoded.
PauliSum jw_excitation(int p, int q, int n_modes);

}  // namespace forgesim
