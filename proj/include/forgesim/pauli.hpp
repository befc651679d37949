#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

namespace forgesim {

using cplx = std::complex<double>;

/// Bit of qubit `q` inside an n-qubit basis index. Qubit 0 is the most
/// significant bit, so the label "10" is basis index 2.
inline std::uint32_t qubit_bit(int q, int n_qubits) {
  return std::uint32_t{1} << (n_qubits - 1 - q);
}

/// A tensor product of single-qubit Paulis in symplectic form.
///
/// The operator is i^{|x&z|} X^x Z^z, so a qubit with both bits set is Y.
/// Masks use the same bit layout as statevector indices (see qubit_bit).
struct PauliString {
  std::uint32_t x = 0;
  std::uint32_t z = 0;

  static PauliString from_label(std::string_view label);
  std::string label(int n_qubits) const;
  bool is_identity() const { return x == 0 && z == 0; }
  int weight() const;

  /// Phase and target of P|index>: P|i> = phase * |i ^ x>.
  cplx phase_on(std::uint32_t index) const;

  friend bool operator<(const PauliString& a, const PauliString& b) {
    return std::pair(a.x, a.z) < std::pair(b.x, b.z);
  }
  friend bool operator==(const PauliString& a, const PauliString& b) = default;
};

/// a * b = phase * c
std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b);

/// Weighted sum of n-qubit Pauli strings.
class PauliSum {
 public:
  PauliSum() = default;
  explicit PauliSum(int n_qubits) : n_qubits_(n_qubits) {}

  static PauliSum identity(int n_qubits, cplx coeff = 1.0);
  static PauliSum single(int n_qubits, const PauliString& p, cplx coeff = 1.0);

  int n_qubits() const { return n_qubits_; }
  const std::map<PauliString, cplx>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add(const PauliString& p, cplx coeff);
  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator*=(cplx s);
  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator*(PauliSum a, cplx s) { return a *= s; }
  friend PauliSum operator*(const PauliSum& a, const PauliSum& b);

  PauliSum adjoint() const;
  /// Drop terms with |coeff| <= tol.
  void prune(double tol = 1e-12);
  /// Hermitian iff every coefficient is real (each Pauli string is Hermitian).
  bool is_hermitian(double tol = 1e-12) const;
  double max_imag() const;

  Eigen::MatrixXcd to_matrix() const;
  /// Returns op |psi>.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& psi) const;

 private:
  int n_qubits_ = 0;
  std::map<PauliString, cplx> terms_;
};

/// Jordan-Wigner annihilation operator for mode p of n modes:
/// a_p = Z_0 ... Z_{p-1} (X_p + iY_p)/2.
PauliSum jw_annihilation(int p, int n_modes);
PauliSum jw_creation(int p, int n_modes);

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace forgesim
