#include "forgesim/pauli.hpp"

#include <bit>
#include <cmath>

#include "forgesim/error.hpp"

namespace forgesim {

namespace {

cplx i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

PauliString PauliString::from_label(std::string_view label) {
  const int n = static_cast<int>(label.size());
  if (n > 32) throw ValidationError("Pauli label longer than 32 qubits");
  PauliString p;
  for (int q = 0; q < n; ++q) {
    const std::uint32_t b = qubit_bit(q, n);
    switch (label[q]) {
      case 'I': break;
      case 'X': p.x |= b; break;
      case 'Y': p.x |= b; p.z |= b; break;
      case 'Z': p.z |= b; break;
      default:
        throw ValidationError("invalid Pauli letter '" + std::string(1, label[q]) + "'");
    }
  }
  return p;
}

std::string PauliString::label(int n_qubits) const {
  std::string s(n_qubits, 'I');
  for (int q = 0; q < n_qubits; ++q) {
    const std::uint32_t b = qubit_bit(q, n_qubits);
    const bool bx = x & b, bz = z & b;
    s[q] = bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
  }
  return s;
}

int PauliString::weight() const { return std::popcount(x | z); }

cplx PauliString::phase_on(std::uint32_t index) const {
  const int k = std::popcount(x & z) + 2 * (std::popcount(z & index) & 1);
  return i_pow(k);
}

std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b) {
  PauliString c{a.x ^ b.x, a.z ^ b.z};
  const int k = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) -
                std::popcount(c.x & c.z) + 2 * std::popcount(a.z & b.x);
  return {i_pow(k), c};
}

PauliSum PauliSum::identity(int n_qubits, cplx coeff) {
  return single(n_qubits, PauliString{}, coeff);
}

PauliSum PauliSum::single(int n_qubits, const PauliString& p, cplx coeff) {
  PauliSum s(n_qubits);
  s.add(p, coeff);
  return s;
}

void PauliSum::add(const PauliString& p, cplx coeff) { terms_[p] += coeff; }

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (n_qubits_ == 0) n_qubits_ = other.n_qubits_;
  if (other.n_qubits_ != n_qubits_ && !other.empty())
    throw ValidationError("PauliSum qubit count mismatch");
  for (const auto& [p, c] : other.terms_) terms_[p] += c;
  return *this;
}

PauliSum& PauliSum::operator*=(cplx s) {
  for (auto& [p, c] : terms_) c *= s;
  return *this;
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  if (a.n_qubits_ != b.n_qubits_) throw ValidationError("PauliSum qubit count mismatch");
  PauliSum out(a.n_qubits_);
  for (const auto& [pa, ca] : a.terms_)
    for (const auto& [pb, cb] : b.terms_) {
      auto [phase, pc] = multiply(pa, pb);
      out.terms_[pc] += phase * ca * cb;
    }
  return out;
}

PauliSum PauliSum::adjoint() const {
  PauliSum out(n_qubits_);
  for (const auto& [p, c] : terms_) out.terms_[p] = std::conj(c);
  return out;
}

void PauliSum::prune(double tol) {
  std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

double PauliSum::max_imag() const {
  double m = 0.0;
  for (const auto& [p, c] : terms_) m = std::max(m, std::abs(c.imag()));
  return m;
}

bool PauliSum::is_hermitian(double tol) const { return max_imag() <= tol; }

Eigen::MatrixXcd PauliSum::to_matrix() const {
  const std::size_t dim = std::size_t{1} << n_qubits_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [p, c] : terms_)
    for (std::uint32_t i = 0; i < dim; ++i) m(i ^ p.x, i) += c * p.phase_on(i);
  return m;
}

Eigen::VectorXcd PauliSum::apply(const Eigen::VectorXcd& psi) const {
  const std::size_t dim = std::size_t{1} << n_qubits_;
  if (static_cast<std::size_t>(psi.size()) != dim)
    throw ValidationError("state dimension does not match operator");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
  for (const auto& [p, c] : terms_)
    for (std::uint32_t i = 0; i < dim; ++i) out[i ^ p.x] += c * p.phase_on(i) * psi[i];
  return out;
}

PauliSum jw_annihilation(int p, int n_modes) {
  PauliString zs;
  for (int q = 0; q < p; ++q) zs.z |= qubit_bit(q, n_modes);
  const std::uint32_t b = qubit_bit(p, n_modes);
  PauliSum out(n_modes);
  out.add(PauliString{b, zs.z}, 0.5);  // Z..Z X_p
  // Z..Z Y_p: Y = i X Z, and the prefix Zs commute with X_p Z_p.
  out.add(PauliString{b, zs.z | b}, cplx(0.0, 0.5));
  return out;
}

PauliSum jw_creation(int p, int n_modes) { return jw_annihilation(p, n_modes).adjoint(); }

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace forgesim
