#include "forgesim/determinants.hpp"

#include <bit>
#include <cmath>

#include "forgesim/error.hpp"

namespace forgesim {

Bitstring parse_bitstring(const std::string& s) {
  if (s.empty() || s.size() > 16) throw ValidationError("bitstring length must be 1..16");
  Bitstring b = 0;
  const int n = static_cast<int>(s.size());
  for (int q = 0; q < n; ++q) {
    if (s[q] == '1') b |= qubit_bit(q, n);
    else if (s[q] != '0') throw ValidationError("bitstring '" + s + "' contains non-binary characters");
  }
  return b;
}

std::string format_bitstring(Bitstring b, int n_orbitals) {
  std::string s(n_orbitals, '0');
  for (int q = 0; q < n_orbitals; ++q)
    if (b & qubit_bit(q, n_orbitals)) s[q] = '1';
  return s;
}

Bitstring hartree_fock_bitstring(int n_orbitals, int n_electrons) {
  Bitstring b = 0;
  for (int p = 0; p < n_electrons; ++p) b |= qubit_bit(p, n_orbitals);
  return b;
}

std::optional<std::pair<std::uint64_t, int>> apply_ladders(std::span<const Ladder> ops,
                                                           std::uint64_t det, int n_orbitals) {
  const int n_modes = 2 * n_orbitals;
  int sign = 1;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    const int shift = n_modes - 1 - it->spin_orbital;
    const std::uint64_t bit = std::uint64_t{1} << shift;
    const bool occupied = det & bit;
    if (occupied == it->create) return std::nullopt;
    // Jordan-Wigner string over lower spin-orbitals = higher bits.
    if (std::popcount(det >> (shift + 1)) & 1) sign = -sign;
    det ^= bit;
  }
  return std::pair{det, sign};
}

namespace {

std::vector<Bitstring> strings_with_weight(int n, int k) {
  std::vector<Bitstring> out;
  for (Bitstring b = 0; b < (Bitstring{1} << n); ++b)
    if (std::popcount(b) == k) out.push_back(b);
  return out;
}

}  // namespace

Sector::Sector(int n_orbitals, int n_alpha, int n_beta)
    : n_orbitals_(n_orbitals), n_alpha_(n_alpha), n_beta_(n_beta) {
  if (n_orbitals <= 0 || n_orbitals > 16) throw ValidationError("sector needs 1..16 orbitals");
  if (n_alpha < 0 || n_beta < 0 || n_alpha > n_orbitals || n_beta > n_orbitals)
    throw ValidationError("invalid sector electron counts");
  alpha_ = strings_with_weight(n_orbitals, n_alpha);
  beta_ = strings_with_weight(n_orbitals, n_beta);
  alpha_pos_.assign(std::size_t{1} << n_orbitals, -1);
  beta_pos_.assign(std::size_t{1} << n_orbitals, -1);
  for (std::size_t i = 0; i < alpha_.size(); ++i) alpha_pos_[alpha_[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < beta_.size(); ++i) beta_pos_[beta_[i]] = static_cast<int>(i);
}

std::optional<std::size_t> Sector::find(Bitstring alpha, Bitstring beta) const {
  if (alpha >= alpha_pos_.size() || beta >= beta_pos_.size()) return std::nullopt;
  const int a = alpha_pos_[alpha], b = beta_pos_[beta];
  if (a < 0 || b < 0) return std::nullopt;
  return static_cast<std::size_t>(a) * beta_.size() + b;
}

std::optional<std::size_t> Sector::find_full(std::uint64_t full) const {
  const std::uint64_t mask = (std::uint64_t{1} << n_orbitals_) - 1;
  return find(static_cast<Bitstring>(full >> n_orbitals_), static_cast<Bitstring>(full & mask));
}

std::size_t Sector::hartree_fock_index() const {
  return *find(hartree_fock_bitstring(n_orbitals_, n_alpha_),
               hartree_fock_bitstring(n_orbitals_, n_beta_));
}

std::string Sector::label(std::size_t i) const {
  return format_bitstring(alpha_of(i), n_orbitals_) + "|" +
         format_bitstring(beta_of(i), n_orbitals_);
}

void CIVector::normalize(std::optional<std::size_t> anchor) {
  const double nrm = amplitudes.norm();
  if (nrm == 0.0) throw NumericalError("cannot normalize a zero CI vector");
  amplitudes /= nrm;
  Eigen::Index k = 0;
  if (anchor && std::abs(amplitudes[*anchor]) > 1e-12) k = static_cast<Eigen::Index>(*anchor);
  else amplitudes.cwiseAbs().maxCoeff(&k);
  const cplx a = amplitudes[k];
  amplitudes *= std::conj(a) / std::abs(a);
  amplitudes[k] = std::abs(a);
}

Eigen::VectorXcd CIVector::to_fock() const {
  const std::size_t dim = std::size_t{1} << (2 * sector.n_orbitals());
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
  for (std::size_t i = 0; i < sector.dim(); ++i) out[sector.full_index(i)] = amplitudes[i];
  return out;
}

namespace {

// Visits every (target, value) produced by H acting on determinant `det`.
template <class Emit>
void hamiltonian_action(const ActiveSpaceHamiltonian& ham, std::uint64_t det, Emit&& emit) {
  const int n = ham.n_orbitals();
  emit(det, ham.e_core());
  for (int s = 0; s < 2; ++s)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        const double h = ham.one(p, q);
        if (h == 0.0) continue;
        const Ladder ops[] = {{s * n + p, true}, {s * n + q, false}};
        if (auto r = apply_ladders(ops, det, n)) emit(r->first, h * r->second);
      }
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          for (int r = 0; r < n; ++r)
            for (int u = 0; u < n; ++u) {
              const double g = ham.two(p, q, r, u);
              if (g == 0.0) continue;
              const Ladder ops[] = {
                  {s * n + p, true}, {t * n + r, true}, {t * n + u, false}, {s * n + q, false}};
              if (auto res = apply_ladders(ops, det, n)) emit(res->first, 0.5 * g * res->second);
            }
}

}  // namespace

Eigen::SparseMatrix<double> sector_hamiltonian(const ActiveSpaceHamiltonian& ham,
                                               const Sector& sector) {
  if (sector.n_orbitals() != ham.n_orbitals())
    throw ValidationError("sector and Hamiltonian disagree on the orbital count");
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t j = 0; j < sector.dim(); ++j)
    hamiltonian_action(ham, sector.full_index(j), [&](std::uint64_t target, double v) {
      const auto i = sector.find_full(target);
      if (!i) throw NumericalError("Hamiltonian left the particle-number sector");
      trips.emplace_back(static_cast<int>(*i), static_cast<int>(j), v);
    });
  Eigen::SparseMatrix<double> h(sector.dim(), sector.dim());
  h.setFromTriplets(trips.begin(), trips.end());
  h.prune(0.0);
  return h;
}

Eigen::MatrixXd fock_hamiltonian(const ActiveSpaceHamiltonian& ham) {
  const int n = ham.n_orbitals();
  if (n > 6) throw CapacityError("Fock-space matrix limited to 6 orbitals");
  const std::size_t dim = std::size_t{1} << (2 * n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (std::uint64_t j = 0; j < dim; ++j)
    hamiltonian_action(ham, j, [&](std::uint64_t i, double v) { m(i, j) += v; });
  return m;
}

Eigen::MatrixXd one_rdm(const CIVector& psi) {
  const Sector& sec = psi.sector;
  const int n = sec.n_orbitals();
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t j = 0; j < sec.dim(); ++j) {
    if (psi.amplitudes[j] == cplx{}) continue;
    const std::uint64_t det = sec.full_index(j);
    for (int s = 0; s < 2; ++s)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          const Ladder ops[] = {{s * n + p, true}, {s * n + q, false}};
          if (auto r = apply_ladders(ops, det, n)) {
            const auto i = *sec.find_full(r->first);
            g(p, q) += std::conj(psi.amplitudes[i]) * psi.amplitudes[j] * double(r->second);
          }
        }
  }
  return g.real();
}

double expectation(const Eigen::SparseMatrix<double>& h, const Eigen::VectorXcd& v) {
  const Eigen::VectorXcd hv = h.cast<cplx>() * v;
  return v.dot(hv).real();
}

}  // namespace forgesim
