#include "forgesim/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "forgesim/error.hpp"

namespace forgesim {

ActiveSpaceHamiltonian::ActiveSpaceHamiltonian(int n_orbitals, int n_alpha, int n_beta)
    : n_orbitals_(n_orbitals),
      n_alpha_(n_alpha),
      n_beta_(n_beta),
      h1_(Eigen::MatrixXd::Zero(n_orbitals, n_orbitals)),
      h2_(static_cast<std::size_t>(n_orbitals) * n_orbitals * n_orbitals * n_orbitals, 0.0) {
  if (n_orbitals <= 0) throw ValidationError("n_orbitals must be positive");
  if (n_orbitals > 16) throw CapacityError("more than 16 spatial orbitals");
  set_electrons(n_alpha, n_beta);
}

void ActiveSpaceHamiltonian::set_electrons(int n_alpha, int n_beta) {
  if (n_alpha < 0 || n_beta < 0 || n_alpha > n_orbitals_ || n_beta > n_orbitals_)
    throw ValidationError("electron counts must satisfy 0 <= n_alpha, n_beta <= n_orbitals");
  n_alpha_ = n_alpha;
  n_beta_ = n_beta;
}

void ActiveSpaceHamiltonian::set_one(int p, int q, double v) {
  h1_(p, q) = v;
  h1_(q, p) = v;
}

void ActiveSpaceHamiltonian::set_two(int p, int q, int r, int s, double v) {
  for (auto [a, b, c, d] : {std::array{p, q, r, s}, std::array{q, p, r, s},
                            std::array{p, q, s, r}, std::array{q, p, s, r},
                            std::array{r, s, p, q}, std::array{s, r, p, q},
                            std::array{r, s, q, p}, std::array{s, r, q, p}})
    h2_[index(a, b, c, d)] = v;
}

void ActiveSpaceHamiltonian::validate(double tol) const {
  const int n = n_orbitals_;
  if ((h1_ - h1_.transpose()).cwiseAbs().maxCoeff() > tol)
    throw ValidationError("one-electron integrals are not symmetric");
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = two(p, q, r, s);
          if (std::abs(v - two(q, p, r, s)) > tol || std::abs(v - two(p, q, s, r)) > tol ||
              std::abs(v - two(r, s, p, q)) > tol)
            throw ValidationError("two-electron integrals lack 8-fold symmetry");
        }
  if (n_alpha_ > n || n_beta_ > n) throw ValidationError("more electrons than orbitals");
}

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

bool header_end(const std::string& line) {
  const std::string u = upper(line);
  return u.find("&END") != std::string::npos || u.find('/') != std::string::npos;
}

int parse_int(const std::string& tok, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("malformed header value for " + key + ": '" + tok + "'", line);
  }
}

}  // namespace

ActiveSpaceHamiltonian parse_fcidump(std::istream& in) {
  std::string line;
  int line_no = 0;
  int norb = -1, nelec = -1, ms2 = 0;

  // Header: everything up to &END or '/'. Tokens split on commas and blanks.
  bool started = false, finished = false;
  std::string pending_key;
  while (!finished && std::getline(in, line)) {
    ++line_no;
    std::string body = line;
    if (!started) {
      const std::string u = upper(body);
      const auto pos = u.find("&FCI");
      if (pos == std::string::npos) {
        if (u.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw ParseError("expected '&FCI' namelist header", line_no);
      }
      started = true;
      body = body.substr(pos + 4);
    }
    finished = header_end(body);
    if (finished) {
      const std::string u = upper(body);
      auto cut = u.find("&END");
      if (cut == std::string::npos) cut = u.find('/');
      body = body.substr(0, cut);
    }
    for (char& c : body)
      if (c == ',') c = ' ';
    std::istringstream ts(body);
    std::string tok;
    while (ts >> tok) {
      std::string key = pending_key, value;
      const auto eq = tok.find('=');
      if (eq != std::string::npos) {
        key = upper(tok.substr(0, eq));
        value = tok.substr(eq + 1);
        pending_key = key;
        if (value.empty()) continue;
      } else {
        if (pending_key.empty()) throw ParseError("unexpected header token '" + tok + "'", line_no);
        value = tok;
      }
      if (key == "NORB") norb = parse_int(value, key, line_no);
      else if (key == "NELEC") nelec = parse_int(value, key, line_no);
      else if (key == "MS2") ms2 = parse_int(value, key, line_no);
      else if (key == "ORBSYM" || key == "ISYM" || key == "UHF" || key == "IUHF" ||
               key == "PNTGRP" || key == "IPRTIM" || key == "ST" || key == "III")
        parse_int(value, key, line_no);
      // unknown namelist keys are tolerated
    }
  }
  if (!started) throw ParseError("empty FCIDUMP", line_no);
  if (!finished) throw ParseError("header not terminated by &END or '/'", line_no);
  if (norb <= 0) throw ParseError("header is missing a positive NORB", line_no);
  if (nelec < 0) throw ParseError("header is missing NELEC", line_no);
  if ((nelec + ms2) % 2 != 0 || std::abs(ms2) > nelec)
    throw ParseError("NELEC and MS2 are inconsistent", line_no);

  const int n_alpha = (nelec + ms2) / 2, n_beta = (nelec - ms2) / 2;
  if (n_alpha > norb || n_beta > norb)
    throw ValidationError("NELEC exceeds the capacity of NORB orbitals");
  ActiveSpaceHamiltonian ham(norb, n_alpha, n_beta);

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string vtok;
    if (!(ls >> vtok)) continue;
    // Fortran exponents
    std::replace(vtok.begin(), vtok.end(), 'D', 'E');
    std::replace(vtok.begin(), vtok.end(), 'd', 'e');
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(vtok, &used);
      if (used != vtok.size()) throw std::invalid_argument(vtok);
    } catch (const std::exception&) {
      throw ParseError("non-numeric integral value '" + vtok + "'", line_no);
    }
    int idx[4];
    for (int& k : idx) {
      std::string t;
      if (!(ls >> t)) throw ParseError("integral line needs a value and four indices", line_no);
      try {
        std::size_t used = 0;
        k = std::stoi(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
      } catch (const std::exception&) {
        throw ParseError("non-numeric orbital index '" + t + "'", line_no);
      }
    }
    for (int k : idx)
      if (k < 0 || k > norb)
        throw ValidationError("line " + std::to_string(line_no) + ": orbital index " +
                              std::to_string(k) + " out of range 0.." + std::to_string(norb));
    const auto [i, j, k, l] = idx;
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      ham.set_e_core(value);
    } else if (k == 0 && l == 0) {
      if (i == 0 || j == 0) throw ValidationError("line " + std::to_string(line_no) +
                                                  ": one-electron entry with index 0");
      ham.set_one(i - 1, j - 1, value);
    } else if (j == 0 && k == 0 && l == 0) {
      // orbital energy line; not part of the Hamiltonian
    } else {
      if (i == 0 || j == 0 || k == 0 || l == 0)
        throw ValidationError("line " + std::to_string(line_no) +
                              ": two-electron entry with index 0");
      ham.set_two(i - 1, j - 1, k - 1, l - 1, value);
    }
  }
  return ham;
}

ActiveSpaceHamiltonian read_fcidump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open FCIDUMP '" + path.string() + "'");
  return parse_fcidump(in);
}

void write_fcidump(std::ostream& out, const ActiveSpaceHamiltonian& ham, double tol) {
  const int n = ham.n_orbitals();
  out << " &FCI NORB=" << n << ",NELEC=" << ham.n_alpha() + ham.n_beta()
      << ",MS2=" << ham.n_alpha() - ham.n_beta() << ",\n  ORBSYM=";
  for (int p = 0; p < n; ++p) out << "1,";
  out << "\n  ISYM=1,\n &END\n";
  out << std::scientific << std::setprecision(17);
  auto pair_index = [](int a, int b) { return a * (a + 1) / 2 + b; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l <= k; ++l) {
          if (pair_index(i, j) < pair_index(k, l)) continue;
          const double v = ham.two(i, j, k, l);
          if (std::abs(v) > tol)
            out << std::setw(26) << v << ' ' << i + 1 << ' ' << j + 1 << ' ' << k + 1 << ' '
                << l + 1 << '\n';
        }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      if (std::abs(ham.one(i, j)) > tol)
        out << std::setw(26) << ham.one(i, j) << ' ' << i + 1 << ' ' << j + 1 << " 0 0\n";
  out << std::setw(26) << ham.e_core() << " 0 0 0 0\n";
}

ActiveSpaceHamiltonian active_space_hamiltonian(const ActiveSpaceHamiltonian& full,
                                                const ActiveWindow& window) {
  const int n = full.n_orbitals();
  const int n_core = window.start;
  if (window.size <= 0 || window.start < 0 || window.start + window.size > n)
    throw ValidationError("active window lies outside the orbital range");
  const int na = full.n_alpha() - n_core, nb = full.n_beta() - n_core;
  if (na < 0 || nb < 0 || na > window.size || nb > window.size)
    throw ValidationError("active window cannot hold the non-core electrons");

  ActiveSpaceHamiltonian act(window.size, na, nb);
  double e = full.e_core();
  for (int c = 0; c < n_core; ++c) {
    e += 2.0 * full.one(c, c);
    for (int d = 0; d < n_core; ++d) e += 2.0 * full.two(c, c, d, d) - full.two(c, d, d, c);
  }
  act.set_e_core(e);
  for (int t = 0; t < window.size; ++t)
    for (int u = 0; u <= t; ++u) {
      const int p = window.start + t, q = window.start + u;
      double v = full.one(p, q);
      for (int c = 0; c < n_core; ++c) v += 2.0 * full.two(p, q, c, c) - full.two(p, c, c, q);
      act.set_one(t, u, v);
    }
  for (int t = 0; t < window.size; ++t)
    for (int u = 0; u < window.size; ++u)
      for (int v = 0; v < window.size; ++v)
        for (int w = 0; w < window.size; ++w) {
          const int o = window.start;
          act.set_two(t, u, v, w, full.two(o + t, o + u, o + v, o + w));
        }
  return act;
}

PauliSum jw_excitation(int p, int q, int n_modes) {
  return jw_creation(p, n_modes) * jw_annihilation(q, n_modes);
}

SpinFactorizedHamiltonian spin_factorize(const ActiveSpaceHamiltonian& ham, double prune_tol) {
  const int n = ham.n_orbitals();
  std::vector<PauliSum> e(static_cast<std::size_t>(n) * n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) e[p * n + q] = jw_excitation(p, q, n);
  auto E = [&](int p, int q) -> const PauliSum& { return e[p * n + q]; };

  // Same-spin part: sum h_pq E_pq + 1/2 sum (pq|rs) (E_pq E_rs - delta_qr E_ps).
  PauliSum same(n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (ham.one(p, q) != 0.0) same += E(p, q) * ham.one(p, q);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      PauliSum inner(n);
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double g = ham.two(p, q, r, s);
          if (g == 0.0) continue;
          inner += E(r, s) * (0.5 * g);
          if (q == r) same += E(p, s) * (-0.5 * g);
        }
      if (!inner.empty()) same += E(p, q) * inner;
    }
  same.prune(prune_tol);
  if (same.max_imag() > 1e-10) throw NumericalError("same-spin operator is not Hermitian");
  PauliSum same_real(n);
  for (const auto& [ps, c] : same.terms()) same_real.add(ps, c.real());

  SpinFactorizedHamiltonian out;
  out.n_qubits = n;
  out.constant = ham.e_core();
  const PauliSum id = PauliSum::identity(n);
  if (!same_real.empty()) {
    out.terms.push_back({SpinTerm::Kind::AlphaOnly, same_real, id, 1.0});
    out.terms.push_back({SpinTerm::Kind::BetaOnly, id, same_real, 1.0});
  }

  // Opposite-spin part: sum_{p<=q, r<=s} (pq|rs) S_pq (x) S_rs with
  // S_pq = E_pq + E_qp (p<q), S_pp = E_pp; both factors Hermitian.
  auto sym = [&](int p, int q) {
    PauliSum s = p == q ? E(p, p) : E(p, q) + E(q, p);
    s.prune(prune_tol);
    PauliSum r(n);
    for (const auto& [ps, c] : s.terms()) r.add(ps, c.real());
    return r;
  };
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) {
      PauliSum b(n);
      for (int r = 0; r < n; ++r)
        for (int s = r; s < n; ++s) {
          const double g = ham.two(p, q, r, s);
          if (std::abs(g) > prune_tol) b += sym(r, s) * g;
        }
      b.prune(prune_tol);
      if (b.empty()) continue;
      out.terms.push_back({SpinTerm::Kind::Cross, sym(p, q), std::move(b), 1.0});
    }
  return out;
}

Eigen::MatrixXcd SpinFactorizedHamiltonian::reassemble() const {
  if (n_qubits > 6) throw CapacityError("dense reassembly limited to 6 qubits per sector");
  const std::size_t dim = std::size_t{1} << (2 * n_qubits);
  Eigen::MatrixXcd m = constant * Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& t : terms) m += t.coefficient * kron(t.alpha.to_matrix(), t.beta.to_matrix());
  return m;
}

}  // namespace forgesim
