#include "forgesim/forging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <Eigen/SVD>

#include "forgesim/error.hpp"

namespace forgesim {

void ForgedAnsatz::validate() const {
  layout.validate();
  if (bitstrings.empty()) throw ValidationError("ansatz needs at least one bitstring");
  const Bitstring limit = Bitstring{1} << layout.n_qubits;
  const int w = std::popcount(bitstrings.front());
  std::set<Bitstring> seen;
  for (Bitstring b : bitstrings) {
    if (b >= limit) throw ValidationError("bitstring longer than the register");
    if (std::popcount(b) != w) throw ValidationError("bitstrings must share one Hamming weight");
    if (!seen.insert(b).second) throw ValidationError("bitstrings must be distinct");
  }
  if (schmidt.size() != static_cast<Eigen::Index>(bitstrings.size()))
    throw ValidationError("one Schmidt coefficient per bitstring required");
  if (theta.size() != static_cast<Eigen::Index>(layout.hops.size()))
    throw ValidationError("one angle per hop gate required");
  if (std::abs(schmidt.squaredNorm() - 1.0) > 1e-12)
    throw ValidationError("Schmidt coefficients must be normalized");
}

void ForgedAnsatz::normalize() {
  const double n = schmidt.norm();
  if (n == 0.0) throw NumericalError("all Schmidt coefficients vanish");
  schmidt /= n;
}

ForgedAnsatz make_ansatz(int n_qubits, std::vector<Bitstring> bitstrings) {
  ForgedAnsatz a;
  a.layout = brick_wall_layout(n_qubits);
  a.bitstrings = std::move(bitstrings);
  a.schmidt = Eigen::VectorXd::Zero(a.bitstrings.size());
  if (!a.bitstrings.empty()) a.schmidt[0] = 1.0;
  a.theta = Eigen::VectorXd::Zero(a.layout.hops.size());
  a.validate();
  return a;
}

ForgedAnsatz extend_ansatz(const ForgedAnsatz& ansatz, Bitstring bitstring) {
  ForgedAnsatz out = ansatz;
  out.bitstrings.push_back(bitstring);
  out.schmidt.conservativeResize(out.schmidt.size() + 1);
  out.schmidt[out.schmidt.size() - 1] = 0.0;
  out.validate();
  return out;
}

std::string Preparation::label() const {
  if (diagonal()) return "x" + std::to_string(k);
  return "phi" + std::to_string(phase) + "_" + std::to_string(k) + std::to_string(l);
}

std::vector<Preparation> forged_preparations(int n_bitstrings) {
  std::vector<Preparation> out;
  for (int k = 0; k < n_bitstrings; ++k) out.push_back({k, k, 0});
  for (int k = 0; k < n_bitstrings; ++k)
    for (int l = k + 1; l < n_bitstrings; ++l)
      for (int p = 0; p < 4; ++p) out.push_back({k, l, p});
  return out;
}

Circuit preparation_circuit(const ForgedAnsatz& ansatz, const Preparation& prep) {
  const int n = ansatz.n_qubits();
  const InitialState init =
      prep.diagonal()
          ? InitialState::bitstring(ansatz.bitstrings.at(prep.k))
          : InitialState::superposition(ansatz.bitstrings.at(prep.k), ansatz.bitstrings.at(prep.l),
                                        prep.phase);
  Circuit c = initial_state_circuit(n, init);
  c.append(ansatz.layout.circuit(ansatz.theta));
  return c;
}

ForgedElements forged_matrix_elements(int n_bitstrings, const SpinFactorizedHamiltonian& ham,
                                      const PrepExpectation& measure) {
  const auto preps = forged_preparations(n_bitstrings);
  ForgedElements el;
  el.n_bitstrings = n_bitstrings;
  const cplx minus_i_pow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};

  auto fill = [&](const PauliSum& op) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n_bitstrings, n_bitstrings);
    // identity factors need no measurement
    if (op.size() == 1 && op.terms().begin()->first.is_identity()) {
      m.diagonal().setConstant(op.terms().begin()->second);
      return m;
    }
    for (std::size_t i = 0; i < preps.size(); ++i) {
      const Preparation& pr = preps[i];
      const double v = measure(i, op);
      if (pr.diagonal()) m(pr.k, pr.k) += v;
      else m(pr.k, pr.l) += 0.5 * minus_i_pow[pr.phase] * v;
    }
    for (int k = 0; k < n_bitstrings; ++k)
      for (int l = k + 1; l < n_bitstrings; ++l) m(l, k) = std::conj(m(k, l));
    return m;
  };
  for (const SpinTerm& t : ham.terms) {
    el.alpha.push_back(fill(t.alpha));
    el.beta.push_back(fill(t.beta));
  }
  return el;
}

ForgedElements forged_matrix_elements(const ForgedAnsatz& ansatz,
                                      const SpinFactorizedHamiltonian& ham) {
  if (ham.n_qubits != ansatz.n_qubits())
    throw ValidationError("ansatz and Hamiltonian disagree on the register width");
  const auto preps = forged_preparations(ansatz.n_bitstrings());
  std::vector<Statevector> states;
  states.reserve(preps.size());
  for (const auto& p : preps)
    states.push_back(apply_circuit(preparation_circuit(ansatz, p), Statevector(ansatz.n_qubits())));
  return forged_matrix_elements(ansatz.n_bitstrings(), ham,
                                [&](std::size_t i, const PauliSum& op) {
                                  return expectation(states[i], op);
                                });
}

double assemble_forged_energy(const ForgedElements& el, const Eigen::VectorXd& schmidt,
                              const SpinFactorizedHamiltonian& ham) {
  cplx e = ham.constant;
  for (std::size_t mu = 0; mu < ham.terms.size(); ++mu) {
    const double c = ham.terms[mu].coefficient;
    for (int k = 0; k < el.n_bitstrings; ++k)
      for (int l = 0; l < el.n_bitstrings; ++l)
        e += c * schmidt[k] * schmidt[l] * el.alpha[mu](k, l) * el.beta[mu](k, l);
  }
  if (std::abs(e.imag()) > 1e-8) throw NumericalError("forged energy is not real");
  return e.real();
}

ForgedEnergy forged_energy(const ForgedAnsatz& ansatz, const SpinFactorizedHamiltonian& ham) {
  ansatz.validate();
  ForgedEnergy out;
  out.elements = forged_matrix_elements(ansatz, ham);
  out.value = assemble_forged_energy(out.elements, ansatz.schmidt, ham);
  return out;
}

namespace {

std::vector<Statevector> dressed_bitstrings(const ForgedAnsatz& ansatz) {
  std::vector<Statevector> out;
  const Circuit u = ansatz.layout.circuit(ansatz.theta);
  for (Bitstring b : ansatz.bitstrings)
    out.push_back(apply_circuit(u, Statevector::basis(ansatz.n_qubits(), b)));
  return out;
}

}  // namespace

CIVector forged_state(const ForgedAnsatz& ansatz, const Sector& sector) {
  if (sector.n_orbitals() != ansatz.n_qubits())
    throw ValidationError("sector and ansatz disagree on the orbital count");
  const auto dressed = dressed_bitstrings(ansatz);
  CIVector psi{sector, Eigen::VectorXcd::Zero(sector.dim())};
  double weight = 0.0;
  for (std::size_t i = 0; i < sector.dim(); ++i) {
    cplx a = 0.0;
    for (std::size_t k = 0; k < dressed.size(); ++k)
      a += ansatz.schmidt[k] * dressed[k].amplitudes()[sector.alpha_of(i)] *
           dressed[k].amplitudes()[sector.beta_of(i)];
    psi.amplitudes[i] = a;
    weight += std::norm(a);
  }
  if (std::abs(weight - 1.0) > 1e-10)
    throw NumericalError("forged state has weight outside the requested sector");
  return psi;
}

Eigen::VectorXcd forged_statevector(const ForgedAnsatz& ansatz) {
  const auto dressed = dressed_bitstrings(ansatz);
  const int n = ansatz.n_qubits();
  if (n > 8) throw CapacityError("full forged statevector limited to 8 qubits per register");
  const std::size_t d = std::size_t{1} << n;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d * d);
  for (std::size_t k = 0; k < dressed.size(); ++k) {
    const auto& v = dressed[k].amplitudes();
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) out[a * d + b] += ansatz.schmidt[k] * v[a] * v[b];
  }
  return out;
}

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& x0, double step, double tolerance,
                          int max_evaluations, std::vector<double>* trace) {
  const Eigen::Index n = x0.size();
  SimplexResult res;
  if (n == 0) {
    res.x = x0;
    res.value = f(x0);
    res.evaluations = 1;
    res.converged = true;
    return res;
  }
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) pts[i + 1][i] += step;
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };
  for (Eigen::Index i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<int> order(n + 1);
  bool converged = false;
  while (evals < max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order.front(), worst = order.back(), second = order[n - 1];
    if (trace) trace->push_back(vals[best]);
    double size = 0.0;
    for (Eigen::Index i = 0; i <= n; ++i) size = std::max(size, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
    if (vals[worst] - vals[best] < tolerance && size < 1e3 * std::sqrt(tolerance)) {
      converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = eval(xe);
      if (fe < fr) { pts[worst] = xe; vals[worst] = fe; }
      else { pts[worst] = xr; vals[worst] = fr; }
    } else if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                         : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
      const double fc = eval(xc);
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = xc;
        vals[worst] = fc;
      } else {
        for (Eigen::Index i = 0; i <= n; ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
          vals[i] = eval(pts[i]);
        }
      }
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  res.x = pts[it - vals.begin()];
  res.value = *it;
  res.evaluations = evals;
  res.converged = converged;
  return res;
}

VqeResult vqe_minimize(const ForgedAnsatz& ansatz, const SpinFactorizedHamiltonian& ham,
                       const OptimizerConfig& config) {
  ansatz.validate();
  const Eigen::Index nh = ansatz.theta.size(), nk = ansatz.schmidt.size();
  ForgedAnsatz work = ansatz;
  auto energy_at = [&](const Eigen::VectorXd& x) {
    work.theta = x.head(nh);
    work.schmidt = x.tail(nk);
    const double nrm = work.schmidt.norm();
    if (nrm < 1e-12) return std::numeric_limits<double>::infinity();
    work.schmidt /= nrm;
    return assemble_forged_energy(forged_matrix_elements(work, ham), work.schmidt, ham);
  };

  Eigen::VectorXd x(nh + nk);
  x << ansatz.theta, ansatz.schmidt;
  VqeResult out;
  out.initial_energy = energy_at(x);
  double best = out.initial_energy;
  Eigen::VectorXd best_x = x;

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  for (int round = 0; round <= config.restarts; ++round) {
    Eigen::VectorXd start = best_x;
    if (round > 0)
      for (Eigen::Index i = 0; i < start.size(); ++i) start[i] += config.restart_spread * jitter(rng);
    const SimplexResult r = nelder_mead(energy_at, start, config.initial_step, config.tolerance,
                                        config.max_iterations, &out.trace);
    out.evaluations += r.evaluations;
    if (r.value < best) {
      best = r.value;
      best_x = r.x;
    }
    out.converged = r.converged;
  }
  out.theta = best_x.head(nh);
  out.schmidt = best_x.tail(nk);
  out.schmidt /= out.schmidt.norm();
  out.energy = best;
  return out;
}

BitstringSelection select_bitstrings(const CIVector& fci, int n_bitstrings, double zero_tol) {
  const Sector& sec = fci.sector;
  const auto& alphas = sec.alpha_strings();
  const auto& betas = sec.beta_strings();
  Eigen::MatrixXcd c(alphas.size(), betas.size());
  for (std::size_t i = 0; i < sec.dim(); ++i)
    c(i / betas.size(), i % betas.size()) = fci.amplitudes[i];
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(c, Eigen::ComputeThinU);
  const Eigen::VectorXd sv = svd.singularValues();
  int nonzero = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] * sv[i] > zero_tol) ++nonzero;
  if (n_bitstrings < 1 || n_bitstrings > nonzero)
    throw ValidationError("requested " + std::to_string(n_bitstrings) +
                          " bitstrings but the Schmidt rank is " + std::to_string(nonzero));

  BitstringSelection out;
  std::set<Bitstring> used;
  for (int k = 0; k < n_bitstrings; ++k) {
    const Eigen::VectorXcd u = svd.matrixU().col(k);
    std::vector<Eigen::Index> idx(u.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](auto a, auto b) { return std::abs(u[a]) > std::abs(u[b]) + 1e-12; });
    for (auto i : idx)
      if (used.insert(alphas[i]).second) {
        out.bitstrings.push_back(alphas[i]);
        break;
      }
    out.weights.push_back(sv[k] * sv[k]);
  }
  return out;
}

}  // namespace forgesim
