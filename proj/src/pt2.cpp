#include "forgesim/pt2.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "forgesim/error.hpp"
#include "forgesim/parallel.hpp"

namespace forgesim {

namespace {

ActiveSpaceHamiltonian combine(const ActiveSpaceHamiltonian& a, double ca,
                               const ActiveSpaceHamiltonian& b, double cb) {
  const int n = a.n_orbitals();
  ActiveSpaceHamiltonian out(n, a.n_alpha(), a.n_beta());
  out.set_e_core(ca * a.e_core() + cb * b.e_core());
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q) out.set_one(p, q, ca * a.one(p, q) + cb * b.one(p, q));
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          out.set_two(p, q, r, s, ca * a.two(p, q, r, s) + cb * b.two(p, q, r, s));
  return out;
}

Bitstring embed_string(Bitstring active, int n_core, int n_active, int n_full) {
  Bitstring out = 0;
  for (int c = 0; c < n_core; ++c) out |= qubit_bit(c, n_full);
  for (int t = 0; t < n_active; ++t)
    if (active & qubit_bit(t, n_active)) out |= qubit_bit(n_core + t, n_full);
  return out;
}

}  // namespace

DyallPartition DyallPartition::scaled(double lambda) const {
  DyallPartition out = *this;
  out.perturbation = combine(perturbation, lambda, perturbation, 0.0);
  out.full = combine(dyall, 1.0, perturbation, lambda);
  return out;
}

DyallPartition build_dyall(const ActiveSpaceHamiltonian& full, const ActiveWindow& window,
                           const CIVector& reference) {
  DyallPartition part;
  part.full = full;
  part.window = window;
  part.active = active_space_hamiltonian(full, window);
  const Sector& rs = reference.sector;
  if (rs.n_orbitals() != window.size || rs.n_alpha() != part.active.n_alpha() ||
      rs.n_beta() != part.active.n_beta())
    throw ValidationError("reference CI vector does not match the active window");

  const int n = full.n_orbitals();
  const int n_core = window.start;
  const int a0 = window.start, a1 = window.start + window.size;
  const Eigen::MatrixXd gamma = one_rdm(reference);
  Eigen::MatrixXd f(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      double v = full.one(p, q);
      for (int c = 0; c < n_core; ++c) v += 2.0 * full.two(p, q, c, c) - full.two(p, c, c, q);
      for (int t = a0; t < a1; ++t)
        for (int u = a0; u < a1; ++u)
          v += gamma(t - a0, u - a0) * (full.two(p, q, t, u) - 0.5 * full.two(p, t, u, q));
      f(p, q) = v;
    }
  part.fock = 0.5 * (f + f.transpose());

  ActiveSpaceHamiltonian d(n, full.n_alpha(), full.n_beta());
  double constant = part.active.e_core();
  for (int c = 0; c < n_core; ++c) constant -= 2.0 * part.fock(c, c);
  d.set_e_core(constant);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q) {
      const bool core = p < a0 && q < a0;
      const bool virt = p >= a1 && q >= a1;
      const bool act = p >= a0 && p < a1 && q >= a0 && q < a1;
      if (core || virt) d.set_one(p, q, part.fock(p, q));
      if (act) d.set_one(p, q, part.active.one(p - a0, q - a0));
    }
  for (int t = 0; t < window.size; ++t)
    for (int u = 0; u < window.size; ++u)
      for (int v = 0; v < window.size; ++v)
        for (int w = 0; w < window.size; ++w)
          d.set_two(a0 + t, a0 + u, a0 + v, a0 + w, part.active.two(t, u, v, w));
  part.dyall = d;
  part.perturbation = combine(full, 1.0, d, -1.0);
  return part;
}

CIVector embed_active(const CIVector& active, const ActiveSpaceHamiltonian& full,
                      const ActiveWindow& window) {
  const int n = full.n_orbitals();
  const Sector sector(n, full.n_alpha(), full.n_beta());
  const Sector& as = active.sector;
  if (as.n_orbitals() != window.size || as.n_alpha() + window.start != full.n_alpha() ||
      as.n_beta() + window.start != full.n_beta())
    throw ValidationError("active CI vector does not fit the window");
  CIVector out{sector, Eigen::VectorXcd::Zero(sector.dim())};
  for (std::size_t i = 0; i < as.dim(); ++i) {
    const Bitstring a = embed_string(as.alpha_of(i), window.start, window.size, n);
    const Bitstring b = embed_string(as.beta_of(i), window.start, window.size, n);
    // core strings sit in front of the active ones in the creation order, so
    // with both spins filled identically no sign arises.
    out.amplitudes[*sector.find(a, b)] = active.amplitudes[i];
  }
  return out;
}

PT2Result pt2_correction(const DyallPartition& partition, const CIVector& psi0, double e0,
                         const PT2Options& options) {
  const ActiveSpaceHamiltonian& full = partition.full;
  const int n = full.n_orbitals();
  const Sector sector(n, full.n_alpha(), full.n_beta());
  if (sector.dim() > 200000) throw CapacityError("PT2 full sector exceeds 200000 determinants");
  const CIVector ref = psi0.sector == sector ? psi0 : embed_active(psi0, full, partition.window);

  const Eigen::VectorXcd vpsi =
      sector_hamiltonian(partition.perturbation, sector).cast<cplx>() * ref.amplitudes;
  const Eigen::SparseMatrix<double> hd = sector_hamiltonian(partition.dyall, sector);

  // H_D conserves the core, active and virtual electron counts per spin.
  Bitstring core = 0, virt = 0;
  for (int p = 0; p < n; ++p) {
    if (p < partition.window.start) core |= qubit_bit(p, n);
    if (p >= partition.window.start + partition.window.size) virt |= qubit_bit(p, n);
  }
  std::map<std::tuple<int, int, int, int>, std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < sector.dim(); ++i) {
    const Bitstring a = sector.alpha_of(i), b = sector.beta_of(i);
    blocks[{std::popcount(a & core), std::popcount(b & core), std::popcount(a & virt),
            std::popcount(b & virt)}]
        .push_back(i);
  }
  std::vector<const std::vector<std::size_t>*> work;
  for (const auto& [key, idx] : blocks) {
    double coupling = 0.0;
    for (std::size_t i : idx) coupling += std::norm(vpsi[i]);
    if (coupling == 0.0) continue;
    if (idx.size() > options.block_capacity)
      throw CapacityError("H_D block of " + std::to_string(idx.size()) +
                          " determinants exceeds the dense capacity");
    work.push_back(&idx);
  }

  struct Partial {
    double sum = 0.0;
    int terms = 0;
    std::vector<std::size_t> intruders;
  };
  std::vector<Partial> partial(work.size());
  parallel_for(work.size(), options.jobs, [&](std::size_t w) {
    const std::vector<std::size_t>& idx = *work[w];
    const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(m, m);
    std::map<std::size_t, Eigen::Index> local;
    for (Eigen::Index k = 0; k < m; ++k) local[idx[k]] = k;
    for (Eigen::Index k = 0; k < m; ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(hd, idx[k]); it; ++it) {
        const auto row = local.find(static_cast<std::size_t>(it.row()));
        if (row == local.end()) throw NumericalError("Dyall Hamiltonian couples distinct blocks");
        block(row->second, k) = it.value();
      }
    Eigen::VectorXcd rhs(m);
    for (Eigen::Index k = 0; k < m; ++k) rhs[k] = vpsi[idx[k]];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
    if (es.info() != Eigen::Success) throw NumericalError("H_D block eigensolver failed");
    const Eigen::VectorXcd num = es.eigenvectors().cast<cplx>().adjoint() * rhs;
    Partial& out = partial[w];
    for (Eigen::Index k = 0; k < m; ++k) {
      const double amp = std::abs(num[k]);
      if (amp < options.numerator_floor) continue;
      const double denom = es.eigenvalues()[k] - e0;
      if (denom < options.degeneracy_threshold) {
        out.intruders.push_back(idx[k]);
        continue;
      }
      const double term = -amp * amp / denom;
      if (term > 0.0) throw NumericalError("positive PT2 term");
      out.sum += term;
      ++out.terms;
    }
  });

  PT2Result result;
  std::vector<std::size_t> intruders;
  for (const Partial& p : partial) {
    result.delta_e += p.sum;
    result.n_terms += p.terms;
    intruders.insert(intruders.end(), p.intruders.begin(), p.intruders.end());
  }
  if (!intruders.empty())
    throw IntruderStateError(std::to_string(intruders.size()) +
                                 " perturber state(s) within the degeneracy threshold of E0",
                             intruders);
  return result;
}

PT2Result pt2_with_sampling(const DyallPartition& partition, const std::vector<CIVector>& samples,
                            const PT2Options& options) {
  if (samples.empty()) throw ValidationError("PT2 sampling needs at least one CI vector");
  const Sector active_sector(partition.active.n_orbitals(), partition.active.n_alpha(),
                             partition.active.n_beta());
  const Eigen::SparseMatrix<double> h_act = sector_hamiltonian(partition.active, active_sector);
  std::vector<double> values(samples.size(), 0.0);
  std::vector<std::string> failures(samples.size());
  PT2Options inner = options;
  inner.jobs = 1;
  parallel_for(samples.size(), options.jobs, [&](std::size_t s) {
    try {
      const double e0 = expectation(h_act, samples[s].amplitudes);
      values[s] = pt2_correction(partition, samples[s], e0, inner).delta_e;
    } catch (const IntruderStateError& e) {
      failures[s] = "sample " + std::to_string(s) + " excluded: " + e.what();
    }
  });
  PT2Result out;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    if (!failures[s].empty()) {
      out.warnings.push_back(failures[s]);
      ++out.n_failed;
    } else {
      out.samples.push_back(values[s]);
    }
  }
  if (out.samples.empty()) throw NumericalError("every PT2 sample hit an intruder state");
  const double k = static_cast<double>(out.samples.size());
  out.delta_e = std::accumulate(out.samples.begin(), out.samples.end(), 0.0) / k;
  double var = 0.0;
  for (double v : out.samples) var += (v - out.delta_e) * (v - out.delta_e);
  out.std_error = out.samples.size() > 1 ? std::sqrt(var / (k - 1.0) / k) : 0.0;
  out.n_terms = static_cast<int>(out.samples.size());
  return out;
}

}  // namespace forgesim
