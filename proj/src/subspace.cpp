#include "forgesim/subspace.hpp"

#include <algorithm>

#include "forgesim/error.hpp"

namespace forgesim {

namespace {

std::string spin_tag(int spin) { return spin == 0 ? "a" : "b"; }

int so(int spin, int orbital, int n) { return spin * n + orbital; }

void accumulate_pure(const Eigen::VectorXcd& v, double weight,
                     const Eigen::SparseMatrix<double>& h,
                     const std::vector<Eigen::SparseMatrix<double>>& ops, SubspaceProblem& out) {
  const Eigen::Index m = static_cast<Eigen::Index>(ops.size());
  Eigen::MatrixXcd cols(v.size(), m);
  for (Eigen::Index j = 0; j < m; ++j) cols.col(j) = ops[j].cast<cplx>() * v;
  const Eigen::MatrixXcd hcols = h.cast<cplx>() * cols;
  out.h.noalias() += weight * (cols.adjoint() * hcols);
  out.s.noalias() += weight * (cols.adjoint() * cols);
}

void add_density_block(const SectorDensity& rho, const ActiveSpaceHamiltonian& ham,
                       const ExcitationBasis& basis, SubspaceProblem& out) {
  if (rho.sector.dim() == 0) return;
  if (rho.sector.n_orbitals() != basis.n_orbitals)
    throw ValidationError("density and excitation basis disagree on orbital count");
  const Eigen::SparseMatrix<double> h = sector_hamiltonian(ham, rho.sector);
  std::vector<Eigen::SparseMatrix<double>> ops;
  for (const Excitation& op : basis.operators) ops.push_back(excitation_matrix(op, rho.sector));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix);
  if (es.info() != Eigen::Success) throw NumericalError("density eigensolver failed");
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double w = es.eigenvalues()[i];
    if (std::abs(w) < 1e-14) continue;
    accumulate_pure(es.eigenvectors().col(i), w, h, ops, out);
  }
}

SubspaceProblem zero_problem(std::size_t m) {
  return {Eigen::MatrixXcd::Zero(m, m), Eigen::MatrixXcd::Zero(m, m)};
}

void symmetrize(SubspaceProblem& p) {
  p.h = 0.5 * (p.h + p.h.adjoint()).eval();
  p.s = 0.5 * (p.s + p.s.adjoint()).eval();
}

}  // namespace

ExcitationBasis build_excitations(int n_orbitals, int n_alpha, int n_beta) {
  if (n_orbitals < 0 || n_alpha < 0 || n_beta < 0 || n_alpha > n_orbitals || n_beta > n_orbitals)
    throw ValidationError("invalid sector for excitation basis");
  ExcitationBasis b;
  b.n_orbitals = n_orbitals;
  b.operators.push_back({{}, "I"});
  const int n = n_orbitals;
  const int occ[2] = {n_alpha, n_beta};
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < occ[s]; ++i)
      for (int a = occ[s]; a < n; ++a)
        b.operators.push_back({{{so(s, a, n), true}, {so(s, i, n), false}},
                               std::to_string(a) + spin_tag(s) + "<-" + std::to_string(i) +
                                   spin_tag(s)});
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < occ[s]; ++i)
      for (int j = i + 1; j < occ[s]; ++j)
        for (int a = occ[s]; a < n; ++a)
          for (int c = a + 1; c < n; ++c)
            b.operators.push_back(
                {{{so(s, a, n), true}, {so(s, c, n), true}, {so(s, j, n), false},
                  {so(s, i, n), false}},
                 std::to_string(a) + spin_tag(s) + std::to_string(c) + spin_tag(s) + "<-" +
                     std::to_string(i) + spin_tag(s) + std::to_string(j) + spin_tag(s)});
  for (int i = 0; i < n_alpha; ++i)
    for (int j = 0; j < n_beta; ++j)
      for (int a = n_alpha; a < n; ++a)
        for (int c = n_beta; c < n; ++c)
          b.operators.push_back({{{so(0, a, n), true}, {so(1, c, n), true}, {so(1, j, n), false},
                                  {so(0, i, n), false}},
                                 std::to_string(a) + "a" + std::to_string(c) + "b<-" +
                                     std::to_string(i) + "a" + std::to_string(j) + "b"});
  return b;
}

Eigen::SparseMatrix<double> excitation_matrix(const Excitation& op, const Sector& sector) {
  const std::size_t d = sector.dim();
  Eigen::SparseMatrix<double> m(d, d);
  if (op.is_identity()) {
    m.setIdentity();
    return m;
  }
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t j = 0; j < d; ++j) {
    const auto hit = apply_ladders(op.ladders, sector.full_index(j), sector.n_orbitals());
    if (!hit) continue;
    const auto i = sector.find_full(hit->first);
    if (!i) throw ValidationError("excitation leaves the sector");
    trips.emplace_back(*i, j, hit->second);
  }
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

SubspaceProblem subspace_matrices(const CIVector& psi, const ActiveSpaceHamiltonian& ham,
                                  const ExcitationBasis& basis) {
  if (psi.sector.n_orbitals() != basis.n_orbitals ||
      static_cast<std::size_t>(psi.amplitudes.size()) != psi.sector.dim())
    throw ValidationError("CI vector does not match the excitation basis");
  const Eigen::SparseMatrix<double> h = sector_hamiltonian(ham, psi.sector);
  std::vector<Eigen::SparseMatrix<double>> ops;
  for (const Excitation& op : basis.operators) ops.push_back(excitation_matrix(op, psi.sector));
  SubspaceProblem out = zero_problem(basis.size());
  accumulate_pure(psi.amplitudes, 1.0, h, ops, out);
  symmetrize(out);
  return out;
}

SubspaceProblem subspace_matrices(const SectorDensity& rho, const ActiveSpaceHamiltonian& ham,
                                  const ExcitationBasis& basis) {
  SubspaceProblem out = zero_problem(basis.size());
  add_density_block(rho, ham, basis, out);
  symmetrize(out);
  return out;
}

SubspaceProblem subspace_matrices(const std::vector<SectorDensity>& blocks,
                                  const ActiveSpaceHamiltonian& ham,
                                  const ExcitationBasis& basis) {
  SubspaceProblem out = zero_problem(basis.size());
  for (const SectorDensity& rho : blocks) add_density_block(rho, ham, basis, out);
  symmetrize(out);
  return out;
}

SubspaceSolution solve_generalized(const SubspaceProblem& problem, double overlap_cutoff) {
  if (!(overlap_cutoff > 0.0)) throw ValidationError("overlap cutoff must be positive");
  if (problem.h.rows() != problem.s.rows() || problem.h.rows() != problem.h.cols())
    throw ValidationError("H and S dimensions differ");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> se(problem.s);
  if (se.info() != Eigen::Success) throw NumericalError("overlap eigensolver failed");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < se.eigenvalues().size(); ++i)
    if (se.eigenvalues()[i] >= overlap_cutoff) keep.push_back(i);
  if (keep.empty()) throw NumericalError("all overlap eigenvalues fall below the cutoff");
  Eigen::MatrixXcd x(problem.s.rows(), keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c)
    x.col(c) = se.eigenvectors().col(keep[c]) / std::sqrt(se.eigenvalues()[keep[c]]);
  Eigen::MatrixXcd hp = x.adjoint() * problem.h * x;
  hp = 0.5 * (hp + hp.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> he(hp);
  if (he.info() != Eigen::Success) throw NumericalError("subspace eigensolver failed");
  SubspaceSolution sol;
  sol.energies = he.eigenvalues();
  sol.coefficients = x * he.eigenvectors();
  sol.retained_rank = static_cast<int>(keep.size());
  return sol;
}

QseResult ef_qse_energy(const ForgedAnsatz& ansatz, const ActiveSpaceHamiltonian& ham,
                        const QseOptions& options) {
  const Sector sector(ham.n_orbitals(), ham.n_alpha(), ham.n_beta());
  const ExcitationBasis basis = build_excitations(ham.n_orbitals(), ham.n_alpha(), ham.n_beta());
  QseResult out;
  out.basis_size = basis.size();
  SubspaceProblem problem;
  double cutoff = options.overlap_cutoff.value_or(kDefaultOverlapCutoff);
  if (options.source == QseSource::Exact) {
    problem = subspace_matrices(forged_state(ansatz, sector), ham, basis);
  } else {
    const ForgedTomography tomo =
        forged_tomography_sweep(ansatz, options.shots, options.seed, options.tomography, false);
    if (options.source == QseSource::Sampled && !options.overlap_cutoff && options.shots > 0) {
      std::vector<double> med;
      for (const BlochVector& b : tomo.bloch) med.push_back(b.median_error());
      std::nth_element(med.begin(), med.begin() + med.size() / 2, med.end());
      cutoff = std::max(10.0 * med[med.size() / 2], kDefaultOverlapCutoff);
    }
    if (options.source == QseSource::Sampled && !options.project_first) {
      problem = subspace_matrices(
          forged_all_sector_densities(tomo, ansatz.schmidt, ham.n_orbitals()), ham, basis);
    } else {
      SectorDensity rho = forged_sector_density(tomo, ansatz.schmidt, sector);
      renormalize(rho);
      if (options.source == QseSource::Sampled) {
        problem = subspace_matrices(rho, ham, basis);
      } else {
        CIExtraction ci = extract_ci_vector(rho);
        out.used_fallback = ci.used_fallback;
        problem = subspace_matrices(ci.vector, ham, basis);
        out.purified_state = std::move(ci.vector);
      }
    }
  }
  const SubspaceSolution sol = solve_generalized(problem, cutoff);
  out.energy = sol.energies[0];
  out.reference_energy = problem.reference_energy();
  out.retained_rank = sol.retained_rank;
  out.overlap_cutoff = cutoff;
  return out;
}

}  // namespace forgesim
