#include "forgesim/purify.hpp"

#include "forgesim/error.hpp"
#include "forgesim/parallel.hpp"

namespace forgesim {

namespace {

constexpr double kMinCapturedTrace = 1e-10;

const BlochVector& find_prep(const ForgedTomography& tomo, int k, int l, int p) {
  for (std::size_t i = 0; i < tomo.preparations.size(); ++i) {
    const Preparation& prep = tomo.preparations[i];
    if (prep.k == k && prep.l == l && (k == l || prep.phase == p)) return tomo.bloch[i];
  }
  throw ValidationError("tomography lacks a preparation required for reconstruction");
}

SectorDensity sector_block(const std::vector<std::vector<Eigen::MatrixXcd>>& m,
                           const Eigen::VectorXd& schmidt, const Sector& sector) {
  const std::size_t d = sector.dim();
  const int kk = static_cast<int>(schmidt.size());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k < kk; ++k)
    for (int l = 0; l < kk; ++l) {
      const double w = schmidt[k] * schmidt[l];
      if (w == 0.0) continue;
      const Eigen::MatrixXcd& mkl = m[k][l];
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          rho(i, j) += w * mkl(sector.alpha_of(i), sector.alpha_of(j)) *
                       mkl(sector.beta_of(i), sector.beta_of(j));
    }
  SectorDensity out{sector, 0.5 * (rho + rho.adjoint()), 0.0};
  out.captured_trace = out.matrix.trace().real();
  return out;
}

}  // namespace

std::vector<std::vector<Eigen::MatrixXcd>> forged_transition_operators(
    const ForgedTomography& tomo, int n_bitstrings) {
  std::vector<std::vector<Eigen::MatrixXcd>> m(n_bitstrings,
                                               std::vector<Eigen::MatrixXcd>(n_bitstrings));
  for (int k = 0; k < n_bitstrings; ++k) {
    m[k][k] = reconstruct_density(find_prep(tomo, k, k, 0)).matrix;
    for (int l = k + 1; l < n_bitstrings; ++l) {
      Eigen::MatrixXcd acc;
      cplx ip = 1.0;
      for (int p = 0; p < 4; ++p, ip *= cplx(0, 1)) {
        const Eigen::MatrixXcd rho = reconstruct_density(find_prep(tomo, k, l, p)).matrix;
        acc = p == 0 ? (ip * rho).eval() : (acc + ip * rho).eval();
      }
      m[k][l] = 0.5 * acc;
      m[l][k] = m[k][l].adjoint();
    }
  }
  return m;
}

SectorDensity forged_sector_density(const ForgedTomography& tomo, const Eigen::VectorXd& schmidt,
                                    const Sector& sector) {
  const auto m = forged_transition_operators(tomo, static_cast<int>(schmidt.size()));
  if (m[0][0].rows() != (Eigen::Index{1} << sector.n_orbitals()))
    throw ValidationError("tomography register width differs from the sector orbital count");
  return sector_block(m, schmidt, sector);
}

std::vector<SectorDensity> forged_all_sector_densities(const ForgedTomography& tomo,
                                                       const Eigen::VectorXd& schmidt,
                                                       int n_orbitals) {
  const auto m = forged_transition_operators(tomo, static_cast<int>(schmidt.size()));
  std::vector<SectorDensity> out;
  for (int na = 0; na <= n_orbitals; ++na)
    for (int nb = 0; nb <= n_orbitals; ++nb)
      out.push_back(sector_block(m, schmidt, Sector(n_orbitals, na, nb)));
  return out;
}

void renormalize(SectorDensity& rho) {
  const double tr = rho.matrix.trace().real();
  rho.captured_trace = tr;
  if (!(tr >= kMinCapturedTrace))
    throw NumericalError("sector projection captured trace " + std::to_string(tr) +
                         "; noise destroyed the sector");
  rho.matrix /= tr;
}

SectorDensity restrict_to_sector(const DensityMatrix& rho, const Sector& sector) {
  const std::size_t d = sector.dim();
  if (rho.matrix.rows() != (Eigen::Index{1} << (2 * sector.n_orbitals())))
    throw ValidationError("density dimension does not match 2N qubits");
  SectorDensity out{sector, Eigen::MatrixXcd(d, d), 0.0};
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      out.matrix(i, j) = rho.matrix(sector.full_index(i), sector.full_index(j));
  renormalize(out);
  return out;
}

DensityMatrix project_sector(const DensityMatrix& rho, const Sector& sector) {
  const SectorDensity block = restrict_to_sector(rho, sector);
  DensityMatrix out{Eigen::MatrixXcd::Zero(rho.matrix.rows(), rho.matrix.cols())};
  for (std::size_t i = 0; i < sector.dim(); ++i)
    for (std::size_t j = 0; j < sector.dim(); ++j)
      out.matrix(sector.full_index(i), sector.full_index(j)) = block.matrix(i, j);
  return out;
}

CIExtraction extract_ci_vector(const SectorDensity& rho, std::size_t reference,
                               double threshold) {
  if (reference >= rho.sector.dim()) throw ValidationError("reference determinant out of range");
  CIExtraction out;
  out.vector.sector = rho.sector;
  const Eigen::VectorXcd column = rho.matrix.col(reference);
  if (column.norm() > threshold) {
    out.vector.amplitudes = column;
    out.vector.normalize(reference);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix);
    if (es.info() != Eigen::Success) throw NumericalError("density eigensolver failed");
    out.vector.amplitudes = es.eigenvectors().col(rho.matrix.rows() - 1);
    out.vector.normalize();
    out.used_fallback = true;
  }
  return out;
}

CIExtraction extract_ci_vector(const SectorDensity& rho) {
  return extract_ci_vector(rho, rho.sector.hartree_fock_index());
}

std::vector<PurifiedSample> purified_energy_samples(const ForgedAnsatz& ansatz,
                                                    const ActiveSpaceHamiltonian& ham, int shots,
                                                    const std::vector<std::uint64_t>& seeds,
                                                    const TomographyOptions& options) {
  const Sector sector(ham.n_orbitals(), ham.n_alpha(), ham.n_beta());
  const Eigen::SparseMatrix<double> h = sector_hamiltonian(ham, sector);
  std::vector<PurifiedSample> out(seeds.size());
  TomographyOptions inner = options;
  inner.jobs = 1;
  parallel_for(seeds.size(), options.jobs, [&](std::size_t s) {
    const ForgedTomography tomo = forged_tomography_sweep(ansatz, shots, seeds[s], inner, false);
    SectorDensity rho = forged_sector_density(tomo, ansatz.schmidt, sector);
    renormalize(rho);
    PurifiedSample& sample = out[s];
    sample.seed = seeds[s];
    sample.raw_energy = (Eigen::MatrixXcd(h.cast<cplx>()) * rho.matrix).trace().real();
    sample.ci = extract_ci_vector(rho);
    sample.purified_energy = expectation(h, sample.ci.vector.amplitudes);
  });
  return out;
}

}  // namespace forgesim
