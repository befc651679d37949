#include <doctest.h>

#include <numeric>
#include <random>

#include "forgesim/error.hpp"
#include "forgesim/oracle.hpp"
#include "forgesim/purify.hpp"
#include "test_support.hpp"

using namespace forgesim;

namespace {

double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

ForgedAnsatz optimized_like(int n, std::vector<Bitstring> bs, std::uint64_t seed) {
  ForgedAnsatz a = make_ansatz(n, std::move(bs));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (auto& t : a.theta) t = u(rng);
  a.schmidt << 0.95, -0.3;
  a.normalize();
  return a;
}

}  // namespace

TEST_CASE("project_sector on a pure in-sector state is the identity") {
  const Sector sec(2, 1, 1);
  CIVector psi{sec, Eigen::VectorXcd::Zero(4)};
  psi.amplitudes << 0.8, cplx(0, 0.2), -0.3, 0.1;
  psi.normalize();
  const Eigen::VectorXcd full = psi.to_fock();
  const DensityMatrix rho{full * full.adjoint()};
  CHECK((project_sector(rho, sec).matrix - rho.matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("project_sector keeps the in-sector part of a mixture") {
  const Sector sec(2, 1, 1);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(16, 16);
  // two in-sector determinants and two with the wrong electron count
  for (std::uint64_t idx : {sec.full_index(0), sec.full_index(3), std::uint64_t{0}, std::uint64_t{15}})
    m(idx, idx) = 0.25;
  const DensityMatrix p = project_sector({m}, sec);
  CHECK(std::abs(p.matrix.trace() - 1.0) < 1e-15);
  CHECK(std::abs(p.matrix(sec.full_index(0), sec.full_index(0)) - 0.5) < 1e-15);
  CHECK(std::abs(p.matrix(sec.full_index(3), sec.full_index(3)) - 0.5) < 1e-15);
  CHECK(p.matrix(0, 0) == cplx{});

  Eigen::MatrixXcd outside = Eigen::MatrixXcd::Zero(16, 16);
  outside(0, 0) = 1.0;
  CHECK_THROWS_AS(project_sector({outside}, sec), NumericalError);
}

TEST_CASE("synthetic leakage is removed exactly") {
  const ActiveSpaceHamiltonian h = testsupport::random_hamiltonian(3, 1, 1, 3);
  const CIVector psi = fci_ground_state(h).state;
  const Eigen::VectorXcd full = psi.to_fock();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Eigen::VectorXcd junk = Eigen::VectorXcd::Zero(full.size());
  for (Eigen::Index i = 0; i < junk.size(); ++i)
    if (!psi.sector.find_full(i)) junk[i] = cplx(g(rng), g(rng));
  junk.normalize();
  const Eigen::MatrixXcd rho = 0.95 * full * full.adjoint() + 0.05 * junk * junk.adjoint();
  const SectorDensity block = restrict_to_sector({rho}, psi.sector);
  CHECK(std::abs(block.captured_trace - 0.95) < 1e-12);
  const CIExtraction ci = extract_ci_vector(block);
  CHECK(ci.vector.amplitudes.size() == static_cast<Eigen::Index>(psi.sector.dim()));
  CHECK(fidelity(ci.vector.amplitudes, psi.amplitudes) > 1.0 - 1e-12);
}

TEST_CASE("CI extraction from pure and perturbed densities") {
  const Sector sec(3, 1, 1);
  CIVector psi{sec, Eigen::VectorXcd::Zero(sec.dim())};
  const std::size_t hf = sec.hartree_fock_index();
  psi.amplitudes[hf] = cplx(0.0, 1.0) / std::sqrt(2.0);
  psi.amplitudes[(hf + 4) % sec.dim()] = -1.0 / std::sqrt(2.0);
  SectorDensity rho{sec, psi.amplitudes * psi.amplitudes.adjoint(), 1.0};

  const CIExtraction a = extract_ci_vector(rho);
  CHECK(!a.used_fallback);
  CHECK(fidelity(a.vector.amplitudes, psi.amplitudes) > 1.0 - 1e-12);
  CHECK(a.vector.amplitudes[hf].imag() == 0.0);
  CHECK(a.vector.amplitudes[hf].real() > 0.0);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd noise(sec.dim(), sec.dim());
  for (auto& x : noise.reshaped()) x = cplx(g(rng), g(rng));
  noise = (noise + noise.adjoint()).eval();
  const double spectral =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(noise).eigenvalues().cwiseAbs().maxCoeff();
  SectorDensity noisy{sec, rho.matrix + 1e-3 * noise / spectral, 1.0};
  CHECK(fidelity(extract_ci_vector(noisy).vector.amplitudes, psi.amplitudes) >= 0.999);

  // reference column vanishes: dominant eigenvector fallback
  const std::size_t other = (hf + 1) % sec.dim();
  const CIExtraction b = extract_ci_vector(rho, other);
  CHECK(b.used_fallback);
  CHECK(fidelity(b.vector.amplitudes, psi.amplitudes) > 1.0 - 1e-12);
}

TEST_CASE("exact-mode purification reproduces the statevector energy") {
  const ActiveSpaceHamiltonian h =
      read_fcidump(testsupport::fixture("cyclopentadiene_4e4o.fcidump"));
  const ForgedAnsatz a = optimized_like(4, {0b1100, 0b1010}, 1);
  const Sector sec(4, 2, 2);
  const double e = expectation(sector_hamiltonian(h, sec), forged_state(a, sec).amplitudes);
  const auto samples = purified_energy_samples(a, h, 0, {1, 2});
  for (const PurifiedSample& s : samples) {
    CHECK(std::abs(s.raw_energy - e) < 1e-10);
    CHECK(std::abs(s.purified_energy - e) < 1e-10);
    CHECK(!s.ci.used_fallback);
  }
}

TEST_CASE("forged sector density equals the exact projector") {
  const ForgedAnsatz a = optimized_like(4, {0b1100, 0b1010}, 2);
  const Sector sec(4, 2, 2);
  const CIVector psi = forged_state(a, sec);
  const SectorDensity rho = forged_sector_density(forged_tomography_sweep(a, 0, 0), a.schmidt, sec);
  CHECK((rho.matrix - psi.amplitudes * psi.amplitudes.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  // the full register density has no weight outside the sector
  double total = 0.0;
  for (const SectorDensity& b :
       forged_all_sector_densities(forged_tomography_sweep(a, 0, 0), a.schmidt, 4))
    total += b.captured_trace;
  CHECK(std::abs(total - 1.0) < 1e-10);
}

TEST_CASE("purified energies fluctuate less than raw ones near the optimum") {
  const ActiveSpaceHamiltonian h =
      read_fcidump(testsupport::fixture("cyclopentadiene_4e4o.fcidump"));
  ForgedAnsatz a = make_ansatz(4, select_bitstrings(fci_ground_state(h).state, 2).bitstrings);
  const VqeResult r = vqe_minimize(a, spin_factorize(h), {});
  a.theta = r.theta;
  a.schmidt = r.schmidt;
  std::vector<std::uint64_t> seeds(12);
  std::iota(seeds.begin(), seeds.end(), 100);
  const auto samples = purified_energy_samples(a, h, 1024, seeds);
  double mr = 0, mp = 0;
  for (const auto& s : samples) {
    mr += s.raw_energy / samples.size();
    mp += s.purified_energy / samples.size();
  }
  double vr = 0, vp = 0;
  for (const auto& s : samples) {
    vr += (s.raw_energy - mr) * (s.raw_energy - mr);
    vp += (s.purified_energy - mp) * (s.purified_energy - mp);
  }
  CHECK(vp < vr);
}

TEST_CASE("depolarized density drifts raw energy but not the purified one") {
  const ActiveSpaceHamiltonian h =
      read_fcidump(testsupport::fixture("cyclopentadiene_4e4o.fcidump"));
  const Sector sec(4, 2, 2);
  const CIVector psi = fci_ground_state(h).state;
  const Eigen::SparseMatrix<double> hs = sector_hamiltonian(h, sec);
  const Eigen::MatrixXcd pure = psi.amplitudes * psi.amplitudes.adjoint();
  const double e0 = expectation(hs, psi.amplitudes);
  const double avg = Eigen::MatrixXd(hs).trace() / sec.dim();
  const double p = 0.2;
  SectorDensity rho{sec,
                    (1 - p) * pure +
                        p * Eigen::MatrixXcd::Identity(sec.dim(), sec.dim()) / double(sec.dim()),
                    1.0};
  const double raw = (Eigen::MatrixXcd(hs.cast<cplx>()) * rho.matrix).trace().real();
  CHECK(std::abs(raw - ((1 - p) * e0 + p * avg)) < 1e-12);
  const CIExtraction ci = extract_ci_vector(rho);
  CHECK(std::abs(expectation(hs, ci.vector.amplitudes) - e0) < std::abs(raw - e0) * 0.1);
}
