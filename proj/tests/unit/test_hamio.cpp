#include <doctest.h>

#include <sstream>

#include "forgesim/determinants.hpp"
#include "forgesim/error.hpp"
#include "forgesim/hamiltonian.hpp"
#include "forgesim/oracle.hpp"
#include "test_support.hpp"

using namespace forgesim;

TEST_CASE("fcidump core-only file") {
  std::istringstream in(" &FCI NORB=1,NELEC=2,MS2=0,\n &END\n 0.5 0 0 0 0\n");
  const ActiveSpaceHamiltonian h = parse_fcidump(in);
  CHECK(h.n_orbitals() == 1);
  CHECK(h.n_alpha() == 1);
  CHECK(h.n_beta() == 1);
  CHECK(h.e_core() == 0.5);
  CHECK(h.one(0, 0) == 0.0);
}

TEST_CASE("fcidump expands permutational symmetry") {
  std::istringstream in("&FCI NORB=2 NELEC=2 MS2=0 /\n 4.0 1 1 1 1\n 0.7 2 1 1 1\n 0.3 2 1 2 1\n");
  const ActiveSpaceHamiltonian h = parse_fcidump(in);
  CHECK(h.two(0, 0, 0, 0) == 4.0);
  for (auto [p, q, r, s] : {std::array{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}})
    CHECK(h.two(p, q, r, s) == 0.7);
  for (auto [p, q, r, s] : {std::array{1, 0, 1, 0}, {0, 1, 0, 1}, {1, 0, 0, 1}, {0, 1, 1, 0}})
    CHECK(h.two(p, q, r, s) == 0.3);
  h.validate();
}

TEST_CASE("fcidump round trip on random integrals") {
  const ActiveSpaceHamiltonian a = testsupport::random_hamiltonian(4, 2, 2, 11);
  std::stringstream buf;
  write_fcidump(buf, a);
  const ActiveSpaceHamiltonian b = parse_fcidump(buf);
  CHECK(b.e_core() == a.e_core());
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) {
      CHECK(b.one(p, q) == a.one(p, q));
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) CHECK(b.two(p, q, r, s) == a.two(p, q, r, s));
    }
}

TEST_CASE("fcidump error reporting") {
  SUBCASE("malformed header names the line") {
    std::istringstream in("garbage\n");
    try {
      parse_fcidump(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
    }
  }
  SUBCASE("index out of range") {
    std::istringstream in("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n 1.0 3 1 1 1\n");
    CHECK_THROWS_AS(parse_fcidump(in), ValidationError);
  }
  SUBCASE("non-numeric value") {
    std::istringstream in("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n abc 1 1 1 1\n");
    try {
      parse_fcidump(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("missing NORB") {
    std::istringstream in("&FCI NELEC=2,MS2=0,\n&END\n");
    CHECK_THROWS_AS(parse_fcidump(in), ParseError);
  }
}

TEST_CASE("bundled fixtures parse and validate") {
  for (const char* name : {"ethylene_2e2o.fcidump", "cyclopentadiene_4e4o.fcidump",
                           "ts_6e6o.fcidump", "octatetraene_8e8o.fcidump",
                           "stretched_2e2o.fcidump"}) {
    const ActiveSpaceHamiltonian h = read_fcidump(testsupport::fixture(name));
    CHECK_NOTHROW(h.validate());
    CHECK(h.n_alpha() == h.n_beta());
  }
}

TEST_CASE("sector Hamiltonian matches brute-force second quantization") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const ActiveSpaceHamiltonian h = testsupport::random_hamiltonian(4, 2, 1, seed);
    const Eigen::MatrixXd brute = testsupport::brute_matrix(h);
    CHECK((fock_hamiltonian(h) - brute).cwiseAbs().maxCoeff() < 1e-12);
    const Sector sec(4, 2, 1);
    const Eigen::MatrixXd sh = Eigen::MatrixXd(sector_hamiltonian(h, sec));
    const auto idx = testsupport::sector_indices(4, 2, 1);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j)
        CHECK(std::abs(sh(i, j) - brute(idx[i], idx[j])) < 1e-12);
  }
}

TEST_CASE("spin factorization without two-body terms") {
  ActiveSpaceHamiltonian h(3, 1, 1);
  h.set_one(0, 0, -1.0);
  h.set_one(1, 0, 0.2);
  h.set_one(2, 2, 0.4);
  const SpinFactorizedHamiltonian f = spin_factorize(h);
  for (const SpinTerm& t : f.terms) {
    const bool a_id = t.alpha.size() == 1 && t.alpha.terms().begin()->first.is_identity();
    const bool b_id = t.beta.size() == 1 && t.beta.terms().begin()->first.is_identity();
    CHECK((a_id || b_id));
  }
}

TEST_CASE("non-interacting two-orbital spectrum") {
  ActiveSpaceHamiltonian h(2, 1, 1);
  h.set_one(0, 0, -0.7);
  h.set_one(1, 1, 0.3);
  const Eigen::MatrixXcd m = spin_factorize(h).reassemble();
  const auto idx = testsupport::sector_indices(2, 1, 1);
  Eigen::MatrixXd block(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) block(i, j) = m(idx[i], idx[j]).real();
  Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(block).eigenvalues();
  CHECK(ev[0] == doctest::Approx(-1.4).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK(ev[2] == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK(ev[3] == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("reassembled factorization equals the brute-force matrix") {
  for (int n : {2, 3, 4})
    for (std::uint64_t seed : {5, 6}) {
      const ActiveSpaceHamiltonian h = testsupport::random_hamiltonian(n, n / 2, n / 2, seed);
      const SpinFactorizedHamiltonian f = spin_factorize(h);
      for (const SpinTerm& t : f.terms)
        for (const auto* op : {&t.alpha, &t.beta}) CHECK(op->n_qubits() == n);
      const Eigen::MatrixXcd m = f.reassemble();
      const Eigen::MatrixXd brute = testsupport::brute_matrix(h);
      CHECK((m - brute.cast<cplx>()).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("factorized sector ground energy equals FCI") {
  for (std::uint64_t seed : {7, 8, 9, 10}) {
    const int n = 2 + static_cast<int>(seed % 3);
    const ActiveSpaceHamiltonian h = testsupport::random_hamiltonian(n, 1, n / 2, seed);
    const Eigen::MatrixXcd m = spin_factorize(h).reassemble();
    const auto idx = testsupport::sector_indices(n, 1, n / 2);
    Eigen::MatrixXcd block(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) block(i, j) = m(idx[i], idx[j]);
    const double e = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(block).eigenvalues()[0];
    CHECK(std::abs(e - fci_ground_state(h).energy) < 1e-10);
  }
}

TEST_CASE("frozen-core reduction reproduces the core-filled block") {
  const ActiveSpaceHamiltonian full = testsupport::random_hamiltonian(4, 2, 2, 21);
  const ActiveWindow w{1, 2};
  const ActiveSpaceHamiltonian act = active_space_hamiltonian(full, w);
  CHECK(act.n_orbitals() == 2);
  CHECK(act.n_alpha() == 1);
  const Eigen::MatrixXd brute = testsupport::brute_matrix(full);
  const Sector as(2, 1, 1);
  const Eigen::MatrixXd ah = Eigen::MatrixXd(sector_hamiltonian(act, as));
  // core orbital 0 filled, orbital 3 empty: alpha/beta strings 1ab0
  auto embed = [](Bitstring s) { return std::uint64_t{0b1000} | (std::uint64_t{s} << 1); };
  for (std::size_t i = 0; i < as.dim(); ++i)
    for (std::size_t j = 0; j < as.dim(); ++j) {
      const std::uint64_t fi = (embed(as.alpha_of(i)) << 4) | embed(as.beta_of(i));
      const std::uint64_t fj = (embed(as.alpha_of(j)) << 4) | embed(as.beta_of(j));
      CHECK(std::abs(ah(i, j) - brute(fi, fj)) < 1e-12);
    }
  CHECK_THROWS_AS(active_space_hamiltonian(full, {3, 2}), ValidationError);
}

TEST_CASE("generated window fixture equals the frozen-core reduction") {
  const ActiveSpaceHamiltonian full = read_fcidump(testsupport::fixture("ts_6e6o.fcidump"));
  const ActiveSpaceHamiltonian cas = read_fcidump(testsupport::fixture("ts_6e6o_cas4.fcidump"));
  const ActiveSpaceHamiltonian red = active_space_hamiltonian(full, {1, 4});
  REQUIRE(cas.n_orbitals() == 4);
  CHECK(cas.n_alpha() == red.n_alpha());
  CHECK(std::abs(cas.e_core() - red.e_core()) < 1e-10);
  double gap = 0.0;
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) {
      gap = std::max(gap, std::abs(cas.one(p, q) - red.one(p, q)));
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) gap = std::max(gap, std::abs(cas.two(p, q, r, s) - red.two(p, q, r, s)));
    }
  CHECK(gap < 1e-10);
}
