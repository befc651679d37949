#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "forgesim/circuit.hpp"
#include "forgesim/determinants.hpp"
#include "forgesim/hamiltonian.hpp"

namespace forgesim {

/// Schmidt-decomposed ansatz sum_k lambda_k U(theta)|x_k> (x) U(theta)|x_k>,
/// with the same U and bitstrings on both spin registers.
struct ForgedAnsatz {
  HopLayout layout;
  std::vector<Bitstring> bitstrings;
  Eigen::VectorXd schmidt;  // lambda_k, kept normalized
  Eigen::VectorXd theta;    // one angle per hop gate

  int n_qubits() const { return layout.n_qubits; }
  int n_bitstrings() const { return static_cast<int>(bitstrings.size()); }
  void validate() const;
  /// lambda <- lambda / |lambda|
  void normalize();
};

/// Ansatz over `bitstrings` with the default brick-wall layout, theta = 0 and
/// all Schmidt weight on the first bitstring.
ForgedAnsatz make_ansatz(int n_qubits, std::vector<Bitstring> bitstrings);

/// Appends `bitstring` with zero Schmidt weight, keeping theta and the
/// existing coefficients: the extended ansatz starts at the same energy.
ForgedAnsatz extend_ansatz(const ForgedAnsatz& ansatz, Bitstring bitstring);

/// One state preparation used to measure forged matrix elements: either
/// U|x_k> or U|phi^p_kl> with |phi^p_kl> = (|x_k> + i^p |x_l>)/sqrt2.
struct Preparation {
  int k = 0;
  int l = 0;   // == k for a basis-state preparation
  int phase = 0;

  bool diagonal() const { return k == l; }
  /// "x0", "x1", "phi0_01", ...
  std::string label() const;
};

/// K diagonal preparations followed by the four superpositions of each pair
/// k < l, in (k, l, p) order. K = 2 gives 6 preparations.
std::vector<Preparation> forged_preparations(int n_bitstrings);
/// Initial-state circuit followed by the ansatz hop gates.
Circuit preparation_circuit(const ForgedAnsatz& ansatz, const Preparation& prep);

/// Expectation of a qubit operator in the state of preparation `prep_index`.
using PrepExpectation = std::function<double(std::size_t prep_index, const PauliSum& op)>;

/// Per-term K x K matrices A_kl,mu and B_kl,mu.
struct ForgedElements {
  int n_bitstrings = 0;
  std::vector<Eigen::MatrixXcd> alpha;
  std::vector<Eigen::MatrixXcd> beta;
};

struct ForgedEnergy {
  double value = 0.0;
  ForgedElements elements;
};

/// Builds A and B from expectation values: diagonal entries directly,
/// off-diagonal ones as sum_p (-i)^p/2 <phi^p_kl|O|phi^p_kl>.
ForgedElements forged_matrix_elements(int n_bitstrings, const SpinFactorizedHamiltonian& ham,
                                      const PrepExpectation& measure);
/// Exact statevector route.
ForgedElements forged_matrix_elements(const ForgedAnsatz& ansatz,
                                      const SpinFactorizedHamiltonian& ham);

double assemble_forged_energy(const ForgedElements& elements, const Eigen::VectorXd& schmidt,
                              const SpinFactorizedHamiltonian& ham);
ForgedEnergy forged_energy(const ForgedAnsatz& ansatz, const SpinFactorizedHamiltonian& ham);

/// The forged state as a CI vector of the (n_alpha, n_beta) sector. Throws if
/// the state has weight outside the sector.
CIVector forged_state(const ForgedAnsatz& ansatz, const Sector& sector);
/// Full 4^N statevector of the forged state (small N).
Eigen::VectorXcd forged_statevector(const ForgedAnsatz& ansatz);

struct OptimizerConfig {
  int max_iterations = 20000;  // energy evaluations per local search
  double tolerance = 1e-8;     // absolute energy spread across the simplex
  /// Extra simplex runs started from the incumbent plus uniform noise of
  /// half-width restart_spread; all of them run.
  int restarts = 8;
  double restart_spread = 1.0;
  std::uint64_t seed = 7;
  double initial_step = 0.4;
};

struct VqeResult {
  Eigen::VectorXd theta;
  Eigen::VectorXd schmidt;
  double energy = 0.0;
  double initial_energy = 0.0;
  int evaluations = 0;
  bool converged = false;
  /// Best energy after each simplex iteration.
  std::vector<double> trace;
};

/// Nelder-Mead minimization of the forged energy over (theta, lambda), with
/// seeded restarts around the incumbent. Returns the best point seen, so the
/// energy never exceeds the starting energy.
VqeResult vqe_minimize(const ForgedAnsatz& ansatz, const SpinFactorizedHamiltonian& ham,
                       const OptimizerConfig& config);

/// Plain Nelder-Mead; exposed for reuse and testing.
struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& x0, double step, double tolerance,
                          int max_evaluations, std::vector<double>* trace = nullptr);

struct BitstringSelection {
  std::vector<Bitstring> bitstrings;
  std::vector<double> weights;  // squared Schmidt values, non-increasing
};

/// Schmidt-decomposes the CI coefficient matrix C[alpha][beta] and returns the
/// dominant bitstring of each of the K leading alpha Schmidt vectors.
BitstringSelection select_bitstrings(const CIVector& fci, int n_bitstrings,
                                     double zero_tol = 1e-12);

}  // namespace forgesim
