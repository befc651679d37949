#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "forgesim/circuit.hpp"
#include "forgesim/forging.hpp"

namespace forgesim {

/// Estimates a_P = Tr[P rho] for every n-qubit Pauli string, with standard
/// errors. Entries are indexed by the base-4 code of the label (I=0, X=1,
/// Y=2, Z=3; qubit 0 most significant).
struct BlochVector {
  int n_qubits = 0;
  std::vector<double> values;
  std::vector<double> errors;
  std::vector<bool> present;
  int shots_per_basis = 0;  // 0: exact
  std::uint64_t seed = 0;

  static BlochVector empty(int n_qubits);
  std::size_t size() const { return values.size(); }
  bool complete() const;
  bool exact() const { return shots_per_basis == 0; }

  double value(const std::string& label) const;
  double error(const std::string& label) const;
  /// Tr[op rho] = sum_P c_P a_P.
  double expectation(const PauliSum& op) const;
  /// Median error over the non-identity strings.
  double median_error() const;
};

std::size_t pauli_code(const std::string& label);
std::string pauli_label(std::size_t code, int n_qubits);
PauliString pauli_from_code(std::size_t code, int n_qubits);

struct TomographyOptions {
  /// Per-shot, per-qubit readout flip probability (robustness testing).
  double bit_flip_probability = 0.0;
  int jobs = 1;
};

/// Measures `state` in all 3^n X/Y/Z product bases. shots = 0 is the exact
/// (infinite-shot) mode. Every basis b feeds the 2^n strings obtained from b
/// by replacing letters with I; estimates pool all compatible shots.
BlochVector sample_tomography(const Statevector& state, int shots, std::uint64_t seed,
                              const TomographyOptions& options = {});
/// Runs `circuit` on |0...0> and measures the result.
BlochVector sample_tomography(const Circuit& circuit, int shots, std::uint64_t seed,
                              const TomographyOptions& options = {});

/// Hermitian, unit-trace (not necessarily PSD) density operator.
struct DensityMatrix {
  Eigen::MatrixXcd matrix;
  int n_qubits() const;
};

/// rho = 2^-n sum_P a_P P. Throws ValidationError if any entry is missing.
DensityMatrix reconstruct_density(const BlochVector& b);

/// Preparation label -> Bloch vector, one per forged preparation (K=2: x0,
/// x1, phi0_01..phi3_01).
struct ForgedTomography {
  std::vector<Preparation> preparations;
  std::vector<BlochVector> bloch;
  long long n_circuits = 0;

  std::map<std::string, const BlochVector*> by_label() const;
};

/// Per-preparation seeds are derived from (seed, preparation index).
ForgedTomography forged_tomography_sweep(const ForgedAnsatz& ansatz, int shots,
                                         std::uint64_t seed, const TomographyOptions& options = {},
                                         bool require_two_bitstrings = true);

/// Seed derivation shared by every stochastic stage (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace forgesim
