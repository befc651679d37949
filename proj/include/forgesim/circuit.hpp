#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "forgesim/determinants.hpp"
#include "forgesim/pauli.hpp"

namespace forgesim {

enum class GateKind { Hop, X, H, S, Sdg, Z, Rp, CNOT };

/// One gate application. Two-qubit gates use qubits[0], qubits[1]
/// (for CNOT: control, target); single-qubit gates use qubits[0].
struct Gate {
  GateKind kind;
  std::array<int, 2> qubits{0, 0};
  double angle = 0.0;  // Hop
  int phase_index = 0; // Rp: R_0=I, R_1=ZS, R_2=Z, R_3=S

  static Gate hop(int a, int b, double theta) { return {GateKind::Hop, {a, b}, theta, 0}; }
  static Gate single(GateKind k, int q) { return {k, {q, q}, 0.0, 0}; }
  static Gate rp(int q, int p) { return {GateKind::Rp, {q, q}, 0.0, p}; }
  static Gate cnot(int control, int target) { return {GateKind::CNOT, {control, target}, 0.0, 0}; }
  bool two_qubit() const { return kind == GateKind::Hop || kind == GateKind::CNOT; }
};

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
  /// Scalar applied after the gates; lets a preparation circuit produce an
  /// exact target state rather than one equal up to phase.
  cplx global_phase{1.0, 0.0};

  /// Throws ValidationError on out-of-range or repeated qubit indices.
  void validate() const;
  Circuit& append(const Circuit& other);
};

class Statevector {
 public:
  explicit Statevector(int n_qubits);  // |0...0>
  Statevector(int n_qubits, Eigen::VectorXcd amplitudes);
  static Statevector basis(int n_qubits, std::uint32_t index);

  int n_qubits() const { return n_qubits_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Eigen::VectorXcd& amplitudes() { return amps_; }
  double norm() const { return amps_.norm(); }

  void apply(const Gate& g);
  void apply_1q(int q, const Eigen::Matrix2cd& u);
  void apply_2q(int a, int b, const Eigen::Matrix4cd& u);

 private:
  int n_qubits_;
  Eigen::VectorXcd amps_;
};

/// Real involutory particle-conserving gate, basis |00>,|01>,|10>,|11>:
/// [[1,0,0,0],[0,c,s,0],[0,s,-c,0],[0,0,0,-1]].
Eigen::Matrix4d hop_gate(double theta);
Eigen::Matrix2cd rp_gate(int p);

/// Initial-state request: a basis state, or (|x_k> + i^p |x_l>)/sqrt2.
struct InitialState {
  Bitstring first = 0;
  std::optional<Bitstring> second;
  int phase = 0;

  static InitialState bitstring(Bitstring x) { return {x, std::nullopt, 0}; }
  static InitialState superposition(Bitstring xk, Bitstring xl, int p) { return {xk, xl, p}; }
};

/// Gates (X, H, R_p, CNOT) preparing `init` from |0...0>, with global phase.
Circuit initial_state_circuit(int n_qubits, const InitialState& init);
Statevector prepare_initial_state(int n_qubits, const InitialState& init);

Statevector apply_circuit(const Circuit& c, Statevector s);

/// <s|op|s>. Throws NumericalError if the imaginary residual exceeds 1e-8.
double expectation(const Statevector& s, const PauliSum& op);
/// <a|op|b>
cplx transition(const Statevector& a, const PauliSum& op, const Statevector& b);

/// Ordered hop-gate placements on adjacent qubit pairs.
struct HopLayout {
  int n_qubits = 0;
  std::vector<std::pair<int, int>> hops;

  void validate() const;
  Circuit circuit(const Eigen::VectorXd& theta) const;
};

/// Default hop count per register width: 2->1, 4->2, 6->6, 8->12, else n-1.
int default_hop_count(int n_qubits);
/// Brick-wall layers alternating odd pairs (1,2),(3,4).. and even pairs
/// (0,1),(2,3)..; the first layer is odd when n > 2. Truncated at `n_hops`.
HopLayout brick_wall_layout(int n_qubits, int n_hops);
HopLayout brick_wall_layout(int n_qubits);
/// Parses "1-2,0-1" into a layout.
HopLayout parse_layout(int n_qubits, const std::string& text);

struct ResourceLayout {
  int n_qubits = 0;
  int n_hops = 0;
  int n_init_unitaries = 1;
  int n_bitstrings = 2;
};

struct ResourceCount {
  long long single_qubit_gates = 0;
  long long two_qubit_gates = 0;
  long long n_preparations = 0;
  long long n_tomography_circuits = 0;
  int n_parameters = 0;
};

/// Per-circuit gate accounting: init unitary 4 single + 1 two-qubit gates,
/// hop gate 4 + 3, measurement 2 + 0 per measured qubit.
ResourceCount count_resources(const ResourceLayout& layout);

}  // namespace forgesim
