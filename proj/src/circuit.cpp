#include "forgesim/circuit.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "forgesim/error.hpp"

namespace forgesim {

void Circuit::validate() const {
  if (n_qubits <= 0 || n_qubits > 24) throw ValidationError("circuit needs 1..24 qubits");
  for (const Gate& g : gates) {
    const int k = g.two_qubit() ? 2 : 1;
    for (int i = 0; i < k; ++i)
      if (g.qubits[i] < 0 || g.qubits[i] >= n_qubits)
        throw ValidationError("gate qubit index " + std::to_string(g.qubits[i]) +
                              " out of range for " + std::to_string(n_qubits) + " qubits");
    if (k == 2 && g.qubits[0] == g.qubits[1])
      throw ValidationError("two-qubit gate acts twice on the same qubit");
    if (g.kind == GateKind::Rp && (g.phase_index < 0 || g.phase_index > 3))
      throw ValidationError("R_p index must be 0..3");
  }
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_qubits != n_qubits) throw ValidationError("circuit width mismatch");
  gates.insert(gates.end(), other.gates.begin(), other.gates.end());
  global_phase *= other.global_phase;
  return *this;
}

Statevector::Statevector(int n_qubits)
    : n_qubits_(n_qubits), amps_(Eigen::VectorXcd::Zero(std::size_t{1} << n_qubits)) {
  amps_[0] = 1.0;
}

Statevector::Statevector(int n_qubits, Eigen::VectorXcd amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amps_.size()) != (std::size_t{1} << n_qubits))
    throw ValidationError("amplitude vector length must be 2^n_qubits");
}

Statevector Statevector::basis(int n_qubits, std::uint32_t index) {
  Statevector s(n_qubits);
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

void Statevector::apply_1q(int q, const Eigen::Matrix2cd& u) {
  const std::uint32_t b = qubit_bit(q, n_qubits_);
  const std::uint32_t dim = std::uint32_t{1} << n_qubits_;
  for (std::uint32_t i = 0; i < dim; ++i) {
    if (i & b) continue;
    const cplx a0 = amps_[i], a1 = amps_[i | b];
    amps_[i] = u(0, 0) * a0 + u(0, 1) * a1;
    amps_[i | b] = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

void Statevector::apply_2q(int a, int b, const Eigen::Matrix4cd& u) {
  const std::uint32_t ba = qubit_bit(a, n_qubits_), bb = qubit_bit(b, n_qubits_);
  const std::uint32_t dim = std::uint32_t{1} << n_qubits_;
  for (std::uint32_t i = 0; i < dim; ++i) {
    if (i & (ba | bb)) continue;
    const std::uint32_t idx[4] = {i, i | bb, i | ba, i | ba | bb};  // |ab> = 00,01,10,11
    cplx in[4], out[4];
    for (int k = 0; k < 4; ++k) in[k] = amps_[idx[k]];
    for (int r = 0; r < 4; ++r) {
      out[r] = 0.0;
      for (int k = 0; k < 4; ++k) out[r] += u(r, k) * in[k];
    }
    for (int k = 0; k < 4; ++k) amps_[idx[k]] = out[k];
  }
}

void Statevector::apply(const Gate& g) {
  static const double r2 = 1.0 / std::numbers::sqrt2;
  const cplx I{0.0, 1.0};
  switch (g.kind) {
    case GateKind::Hop:
      apply_2q(g.qubits[0], g.qubits[1], hop_gate(g.angle).cast<cplx>());
      break;
    case GateKind::CNOT: {
      const std::uint32_t c = qubit_bit(g.qubits[0], n_qubits_);
      const std::uint32_t t = qubit_bit(g.qubits[1], n_qubits_);
      const std::uint32_t dim = std::uint32_t{1} << n_qubits_;
      for (std::uint32_t i = 0; i < dim; ++i)
        if ((i & c) && !(i & t)) std::swap(amps_[i], amps_[i | t]);
      break;
    }
    case GateKind::X: apply_1q(g.qubits[0], (Eigen::Matrix2cd() << 0, 1, 1, 0).finished()); break;
    case GateKind::H: apply_1q(g.qubits[0], (Eigen::Matrix2cd() << r2, r2, r2, -r2).finished()); break;
    case GateKind::S: apply_1q(g.qubits[0], (Eigen::Matrix2cd() << 1, 0, 0, I).finished()); break;
    case GateKind::Sdg: apply_1q(g.qubits[0], (Eigen::Matrix2cd() << 1, 0, 0, -I).finished()); break;
    case GateKind::Z: apply_1q(g.qubits[0], (Eigen::Matrix2cd() << 1, 0, 0, -1).finished()); break;
    case GateKind::Rp: apply_1q(g.qubits[0], rp_gate(g.phase_index)); break;
  }
}

Eigen::Matrix4d hop_gate(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix4d m;
  m << 1, 0, 0, 0,
       0, c, s, 0,
       0, s, -c, 0,
       0, 0, 0, -1;
  return m;
}

Eigen::Matrix2cd rp_gate(int p) {
  // R_0 = I, R_1 = ZS, R_2 = Z, R_3 = S: phase (-i)^p on |1>.
  static const cplx phases[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  if (p < 0 || p > 3) throw ValidationError("R_p index must be 0..3");
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = phases[p];
  return m;
}

Circuit initial_state_circuit(int n_qubits, const InitialState& init) {
  Circuit c{n_qubits, {}, {1.0, 0.0}};
  const Bitstring limit = Bitstring{1} << n_qubits;
  if (init.first >= limit || (init.second && *init.second >= limit))
    throw ValidationError("bitstring longer than the register");
  if (!init.second) {
    for (int q = 0; q < n_qubits; ++q)
      if (init.first & qubit_bit(q, n_qubits)) c.gates.push_back(Gate::single(GateKind::X, q));
    return c;
  }
  const Bitstring xk = init.first, xl = *init.second;
  if (xk == xl) throw ValidationError("superposition needs two distinct bitstrings");
  if (init.phase < 0 || init.phase > 3) throw ValidationError("phase index p must be 0..3");

  // Pivot qubit in superposition; its |1> branch carries the string that has
  // a 1 there. Prefer a pivot where x_k = 1 so the gate is the plain R_p.
  const Bitstring diff = xk ^ xl;
  int pivot = -1;
  for (int q = 0; q < n_qubits && pivot < 0; ++q)
    if ((diff & qubit_bit(q, n_qubits)) && (xk & qubit_bit(q, n_qubits))) pivot = q;
  const bool one_is_k = pivot >= 0;
  if (!one_is_k)
    for (int q = 0; q < n_qubits && pivot < 0; ++q)
      if (diff & qubit_bit(q, n_qubits)) pivot = q;
  const Bitstring branch0 = one_is_k ? xl : xk;

  static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  int rp_index;
  if (one_is_k) {
    // (|x_l> + (-i)^p |x_k>)/sqrt2 = (-i)^p (|x_k> + i^p |x_l>)/sqrt2
    rp_index = init.phase;
    c.global_phase = ipow[init.phase];
  } else {
    // (|x_k> + (-i)^q |x_l>)/sqrt2 with (-i)^q = i^p
    rp_index = (4 - init.phase) % 4;
  }
  c.gates.push_back(Gate::single(GateKind::H, pivot));
  if (rp_index != 0) c.gates.push_back(Gate::rp(pivot, rp_index));
  for (int q = 0; q < n_qubits; ++q) {
    if (q == pivot) continue;
    const Bitstring b = qubit_bit(q, n_qubits);
    if (diff & b) c.gates.push_back(Gate::cnot(pivot, q));
  }
  for (int q = 0; q < n_qubits; ++q) {
    if (q == pivot) continue;
    if (branch0 & qubit_bit(q, n_qubits)) c.gates.push_back(Gate::single(GateKind::X, q));
  }
  return c;
}

Statevector prepare_initial_state(int n_qubits, const InitialState& init) {
  return apply_circuit(initial_state_circuit(n_qubits, init), Statevector(n_qubits));
}

Statevector apply_circuit(const Circuit& c, Statevector s) {
  c.validate();
  if (s.n_qubits() != c.n_qubits) throw ValidationError("circuit and state widths differ");
  for (const Gate& g : c.gates) s.apply(g);
  if (c.global_phase != cplx{1.0, 0.0}) s.amplitudes() *= c.global_phase;
  return s;
}

cplx transition(const Statevector& a, const PauliSum& op, const Statevector& b) {
  if (op.n_qubits() != a.n_qubits() || a.n_qubits() != b.n_qubits())
    throw ValidationError("operator and state widths differ");
  const auto& va = a.amplitudes();
  const auto& vb = b.amplitudes();
  const std::uint32_t dim = static_cast<std::uint32_t>(vb.size());
  cplx acc = 0.0;
  for (const auto& [p, c] : op.terms()) {
    cplx t = 0.0;
    for (std::uint32_t i = 0; i < dim; ++i) {
      if (vb[i] == cplx{}) continue;
      t += std::conj(va[i ^ p.x]) * p.phase_on(i) * vb[i];
    }
    acc += c * t;
  }
  return acc;
}

double expectation(const Statevector& s, const PauliSum& op) {
  const cplx v = transition(s, op, s);
  if (std::abs(v.imag()) > 1e-8)
    throw NumericalError("expectation value has imaginary part " + std::to_string(v.imag()));
  return v.real();
}

void HopLayout::validate() const {
  for (auto [a, b] : hops) {
    if (a < 0 || b < 0 || a >= n_qubits || b >= n_qubits)
      throw ValidationError("hop gate qubit out of range");
    if (std::abs(a - b) != 1) throw ValidationError("hop gates must act on adjacent qubits");
  }
}

Circuit HopLayout::circuit(const Eigen::VectorXd& theta) const {
  if (static_cast<std::size_t>(theta.size()) != hops.size())
    throw ValidationError("theta length must equal the hop count");
  Circuit c{n_qubits, {}, {1.0, 0.0}};
  for (std::size_t i = 0; i < hops.size(); ++i)
    c.gates.push_back(Gate::hop(hops[i].first, hops[i].second, theta[i]));
  return c;
}

int default_hop_count(int n_qubits) {
  switch (n_qubits) {
    case 1: return 0;
    case 2: return 1;
    case 4: return 2;
    case 6: return 6;
    case 8: return 12;
    default: return n_qubits - 1;
  }
}

HopLayout brick_wall_layout(int n_qubits, int n_hops) {
  HopLayout layout{n_qubits, {}};
  if (n_qubits < 2) return layout;
  bool odd = n_qubits > 2;
  while (static_cast<int>(layout.hops.size()) < n_hops) {
    for (int a = odd ? 1 : 0; a + 1 < n_qubits; a += 2) {
      if (static_cast<int>(layout.hops.size()) == n_hops) break;
      layout.hops.emplace_back(a, a + 1);
    }
    odd = !odd;
  }
  return layout;
}

HopLayout brick_wall_layout(int n_qubits) {
  return brick_wall_layout(n_qubits, default_hop_count(n_qubits));
}

HopLayout parse_layout(int n_qubits, const std::string& text) {
  HopLayout layout{n_qubits, {}};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw ValidationError("layout entry '" + item + "' is not 'a-b'");
    try {
      layout.hops.emplace_back(std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1)));
    } catch (const std::exception&) {
      throw ValidationError("layout entry '" + item + "' is not 'a-b'");
    }
  }
  layout.validate();
  return layout;
}

ResourceCount count_resources(const ResourceLayout& layout) {
  ResourceCount r;
  const long long u = layout.n_init_unitaries, h = layout.n_hops, n = layout.n_qubits;
  r.two_qubit_gates = u * 1 + h * 3;
  r.single_qubit_gates = u * 4 + h * 4 + n * 2;
  const long long k = layout.n_bitstrings;
  r.n_preparations = k + 4 * (k * (k - 1) / 2);
  long long bases = 1;
  for (int i = 0; i < layout.n_qubits; ++i) bases *= 3;
  r.n_tomography_circuits = r.n_preparations * bases;
  r.n_parameters = layout.n_hops + layout.n_bitstrings;
  return r;
}

}  // namespace forgesim
