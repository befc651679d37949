#include "forgesim/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "forgesim/error.hpp"
#include "forgesim/parallel.hpp"

namespace forgesim {

namespace {

std::size_t pow_int(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// In-place Walsh-Hadamard transform: out[S] = sum_o in[o] (-1)^{|o & S|}.
void walsh_hadamard(std::vector<double>& v) {
  for (std::size_t h = 1; h < v.size(); h <<= 1)
    for (std::size_t i = 0; i < v.size(); i += h << 1)
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j], b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
}

// Letters (1..3) of measurement basis `basis` (base-3 digits, qubit 0 first).
std::vector<int> basis_letters(std::size_t basis, int n) {
  std::vector<int> letters(n);
  for (int q = n - 1; q >= 0; --q) {
    letters[q] = static_cast<int>(basis % 3) + 1;
    basis /= 3;
  }
  return letters;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::size_t pauli_code(const std::string& label) {
  std::size_t code = 0;
  for (char c : label) {
    int d;
    switch (c) {
      case 'I': d = 0; break;
      case 'X': d = 1; break;
      case 'Y': d = 2; break;
      case 'Z': d = 3; break;
      default: throw ValidationError("invalid Pauli letter in '" + label + "'");
    }
    code = code * 4 + d;
  }
  return code;
}

std::string pauli_label(std::size_t code, int n_qubits) {
  static const char letters[] = {'I', 'X', 'Y', 'Z'};
  std::string s(n_qubits, 'I');
  for (int q = n_qubits - 1; q >= 0; --q) {
    s[q] = letters[code % 4];
    code /= 4;
  }
  return s;
}

PauliString pauli_from_code(std::size_t code, int n_qubits) {
  PauliString p;
  for (int q = n_qubits - 1; q >= 0; --q) {
    const int d = static_cast<int>(code % 4);
    code /= 4;
    const std::uint32_t b = qubit_bit(q, n_qubits);
    if (d == 1 || d == 2) p.x |= b;
    if (d == 2 || d == 3) p.z |= b;
  }
  return p;
}

BlochVector BlochVector::empty(int n_qubits) {
  BlochVector b;
  b.n_qubits = n_qubits;
  const std::size_t n = pow_int(4, n_qubits);
  b.values.assign(n, 0.0);
  b.errors.assign(n, 0.0);
  b.present.assign(n, false);
  return b;
}

bool BlochVector::complete() const {
  return std::all_of(present.begin(), present.end(), [](bool p) { return p; });
}

double BlochVector::value(const std::string& label) const { return values.at(pauli_code(label)); }
double BlochVector::error(const std::string& label) const { return errors.at(pauli_code(label)); }

double BlochVector::expectation(const PauliSum& op) const {
  if (op.n_qubits() != n_qubits) throw ValidationError("operator width differs from Bloch vector");
  cplx acc = 0.0;
  for (const auto& [p, c] : op.terms()) {
    const std::size_t code = pauli_code(p.label(n_qubits));
    if (!present[code]) throw ValidationError("Bloch vector lacks " + p.label(n_qubits));
    acc += c * values[code];
  }
  return acc.real();
}

double BlochVector::median_error() const {
  std::vector<double> e(errors.begin() + 1, errors.end());
  if (e.empty()) return 0.0;
  std::nth_element(e.begin(), e.begin() + e.size() / 2, e.end());
  return e[e.size() / 2];
}

BlochVector sample_tomography(const Statevector& state, int shots, std::uint64_t seed,
                              const TomographyOptions& options) {
  if (shots < 0) throw ValidationError("shots must be >= 0 (0 selects exact mode)");
  const double flip = options.bit_flip_probability;
  if (flip < 0.0 || flip > 1.0) throw ValidationError("bit-flip probability must lie in [0, 1]");
  const int n = state.n_qubits();
  if (n > 10) throw CapacityError("tomography limited to 10 qubits");
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t n_bases = pow_int(3, n);

  // sums[b][S]: signed outcome total of the substring S of basis b.
  std::vector<std::vector<double>> sums(n_bases);
  parallel_for(n_bases, options.jobs, [&](std::size_t basis) {
    const std::vector<int> letters = basis_letters(basis, n);
    Statevector rotated = state;
    for (int q = 0; q < n; ++q) {
      if (letters[q] == 2) rotated.apply(Gate::single(GateKind::Sdg, q));
      if (letters[q] != 3) rotated.apply(Gate::single(GateKind::H, q));
    }
    std::vector<double> prob(dim);
    for (std::size_t i = 0; i < dim; ++i) prob[i] = std::norm(rotated.amplitudes()[i]);
    if (flip > 0.0)
      for (int q = 0; q < n; ++q) {
        const std::uint32_t b = qubit_bit(q, n);
        for (std::size_t i = 0; i < dim; ++i)
          if (!(i & b)) {
            const double p0 = prob[i], p1 = prob[i | b];
            prob[i] = (1 - flip) * p0 + flip * p1;
            prob[i | b] = flip * p0 + (1 - flip) * p1;
          }
      }
    std::vector<double> hist(dim, 0.0);
    if (shots == 0) {
      hist = prob;
    } else {
      // multinomial draw as a chain of conditional binomials
      std::mt19937_64 rng(derive_seed(seed, basis));
      int remaining = shots;
      double mass = 1.0;
      for (std::size_t i = 0; i < dim && remaining > 0; ++i) {
        const double p = mass > 0.0 ? std::clamp(prob[i] / mass, 0.0, 1.0) : 0.0;
        const int k = (i + 1 == dim) ? remaining
                                     : std::binomial_distribution<int>(remaining, p)(rng);
        hist[i] = k;
        remaining -= k;
        mass -= prob[i];
      }
    }
    walsh_hadamard(hist);
    sums[basis] = std::move(hist);
  });

  BlochVector out = BlochVector::empty(n);
  out.shots_per_basis = shots;
  out.seed = seed;
  std::vector<double> total(out.size(), 0.0);
  std::vector<double> count(out.size(), 0.0);
  for (std::size_t basis = 0; basis < n_bases; ++basis) {
    const std::vector<int> letters = basis_letters(basis, n);
    for (std::size_t subset = 0; subset < dim; ++subset) {
      std::size_t code = 0;
      for (int q = 0; q < n; ++q)
        code = code * 4 + ((subset & qubit_bit(q, n)) ? letters[q] : 0);
      if (shots == 0) {
        if (!out.present[code]) {
          out.values[code] = sums[basis][subset];
          out.present[code] = true;
        }
      } else {
        total[code] += sums[basis][subset];
        count[code] += shots;
      }
    }
  }
  if (shots > 0)
    for (std::size_t c = 0; c < out.size(); ++c) {
      const double m = total[c] / count[c];
      const double mc = std::clamp(m, -1.0, 1.0);
      const double var = count[c] > 1 ? (1.0 - mc * mc) * count[c] / (count[c] - 1.0) : 0.0;
      out.values[c] = m;
      out.errors[c] = std::sqrt(var / count[c]);
      out.present[c] = true;
    }
  out.values[0] = 1.0;
  out.errors[0] = 0.0;
  return out;
}

BlochVector sample_tomography(const Circuit& circuit, int shots, std::uint64_t seed,
                              const TomographyOptions& options) {
  return sample_tomography(apply_circuit(circuit, Statevector(circuit.n_qubits)), shots, seed,
                           options);
}

int DensityMatrix::n_qubits() const {
  int n = 0;
  while ((Eigen::Index{1} << n) < matrix.rows()) ++n;
  return n;
}

DensityMatrix reconstruct_density(const BlochVector& b) {
  if (!b.complete()) throw ValidationError("Bloch vector is incomplete; cannot reconstruct");
  const int n = b.n_qubits;
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t code = 0; code < b.size(); ++code) {
    const double a = b.values[code];
    if (a == 0.0) continue;
    const PauliString p = pauli_from_code(code, n);
    for (std::uint32_t i = 0; i < dim; ++i) rho(i ^ p.x, i) += a * p.phase_on(i);
  }
  rho /= static_cast<double>(dim);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return {rho};
}

std::map<std::string, const BlochVector*> ForgedTomography::by_label() const {
  std::map<std::string, const BlochVector*> out;
  for (std::size_t i = 0; i < preparations.size(); ++i) out[preparations[i].label()] = &bloch[i];
  return out;
}

ForgedTomography forged_tomography_sweep(const ForgedAnsatz& ansatz, int shots,
                                         std::uint64_t seed, const TomographyOptions& options,
                                         bool require_two_bitstrings) {
  ansatz.validate();
  if (require_two_bitstrings && ansatz.n_bitstrings() != 2)
    throw ValidationError("forged tomography sweep expects exactly two bitstrings");
  ForgedTomography out;
  out.preparations = forged_preparations(ansatz.n_bitstrings());
  for (std::size_t i = 0; i < out.preparations.size(); ++i)
    out.bloch.push_back(sample_tomography(preparation_circuit(ansatz, out.preparations[i]), shots,
                                          derive_seed(seed, i), options));
  out.n_circuits = static_cast<long long>(out.preparations.size()) * pow_int(3, ansatz.n_qubits());
  return out;
}

}  // namespace forgesim
