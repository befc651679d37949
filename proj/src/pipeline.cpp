#include "forgesim/pipeline.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "forgesim/circuit.hpp"
#include "forgesim/error.hpp"
#include "forgesim/forging.hpp"
#include "forgesim/oracle.hpp"
#include "forgesim/parallel.hpp"
#include "forgesim/pt2.hpp"
#include "forgesim/purify.hpp"
#include "forgesim/subspace.hpp"

namespace forgesim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"system", {"label", "fcidump", "full_fcidump"}},
    {"ansatz",
     {"n_bitstrings", "bitstrings", "layout", "theta", "seed", "restarts", "max_iterations"}},
    {"tomography", {"exact", "shots", "seeds", "bit_flip"}},
    {"qse", {"enabled", "cutoff", "project_first", "purify"}},
    {"pt2", {"enabled", "window_start", "window_size", "degeneracy_threshold"}},
    {"oracle", {"fci"}},
    {"run", {"output", "jobs"}},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size() && std::isfinite(d)) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": not a number: '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used == v.size()) return i;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": not an integer: '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(key + ": not a boolean: '" + v + "'");
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json vec_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json mean_std(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x / static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  const double sd = xs.size() > 1 ? std::sqrt(v / static_cast<double>(xs.size() - 1)) : 0.0;
  return {{"mean", m}, {"std", sd}, {"n", xs.size()}};
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const std::string& item : split(text, ',')) {
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const long long a = to_int("seeds", trim(item.substr(0, dash)));
      const long long b = to_int("seeds", trim(item.substr(dash + 1)));
      if (a < 0 || b < a) throw ConfigError("seeds: bad range '" + item + "'");
      for (long long s = a; s <= b; ++s) out.push_back(static_cast<std::uint64_t>(s));
    } else {
      const long long s = to_int("seeds", item);
      if (s < 0) throw ConfigError("seeds: negative seed");
      out.push_back(static_cast<std::uint64_t>(s));
    }
  }
  if (out.empty()) throw ConfigError("seeds: empty list");
  return out;
}

RunConfig load_config(const fs::path& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  RunConfig c;
  c.label = path.stem().string();
  for (const auto& [section, body] : tree) {
    const auto known = kKnownKeys.find(section);
    if (known == kKnownKeys.end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, node] : body) {
      if (!known->second.count(key))
        throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      const std::string v = trim(node.get_value<std::string>());
      const std::string name = section + "." + key;
      if (name == "system.label") c.label = v;
      else if (name == "system.fcidump") c.fcidump = resolve(base, v);
      else if (name == "system.full_fcidump") c.full_fcidump = resolve(base, v);
      else if (name == "ansatz.n_bitstrings") c.n_bitstrings = static_cast<int>(to_int(name, v));
      else if (name == "ansatz.bitstrings") {
        c.bitstrings.clear();
        for (const std::string& b : split(v, ',')) {
          try {
            c.bitstrings.push_back(parse_bitstring(b));
          } catch (const std::exception& e) {
            throw ConfigError(name + ": " + e.what());
          }
        }
      } else if (name == "ansatz.layout") c.layout = v;
      else if (name == "ansatz.theta") {
        c.initial_theta.clear();
        for (const std::string& t : split(v, ',')) c.initial_theta.push_back(to_double(name, t));
      } else if (name == "ansatz.seed") c.ansatz_seed = static_cast<std::uint64_t>(to_int(name, v));
      else if (name == "ansatz.restarts") c.restarts = static_cast<int>(to_int(name, v));
      else if (name == "ansatz.max_iterations") c.max_iterations = static_cast<int>(to_int(name, v));
      else if (name == "tomography.exact") c.exact = to_bool(name, v);
      else if (name == "tomography.shots") c.shots = static_cast<int>(to_int(name, v));
      else if (name == "tomography.seeds") c.seeds = parse_seed_list(v);
      else if (name == "tomography.bit_flip") c.bit_flip = to_double(name, v);
      else if (name == "qse.enabled") c.qse = to_bool(name, v);
      else if (name == "qse.cutoff") c.qse_cutoff = to_double(name, v);
      else if (name == "qse.project_first") c.project_first = to_bool(name, v);
      else if (name == "qse.purify") c.purify = to_bool(name, v);
      else if (name == "pt2.enabled") c.pt2 = to_bool(name, v);
      else if (name == "pt2.window_start") c.window.start = static_cast<int>(to_int(name, v));
      else if (name == "pt2.window_size") c.window.size = static_cast<int>(to_int(name, v));
      else if (name == "pt2.degeneracy_threshold") c.degeneracy_threshold = to_double(name, v);
      else if (name == "oracle.fci") c.fci = to_bool(name, v);
      else if (name == "run.output") c.output_dir = resolve(base, v);
      else if (name == "run.jobs") c.jobs = static_cast<int>(to_int(name, v));
    }
  }
  return c;
}

void validate_config(const RunConfig& c) {
  if (c.fcidump.empty()) throw ConfigError("[system] fcidump is required");
  auto load = [](const fs::path& p) {
    if (!fs::exists(p)) throw ConfigError("file not found: " + p.string());
    try {
      return read_fcidump(p);
    } catch (const std::exception& e) {
      throw ConfigError(p.string() + ": " + e.what());
    }
  };
  const ActiveSpaceHamiltonian h = load(c.fcidump);
  const int n = h.n_orbitals();
  if (n < 1 || n > 12) throw ConfigError("active space must have 1..12 orbitals");
  if (h.n_alpha() != h.n_beta())
    throw ConfigError("forging needs equal alpha and beta electron counts");
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (c.n_bitstrings < 1) throw ConfigError("n_bitstrings must be >= 1");
  if (!c.bitstrings.empty()) {
    std::set<Bitstring> seen;
    for (Bitstring b : c.bitstrings) {
      if (b >> n) throw ConfigError("bitstring wider than the active space");
      if (std::popcount(b) != h.n_alpha())
        throw ConfigError("bitstring electron count differs from the FCIDUMP");
      if (!seen.insert(b).second) throw ConfigError("duplicate bitstring");
    }
  } else if (!c.fci) {
    throw ConfigError("bitstrings must be given when the FCI oracle is disabled");
  }
  if (c.fci && Sector(n, h.n_alpha(), h.n_beta()).dim() > kFciCapacity)
    throw ConfigError("FCI sector exceeds the oracle capacity");
  HopLayout layout = brick_wall_layout(n);
  if (!c.layout.empty()) {
    try {
      layout = parse_layout(n, c.layout);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("layout: ") + e.what());
    }
  }
  if (!c.initial_theta.empty() && c.initial_theta.size() != layout.hops.size())
    throw ConfigError("theta needs one angle per hop gate (" + std::to_string(layout.hops.size()) +
                      ")");
  if (c.restarts < 0 || c.max_iterations < 1) throw ConfigError("bad optimizer settings");
  if (!c.exact && c.shots < 1) throw ConfigError("shots must be >= 1 (or set exact = true)");
  if (c.seeds.empty()) throw ConfigError("seeds: empty list");
  if (!(c.bit_flip >= 0.0 && c.bit_flip <= 0.5)) throw ConfigError("bit_flip must lie in [0, 0.5]");
  if (c.qse_cutoff && !(*c.qse_cutoff > 0.0)) throw ConfigError("qse cutoff must be positive");
  if (c.pt2) {
    if (!c.full_fcidump) throw ConfigError("[pt2] needs [system] full_fcidump");
    const ActiveSpaceHamiltonian full = load(*c.full_fcidump);
    const ActiveWindow& w = c.window;
    if (w.start < 0 || w.size != n || w.start + w.size > full.n_orbitals())
      throw ConfigError("pt2 window does not match the active FCIDUMP inside the full space");
    if (full.n_alpha() - w.start != h.n_alpha() || full.n_beta() - w.start != h.n_beta())
      throw ConfigError("pt2 window leaves the wrong number of active electrons");
    if (!(c.degeneracy_threshold > 0.0)) throw ConfigError("degeneracy_threshold must be positive");
    if (Sector(full.n_orbitals(), full.n_alpha(), full.n_beta()).dim() > 200000)
      throw ConfigError("full space too large for PT2");
  }
}

json config_to_json(const RunConfig& c) {
  json j;
  j["label"] = c.label;
  j["fcidump"] = c.fcidump.filename().string();
  j["full_fcidump"] = c.full_fcidump ? json(c.full_fcidump->filename().string()) : json();
  j["ansatz"] = {{"n_bitstrings", c.n_bitstrings}, {"layout", c.layout},
                 {"theta", c.initial_theta},       {"seed", c.ansatz_seed},
                 {"restarts", c.restarts},         {"max_iterations", c.max_iterations},
                 {"bitstrings", c.bitstrings}};
  j["tomography"] = {
      {"exact", c.exact}, {"shots", c.shots}, {"seeds", c.seeds}, {"bit_flip", c.bit_flip}};
  j["qse"] = {{"enabled", c.qse},
              {"cutoff", c.qse_cutoff ? json(*c.qse_cutoff) : json()},
              {"project_first", c.project_first},
              {"purify", c.purify}};
  j["pt2"] = {{"enabled", c.pt2},
              {"window_start", c.window.start},
              {"window_size", c.window.size},
              {"degeneracy_threshold", c.degeneracy_threshold}};
  j["oracle"] = {{"fci", c.fci}};
  return j;
}

RunOutcome run_pipeline(const RunConfig& c) {
  RunOutcome out;
  json& r = out.report;
  r["config"] = config_to_json(c);
  r["stages"] = json::array();
  json energies;

  auto stage = [&](const std::string& name, const std::function<void()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const std::exception& e) {
      r["energies"] = energies;
      r["failed_stage"] = name;
      r["error"] = e.what();
      throw StageError(name, e.what(), r);
    }
    out.timings[name] = seconds_since(t0);
    r["stages"].push_back(name);
  };

  ActiveSpaceHamiltonian ham, full;
  stage("load", [&] {
    ham = read_fcidump(c.fcidump);
    if (c.full_fcidump) full = read_fcidump(*c.full_fcidump);
    r["system"] = {{"label", c.label},
                   {"n_orbitals", ham.n_orbitals()},
                   {"n_alpha", ham.n_alpha()},
                   {"n_beta", ham.n_beta()},
                   {"n_qubits_forged", ham.n_orbitals()},
                   {"n_qubits_full", 2 * ham.n_orbitals()}};
  });
  const int n = ham.n_orbitals();
  const Sector sector(n, ham.n_alpha(), ham.n_beta());

  std::optional<FCIResult> fci;
  if (c.fci)
    stage("oracle", [&] {
      fci = fci_ground_state(ham);
      energies["fci"] = fci->energy;
      r["oracle"] = {{"energy", fci->energy}, {"dimension", fci->dimension}};
    });

  ForgedAnsatz ansatz;
  json selection;
  stage("ansatz", [&] {
    std::vector<Bitstring> bs = c.bitstrings;
    if (bs.empty()) {
      const BitstringSelection sel = select_bitstrings(fci->state, c.n_bitstrings);
      bs = sel.bitstrings;
      selection = sel.weights;
    }
    ansatz = make_ansatz(n, bs);
    if (!c.layout.empty()) {
      ansatz.layout = parse_layout(n, c.layout);
      ansatz.theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ansatz.layout.hops.size()));
    }
    for (std::size_t i = 0; i < c.initial_theta.size(); ++i)
      ansatz.theta[static_cast<Eigen::Index>(i)] = c.initial_theta[i];
    std::vector<std::string> labels;
    for (Bitstring b : ansatz.bitstrings) labels.push_back(format_bitstring(b, n));
    json hops = json::array();
    for (const auto& [a, b] : ansatz.layout.hops) hops.push_back({a, b});
    r["ansatz"] = {{"bitstrings", labels}, {"selection_weights", selection}, {"hops", hops}};
  });

  stage("resources", [&] {
    const ResourceCount rc = count_resources(
        {n, static_cast<int>(ansatz.layout.hops.size()), 1, ansatz.n_bitstrings()});
    r["resources"] = {{"n_qubits", n},
                      {"n_bitstrings", ansatz.n_bitstrings()},
                      {"n_hops", ansatz.layout.hops.size()},
                      {"n_parameters", rc.n_parameters},
                      {"two_qubit_gates", rc.two_qubit_gates},
                      {"single_qubit_gates", rc.single_qubit_gates},
                      {"n_preparations", rc.n_preparations},
                      {"tomography_circuits", rc.n_tomography_circuits}};
  });

  stage("vqe", [&] {
    OptimizerConfig oc;
    oc.seed = c.ansatz_seed;
    oc.restarts = c.restarts;
    oc.max_iterations = c.max_iterations;
    const VqeResult v = vqe_minimize(ansatz, spin_factorize(ham), oc);
    ansatz.theta = v.theta;
    ansatz.schmidt = v.schmidt;
    out.vqe_trace = v.trace;
    std::vector<std::string> labels;
    for (Bitstring b : ansatz.bitstrings) labels.push_back(format_bitstring(b, n));
    r["vqe"] = {{"bitstrings", labels},
                {"energy", v.energy},
                {"initial_energy", v.initial_energy},
                {"theta", vec_json(v.theta)},
                {"schmidt", vec_json(v.schmidt)},
                {"evaluations", v.evaluations},
                {"converged", v.converged}};
    energies["ef"] = v.energy;
  });

  TomographyOptions topt;
  topt.bit_flip_probability = c.bit_flip;
  std::vector<CIVector> purified_states;
  if (c.qse)
    stage("qse", [&] {
      QseOptions exact;
      exact.overlap_cutoff = c.qse_cutoff;
      const QseResult q = ef_qse_energy(ansatz, ham, exact);
      r["qse"]["exact"] = {{"energy", q.energy},
                           {"reference_energy", q.reference_energy},
                           {"retained_rank", q.retained_rank},
                           {"basis_size", q.basis_size},
                           {"overlap_cutoff", q.overlap_cutoff}};
      energies["ef_qse"] = q.energy;
    });

  if (!c.exact)
    stage("tomography", [&] {
      const std::size_t ns = c.seeds.size();
      out.qse_samples.resize(ns);
      std::vector<CIVector> states(ns);
      std::vector<int> fallbacks(ns, 0);
      std::vector<double> cutoffs(ns, 0.0);
      parallel_for(ns, c.jobs, [&](std::size_t i) {
        QseSampleRow& row = out.qse_samples[i];
        row.seed = c.seeds[i];
        const PurifiedSample ps = purified_energy_samples(ansatz, ham, c.shots, {row.seed}, topt)[0];
        row.raw_energy = ps.raw_energy;
        row.purified_energy = ps.purified_energy;
        states[i] = ps.ci.vector;
        fallbacks[i] = ps.ci.used_fallback;
        if (!c.qse) return;
        QseOptions o;
        o.shots = c.shots;
        o.seed = row.seed;
        o.overlap_cutoff = c.qse_cutoff;
        o.project_first = c.project_first;
        o.tomography = topt;
        o.source = QseSource::Sampled;
        const QseResult raw = ef_qse_energy(ansatz, ham, o);
        row.qse_raw = raw.energy;
        row.rank_raw = raw.retained_rank;
        cutoffs[i] = raw.overlap_cutoff;
        if (c.purify) {
          o.source = QseSource::Purified;
          const QseResult pur = ef_qse_energy(ansatz, ham, o);
          row.qse_purified = pur.energy;
          row.rank_purified = pur.retained_rank;
        }
      });
      std::vector<double> er, ep, qr, qp;
      for (const QseSampleRow& row : out.qse_samples) {
        er.push_back(row.raw_energy);
        ep.push_back(row.purified_energy);
        qr.push_back(row.qse_raw);
        qp.push_back(row.qse_purified);
      }
      json t = {{"shots_per_basis", c.shots},
                {"seeds", c.seeds},
                {"bit_flip", c.bit_flip},
                {"energy_raw", mean_std(er)},
                {"energy_purified", mean_std(ep)},
                {"ci_fallbacks", std::accumulate(fallbacks.begin(), fallbacks.end(), 0)}};
      r["tomography"] = t;
      energies["ef_sampled_raw"] = mean_std(er);
      energies["ef_sampled_purified"] = mean_std(ep);
      if (c.qse) {
        r["qse"]["raw"] = mean_std(qr);
        r["qse"]["raw"]["overlap_cutoffs"] = cutoffs;
        r["qse"]["raw"]["project_first"] = c.project_first;
        energies["ef_qse_raw"] = mean_std(qr);
        if (c.purify) {
          r["qse"]["purified"] = mean_std(qp);
          energies["ef_qse_purified"] = mean_std(qp);
        }
      }
      if (c.purify) purified_states = std::move(states);
    });

  if (c.pt2)
    stage("pt2", [&] {
      const CIVector ref = forged_state(ansatz, sector);
      const DyallPartition part = build_dyall(full, c.window, ref);
      PT2Options po;
      po.degeneracy_threshold = c.degeneracy_threshold;
      po.jobs = c.jobs;
      PT2Result res;
      std::string route;
      if (!purified_states.empty()) {
        route = "sampled";
        res = pt2_with_sampling(part, purified_states, po);
      } else {
        route = "exact";
        const double e0 = expectation(sector_hamiltonian(part.active, sector), ref.amplitudes);
        res = pt2_correction(part, ref, e0, po);
      }
      double integral_gap = 0.0;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          integral_gap = std::max(integral_gap, std::abs(part.active.one(p, q) - ham.one(p, q)));
      r["pt2"] = {{"route", route},
                  {"delta_e", res.delta_e},
                  {"std_error", res.std_error},
                  {"n_terms", res.n_terms},
                  {"n_failed", res.n_failed},
                  {"warnings", res.warnings},
                  {"window_start", c.window.start},
                  {"window_size", c.window.size},
                  {"n_orbitals_full", full.n_orbitals()},
                  {"active_h1_mismatch", integral_gap},
                  {"active_e_core_mismatch", part.active.e_core() - ham.e_core()}};
      if (!res.samples.empty()) r["pt2"]["samples"] = res.samples;
      energies["pt2"] = res.delta_e;
      double base = energies["ef"].get<double>();
      if (energies.contains("ef_qse_purified"))
        base = energies["ef_qse_purified"]["mean"].get<double>();
      else if (energies.contains("ef_qse"))
        base = energies["ef_qse"].get<double>();
      energies["ef_qse_pt2"] = base + res.delta_e;
    });

  r["energies"] = energies;
  return out;
}

json barrier_report(const std::vector<json>& reactants, const json& ts) {
  auto value = [](const json& e) -> std::optional<double> {
    if (e.is_number()) return e.get<double>();
    if (e.is_object() && e.contains("mean")) return e["mean"].get<double>();
    return std::nullopt;
  };
  json out;
  for (const auto& [key, tsv] : ts.at("energies").items()) {
    auto t = value(tsv);
    if (!t || key == "pt2") continue;
    double sum = 0.0;
    bool all = true;
    for (const json& rep : reactants) {
      const json& e = rep.at("energies");
      auto v = e.contains(key) ? value(e[key]) : std::nullopt;
      if (!v) {
        all = false;
        break;
      }
      sum += *v;
    }
    if (!all) continue;
    out[key] = {{"hartree", *t - sum}, {"kcal_per_mol", (*t - sum) * kHartreeToKcalPerMol}};
  }
  return out;
}

void write_outputs(const RunOutcome& o, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream(dir / "report.json") << o.report.dump(2) << "\n";
  std::ofstream(dir / "timings.json") << o.timings.dump(2) << "\n";
  {
    std::ofstream f(dir / "vqe_trace.csv");
    f << "iteration,energy\n";
    for (std::size_t i = 0; i < o.vqe_trace.size(); ++i) f << i << "," << fmt(o.vqe_trace[i]) << "\n";
  }
  if (!o.qse_samples.empty()) {
    std::ofstream f(dir / "qse_samples.csv");
    f << "seed,raw_energy,purified_energy,qse_raw,qse_purified,rank_raw,rank_purified\n";
    for (const QseSampleRow& s : o.qse_samples)
      f << s.seed << "," << fmt(s.raw_energy) << "," << fmt(s.purified_energy) << ","
        << fmt(s.qse_raw) << "," << fmt(s.qse_purified) << "," << s.rank_raw << ","
        << s.rank_purified << "\n";
  }
}

}  // namespace forgesim
