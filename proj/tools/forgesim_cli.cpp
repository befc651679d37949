// forgesim command-line driver.
#include <CLI11.hpp>

#include <cstdio>
#include <sstream>
#include <fstream>
#include <iostream>

#include "forgesim/analysis.hpp"
#include "forgesim/circuit.hpp"
#include "forgesim/error.hpp"
#include "forgesim/forging.hpp"
#include "forgesim/oracle.hpp"
#include "forgesim/pipeline.hpp"

namespace fs = std::filesystem;
using namespace forgesim;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string config;
  std::string fcidump;
  std::string full_fcidump;
  std::optional<int> shots;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  bool exact = false;
  std::optional<double> qse_cutoff;
  std::optional<int> jobs;
  std::string output;
  std::optional<int> bitstrings;
  std::string window;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("config", o.config, "INI run configuration");
  app->add_option("--fcidump", o.fcidump, "active-space FCIDUMP (overrides the config)");
  app->add_option("--shots", o.shots, "shots per measurement basis");
  app->add_option("--seed", o.seed, "single tomography seed");
  app->add_option("--seeds", o.seeds, "tomography seeds, e.g. 0-19 or 1,4,9");
  app->add_flag("--exact", o.exact, "exact expectation values, no sampling");
  app->add_option("--qse-cutoff", o.qse_cutoff, "overlap eigenvalue cutoff");
  app->add_option("--jobs", o.jobs, "worker threads");
  app->add_option("--output", o.output, "output directory");
  app->add_option("--bitstrings", o.bitstrings, "number of forged bitstrings K");
}

RunConfig build_config(const Overrides& o) {
  RunConfig c;
  if (!o.config.empty()) {
    if (!fs::exists(o.config)) throw ConfigError("config not found: " + o.config);
    c = load_config(o.config);
  } else {
    c.output_dir.clear();
  }
  if (!o.fcidump.empty()) {
    c.fcidump = o.fcidump;
    if (o.config.empty()) c.label = fs::path(o.fcidump).stem().string();
  }
  if (!o.full_fcidump.empty()) c.full_fcidump = o.full_fcidump;
  if (o.shots) c.shots = *o.shots;
  if (o.seed) c.seeds = {*o.seed};
  if (!o.seeds.empty()) c.seeds = parse_seed_list(o.seeds);
  if (o.exact) c.exact = true;
  if (o.qse_cutoff) c.qse_cutoff = *o.qse_cutoff;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.bitstrings) {
    c.n_bitstrings = *o.bitstrings;
    c.bitstrings.clear();
  }
  if (!o.window.empty()) {
    const auto comma = o.window.find(',');
    if (comma == std::string::npos) throw ConfigError("--window expects start,size");
    try {
      c.window.start = std::stoi(o.window.substr(0, comma));
      c.window.size = std::stoi(o.window.substr(comma + 1));
    } catch (const std::exception&) {
      throw ConfigError("--window expects start,size");
    }
  }
  if (!o.output.empty()) c.output_dir = o.output;
  return c;
}

void emit(const RunOutcome& out, const RunConfig& c) {
  std::cout << out.report.dump(2) << "\n";
  if (!c.output_dir.empty()) write_outputs(out, c.output_dir);
}

int run_and_emit(RunConfig c) {
  validate_config(c);
  try {
    emit(run_pipeline(c), c);
  } catch (const StageError& e) {
    if (!c.output_dir.empty()) {
      fs::create_directories(c.output_dir);
      std::ofstream(c.output_dir / "report.json") << e.partial().dump(2) << "\n";
    }
    throw;
  }
  return 0;
}

std::vector<int> parse_grid(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("--shot-grid: bad value '" + item + "'");
    }
  if (out.empty()) throw ConfigError("--shot-grid is empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forgesim: entanglement-forged VQE, tomography, purification, QSE and PT2"};
  app.require_subcommand(1);

  Overrides run_o, vqe_o, qse_o, pt2_o, sweep_o, oracle_o;
  std::vector<std::string> reactants;
  std::string ts;

  CLI::App* run = app.add_subcommand("run", "full pipeline from a config file");
  add_common(run, run_o);
  run->add_option("--reactant", reactants, "reactant config (barrier mode, repeatable)");
  run->add_option("--ts", ts, "transition-state config (barrier mode)");

  CLI::App* vqe = app.add_subcommand("vqe", "optimize the forged ansatz only");
  add_common(vqe, vqe_o);

  CLI::App* qse = app.add_subcommand("qse", "VQE followed by QSE (exact or sampled)");
  add_common(qse, qse_o);
  bool no_purify = false;
  qse->add_flag("--no-purify", no_purify, "skip CI-vector purification");

  CLI::App* pt2 = app.add_subcommand("pt2", "VQE, QSE and Dyall PT2 against a full-space FCIDUMP");
  add_common(pt2, pt2_o);
  pt2->add_option("--full-fcidump", pt2_o.full_fcidump, "full-space FCIDUMP");
  pt2->add_option("--window", pt2_o.window, "active window start,size");

  CLI::App* sweep = app.add_subcommand("sweep", "Pearson correlation versus shots");
  add_common(sweep, sweep_o);
  std::string grid = "100,250,500,1000,2500,5000,10000";
  std::vector<std::string> preps;
  std::string csv;
  sweep->add_option("--shot-grid", grid, "ascending shot values");
  sweep->add_option("--prep", preps, "preparation labels (x0, phi1_01, ...); default all");
  sweep->add_option("--csv", csv, "write rows as CSV");

  CLI::App* res = app.add_subcommand("resources", "circuit and gate accounting");
  int res_qubits = 2, res_k = 2;
  std::optional<int> res_hops;
  res->add_option("--qubits", res_qubits, "qubits per forged register")->required();
  res->add_option("--bitstrings", res_k, "number of bitstrings K");
  res->add_option("--hops", res_hops, "hop gates (default brick wall)");

  CLI::App* oracle = app.add_subcommand("oracle", "exact FCI ground state");
  add_common(oracle, oracle_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (!ts.empty() || !reactants.empty()) {
        if (ts.empty() || reactants.empty())
          throw ConfigError("barrier mode needs --ts and at least one --reactant");
        std::vector<RunConfig> cfgs;
        for (const std::string& r : reactants) {
          Overrides o = run_o;
          o.config = r;
          o.output.clear();
          cfgs.push_back(build_config(o));
        }
        Overrides o = run_o;
        o.config = ts;
        o.output.clear();
        cfgs.push_back(build_config(o));
        for (const RunConfig& c : cfgs) validate_config(c);
        json report;
        std::vector<json> reports;
        for (const RunConfig& c : cfgs) {
          const RunOutcome out = run_pipeline(c);
          if (!c.output_dir.empty()) write_outputs(out, c.output_dir);
          reports.push_back(out.report);
        }
        const json ts_report = reports.back();
        reports.pop_back();
        report["reactants"] = reports;
        report["transition_state"] = ts_report;
        report["barrier"] = barrier_report(reports, ts_report);
        std::cout << report.dump(2) << "\n";
        if (!run_o.output.empty()) {
          fs::create_directories(run_o.output);
          std::ofstream(fs::path(run_o.output) / "barrier.json") << report.dump(2) << "\n";
        }
        return 0;
      }
      if (run_o.config.empty()) throw ConfigError("run needs a config file");
      return run_and_emit(build_config(run_o));
    }
    if (*vqe) {
      RunConfig c = build_config(vqe_o);
      c.qse = false;
      c.pt2 = false;
      c.exact = true;
      return run_and_emit(c);
    }
    if (*qse) {
      RunConfig c = build_config(qse_o);
      c.qse = true;
      c.pt2 = false;
      if (no_purify) c.purify = false;
      return run_and_emit(c);
    }
    if (*pt2) {
      RunConfig c = build_config(pt2_o);
      c.pt2 = true;
      return run_and_emit(c);
    }
    if (*sweep) {
      RunConfig c = build_config(sweep_o);
      c.qse = false;
      c.pt2 = false;
      c.exact = true;
      validate_config(c);
      const std::vector<int> shots = parse_grid(grid);
      const RunOutcome vq = run_pipeline(c);
      ForgedAnsatz a;
      {
        std::vector<Bitstring> bs;
        for (const auto& s : vq.report["vqe"]["bitstrings"]) bs.push_back(parse_bitstring(s));
        a = make_ansatz(vq.report["system"]["n_orbitals"].get<int>(), bs);
        if (!c.layout.empty()) a.layout = parse_layout(a.n_qubits(), c.layout);
        const auto th = vq.report["vqe"]["theta"].get<std::vector<double>>();
        const auto sc = vq.report["vqe"]["schmidt"].get<std::vector<double>>();
        a.theta = Eigen::Map<const Eigen::VectorXd>(th.data(), static_cast<Eigen::Index>(th.size()));
        a.schmidt = Eigen::Map<const Eigen::VectorXd>(sc.data(), static_cast<Eigen::Index>(sc.size()));
      }
      SweepOptions so;
      so.jobs = c.jobs;
      const ShotSweepResult r = shot_sweep(a, preps, shots, c.seeds, so);
      json out;
      out["vqe_energy"] = vq.report["vqe"]["energy"];
      for (const auto& [label, plateau] : r.plateau_shots) {
        json means;
        for (const auto& [s, m] : r.mean_r(label)) means[std::to_string(s)] = m;
        out["preparations"][label] = {{"mean_r", means},
                                      {"plateau_shots", plateau ? json(*plateau) : json("beyond grid")}};
      }
      std::cout << out.dump(2) << "\n";
      if (!csv.empty()) {
        std::ofstream f(csv);
        f << "prep_label,shots,seed,r_weighted\n";
        char buf[32];
        for (const ShotSweepRow& row : r.rows) {
          std::snprintf(buf, sizeof buf, "%.17g", row.r_weighted);
          f << row.prep_label << "," << row.shots << "," << row.seed << "," << buf << "\n";
        }
      }
      return 0;
    }
    if (*res) {
      if (res_qubits < 1 || res_k < 1) throw ConfigError("qubits and bitstrings must be >= 1");
      const int hops = res_hops ? *res_hops : default_hop_count(res_qubits);
      const ResourceCount rc = count_resources({res_qubits, hops, 1, res_k});
      const json out = {{"n_qubits", res_qubits},
                        {"n_bitstrings", res_k},
                        {"n_hops", hops},
                        {"n_parameters", rc.n_parameters},
                        {"two_qubit_gates", rc.two_qubit_gates},
                        {"single_qubit_gates", rc.single_qubit_gates},
                        {"n_preparations", rc.n_preparations},
                        {"tomography_circuits", rc.n_tomography_circuits}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*oracle) {
      RunConfig c = build_config(oracle_o);
      if (c.fcidump.empty()) throw ConfigError("oracle needs --fcidump or a config");
      if (!fs::exists(c.fcidump)) throw ConfigError("file not found: " + c.fcidump.string());
      ActiveSpaceHamiltonian h;
      try {
        h = read_fcidump(c.fcidump);
      } catch (const ParseError& e) {
        throw ConfigError(e.what());
      }
      const FCIResult f = fci_ground_state(h);
      json amps;
      for (std::size_t i = 0; i < f.state.sector.dim(); ++i) {
        const cplx a = f.state.amplitudes[static_cast<Eigen::Index>(i)];
        if (std::abs(a) > 1e-3) amps[f.state.sector.label(i)] = a.real();
      }
      std::cout << json{{"energy", f.energy}, {"dimension", f.dimension}, {"leading_amplitudes", amps}}
                       .dump(2)
                << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cout << e.partial().dump(2) << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
