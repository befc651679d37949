#include "forgesim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "forgesim/error.hpp"
#include "forgesim/parallel.hpp"

namespace forgesim {

void WeightedSeries::validate() const {
  if (x.size() != y.size() || x.size() != x_err.size())
    throw ValidationError("weighted series lengths differ");
  if (x.size() < 2) throw ValidationError("weighted series needs at least two points");
  for (double e : x_err)
    if (!(e >= 0.0 && e <= 1.0)) throw ValidationError("errors must lie in [0, 1]");
}

double weighted_pearson(const WeightedSeries& s, bool symmetric) {
  s.validate();
  const std::size_t n = s.x.size();
  std::vector<double> w(n);
  double sw = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 1.0 - s.x_err[i] * s.x_err[i];
    sw += w[i];
  }
  if (!(sw > 0.0)) throw NumericalError("all weights vanish");
  double xw = 0.0, ybar = 0.0, yw = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xw += w[i] * s.x[i];
    ybar += s.y[i];
    yw += w[i] * s.y[i];
  }
  xw /= sw;
  ybar = symmetric ? yw / sw : ybar / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = s.x[i] - xw, dy = s.y[i] - ybar;
    sxy += w[i] * dx * dy;
    sxx += w[i] * dx * dx;
    syy += (symmetric ? w[i] : 1.0) * dy * dy;
  }
  if (sxx <= 1e-14 || syy <= 1e-14) throw NumericalError("correlation undefined: zero variance");
  return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

std::map<int, double> ShotSweepResult::mean_r(const std::string& prep_label) const {
  std::map<int, std::pair<double, int>> acc;
  for (const ShotSweepRow& r : rows)
    if (r.prep_label == prep_label) {
      acc[r.shots].first += r.r_weighted;
      ++acc[r.shots].second;
    }
  std::map<int, double> out;
  for (const auto& [shots, sum] : acc) out[shots] = sum.first / sum.second;
  return out;
}

std::optional<int> detect_plateau(const std::vector<ShotSweepRow>& rows,
                                  const std::string& prep_label, double threshold) {
  ShotSweepResult tmp{rows, {}};
  const std::map<int, double> means = tmp.mean_r(prep_label);
  if (means.size() < 3) throw ValidationError("plateau detection needs three shot values");
  double best = -2.0;
  for (const auto& [shots, r] : means) best = std::max(best, r);
  for (auto it = means.begin(); it != means.end(); ++it)
    if (it->second >= best - threshold) {
      if (std::next(it) == means.end()) return std::nullopt;
      return it->first;
    }
  return std::nullopt;
}

ShotSweepResult shot_sweep(const ForgedAnsatz& ansatz, const std::vector<std::string>& prep_labels,
                           const std::vector<int>& shot_grid,
                           const std::vector<std::uint64_t>& seeds,
                           const SweepOptions& options) {
  if (!std::is_sorted(shot_grid.begin(), shot_grid.end()))
    throw ValidationError("shot grid must be ascending");
  const std::vector<Preparation> all = forged_preparations(ansatz.n_bitstrings());
  std::vector<std::size_t> chosen;
  if (prep_labels.empty()) {
    for (std::size_t i = 0; i < all.size(); ++i) chosen.push_back(i);
  } else {
    for (const std::string& label : prep_labels) {
      auto it = std::find_if(all.begin(), all.end(),
                             [&](const Preparation& p) { return p.label() == label; });
      if (it == all.end()) throw ValidationError("unknown preparation label '" + label + "'");
      chosen.push_back(static_cast<std::size_t>(it - all.begin()));
    }
  }

  struct Job {
    std::size_t prep;
    int shots;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t p : chosen)
    for (int shots : shot_grid)
      for (std::uint64_t seed : seeds) jobs.push_back({p, shots, seed});

  std::vector<Statevector> states;
  std::vector<BlochVector> truth;
  for (std::size_t p : chosen) {
    const Circuit c = preparation_circuit(ansatz, all[p]);
    states.push_back(apply_circuit(c, Statevector(c.n_qubits)));
    truth.push_back(sample_tomography(states.back(), 0, 0));
  }

  ShotSweepResult out;
  out.rows.resize(jobs.size());
  TomographyOptions topt;
  parallel_for(jobs.size(), options.jobs, [&](std::size_t j) {
    const Job& job = jobs[j];
    const std::size_t slot =
        static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), job.prep) - chosen.begin());
    const BlochVector sampled =
        sample_tomography(states[slot], job.shots, derive_seed(job.seed, job.prep), topt);
    WeightedSeries s{sampled.values, sampled.errors, truth[slot].values};
    out.rows[j] = {all[job.prep].label(), job.shots, job.seed,
                   weighted_pearson(s, options.symmetric)};
  });
  std::sort(out.rows.begin(), out.rows.end(), [](const ShotSweepRow& a, const ShotSweepRow& b) {
    return std::tie(a.prep_label, a.shots, a.seed) < std::tie(b.prep_label, b.shots, b.seed);
  });
  std::vector<int> distinct = shot_grid;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() >= 3)
    for (std::size_t p : chosen)
      out.plateau_shots[all[p].label()] =
          detect_plateau(out.rows, all[p].label(), options.plateau_threshold);
  return out;
}

}  // namespace forgesim
