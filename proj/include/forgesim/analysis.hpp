#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forgesim/forging.hpp"
#include "forgesim/tomography.hpp"

namespace forgesim {

/// Estimates X with errors eps (weights w = 1 - eps^2) against references Y.
struct WeightedSeries {
  std::vector<double> x;
  std::vector<double> x_err;
  std::vector<double> y;

  /// Throws ValidationError on unequal lengths, fewer than two points or an
  /// error outside [0, 1].
  void validate() const;
};

/// r = sum w (X - Xw)(Y - Ybar) / sqrt(sum w (X - Xw)^2) / sqrt(sum (Y - Ybar)^2)
/// with Xw the weighted mean of X and Ybar the plain mean of Y. `symmetric`
/// applies the weights to the Y side as well (weighted Ybar and Y variance).
/// Throws NumericalError when either denominator is <= 1e-14.
double weighted_pearson(const WeightedSeries& s, bool symmetric = false);

struct ShotSweepRow {
  std::string prep_label;
  int shots = 0;
  std::uint64_t seed = 0;
  double r_weighted = 0.0;
};

struct ShotSweepResult {
  std::vector<ShotSweepRow> rows;  // sorted by (prep, shots, seed)
  /// nullopt: no plateau inside the grid.
  std::map<std::string, std::optional<int>> plateau_shots;

  /// Mean r over seeds per shot value for one preparation.
  std::map<int, double> mean_r(const std::string& prep_label) const;
};

struct SweepOptions {
  double plateau_threshold = 0.005;
  bool symmetric = false;
  int jobs = 1;
};

/// For every (prep, shots, seed) samples the preparation's Bloch vector and
/// correlates it with the exact one over all 4^n strings. Empty `prep_labels`
/// selects every preparation of the ansatz.
ShotSweepResult shot_sweep(const ForgedAnsatz& ansatz, const std::vector<std::string>& prep_labels,
                           const std::vector<int>& shot_grid,
                           const std::vector<std::uint64_t>& seeds,
                           const SweepOptions& options = {});

/// Smallest shot value whose mean r lies within `threshold` of the best mean
/// over the grid; nullopt when that is only the last grid point. Needs at
/// least three distinct shot values for the label.
std::optional<int> detect_plateau(const std::vector<ShotSweepRow>& rows,
                                  const std::string& prep_label, double threshold = 0.005);

}  // namespace forgesim
