#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "persuasion/model.hpp"
#include "persuasion/simplex.hpp"

namespace persuasion::oracle {

struct GridOptions {
  std::size_t points = 2001;
  /// Margin beyond [min v, max v]; defaults to 2/beta (1 for beta = 0 or a fully rational receiver).
  double margin = -1.0;
  /// Candidate signals added on top of the uniform grid, {0} and every v_i.
  std::vector<double> extra;
};

/// Sorted, de-duplicated signal grid.
std::vector<double> make_grid(const Instance& inst, const RationalityLevel& level,
                              const GridOptions& opts);

struct GridLpResult {
  Scheme scheme;
  double value = 0.0;
  std::vector<double> grid;
  std::vector<double> alpha;  // plausibility multiplier per grid point
  std::vector<double> eta;    // mass multiplier per state
  double dual_value = 0.0;
  double duality_gap = 0.0;
  double dual_violation = 0.0;  // worst violated dual constraint
  std::size_t pivots = 0;
};

/// Best scheme whose signals lie on the grid. The LP is solved over pair columns (two states
/// pooled at a grid point in strictly between them) and singleton reveals, which spans the same
/// feasible set as one plausibility row per grid point.
GridLpResult grid_lp_optimal(const Instance& inst, const RationalityLevel& level,
                             const GridOptions& opts = {});

struct BinarySearchResult {
  double delta = 0.0;
  double p = 0.0;
  double payoff = 0.0;
  Scheme scheme;
};

/// Scans two-state censorships whose pooling signal is each grid point clamped to
/// [v_1, prior mean]. An empty grid means 10^4 uniform points on [v_1, v_2].
BinarySearchResult exhaustive_binary_search(const Instance& inst2, const RationalityLevel& level,
                                            std::vector<double> grid = {});

struct SignalRate {
  double delta = 0.0;
  double expected = 0.0;
  double rate = 0.0;
  double tolerance = 0.0;  // four binomial standard deviations
  bool within = false;
};

struct SimulationReport {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::vector<SignalRate> signals;
  bool all_within() const noexcept;
};

/// Receivers with i.i.d. Gumbel shocks on both actions; n draws per signal.
SimulationReport gumbel_simulate(const Instance& inst, const RationalityLevel& level,
                                 const Scheme& scheme, std::size_t n, std::uint64_t seed);

}  // namespace persuasion::oracle
