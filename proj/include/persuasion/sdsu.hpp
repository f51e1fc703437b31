#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "persuasion/model.hpp"
#include "persuasion/oracle.hpp"

namespace persuasion::sdsu {

/// Slope statistic of the two-state problem. Strictly decreasing in delta; the optimal pooling
/// signal is where it crosses u_1/u_2. Requires m = 2, finite beta > 0 and v_1 <= delta < v_2.
double binary_gamma(const Instance& inst2, const RationalityLevel& level, double delta);

enum class Regime { FullReveal, Partial, NoInfo };
std::string regime_name(Regime r);

struct BinaryOptimum {
  CensorshipParams params;
  Scheme scheme;
  Regime regime = Regime::FullReveal;
  double payoff = 0.0;
  std::string note;
};

/// Probability with which state 2 joins state 1 at pooling signal delta.
double binary_pool_probability(const Instance& inst2, double delta);

/// Optimal scheme for a two-state instance. State 1 always emits the pooling signal; state 2
/// joins it with the returned probability and reveals itself otherwise. A fully rational level
/// delegates to the rational optimum; beta = 0 returns full revelation since every scheme ties.
BinaryOptimum binary_optimal(const Instance& inst2, const RationalityLevel& level);

/// Splits every signal into sub-signals at the same delta supported on at most two states.
/// The result is a split scheme with the same payoff and per-state totals.
Scheme decompose_binary_support(const Instance& inst, const Scheme& scheme);

/// Replaces all signals shared by each pair of states with that pair's optimal two-state scheme.
/// Requires every signal to have support at most two. Never lowers the payoff.
Scheme pairwise_reoptimize(const Instance& inst, const RationalityLevel& level,
                           const Scheme& scheme);

/// Grid LP, then binary-support decomposition, then pairwise re-optimization.
Scheme optimal_pairwise(const Instance& inst, const RationalityLevel& level,
                        const oracle::GridOptions& grid = {});

/// One budgeted edge of the assignment LP. A self edge (item == bin) stands for a state
/// revealed on its own and consumes no bin budget.
struct PairEdge {
  std::size_t item = 0;
  std::size_t bin = 0;
  double delta = 0.0;
  double reward = 0.0;
  double cost = 0.0;  // bin mass per unit of item mass
};

struct PairLP {
  std::size_t states = 0;
  std::vector<PairEdge> edges;
};

struct GapSolution {
  std::vector<double> x;  // one per edge
  double value = 0.0;
};

/// Encodes a pair-structured scheme as an assignment LP. Each pooled pair becomes an edge
/// oriented from the state with the larger emission probability; singleton reveals become self edges.
PairLP build_gap_lp(const Instance& inst, const RationalityLevel& level, const Scheme& scheme);

/// Fractional optimum by the dense simplex.
GapSolution solve_gap_fractional(const PairLP& lp);

/// Integral optimum by branch and bound. Throws NumericError when the LP has more than 10 states.
GapSolution solve_gap_integral(const PairLP& lp);

/// The scheme value achieved by an assignment when every selected edge keeps its full masses.
double gap_objective(const PairLP& lp, const std::vector<double>& x);

struct FourApprox {
  Scheme scheme;
  Scheme seed;  // pair-structured scheme the LP was built from
  PairLP lp;
  GapSolution integral;
  GapSolution fractional;
};

/// Halves the integral assignment's edges and tops each state up with a revealing signal.
/// At most 2m signals and at most m of them pool two states.
FourApprox four_approx(const Instance& inst, const RationalityLevel& level,
                       const oracle::GridOptions& grid = {});

struct ApproxScheme {
  Scheme scheme;
  std::optional<CensorshipParams> params;  // set for censorship schemes
  double payoff = 0.0;
  std::string chosen;  // which pair or signal was kept
};

/// Best censorship that runs one pair's two-state optimum and reveals every other state.
/// Every pair is tried, so the result is at least as good as any single pair choice.
ApproxScheme censorship_m_approx(const Instance& inst, const RationalityLevel& level);

/// Best direct scheme that keeps one signal of the four-approximation and pools all
/// remaining mass at a single second signal.
ApproxScheme direct_m_approx(const Instance& inst, const RationalityLevel& level,
                             const oracle::GridOptions& grid = {});

/// Instance on which censorship needs many signals per state: v_i = i, u_i = 1{i = m} and
/// beta the smallest value with beta / log(beta) >= 2m.
struct LevelledInstance {
  Instance instance;
  RationalityLevel level;
  double k1 = 0.0;
  double log_k2 = 0.0;
};
LevelledInstance signal_count_instance(std::size_t m);

/// Scheme pooling state m with every lower state i at i + 1/beta.
Scheme signal_count_witness(const Instance& inst, const RationalityLevel& level);

/// Pools state i with the top state at delta: full pooling of i and a share of the top state
/// below the two-state mean, full pooling of the top state and a share of i above it, and
/// full pooling of both at the mean.
Scheme pair_pool_scheme(const Instance& inst, std::size_t i, double delta);

struct EnumeratedBest {
  CensorshipParams params;
  Scheme scheme;
  double log_payoff = 0.0;
};

/// Best censorship (or direct scheme) over every partition (H, threshold, L) and a grid of
/// threshold probabilities refined by golden section. Capped at 12 states.
EnumeratedBest best_censorship(const Instance& inst, const RationalityLevel& level,
                               std::size_t p_points = 201, bool direct = false);

}  // namespace persuasion::sdsu
