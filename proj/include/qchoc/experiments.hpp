// experiments.hpp
// Quantum-vs-classical comparisons: Bell points and sweeps for the singlet,
// Monte Carlo estimators for both sides, the sequential-measurement order
// dependence, and the GHZ parity contradiction.
//
// Bell-point convention: all axes lie in the xz-plane, n1 = z, n2 at polar
// angle theta1, n3 at polar angle theta2. p(A,B) measures n1 on spin 1 and
// n2 on spin 2; p(B,C) measures n2 on spin 1 and n3 on spin 2; p(A,C)
// measures n1 on spin 1 and n3 on spin 2. Each counts both results positive.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qchoc/classical.hpp"
#include "qchoc/quantum.hpp"
#include "qchoc/random.hpp"

namespace qchoc {

/// Raised when a relation the physics guarantees fails numerically.
class PhysicsViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct BellPoint {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double p_ab = 0.0;
  double p_bc = 0.0;
  double p_ac = 0.0;
  double bell_gap = 0.0;  // p_ab + p_bc - p_ac
  bool violated = false;  // bell_gap < 0
};

struct BellClosedForm {
  double p_ab, p_bc, p_ac;
};

/// 1/2 sin^2 of the half-angle between each pair of axes.
inline BellClosedForm bell_closed_form(double theta1, double theta2) {
  auto half_sin2 = [](double angle) {
    const double s = std::sin(angle / 2.0);
    return 0.5 * s * s;
  };
  return {half_sin2(theta1), half_sin2(theta2 - theta1), half_sin2(theta2)};
}

namespace detail {

inline std::array<MeasurementAxis, 3> bell_axes(double theta1, double theta2) {
  return {MeasurementAxis::z(), MeasurementAxis::xz(theta1), MeasurementAxis::xz(theta2)};
}

/// Index pairs (spin-1 axis, spin-2 axis) for p_ab, p_bc, p_ac.
inline constexpr std::array<std::array<std::size_t, 2>, 3> kBellPairs{{{0, 1}, {1, 2}, {0, 2}}};

inline constexpr std::array<std::array<Sign, 2>, 4> kTwoSiteOutcomes{
    {{Sign::plus, Sign::plus}, {Sign::plus, Sign::minus}, {Sign::minus, Sign::plus}, {Sign::minus, Sign::minus}}};

inline double both_plus(const PureState& s, const MeasurementAxis& a, const MeasurementAxis& b) {
  return joint_outcome_prob(s, OutcomeSpec{LocalOutcome{a, Sign::plus}, LocalOutcome{b, Sign::plus}});
}

}  // namespace detail

/// Born-rule Bell probabilities, cross-checked against the closed forms.
inline BellPoint quantum_bell_point(double theta1, double theta2) {
  if (!std::isfinite(theta1) || !std::isfinite(theta2)) {
    throw std::invalid_argument("quantum_bell_point: angles must be finite");
  }
  static const PureState singlet = singlet_state();
  const auto n = detail::bell_axes(theta1, theta2);
  BellPoint pt;
  pt.theta1 = theta1;
  pt.theta2 = theta2;
  pt.p_ab = detail::both_plus(singlet, n[0], n[1]);
  pt.p_bc = detail::both_plus(singlet, n[1], n[2]);
  pt.p_ac = detail::both_plus(singlet, n[0], n[2]);
  pt.bell_gap = pt.p_ab + pt.p_bc - pt.p_ac;
  pt.violated = pt.bell_gap < 0.0;

  const auto cf = bell_closed_form(theta1, theta2);
  if (std::abs(cf.p_ab - pt.p_ab) > kExactTol || std::abs(cf.p_bc - pt.p_bc) > kExactTol ||
      std::abs(cf.p_ac - pt.p_ac) > kExactTol) {
    throw PhysicsViolation("quantum_bell_point: Born-rule probabilities disagree with closed form");
  }
  return pt;
}

/// Rectangular theta grid in radians, inclusive of both ends.
struct GridSpec {
  double theta1_min = 0.0;
  double theta1_max = std::numbers::pi;
  double theta2_min = 0.0;
  double theta2_max = std::numbers::pi;
  double step = std::numbers::pi / 180.0;
  bool diagonal_only = false;  // restrict to theta2 == theta1 (uses the theta1 range)
};

namespace detail {

inline std::vector<double> grid_axis(double lo, double hi, double step) {
  std::vector<double> out;
  if (hi < lo) return out;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

}  // namespace detail

struct BellSweep {
  std::vector<BellPoint> points;  // theta1-major order
  double min_gap = 0.0;
  std::size_t argmin = 0;
};

inline BellSweep quantum_bell_sweep(const GridSpec& grid, unsigned threads = 1) {
  if (!(grid.step > 0.0) || !std::isfinite(grid.step)) {
    throw std::invalid_argument("quantum_bell_sweep: step must be positive");
  }
  const auto t1 = detail::grid_axis(grid.theta1_min, grid.theta1_max, grid.step);
  const auto t2 = grid.diagonal_only ? t1 : detail::grid_axis(grid.theta2_min, grid.theta2_max, grid.step);
  std::vector<std::array<double, 2>> cells;
  if (grid.diagonal_only) {
    for (double a : t1) cells.push_back({a, a});
  } else {
    cells.reserve(t1.size() * t2.size());
    for (double a : t1)
      for (double b : t2) cells.push_back({a, b});
  }
  if (cells.empty()) throw std::invalid_argument("quantum_bell_sweep: empty grid");

  BellSweep sweep;
  sweep.points.resize(cells.size());
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(cells.size())));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) sweep.points[i] = quantum_bell_point(cells[i][0], cells[i][1]);
  };
  if (threads == 1) {
    work(0, cells.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (cells.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk, e = std::min(cells.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }
  sweep.min_gap = sweep.points[0].bell_gap;
  for (std::size_t i = 1; i < sweep.points.size(); ++i) {
    if (sweep.points[i].bell_gap < sweep.min_gap) {
      sweep.min_gap = sweep.points[i].bell_gap;
      sweep.argmin = i;
    }
  }
  return sweep;
}

struct McEstimate {
  double estimate = 0.0;
  std::uint64_t samples = 0;
  double std_error = 0.0;  // sqrt(estimate (1 - estimate) / samples)
  std::uint64_t seed = 0;
};

inline McEstimate make_estimate(std::uint64_t hits, std::uint64_t samples, std::uint64_t seed) {
  McEstimate e;
  e.samples = samples;
  e.seed = seed;
  e.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(samples));
  return e;
}

namespace detail {

inline void require_samples(std::uint64_t samples, unsigned shards) {
  if (samples < 1) throw std::invalid_argument("Monte Carlo: samples must be >= 1");
  if (shards < 1) throw std::invalid_argument("Monte Carlo: shards must be >= 1");
}

/// Runs `body(rng, shard_samples, out)` once per shard, each on its own
/// stream, and sums the per-shard tallies in shard order.
template <std::size_t N, class Body>
std::array<std::uint64_t, N> sharded_tally(std::uint64_t samples, std::uint64_t seed, unsigned shards, Body body) {
  std::vector<std::array<std::uint64_t, N>> partial(shards);
  auto run_shard = [&](unsigned s) {
    const std::uint64_t n = samples / shards + (s < samples % shards ? 1 : 0);
    Rng rng = make_stream(seed, s);
    partial[s].fill(0);
    body(rng, n, partial[s]);
  };
  if (shards == 1) {
    run_shard(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned s = 0; s < shards; ++s) pool.emplace_back(run_shard, s);
  }
  std::array<std::uint64_t, N> total{};
  for (const auto& p : partial)
    for (std::size_t i = 0; i < N; ++i) total[i] += p[i];
  return total;
}

}  // namespace detail

/// Sampled p_ab, p_bc, p_ac: each sample draws a joint (spin 1, spin 2)
/// outcome from the exact Born distribution for that pair of axes.
inline std::array<McEstimate, 3> mc_bell_estimate(double theta1, double theta2, std::uint64_t samples,
                                                  std::uint64_t seed, unsigned shards = 1) {
  detail::require_samples(samples, shards);
  const PureState singlet = singlet_state();
  const auto n = detail::bell_axes(theta1, theta2);
  std::array<std::array<double, 4>, 3> cumulative{};
  for (std::size_t k = 0; k < 3; ++k) {
    double acc = 0.0;
    for (std::size_t o = 0; o < 4; ++o) {
      const auto& signs = detail::kTwoSiteOutcomes[o];
      acc += joint_outcome_prob(singlet, OutcomeSpec{LocalOutcome{n[detail::kBellPairs[k][0]], signs[0]},
                                                     LocalOutcome{n[detail::kBellPairs[k][1]], signs[1]}});
      cumulative[k][o] = acc;
    }
  }
  const auto hits = detail::sharded_tally<3>(samples, seed, shards, [&](Rng& rng, std::uint64_t count, auto& out) {
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::uint64_t i = 0; i < count; ++i) {
        const double u = uniform_unit(rng) * cumulative[k][3];
        std::size_t o = 0;
        while (o < 3 && u >= cumulative[k][o]) ++o;
        if (o == 0) ++out[k];
      }
    }
  });
  return {make_estimate(hits[0], samples, seed), make_estimate(hits[1], samples, seed),
          make_estimate(hits[2], samples, seed)};
}

struct SampledCorrelationReport {
  McEstimate p_ab;
  McEstimate p_bc;
  McEstimate p_ac;
  double bell_lhs = 0.0;
  bool satisfied = true;
  Source source = Source::sampled;
};

/// Draws boxes from a two-compartment ensemble and tallies property coincidences.
template <PairBoxing B>
SampledCorrelationReport mc_classical_estimate(const Ensemble<B>& ens, std::uint64_t samples, std::uint64_t seed,
                                               unsigned shards = 1) {
  detail::require_samples(samples, shards);
  const auto hits = detail::sharded_tally<3>(samples, seed, shards, [&](Rng& rng, std::uint64_t count, auto& out) {
    for (std::uint64_t i = 0; i < count; ++i) {
      const B& b = ens.sample(rng);
      const auto c1 = b.compartment1(), c2 = b.compartment2();
      out[0] += c1.has(Property::dark) && c2.has(Property::round);
      out[1] += c1.has(Property::round) && c2.has(Property::swiss);
      out[2] += c1.has(Property::dark) && c2.has(Property::swiss);
    }
  });
  SampledCorrelationReport r;
  r.p_ab = make_estimate(hits[0], samples, seed);
  r.p_bc = make_estimate(hits[1], samples, seed);
  r.p_ac = make_estimate(hits[2], samples, seed);
  r.bell_lhs = r.p_ab.estimate + r.p_bc.estimate;
  r.satisfied = r.bell_lhs >= r.p_ac.estimate;
  return r;
}

struct SampledParity {
  std::uint64_t plus = 0;
  std::uint64_t minus = 0;
  double mean() const { return (static_cast<double>(plus) - static_cast<double>(minus)) / static_cast<double>(plus + minus); }
};

/// Per-draw parity products for each pattern over boxes sampled from a GHZ ensemble.
inline std::map<ParityPattern, SampledParity> mc_ghz_parity(const Ensemble<GhzBoxing>& ens, std::uint64_t samples,
                                                            std::uint64_t seed, unsigned shards = 1) {
  detail::require_samples(samples, shards);
  const auto counts = detail::sharded_tally<8>(samples, seed, shards, [&](Rng& rng, std::uint64_t count, auto& out) {
    for (std::uint64_t i = 0; i < count; ++i) {
      const GhzBoxing& b = ens.sample(rng);
      for (std::size_t p = 0; p < 4; ++p) ++out[2 * p + (b.product(kParityPatterns[p]) == Sign::plus ? 0 : 1)];
    }
  });
  std::map<ParityPattern, SampledParity> out;
  for (std::size_t p = 0; p < 4; ++p) out[kParityPatterns[p]] = {counts[2 * p], counts[2 * p + 1]};
  return out;
}

struct OrderDependence {
  double order_123 = 0.0;  // n1:+, n2:-, n3:-
  double order_132 = 0.0;  // n1:+, n3:-, n2:-
  bool equal = false;
};

/// Sequential single-spin measurements from the maximally mixed state.
inline OrderDependence order_dependence_report(double theta1, double theta2) {
  if (!std::isfinite(theta1) || !std::isfinite(theta2)) {
    throw std::invalid_argument("order_dependence_report: angles must be finite");
  }
  const auto n = detail::bell_axes(theta1, theta2);
  const DensityMatrix rho = DensityMatrix::maximally_mixed(2);
  const std::array<LocalOutcome, 3> forward{{{n[0], Sign::plus}, {n[1], Sign::minus}, {n[2], Sign::minus}}};
  const std::array<LocalOutcome, 3> swapped{{{n[0], Sign::plus}, {n[2], Sign::minus}, {n[1], Sign::minus}}};
  OrderDependence r;
  r.order_123 = sequential_measure_prob(rho, forward);
  r.order_132 = sequential_measure_prob(rho, swapped);
  r.equal = std::abs(r.order_123 - r.order_132) <= kExactTol;

  const double c2 = std::pow(std::cos((theta2 - theta1) / 2.0), 2);
  const double want_123 = 0.5 * std::pow(std::sin(theta1 / 2.0), 2) * c2;
  const double want_132 = 0.5 * std::pow(std::sin(theta2 / 2.0), 2) * c2;
  if (std::abs(want_123 - r.order_123) > kExactTol || std::abs(want_132 - r.order_132) > kExactTol) {
    throw PhysicsViolation("order_dependence_report: collapse simulation disagrees with closed form");
  }
  return r;
}

inline ProductObservable parity_observable(ParityPattern p) {
  const auto use_x = pattern_uses_x(p);
  ProductObservable obs;
  for (bool x : use_x) obs.emplace_back(x ? MeasurementAxis::x() : MeasurementAxis::y());
  return obs;
}

struct GhzParityReport {
  std::map<ParityPattern, double> quantum;
  std::map<ParityPattern, std::optional<Sign>> classical;
  bool contradiction = false;  // quantum xxx = -1 while classical xxx = +1
};

inline GhzParityReport ghz_contradiction_report() {
  const PureState ghz = ghz_state();
  const auto ens = build_ghz_ensemble();
  GhzParityReport r;
  for (auto p : kParityPatterns) {
    r.quantum[p] = product_expectation(ghz, parity_observable(p));
    r.classical[p] = parity_product(ens, p).constant;
  }
  r.contradiction = std::abs(r.quantum[ParityPattern::xxx] + 1.0) <= kExactTol &&
                    r.classical[ParityPattern::xxx] == Sign::plus;
  return r;
}

struct OutcomeRow {
  ParityPattern setting;
  std::array<Sign, 3> outcomes;
  double probability = 0.0;
  Sign parity = Sign::plus;
};

struct ImpossibleOutcomesReport {
  std::vector<OutcomeRow> rows;
  bool negatives_zero = false;    // every negative-parity pattern has probability 0
  bool positives_quarter = false;  // every positive-parity pattern has probability 1/4
};

/// Joint outcome probabilities for the three xyy-type settings on the GHZ state.
inline ImpossibleOutcomesReport impossible_outcomes_check() {
  const PureState ghz = ghz_state();
  ImpossibleOutcomesReport r;
  r.negatives_zero = true;
  r.positives_quarter = true;
  for (auto setting : {ParityPattern::xyy, ParityPattern::yxy, ParityPattern::yyx}) {
    const auto use_x = pattern_uses_x(setting);
    for (unsigned bits = 0; bits < 8; ++bits) {
      OutcomeRow row{setting, {}, 0.0, Sign::plus};
      OutcomeSpec spec;
      for (std::size_t i = 0; i < 3; ++i) {
        row.outcomes[i] = (bits >> (2 - i)) & 1U ? Sign::minus : Sign::plus;
        row.parity = row.parity * row.outcomes[i];
        spec.push_back(LocalOutcome{use_x[i] ? MeasurementAxis::x() : MeasurementAxis::y(), row.outcomes[i]});
      }
      row.probability = joint_outcome_prob(ghz, spec);
      if (row.parity == Sign::minus && row.probability > kExactTol) r.negatives_zero = false;
      if (row.parity == Sign::plus && std::abs(row.probability - 0.25) > kExactTol) r.positives_quarter = false;
      r.rows.push_back(row);
    }
  }
  return r;
}

/// Single-spin facts about the singlet and GHZ states along one axis.
struct StateReport {
  MeasurementAxis axis;
  MixedVsSuperposition mixed_vs_phi;
  double invariance_residual = 0.0;
  std::array<OutcomeDistribution, 2> singlet_marginals;  // spin 1, spin 2
  std::array<DensityMatrix, 2> singlet_reduced{DensityMatrix::maximally_mixed(2), DensityMatrix::maximally_mixed(2)};
  std::array<DensityMatrix, 3> ghz_reduced{DensityMatrix::maximally_mixed(2), DensityMatrix::maximally_mixed(2),
                                           DensityMatrix::maximally_mixed(2)};
};

inline StateReport state_report(const MeasurementAxis& axis) {
  const PureState singlet = singlet_state();
  const PureState ghz = ghz_state();
  StateReport r;
  r.axis = axis;
  r.mixed_vs_phi = mixed_vs_superposition_report(axis);
  r.invariance_residual = singlet_invariance_residual(axis);
  for (std::size_t site = 0; site < 2; ++site) {
    auto marginal = [&](Sign s) {
      OutcomeSpec spec(2);
      spec[site] = LocalOutcome{axis, s};
      return joint_outcome_prob(singlet, spec);
    };
    r.singlet_marginals[site] = {marginal(Sign::plus), marginal(Sign::minus)};
    r.singlet_reduced[site] = partial_trace(singlet, site + 1);
  }
  for (std::size_t site = 0; site < 3; ++site) r.ghz_reduced[site] = partial_trace(ghz, site + 1);
  return r;
}

}  // namespace qchoc
