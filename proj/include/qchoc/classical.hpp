// classical.hpp
// Local hidden-variable ("chocolate") models: deterministic boxings,
// rational-weighted ensembles over them, exact correlation probabilities,
// Venn-region accounting, Bell-inequality evaluation, parity products and
// the exhaustive vertex enumerations that certify the classical bounds.
//
// Attribute values are signs: +1 means the chocolate has the property
// (dark, round, Swiss), -1 means it does not. All results are exact.

#pragma once

#include <algorithm>
#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "qchoc/quantum.hpp"
#include "qchoc/random.hpp"

namespace qchoc {

using Rational = boost::rational<std::int64_t>;

/// "num/den", always with an explicit denominator.
inline std::string to_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// A = dark, B = round, C = Swiss.
enum class Property { dark, round, swiss };

inline constexpr std::array<Property, 3> kProperties{Property::dark, Property::round, Property::swiss};

constexpr char property_letter(Property p) noexcept {
  switch (p) {
    case Property::dark: return 'A';
    case Property::round: return 'B';
    case Property::swiss: return 'C';
  }
  return '?';
}

struct AttributeTriple {
  Sign dark = Sign::plus;
  Sign round = Sign::plus;
  Sign swiss = Sign::plus;

  constexpr Sign get(Property p) const noexcept {
    switch (p) {
      case Property::dark: return dark;
      case Property::round: return round;
      case Property::swiss: return swiss;
    }
    return dark;
  }
  constexpr bool has(Property p) const noexcept { return get(p) == Sign::plus; }
  constexpr AttributeTriple negated() const noexcept { return {-dark, -round, -swiss}; }

  /// The 2^3 triples in a fixed order: index bit 2 = dark, 1 = round, 0 = swiss, bit set = absent.
  static constexpr AttributeTriple from_index(unsigned i) noexcept {
    auto s = [](unsigned bit) { return bit ? Sign::minus : Sign::plus; };
    return {s(i & 4U), s(i & 2U), s(i & 1U)};
  }

  friend constexpr bool operator==(const AttributeTriple&, const AttributeTriple&) = default;
};

inline std::string to_string(const AttributeTriple& t) {
  std::string s;
  s += t.has(Property::dark) ? "d" : "~d";
  s += t.has(Property::round) ? "r" : "~r";
  s += t.has(Property::swiss) ? "s" : "~s";
  return s;
}

/// Two-compartment box obeying the complementation rule: compartment 2 is
/// the attribute-wise negation of compartment 1.
class SingletBoxing {
public:
  explicit constexpr SingletBoxing(AttributeTriple first) noexcept : first_(first) {}

  constexpr AttributeTriple compartment1() const noexcept { return first_; }
  constexpr AttributeTriple compartment2() const noexcept { return first_.negated(); }

  friend constexpr bool operator==(const SingletBoxing&, const SingletBoxing&) = default;

private:
  AttributeTriple first_;
};

/// Two-compartment box with no boxing rule at all.
struct FreePairBoxing {
  AttributeTriple first;
  AttributeTriple second;

  constexpr AttributeTriple compartment1() const noexcept { return first; }
  constexpr AttributeTriple compartment2() const noexcept { return second; }

  friend constexpr bool operator==(const FreePairBoxing&, const FreePairBoxing&) = default;
};

template <class B>
concept PairBoxing = requires(const B& b) {
  { b.compartment1() } -> std::same_as<AttributeTriple>;
  { b.compartment2() } -> std::same_as<AttributeTriple>;
};

enum class ParityPattern { xyy, yxy, yyx, xxx };

inline constexpr std::array<ParityPattern, 4> kParityPatterns{ParityPattern::xyy, ParityPattern::yxy,
                                                             ParityPattern::yyx, ParityPattern::xxx};

inline std::string to_string(ParityPattern p) {
  switch (p) {
    case ParityPattern::xyy: return "xyy";
    case ParityPattern::yxy: return "yxy";
    case ParityPattern::yyx: return "yyx";
    case ParityPattern::xxx: return "xxx";
  }
  return "?";
}

/// Which factor (x or y) each of the three sites uses in a pattern.
constexpr std::array<bool, 3> pattern_uses_x(ParityPattern p) noexcept {
  switch (p) {
    case ParityPattern::xyy: return {true, false, false};
    case ParityPattern::yxy: return {false, true, false};
    case ParityPattern::yyx: return {false, false, true};
    case ParityPattern::xxx: return {true, true, true};
  }
  return {false, false, false};
}

/// Type (x, dark) and shape (y, round) signs for three compartments.
struct GhzAssignment {
  std::array<Sign, 3> x{Sign::plus, Sign::plus, Sign::plus};
  std::array<Sign, 3> y{Sign::plus, Sign::plus, Sign::plus};

  constexpr Sign product(ParityPattern p) const noexcept {
    const auto use_x = pattern_uses_x(p);
    Sign out = Sign::plus;
    for (std::size_t i = 0; i < 3; ++i) out = out * (use_x[i] ? x[i] : y[i]);
    return out;
  }

  /// x1 y2 y3 = y1 x2 y3 = y1 y2 x3 = +1
  constexpr bool satisfies_parity_constraints() const noexcept {
    return product(ParityPattern::xyy) == Sign::plus && product(ParityPattern::yxy) == Sign::plus &&
           product(ParityPattern::yyx) == Sign::plus;
  }

  friend constexpr bool operator==(const GhzAssignment&, const GhzAssignment&) = default;
  friend constexpr auto operator<=>(const GhzAssignment& a, const GhzAssignment& b) noexcept {
    auto key = [](const GhzAssignment& g) {
      return std::array<int, 6>{to_int(g.x[0]), to_int(g.x[1]), to_int(g.x[2]),
                                to_int(g.y[0]), to_int(g.y[1]), to_int(g.y[2])};
    };
    return key(a) <=> key(b);
  }
};

inline std::string to_string(const GhzAssignment& g) {
  std::string s;
  for (std::size_t i = 0; i < 3; ++i) {
    if (i) s += ' ';
    s += g.x[i] == Sign::plus ? "d" : "~d";
    s += g.y[i] == Sign::plus ? "r" : "~r";
  }
  return s;
}

/// Three-compartment box. The Swiss attribute is shared by all three
/// chocolates; the type/shape signs must satisfy the three parity constraints.
class GhzBoxing {
public:
  GhzBoxing(GhzAssignment xy, Sign swiss) : xy_(xy), swiss_(swiss) {
    if (!xy_.satisfies_parity_constraints()) {
      throw std::invalid_argument("GhzBoxing: assignment " + to_string(xy) +
                                  " violates the xyy/yxy/yyx parity constraints");
    }
  }

  const GhzAssignment& assignment() const noexcept { return xy_; }
  Sign x(std::size_t compartment) const { return xy_.x.at(compartment); }
  Sign y(std::size_t compartment) const { return xy_.y.at(compartment); }
  Sign swiss() const noexcept { return swiss_; }
  Sign product(ParityPattern p) const noexcept { return xy_.product(p); }

  friend bool operator==(const GhzBoxing&, const GhzBoxing&) = default;

private:
  GhzAssignment xy_;
  Sign swiss_;
};

/// Probability mixture of boxings with exact rational weights summing to 1.
template <class B>
class Ensemble {
public:
  struct Entry {
    B boxing;
    Rational weight;
  };

  explicit Ensemble(std::vector<Entry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw std::invalid_argument("Ensemble: no entries");
    Rational total(0);
    std::int64_t common = 1;
    for (const auto& e : entries_) {
      if (e.weight <= Rational(0)) throw std::invalid_argument("Ensemble: weights must be positive");
      total += e.weight;
      common = std::lcm(common, e.weight.denominator());
    }
    if (total != Rational(1)) {
      throw std::invalid_argument("Ensemble: weights sum to " + to_string(total) + ", not 1");
    }
    denominator_ = static_cast<std::uint64_t>(common);
    std::uint64_t acc = 0;
    cumulative_.reserve(entries_.size());
    for (const auto& e : entries_) {
      acc += static_cast<std::uint64_t>(e.weight.numerator() * (common / e.weight.denominator()));
      cumulative_.push_back(acc);
    }
  }

  /// Weights proportional to positive integer counts (the "N copies" form).
  static Ensemble from_counts(const std::vector<std::pair<B, std::int64_t>>& counts) {
    std::int64_t total = 0;
    for (const auto& [b, c] : counts) {
      if (c <= 0) throw std::invalid_argument("Ensemble::from_counts: counts must be positive");
      total += c;
    }
    std::vector<Entry> entries;
    entries.reserve(counts.size());
    for (const auto& [b, c] : counts) entries.push_back({b, Rational(c, total)});
    return Ensemble(std::move(entries));
  }

  static Ensemble point_mass(B boxing) { return Ensemble({Entry{std::move(boxing), Rational(1)}}); }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Exact probability that `pred(boxing)` holds.
  template <class Pred>
  Rational probability(Pred&& pred) const {
    Rational p(0);
    for (const auto& e : entries_) {
      if (pred(e.boxing)) p += e.weight;
    }
    return p;
  }

  /// Draws a boxing with probability equal to its weight.
  template <class Engine>
  const B& sample(Engine& rng) const {
    const std::uint64_t u = uniform_below(rng, denominator_);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return entries_[static_cast<std::size_t>(it - cumulative_.begin())].boxing;
  }

private:
  std::vector<Entry> entries_;
  std::uint64_t denominator_ = 1;
  std::vector<std::uint64_t> cumulative_;
};

template <class B, class Engine>
const B& sample(const Ensemble<B>& ens, Engine& rng) {
  return ens.sample(rng);
}

/// Uniform mixture of the eight complement pairs: compartment 1 ranges over all 2^3 triples.
inline Ensemble<SingletBoxing> build_singlet_ensemble() {
  std::vector<std::pair<SingletBoxing, std::int64_t>> counts;
  for (unsigned i = 0; i < 8; ++i) counts.emplace_back(SingletBoxing(AttributeTriple::from_index(i)), 1);
  return Ensemble<SingletBoxing>::from_counts(counts);
}

namespace detail {

constexpr Sign sign_of(char c) { return c == '+' ? Sign::plus : Sign::minus; }

constexpr GhzAssignment ghz_row(const char (&x)[4], const char (&y)[4]) {
  return {{sign_of(x[0]), sign_of(x[1]), sign_of(x[2])}, {sign_of(y[0]), sign_of(y[1]), sign_of(y[2])}};
}

}  // namespace detail

/// The eight designed three-compartment boxings, in order (1)..(8).
/// Boxes (1), (3), (5), (7) are all-Swiss; the rest are all-non-Swiss.
inline std::vector<GhzBoxing> designed_ghz_boxings() {
  using detail::ghz_row;
  //                  type (dark)     shape (round)
  return {
      GhzBoxing(ghz_row("--+", "++-"), Sign::plus),   // (1)
      GhzBoxing(ghz_row("--+", "--+"), Sign::minus),  // (2)
      GhzBoxing(ghz_row("-+-", "+-+"), Sign::plus),   // (3)
      GhzBoxing(ghz_row("-+-", "-+-"), Sign::minus),  // (4)
      GhzBoxing(ghz_row("+--", "-++"), Sign::plus),   // (5)
      GhzBoxing(ghz_row("+--", "+--"), Sign::minus),  // (6)
      GhzBoxing(ghz_row("+++", "+++"), Sign::plus),   // (7)
      GhzBoxing(ghz_row("+++", "---"), Sign::minus),  // (8)
  };
}

inline Ensemble<GhzBoxing> build_ghz_ensemble() {
  std::vector<std::pair<GhzBoxing, std::int64_t>> counts;
  for (const auto& b : designed_ghz_boxings()) counts.emplace_back(b, 1);
  return Ensemble<GhzBoxing>::from_counts(counts);
}

/// P(compartment 1 has prop1 and compartment 2 has prop2).
template <PairBoxing B>
Rational correlation_prob(const Ensemble<B>& ens, Property prop1, Property prop2) {
  return ens.probability(
      [&](const B& b) { return b.compartment1().has(prop1) && b.compartment2().has(prop2); });
}

/// P(compartment 1 has prop1 but lacks prop2): a single-chocolate quantity.
template <PairBoxing B>
Rational tilde_correlation_prob(const Ensemble<B>& ens, Property prop1, Property prop2) {
  return ens.probability([&](const B& b) {
    const auto c = b.compartment1();
    return c.has(prop1) && !c.has(prop2);
  });
}

/// P(compartment `compartment` (1 or 2) has `prop`).
template <PairBoxing B>
Rational marginal_prob(const Ensemble<B>& ens, std::size_t compartment, Property prop) {
  if (compartment != 1 && compartment != 2) throw std::out_of_range("marginal_prob: compartment");
  return ens.probability([&](const B& b) {
    return (compartment == 1 ? b.compartment1() : b.compartment2()).has(prop);
  });
}

/// Region measures K1..K8 of the compartment-1 population over properties A, B, C.
///   K1 A~B~C  K2 AB~C  K3 ABC  K4 A~BC  K5 ~AB~C  K6 ~ABC  K7 ~A~BC  K8 ~A~B~C
struct VennCounts {
  std::array<Rational, 8> regions{};

  /// 1-based, matching the K index.
  const Rational& k(std::size_t index) const { return regions.at(index - 1); }
  Rational total() const {
    return std::accumulate(regions.begin(), regions.end(), Rational(0));
  }
};

/// K index (1..8) of an attribute triple.
constexpr std::size_t venn_region(const AttributeTriple& t) noexcept {
  const bool a = t.has(Property::dark), b = t.has(Property::round), c = t.has(Property::swiss);
  if (a) {
    if (b) return c ? 3 : 2;
    return c ? 4 : 1;
  }
  if (b) return c ? 6 : 5;
  return c ? 7 : 8;
}

template <PairBoxing B>
VennCounts venn_counts(const Ensemble<B>& ens) {
  VennCounts out;
  for (const auto& e : ens.entries()) out.regions[venn_region(e.boxing.compartment1()) - 1] += e.weight;
  return out;
}

enum class Source { exact, sampled };

inline std::string to_string(Source s) { return s == Source::exact ? "exact" : "sampled"; }

/// p(A,B), p(B,C), p(A,C) and the Bell comparison p(A,B) + p(B,C) >= p(A,C).
template <class P>
struct CorrelationReport {
  P p_ab{};
  P p_bc{};
  P p_ac{};
  P bell_lhs{};
  bool satisfied = true;
  Source source = Source::exact;
};

template <PairBoxing B>
CorrelationReport<Rational> bell_check(const Ensemble<B>& ens) {
  CorrelationReport<Rational> r;
  r.p_ab = correlation_prob(ens, Property::dark, Property::round);
  r.p_bc = correlation_prob(ens, Property::round, Property::swiss);
  r.p_ac = correlation_prob(ens, Property::dark, Property::swiss);
  r.bell_lhs = r.p_ab + r.p_bc;
  r.satisfied = r.bell_lhs >= r.p_ac;
  r.source = Source::exact;
  return r;
}

struct ParityReport {
  std::optional<Sign> constant;  // set when every boxing in the support agrees
  Rational p_plus{0};
  Rational p_minus{0};
};

inline ParityReport parity_product(const Ensemble<GhzBoxing>& ens, ParityPattern pattern) {
  ParityReport r;
  r.p_plus = ens.probability([&](const GhzBoxing& b) { return b.product(pattern) == Sign::plus; });
  r.p_minus = Rational(1) - r.p_plus;
  if (r.p_minus == Rational(0)) r.constant = Sign::plus;
  if (r.p_plus == Rational(0)) r.constant = Sign::minus;
  return r;
}

/// P(compartment i, 0-based, is dark / round / Swiss).
inline Rational ghz_marginal_prob(const Ensemble<GhzBoxing>& ens, std::size_t compartment, Property prop) {
  if (compartment > 2) throw std::out_of_range("ghz_marginal_prob: compartment");
  return ens.probability([&](const GhzBoxing& b) {
    switch (prop) {
      case Property::dark: return b.x(compartment) == Sign::plus;
      case Property::round: return b.y(compartment) == Sign::plus;
      case Property::swiss: return b.swiss() == Sign::plus;
    }
    return false;
  });
}

/// One deterministic singlet boxing with its indicator-level Bell terms.
struct SingletVertex {
  AttributeTriple compartment1;
  int ab = 0;
  int bc = 0;
  int ac = 0;
  int slack() const noexcept { return ab + bc - ac; }
};

struct SingletLhvCertificate {
  std::vector<SingletVertex> vertices;
  int min_slack = 0;
  std::vector<std::size_t> tight;  // indices into `vertices` attaining min_slack
  bool all_satisfied = false;
  CorrelationReport<Rational> uniform_mixture;
};

/// Every deterministic compartment-1 assignment (compartment 2 forced by
/// complementation). Bell's expression is linear in the weights, so a
/// non-negative minimum over vertices covers every mixture.
inline SingletLhvCertificate enumerate_singlet_lhv() {
  SingletLhvCertificate cert;
  for (unsigned i = 0; i < 8; ++i) {
    const SingletBoxing b(AttributeTriple::from_index(i));
    const auto c1 = b.compartment1(), c2 = b.compartment2();
    cert.vertices.push_back({c1, c1.has(Property::dark) && c2.has(Property::round),
                             c1.has(Property::round) && c2.has(Property::swiss),
                             c1.has(Property::dark) && c2.has(Property::swiss)});
  }
  cert.min_slack = std::min_element(cert.vertices.begin(), cert.vertices.end(), [](auto& a, auto& b) {
                     return a.slack() < b.slack();
                   })->slack();
  for (std::size_t i = 0; i < cert.vertices.size(); ++i) {
    if (cert.vertices[i].slack() == cert.min_slack) cert.tight.push_back(i);
  }
  cert.all_satisfied = cert.min_slack >= 0;
  cert.uniform_mixture = bell_check(build_singlet_ensemble());
  return cert;
}

struct GhzLhvCertificate {
  std::size_t total = 0;
  std::vector<GhzAssignment> survivors;
  bool all_xxx_plus = false;
  bool matches_designed = false;
};

/// All 2^6 type/shape assignments filtered by the three parity constraints.
inline GhzLhvCertificate enumerate_ghz_lhv() {
  GhzLhvCertificate cert;
  for (unsigned bits = 0; bits < 64; ++bits) {
    GhzAssignment g;
    for (std::size_t i = 0; i < 3; ++i) {
      g.x[i] = (bits >> (5 - i)) & 1U ? Sign::minus : Sign::plus;
      g.y[i] = (bits >> (2 - i)) & 1U ? Sign::minus : Sign::plus;
    }
    ++cert.total;
    if (g.satisfies_parity_constraints()) cert.survivors.push_back(g);
  }
  cert.all_xxx_plus = std::all_of(cert.survivors.begin(), cert.survivors.end(),
                                  [](const GhzAssignment& g) { return g.product(ParityPattern::xxx) == Sign::plus; });
  std::vector<GhzAssignment> designed;
  for (const auto& b : designed_ghz_boxings()) designed.push_back(b.assignment());
  std::vector<GhzAssignment> found = cert.survivors;
  std::sort(designed.begin(), designed.end());
  std::sort(found.begin(), found.end());
  cert.matches_designed = designed == found;
  return cert;
}

}  // namespace qchoc
