// quantum.hpp
// Dense state-vector machinery for one to three spin-1/2 sites: the singlet
// and GHZ states, arbitrary-axis projective measurement, partial traces and
// product-observable expectations.
//
// Basis convention: site 1 is the most significant bit of the amplitude
// index; bit value 0 is spin up along z, 1 is spin down.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qchoc {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Matrix2 = Eigen::Matrix2cd;

inline constexpr double kExactTol = 1e-12;
inline constexpr std::size_t kMaxSites = 3;

/// Measurement outcome sign; plus is the projection onto |n+>.
enum class Sign : int { minus = -1, plus = 1 };

constexpr int to_int(Sign s) noexcept { return static_cast<int>(s); }
constexpr Sign operator-(Sign s) noexcept { return s == Sign::plus ? Sign::minus : Sign::plus; }
constexpr Sign operator*(Sign a, Sign b) noexcept { return a == b ? Sign::plus : Sign::minus; }
constexpr char to_char(Sign s) noexcept { return s == Sign::plus ? '+' : '-'; }

/// A spin measurement direction on the Bloch sphere.
///
/// Angles outside theta in [0, pi], phi in [0, 2 pi) are folded back onto the
/// same physical direction at construction.
class MeasurementAxis {
public:
  MeasurementAxis() = default;
  MeasurementAxis(double theta, double phi) {
    if (!std::isfinite(theta) || !std::isfinite(phi)) {
      throw std::invalid_argument("MeasurementAxis: angles must be finite");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    theta = std::fmod(theta, two_pi);
    if (theta < 0.0) theta += two_pi;
    if (theta > std::numbers::pi) {
      theta = two_pi - theta;
      phi += std::numbers::pi;
    }
    phi = std::fmod(phi, two_pi);
    if (phi < 0.0) phi += two_pi;
    if (phi >= two_pi) phi = 0.0;
    theta_ = theta;
    phi_ = phi;
  }

  static MeasurementAxis x() { return {std::numbers::pi / 2, 0.0}; }
  static MeasurementAxis y() { return {std::numbers::pi / 2, std::numbers::pi / 2}; }
  static MeasurementAxis z() { return {0.0, 0.0}; }
  /// Direction in the xz-plane at polar angle theta.
  static MeasurementAxis xz(double theta) { return {theta, 0.0}; }

  double theta() const noexcept { return theta_; }
  double phi() const noexcept { return phi_; }

  Eigen::Vector3d direction() const {
    return {std::sin(theta_) * std::cos(phi_), std::sin(theta_) * std::sin(phi_), std::cos(theta_)};
  }

  /// n . sigma as a 2x2 matrix.
  Matrix2 spin_operator() const {
    const Eigen::Vector3d n = direction();
    Matrix2 m;
    m << Complex(n.z(), 0.0), Complex(n.x(), -n.y()),
         Complex(n.x(), n.y()), Complex(-n.z(), 0.0);
    return m;
  }

  /// Projector onto the eigenspace of n . sigma with eigenvalue `s`.
  Matrix2 projector(Sign s) const {
    return 0.5 * (Matrix2::Identity() + static_cast<double>(to_int(s)) * spin_operator());
  }

private:
  double theta_ = 0.0;
  double phi_ = 0.0;
};

class DensityMatrix;

/// Normalized pure state of 1 to 3 sites.
class PureState {
public:
  PureState(std::size_t num_sites, Vector amplitudes)
      : num_sites_(num_sites), amplitudes_(std::move(amplitudes)) {
    if (num_sites_ < 1 || num_sites_ > kMaxSites) {
      throw std::invalid_argument("PureState: num_sites must be in [1, 3]");
    }
    if (static_cast<std::size_t>(amplitudes_.size()) != (std::size_t{1} << num_sites_)) {
      throw std::invalid_argument("PureState: amplitude count must be 2^num_sites");
    }
    for (Eigen::Index i = 0; i < amplitudes_.size(); ++i) {
      if (!std::isfinite(amplitudes_[i].real()) || !std::isfinite(amplitudes_[i].imag())) {
        throw std::invalid_argument("PureState: non-finite amplitude");
      }
    }
    if (std::abs(amplitudes_.squaredNorm() - 1.0) > kExactTol) {
      throw std::invalid_argument("PureState: squared norm differs from 1");
    }
  }

  std::size_t num_sites() const noexcept { return num_sites_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }

  /// |a> (x) |b>, with `a` occupying the more significant sites.
  friend PureState tensor(const PureState& a, const PureState& b) {
    Vector out(static_cast<Eigen::Index>(a.dim() * b.dim()));
    for (std::size_t i = 0; i < a.dim(); ++i) {
      for (std::size_t j = 0; j < b.dim(); ++j) {
        out[static_cast<Eigen::Index>(i * b.dim() + j)] = a[i] * b[j];
      }
    }
    return {a.num_sites() + b.num_sites(), std::move(out)};
  }

private:
  std::size_t num_sites_;
  Vector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityMatrix {
public:
  explicit DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
    const auto n = entries_.rows();
    if (n == 0 || n != entries_.cols() || (n & (n - 1)) != 0) {
      throw std::invalid_argument("DensityMatrix: must be square with power-of-two dimension");
    }
    if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > kExactTol) {
      throw std::invalid_argument("DensityMatrix: not Hermitian");
    }
    if (std::abs(entries_.trace() - Complex(1.0, 0.0)) > kExactTol) {
      throw std::invalid_argument("DensityMatrix: trace differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(entries_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10) {
      throw std::invalid_argument("DensityMatrix: negative eigenvalue");
    }
  }

  static DensityMatrix from_pure(const PureState& s) {
    return DensityMatrix(s.amplitudes() * s.amplitudes().adjoint());
  }
  static DensityMatrix maximally_mixed(std::size_t dim) {
    return DensityMatrix(Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)) /
                         static_cast<double>(dim));
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const Matrix& entries() const noexcept { return entries_; }
  Complex operator()(std::size_t r, std::size_t c) const {
    return entries_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

private:
  Matrix entries_;
};

inline PureState basis_state(std::size_t num_sites, std::size_t index) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(std::size_t{1} << num_sites));
  if (index >= static_cast<std::size_t>(v.size())) throw std::out_of_range("basis_state: index");
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return {num_sites, std::move(v)};
}

/// Eigenstates of n . sigma with the e^{-+i phi/2} phase convention:
///   |n+> = ( e^{-i phi/2} cos(theta/2),  e^{i phi/2} sin(theta/2) )
///   |n-> = (-e^{-i phi/2} sin(theta/2),  e^{i phi/2} cos(theta/2) )
inline std::pair<PureState, PureState> axis_eigenstates(const MeasurementAxis& axis) {
  const Complex lead = std::polar(1.0, -axis.phi() / 2.0);
  const Complex trail = std::polar(1.0, axis.phi() / 2.0);
  const double c = std::cos(axis.theta() / 2.0);
  const double s = std::sin(axis.theta() / 2.0);
  Vector plus(2), minus(2);
  plus << lead * c, trail * s;
  minus << -lead * s, trail * c;
  return {PureState(1, std::move(plus)), PureState(1, std::move(minus))};
}

inline PureState axis_eigenstate(const MeasurementAxis& axis, Sign s) {
  auto [plus, minus] = axis_eigenstates(axis);
  return s == Sign::plus ? plus : minus;
}

/// (|up down> - |down up>) / sqrt 2
inline PureState singlet_state() {
  Vector v(4);
  v << 0.0, std::numbers::sqrt2 / 2.0, -std::numbers::sqrt2 / 2.0, 0.0;
  return {2, std::move(v)};
}

/// (|up up up> - |down down down>) / sqrt 2
inline PureState ghz_state() {
  Vector v = Vector::Zero(8);
  v[0] = std::numbers::sqrt2 / 2.0;
  v[7] = -std::numbers::sqrt2 / 2.0;
  return {3, std::move(v)};
}

namespace detail {

inline std::size_t site_bit(std::size_t num_sites, std::size_t site) {
  // site is 1-based; site 1 is the most significant bit
  return num_sites - site;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <class Factor>
Matrix kron_all(std::span<const Factor> factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, Matrix(f));
  return out;
}

inline void check_sites(const PureState& state, std::size_t count, const char* what) {
  if (count != state.num_sites()) {
    throw std::invalid_argument(std::string(what) + ": factor count " + std::to_string(count) +
                                " does not match state with " + std::to_string(state.num_sites()) +
                                " sites");
  }
}

}  // namespace detail

/// Reduced density matrix of the single site `keep_site` (1-based).
inline DensityMatrix partial_trace(const PureState& state, std::size_t keep_site) {
  const std::size_t n = state.num_sites();
  if (n < 2) throw std::invalid_argument("partial_trace: state needs at least 2 sites");
  if (keep_site < 1 || keep_site > n) {
    throw std::out_of_range("partial_trace: site " + std::to_string(keep_site) + " out of range");
  }
  const std::size_t bit = detail::site_bit(n, keep_site);
  Matrix rho = Matrix::Zero(2, 2);
  for (std::size_t i = 0; i < state.dim(); ++i) {
    for (std::size_t j = 0; j < state.dim(); ++j) {
      // the traced-out sites must agree between bra and ket
      if (((i ^ j) & ~(std::size_t{1} << bit)) != 0) continue;
      rho((i >> bit) & 1U, (j >> bit) & 1U) += state[i] * std::conj(state[j]);
    }
  }
  return DensityMatrix(std::move(rho));
}

/// One projective measurement on one site: axis plus the observed sign.
struct LocalOutcome {
  MeasurementAxis axis;
  Sign sign = Sign::plus;
};

/// Per-site outcomes; std::nullopt leaves a site unmeasured (marginal).
using OutcomeSpec = std::vector<std::optional<LocalOutcome>>;

/// Born-rule probability of a joint (possibly partial) outcome pattern.
inline double joint_outcome_prob(const PureState& state, const OutcomeSpec& outcomes) {
  detail::check_sites(state, outcomes.size(), "joint_outcome_prob");
  std::vector<Matrix2> factors;
  factors.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    factors.push_back(o ? o->axis.projector(o->sign) : Matrix2::Identity());
  }
  const Matrix proj = detail::kron_all<Matrix2>(factors);
  const Complex p = state.amplitudes().dot(proj * state.amplitudes());
  return std::max(0.0, p.real());
}

/// Convenience form: every site measured.
inline double joint_outcome_prob(const PureState& state, std::span<const MeasurementAxis> axes,
                                 std::span<const Sign> signs) {
  if (axes.size() != signs.size()) throw std::invalid_argument("joint_outcome_prob: axes/signs size");
  OutcomeSpec spec;
  for (std::size_t i = 0; i < axes.size(); ++i) spec.push_back(LocalOutcome{axes[i], signs[i]});
  return joint_outcome_prob(state, spec);
}

/// Tensor product of per-site spin operators; std::nullopt is the identity.
using ProductObservable = std::vector<std::optional<MeasurementAxis>>;

/// <state| obs |state>. Throws std::domain_error if the imaginary part exceeds 1e-12.
inline double product_expectation(const PureState& state, const ProductObservable& obs) {
  detail::check_sites(state, obs.size(), "product_expectation");
  std::vector<Matrix2> factors;
  factors.reserve(obs.size());
  for (const auto& f : obs) factors.push_back(f ? f->spin_operator() : Matrix2::Identity());
  const Matrix op = detail::kron_all<Matrix2>(factors);
  const Complex e = state.amplitudes().dot(op * state.amplitudes());
  if (std::abs(e.imag()) > kExactTol) {
    throw std::domain_error("product_expectation: non-real expectation value");
  }
  return e.real();
}

/// Probability of an ordered sequence of single-site projective outcomes,
/// collapsing and renormalizing after each step.
inline double sequential_measure_prob(const DensityMatrix& initial, std::span<const LocalOutcome> steps) {
  if (initial.dim() != 2) throw std::invalid_argument("sequential_measure_prob: needs a 1-site state");
  // Below this a branch is treated as impossible; renormalizing would only amplify rounding noise.
  constexpr double kZeroBranch = 1e-15;
  Matrix rho = initial.entries();
  double total = 1.0;
  for (const auto& step : steps) {
    const Matrix2 p = step.axis.projector(step.sign);
    Matrix next = p * rho * p;
    const double branch = next.trace().real();
    if (branch <= kZeroBranch) return 0.0;
    total *= branch;
    rho = next / branch;
  }
  return total;
}

/// Distance between the singlet and its rewrite in the eigenbasis of `axis`.
inline double singlet_invariance_residual(const MeasurementAxis& axis) {
  auto [plus, minus] = axis_eigenstates(axis);
  const Vector rewritten =
      (tensor(plus, minus).amplitudes() - tensor(minus, plus).amplitudes()) / std::numbers::sqrt2;
  return (singlet_state().amplitudes() - rewritten).norm();
}

struct OutcomeDistribution {
  double plus = 0.0;
  double minus = 0.0;
};

struct MixedVsSuperposition {
  OutcomeDistribution mixed;  // diag(1/2, 1/2)
  OutcomeDistribution phi;    // (|up> + |down>) / sqrt 2
};

inline MixedVsSuperposition mixed_vs_superposition_report(const MeasurementAxis& axis) {
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(2);
  Vector v(2);
  v << std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0;
  const DensityMatrix phi = DensityMatrix::from_pure(PureState(1, std::move(v)));
  auto dist = [&](const DensityMatrix& rho) {
    const LocalOutcome up{axis, Sign::plus};
    const LocalOutcome down{axis, Sign::minus};
    return OutcomeDistribution{sequential_measure_prob(rho, std::span(&up, 1)),
                               sequential_measure_prob(rho, std::span(&down, 1))};
  };
  return {dist(mixed), dist(phi)};
}

}  // namespace qchoc
