#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace roundtax {

/// One fixed-effect dimension: a dense level index (0..levels-1) for every row.
struct FixedEffectGrouping {
  std::string name;
  std::vector<int> level;
  int levels = 0;
};

/// Densifies arbitrary integer keys into levels, numbered in order of first appearance.
FixedEffectGrouping make_grouping(std::string name, std::span<const std::int64_t> keys);

struct AbsorptionSettings {
  double tolerance = 1e-10;  // largest cell mean left in any grouping
  int max_sweeps = 10'000;
};

class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(int sweeps)
      : std::runtime_error("fixed-effect demeaning did not converge after " + std::to_string(sweeps) + " sweeps"),
        sweeps_(sweeps) {}
  int sweeps() const { return sweeps_; }

 private:
  int sweeps_;
};

class RankDeficientError : public std::runtime_error {
 public:
  explicit RankDeficientError(const std::string& regressor)
      : std::runtime_error("regressor '" + regressor + "' is collinear with the fixed effects or earlier regressors"),
        regressor_(regressor) {}
  const std::string& regressor() const { return regressor_; }

 private:
  std::string regressor_;
};

/// Subtracts the per-level mean of every column, for one grouping. Returns the
/// largest absolute mean removed. Rows are visited in order, so the result is
/// reproducible bit for bit.
template <typename Derived>
double demean_once(Eigen::MatrixBase<Derived>& columns, const FixedEffectGrouping& grouping) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = columns.rows();
  std::vector<Scalar> sum(static_cast<std::size_t>(grouping.levels));
  std::vector<std::int64_t> count(static_cast<std::size_t>(grouping.levels), 0);
  for (Eigen::Index i = 0; i < n; ++i) ++count[static_cast<std::size_t>(grouping.level[static_cast<std::size_t>(i)])];

  double largest = 0.0;
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    std::fill(sum.begin(), sum.end(), Scalar(0));
    for (Eigen::Index i = 0; i < n; ++i) sum[static_cast<std::size_t>(grouping.level[static_cast<std::size_t>(i)])] += columns(i, c);
    for (std::size_t g = 0; g < sum.size(); ++g) {
      if (count[g] > 0) sum[g] /= static_cast<Scalar>(count[g]);
      largest = std::max(largest, static_cast<double>(std::abs(sum[g])));
    }
    for (Eigen::Index i = 0; i < n; ++i) columns(i, c) -= sum[static_cast<std::size_t>(grouping.level[static_cast<std::size_t>(i)])];
  }
  return largest;
}

/// Projects every column onto the orthogonal complement of all fixed-effect
/// indicators by alternating projections: sweep the groupings in order until a
/// full sweep removes no cell mean larger than the tolerance.
/// Returns the number of sweeps; throws ConvergenceError past max_sweeps.
template <typename Derived>
int absorb_fixed_effects(Eigen::MatrixBase<Derived>& columns, std::span<const FixedEffectGrouping> groupings,
                         const AbsorptionSettings& settings = {}) {
  for (const FixedEffectGrouping& g : groupings) {
    if (static_cast<Eigen::Index>(g.level.size()) != columns.rows()) {
      throw std::invalid_argument("grouping '" + g.name + "' does not match the number of rows");
    }
  }
  if (groupings.empty()) return 0;
  for (int sweep = 1; sweep <= settings.max_sweeps; ++sweep) {
    double largest = 0.0;
    for (const FixedEffectGrouping& g : groupings) largest = std::max(largest, demean_once(columns, g));
    if (largest <= settings.tolerance) return sweep;
  }
  throw ConvergenceError(settings.max_sweeps);
}

/// Degrees of freedom used by the absorbed fixed effects.
///
/// A grouping that is a coarsening of another included grouping adds nothing
/// (chains inside product-stores, say). Each remaining grouping after the first
/// loses one level to the common constant. Crossed groupings that split into
/// several disconnected components are not detected, which can overstate the
/// count slightly.
std::int64_t absorbed_degrees_of_freedom(std::span<const FixedEffectGrouping> groupings);

struct OlsFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd std_error;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd residuals;
  double sigma2 = 0.0;
  std::int64_t n = 0;
  std::int64_t residual_dof = 0;
};

/// Least squares through the normal equations X'X b = X'y with classical
/// homoskedastic standard errors, sigma^2 = RSS / (n - p - absorbed_dof).
///
/// Column j is rejected as collinear (RankDeficientError naming it) when its
/// Cholesky pivot falls below 1e-9 of `reference_sq_norms[j]`, the squared norm
/// of the column before any fixed effects were absorbed; defaults to the norm of X's column.
OlsFit ols_normal_equations(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::span<const std::string> names,
                            std::int64_t absorbed_dof = 0, std::span<const double> reference_sq_norms = {});

struct FixedEffectsFit {
  std::vector<std::string> names;  // regressors, without the intercept
  OlsFit ols;                      // coefficients for `names`
  double intercept = 0.0;
  double intercept_std_error = 0.0;  // reported only when there are no fixed effects
  int sweeps = 0;
  std::int64_t absorbed_dof = 0;
};

/// Regression of y on X with the given fixed effects absorbed. Without fixed
/// effects a constant column is added; with them the intercept is recovered as
/// mean(y) - mean(X) b.
FixedEffectsFit fit_fixed_effects(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                  std::span<const std::string> names,
                                  std::span<const FixedEffectGrouping> groupings,
                                  const AbsorptionSettings& settings = {});

}  // namespace roundtax
