#include "roundtax/econometrics/fixed_effects.hpp"

#include <unordered_map>

namespace roundtax {

FixedEffectGrouping make_grouping(std::string name, std::span<const std::int64_t> keys) {
  FixedEffectGrouping g{std::move(name), {}, 0};
  g.level.reserve(keys.size());
  std::unordered_map<std::int64_t, int> index;
  for (std::int64_t k : keys) {
    const auto [it, inserted] = index.emplace(k, g.levels);
    if (inserted) ++g.levels;
    g.level.push_back(it->second);
  }
  return g;
}

namespace {

/// True when every level of `fine` maps into a single level of `coarse`.
bool nests(const FixedEffectGrouping& coarse, const FixedEffectGrouping& fine) {
  std::vector<int> parent(static_cast<std::size_t>(fine.levels), -1);
  for (std::size_t i = 0; i < fine.level.size(); ++i) {
    int& p = parent[static_cast<std::size_t>(fine.level[i])];
    if (p == -1) {
      p = coarse.level[i];
    } else if (p != coarse.level[i]) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::int64_t absorbed_degrees_of_freedom(std::span<const FixedEffectGrouping> groupings) {
  std::int64_t dof = 0;
  int kept = 0;
  for (std::size_t a = 0; a < groupings.size(); ++a) {
    bool redundant = false;
    for (std::size_t b = 0; b < groupings.size() && !redundant; ++b) {
      if (a == b || !nests(groupings[a], groupings[b])) continue;
      // identical partitions: keep the first one listed
      redundant = groupings[a].levels < groupings[b].levels || b < a;
    }
    if (redundant) continue;
    dof += groupings[a].levels;
    ++kept;
  }
  return kept > 0 ? dof - (kept - 1) : 0;
}

OlsFit ols_normal_equations(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::span<const std::string> names,
                            std::int64_t absorbed_dof, std::span<const double> reference_sq_norms) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (y.size() != n) throw std::invalid_argument("ols: y and X row counts differ");
  if (static_cast<Eigen::Index>(names.size()) != p) throw std::invalid_argument("ols: one name per column required");

  const Eigen::MatrixXd xtx = X.transpose() * X;
  const Eigen::VectorXd xty = X.transpose() * y;

  // Unpivoted Cholesky, only to find the first column that adds no new direction.
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double pivot = xtx(j, j) - L.row(j).head(j).squaredNorm();
    const double reference = reference_sq_norms.empty() ? xtx(j, j) : reference_sq_norms[static_cast<std::size_t>(j)];
    if (!(pivot > 1e-9 * reference) || reference <= 0.0) throw RankDeficientError(names[static_cast<std::size_t>(j)]);
    L(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < p; ++i) {
      L(i, j) = (xtx(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
    }
  }

  OlsFit fit;
  fit.n = n;
  fit.residual_dof = n - p - absorbed_dof;
  if (fit.residual_dof <= 0) {
    throw std::domain_error("need more observations (" + std::to_string(n) + ") than estimated parameters (" +
                            std::to_string(p + absorbed_dof) + ")");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(xtx);
  fit.coef = llt.solve(xty);
  fit.residuals = y - X * fit.coef;
  fit.sigma2 = fit.residuals.squaredNorm() / static_cast<double>(fit.residual_dof);
  fit.covariance = fit.sigma2 * llt.solve(Eigen::MatrixXd::Identity(p, p));
  fit.std_error = fit.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  return fit;
}

FixedEffectsFit fit_fixed_effects(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                  std::span<const std::string> names,
                                  std::span<const FixedEffectGrouping> groupings,
                                  const AbsorptionSettings& settings) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  FixedEffectsFit out;
  out.names.assign(names.begin(), names.end());

  if (groupings.empty()) {
    Eigen::MatrixXd design(n, p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = X;
    std::vector<std::string> all{"intercept"};
    all.insert(all.end(), names.begin(), names.end());
    OlsFit fit = ols_normal_equations(design, y, all);
    out.intercept = fit.coef(0);
    out.intercept_std_error = fit.std_error(0);
    out.ols.coef = fit.coef.tail(p);
    out.ols.std_error = fit.std_error.tail(p);
    out.ols.covariance = fit.covariance.bottomRightCorner(p, p);
    out.ols.residuals = std::move(fit.residuals);
    out.ols.sigma2 = fit.sigma2;
    out.ols.n = fit.n;
    out.ols.residual_dof = fit.residual_dof;
    return out;
  }

  Eigen::MatrixXd work(n, p + 1);
  work.col(0) = y;
  work.rightCols(p) = X;
  std::vector<double> reference(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) reference[static_cast<std::size_t>(j)] = X.col(j).squaredNorm();

  out.sweeps = absorb_fixed_effects(work, groupings, settings);
  out.absorbed_dof = absorbed_degrees_of_freedom(groupings);
  out.ols = ols_normal_equations(work.rightCols(p), work.col(0), names, out.absorbed_dof, reference);
  out.intercept = y.mean() - X.colwise().mean().dot(out.ols.coef);
  return out;
}

}  // namespace roundtax
