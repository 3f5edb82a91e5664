#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "roundtax/econometrics/fixed_effects.hpp"

namespace roundtax::testing {

/// Least squares with every fixed effect written out as indicator columns
/// (intercept plus levels 1.. of each grouping), solved by column-pivoting QR.
/// Returns the coefficients of the first X.cols() regressors.
inline Eigen::VectorXd dummy_variable_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                          std::span<const FixedEffectGrouping> groupings) {
  Eigen::Index cols = X.cols() + 1;
  for (const auto& g : groupings) cols += g.levels - 1;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(X.rows(), cols);
  D.leftCols(X.cols()) = X;
  D.col(X.cols()).setOnes();
  Eigen::Index offset = X.cols() + 1;
  for (const auto& g : groupings) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const int level = g.level[static_cast<std::size_t>(i)];
      if (level > 0) D(i, offset + level - 1) = 1.0;
    }
    offset += g.levels - 1;
  }
  const Eigen::VectorXd b = D.colPivHouseholderQr().solve(y);
  return b.head(X.cols());
}

}  // namespace roundtax::testing
