#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace gradreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline void check_finite(const Eigen::Ref<const Vector>& v, const char* what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
  }
}

inline void check_dim(const Eigen::Ref<const Vector>& v, Index expected, const char* what) {
  if (v.size() != expected) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(expected) + ", got " +
                                std::to_string(v.size()));
  }
}

/// Regression data: rows of X are samples, y holds the targets.
struct Dataset {
  Matrix X;
  Vector y;

  Dataset(Matrix X_in, Vector y_in) : X(std::move(X_in)), y(std::move(y_in)) {
    if (X.rows() != y.size()) {
      throw std::invalid_argument("Dataset: X has " + std::to_string(X.rows()) +
                                  " rows but y has " + std::to_string(y.size()) +
                                  " entries");
    }
    if (!X.allFinite() || !y.allFinite()) {
      throw std::invalid_argument("Dataset: non-finite entries");
    }
  }

  Index n_samples() const { return X.rows(); }
  Index dim() const { return X.cols(); }
};

}  // namespace gradreg
