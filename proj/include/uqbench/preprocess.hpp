#pragma once

#include <Eigen/Dense>

#include "uqbench/dataset.hpp"

namespace uqbench {

// Fit/apply separable feature preprocessor: numeric columns are
// standardized with train statistics, categorical columns are one-hot
// encoded with train categories. Fitted state is immutable; transform
// never updates statistics.
class Preprocessor {
 public:
  // Fit on the training partition only.
  static Preprocessor fit(const TabularDataset& train);

  // Encodes a dataset with the fitted schema. Columns are matched by name
  // and kind; unseen categories encode as an all-zero block.
  Eigen::MatrixXd transform(const TabularDataset& data) const;

  std::size_t width() const { return width_; }

 private:
  struct FittedColumn {
    ColumnSchema schema;
    double mean = 0.0;
    double scale = 1.0;  // 1.0 when the train column has zero variance
  };
  std::vector<FittedColumn> fitted_;
  std::size_t width_ = 0;
};

}  // namespace uqbench
