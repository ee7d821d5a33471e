#include "uqbench/preprocess.hpp"

#include <cmath>

namespace uqbench {

Preprocessor Preprocessor::fit(const TabularDataset& train) {
  Preprocessor p;
  for (const Column& c : train.columns()) {
    FittedColumn fc;
    fc.schema = c.schema;
    if (c.schema.kind == ColumnKind::numeric) {
      const std::size_t n = c.numeric.size();
      double mean = 0.0;
      for (double v : c.numeric) {
        if (!std::isfinite(v)) {
          throw std::invalid_argument("non-finite value in column '" +
                                      c.schema.name + "'");
        }
        mean += v;
      }
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (double v : c.numeric) var += (v - mean) * (v - mean);
      var /= static_cast<double>(n);
      fc.mean = mean;
      fc.scale = var > 0.0 ? std::sqrt(var) : 1.0;
      p.width_ += 1;
    } else {
      p.width_ += c.schema.categories.size();
    }
    p.fitted_.push_back(std::move(fc));
  }
  return p;
}

Eigen::MatrixXd Preprocessor::transform(const TabularDataset& data) const {
  const std::size_t n = data.n_rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, width_);

  std::size_t offset = 0;
  for (const FittedColumn& fc : fitted_) {
    auto idx = data.find_column(fc.schema.name);
    if (!idx) {
      throw std::invalid_argument("transform: dataset lacks column '" +
                                  fc.schema.name + "'");
    }
    const Column& c = data.columns()[*idx];
    if (c.schema.kind != fc.schema.kind) {
      throw std::invalid_argument("transform: column '" + fc.schema.name +
                                  "' kind mismatch");
    }
    if (fc.schema.kind == ColumnKind::numeric) {
      for (std::size_t r = 0; r < n; ++r) {
        out(r, offset) = (c.numeric[r] - fc.mean) / fc.scale;
      }
      offset += 1;
    } else {
      const auto& cats = fc.schema.categories;
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < cats.size(); ++k) {
          if (c.values[r] == cats[k]) {
            out(r, offset + k) = 1.0;
            break;
          }
        }
      }
      offset += cats.size();
    }
  }
  return out;
}

}  // namespace uqbench
