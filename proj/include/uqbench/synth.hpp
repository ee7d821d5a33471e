#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "uqbench/dataset.hpp"

namespace uqbench {

// Two isotropic Gaussians in 2-D, one per class, equal priors. Used for
// conformal-validity checks where exchangeability holds by construction.
struct GaussianSample {
  Eigen::MatrixXd X;
  std::vector<int> y;
};
GaussianSample make_two_gaussians(std::size_t n, double separation,
                                  std::uint64_t seed);

// Census-style synthetic tabular dataset with a "gender" column suitable
// for the feature-value OoD protocol: female rows are shifted on features
// that carry no label signal, so feature-space anomaly scores see the
// shift while model confidences barely move. Label is a logistic function
// of education/hours/age/capital gain.
TabularDataset make_synthetic_adult(std::size_t n_rows, std::uint64_t seed);

// Writes a dataset back to CSV (header row, label column last).
void write_csv(const TabularDataset& data, const std::string& path,
               const std::string& label_column = "income");

}  // namespace uqbench
