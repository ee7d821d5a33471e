#pragma once

#include <array>
#include <set>
#include <string>

#include "uqbench/dataset.hpp"

namespace uqbench {

// Declares how a dataset is partitioned into in-distribution and OoD
// domains: rows whose `feature` value is in `ood_values` go out of
// distribution, and the feature itself is removed afterwards.
struct SplitSpec {
  std::string feature;
  std::set<std::string> ood_values;  // numeric columns: compared as numbers
  bool drop_feature = true;
};

struct OodSplit {
  TabularDataset in_dist;
  TabularDataset ood;
};

OodSplit ood_split(const TabularDataset& data, const SplitSpec& spec);

struct DataSplits {
  TabularDataset train;
  TabularDataset calibration;
  TabularDataset test;
  TabularDataset ood;
  std::uint64_t seed = 0;
};

// Deterministic, label-stratified partition of the in-distribution rows.
// Partition sizes follow the ratios per class by largest remainder.
DataSplits make_splits(const TabularDataset& in_dist, const TabularDataset& ood,
                       const std::array<double, 3>& ratios, std::uint64_t seed);

// N rows sampled with replacement, deterministic given seed.
TabularDataset bootstrap(const TabularDataset& data, std::uint64_t seed);

}  // namespace uqbench
