#include "uqbench/splits.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "uqbench/rng.hpp"

namespace uqbench {
namespace {

bool matches_ood(const Column& col, std::size_t row, const SplitSpec& spec) {
  if (col.schema.kind == ColumnKind::categorical) {
    return spec.ood_values.count(col.values[row]) > 0;
  }
  for (const std::string& s : spec.ood_values) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() &&
        col.numeric[row] == v) {
      return true;
    }
  }
  return false;
}

// Integer partition sizes for the given ratios, largest remainder.
std::array<std::size_t, 3> allocate(std::size_t n,
                                    const std::array<double, 3>& ratios) {
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double q = ratios[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(q));
    frac[i] = q - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return frac[a] > frac[b]; });
  for (std::size_t r = 0; assigned < n; ++r, ++assigned) {
    ++sizes[order[r % 3]];
  }
  return sizes;
}

}  // namespace

OodSplit ood_split(const TabularDataset& data, const SplitSpec& spec) {
  auto idx = data.find_column(spec.feature);
  if (!idx) {
    throw std::invalid_argument("ood_split: no column named '" + spec.feature +
                                "'");
  }
  const Column& col = data.columns()[*idx];
  std::vector<std::size_t> in_rows, ood_rows;
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    (matches_ood(col, r, spec) ? ood_rows : in_rows).push_back(r);
  }
  if (ood_rows.empty()) {
    throw std::runtime_error("ood_split: empty OoD partition for feature '" +
                             spec.feature + "'");
  }
  if (in_rows.empty()) {
    throw std::runtime_error(
        "ood_split: empty in-distribution partition for feature '" +
        spec.feature + "'");
  }
  TabularDataset in_dist = data.subset(in_rows);
  TabularDataset ood = data.subset(ood_rows);
  if (spec.drop_feature) {
    in_dist = in_dist.drop_column(spec.feature);
    ood = ood.drop_column(spec.feature);
  }
  return {std::move(in_dist), std::move(ood)};
}

DataSplits make_splits(const TabularDataset& in_dist, const TabularDataset& ood,
                       const std::array<double, 3>& ratios,
                       std::uint64_t seed) {
  double sum = ratios[0] + ratios[1] + ratios[2];
  if (ratios[0] <= 0 || ratios[1] <= 0 || ratios[2] <= 0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument(
        "make_splits: ratios must be positive and sum to 1");
  }

  std::array<std::vector<std::size_t>, 3> parts;  // train, cal, test
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < in_dist.n_rows(); ++r) {
      if (in_dist.labels()[r] == cls) rows.push_back(r);
    }
    if (rows.empty()) continue;
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(cls)));
    rng.shuffle(rows);
    auto sizes = allocate(rows.size(), ratios);
    std::size_t pos = 0;
    for (int p = 0; p < 3; ++p) {
      for (std::size_t i = 0; i < sizes[p]; ++i) {
        parts[p].push_back(rows[pos++]);
      }
    }
  }
  for (int p = 0; p < 3; ++p) {
    if (parts[p].empty()) {
      throw std::runtime_error("make_splits: a partition would be empty");
    }
    std::sort(parts[p].begin(), parts[p].end());
  }
  TabularDataset train = in_dist.subset(parts[0]);
  {
    bool any0 = false, any1 = false;
    for (int y : train.labels()) (y ? any1 : any0) = true;
    if (!any0 || !any1) {
      throw std::runtime_error("make_splits: a class is absent from train");
    }
  }
  return {std::move(train), in_dist.subset(parts[1]), in_dist.subset(parts[2]),
          ood, seed};
}

TabularDataset bootstrap(const TabularDataset& data, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = data.n_rows();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = rng.index(n);
  return data.subset(idx);
}

}  // namespace uqbench
