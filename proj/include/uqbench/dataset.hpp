#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace uqbench {

enum class ColumnKind { numeric, categorical };

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  // Categorical only: every category observed at fit time, in first-seen
  // order. Unseen categories at transform time map to an all-zero one-hot
  // block.
  std::vector<std::string> categories;
};

// One column of raw values. Exactly one of `numeric` / `values` is
// populated, depending on schema.kind.
struct Column {
  ColumnSchema schema;
  std::vector<double> numeric;
  std::vector<std::string> values;

  std::size_t size() const {
    return schema.kind == ColumnKind::numeric ? numeric.size() : values.size();
  }
};

// Immutable tabular dataset: feature columns plus binary labels. All split
// and task machinery operates on this unit.
class TabularDataset {
 public:
  TabularDataset() = default;
  TabularDataset(std::string name, std::vector<Column> columns,
                 std::vector<int> labels);

  const std::string& name() const { return name_; }
  std::size_t n_rows() const { return labels_.size(); }
  std::size_t n_features() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<int>& labels() const { return labels_; }

  std::optional<std::size_t> find_column(const std::string& name) const;

  // Row subset in the given index order (indices may repeat).
  TabularDataset subset(const std::vector<std::size_t>& indices,
                        const std::string& new_name = "") const;

  TabularDataset drop_column(const std::string& name) const;

 private:
  std::string name_;
  std::vector<Column> columns_;
  std::vector<int> labels_;
};

}  // namespace uqbench
