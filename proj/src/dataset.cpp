#include "uqbench/dataset.hpp"

namespace uqbench {

TabularDataset::TabularDataset(std::string name, std::vector<Column> columns,
                               std::vector<int> labels)
    : name_(std::move(name)),
      columns_(std::move(columns)),
      labels_(std::move(labels)) {
  if (labels_.empty()) {
    throw std::invalid_argument("dataset '" + name_ + "' has no rows");
  }
  for (int y : labels_) {
    if (y != 0 && y != 1) {
      throw std::invalid_argument("dataset '" + name_ +
                                  "': labels must be binary");
    }
  }
  for (const Column& c : columns_) {
    if (c.size() != labels_.size()) {
      throw std::invalid_argument("dataset '" + name_ + "': column '" +
                                  c.schema.name + "' length mismatch");
    }
  }
}

std::optional<std::size_t> TabularDataset::find_column(
    const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].schema.name == name) return i;
  }
  return std::nullopt;
}

TabularDataset TabularDataset::subset(const std::vector<std::size_t>& indices,
                                      const std::string& new_name) const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (const Column& c : columns_) {
    Column out;
    out.schema = c.schema;
    if (c.schema.kind == ColumnKind::numeric) {
      out.numeric.reserve(indices.size());
      for (std::size_t i : indices) out.numeric.push_back(c.numeric.at(i));
    } else {
      out.values.reserve(indices.size());
      for (std::size_t i : indices) out.values.push_back(c.values.at(i));
    }
    cols.push_back(std::move(out));
  }
  std::vector<int> labels;
  labels.reserve(indices.size());
  for (std::size_t i : indices) labels.push_back(labels_.at(i));
  return TabularDataset(new_name.empty() ? name_ : new_name, std::move(cols),
                        std::move(labels));
}

TabularDataset TabularDataset::drop_column(const std::string& name) const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  bool found = false;
  for (const Column& c : columns_) {
    if (c.schema.name == name) {
      found = true;
      continue;
    }
    cols.push_back(c);
  }
  if (!found) {
    throw std::invalid_argument("drop_column: no column named '" + name + "'");
  }
  return TabularDataset(name_, std::move(cols), labels_);
}

}  // namespace uqbench
