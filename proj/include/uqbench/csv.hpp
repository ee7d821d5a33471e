#pragma once

#include <map>
#include <string>

#include "uqbench/dataset.hpp"

namespace uqbench {

// How raw label values are mapped to {0, 1}.
struct LabelRule {
  enum class Mode {
    // Exactly two distinct values required; positive is "1" if the values
    // are {0,1}, otherwise the larger value (numeric compare when both
    // parse, lexicographic otherwise).
    auto_two,
    // One-vs-all on an explicit positive value.
    positive_value,
    // One-vs-all using the majority class as positive.
    majority,
  };
  Mode mode = Mode::auto_two;
  std::string positive;  // positive_value only
};

// Loads a CSV with a header row. Column kinds are inferred (numeric when
// every value parses as a number) unless overridden in schema_hints.
// Missing values (empty, "?", "NA") are rejected.
TabularDataset load_csv(const std::string& path,
                        const std::string& label_column,
                        const LabelRule& rule = {},
                        const std::map<std::string, ColumnKind>& schema_hints = {});

}  // namespace uqbench
