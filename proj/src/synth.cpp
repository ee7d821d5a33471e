#include "uqbench/synth.hpp"

#include <cmath>
#include <fstream>

#include "uqbench/rng.hpp"

namespace uqbench {

GaussianSample make_two_gaussians(std::size_t n, double separation,
                                  std::uint64_t seed) {
  Rng rng(seed);
  GaussianSample out;
  out.X.resize(n, 2);
  out.y.resize(n);
  const double half = separation / 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = rng.uniform() < 0.5 ? 0 : 1;
    const double mu = cls ? half : -half;
    out.X(i, 0) = mu + rng.normal();
    out.X(i, 1) = mu + rng.normal();
    out.y[i] = cls;
  }
  return out;
}

TabularDataset make_synthetic_adult(std::size_t n_rows, std::uint64_t seed) {
  Rng rng(seed);

  Column age, education, hours, capital_gain, savings_rate, commute_km;
  Column gender, workclass, occupation;
  age.schema = {"age", ColumnKind::numeric, {}};
  education.schema = {"education_num", ColumnKind::numeric, {}};
  hours.schema = {"hours_per_week", ColumnKind::numeric, {}};
  capital_gain.schema = {"capital_gain", ColumnKind::numeric, {}};
  savings_rate.schema = {"savings_rate", ColumnKind::numeric, {}};
  commute_km.schema = {"commute_km", ColumnKind::numeric, {}};
  gender.schema = {"gender", ColumnKind::categorical, {"male", "female"}};
  workclass.schema = {"workclass",
                      ColumnKind::categorical,
                      {"private", "government", "self_employed"}};
  occupation.schema = {"occupation",
                       ColumnKind::categorical,
                       {"craft", "sales", "clerical", "managerial", "service"}};

  std::vector<int> labels;
  for (std::size_t i = 0; i < n_rows; ++i) {
    const bool female = rng.uniform() < 0.25;

    const double a = 40.0 + 12.0 * rng.normal();
    const double edu = std::round(std::clamp(10.0 + 2.5 * rng.normal(), 1.0, 16.0));
    const double h = std::clamp(42.0 + 9.0 * rng.normal(), 5.0, 90.0);
    const double gain =
        rng.uniform() < 0.2 ? std::exp(6.0 + 1.0 * rng.normal()) : 0.0;
    // Gender-shifted, label-irrelevant features.
    const double savings = female ? 0.45 + 0.10 * rng.normal()
                                  : 0.30 + 0.10 * rng.normal();
    const double commute =
        female ? 11.0 + 5.0 * rng.normal() : 21.0 + 8.0 * rng.normal();

    const double wc_draw = rng.uniform();
    const std::string wc = wc_draw < 0.7 ? "private"
                           : wc_draw < 0.85 ? "government"
                                            : "self_employed";
    const double oc_draw = rng.uniform();
    std::string oc;
    if (female) {
      oc = oc_draw < 0.10   ? "craft"
           : oc_draw < 0.30 ? "sales"
           : oc_draw < 0.65 ? "clerical"
           : oc_draw < 0.80 ? "managerial"
                            : "service";
    } else {
      oc = oc_draw < 0.35   ? "craft"
           : oc_draw < 0.55 ? "sales"
           : oc_draw < 0.65 ? "clerical"
           : oc_draw < 0.85 ? "managerial"
                            : "service";
    }

    const double logit = -3.4 + 0.28 * edu + 0.045 * (h - 40.0) +
                         0.030 * (a - 40.0) + 0.6 * (gain > 0.0 ? 1.0 : 0.0);
    const double p = 1.0 / (1.0 + std::exp(-logit));
    labels.push_back(rng.uniform() < p ? 1 : 0);

    age.numeric.push_back(std::round(a * 10.0) / 10.0);
    education.numeric.push_back(edu);
    hours.numeric.push_back(std::round(h * 10.0) / 10.0);
    capital_gain.numeric.push_back(std::round(gain));
    savings_rate.numeric.push_back(std::round(savings * 1000.0) / 1000.0);
    commute_km.numeric.push_back(std::round(commute * 10.0) / 10.0);
    gender.values.push_back(female ? "female" : "male");
    workclass.values.push_back(wc);
    occupation.values.push_back(oc);
  }

  std::vector<Column> cols = {age,          education, hours,
                              capital_gain, savings_rate, commute_km,
                              gender,       workclass, occupation};
  return TabularDataset("synthetic_adult", std::move(cols), std::move(labels));
}

void write_csv(const TabularDataset& data, const std::string& path,
               const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot write " + path);

  for (const Column& c : data.columns()) out << c.schema.name << ",";
  out << label_column << "\n";

  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    for (const Column& c : data.columns()) {
      if (c.schema.kind == ColumnKind::numeric) {
        double v = c.numeric[r];
        if (v == std::floor(v) && std::abs(v) < 1e15) {
          out << static_cast<long long>(v);
        } else {
          out << v;
        }
      } else {
        out << c.values[r];
      }
      out << ",";
    }
    out << data.labels()[r] << "\n";
  }
}

}  // namespace uqbench
