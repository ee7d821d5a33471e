#include <bit>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "uqbench/models.hpp"

// Versioned model persistence. Doubles are serialized as the hex of their
// IEEE-754 bit pattern so round-trips are bit-exact.

namespace uqbench {
namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

std::string double_to_hex(double v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
  return buf;
}

double hex_to_double(const std::string& s) {
  return std::bit_cast<double>(
      static_cast<std::uint64_t>(std::stoull(s, nullptr, 16)));
}

json encode_matrix(const Eigen::MatrixXd& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<std::string> data;
  data.reserve(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      data.push_back(double_to_hex(m(i, c)));
    }
  }
  j["data"] = std::move(data);
  return j;
}

Eigen::MatrixXd decode_matrix(const json& j) {
  Eigen::MatrixXd m(j.at("rows").get<Eigen::Index>(),
                    j.at("cols").get<Eigen::Index>());
  const auto& data = j.at("data");
  std::size_t p = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(i, c) = hex_to_double(data.at(p++).get<std::string>());
    }
  }
  return m;
}

json encode_vector(const Eigen::VectorXd& v) {
  return encode_matrix(v);
}

Eigen::VectorXd decode_vector(const json& j) {
  return decode_matrix(j).col(0);
}

json encode_mlp_params(const MlpParams& p) {
  return json{{"w1", encode_matrix(p.w1)},
              {"b1", encode_vector(p.b1)},
              {"w2", encode_matrix(p.w2)},
              {"b2", encode_vector(p.b2)}};
}

MlpParams decode_mlp_params(const json& j) {
  return {decode_matrix(j.at("w1")), decode_vector(j.at("b1")),
          decode_matrix(j.at("w2")), decode_vector(j.at("b2"))};
}

}  // namespace

void save_model(const Predictor& model, const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["model"] = model.name();
  if (const auto* lr = dynamic_cast<const LogisticRegression*>(&model)) {
    j["params"] = encode_vector(lr->params());
  } else if (const auto* mlp = dynamic_cast<const Mlp*>(&model)) {
    j["hidden"] = mlp->config().hidden;
    j["params"] = encode_mlp_params(mlp->params());
  } else if (const auto* ens = dynamic_cast<const DeepEnsemble*>(&model)) {
    json members = json::array();
    for (const Mlp& m : ens->members()) {
      members.push_back(encode_mlp_params(m.params()));
    }
    j["hidden"] = ens->members().front().config().hidden;
    j["members"] = std::move(members);
  } else {
    throw std::invalid_argument("save_model: unsupported model type");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot write " + path);
  out << j.dump(2) << "\n";
}

std::unique_ptr<Predictor> load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  json j = json::parse(in);
  if (j.at("format_version").get<int>() != kFormatVersion) {
    throw std::runtime_error("load_model: unsupported format version");
  }
  const std::string kind = j.at("model").get<std::string>();
  if (kind == "logistic") {
    auto m = std::make_unique<LogisticRegression>();
    m->set_params(decode_vector(j.at("params")));
    return m;
  }
  if (kind == "mlp") {
    MlpConfig cfg;
    cfg.hidden = j.at("hidden").get<int>();
    auto m = std::make_unique<Mlp>(cfg);
    m->set_params(decode_mlp_params(j.at("params")));
    return m;
  }
  if (kind == "deep_ensemble") {
    MlpConfig cfg;
    cfg.hidden = j.at("hidden").get<int>();
    const auto& members = j.at("members");
    auto m = std::make_unique<DeepEnsemble>(
        static_cast<int>(members.size()), cfg);
    for (std::size_t i = 0; i < members.size(); ++i) {
      m->members()[i].set_params(decode_mlp_params(members[i]));
    }
    return m;
  }
  throw std::runtime_error("load_model: unknown model kind '" + kind + "'");
}

}  // namespace uqbench
