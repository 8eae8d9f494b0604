#include "rasch/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>

#include <json.hpp>

#include "rasch/errors.hpp"

namespace rasch {

namespace {

using nlohmann::json;

json parse(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
}

int require_int(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_integer()) {
    throw InvalidArgument(std::string("missing integer field '") + key + "'");
  }
  return doc[key].get<int>();
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  return in;
}

}  // namespace

ParameterFile read_parameters(std::istream& in) {
  const json doc = parse(in);
  if (!doc.is_object()) throw InvalidArgument("parameter file must be a JSON object");
  InteractionModel m(require_int(doc, "k"), require_int(doc, "d"));
  std::vector<double> beta(m.p(), 0.0);
  if (doc.contains("beta")) {
    if (!doc["beta"].is_object()) throw InvalidArgument("'beta' must be an object");
    for (const auto& [label, value] : doc["beta"].items()) {
      if (!value.is_number()) throw InvalidArgument("beta['" + label + "'] is not a number");
      beta[m.index_of(parse_subset_label(label, m.k()))] = value.get<double>();
    }
  }
  ParameterVector theta(m, std::move(beta));
  return {std::move(m), std::move(theta)};
}

ParameterFile read_parameters_file(const std::string& path) {
  auto in = open(path);
  return read_parameters(in);
}

std::string parameters_to_json(const ParameterVector& theta, const InteractionModel& m) {
  theta.check_model(m);
  json beta = json::object();
  for (std::size_t i = 0; i < m.p(); ++i) beta[subset_label(m.subset(i))] = theta.beta(i);
  return json{{"k", m.k()}, {"d", m.d()}, {"beta", beta}}.dump(2);
}

Design read_design(std::istream& in) {
  const json doc = parse(in);
  if (!doc.is_object()) throw InvalidArgument("design file must be a JSON object");
  const int k = require_int(doc, "k");
  if (!doc.contains("weights") || !doc["weights"].is_object()) {
    throw InvalidArgument("missing object field 'weights'");
  }
  std::map<Subset, double> weights;
  double total = 0.0;
  for (const auto& [bits, value] : doc["weights"].items()) {
    const BinarySetting x = BinarySetting::from_string(bits);
    if (x.k() != k) throw InvalidArgument("setting '" + bits + "' does not have length k");
    if (!value.is_number() || value.get<double>() < 0.0) {
      throw InvalidArgument("weight of '" + bits + "' must be a nonnegative number");
    }
    weights[x.mask()] += value.get<double>();
    total += value.get<double>();
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw InvalidArgument("design weights sum to " + std::to_string(total));
  }
  return Design::normalized(k, std::move(weights));
}

Design read_design_file(const std::string& path) {
  auto in = open(path);
  return read_design(in);
}

std::string design_to_json(const Design& w) {
  json weights = json::object();
  for (const auto& [x, weight] : w.weights()) weights[BinarySetting(w.k(), x).to_string()] = weight;
  return json{{"k", w.k()}, {"weights", weights}}.dump(2);
}

}  // namespace rasch
