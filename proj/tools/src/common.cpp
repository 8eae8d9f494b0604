#include "common.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rasch/errors.hpp"
#include "rasch/format.hpp"

#ifndef RASCH_VERSION
#define RASCH_VERSION "unknown"
#endif

namespace rasch::cli {

namespace {

double parse_double(const std::string& text, const std::string& flag) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError(flag + ": '" + text + "' is not a number");
  }
  if (used != text.size() || !std::isfinite(value)) {
    throw UsageError(flag + ": '" + text + "' is not a finite number");
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

void collect_flags(const CLI::App* app, json& flags) {
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    const auto& results = opt->results();
    std::string name = opt->get_name();
    if (name.rfind("--", 0) == 0) name.erase(0, 2);
    if (results.size() == 1) {
      flags[name] = results.front();
    } else {
      flags[name] = results;
    }
  }
}

}  // namespace

void Run::emit(const std::string& text, const std::string& suffix) {
  if (out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  const std::string path = out_path + suffix;
  std::ofstream out(path);
  out << text;
  if (!out) throw Error("cannot write '" + path + "'");
  outputs_.push_back(path);
}

void Run::write_manifest(int exit_code) const {
  json flags = json::object();
  if (app_->get_parent() != nullptr) collect_flags(app_->get_parent(), flags);
  collect_flags(app_, flags);
  json manifest = {{"command", command_},
                   {"version", RASCH_VERSION},
                   {"inputs", inputs_},
                   {"flags", flags},
                   {"seed", seed ? json(*seed) : json(nullptr)},
                   {"outputs", outputs_},
                   {"exit_code", exit_code}};
  const std::string text = manifest.dump(2) + "\n";
  if (out_path.empty()) {
    std::cerr << text;
    return;
  }
  std::ofstream out(out_path + ".manifest.json");
  out << text;
}

void ModelOptions::add_to(CLI::App* app, bool with_parameters) {
  app->add_option("--k", k, "number of rules")->check(CLI::Range(1, kMaxEnumeratedRules));
  app->add_option("--d", d, "interaction order")->check(CLI::PositiveNumber);
  if (!with_parameters) return;
  auto* file = app->add_option("--params", params, "parameter JSON file");
  auto* sym = app->add_option("--symmetric", symmetric,
                              "symmetric point: s=<mu for single rules>,t=<mu for pairs>,...");
  auto* lam = app->add_option("--lambda", lambda, "mu_A = lambda for every single rule");
  auto* inline_beta =
      app->add_option("--beta", beta, "inline beta: '<subset>=<value>;...', e.g. '1=-2;2=-2'");
  file->excludes(sym)->excludes(lam)->excludes(inline_beta);
  sym->excludes(lam)->excludes(inline_beta);
  lam->excludes(inline_beta);
}

ParameterFile ModelOptions::resolve(Run& run, int default_k, int default_d) const {
  if (!params.empty()) {
    run.add_input(params);
    ParameterFile f = read_parameters_file(params);
    if ((k && *k != f.model.k()) || (d && *d != f.model.d())) {
      throw UsageError("--k/--d disagree with the parameter file");
    }
    return f;
  }
  InteractionModel m(k.value_or(default_k), d.value_or(default_d));
  if (!symmetric.empty()) {
    // s, t, u, ... name the mu of subsets of size 1, 2, 3, ...
    std::vector<double> mu;
    for (const std::string& item : split(symmetric, ',')) {
      const auto eq = item.find('=');
      if (eq != 1 || item[0] < 's' || item[0] > 'z') {
        throw UsageError("--symmetric: expected s=<value>,t=<value>,..., got '" + item + "'");
      }
      const auto slot = static_cast<std::size_t>(item[0] - 's');
      if (slot >= static_cast<std::size_t>(m.d())) {
        throw UsageError("--symmetric: '" + item.substr(0, 1) + "' exceeds the interaction order");
      }
      if (mu.size() <= slot) mu.resize(slot + 1, 1.0);
      mu[slot] = parse_double(item.substr(2), "--symmetric");
    }
    ParameterVector theta = symmetric_parameters(m, mu);
    return {std::move(m), std::move(theta)};
  }
  if (lambda) {
    const double mu[] = {*lambda};
    ParameterVector theta = symmetric_parameters(m, mu);
    return {std::move(m), std::move(theta)};
  }
  std::vector<double> b(m.p(), 0.0);
  if (!beta.empty()) {
    for (const std::string& item : split(beta, ';')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("--beta: expected <subset>=<value>");
      b[m.index_of(parse_subset_label(item.substr(0, eq), m.k()))] =
          parse_double(item.substr(eq + 1), "--beta");
    }
  }
  ParameterVector theta(m, std::move(b));
  return {std::move(m), std::move(theta)};
}

std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
  if (text.empty()) throw UsageError(flag + ": grid is empty");
  const auto colon = split(text, ':');
  if (colon.size() == 3) {
    const double from = parse_double(colon[0], flag);
    const double to = parse_double(colon[1], flag);
    const double step = parse_double(colon[2], flag);
    if (step == 0.0 || (to - from) / step < 0.0) {
      throw UsageError(flag + ": step does not lead from " + colon[0] + " to " + colon[1]);
    }
    const auto count = static_cast<long long>(std::floor((to - from) / step + 1e-9)) + 1;
    if (count > 10'000'000) throw UsageError(flag + ": grid has more than 1e7 points");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) grid.push_back(from + static_cast<double>(i) * step);
    return grid;
  }
  if (colon.size() != 1) throw UsageError(flag + ": expected a,b,c or from:to:step");
  std::vector<double> grid;
  for (const std::string& item : split(text, ',')) grid.push_back(parse_double(item, flag));
  return grid;
}

std::pair<double, double> parse_range(const std::string& text, const std::string& flag) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw UsageError(flag + ": expected lo:hi");
  return {parse_double(parts[0], flag), parse_double(parts[1], flag)};
}

json number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return json::parse(format_number(value));
}

json numbers(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(number(v));
  return out;
}

json matrix_rows(const Matrix& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(number(a(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json design_json(const Design& w) {
  json weights = json::object();
  for (const auto& [x, weight] : w.weights()) {
    weights[BinarySetting(w.k(), x).to_string()] = number(weight);
  }
  return {{"k", w.k()}, {"weights", weights}};
}

}  // namespace rasch::cli
