#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rasch/io.hpp"
#include "rasch/model.hpp"

namespace rasch::cli {

using json = nlohmann::ordered_json;

// Thrown for malformed flags that CLI11 cannot catch itself. Exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Where a command's results and its manifest go.
class Run {
 public:
  Run(std::string command, CLI::App* app) : command_(std::move(command)), app_(app) {}

  std::string out_path;
  std::optional<std::uint64_t> seed;

  void add_input(const std::string& path) { inputs_.push_back(path); }

  // Writes text to out_path + suffix, or to stdout without --out.
  void emit(const std::string& text, const std::string& suffix = "");
  void write_manifest(int exit_code) const;

 private:
  std::string command_;
  CLI::App* app_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
};

// --k/--d/--params/--symmetric/--lambda/--beta, shared by the model commands.
struct ModelOptions {
  std::optional<int> k;
  std::optional<int> d;
  std::string params;
  std::string symmetric;
  std::optional<double> lambda;
  std::string beta;

  void add_to(CLI::App* app, bool with_parameters = true);
  // Defaults apply when neither the flags nor a parameter file set k and d.
  ParameterFile resolve(Run& run, int default_k, int default_d) const;
};

// "a,b,c" or "from:to:step" (to inclusive up to rounding).
std::vector<double> parse_grid(const std::string& text, const std::string& flag);
std::pair<double, double> parse_range(const std::string& text, const std::string& flag);

// 12 significant digits; non-finite values become null.
json number(double value);
json numbers(const std::vector<double>& values);
json matrix_rows(const Matrix& a);
json design_json(const Design& w);

}  // namespace rasch::cli
