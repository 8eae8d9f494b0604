#pragma once

#include <memory>
#include <string>
#include <vector>

#include "common.hpp"

namespace rasch::cli {

struct Command {
  virtual ~Command() = default;
  virtual int run(Run& r) = 0;

  CLI::App* app = nullptr;
  std::string out;

 protected:
  void attach(CLI::App* sub);
};

std::vector<std::unique_ptr<Command>> register_commands(CLI::App& root);

}  // namespace rasch::cli
