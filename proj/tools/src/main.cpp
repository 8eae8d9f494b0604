#include <iostream>

#include "commands.hpp"
#include "rasch/errors.hpp"

// Exit codes: 0 success, 1 computational failure, 2 usage error.
int main(int argc, char** argv) {
  using namespace rasch::cli;
  CLI::App root("D-optimal designs for the Rasch Poisson counts model", "rasch");
  root.set_version_flag("--version", RASCH_VERSION);
  root.require_subcommand(1);
  const auto commands = register_commands(root);

  try {
    root.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = root.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& cmd : commands) {
    if (!cmd->app->parsed()) continue;
    Run run(cmd->app->get_name(), cmd->app);
    run.out_path = cmd->out;
    int code = 0;
    try {
      code = cmd->run(run);
    } catch (const UsageError& e) {
      std::cerr << "usage error: " << e.what() << '\n';
      code = 2;
    } catch (const rasch::InvalidArgument& e) {
      std::cerr << "invalid input: " << e.what() << '\n';
      code = 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      code = 1;
    }
    run.write_manifest(code);
    return code;
  }
  return 2;
}
