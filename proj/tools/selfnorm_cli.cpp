// selfnorm: exact group-algebra norms, retraction checks and tree geometry.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selfnorm/cli.hpp"
#include "selfnorm/errors.hpp"

namespace {

struct Collected {
  std::map<std::string, std::string> values;
  std::vector<std::string> flags;
};

void add_value(CLI::App* app, Collected& out, const std::string& name, const std::string& help) {
  app->add_option_function<std::string>(
      "--" + name, [&out, name](const std::string& v) { out.values[name] = v; }, help);
}

void add_flag(CLI::App* app, Collected& out, const std::string& name, const std::string& help) {
  app->add_flag_callback("--" + name, [&out, name] { out.values[name] = "true"; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified operator norms in free group algebras, retraction checks and tree geometry"};
  app.require_subcommand(1);

  selfnorm::RunConfig config;
  std::string format = "json";
  Collected args;

  app.add_option("--group", config.group, "Group spec, e.g. \"a|b\" or \"x|y|a\"");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", config.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--budget", config.budget, "Max terms/words of any intermediate");
  app.add_option("--m-max", config.m_max, "Largest power m in the doubling schedule");
  app.add_option("--precision", config.precision_bits, "Display precision in bits");
  app.add_option("--cache-dir", config.cache_dir, "Power cache directory (default: $SELFNORM_CACHE_DIR)");
  app.add_flag("--timing", config.timing, "Attach wall time and cache counters");
  app.fallthrough();

  auto* norm = app.add_subcommand("norm", "Certified two-sided bounds on the reduced operator norm");
  add_value(norm, args, "element", "Element, e.g. \"1*a + 1*a^-1\"");
  add_value(norm, args, "probe", "Optional probe vector for a direct lower bound");

  std::string selfless_action;
  auto* selfless = app.add_subcommand("selfless", "Retraction checks");
  selfless->add_option("action", selfless_action, "injectivity | fibers | growth | transfer | product")
      ->check(CLI::IsMember({"injectivity", "fibers", "growth", "transfer", "product"}));
  bool check_injectivity = false;
  selfless->add_flag("--check-injectivity", check_injectivity, "Same as the injectivity action");
  for (const char* name : {"g", "n", "H", "a", "retraction", "image", "radius", "radius-max", "element", "epsilon",
                           "schedule", "s", "p"})
    add_value(selfless, args, name, "");

  std::string tree_action;
  auto* tree = app.add_subcommand("tree", "Cayley tree geometry");
  // "--h" names the translating element here, so help is long-form only.
  tree->set_help_flag("--help", "Print this help message and exit");
  tree->add_option("action", tree_action, "length | stable | project | cascade | path | search")
      ->required()
      ->check(CLI::IsMember({"length", "stable", "project", "cascade", "path", "search"}));
  for (const char* name : {"g", "h", "n", "samples", "lambda", "glen", "displacement", "provider", "h-radius", "m",
                           "exponent-cap", "max-breakpoints"})
    add_value(tree, args, name, "");

  auto* ball = app.add_subcommand("ball", "Enumerate a word ball");
  add_value(ball, args, "radius", "Ball radius");
  add_flag(ball, args, "list", "Include the words");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : 4;
  }

  std::string command;
  std::string action;
  if (norm->parsed()) {
    command = "norm";
  } else if (selfless->parsed()) {
    command = "selfless";
    action = check_injectivity ? "injectivity" : selfless_action;
    if (action.empty()) {
      std::cerr << "selfless: missing action\n";
      return 4;
    }
  } else if (tree->parsed()) {
    command = "tree";
    action = tree_action;
  } else {
    command = "ball";
  }

  try {
    const selfnorm::Report report = selfnorm::run_command(command, action, args.values, config);
    if (format == "csv") {
      std::cout << report.to_csv();
    } else {
      std::cout << report.to_json().dump(2) << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cout << selfnorm::error_object(e).dump(2) << "\n";
    return selfnorm::exit_code_for(e);
  }
}
