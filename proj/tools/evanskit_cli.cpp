#include <iostream>
#include <utility>

#include "CLI11.hpp"
#include "evanskit/cli.hpp"
#include "evanskit/errors.hpp"

int main(int argc, char** argv) {
  namespace ec = evanskit::cli;
  CLI::App app{"Evans-function toolkit for viscous shock profiles"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir, variant, system;
  int jobs = 0;
  const std::pair<const char*, const char*> verbs[] = {
      {"profile", "solve the traveling-wave profile"},
      {"eval", "Evans function at the configured frequencies"},
      {"contour", "winding number of D along a contour"},
      {"lowfreq", "low-frequency limit D_bf / Delta over sampled angles"},
      {"regime-scan", "small half shell plus xi slices of the right half plane"},
      {"print-defaults", "print the resolved configuration"}};
  for (const auto& [verb, help] : verbs) {
    CLI::App* sub = app.add_subcommand(verb, help);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--variant", variant, "formulation variant");
    sub->add_option("--system", system, "registry system name");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string verb = app.get_subcommands().front()->get_name();

  std::string record;
  try {
    ec::RunConfig cfg = config_path.empty() ? ec::RunConfig{} : ec::load_config(config_path);
    cfg.task = verb;
    if (!out_dir.empty()) cfg.out = out_dir;
    if (jobs > 0) cfg.jobs = jobs;
    if (!system.empty()) cfg.system = system;
    if (!variant.empty()) {
      try {
        evanskit::variant_from_string(variant);
      } catch (const evanskit::Error&) {
        throw evanskit::Error(evanskit::ErrorKind::config, "--variant: unknown variant '" + variant + "'");
      }
      cfg.variant = variant;
    }
    if (verb == "print-defaults") {
      std::cout << ec::to_json(cfg) << '\n';
      return 0;
    }
    std::cout << ec::run(cfg) << '\n';
    return 0;
  } catch (const std::exception& e) {
    const int code = ec::error_record(e, record);
    std::cerr << record << '\n';
    return code;
  }
}
