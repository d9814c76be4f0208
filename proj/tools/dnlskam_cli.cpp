#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dnlskam/commands.hpp"

using namespace dnlskam;
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config_path;
  std::string out_dir;
  std::optional<uint64_t> seed;
  int workers = 1;
  std::vector<double> alpha_sweep;
  bool require_gate = false;
};

RunConfig load(const Globals& g) {
  RunConfig c;
  if (!g.config_path.empty()) c = load_config(g.config_path);
  if (g.seed) c.kam.seed = *g.seed;
  if (!g.alpha_sweep.empty()) c.alpha_sweep = g.alpha_sweep;
  c.finalize();
  return c;
}

int finish(const Globals& g, const CommandOutput& o, bool stream_to_stdout) {
  for (auto& w : o.warnings) std::cerr << "warning: " << w << "\n";
  if (!g.out_dir.empty()) {
    fs::create_directories(g.out_dir);
    for (auto& [name, body] : o.files) {
      std::ofstream f(fs::path(g.out_dir) / name, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + (fs::path(g.out_dir) / name).string());
      f << body;
    }
  } else if (stream_to_stdout) {
    std::cout << o.stream;
  }
  std::cout << o.report;
  return o.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DNLS KAM toolkit"};
  Globals g;
  app.add_option("--config", g.config_path, "config file (JSON with schema_version)");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--seed", g.seed, "rng seed");
  app.add_option("--workers", g.workers, "worker cap; the computation is sequential")->check(CLI::PositiveNumber);
  app.add_option("--alpha-sweep", g.alpha_sweep, "alpha values a0,a1,...")->delimiter(',');
  app.require_subcommand(1);

  int code = kExitOk;
  auto add = [&](const char* name, const char* help, auto fn) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&, fn] {
      try {
        code = fn(load(g));
      } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        code = kExitConfig;
      } catch (const IndexError& e) {
        std::cerr << "error: " << e.what() << "\n";
        code = kExitConfig;
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        code = kExitRuntime;
      }
    });
    return sub;
  };
  const bool files = true;
  add("admissible", "check the site set", [&](const RunConfig& c) { return finish(g, cmd_admissible(c), false); });
  add("assumptions", "audit m, M1, M2, M3", [&](const RunConfig& c) { return finish(g, cmd_assumptions(c), false); });
  add("normal-form", "partial Birkhoff normal form report",
      [&](const RunConfig& c) { return finish(g, cmd_normal_form(c, files), false); });
  auto* kam = add("kam", "run the KAM iteration",
                  [&](const RunConfig& c) { return finish(g, cmd_kam(c, files, g.require_gate), true); });
  kam->add_flag("--require-gate", g.require_gate, "fail when eps0 exceeds the smallness gate");
  add("measure", "excluded measure over an alpha sweep",
      [&](const RunConfig& c) { return finish(g, cmd_measure(c, files), false); });
  add("verify-bounds", "sample the appendix inequalities",
      [&](const RunConfig& c) { return finish(g, cmd_verify_bounds(c), false); });
  add("show-config", "print the resolved config", [&](const RunConfig& c) {
    std::cout << dump_config(c) << "\n";
    return int(kExitOk);
  });

  CLI11_PARSE(app, argc, argv);
  return code;
}
