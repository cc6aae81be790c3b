// lacsim: command-line front end over the C interface.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lac/lac.h"

namespace {

int exit_code(lac_status status) {
  switch (status) {
    case LAC_OK: return 0;
    case LAC_ERR_DIVERGED: return 2;
    case LAC_ERR_ACCEPTANCE: return 3;
    default: return 1;
  }
}

int report(lac_status status) {
  if (status == LAC_OK) return 0;
  const std::string key = lac_last_error_key();
  std::fprintf(stderr, "lacsim: %s: %s%s%s\n", lac_status_string(status), lac_last_error(),
               key.empty() ? "" : " [key: ", key.empty() ? "" : (key + "]").c_str());
  return exit_code(status);
}

struct Options {
  std::string config;
  std::string out;
  std::string seed;
  std::vector<std::string> sets;
};

void print_criterion(int id, const char* title, int passed, const char* detail, double seconds, void*) {
  std::printf("AC%-2d %s  %s (%.2f s)\n     %s\n", id, passed ? "PASS" : "FAIL", title, seconds, detail);
  std::fflush(stdout);
}

int execute(const std::string& command, const Options& opt) {
  lac_config* config = nullptr;
  lac_status status = opt.config.empty() ? lac_config_create(&config) : lac_config_load(opt.config.c_str(), &config);
  if (status != LAC_OK) return report(status);
  auto apply = [&](const char* key, const std::string& value) {
    if (status == LAC_OK) status = lac_config_set(config, key, value.c_str());
  };
  if (!opt.out.empty()) apply("output.dir", opt.out);
  if (!opt.seed.empty()) apply("chain.master_seed", opt.seed);
  for (const auto& s : opt.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "lacsim: --set expects key=value, got '%s'\n", s.c_str());
      lac_config_free(config);
      return 1;
    }
    apply(s.substr(0, eq).c_str(), s.substr(eq + 1));
  }
  if (status == LAC_OK) status = lac_run_command(config, command.c_str());
  if (status == LAC_OK) {
    char* dir = nullptr;
    if (lac_config_get(config, "output.dir", &dir) == LAC_OK) {
      std::printf("%s: wrote results to %s\n", command.c_str(), dir);
      lac_string_free(dir);
    }
  }
  lac_config_free(config);
  return report(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local average consensus simulator and analysis toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lac_version()));

  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "Run one algorithm and write trace.csv and trace_meta.json"},
      {"freq-spatial", "Measured vs analytic spatial gain at ring harmonics"},
      {"freq-temporal", "Measured vs analytic temporal gain for the dynamic schemes"},
      {"noise", "Monte Carlo noise variance vs closed form"},
      {"spacing", "Monte Carlo random-spacing statistics vs closed form"},
      {"figures", "Analytic transfer-function curves as CSV"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "INI config, or a CSV/JSON output embedding one");
    sub->add_option("--out", opt.out, "Output directory (output.dir)");
    sub->add_option("--seed", opt.seed, "Master seed (chain.master_seed)");
    sub->add_option("--set", opt.sets, "Override section.key=value")->allow_extra_args(false);
    sub->final_callback([&, name = name] { throw CLI::RuntimeError(execute(name, opt)); });
  }
  auto* verify = app.add_subcommand("verify", "Run the acceptance criteria");
  verify->final_callback([] {
    int failed = 0;
    const lac_status status = lac_verify(print_criterion, nullptr, &failed);
    if (status == LAC_ERR_ACCEPTANCE) std::printf("%d criteria failed\n", failed);
    else if (status == LAC_OK) std::printf("all criteria passed\n");
    throw CLI::RuntimeError(status == LAC_ERR_ACCEPTANCE ? 3 : report(status));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::RuntimeError& e) {
    return e.get_exit_code();
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  return 0;
}
