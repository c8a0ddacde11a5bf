#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <iostream>

#include "commands.hpp"

namespace cli = critlab::cli;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Flags {
  std::string config;
  std::string out;
  long long seed = -1;
  int threads = -1;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "configuration file");
  sub->add_option("--seed", f.seed, "overrides run.seed");
  sub->add_option("--threads", f.threads, "worker threads (falls back to CRITLAB_THREADS, then run.threads)");
  sub->add_option("--out", f.out, "output directory (overrides run.out)");
  sub->add_option("--set", f.overrides, "section.key=value override, repeatable");
}

cli::RunContext make_context(const Flags& f, const std::string& command) {
  cli::RunContext ctx{f.config.empty() ? cli::ExperimentConfig() : cli::ExperimentConfig::load(f.config), {}, 1, command, {}};
  for (const auto& o : f.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw cli::ConfigError("--set expects section.key=value, got '" + o + "'");
    ctx.config.set(o.substr(0, eq), o.substr(eq + 1));
  }
  if (f.seed >= 0) ctx.config.set("run.seed", std::to_string(f.seed));
  if (!f.out.empty()) ctx.config.set("run.out", f.out);
  if (f.threads >= 0) {
    ctx.config.set("run.threads", std::to_string(f.threads));
  } else if (const char* env = std::getenv("CRITLAB_THREADS"); env && *env) {
    try {
      ctx.config.set("run.threads", std::to_string(std::stoi(env)));
    } catch (const std::exception&) {
      throw cli::ConfigError("CRITLAB_THREADS: '" + std::string(env) + "' is not an integer");
    }
  }
  ctx.config.unsigned_integer("run.seed");
  ctx.threads = static_cast<int>(ctx.config.integer("run.threads"));
  if (ctx.threads < 1) throw cli::ConfigError("key 'run.threads': must be at least 1");
  ctx.out = ctx.config.text("run.out");
  if (ctx.out.empty()) throw cli::ConfigError("key 'run.out': empty output directory");
  return ctx;
}

int execute(const Flags& f, const std::string& command, void (*body)(cli::RunContext&)) {
  cli::RunContext ctx;
  try {
    ctx = make_context(f, command);
  } catch (const cli::ConfigError& e) {
    std::cerr << "critlab " << command << ": config error: " << e.what() << "\n";
    return kExitConfig;
  }
  const auto start = std::chrono::steady_clock::now();
  try {
    cli::fs::create_directories(ctx.out);
    ctx.write("config.resolved.cfg", ctx.config.resolved());
    body(ctx);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    cli::write_manifest(ctx, wall);
  } catch (const cli::ConfigError& e) {
    std::cerr << "critlab " << command << ": config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "critlab " << command << ": runtime failure: " << e.what() << "\n";
    cli::write_error_report(ctx.out, command, e.what());
    return kExitRuntime;
  }
  std::cout << ctx.config.resolved();
  std::cout << "# outputs written to " << ctx.out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critlab: Ising criticality and fluctuation toolkit"};
  app.require_subcommand(1);
  Flags flags;
  std::string report_dir;

  struct Command {
    const char* name;
    const char* help;
    void (*body)(cli::RunContext&);
  };
  const Command commands[] = {
      {"run", "execute the stages listed in run.stages", cli::run_stages},
      {"simulate", "Monte Carlo sampling; writes series, block sums and provenance", cli::simulate},
      {"analyze", "correlator and fluctuation analysis of a simulate directory", cli::analyze},
      {"charfunc", "Lee-Yang zeros and generating-function identities on exact systems", cli::charfunc},
      {"dyson", "Cloitre asymptotics, mean-field freezing and droplet scaling", cli::dyson},
      {"gap", "quantum domination and spectral-gap checks", cli::gap},
      {"newman", "free-energy profiles, exponents, Buckingham-Gunton and sandwich checks", cli::newman},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, flags);
    subs.emplace_back(sub, &c);
  }
  auto* rep = app.add_subcommand("report", "merge module reports and write .dat files");
  rep->add_option("dir", report_dir, "artifact directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (rep->parsed()) {
    try {
      cli::report(report_dir);
    } catch (const cli::UsageError& e) {
      std::cerr << "critlab report: " << e.what() << "\n";
      return kExitConfig;
    } catch (const std::exception& e) {
      std::cerr << "critlab report: " << e.what() << "\n";
      return kExitRuntime;
    }
    std::cout << "report written to " << (cli::fs::path(report_dir) / "report.json").string() << "\n";
    return 0;
  }
  for (const auto& [sub, c] : subs)
    if (sub->parsed()) return execute(flags, c->name, c->body);
  return kExitConfig;
}
