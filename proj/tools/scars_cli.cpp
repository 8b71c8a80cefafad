// Command-line front end. Exit status: 0 success, 1 invalid input or
// configuration, 2 failed numerical self-check.

#include <cstdint>
#include <exception>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scars/cli/commands.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out = "out";
  std::vector<std::string> sets;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "key = value configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "output directory")->capture_default_str();
  sub->add_option("--set", f.sets, "override one key (key=value), repeatable")->allow_extra_args(false);
  sub->add_option("--seed", f.seed, "random seed")->capture_default_str();
  sub->add_option("--threads", f.threads, "worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-domain scars: diagonal Wigner propagators of cat maps and driven oscillators"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::pair<CLI::App*, const scars::cli::Command*>> subs;
  for (const auto& cmd : scars::cli::commands()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.summary);
    add_common(sub, flags);
    subs.emplace_back(sub, &cmd);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (const auto& [sub, cmd] : subs) {
      if (!sub->parsed()) continue;
      scars::io::Config cfg;
      cmd->declare(cfg);
      if (!flags.config.empty()) cfg.parse_file(flags.config);
      for (const auto& s : flags.sets) cfg.set_assignment(s);
      cmd->run(cfg, {flags.out, flags.seed, flags.threads}, std::cout);
    }
  } catch (const scars::validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::overflow_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const scars::numerical_error& e) {
    std::cerr << "numerical check failed: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
