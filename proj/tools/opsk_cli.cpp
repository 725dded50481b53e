// opsk: command-line front end for the OPSK link simulator.
//
//   opsk ser1|ser2|run|rate|mass-ratio|adaptive --config FILE [--out FILE]
//        [--seed N] [--threads N]
//   opsk thresholds --n BITS
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "opsk/commands.hpp"
#include "opsk/config.hpp"
#include "opsk/csv.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct Options {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  int bits = 1;
};

int write_output(const Options& opt, const std::string& text) {
  if (opt.out_path.empty() || opt.out_path == "-") {
    std::cout << text;
    std::cout.flush();
    return std::cout ? 0 : kExitRuntime;
  }
  std::ofstream out(opt.out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "opsk: cannot open '" << opt.out_path << "' for writing\n";
    return kExitRuntime;
  }
  out << text;
  out.close();
  if (!out) {
    std::cerr << "opsk: failed writing '" << opt.out_path << "'\n";
    return kExitRuntime;
  }
  return 0;
}

int dispatch(opsk::Command command, const Options& opt) {
  if (command == opsk::Command::thresholds) {
    return write_output(opt, opsk::thresholds_line(opt.bits) + "\n");
  }
  opsk::RunConfig cfg = opsk::parse_config_file(opt.config_path);
  if (opt.seed) cfg.scenario.seed = *opt.seed;
  if (opt.threads) cfg.threads = *opt.threads;
  const opsk::Table table = opsk::run_command(command, cfg);
  return write_output(opt, opsk::to_csv(table));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Odor perceptual shift keying link simulator"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Configuration file (key = value)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_path, "Output CSV path (default: stdout)");
    sub->add_option("--seed", opt.seed, "Random seed; overrides the config file");
    sub->add_option("--threads", opt.threads, "Worker threads; overrides the config file")
        ->check(CLI::Range(1, 1024));
  };

  struct Entry {
    const char* name;
    const char* help;
  };
  const Entry entries[] = {
      {"ser1", "Type-1 SER sweep (noise-free processor)"},
      {"ser2", "Type-2 SER sweep (noise-free channel) with the analytic value"},
      {"run", "End-to-end SER sweep with both noise sources"},
      {"rate", "Absorption time and symbol rate sweep"},
      {"mass-ratio", "Absorbed mass ratio sweep"},
      {"adaptive", "Operation-time extension of adaptive transmission"},
  };
  for (const Entry& e : entries) add_common(app.add_subcommand(e.name, e.help));

  CLI::App* thresholds = app.add_subcommand("thresholds", "Print the class thresholds of one dimension");
  thresholds->add_option("--n", opt.bits, "Bits of the dimension")
      ->required()
      ->check(CLI::Range(0, opsk::kMaxBitsPerDimension));
  thresholds->add_option("--out", opt.out_path, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const auto command = opsk::parse_command(name);
  if (!command) {
    std::cerr << "opsk: unknown subcommand '" << name << "'\n";
    return kExitUsage;
  }
  try {
    return dispatch(*command, opt);
  } catch (const opsk::ConfigError& e) {
    std::cerr << "opsk: " << opt.config_path << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "opsk: invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "opsk: " << e.what() << '\n';
    return kExitRuntime;
  }
}
