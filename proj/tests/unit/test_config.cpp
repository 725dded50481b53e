#include <gtest/gtest.h>

#include "opsk/commands.hpp"
#include "opsk/config.hpp"
#include "opsk/csv.hpp"

using namespace opsk;

namespace {

int error_line(std::string_view text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(Config, DefaultsFillUnsetKeys) {
  const RunConfig c = parse_config_text("distance = 0.1\n");
  EXPECT_EQ(c.scenario.distance, 0.1);
  EXPECT_EQ(c.scenario.diffusion.coefficient[0], 0.14e-4);
  EXPECT_EQ(c.scenario.release_mass, 2.4e-9);
  EXPECT_EQ(c.scenario.m_ratio, 2.0);
  EXPECT_EQ(c.scenario.n_symbols, 10000);
  EXPECT_EQ(c.threads, 1);
}

TEST(Config, ParsesScalarsListsAndComments) {
  const RunConfig c = parse_config_text(
      "# link\n"
      "allocation = 2,1,1   # K = 4\n"
      "distance=1\n"
      "edge_ratio = 0.01\n"
      "flow = 0.1\n"
      "fnr = 20, none, 10\n"
      "pn = 5\n"
      "quality = 0.7\n"
      "diffusion = 1e-5 2e-5 3e-5\n"
      "seed = 18446744073709551615\n"
      "window = 50\n"
      "extension_percent = 5\n"
      "allocations = 1,1,1 3,1,1\n"
      "distribution.flat = 1 1 1 1 1 1 1 1\n");
  EXPECT_EQ(c.scenario.allocation, BitAllocation(2, 1, 1));
  EXPECT_EQ(c.scenario.flow_speed(), 0.1);
  EXPECT_EQ(c.scenario.fnr[0], FlowNoiseRatio::ratio(20.0));
  EXPECT_TRUE(c.scenario.fnr[1].is_noise_free());
  EXPECT_EQ(c.scenario.diffusion.coefficient[2], 3e-5);
  EXPECT_EQ(c.scenario.seed, 18446744073709551615ull);
  EXPECT_EQ(c.adaptive.policy.window, 50);
  EXPECT_EQ(c.adaptive.policy.min_extension_percent, 5.0);
  ASSERT_EQ(c.adaptive.allocations.size(), 2u);
  ASSERT_EQ(c.adaptive.distributions.size(), 1u);
  EXPECT_EQ(c.adaptive.distributions[0].label, "flat");
  EXPECT_EQ(c.key_lines.at("pn"), 7);
}

TEST(Config, SweepAxes) {
  const RunConfig c = parse_config_text(
      "sweep.edge_ratio = 0.001 0.01 0.1\n"
      "sweep.distance = log 0.01 1000 6\n"
      "sweep.fnr = 10 none\n"
      "sweep.allocation = 1,1,1 2,2,1\n");
  ASSERT_EQ(c.axes.size(), 4u);
  EXPECT_EQ(c.axes[0].name, "edge_ratio");
  ASSERT_EQ(c.axes[1].values.size(), 6u);
  EXPECT_DOUBLE_EQ(std::get<double>(c.axes[1].values[0]), 0.01);
  EXPECT_NEAR(std::get<double>(c.axes[1].values[2]), 1.0, 1e-12);
  EXPECT_EQ(std::get<double>(c.axes[1].values[5]), 1000.0);
  EXPECT_TRUE(std::get<FlowNoiseRatio>(c.axes[2].values[1]).is_noise_free());
  EXPECT_EQ(std::get<BitAllocation>(c.axes[3].values[1]), BitAllocation(2, 2, 1));
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("distance = 1\nbogus = 2\n"), 2);
  EXPECT_EQ(error_line("\n\ndistance 1\n"), 3);
  EXPECT_EQ(error_line("distance = 1\ndistance = 2\n"), 2);
  EXPECT_EQ(error_line("distance = -1\n"), 1);
  EXPECT_EQ(error_line("distance = 1e999\n"), 1);
  EXPECT_EQ(error_line("quality = 1.5\n"), 1);
  EXPECT_EQ(error_line("repeats = 2\n"), 1);
  EXPECT_EQ(error_line("allocation = 9,0,0\n"), 1);
  EXPECT_EQ(error_line("pn =\n"), 1);
  EXPECT_EQ(error_line("sweep.colour = 1 2\n"), 1);
  EXPECT_EQ(error_line("sweep.edge_ratio = 0.1 -0.1\n"), 1);
  EXPECT_EQ(error_line("sweep.distance = log 0 1 3\n"), 1);
  EXPECT_EQ(error_line("sweep.n_symbols = 10.5\n"), 1);
  try {
    parse_config_text("x = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos);
  }
}

TEST(Config, RequiredKeysPerCommand) {
  try {
    require_keys(parse_config_text(""), Command::ser1);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("distance"), std::string::npos);
  }
  EXPECT_THROW(require_keys(parse_config_text("distance = 1\nedge_ratio = 0.1\n"), Command::rate),
               ConfigError);
  EXPECT_NO_THROW(require_keys(
      parse_config_text("sweep.distance = 1 2\nedge_ratio = 0.1\nflow = 1\n"), Command::rate));
  EXPECT_THROW(require_keys(parse_config_text("window = 10\n"), Command::adaptive), ConfigError);
  EXPECT_NO_THROW(require_keys(parse_config_text(""), Command::thresholds));
}

TEST(Config, CommandNames) {
  EXPECT_EQ(parse_command("mass-ratio"), Command::mass_ratio);
  EXPECT_FALSE(parse_command("mass_ratio").has_value());
  for (Command c : {Command::ser1, Command::ser2, Command::rate, Command::mass_ratio,
                    Command::adaptive, Command::run, Command::thresholds}) {
    EXPECT_EQ(parse_command(to_string(c)), c);
  }
}

TEST(Commands, InvalidCombinationsBecomeConfigErrors) {
  const RunConfig c =
      parse_config_text("distance = 0.1\nedge_ratio = 0.05\nflow_ratio = 1\nsweep.pn = 1 2\n");
  EXPECT_THROW(run_command(Command::ser1, c), ConfigError);
  const RunConfig a = parse_config_text(
      "window = 10\ncapsule_releases = 50\nsweep.pn = 1\n");
  EXPECT_THROW(run_command(Command::adaptive, a), ConfigError);
  const RunConfig w = parse_config_text(
      "window = 10\ncapsule_releases = 50\ndistribution.bad = 1 2 3\n");
  try {
    run_command(Command::adaptive, w);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Commands, AdaptiveTableLabels) {
  const RunConfig c = parse_config_text(
      "window = 20\ncapsule_releases = 100\ndistributions = 2\n"
      "allocations = 1,1,1 2,1,0\n"
      "distribution.peaked = 8 1 1 1 1 1 1 1\n");
  const Table t = run_command(Command::adaptive, c);
  ASSERT_EQ(t.rows.size(), 8u);
  EXPECT_EQ(std::get<std::string>(t.rows[0][3]), "uniform");
  EXPECT_EQ(std::get<std::string>(t.rows[2][3]), "skewed2");
  EXPECT_EQ(std::get<std::string>(t.rows[3][3]), "peaked");
  EXPECT_EQ(std::get<std::int64_t>(t.rows[4][1]), 1);
}

TEST(Commands, ThresholdsLine) {
  EXPECT_EQ(thresholds_line(0), "");
  EXPECT_EQ(thresholds_line(1), "50");
  EXPECT_EQ(thresholds_line(2), "25,50,75");
  EXPECT_EQ(thresholds_line(3), "12.5,25,37.5,50,62.5,75,87.5");
}

TEST(Csv, FormattingAndQuoting) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(1.0 / 0.0), "inf");
  Table t;
  t.header = {"a", "b"};
  t.rows = {{Cell{std::int64_t{3}}, Cell{std::string("x,\"y\"")}}, {Cell{0.5}, Cell{std::string("z")}}};
  EXPECT_EQ(to_csv(t), "a,b\n3,\"x,\"\"y\"\"\"\n0.5,z\n");
}
