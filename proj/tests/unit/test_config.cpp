#include <gtest/gtest.h>

#include "logsp/config.hpp"
#include "logsp/regimes.hpp"

using namespace logsp;

namespace {

const char* kMinimal = "p = 2.5\nmu1 = -1\nmu2 = -1\nbeta = 0.5\nc1 = 1\nc2 = 1\nn = 128\nL = 8\n";

std::string error_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, MinimalKeyValue) {
  const RunConfig c = parse_config(kMinimal);
  ASSERT_TRUE(c.params.has_value());
  EXPECT_EQ(c.params->p, 2.5);
  EXPECT_EQ(c.params->mu1, -1.0);
  EXPECT_EQ(c.params->beta, 0.5);
  EXPECT_EQ(c.n, 128u);
  EXPECT_EQ(c.L, 8.0);
  EXPECT_EQ(classify_regime(*c.params).kind, RegimeKind::Thm1_i);
}

TEST(Config, MinimalJson) {
  const RunConfig c =
      parse_config(R"({"p": 2.5, "mu1": -1, "mu2": -1, "beta": 0.5, "c1": 1, "c2": 1, "n": 128, "L": 8})");
  ASSERT_TRUE(c.params.has_value());
  EXPECT_EQ(c.params->c2, 1.0);
}

TEST(Config, Defaults) {
  const RunConfig c = parse_config("");
  EXPECT_FALSE(c.params.has_value());
  EXPECT_EQ(c.n, 128u);
  EXPECT_EQ(c.opts.grad_tol, SolveOptions{}.grad_tol);
  EXPECT_EQ(c.t_list, (std::vector<double>{0.5, 1.0, 2.0}));
  EXPECT_EQ(c.output_dir, ".");
}

TEST(Config, CommentsListsAndBooleans) {
  const RunConfig c = parse_config("# header\nt_list = 0.25, 4 # trailing\npolish = false\nseed = 9\nu_field = a.lspf\n");
  EXPECT_EQ(c.t_list, (std::vector<double>{0.25, 4.0}));
  EXPECT_FALSE(c.opts.polish);
  EXPECT_EQ(c.opts.seed, 9u);
  EXPECT_EQ(c.u_field, "a.lspf");
}

TEST(Config, RejectsSmallExponent) {
  EXPECT_NE(error_of("p = 0.5\nmu1 = -1\nmu2 = -1\nbeta = 0.5\nc1 = 1\nc2 = 1\n").find("p must exceed 1"),
            std::string::npos);
}

TEST(Config, RejectsDuplicates) {
  EXPECT_NE(error_of("n = 64\nn = 128\n").find("duplicate"), std::string::npos);
  EXPECT_NE(error_of(R"({"n": 64, "n": 128})").find("duplicate"), std::string::npos);
}

TEST(Config, RejectsUnknownAndMistyped) {
  EXPECT_NE(error_of("colour = red\n").find("unknown key"), std::string::npos);
  EXPECT_NE(error_of(R"({"n": "big"})").find("expects"), std::string::npos);
  EXPECT_NE(error_of("n = 1.5\n").find("expects"), std::string::npos);
  EXPECT_NE(error_of("L = abc\n").find("expects"), std::string::npos);
  EXPECT_FALSE(error_of("just words\n").empty());
  EXPECT_FALSE(error_of("[1, 2]").empty());
  EXPECT_FALSE(error_of("{\"n\": ").empty());
}

TEST(Config, RejectsViolatedInvariants) {
  EXPECT_NE(error_of("n = 100\n").find("power of two"), std::string::npos);
  EXPECT_FALSE(error_of("L = -1\n").empty());
  EXPECT_FALSE(error_of("grad_tol = 0\n").empty());
  EXPECT_FALSE(error_of("armijo_c = 1.5\n").empty());
  EXPECT_FALSE(error_of("t_list = 1, -2\n").empty());
  EXPECT_FALSE(error_of("scan_t_min = 5\nscan_t_max = 1\n").empty());
  EXPECT_NE(error_of("p = 2.5\nmu1 = 1\n").find("missing"), std::string::npos);
  EXPECT_FALSE(error_of("A = 1\nB = 1\n").empty());
}

TEST(Config, JsonRoundTripIsLossless) {
  RunConfig c = parse_config(std::string(kMinimal) + "t_list = 0.1, 3.3\nq = 6\nA = 1\nB = 1\nC = 0.1\n"
                                                     "grad_tol = 1.2345678901234567e-7\nseed = 12345\n"
                                                     "output_dir = out dir\n");
  const RunConfig d = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(d), config_to_json(c));
  EXPECT_EQ(d.opts.grad_tol, c.opts.grad_tol);
  EXPECT_EQ(d.t_list, c.t_list);
  EXPECT_EQ(d.output_dir, "out dir");
  ASSERT_TRUE(d.profile.has_value());
  EXPECT_EQ(d.profile->C, 0.1);
}

TEST(Config, CheckAfterEdit) {
  RunConfig c = parse_config(kMinimal);
  c.n = 48;
  EXPECT_THROW(check_config(c), ConfigError);
  c.n = 64;
  EXPECT_NO_THROW(check_config(c));
}

TEST(Config, KeyTableCoversEveryKey) {
  for (const ConfigKey& k : config_keys()) {
    EXPECT_FALSE(k.help.empty()) << k.name;
    EXPECT_EQ(error_of(std::string(k.name) + " = 1\n").find("unknown key"), std::string::npos) << k.name;
  }
  EXPECT_GE(config_keys().size(), 30u);
}
