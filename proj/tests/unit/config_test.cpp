#include <functional>
#include <sstream>

#include <gtest/gtest.h>

#include "config.hpp"
#include "qbsde/errors.hpp"
#include "qbsde/interval.hpp"

using qbsde::ConfigError;
using qbsde::cli::Config;

namespace {

Config parse(const std::string& text) {
  std::istringstream is(text);
  return Config::parse(is, "test.ini");
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, ReadsTypedValuesAndDefaults) {
  Config c = parse("[a]\nx = 1.5\nn = 7\nb = yes\ns = \"hello world\"\n");
  EXPECT_EQ(c.num("a.x"), 1.5);
  EXPECT_EQ(c.integer("a.n", 0), 7);
  EXPECT_TRUE(c.flag("a.b", false));
  EXPECT_EQ(c.str("a.s"), "hello world");
  EXPECT_EQ(c.num("a.missing", 2.5), 2.5);
  EXPECT_EQ(c.num("a.inf", -qbsde::kInf), -qbsde::kInf);
  EXPECT_NO_THROW(c.reject_unknown());
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_EQ(message_of([] { parse("[a]\nx = 1\nbroken line\n"); }).rfind("test.ini:3:", 0), 0u);
  EXPECT_EQ(message_of([] { parse("[a]\nx = 1\nx = 2\n"); }).rfind("test.ini:3:", 0), 0u);
  Config c = parse("[a]\n\nx = one\n");
  EXPECT_EQ(message_of([&] { c.num("a.x"); }), "test.ini:3: 'a.x' expects a number, got 'one'");
  Config d = parse("[a]\nn = 2.5\nb = maybe\n");
  EXPECT_EQ(message_of([&] { d.integer("a.n", 0); }).rfind("test.ini:2:", 0), 0u);
  EXPECT_EQ(message_of([&] { d.flag("a.b", false); }).rfind("test.ini:3:", 0), 0u);
  EXPECT_NE(message_of([&] { d.str("a.absent"); }).find("missing required key 'a.absent'"), std::string::npos);
}

TEST(Config, UnknownKeysAreRejected) {
  Config c = parse("[a]\nx = 1\n[b]\ntypo = 2\n");
  c.num("a.x");
  EXPECT_EQ(message_of([&] { c.reject_unknown(); }), "test.ini:4: unknown key 'b.typo' for this command");
}

TEST(Config, OverridesWinAndManifestRoundTrips) {
  Config c = parse("[run]\nseed = 5\n[a]\nx = 0.1\n");
  c.set("run.seed", "9");
  EXPECT_EQ(c.integer("run.seed", 0), 9);
  EXPECT_EQ(c.where("run.seed"), "command line");
  c.num("a.x");
  c.num("a.y", 1.0 / 3);
  std::ostringstream os;
  c.write_manifest(os);

  Config back = parse(os.str());
  EXPECT_EQ(back.integer("run.seed", 0), 9);
  EXPECT_EQ(back.num("a.x"), 0.1);
  EXPECT_EQ(back.num("a.y"), 1.0 / 3);  // 17 significant digits survive
  EXPECT_NO_THROW(back.reject_unknown());
}
