#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "solitrain/calibration.hpp"
#include "solitrain/error.hpp"
#include "support.hpp"

using namespace solitrain;
namespace fs = std::filesystem;

namespace {

CalibrationTable table_r(std::vector<CalibrationSample> samples) {
  CalibrationTable t{Branch::r, std::move(samples), {}, "0123456789abcdef"};
  t.validate();
  return t;
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("solitrain_test_" + name); }

}  // namespace

TEST_CASE("encode and ratio_to_number are inverse") {
  CHECK(encode(1.0, Branch::r) == doctest::Approx(3.2));
  CHECK(encode(0.0, Branch::r) == doctest::Approx(2.2));
  CHECK(encode(1.0, Branch::ra) == doctest::Approx(1.0 / 2.2 - 1.0));
  CHECK_THROWS_AS(encode(-0.1, Branch::r), ValidationError);
  testing::Gen gen(61);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = gen.uniform(0, 10);
    const Branch b = gen.coin() ? Branch::r : Branch::ra;
    CHECK(ratio_to_number(encode(a, b), b) == doctest::Approx(a));
  }
}

TEST_CASE("decode interpolates a monotone table") {
  const auto t = table_r({{2.0, 0.0}, {2.5, 0.1}, {3.0, 0.2}, {4.0, 0.5}});
  CHECK(decode(0.0, t) == 0.0);
  CHECK(decode(0.1, t) == doctest::Approx(0.3));
  CHECK(decode(0.15, t) == doctest::Approx(2.75 - 2.2));
  CHECK(decode(0.35, t) == doctest::Approx(3.5 - 2.2));
  CHECK(decode(0.5, t) == doctest::Approx(1.8));
  CHECK_THROWS_AS(decode(0.51, t), DecodeRangeError);
  CHECK_THROWS_AS(decode(-1.0, t), ValidationError);
  CHECK(t.max_frequency() == 0.5);
}

TEST_CASE("decode anchors at the threshold when the table starts above it") {
  const auto t = table_r({{2.6, 0.1}, {3.0, 0.3}});
  // (2.2, 0) -> (2.6, 0.1): f = 0.05 maps to s = 2.4.
  CHECK(decode(0.05, t) == doctest::Approx(0.2));
}

TEST_CASE("decode inverts any piecewise-linear monotone map (property)") {
  testing::Gen gen(67);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<CalibrationSample> samples{{2.2, 0.0}};
    double s = 2.2, f = 0.0;
    for (int k = 0; k < gen.integer(2, 9); ++k) {
      s += gen.uniform(0.1, 1.0);
      f += gen.uniform(0.01, 0.2);
      samples.push_back({s, f});
    }
    const auto t = table_r(samples);
    for (std::size_t k = 1; k < samples.size(); ++k) {
      CHECK(decode(*samples[k].f, t) == doctest::Approx(samples[k].s - 2.2));
      const double w = gen.uniform(0, 1);
      const double fm = (1 - w) * *samples[k - 1].f + w * *samples[k].f;
      const double sm = (1 - w) * samples[k - 1].s + w * samples[k].s;
      if (fm > 0) CHECK(decode(fm, t) == doctest::Approx(sm - 2.2).epsilon(1e-9));
    }
  }
}

TEST_CASE("attractive branch tables run in decreasing s") {
  CalibrationTable t{Branch::ra, {{-2.0, 0.6}, {-1.0, 0.4}, {0.0, 0.1}, {0.3, 0.0}}, {}, "x"};
  CHECK_NOTHROW(t.validate());
  // f = 0.4 reads s = -1 -> a = c_down + 1.
  CHECK(decode(0.4, t) == doctest::Approx(1.0 / 2.2 + 1.0));
  CHECK(decode(0.5, t) == doctest::Approx(1.0 / 2.2 + 1.5));
  CalibrationTable bad{Branch::ra, {{-2.0, 0.1}, {-1.0, 0.4}}, {}, "x"};
  CHECK_THROWS_AS(bad.validate(), CalibrationError);
}

TEST_CASE("table validation reports every violation") {
  CalibrationTable t{Branch::r, {{2.0, 0.0}, {2.3, 0.2}, {2.8, 0.1}, {2.7, 0.3}}, {}, "x"};
  try {
    t.validate();
    FAIL("expected CalibrationError");
  } catch (const CalibrationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("non-monotone") != std::string::npos);
    CHECK(msg.find("strictly increasing") != std::string::npos);
  }
  CalibrationTable sub{Branch::r, {{2.0, 0.05}, {3.0, 0.2}}, {}, "x"};
  CHECK_THROWS_WITH_AS(sub.validate(), doctest::Contains("subcritical"), CalibrationError);
  CalibrationTable neg{Branch::r, {{3.0, -0.1}}, {}, "x"};
  CHECK_THROWS_AS(neg.validate(), CalibrationError);
  // Gap rows are skipped by the monotonicity check.
  CalibrationTable gap{Branch::r, {{2.0, 0.0}, {3.0, std::nullopt}, {4.0, 0.3}}, {}, "x"};
  CHECK_NOTHROW(gap.validate());
}

TEST_CASE("table text round trip (property)") {
  testing::Gen gen(71);
  for (int trial = 0; trial < 50; ++trial) {
    CalibrationTable t;
    t.branch = Branch::r;
    t.fingerprint = std::to_string(trial);
    double s = gen.uniform(1.0, 2.2), f = 0.0;
    for (int k = 0; k < gen.integer(1, 12); ++k) {
      if (s > 2.2) f += gen.uniform(0.0, 0.1);
      t.samples.push_back({s, (s > 2.2 && gen.integer(0, 5) == 0) ? std::nullopt : std::optional<double>(f)});
      s += gen.uniform(0.01, 1.0);
    }
    t.validate();
    const auto parsed = parse_table(format_table(t));
    CHECK(parsed == t);
  }
}

TEST_CASE("table parsing errors") {
  const std::string good = "# branch=r\n# c_up=2.2\n# c_down=0.45454545454545453\n# fingerprint=ab\ns,f\n2.5,0.1\n";
  CHECK_NOTHROW(parse_table(good));
  CHECK_THROWS_AS(parse_table("# branch=r\ns,f\n"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_table("# colour=blue\n" + good), doctest::Contains("colour"), ValidationError);
  CHECK_THROWS_AS(parse_table("# branch=q\n# c_up=2.2\n# c_down=0.4\n# fingerprint=a\ns,f\n"), ValidationError);
  CHECK_THROWS_AS(parse_table(good + "3.0;0.2\n"), ValidationError);
  CHECK_THROWS_AS(parse_table(good + "3.0,abc\n"), ValidationError);
  CHECK_THROWS_AS(parse_table(good + "2.4,0.5\n"), CalibrationError);
  const auto crlf = parse_table("# branch=r\r\n# c_up=2.2\r\n# c_down=0.4\r\n# fingerprint=a\r\ns,f\r\n3,nan\r\n");
  CHECK_FALSE(crlf.samples[0].f);
}

TEST_CASE("save and load, with fingerprint checks") {
  const auto t = table_r({{2.0, 0.0}, {3.0, 0.25}});
  const auto path = temp_file("table.csv");
  save_table(t, path);
  CHECK(load_table(path) == t);
  CHECK(load_table(path, t.fingerprint) == t);
  CHECK_THROWS_AS(load_table(path, std::string("ffff")), FingerprintMismatch);
  std::string warnings;
  CHECK(load_table(path, std::string("ffff"), false, &warnings) == t);
  CHECK(warnings.find("ffff") != std::string::npos);
  CHECK_THROWS_AS(load_table(temp_file("does_not_exist.csv")), ValidationError);
  fs::remove(path);
}

TEST_CASE("fingerprint is stable and sensitive to every physics setting") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  const SimConfig base;
  const auto fp = fingerprint(base);
  CHECK(fp.size() == 16);
  CHECK(fingerprint(SimConfig{}) == fp);
  auto changed = [&](auto mutate) {
    SimConfig c;
    mutate(c);
    return fingerprint(c) != fp;
  };
  CHECK(changed([](SimConfig& c) { c.grid.n_points = 2048; }));
  CHECK(changed([](SimConfig& c) { c.evolution.dt = 1e-3; }));
  CHECK(changed([](SimConfig& c) { c.evolution.t_final = 60; }));
  CHECK(changed([](SimConfig& c) { c.detector.z_d = -10; }));
  CHECK(changed([](SimConfig& c) { c.detector.window = MeasureWindow{10, 50}; }));
  CHECK(changed([](SimConfig& c) { c.evolution.absorber.enabled = true; }));
  CHECK(changed([](SimConfig& c) { c.n0 = 2.0; }));
  // The default window spelled out is the same configuration.
  CHECK_FALSE(changed([](SimConfig& c) { c.detector.window = MeasureWindow{20, 50}; }));
}

TEST_CASE("sweep on the small grid: threshold, ordering and thread independence") {
  const auto cfg = testing::small_config();
  const std::vector<double> s = {1.0, 1.5, 3.0, 4.0};
  const auto serial = sweep(s, Branch::r, cfg, 1);
  REQUIRE(serial.size() == 4);
  CHECK(*serial[0].f == 0.0);
  CHECK(*serial[1].f == 0.0);
  CHECK(*serial[2].f > 0.0);
  CHECK(*serial[3].f > *serial[2].f);
  const auto parallel = sweep(s, Branch::r, cfg, 2);
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(parallel[k].f == serial[k].f);
  const auto table = assemble_table(serial, Branch::r, cfg);
  CHECK(table.fingerprint == fingerprint(cfg));
}

TEST_CASE("sweep preconditions") {
  const auto cfg = testing::small_config();
  CHECK_THROWS_AS(sweep({}, Branch::r, cfg), ValidationError);
  CHECK_THROWS_AS(sweep({0.5}, Branch::r, cfg), ValidationError);
  CHECK_THROWS_AS(sweep({3.0, 2.5}, Branch::r, cfg), ValidationError);
  CHECK_THROWS_AS(sweep({0.9}, Branch::ra, cfg), ValidationError);
  CHECK_THROWS_AS(assemble_table({{1.0, 0.0}, {3.0, 0.2}, {3.5, 0.1}}, Branch::r, cfg), CalibrationError);
}
