#include <catch_amalgamated.hpp>

#include <string>

#include "ppk/errors.hpp"
#include "ppk/experiment.hpp"
#include "ppk/random.hpp"

using namespace ppk;

namespace {

std::string field_of(const ExperimentConfig& cfg) {
  try {
    validate(cfg);
  } catch (const UsageError& e) {
    const std::string m = e.what();
    return m.substr(0, m.find(':'));
  }
  return "";
}

const Check* find(const RunReport& r, const std::string& prefix) {
  for (const auto& c : r.checks)
    if (c.name.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}

} // namespace

TEST_CASE("config validation names the bad field") {
  ExperimentConfig ok;
  CHECK(field_of(ok) == "");
  auto bad = ok;
  bad.p = 0.4;
  CHECK(field_of(bad) == "p");
  bad = ok;
  bad.wavelet = "coif2";
  CHECK(field_of(bad) == "wavelet");
  bad = ok;
  bad.command = "nope";
  CHECK(field_of(bad) == "command");
  bad = ok;
  bad.n = 4;
  CHECK(field_of(bad) == "n");
  bad = ok;
  bad.jmin = 30;
  CHECK(field_of(bad) == "jmin");
  bad = ok;
  bad.trials = 0;
  CHECK(field_of(bad) == "trials");
  bad = ok;
  bad.format = "xml";
  CHECK(field_of(bad) == "format");
  bad = ok;
  bad.command = "divcurl";
  CHECK(field_of(bad) == "n");
}

TEST_CASE("effective level defaults") {
  ExperimentConfig c;
  CHECK(effective_level(c) == c.jmax);
  c.wavelet = "db2";
  CHECK(effective_level(c) == c.jmax + 11);
  c.K = 9;
  CHECK(effective_level(c) == 9);
}

TEST_CASE("trial seeds come from one stream") {
  const auto s = trial_seeds(7, 3);
  REQUIRE(s.size() == 6);
  SplitMix64 r(7);
  for (auto v : s) CHECK(v == r.next());
}

TEST_CASE("runs are deterministic") {
  ExperimentConfig c;
  c.trials = 3;
  c.entries = 30;
  c.threads = 2;
  const auto a = run(c).to_json().dump(), b = run(c).to_json().dump();
  CHECK(a == b);
  // the thread count is not part of the report
  c.threads = 1;
  CHECK(run(c).to_json().dump() == a);
}

TEST_CASE("haar decompose reconstructs exactly") {
  ExperimentConfig c;
  c.trials = 4;
  c.entries = 50;
  const auto r = run(c);
  CHECK(r.passed());
  const auto* rec = find(r, "product reconstruction");
  REQUIRE(rec);
  CHECK(rec->value <= 1e-10);
}

TEST_CASE("db2 kernel exponents") {
  ExperimentConfig c;
  c.command = "kernel";
  c.wavelet = "db2";
  c.trials = 1;
  const auto r = run(c);
  CHECK(r.passed());
  const auto* s = find(r, "kernel size decay slope Pi1");
  REQUIRE(s);
  CHECK(s->value >= -2.2);
  CHECK(s->value <= -1.8);
}

TEST_CASE("csv output has one row per check") {
  ExperimentConfig c;
  c.command = "norms";
  c.trials = 2;
  const auto r = run(c);
  const auto csv = r.to_csv();
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == r.checks.size() + 1);
  CHECK(csv.rfind("invariant,", 0) == 0);
}
