#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ppk/errors.hpp"
#include "ppk/experiment.hpp"
#include "ppk/random.hpp"
#include "ppk/spaces.hpp"

namespace {

enum Exit { kPass = 0, kError = 1, kUsage = 2, kCheckFailed = 3 };

int thread_cap() {
  const char* env = std::getenv("PARAPRODUCT_KIT_THREADS");
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (!env || !*env) return hw;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw ppk::UsageError("PARAPRODUCT_KIT_THREADS: must be a positive integer");
  return static_cast<int>(std::min<long>(v, hw));
}

// Reference values for random_field(seed = 1, 100 entries), regenerated only on request.
nlohmann::json golden_record() {
  ppk::RandomFieldSpec sp;
  sp.entries = 100;
  const auto f = ppk::random_field(1, sp);
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [idx, v] : f.wavelet()) entries.push_back({{"j", idx.cube.j}, {"k", idx.cube.k[0]}, {"value", v}});
  return {{"seed", 1},
          {"spec", {{"n", sp.n}, {"j_min", sp.j_min}, {"j_max", sp.j_max}, {"span", sp.span}, {"entries", sp.entries}}},
          {"p", 0.95},
          {"sequence_hardy_norm", ppk::sequence_hardy_norm(f, 0.95)},
          {"l2_norm", f.l2_norm()},
          {"distinct_entries", f.size()},
          {"field", entries}};
}

} // namespace

int main(int argc, char** argv) {
  ppk::ExperimentConfig cfg;
  std::string out, golden;
  CLI::App app{"paraproduct kit experiment runner"};
  app.add_option("--command", cfg.command, "decompose | norms | kernel | atoms | divcurl | sweep");
  app.add_option("--wavelet", cfg.wavelet, "haar or db1..db10");
  app.add_option("--n", cfg.n, "dimension");
  app.add_option("--p", cfg.p, "Hardy exponent in (n/(n+1), 1)");
  app.add_option("--jmin", cfg.jmin, "coarsest scale");
  app.add_option("--jmax", cfg.jmax, "random fields use scales [jmin, jmax)");
  app.add_option("--K", cfg.K, "grid level (0 = per-command default)");
  app.add_option("--box", cfg.span, "box span in cubes of side 2^-jmin");
  app.add_option("--seed", cfg.seed, "64-bit seed");
  app.add_option("--trials", cfg.trials, "number of trials");
  app.add_option("--entries", cfg.entries, "random-field draws per field");
  app.add_option("--out", out, "report path (default stdout)");
  app.add_option("--format", cfg.format, "json or csv");
  app.add_option("--write-golden", golden, "regenerate the random-field golden file at this path and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (!golden.empty()) {
      std::ofstream os(golden);
      if (!os) throw ppk::UsageError("write-golden: cannot open " + golden);
      os << golden_record().dump(2) << '\n';
      return kPass;
    }
    cfg.threads = thread_cap();
    const auto rep = ppk::run(cfg);
    const std::string text = cfg.format == "csv" ? rep.to_csv() : rep.to_json().dump(2) + "\n";
    if (out.empty()) {
      std::cout << text;
    } else {
      std::ofstream os(out, std::ios::binary);
      if (!os) throw ppk::UsageError("out: cannot open " + out);
      os << text;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << cfg.command << ": " << (rep.passed() ? "pass" : "FAIL") << " in " << secs << " s\n";
    return rep.passed() ? kPass : kCheckFailed;
  } catch (const ppk::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
}
