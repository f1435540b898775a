#include "ppk/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "ppk/divcurl.hpp"
#include "ppk/errors.hpp"
#include "ppk/paraproduct.hpp"
#include "ppk/random.hpp"
#include "ppk/spaces.hpp"

namespace ppk {

using nlohmann::json;

std::string library_version() { return PPK_VERSION; }

namespace {

const std::vector<std::string> kCommands = {"decompose", "norms", "kernel", "atoms", "divcurl", "sweep"};

[[noreturn]] void usage(const std::string& field, const std::string& why) { throw UsageError(field + ": " + why); }

template <class R, class F>
std::vector<R> run_trials(int trials, int threads, F body) {
  std::vector<R> out(static_cast<std::size_t>(trials));
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(trials));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t; (t = next++) < trials;) {
      try {
        out[static_cast<std::size_t>(t)] = body(t);
      } catch (...) {
        errs[static_cast<std::size_t>(t)] = std::current_exception();
      }
    }
  };
  const int nt = std::max(1, std::min(threads, trials));
  std::vector<std::thread> pool;
  for (int i = 1; i < nt; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

Check at_most(std::string name, double value, double tol, bool hard = true) {
  Check c{std::move(name), value, tol, "<=", 0, hard, false};
  c.passed = std::isfinite(value) && value <= tol;
  return c;
}

Check within(std::string name, double value, double lo, double hi, bool hard = true) {
  Check c{std::move(name), value, lo, "in", hi, hard, false};
  c.passed = std::isfinite(value) && value >= lo && value <= hi;
  return c;
}

double spread(const std::vector<double>& v) {
  if (v.empty()) return 1;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

RandomFieldSpec field_spec(const ExperimentConfig& cfg) {
  RandomFieldSpec sp;
  sp.n = cfg.n;
  sp.j_min = cfg.jmin;
  sp.j_max = cfg.jmax;
  sp.span = cfg.span;
  sp.entries = cfg.entries;
  return sp;
}

Index box_hi(const ExperimentConfig& cfg, int K) {
  Index hi{1, 1, 1};
  for (int d = 0; d < cfg.n; ++d) hi[d] = cfg.span << (K - cfg.jmin);
  return hi;
}

// <f, g> from the coefficients alone
double coefficient_dot(const CoeffField& f, const CoeffField& g) {
  std::vector<double> t;
  for (const auto& [idx, v] : f.wavelet()) t.push_back(v * g.wavelet_at(idx));
  for (const auto& [q, v] : f.scaling()) t.push_back(v * g.scaling_at(q));
  return pairwise_sum(t);
}

void decompose(const ExperimentConfig& cfg, RunReport& rep) {
  const auto sys = wavelet_by_name(cfg.wavelet);
  const int K = effective_level(cfg);
  const auto seeds = trial_seeds(cfg.seed, cfg.trials);
  const auto sp = field_spec(cfg);
  struct Row {
    double residual = 0, cancel[3] = {0, 0, 0}, diag = 0;
    std::int64_t terms = 0;
  };
  auto rows = run_trials<Row>(cfg.trials, cfg.threads, [&](int t) {
    const auto f = random_field(seeds[2 * static_cast<std::size_t>(t)], sp);
    const auto g = random_field(seeds[2 * static_cast<std::size_t>(t) + 1], sp);
    const auto r = renormalize(f, g, sys, K);
    Row row;
    row.residual = r.relative_residual;
    const double scale = f.l2_norm() * g.l2_norm();
    for (int i = 0; i < 3; ++i)
      row.cancel[i] = scale > 0 ? std::abs(r.components[static_cast<std::size_t>(i)].integral()) / scale : 0.0;
    row.diag = std::abs(r.S.integral() - coefficient_dot(f, g)) / std::max(scale, 1.0);
    row.terms = r.term_count;
    return row;
  });
  double res = 0, diag = 0, cancel[3] = {0, 0, 0};
  json per = json::array();
  for (const auto& r : rows) {
    res = std::max(res, r.residual);
    diag = std::max(diag, r.diag);
    for (int i = 0; i < 3; ++i) cancel[i] = std::max(cancel[i], r.cancel[i]);
    per.push_back({{"relative_residual", r.residual},
                   {"Pi_integrals", {r.cancel[0], r.cancel[1], r.cancel[2]}},
                   {"Pi4_vs_fg_integral", r.diag},
                   {"term_count", r.terms}});
  }
  // Riemann sums of Daubechies products converge like the grid step; about 11 levels below
  // the finest wavelet scale resolve them to 1e-6. Coarser grids report these checks softly.
  const bool exact = sys.is_haar() || K - cfg.jmax >= 11;
  rep.checks.push_back(at_most("product reconstruction fg = Pi1+Pi2+Pi3+Pi4", res, sys.is_haar() ? 1e-10 : 1e-6));
  for (int i = 0; i < 3; ++i)
    rep.checks.push_back(
        at_most("cancellation int Pi" + std::to_string(i + 1) + " = 0", cancel[i], 1e-6, exact));
  rep.checks.push_back(at_most("diagonal term carries the mean: int Pi4 = int fg (relative to max(1, |f||g|))", diag, 1e-6, exact));
  rep.results = {{"K", K}, {"trials", per}};
}

void norms(const ExperimentConfig& cfg, RunReport& rep) {
  const auto sys = wavelet_by_name(cfg.wavelet);
  const auto seeds = trial_seeds(cfg.seed, cfg.trials);
  const auto sp = field_spec(cfg);
  const int n = cfg.n;
  struct Row {
    double hardy_err = 0, carleson_err = 0, energy_err = 0;
    json values;
  };
  auto rows = run_trials<Row>(cfg.trials, cfg.threads, [&](int t) {
    Row row;
    SplitMix64 rng(seeds[2 * static_cast<std::size_t>(t)]);
    // one wavelet: closed forms |s| |I|^{1/p-1/2} and |s| |I|^{-alpha/n-1/2}
    TensorIndex idx;
    idx.cube.n = n;
    idx.cube.j = cfg.jmin + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.jmax - cfg.jmin)));
    for (int d = 0; d < n; ++d)
      idx.cube.k[d] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(cfg.span) << (idx.cube.j - cfg.jmin)));
    idx.lambda = 1 + static_cast<unsigned>(rng.below((1u << n) - 1));
    const double lo = static_cast<double>(n) / (n + 1);
    const double p = lo + (1 - lo) * (0.01 + 0.98 * rng.uniform());
    double s = 0;
    while (s == 0) s = rng.uniform(-4, 4);
    CoeffField one(n, cfg.jmin, cfg.jmax);
    one.add_wavelet(idx, s);
    const double vol = idx.cube.volume();
    const double alpha = n * (1 / p - 1);
    const double h = sequence_hardy_norm(one, p), hx = std::abs(s) * std::pow(vol, 1 / p - 0.5);
    const double c = carleson_norm(one, alpha), cx = std::abs(s) * std::pow(vol, -alpha / n - 0.5);
    row.hardy_err = std::abs(h - hx) / hx;
    row.carleson_err = std::abs(c - cx) / cx;

    const auto f = random_field(seeds[2 * static_cast<std::size_t>(t) + 1], sp);
    if (!f.wavelet().empty()) {
      int jtop = cfg.jmin;
      for (const auto& [i, v] : f.wavelet()) jtop = std::max(jtop, i.cube.j);
      const double e = square_function(f, jtop).l2_norm(), ex = f.l2_norm();
      row.energy_err = ex > 0 ? std::abs(e - ex) / ex : 0.0;
    }
    const double a = n * (1 / cfg.p - 1);
    row.values = {{"single_wavelet", {{"p", p}, {"Hp", h}, {"carleson", c}}},
                  {"field",
                   {{"Hp", sequence_hardy_norm(f, cfg.p)},
                    {"Hp_weighted", sequence_hardy_norm(f, cfg.p, Weight{n, cfg.p, std::nullopt})},
                    {"carleson", carleson_norm(f, a)},
                    {"l2", f.l2_norm()}}}};
    return row;
  });
  double he = 0, ce = 0, ee = 0;
  json per = json::array();
  for (auto& r : rows) {
    he = std::max(he, r.hardy_err);
    ce = std::max(ce, r.carleson_err);
    ee = std::max(ee, r.energy_err);
    per.push_back(std::move(r.values));
  }
  rep.checks.push_back(at_most("single wavelet Hp norm = |s| |I|^(1/p-1/2)", he, 1e-10));
  rep.checks.push_back(at_most("single entry Carleson norm = |s| |I|^(-alpha/n-1/2)", ce, 1e-10));
  rep.checks.push_back(at_most("square function energy = coefficient energy", ee, 1e-12));
  (void)sys;
  rep.results = {{"trials", per}};
}

void kernel(const ExperimentConfig& cfg, RunReport& rep) {
  const auto sys = wavelet_by_name(cfg.wavelet);
  const int n = cfg.n;
  KernelOptions opt;
  opt.j_lo = -6;
  opt.j_hi = 10;
  const auto probes = self_similar_probes(n, 1, 6, true);
  json per = json::object();
  for (int i = 1; i <= 4; ++i) {
    const auto pr = kernel_probe(i, sys, n, probes, opt);
    json vals = json::array(), dist = json::array();
    for (std::size_t t = 0; t < pr.values.size(); ++t) {
      vals.push_back(pr.values[t]);
      dist.push_back(pr.distance[t]);
    }
    per["Pi" + std::to_string(i)] = {{"distance", dist},
                                     {"values", vals},
                                     {"fitted_slope", pr.fitted_slope},
                                     {"fitted_constant", pr.fitted_constant},
                                     {"regularity_slope", pr.regularity_slope},
                                     {"regularity_constant", pr.regularity_constant}};
    // the size bound is checked on Pi1 and its mirror; the other two are reported
    const bool hard = i <= 2;
    rep.checks.push_back(within("kernel size decay slope Pi" + std::to_string(i) + " ~ -2n", pr.fitted_slope,
                                -2.0 * n - 0.2, -2.0 * n + 0.2, hard));
    rep.checks.push_back(within("kernel regularity slope Pi" + std::to_string(i) + " ~ -(2n+1)", pr.regularity_slope,
                                -2.0 * n - 1.3, -2.0 * n - 0.7, hard));
  }
  rep.results = {{"scale_range", {opt.j_lo, opt.j_hi}}, {"kernels", per}};
}

void atoms(const ExperimentConfig& cfg, RunReport& rep) {
  const auto sys = wavelet_by_name(cfg.wavelet);
  const auto seeds = trial_seeds(cfg.seed, cfg.trials);
  const auto sp = field_spec(cfg);
  struct Row {
    double recon = 0, ratio = 0;
    std::size_t atoms = 0, failed = 0;
  };
  auto rows = run_trials<Row>(cfg.trials, cfg.threads, [&](int t) {
    const auto f = random_field(seeds[2 * static_cast<std::size_t>(t)], sp);
    const auto d = finite_atomic_decompose(f, cfg.p, sys);
    Row row;
    row.recon = max_abs_difference(recombine(d, f), f);
    row.ratio = d.ratio;
    row.atoms = d.atoms.size();
    for (const auto& a : d.atoms)
      if (!atom_verify(a, sys).passed()) ++row.failed;
    return row;
  });
  double recon = 0;
  std::size_t failed = 0;
  std::vector<double> ratios;
  json per = json::array();
  for (const auto& r : rows) {
    recon = std::max(recon, r.recon);
    failed += r.failed;
    if (r.atoms) ratios.push_back(r.ratio);
    per.push_back({{"atoms", r.atoms}, {"ratio", r.ratio}, {"reconstruction", r.recon}, {"failed_atoms", r.failed}});
  }
  rep.checks.push_back(at_most("atomic reconstruction sum mu_l a_l = f", recon, 1e-12));
  rep.checks.push_back(at_most("every atom passes support, size and moment checks", static_cast<double>(failed), 0));
  rep.checks.push_back(at_most("atomic norm ratio spread max/min", spread(ratios), 4));
  rep.results = {{"trials", per}};
}

void divcurl(const ExperimentConfig& cfg, RunReport& rep) {
  const auto sys = wavelet_by_name(cfg.wavelet);
  const int n = cfg.n, K = effective_level(cfg);
  const int N = 1 << K;
  const int freq = std::min(6, N / 2 - 1);
  const auto seeds = trial_seeds(cfg.seed, cfg.trials);

  // Riesz identities on fixed inputs
  double hilbert = 0;
  {
    const GridFunction c = GridFunction::from_function(1, K, {0, 0, 0}, {N, 1, 1}, [](const Point& x) {
      return std::cos(2 * std::numbers::pi * 3 * x[0]);
    });
    const GridFunction s = GridFunction::from_function(1, K, {0, 0, 0}, {N, 1, 1}, [](const Point& x) {
      return std::sin(2 * std::numbers::pi * 3 * x[0]);
    });
    hilbert = max_abs_difference(riesz_apply(0, c), s);
  }
  struct Row {
    json report;
    double roundtrip = 0;
  };
  auto rows = run_trials<Row>(cfg.trials, cfg.threads, [&](int t) {
    const auto f = random_band_limited(seeds[2 * static_cast<std::size_t>(t)], n, K, freq);
    const VectorField F = curl_free_field(f);
    VectorField G;
    if (n == 2) {
      G = div_free_field(random_band_limited(seeds[2 * static_cast<std::size_t>(t) + 1], n, K, freq));
    } else {
      VectorField V;
      SplitMix64 r(seeds[2 * static_cast<std::size_t>(t) + 1]);
      for (int i = 0; i < n; ++i) V.components.push_back(random_band_limited(r.next(), n, K, freq));
      G = helmholtz_project(V).second;
    }
    Row row;
    row.report = divcurl_experiment(F, G, cfg.p, sys);
    row.roundtrip = riesz_roundtrip_residual(f);
    return row;
  });
  double curl = 0, div = 0, rsum = 0, rt = 0;
  std::vector<double> ratios;
  json per = json::array();
  for (auto& r : rows) {
    const auto& res = r.report["residuals"];
    curl = std::max(curl, res["curl"].get<double>());
    div = std::max(div, res["div"].get<double>());
    rsum = std::max(rsum, res["riesz_sum_G"].get<double>());
    rt = std::max(rt, r.roundtrip);
    ratios.push_back(r.report["ratio"].get<double>());
    per.push_back(std::move(r.report));
  }
  rep.checks.push_back(at_most("curl F = 0", curl, 1e-8));
  rep.checks.push_back(at_most("div G = 0", div, 1e-8));
  rep.checks.push_back(at_most("sum R_i G_i = 0", rsum, 1e-8));
  rep.checks.push_back(at_most("sum R_i R_i = -identity", rt, 1e-10));
  rep.checks.push_back(at_most("Hilbert transform of cosine is sine", hilbert, 1e-10));
  bool finite = true;
  for (double r : ratios) finite = finite && std::isfinite(r);
  rep.checks.push_back(at_most("F.G weighted Hp ratio finite", finite ? 0.0 : 1.0, 0));
  rep.checks.push_back(at_most("F.G weighted Hp ratio spread max/min", spread(ratios), 4));
  rep.results = {{"K", K}, {"max_frequency", freq}, {"trials", per}};
}

void sweep(const ExperimentConfig& cfg, RunReport& rep) {
  const auto sys = wavelet_by_name(cfg.wavelet);
  const auto ex = Exponents::from_p(cfg.n, cfg.p);
  const auto seeds = trial_seeds(cfg.seed, cfg.trials);
  const auto sp = field_spec(cfg);
  const int K0 = effective_level(cfg);
  const Weight w{cfg.n, cfg.p, std::nullopt};
  json levels = json::array();
  std::vector<double> tmax, smax;
  bool finite = true;
  for (int K : {K0, K0 + 1}) {
    struct Row {
      double T = 0, S = 0;
    };
    const Index lo{0, 0, 0}, hi = box_hi(cfg, K);
    auto rows = run_trials<Row>(cfg.trials, cfg.threads, [&](int t) {
      auto f = random_field(seeds[2 * static_cast<std::size_t>(t)], sp);
      const double fn = sequence_hardy_norm(f, cfg.p);
      if (fn > 0) f = f.scaled(1 / fn);
      GridFunction g = random_holder_function(seeds[2 * static_cast<std::size_t>(t) + 1], cfg.n, K, lo, hi, ex.alpha);
      const double gn = lipschitz_norm(g, ex.alpha);
      if (gn > 0) g *= 1 / gn;
      const CoeffField G = analyze(g, sys, cfg.jmin, K);
      CoeffField F(cfg.n, cfg.jmin, K);
      for (const auto& [idx, v] : f.wavelet()) F.add_wavelet(idx, v);
      const auto r = renormalize(F, G, sys, K, lo, hi);
      Row row;
      row.T = sequence_hardy_norm(analyze(r.T, sys, cfg.jmin, K), cfg.p, w, 0);
      row.S = lp_norm(r.S, 1.0);
      return row;
    });
    double tm = 0, sm = 0;
    json ts = json::array(), ss = json::array();
    for (const auto& r : rows) {
      finite = finite && std::isfinite(r.T) && std::isfinite(r.S);
      tm = std::max(tm, r.T);
      sm = std::max(sm, r.S);
      ts.push_back(r.T);
      ss.push_back(r.S);
    }
    tmax.push_back(tm);
    smax.push_back(sm);
    levels.push_back({{"K", K}, {"T_weighted_Hp", ts}, {"S_L1", ss}, {"T_max", tm}, {"S_max", sm}});
  }
  auto change = [](double a, double b) { return a > 0 && b > 0 ? std::max(a / b, b / a) : (a == b ? 1.0 : INFINITY); };
  rep.checks.push_back(at_most("T and S ratios finite", finite ? 0.0 : 1.0, 0));
  rep.checks.push_back(at_most("T ratio stable under K -> K+1 (max change factor)", change(tmax[0], tmax[1]), 2));
  rep.checks.push_back(at_most("S ratio stable under K -> K+1 (max change factor)", change(smax[0], smax[1]), 2));
  rep.results = {{"levels", levels}};
}

} // namespace

void validate(const ExperimentConfig& cfg) {
  if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end())
    usage("command", "unknown command '" + cfg.command + "'");
  try {
    (void)wavelet_by_name(cfg.wavelet, 4);
  } catch (const Error& e) {
    usage("wavelet", e.what());
  }
  if (cfg.n < 1 || cfg.n > kMaxDim) usage("n", "dimension must be 1.." + std::to_string(kMaxDim));
  const double lo = static_cast<double>(cfg.n) / (cfg.n + 1);
  if (!(cfg.p > lo && cfg.p < 1)) usage("p", "must lie in (n/(n+1), 1) = (" + std::to_string(lo) + ", 1)");
  if (cfg.jmin < -20 || cfg.jmin > 20) usage("jmin", "must lie in [-20, 20]");
  if (cfg.jmax <= cfg.jmin) usage("jmax", "must exceed jmin");
  if (cfg.jmax - cfg.jmin > 16) usage("jmax", "at most 16 scales");
  if (cfg.span < 1 || cfg.span > 64) usage("box", "span must be 1..64 cubes");
  if (cfg.trials < 1 || cfg.trials > 100000) usage("trials", "must be 1..100000");
  if (cfg.entries < 0) usage("entries", "must be non-negative");
  if (cfg.format != "json" && cfg.format != "csv") usage("format", "json or csv");
  if (cfg.threads < 1) usage("threads", "must be positive");
  if (cfg.command == "divcurl") {
    if (cfg.n < 2) usage("n", "divcurl needs n >= 2");
    const int K = effective_level(cfg);
    if (K < 3 || K * cfg.n > 22) usage("K", "divcurl grid must have 2^3..2^22 samples per axis product");
    return;
  }
  const int K = effective_level(cfg);
  if (K < cfg.jmax) usage("K", "must be at least jmax");
  double cells = std::pow(static_cast<double>(cfg.span) * std::ldexp(1.0, K - cfg.jmin), cfg.n);
  if (cfg.command == "sweep") cells *= std::pow(2.0, cfg.n);
  if (cells > 1 << 24) usage("K", "grid too large (more than 2^24 samples)");
}

int effective_level(const ExperimentConfig& cfg) {
  if (cfg.K > 0) return cfg.K;
  if (cfg.command == "divcurl") return cfg.n == 2 ? 8 : 5;
  if (cfg.command == "sweep") return cfg.jmax + 3;
  const bool haar = cfg.wavelet == "haar" || cfg.wavelet == "db1";
  if (haar) return cfg.jmax;
  return cfg.n == 1 ? cfg.jmax + 11 : cfg.jmax + 4;
}

json to_json(const ExperimentConfig& cfg) {
  return {{"command", cfg.command}, {"wavelet", cfg.wavelet}, {"n", cfg.n},         {"p", cfg.p},
          {"jmin", cfg.jmin},       {"jmax", cfg.jmax},       {"K", effective_level(cfg)},
          {"box_span", cfg.span},   {"seed", cfg.seed},       {"trials", cfg.trials}, {"entries", cfg.entries},
          {"format", cfg.format}};
}

std::vector<std::uint64_t> trial_seeds(std::uint64_t seed, int trials) {
  SplitMix64 rng(seed);
  std::vector<std::uint64_t> out(2 * static_cast<std::size_t>(std::max(trials, 0)));
  for (auto& s : out) s = rng.next();
  return out;
}

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed || !c.hard; });
}

json RunReport::to_json() const {
  json cs = json::array();
  for (const auto& c : checks) {
    json j = {{"invariant", c.name}, {"value", c.value}, {"relation", c.relation}, {"hard", c.hard},
              {"passed", c.passed}};
    if (c.relation == "in")
      j["tolerance"] = {c.tolerance, c.upper};
    else
      j["tolerance"] = c.tolerance;
    cs.push_back(std::move(j));
  }
  return {{"library", "paraproduct_kit"}, {"version", version}, {"config", config},
          {"checks", cs},                  {"results", results}, {"passed", passed()}};
}

std::string RunReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "invariant,value,relation,tolerance,upper,hard,passed\n";
  for (const auto& c : checks) {
    os << '"' << c.name << "\"," << c.value << ',' << c.relation << ',' << c.tolerance << ',';
    if (c.relation == "in") os << c.upper;
    os << ',' << (c.hard ? 1 : 0) << ',' << (c.passed ? 1 : 0) << '\n';
  }
  return os.str();
}

RunReport run(const ExperimentConfig& cfg) {
  validate(cfg);
  RunReport rep;
  rep.config = to_json(cfg);
  rep.version = library_version();
  if (cfg.command == "decompose") decompose(cfg, rep);
  else if (cfg.command == "norms") norms(cfg, rep);
  else if (cfg.command == "kernel") kernel(cfg, rep);
  else if (cfg.command == "atoms") atoms(cfg, rep);
  else if (cfg.command == "divcurl") divcurl(cfg, rep);
  else sweep(cfg, rep);
  return rep;
}

} // namespace ppk
