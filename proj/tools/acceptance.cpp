#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "semibayes/geweke.hpp"
#include "semibayes/harness.hpp"
#include "semibayes/metrics.hpp"
#include "semibayes/oracle.hpp"

namespace fs = std::filesystem;
using namespace semibayes;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path runs;
  fs::path scenarios;
  int workers = 1;
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os.setf(std::ios::scientific);
  os.precision(2);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

nlohmann::json read_json(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  return nlohmann::json::parse(in);
}

std::string slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Criteria 1 and 2 share one dataset.
constexpr std::uint64_t kOracleSeed = 20240601;

Dataset oracle_dataset() {
  const Eigen::Index n = 40, p = 3;
  DesignMatrix x = gen_design(n, p, {}, derive_seed(kOracleSeed, 0, stream_id("design")));
  Rng rng = make_rng(kOracleSeed, 0, "noise");
  const Eigen::VectorXd theta0 = (Eigen::VectorXd(3) << 0.5, 0.25, 0.0).finished();
  Eigen::VectorXd y = x.x() * theta0;
  for (Eigen::Index i = 0; i < n; ++i) y[i] += std_normal(rng);
  return Dataset{std::move(x), std::move(y)};
}

CoefPriorConfig oracle_prior() { return CoefPriorConfig::make(40, 3, 2.0, LambdaRegime::kSmall); }

// Batch-means standard error of the mean of a correlated sequence.
double batch_se(const std::vector<double> &v, int batches = 50) {
  const auto m = static_cast<long>(v.size());
  const long b = m / batches;
  if (b < 1) return std::numeric_limits<double>::infinity();
  std::vector<double> means(batches, 0.0);
  for (int k = 0; k < batches; ++k) {
    for (long t = k * b; t < (k + 1) * b; ++t) means[k] += v[t];
    means[k] /= static_cast<double>(b);
  }
  double mu = 0.0;
  for (double x : means) mu += x;
  mu /= batches;
  double var = 0.0;
  for (double x : means) var += (x - mu) * (x - mu);
  var /= batches - 1;
  return std::sqrt(var / batches);
}

Verdict criterion1(const Context &) {
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset data = oracle_dataset();
  ModelPriors priors{oracle_prior(), DpPriorConfig{}};
  priors.dp.fixed_sigma = 1.0;
  SamplerConfig sc;
  sc.sweeps = 200000;
  sc.burn_in = 50000;
  sc.mode = SamplerMode::kFixedGaussian;
  const OracleResult oracle = exact_posterior(data, priors.coef, 1.0, false);
  const ChainOutput chain = run_chain(data, priors, sc, derive_seed(kOracleSeed, 0, stream_id("chain")));
  const double tv = compare_to_chain(oracle, chain);

  int compared = 0, within = 0;
  double worst = 0.0;
  for (const auto &m : oracle.models) {
    if (m.skipped || m.support.empty() || m.prob < 0.01) continue;
    const auto k = static_cast<Eigen::Index>(m.support.size());
    for (Eigen::Index a = 0; a < k; ++a) {
      std::vector<double> v;
      for (const auto &s : chain.samples)
        if (s.support == m.support) v.push_back(s.values[a]);
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      const double z = std::abs(mean - m.mean[a]) / batch_se(v);
      worst = std::max(worst, z);
      ++compared;
      within += z <= 3.0;
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = tv <= 0.03 && within == compared && secs <= 300.0;
  return {pass, "TV " + fixed(tv) + " (<= 0.03); coefficient means within 3 SE " +
                    std::to_string(within) + "/" + std::to_string(compared) + " (max z " +
                    fixed(worst, 2) + "); runtime " + fixed(secs, 1) + " s (<= 300)"};
}

Verdict criterion2(const Context &) {
  const OracleResult oracle = exact_posterior(oracle_dataset(), oracle_prior(), 1.0, true);
  const double gap = oracle.method_gap();
  const bool pass = oracle.complete && oracle.models.size() == 8 && gap <= 1e-8;
  return {pass, "models " + std::to_string(oracle.models.size()) + ", max dual-method gap " +
                    sci(gap) + " (<= 1e-8)"};
}

Density random_density(Rng &rng, ErrorDensitySpec *spec) {
  const double u = uniform01(rng);
  const int kind = static_cast<int>(uniform01(rng) * 4.0);
  switch (kind) {
    case 0:
      *spec = ErrorDensitySpec::gaussian(0.5 + 1.5 * u);
      break;
    case 1:
      *spec = ErrorDensitySpec::symmetrized_two_point_normal(0.5 + 2.0 * u, 0.5 + uniform01(rng));
      break;
    case 2:
      *spec = ErrorDensitySpec::power_exponential(0.5 + u, 2.5 + 1.5 * uniform01(rng));
      break;
    default: {
      const double w = 0.2 + 0.6 * u;
      *spec = ErrorDensitySpec::finite_gaussian_mixture({w, 1.0 - w}, {0.3, 1.5 + uniform01(rng)},
                                                        0.5 + 0.5 * uniform01(rng));
    }
  }
  return as_density(*spec);
}

Verdict criterion3(const Context &) {
  const Density g = as_density(ErrorDensitySpec::gaussian(1.0));
  const double h = hellinger(g, shifted(g, 1.0));
  const double closed = std::sqrt(2.0 - 2.0 * std::exp(-0.125));
  const double half = std::sqrt(1.0 - std::exp(-0.125));
  const double nu11 = nu(g, g);

  Rng rng = make_rng(20240603, 0, "lan");
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    ErrorDensitySpec spec0, spec1;
    const Density eta0 = random_density(rng, &spec0);
    const Density eta = random_density(rng, &spec1);
    const Eigen::Index n = 20 + static_cast<Eigen::Index>(60 * uniform01(rng));
    const Eigen::Index p = 3 + static_cast<Eigen::Index>(6 * uniform01(rng));
    const DesignMatrix x = gen_design(n, p, {}, derive_seed(20240603, k, stream_id("design")));
    Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(p);
    theta0[0] = 2.0 * uniform01(rng) - 1.0;
    theta0[p - 1] = 2.0 * uniform01(rng) - 1.0;
    const Dataset d{x, x.x() * theta0 + spec0.sample(n, rng)};
    worst = std::max(worst, std::abs(lan_residual(d, theta0, eta, theta0, eta0)));
  }
  const bool pass = std::abs(h - closed) <= 1e-8 && std::abs(h / std::sqrt(2.0) - half) <= 1e-8 &&
                    std::abs(nu11 - 1.0) <= 1e-6 && worst <= 1e-9;
  return {pass, "d_H(N(0,1),N(1,1)) " + fixed(h, 10) + " vs sqrt(2-2e^{-1/8}) " + fixed(closed, 10) +
                    ", d_H/sqrt2 - sqrt(1-e^{-1/8}) = " + sci(h / std::sqrt(2.0) - half) +
                    "; nu " + fixed(nu11, 10) + "; max |lan residual at theta0| " + sci(worst) +
                    " over 20 pairs"};
}

Verdict criterion4(const Context &) {
  bool identity_ok = true;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(6, 6);
  for (int s = 1; s <= 3; ++s)
    identity_ok = identity_ok && restricted_eigenvalue(id, s) == 1.0 && compatibility(id, s) == 1.0;

  Eigen::MatrixXd eq = Eigen::MatrixXd::Constant(6, 6, 0.5);
  eq.diagonal().setOnes();
  const double psi = restricted_eigenvalue(eq, 3);
  const double eq_err = std::abs(psi * psi - 0.5);

  int ordered = 0;
  for (int k = 0; k < 100; ++k) {
    const DesignMatrix x = gen_design(8, 6, {}, derive_seed(20240604, k, stream_id("design")));
    bool ok = true;
    for (int s = 1; s <= 6; ++s) ok = ok && restricted_eigenvalue(x.gram(), s) <= compatibility(x.gram(), s) + 1e-12;
    ordered += ok;
  }
  const bool pass = identity_ok && eq_err <= 1e-10 && ordered == 100;
  return {pass, std::string("identity phi = psi = 1 at s = 1..3: ") + (identity_ok ? "yes" : "no") +
                    "; equicorrelated |psi^2(3) - 0.5| " + sci(eq_err) + "; psi <= phi on " +
                    std::to_string(ordered) + "/100 designs (s = 1..6)"};
}

Verdict criterion5(const Context &) {
  const DesignMatrix x = gen_design(30, 5, {}, derive_seed(20240605, 0, stream_id("design")));
  std::string detail;
  bool pass = true;
  for (int m0 : {2, 6}) {
    ModelPriors pr{CoefPriorConfig::make(30, 5, 0.5, 2.0), DpPriorConfig{}};
    pr.dp.truncation = 5;
    pr.dp.m0 = m0;
    const GewekeResult r = geweke_test(x, pr, SamplerConfig{}, 50000, derive_seed(20240605, m0, stream_id("geweke")));
    pass = pass && r.max_abs_z() <= 3.0;
    detail += (detail.empty() ? "" : "; ") + std::string("m0 = ") + std::to_string(m0) + " max |z| " +
              fixed(r.max_abs_z(), 2);
  }
  return {pass, detail + " over 5e4 cycles (<= 3)"};
}

// Scenario file with the sample sizes and replication count replaced.
ScenarioConfig derived(const Context &ctx, const std::string &name, std::vector<Eigen::Index> n,
                       int reps, const std::string &tag) {
  ScenarioConfig c = ScenarioConfig::load(ctx.scenarios / (name + ".json"));
  c.n_values = std::move(n);
  c.replications = reps;
  c.output_dir = ctx.runs / tag;
  return c;
}

ScenarioConfig s1_n400(const Context &ctx) { return derived(ctx, "S1", {400}, 100, "S1_n400"); }
ScenarioConfig s1_bvm(const Context &ctx) { return derived(ctx, "S1", {200, 800}, 30, "S1_bvm"); }
ScenarioConfig s2_trend(const Context &ctx) { return derived(ctx, "S2", {100, 200, 400}, 30, "S2"); }

void ensure(const Context &ctx, const ScenarioConfig &c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = replicate(c, ctx.workers);
  int ran = 0, failed = 0;
  for (const auto &r : results) {
    ran += !r.skipped;
    failed += r.failed;
  }
  if (ran > 0)
    std::cerr << "run " << c.output_dir.string() << ": " << ran << " cells in "
              << fixed(seconds_since(t0), 0) << " s\n";
  if (failed > 0) throw NumericError(std::to_string(failed) + " cells failed in " + c.output_dir.string());
  report(c.output_dir);
}

nlohmann::json cell_metrics(const ScenarioConfig &c, Eigen::Index n, int rep) {
  return read_json(cell_dir(c.output_dir, n, rep) / "metrics.json");
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

Verdict criterion6(const Context &ctx) {
  const ScenarioConfig c = s2_trend(ctx);
  ensure(ctx, c);
  std::vector<double> l2, ratio;
  double cell_seconds = 0.0;
  for (Eigen::Index n : c.n_values) {
    std::vector<double> a, b;
    for (int r = 0; r < c.replications; ++r) {
      const auto m = cell_metrics(c, n, r);
      a.push_back(m["errors"]["l2_median"].get<double>());
      b.push_back(m["pred_ratio"].get<double>());
      cell_seconds += read_json(cell_dir(c.output_dir, n, r) / "timing.json")["seconds"].get<double>();
    }
    l2.push_back(median(a));
    ratio.push_back(median(b));
  }
  bool decreasing = true, bounded = true;
  for (std::size_t k = 1; k < l2.size(); ++k) {
    decreasing = decreasing && l2[k] < l2[k - 1];
    bounded = bounded && ratio[k] <= 1.05 * ratio[k - 1];
  }
  const bool pass = decreasing && bounded && cell_seconds <= 7200.0;
  return {pass, "median l2 " + fixed(l2[0]) + " > " + fixed(l2[1]) + " > " + fixed(l2[2]) +
                    "; median pred ratio " + fixed(ratio[0]) + ", " + fixed(ratio[1]) + ", " +
                    fixed(ratio[2]) + " (no growth beyond 5%); total cell time " +
                    fixed(cell_seconds, 0) + " s on one worker"};
}

Verdict criterion7(const Context &ctx) {
  const ScenarioConfig c = s1_n400(ctx);
  ensure(ctx, c);
  int modal = 0;
  double superset = 0.0;
  const int reps = 50;
  for (int r = 0; r < reps; ++r) {
    const auto m = cell_metrics(c, 400, r);
    modal += m["selection"]["modal_is_true"].get<bool>();
    superset += m["selection"]["p_superset"].get<double>();
  }
  superset /= reps;
  const double frac = static_cast<double>(modal) / reps;
  return {frac >= 0.8 && superset <= 0.05,
          "modal model = S0 in " + std::to_string(modal) + "/50 reps (>= 40); mean superset mass " +
              fixed(superset) + " (<= 0.05)"};
}

Verdict criterion8(const Context &ctx) {
  const ScenarioConfig c = s1_bvm(ctx);
  ensure(ctx, c);
  int mean_down = 0, cov_down = 0;
  std::vector<double> ks;
  auto value = [](const nlohmann::json &m, const char *key) {
    const auto &b = m["bvm"];
    if (b.is_null() || !b[key].is_number()) return std::numeric_limits<double>::quiet_NaN();
    return b[key].get<double>();
  };
  for (int r = 0; r < c.replications; ++r) {
    const auto small = cell_metrics(c, 200, r), large = cell_metrics(c, 800, r);
    mean_down += value(large, "mean_gap") < value(small, "mean_gap");
    cov_down += value(large, "cov_gap") < value(small, "cov_gap");
    const double k = value(large, "proj_ks");
    ks.push_back(std::isnan(k) ? 1.0 : k);
  }
  const double ks_med = median(ks);
  const bool pass = mean_down >= 21 && cov_down >= 21 && ks_med <= 0.10;
  return {pass, "mean_gap decreases in " + std::to_string(mean_down) + "/30, cov_gap in " +
                    std::to_string(cov_down) + "/30 (>= 21 each); median max projection KS at n = 800 " +
                    fixed(ks_med) + " (<= 0.10)"};
}

Verdict criterion9(const Context &ctx) {
  const ScenarioConfig c = s1_n400(ctx);
  ensure(ctx, c);
  int covered = 0, total = 0;
  for (int r = 0; r < c.replications; ++r) {
    const nlohmann::json m = cell_metrics(c, 400, r);
    for (const auto &row : m.at("coverage")) {
      ++total;
      covered += row.at("covered").get<bool>();
    }
  }
  if (total == 0) return {false, "no coverage rows"};
  const double f = static_cast<double>(covered) / total;
  return {f >= 0.82 && f <= 0.98, "90% interval coverage " + std::to_string(covered) + "/" +
                                      std::to_string(total) + " = " + fixed(f) + " (in [0.82, 0.98])"};
}

Verdict criterion10(const Context &ctx) {
  std::string detail;
  bool pass = true;
  for (const ScenarioConfig &c : {s1_n400(ctx), s2_trend(ctx)}) {
    ensure(ctx, c);
    int ok = 0;
    for (int r = 0; r < c.replications; ++r) {
      const auto m = cell_metrics(c, 400, r);
      ok += m["dimension"]["median"].get<double>() <= 2.0 * m["s0"].get<double>();
    }
    const double f = static_cast<double>(ok) / c.replications;
    pass = pass && f >= 0.9;
    detail += (detail.empty() ? "" : "; ") + c.name + " median |S| <= 2 s0 in " + std::to_string(ok) +
              "/" + std::to_string(c.replications);
  }
  return {pass, detail + " (>= 90%)"};
}

Verdict criterion11(const Context &ctx) {
  const ScenarioConfig c = s2_trend(ctx);
  ensure(ctx, c);
  const Eigen::Index n = c.n_values.front();
  const fs::path scratch = ctx.runs / "determinism";
  fs::remove_all(scratch);
  run_cell(c, n, 0, scratch);
  const std::string a = slurp(cell_dir(c.output_dir, n, 0) / "chain.csv");
  const std::string b = slurp(scratch / "chain.csv");
  const bool pass = !a.empty() && a == b;
  return {pass, "rerun of n = " + std::to_string(n) + " rep 0: chain CSV " +
                    std::to_string(b.size()) + " bytes, " + (pass ? "identical" : "different")};
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> which;
  std::string runs = "acceptance_runs", scenarios = SEMIBAYES_SOURCE_DIR "/scenarios";
  app.add_option("--criterion", which, "Criteria to run (default all)")->check(CLI::Range(1, 11));
  app.add_option("--runs", runs, "Directory for replication runs");
  app.add_option("--scenarios", scenarios, "Directory holding S1.json and S2.json");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Verdict(const Context &)>> checks{
      criterion1, criterion2, criterion3, criterion4,  criterion5, criterion6,
      criterion7, criterion8, criterion9, criterion10, criterion11};
  if (which.empty())
    for (int k = 1; k <= 11; ++k) which.push_back(k);

  Context ctx{runs, scenarios, 1};
  bool all = true;
  try {
    ctx.workers = default_workers();
  } catch (const std::exception &e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  for (int k : which) {
    Verdict v;
    try {
      v = checks[k - 1](ctx);
    } catch (const std::exception &e) {
      v = {false, std::string("error: ") + e.what()};
    }
    all = all && v.pass;
    std::cout << "criterion " << k << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
  }
  return all ? 0 : 1;
}
