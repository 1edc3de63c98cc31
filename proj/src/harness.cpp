#include "semibayes/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "semibayes/csv.hpp"
#include "semibayes/errors.hpp"
#include "semibayes/metrics.hpp"

namespace semibayes {

namespace {

constexpr const char *kVersion = "0.1.0";
constexpr double kCredibleLevel = 0.9;

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

std::uint64_t fnv1a(const std::string &s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const char *design_name(DesignKind k) {
  switch (k) {
    case DesignKind::kIidGaussian: return "iid_gaussian";
    case DesignKind::kEquicorrelated: return "equicorrelated";
    case DesignKind::kIdentityBlock: return "identity_block";
  }
  return "iid_gaussian";
}

DesignKind design_kind(const std::string &s) {
  if (s == "iid_gaussian") return DesignKind::kIidGaussian;
  if (s == "equicorrelated") return DesignKind::kEquicorrelated;
  if (s == "identity_block") return DesignKind::kIdentityBlock;
  throw ConfigError("design.kind must be iid_gaussian, equicorrelated or identity_block");
}

void write_json(const std::filesystem::path &path, const nlohmann::json &j) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

nlohmann::json read_json(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Support nonzero_support(const Eigen::VectorXd &theta) {
  Support s;
  for (Eigen::Index j = 0; j < theta.size(); ++j)
    if (theta[j] != 0.0) s.push_back(static_cast<int>(j));
  return s;
}

}  // namespace

double TruthSpec::magnitude(Eigen::Index n, Eigen::Index p) const {
  if (rule == BetaMinRule::kConstant) return value;
  return value * std::sqrt(static_cast<double>(s0) * std::log(static_cast<double>(p)) /
                           static_cast<double>(n));
}

Eigen::Index ScenarioConfig::p_for(Eigen::Index n) const {
  if (p_fixed > 0) return p_fixed;
  return std::max<Eigen::Index>(1, std::llround(p_factor * static_cast<double>(n)));
}

ModelPriors ScenarioConfig::priors_for(Eigen::Index n) const {
  return ModelPriors{CoefPriorConfig::from_json(coef_prior, n, p_for(n)), dp};
}

void ScenarioConfig::validate() const {
  if (n_values.empty()) throw ConfigError("design.n must list at least one sample size");
  for (std::size_t k = 0; k < n_values.size(); ++k) {
    if (n_values[k] < 2) throw ConfigError("design.n values must be at least 2");
    if (k > 0 && n_values[k] <= n_values[k - 1])
      throw ConfigError("design.n must be strictly increasing");
  }
  if (replications < 1) throw ConfigError("replications must be at least 1");
  if (p_fixed <= 0 && !(p_factor > 0.0)) throw ConfigError("design.p_factor must be positive");
  if (truth.s0 < 0) throw ConfigError("truth.s0 must be nonnegative");
  if (!(truth.value > 0.0)) throw ConfigError("truth.beta_min.value must be positive");
  for (Eigen::Index n : n_values) {
    const Eigen::Index p = p_for(n);
    if (truth.s0 > p) throw ConfigError("truth.s0 exceeds p for n = " + std::to_string(n));
    if (truth.s0 > 0 && !(truth.magnitude(n, p) > 0.0))
      throw ConfigError("beta-min rule gives a zero magnitude");
    if (design.kind == DesignKind::kIdentityBlock && n < p)
      throw ConfigError("identity_block design needs n >= p");
    if (design.kind == DesignKind::kEquicorrelated &&
        !(design.rho < 1.0 && design.rho > -1.0 / static_cast<double>(std::max<Eigen::Index>(p - 1, 1))))
      throw ConfigError("equicorrelated rho outside (-1/(p-1), 1)");
    try {
      priors_for(n).coef.validate();
    } catch (const std::exception &e) {
      throw ConfigError(std::string("coef_prior: ") + e.what());
    }
  }
  dp.validate();
  sampler.validate();
}

nlohmann::json ScenarioConfig::to_json() const {
  nlohmann::json d{{"kind", design_name(design.kind)}, {"rho", design.rho}, {"n", n_values}};
  if (p_fixed > 0) {
    d["p"] = p_fixed;
  } else {
    d["p_factor"] = p_factor;
  }
  nlohmann::json t{{"s0", truth.s0},
                   {"beta_min",
                    {{"rule", truth.rule == BetaMinRule::kConstant ? "constant" : "scaled"},
                     {"value", truth.value}}},
                   {"signs", truth.alternating_signs ? "alternating" : "positive"},
                   {"error", truth.error.to_json()}};
  return {{"name", name},
          {"design", d},
          {"truth", t},
          {"coef_prior", coef_prior},
          {"dpmix", dp.to_json()},
          {"sampler", sampler.to_json()},
          {"replications", replications},
          {"master_seed", master_seed},
          {"output_dir", output_dir.string()}};
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json &j) {
  try {
    ScenarioConfig c;
    c.name = j.value("name", c.name);
    const auto &d = j.at("design");
    c.design.kind = design_kind(d.value("kind", std::string("iid_gaussian")));
    c.design.rho = d.value("rho", 0.0);
    const auto &nv = d.at("n");
    if (nv.is_number()) {
      c.n_values = {nv.get<Eigen::Index>()};
    } else {
      c.n_values = nv.get<std::vector<Eigen::Index>>();
    }
    if (d.contains("p")) c.p_fixed = d["p"].get<Eigen::Index>();
    c.p_factor = d.value("p_factor", c.p_factor);

    const auto &t = j.at("truth");
    c.truth.s0 = t.value("s0", c.truth.s0);
    if (t.contains("beta_min")) {
      const auto &b = t["beta_min"];
      const std::string rule = b.value("rule", std::string("constant"));
      if (rule == "constant") {
        c.truth.rule = BetaMinRule::kConstant;
      } else if (rule == "scaled") {
        c.truth.rule = BetaMinRule::kScaled;
      } else {
        throw ConfigError("truth.beta_min.rule must be constant or scaled");
      }
      c.truth.value = b.value("value", c.truth.value);
    }
    const std::string signs = t.value("signs", std::string("alternating"));
    if (signs != "alternating" && signs != "positive")
      throw ConfigError("truth.signs must be alternating or positive");
    c.truth.alternating_signs = signs == "alternating";
    if (t.contains("error")) c.truth.error = ErrorDensitySpec::from_json(t["error"]);

    c.coef_prior = j.value("coef_prior", nlohmann::json::object());
    c.dp = DpPriorConfig::from_json(j.value("dpmix", nlohmann::json::object()));
    c.sampler = SamplerConfig::from_json(j.value("sampler", nlohmann::json::object()));
    c.replications = j.value("replications", c.replications);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.output_dir = j.value("output_dir", c.output_dir.string());
    c.validate();
    return c;
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("scenario config: ") + e.what());
  }
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path &path) {
  return from_json(read_json(path));
}

std::uint64_t ScenarioConfig::hash() const {
  nlohmann::json j = to_json();
  j.erase("output_dir");
  return fnv1a(j.dump());
}

std::uint64_t cell_index(Eigen::Index n, int rep) {
  return (static_cast<std::uint64_t>(n) << 24) | static_cast<std::uint64_t>(rep);
}

GeneratedData gen_dataset(const ScenarioConfig &config, Eigen::Index n, int rep) {
  const Eigen::Index p = config.p_for(n);
  const std::uint64_t cell = cell_index(n, rep);
  GeneratedData g;
  g.eta0 = config.truth.error;
  DesignMatrix x = gen_design(n, p, config.design,
                              derive_seed(config.master_seed, cell, stream_id("design")));

  Rng truth_rng = make_rng(config.master_seed, cell, "truth");
  std::vector<int> idx(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) idx[j] = static_cast<int>(j);
  for (int k = 0; k < config.truth.s0; ++k) {
    const auto pick = k + static_cast<Eigen::Index>(uniform01(truth_rng) * static_cast<double>(p - k));
    std::swap(idx[k], idx[std::min(pick, p - 1)]);
  }
  Support s0(idx.begin(), idx.begin() + config.truth.s0);
  std::sort(s0.begin(), s0.end());
  const double mag = config.truth.magnitude(n, p);
  g.theta0 = Eigen::VectorXd::Zero(p);
  for (std::size_t k = 0; k < s0.size(); ++k)
    g.theta0[s0[k]] = config.truth.alternating_signs && k % 2 == 1 ? -mag : mag;

  Rng noise_rng = make_rng(config.master_seed, cell, "noise");
  g.eps = g.eta0.sample(n, noise_rng);
  Eigen::VectorXd y = x.x() * g.theta0 + g.eps;
  g.data = Dataset{std::move(x), std::move(y)};

  const ModelPriors priors = config.priors_for(n);
  const double s0d = static_cast<double>(config.truth.s0);
  const double logp = std::log(static_cast<double>(p));
  g.info = {{"n", n},
            {"p", p},
            {"rep", rep},
            {"s0", config.truth.s0},
            {"beta_min", mag},
            {"lambda", priors.coef.lambda},
            {"lambda_in_range", priors.coef.lambda_in_range()},
            {"lambda_l1_ratio",
             s0d > 0.0 && logp > 0.0 ? priors.coef.lambda * g.theta0.lpNorm<1>() / (s0d * logp) : 0.0},
            {"entry_bound", p >= 2 ? entry_bound_constant(g.data.x) : 0.0}};
  return g;
}

std::filesystem::path cell_dir(const std::filesystem::path &run_dir, Eigen::Index n, int rep) {
  std::ostringstream os;
  os << "n" << n << "_rep" << rep;
  return run_dir / "cells" / os.str();
}

CellResult run_cell(const ScenarioConfig &config, Eigen::Index n, int rep,
                    const std::filesystem::path &dir) {
  CellResult res;
  res.n = n;
  res.rep = rep;
  if (std::filesystem::exists(dir / "metrics.json")) {
    res.skipped = true;
    return res;
  }
  std::filesystem::create_directories(dir);
  const auto start = std::chrono::steady_clock::now();

  const GeneratedData g = gen_dataset(config, n, rep);
  const ModelPriors priors = config.priors_for(n);
  const std::uint64_t seed = derive_seed(config.master_seed, cell_index(n, rep), stream_id("chain"));
  const ChainOutput chain = run_chain(g.data, priors, config.sampler, seed);
  write_chain_csv(chain, dir / "chain.csv");
  write_json(dir / "chain.json", chain_sidecar(chain, priors));

  const Support s0 = nonzero_support(g.theta0);
  nlohmann::json truth{{"support", s0},
                       {"values", [&] {
                          std::vector<double> v;
                          for (int j : s0) v.push_back(g.theta0[j]);
                          return v;
                        }()},
                       {"error", g.eta0.to_json()},
                       {"data_hash", hex64(g.data.hash())},
                       {"info", g.info}};
  write_json(dir / "truth.json", truth);

  const auto &samples = chain.samples;
  nlohmann::json m;
  m["n"] = n;
  m["p"] = g.data.p();
  m["rep"] = rep;
  m["s0"] = s0.size();
  const CoefErrors ce = coef_errors(samples, g.theta0, g.data.x.x());
  m["errors"] = ce.to_json();
  const double s0logp = static_cast<double>(s0.size()) * std::log(static_cast<double>(g.data.p()));
  m["pred_ratio"] = s0logp > 0.0 ? ce.pred_median / std::sqrt(s0logp) : 0.0;
  m["dimension"] = dimension_summary(samples).to_json();
  const SelectionRow sel = selection_row(samples, s0);
  m["selection"] = {{"p_true", sel.p_true},
                    {"p_superset", sel.p_superset},
                    {"modal_is_true", sel.modal_is_true},
                    {"modal", sel.modal}};

  nlohmann::json coverage = nlohmann::json::array();
  for (int j : s0) {
    const auto [lo, hi] = credible_interval(samples, j, kCredibleLevel);
    coverage.push_back({{"coordinate", j},
                        {"theta0", g.theta0[j]},
                        {"lower", lo},
                        {"upper", hi},
                        {"covered", lo <= g.theta0[j] && g.theta0[j] <= hi}});
  }
  m["coverage"] = coverage;

  m["bvm"] = nullptr;
  m["hellinger"] = nullptr;
  if (g.eta0.family() != ErrorFamily::kDegenerate) {
    const Density eta0 = as_density(g.eta0);
    if (!s0.empty() && samples.size() >= 500) {
      const LimitLaw law = limit_law(g.data, g.theta0, eta0);
      m["bvm"] = bvm_report(samples, law).to_json();
    }
    if (config.sampler.mode == SamplerMode::kDp) {
      const std::vector<double> h = density_hellinger(samples, eta0);
      if (!h.empty()) {
        double mean = 0.0;
        for (double v : h) mean += v;
        m["hellinger"] = {{"median", quantile(h, 0.5)},
                          {"mean", mean / static_cast<double>(h.size())},
                          {"draws", h.size()}};
      }
    }
  }
  m["diagnostics"] = {{"sigma_acceptance", chain.sigma_acceptance},
                      {"flip_rate", chain.flip_rate},
                      {"jitter_events", chain.jitter_events},
                      {"samples", samples.size()}};
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(dir / "timing.json", {{"seconds", seconds}});
  write_json(dir / "metrics.json", m);
  return res;
}

int default_workers() {
  if (const char *env = std::getenv("SEMIBAYES_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception &) {
    }
    throw ConfigError("SEMIBAYES_WORKERS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<CellResult> replicate(const ScenarioConfig &config, int workers) {
  config.validate();
  if (workers <= 0) workers = default_workers();
  const auto run_dir = config.output_dir;
  std::filesystem::create_directories(run_dir);
  const std::string hash = hex64(config.hash());
  const auto manifest_path = run_dir / "manifest.json";
  if (std::filesystem::exists(manifest_path)) {
    const auto old = read_json(manifest_path);
    if (old.value("config_hash", std::string()) != hash)
      throw ConfigError("run directory " + run_dir.string() +
                        " holds results for a different configuration");
  }

  std::vector<std::pair<Eigen::Index, int>> cells;
  for (Eigen::Index n : config.n_values)
    for (int r = 0; r < config.replications; ++r) cells.emplace_back(n, r);
  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto work = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cells.size()) return;
      const auto [n, rep] = cells[k];
      const auto dir = cell_dir(run_dir, n, rep);
      try {
        results[k] = run_cell(config, n, rep, dir);
        std::filesystem::remove(dir / "error.txt");
      } catch (const std::exception &e) {
        results[k].n = n;
        results[k].rep = rep;
        results[k].failed = true;
        results[k].error = e.what();
        std::filesystem::create_directories(dir);
        std::ofstream(dir / "error.txt") << e.what() << '\n';
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << "cell n=" << n << " rep=" << rep << " failed: " << e.what() << '\n';
      }
    }
  };
  const int threads = std::min<int>(workers, static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto &t : pool) t.join();

  nlohmann::json list = nlohmann::json::array();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto [n, rep] = cells[k];
    const std::uint64_t cell = cell_index(n, rep);
    list.push_back({{"n", n},
                    {"rep", rep},
                    {"dir", std::filesystem::relative(cell_dir(run_dir, n, rep), run_dir).string()},
                    {"seed_design", derive_seed(config.master_seed, cell, stream_id("design"))},
                    {"seed_chain", derive_seed(config.master_seed, cell, stream_id("chain"))},
                    {"status", results[k].failed ? "failed" : "done"}});
  }
  write_json(manifest_path, {{"version", kVersion},
                             {"config_hash", hash},
                             {"config", config.to_json()},
                             {"cells", list}});
  return results;
}

namespace {

std::string num(const nlohmann::json &j) {
  if (j.is_null()) return "NA";
  if (j.is_boolean()) return j.get<bool>() ? "1" : "0";
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_number()) return format_double(j.get<double>());
  return "NA";
}

nlohmann::json at_path(const nlohmann::json &m, std::initializer_list<const char *> keys) {
  const nlohmann::json *cur = &m;
  for (const char *k : keys) {
    if (!cur->is_object() || !cur->contains(k)) return nullptr;
    cur = &(*cur)[k];
  }
  return *cur;
}

double median_of(std::vector<double> v) {
  return v.empty() ? std::numeric_limits<double>::quiet_NaN() : quantile(std::move(v), 0.5);
}

std::string fmt(double v) { return std::isfinite(v) ? format_double(v) : "NA"; }

}  // namespace

std::vector<std::filesystem::path> report(const std::filesystem::path &run_dir) {
  const auto manifest = read_json(run_dir / "manifest.json");
  const ScenarioConfig config = ScenarioConfig::from_json(manifest.at("config"));

  struct Cell {
    Eigen::Index n;
    int rep;
    nlohmann::json m;  // null when missing
  };
  std::vector<Cell> cells;
  for (Eigen::Index n : config.n_values) {
    for (int r = 0; r < config.replications; ++r) {
      const auto path = cell_dir(run_dir, n, r) / "metrics.json";
      cells.push_back({n, r, std::filesystem::exists(path) ? read_json(path) : nlohmann::json()});
    }
  }

  auto open = [&](const char *name, const char *header) {
    auto f = std::make_unique<std::ofstream>(run_dir / name);
    if (!*f) throw ConfigError(std::string("cannot write ") + name);
    *f << header << '\n';
    return f;
  };
  std::vector<std::filesystem::path> written;
  auto done = [&](const char *name) { written.push_back(run_dir / name); };

  {
    auto f = open("errors.csv", "n,rep,l1_median,l1_q90,l2_median,l2_q90,pred_median,pred_q90,pred_ratio");
    for (const auto &c : cells) {
      *f << c.n << ',' << c.rep;
      for (const char *k : {"l1_median", "l1_q90", "l2_median", "l2_q90", "pred_median", "pred_q90"})
        *f << ',' << num(at_path(c.m, {"errors", k}));
      *f << ',' << num(at_path(c.m, {"pred_ratio"})) << '\n';
    }
    done("errors.csv");
  }
  {
    auto f = open("dimension.csv", "n,rep,size_median,size_mean,size_q90,size_max");
    for (const auto &c : cells) {
      *f << c.n << ',' << c.rep;
      for (const char *k : {"median", "mean", "q90", "max"})
        *f << ',' << num(at_path(c.m, {"dimension", k}));
      *f << '\n';
    }
    done("dimension.csv");
  }
  {
    auto f = open("hellinger.csv", "n,rep,hellinger_median,hellinger_mean,draws");
    for (const auto &c : cells) {
      *f << c.n << ',' << c.rep;
      for (const char *k : {"median", "mean", "draws"}) *f << ',' << num(at_path(c.m, {"hellinger", k}));
      *f << '\n';
    }
    done("hellinger.csv");
  }
  {
    auto f = open("selection.csv", "n,rep,p_true,p_superset,modal_is_true");
    for (const auto &c : cells) {
      *f << c.n << ',' << c.rep;
      for (const char *k : {"p_true", "p_superset", "modal_is_true"})
        *f << ',' << num(at_path(c.m, {"selection", k}));
      *f << '\n';
    }
    done("selection.csv");
  }
  {
    auto f = open("bvm.csv", "n,rep,mean_gap,cov_gap,proj_ks,wrong_model_mass");
    for (const auto &c : cells) {
      *f << c.n << ',' << c.rep;
      for (const char *k : {"mean_gap", "cov_gap", "proj_ks", "wrong_model_mass"})
        *f << ',' << num(at_path(c.m, {"bvm", k}));
      *f << '\n';
    }
    done("bvm.csv");
  }
  {
    auto f = open("coverage.csv", "n,rep,coordinate,theta0,lower,upper,covered");
    for (const auto &c : cells) {
      const auto cov = at_path(c.m, {"coverage"});
      if (!cov.is_array() || cov.empty()) {
        *f << c.n << ',' << c.rep << ",NA,NA,NA,NA,NA\n";
        continue;
      }
      for (const auto &row : cov)
        *f << c.n << ',' << c.rep << ',' << num(row["coordinate"]) << ',' << num(row["theta0"])
           << ',' << num(row["lower"]) << ',' << num(row["upper"]) << ',' << num(row["covered"])
           << '\n';
    }
    done("coverage.csv");
  }
  {
    auto f = open("summary.csv",
                  "n,p,cells,completed,l1_median,l2_median,pred_median,pred_ratio_median,"
                  "size_median,hellinger_median,modal_true_fraction,mean_p_true,mean_p_superset,"
                  "coverage,mean_gap_median,cov_gap_median,proj_ks_median,wrong_model_mass_mean");
    for (Eigen::Index n : config.n_values) {
      std::map<std::string, std::vector<double>> col;
      long total = 0, completed = 0, covered = 0, intervals = 0;
      auto push = [&](const std::string &key, const nlohmann::json &v) {
        if (v.is_number()) col[key].push_back(v.get<double>());
        if (v.is_boolean()) col[key].push_back(v.get<bool>() ? 1.0 : 0.0);
      };
      for (const auto &c : cells) {
        if (c.n != n) continue;
        ++total;
        if (c.m.is_null()) continue;
        ++completed;
        push("l1", at_path(c.m, {"errors", "l1_median"}));
        push("l2", at_path(c.m, {"errors", "l2_median"}));
        push("pred", at_path(c.m, {"errors", "pred_median"}));
        push("ratio", at_path(c.m, {"pred_ratio"}));
        push("size", at_path(c.m, {"dimension", "median"}));
        push("hell", at_path(c.m, {"hellinger", "median"}));
        push("modal", at_path(c.m, {"selection", "modal_is_true"}));
        push("ptrue", at_path(c.m, {"selection", "p_true"}));
        push("psup", at_path(c.m, {"selection", "p_superset"}));
        push("mgap", at_path(c.m, {"bvm", "mean_gap"}));
        push("cgap", at_path(c.m, {"bvm", "cov_gap"}));
        push("ks", at_path(c.m, {"bvm", "proj_ks"}));
        push("wrong", at_path(c.m, {"bvm", "wrong_model_mass"}));
        for (const auto &row : at_path(c.m, {"coverage"})) {
          ++intervals;
          if (row["covered"].get<bool>()) ++covered;
        }
      }
      auto mean_of = [](const std::vector<double> &v) {
        if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
      };
      *f << n << ',' << config.p_for(n) << ',' << total << ',' << completed << ','
         << fmt(median_of(col["l1"])) << ',' << fmt(median_of(col["l2"])) << ','
         << fmt(median_of(col["pred"])) << ',' << fmt(median_of(col["ratio"])) << ','
         << fmt(median_of(col["size"])) << ',' << fmt(median_of(col["hell"])) << ','
         << fmt(mean_of(col["modal"])) << ',' << fmt(mean_of(col["ptrue"])) << ','
         << fmt(mean_of(col["psup"])) << ','
         << fmt(intervals > 0 ? static_cast<double>(covered) / static_cast<double>(intervals)
                              : std::numeric_limits<double>::quiet_NaN())
         << ',' << fmt(median_of(col["mgap"])) << ',' << fmt(median_of(col["cgap"])) << ','
         << fmt(median_of(col["ks"])) << ',' << fmt(mean_of(col["wrong"])) << '\n';
    }
    done("summary.csv");
  }
  return written;
}

}  // namespace semibayes
