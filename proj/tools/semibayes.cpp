#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "semibayes/csv.hpp"
#include "semibayes/design.hpp"
#include "semibayes/errors.hpp"
#include "semibayes/harness.hpp"
#include "semibayes/metrics.hpp"
#include "semibayes/oracle.hpp"
#include "semibayes/rng.hpp"
#include "semibayes/sampler.hpp"

namespace fs = std::filesystem;
using namespace semibayes;

namespace {

nlohmann::json read_json(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  return nlohmann::json::parse(in);
}

void emit(const std::string &text, const std::string &out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw ConfigError("cannot write " + out);
  f << text;
}

// n taken from the data when the config lists several sample sizes.
ModelPriors priors_for_data(const ScenarioConfig &config, const Dataset &data) {
  return ModelPriors{CoefPriorConfig::from_json(config.coef_prior, data.n(), data.p()), config.dp};
}

Eigen::VectorXd dense_truth(const nlohmann::json &truth, Eigen::Index p) {
  Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(p);
  const auto s = truth.at("support").get<std::vector<int>>();
  const auto v = truth.at("values").get<std::vector<double>>();
  if (s.size() != v.size()) throw ConfigError("truth: support and values differ in length");
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] < 0 || s[k] >= p) throw ConfigError("truth: support index out of range");
    theta0[s[k]] = v[k];
  }
  return theta0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Semi-parametric Bayesian sparse linear regression"};
  app.require_subcommand(1);

  // gen
  auto *gen = app.add_subcommand("gen", "Generate one replication dataset from a scenario");
  std::string gen_config, gen_out;
  long gen_n = 0;
  int gen_rep = 0;
  gen->add_option("--config", gen_config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  gen->add_option("--n", gen_n, "Sample size (default: first listed)");
  gen->add_option("--rep", gen_rep, "Replication index")->check(CLI::NonNegativeNumber);
  gen->add_option("--out", gen_out, "Output directory")->required();

  // fit
  auto *fit = app.add_subcommand("fit", "Run one chain on a dataset");
  std::string fit_data, fit_config, fit_out;
  std::uint64_t fit_seed = 1;
  fit->add_option("--data", fit_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--config", fit_config, "Scenario JSON (priors and sampler)")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--seed", fit_seed, "Chain seed");
  fit->add_option("--out", fit_out, "Output directory")->required();

  // oracle
  auto *orc = app.add_subcommand("oracle", "Exact model posterior for Gaussian errors, p <= 6");
  std::string orc_data, orc_config, orc_out;
  double orc_sigma = 1.0;
  bool orc_no_check = false;
  orc->add_option("--data", orc_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  orc->add_option("--config", orc_config, "Scenario JSON (coef_prior block)")
      ->required()
      ->check(CLI::ExistingFile);
  orc->add_option("--sigma", orc_sigma, "Error standard deviation");
  orc->add_flag("--no-cross-check", orc_no_check, "Skip the quadrature cross-check");
  orc->add_option("--out", orc_out, "Output JSON (default stdout)");

  // regularity
  auto *reg = app.add_subcommand("regularity", "Compatibility and restricted eigenvalue constants");
  std::string reg_design, reg_out;
  int reg_smax = 1, reg_draws = 0;
  std::uint64_t reg_seed = 1;
  reg->add_option("--design", reg_design, "Design CSV")->required()->check(CLI::ExistingFile);
  reg->add_option("--smax", reg_smax, "Largest sparsity level")->required()->check(CLI::PositiveNumber);
  reg->add_option("--sampled", reg_draws, "Sample this many supports per level (upper estimate)");
  reg->add_option("--seed", reg_seed, "Seed for --sampled");
  reg->add_option("--out", reg_out, "Output CSV (default stdout)");

  // bvm
  auto *bvm = app.add_subcommand("bvm", "Compare a chain with the Gaussian limit law");
  std::string bvm_data, bvm_chain, bvm_truth, bvm_out;
  bvm->add_option("--data", bvm_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  bvm->add_option("--chain", bvm_chain, "Chain CSV")->required()->check(CLI::ExistingFile);
  bvm->add_option("--truth", bvm_truth, "truth.json written by gen")->required()->check(CLI::ExistingFile);
  bvm->add_option("--out", bvm_out, "Output JSON (default stdout)");

  // replicate
  auto *rep = app.add_subcommand("replicate", "Run every (n, replication) cell of a scenario");
  std::string rep_config, rep_output;
  int rep_workers = 0;
  rep->add_option("--config", rep_config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  rep->add_option("--output", rep_output, "Run directory (overrides output_dir)");
  rep->add_option("--workers", rep_workers, "Worker threads (default SEMIBAYES_WORKERS)");

  // report
  auto *rpt = app.add_subcommand("report", "Write summary CSVs for a run directory");
  std::string rpt_run;
  rpt->add_option("--run", rpt_run, "Run directory")->required()->check(CLI::ExistingDirectory);

  // check
  auto *chk = app.add_subcommand("check", "Validate a scenario file and its error density");
  std::string chk_config;
  chk->add_option("--config", chk_config, "Scenario JSON")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const ScenarioConfig config = ScenarioConfig::load(gen_config);
      const Eigen::Index n = gen_n > 0 ? gen_n : config.n_values.front();
      if (gen_rep >= config.replications) throw ConfigError("--rep exceeds the replication count");
      const GeneratedData g = gen_dataset(config, n, gen_rep);
      fs::create_directories(gen_out);
      write_dataset_csv(g.data, fs::path(gen_out) / "data.csv");
      write_design_csv(g.data.x, fs::path(gen_out) / "design.csv");
      Support s0;
      std::vector<double> values;
      for (Eigen::Index j = 0; j < g.theta0.size(); ++j) {
        if (g.theta0[j] == 0.0) continue;
        s0.push_back(static_cast<int>(j));
        values.push_back(g.theta0[j]);
      }
      nlohmann::json truth{{"support", s0}, {"values", values}, {"error", g.eta0.to_json()},
                           {"info", g.info}};
      std::ofstream(fs::path(gen_out) / "truth.json") << truth.dump(2) << '\n';
      std::cout << (fs::path(gen_out) / "data.csv").string() << '\n';
    } else if (*fit) {
      const ScenarioConfig config = ScenarioConfig::load(fit_config);
      const Dataset data = read_dataset_csv(fit_data);
      const ModelPriors priors = priors_for_data(config, data);
      const ChainOutput chain = run_chain(data, priors, config.sampler, fit_seed);
      fs::create_directories(fit_out);
      write_chain_csv(chain, fs::path(fit_out) / "chain.csv");
      std::ofstream(fs::path(fit_out) / "chain.json") << chain_sidecar(chain, priors).dump(2) << '\n';
      std::cout << (fs::path(fit_out) / "chain.csv").string() << '\n';
    } else if (*orc) {
      const ScenarioConfig config = ScenarioConfig::load(orc_config);
      const Dataset data = read_dataset_csv(orc_data);
      const CoefPriorConfig coef = CoefPriorConfig::from_json(config.coef_prior, data.n(), data.p());
      const OracleResult r = exact_posterior(data, coef, orc_sigma, !orc_no_check);
      emit(r.to_json().dump(2) + "\n", orc_out);
    } else if (*reg) {
      const DesignMatrix x = read_design_csv(reg_design);
      if (reg_smax > x.p()) throw ParameterError("--smax exceeds p");
      std::string text = "s,phi,psi,argmin_support,exact\n";
      for (int s = 1; s <= reg_smax; ++s) {
        const RegularityReport r = reg_draws > 0
                                       ? regularity_sampled(x, s, reg_draws, reg_seed)
                                       : regularity(x, s);
        text += std::to_string(s) + "," + format_double(r.phi) + "," + format_double(r.psi) + "," +
                join_ints(r.argmin_support) + "," + (r.exact ? "1" : "0") + "\n";
      }
      emit(text, reg_out);
    } else if (*bvm) {
      const Dataset data = read_dataset_csv(bvm_data);
      const ChainOutput chain = read_chain_csv(bvm_chain);
      const auto truth = read_json(bvm_truth);
      const Eigen::VectorXd theta0 = dense_truth(truth, data.p());
      const Density eta0 = as_density(ErrorDensitySpec::from_json(truth.at("error")));
      const LimitLaw law = limit_law(data, theta0, eta0);
      nlohmann::json out{{"limit_law", law.to_json()}, {"report", bvm_report(chain, law).to_json()}};
      emit(out.dump(2) + "\n", bvm_out);
    } else if (*rep) {
      ScenarioConfig config = ScenarioConfig::load(rep_config);
      if (!rep_output.empty()) config.output_dir = rep_output;
      const auto results = replicate(config, rep_workers);
      int failed = 0, skipped = 0;
      for (const auto &r : results) {
        failed += r.failed;
        skipped += r.skipped;
      }
      std::cout << "cells " << results.size() << " skipped " << skipped << " failed " << failed
                << '\n';
      return failed > 0 ? 2 : 0;
    } else if (*rpt) {
      for (const auto &p : report(rpt_run)) std::cout << p.string() << '\n';
    } else if (*chk) {
      const ScenarioConfig config = ScenarioConfig::load(chk_config);
      std::ostringstream hash;
      hash << std::hex << config.hash();
      nlohmann::json out{{"config", config.to_json()}, {"config_hash", hash.str()}};
      if (config.truth.error.family() != ErrorFamily::kDegenerate) {
        const ConditionReport cr = check_conditions(config.truth.error, default_condition_grid());
        out["error_conditions"] = cr.to_json();
      }
      std::cout << out.dump(2) << '\n';
    }
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
