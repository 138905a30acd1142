#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "blockprec/cv.hpp"
#include "blockprec/dataset.hpp"
#include "blockprec/errors.hpp"
#include "blockprec/json_io.hpp"
#include "blockprec/model.hpp"
#include "blockprec/search.hpp"
#include "blockprec/solver.hpp"
#include "blockprec/threads.hpp"

namespace {

using blockprec::Json;

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) {
      continue;
    }
    out.push_back(std::stoi(cell));
  }
  if (out.empty()) {
    throw blockprec::InvalidInputError("empty integer list: '" + text + "'");
  }
  return out;
}

struct CommonFlags {
  std::uint64_t seed = 0;
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "json";
  Json config;  // parsed --config file, or empty

  void load_config() {
    if (config_path.empty()) {
      return;
    }
    std::ifstream in(config_path);
    if (!in) {
      throw blockprec::ParseError("cannot open config file '" + config_path + "'");
    }
    in >> config;
  }

  double num(const std::string& key, std::optional<double> flag, double fallback) const {
    if (flag.has_value()) {
      return *flag;
    }
    if (config.contains(key)) {
      return config[key].get<double>();
    }
    return fallback;
  }

  std::filesystem::path out_path(const std::string& name) const {
    std::filesystem::create_directories(out_dir);
    return std::filesystem::path(out_dir) / name;
  }
};

struct PenaltyFlags {
  std::optional<double> lambda_d;
  std::optional<double> lambda_1;
  std::optional<double> lambda_0;
  std::optional<double> alpha_0;

  blockprec::PenaltyConfig resolve(const CommonFlags& common) const {
    blockprec::PenaltyConfig c;
    c.lambda_d = common.num("lambda_d", lambda_d, 1.0);
    c.lambda_1 = common.num("lambda_1", lambda_1, 1.0);
    c.lambda_0 = common.num("lambda_0", lambda_0, 1.0);
    c.alpha_0 = common.num("alpha_0", alpha_0, 1.0);
    c.validate();
    return c;
  }
};

void add_penalty_flags(CLI::App* cmd, PenaltyFlags& pf) {
  cmd->add_option("--lambda-d", pf.lambda_d, "diagonal penalty");
  cmd->add_option("--lambda-1", pf.lambda_1, "within-group penalty");
  cmd->add_option("--lambda-0", pf.lambda_0, "between-group penalty");
  cmd->add_option("--alpha0", pf.alpha_0, "Dirichlet strength");
}

void emit(const Json& report, const CommonFlags& common) {
  Json out = report;
  out["timestamp"] = utc_timestamp();
  std::cout << out.dump(2) << "\n";
  (void)common;
}

blockprec::PriorKind parse_kind(const std::string& kind) {
  if (kind == "gl1") {
    return blockprec::PriorKind::gl1;
  }
  if (kind == "gl12") {
    return blockprec::PriorKind::gl12;
  }
  throw blockprec::InvalidInputError("unknown kind '" + kind + "' (expected gl1 or gl12)");
}

}  // namespace

int main(int argc, char** argv) {
  blockprec::apply_thread_cap();

  CLI::App app{"blockprec: block-structured sparse precision estimation"};
  app.require_subcommand(1);

  CommonFlags common;
  app.add_option("--seed", common.seed, "RNG seed")->capture_default_str();
  app.add_option("--config", common.config_path, "JSON config file");
  app.add_option("--out", common.out_dir, "output directory")->capture_default_str();
  app.add_option("--format", common.format, "stdout payload: json|csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  // ---- synth ----
  auto* synth_cmd = app.add_subcommand("synth", "generate block-structured Gaussian data");
  std::string synth_groups = "5,5,5";
  blockprec::SynthSpec synth_spec;
  synth_cmd->add_option("--groups", synth_groups, "group sizes, e.g. 5,5,5")->capture_default_str();
  synth_cmd->add_option("--n", synth_spec.n, "sample count")->capture_default_str();
  synth_cmd->add_option("--within", synth_spec.within, "within-block precision entry")
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth_spec.noise, "between-block noise half-width")
      ->capture_default_str();

  // ---- estimate ----
  auto* est_cmd = app.add_subcommand("estimate", "fit a precision matrix at fixed penalties");
  std::string est_data;
  std::string est_scatter;
  bool est_header = false;
  int est_n = 0;
  double est_tik = -1.0;
  std::string est_kind = "gl1";
  std::string est_partition;
  bool est_scale_by_n = false;
  PenaltyFlags est_pf;
  double est_tol = 1e-6;
  int est_max_iter = 5000;
  est_cmd->add_option("--data", est_data, "data CSV (rows = observations)");
  est_cmd->add_flag("--header", est_header, "data CSV has a header row");
  est_cmd->add_option("--scatter", est_scatter, "scatter matrix CSV (alternative to --data)");
  est_cmd->add_option("--n", est_n, "sample count when using --scatter");
  est_cmd->add_option("--tikhonov", est_tik, "closed-form (S + lambda I)^{-1} with this lambda");
  est_cmd->add_option("--kind", est_kind, "gl1|gl12")->capture_default_str();
  est_cmd->add_option("--partition", est_partition, "group labels, e.g. 0,0,1");
  est_cmd->add_flag("--scale-by-n", est_scale_by_n,
                    "treat penalties as prior rates under the N/2 likelihood");
  est_cmd->add_option("--tol", est_tol, "duality-gap tolerance")->capture_default_str();
  est_cmd->add_option("--max-iter", est_max_iter, "iteration cap")->capture_default_str();
  add_penalty_flags(est_cmd, est_pf);

  // ---- bound ----
  auto* bound_cmd = app.add_subcommand("bound", "closed-form log normalizer bounds");
  int bound_dim = 0;
  std::string bound_partition;
  std::string bound_kind = "gl1";
  PenaltyFlags bound_pf;
  bound_cmd->add_option("--dim", bound_dim, "matrix dimension");
  bound_cmd->add_option("--partition", bound_partition, "group labels")->required();
  bound_cmd->add_option("--kind", bound_kind, "gl1|gl12")->capture_default_str();
  add_penalty_flags(bound_cmd, bound_pf);

  // ---- logz ----
  auto* logz_cmd = app.add_subcommand("logz", "importance-sampling log normalizer estimate");
  std::string logz_partition;
  std::string logz_kind = "gl1";
  long long logz_samples = 100000;
  PenaltyFlags logz_pf;
  logz_cmd->add_option("--partition", logz_partition, "group labels")->required();
  logz_cmd->add_option("--kind", logz_kind, "gl1|gl12")->capture_default_str();
  logz_cmd->add_option("--samples", logz_samples, "importance samples")->capture_default_str();
  add_penalty_flags(logz_cmd, logz_pf);

  // ---- sample ----
  auto* sample_cmd = app.add_subcommand("sample", "Gibbs sampling study of the matrix priors");
  std::string sample_partition;
  std::string sample_kind = "gl1";
  blockprec::ChainConfig chain_cfg;
  int sample_chains = 1;
  PenaltyFlags sample_pf;
  sample_cmd->add_option("--partition", sample_partition, "group labels")->required();
  sample_cmd->add_option("--kind", sample_kind, "gl1|gl12")->capture_default_str();
  sample_cmd->add_option("--sweeps", chain_cfg.n_sweeps, "total sweeps (incl. burn-in)")
      ->capture_default_str();
  sample_cmd->add_option("--burn-in", chain_cfg.burn_in, "burn-in sweeps")->capture_default_str();
  sample_cmd->add_option("--thin", chain_cfg.thin, "record every thin-th sweep")
      ->capture_default_str();
  sample_cmd->add_option("--chains", sample_chains, "independent chains")->capture_default_str();
  sample_cmd->add_flag("--randomized-order", chain_cfg.randomized_order,
                       "shuffle the entry update order each sweep");
  add_penalty_flags(sample_cmd, sample_pf);

  // ---- search ----
  auto* search_cmd = app.add_subcommand("search", "learn the block structure from data");
  std::string search_data;
  bool search_header = false;
  std::string search_method = "gl1-ue";
  PenaltyFlags search_pf;
  double search_tol = 1e-6;
  int search_max_iter = 5000;
  search_cmd->add_option("--data", search_data, "data CSV")->required();
  search_cmd->add_flag("--header", search_header, "data CSV has a header row");
  search_cmd->add_option("--method", search_method, "gl1-ug|gl1-ue|gl12-ug|gl12-ue")
      ->capture_default_str();
  search_cmd->add_option("--tol", search_tol, "solver duality-gap tolerance")
      ->capture_default_str();
  search_cmd->add_option("--max-iter", search_max_iter, "solver iteration cap")
      ->capture_default_str();
  add_penalty_flags(search_cmd, search_pf);

  // ---- cv ----
  auto* cv_cmd = app.add_subcommand("cv", "five-fold cross-validated method comparison");
  std::string cv_data;
  bool cv_header = false;
  std::string cv_methods = "t,il1";
  std::string cv_known_groups;
  blockprec::CvOptions cv_opts;
  cv_cmd->add_option("--data", cv_data, "data CSV")->required();
  cv_cmd->add_flag("--header", cv_header, "data CSV has a header row");
  cv_cmd->add_option("--methods", cv_methods, "comma list: t,il1,gl12-k,gl1-ug,gl1-ue,gl12-ug,gl12-ue")
      ->capture_default_str();
  cv_cmd->add_option("--known-groups", cv_known_groups, "labels for gl12-k");
  cv_cmd->add_option("--folds", cv_opts.outer_folds, "outer folds")->capture_default_str();
  cv_cmd->add_option("--grid-points", cv_opts.grid.points, "grid points per penalty")
      ->capture_default_str();
  cv_cmd->add_option("--grid-top", cv_opts.grid.top, "largest grid value")->capture_default_str();
  cv_cmd->add_option("--grid-bottom", cv_opts.grid.bottom, "smallest grid value")
      ->capture_default_str();
  cv_cmd->add_option("--alpha0", cv_opts.alpha_0, "Dirichlet strength")->capture_default_str();
  cv_cmd->add_flag("--absorb", cv_opts.absorb_penalties,
                   "use grid values directly as objective rates (no N scaling)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    common.load_config();

    if (synth_cmd->parsed()) {
      synth_spec.seed = common.seed;
      std::vector<int> sizes = parse_int_list(synth_groups);
      synth_spec.group_sizes = sizes;
      const blockprec::SynthResult res = blockprec::synth_blocks(synth_spec);
      const auto data_path = common.out_path("data.csv");
      blockprec::write_matrix_csv(data_path.string(), res.data.rows);
      const auto omega_path = common.out_path("omega_true.csv");
      blockprec::write_matrix_csv(omega_path.string(), res.omega_true.dense());
      Json report;
      report["command"] = "synth";
      report["n"] = res.data.n();
      report["dim"] = res.data.dim();
      report["planted"] = blockprec::to_json(res.planted);
      report["files"] = {{"data", data_path.string()}, {"omega_true", omega_path.string()}};
      const auto planted_path = common.out_path("planted.json");
      blockprec::write_text(planted_path.string(),
                            blockprec::to_json(res.planted).dump(2) + "\n");
      report["files"]["planted"] = planted_path.string();
      emit(report, common);
      return 0;
    }

    if (est_cmd->parsed()) {
      blockprec::SymMatrix scatter;
      int n = 0;
      if (!est_data.empty()) {
        const blockprec::Dataset raw = blockprec::ingest_csv(est_data, est_header);
        auto [std_data, stats] = blockprec::standardize(raw);
        scatter = stats.scatter;
        n = stats.n;
      } else if (!est_scatter.empty()) {
        scatter = blockprec::SymMatrix::from_dense(blockprec::read_matrix_csv(est_scatter), 1e-8);
        n = est_n > 0 ? est_n : 2;
      } else {
        throw blockprec::InvalidInputError("estimate: need --data or --scatter");
      }

      Json report;
      report["command"] = "estimate";
      blockprec::SymMatrix omega;
      if (est_tik >= 0.0) {
        omega = blockprec::tikhonov(scatter, est_tik);
        report["method"] = "tikhonov";
        report["lambda"] = est_tik;
      } else {
        if (est_partition.empty()) {
          throw blockprec::InvalidInputError("estimate: need --partition (or --tikhonov)");
        }
        const blockprec::Partition p(parse_int_list(est_partition));
        const blockprec::PenaltyConfig c = est_pf.resolve(common);
        blockprec::SolverOptions sopts;
        sopts.tol = est_tol;
        sopts.max_iter = est_max_iter;
        const int n_eff = est_scale_by_n ? n : 0;
        const blockprec::PriorKind kind = parse_kind(est_kind);
        const blockprec::FitResult fit =
            kind == blockprec::PriorKind::gl1
                ? blockprec::fit_l1(scatter, blockprec::entry_penalties(p, c), n_eff, sopts)
                : blockprec::fit_gl12(scatter, p, c, n_eff, sopts);
        omega = fit.omega;
        report["method"] = est_kind;
        report["penalties"] = blockprec::to_json(c);
        report["fit"] = blockprec::to_json(fit);
        if (!fit.converged) {
          report["warning"] = "solver did not reach the requested duality gap";
        }
      }
      const auto omega_path = common.out_path("omega.csv");
      blockprec::write_matrix_csv(omega_path.string(), omega.dense());
      report["files"] = {{"omega", omega_path.string()}};
      if (common.format == "csv") {
        std::cout << blockprec::matrix_csv(omega.dense());
      } else {
        emit(report, common);
      }
      return 0;
    }

    if (bound_cmd->parsed()) {
      const blockprec::Partition p(parse_int_list(bound_partition));
      if (bound_dim > 0 && bound_dim != p.dim()) {
        throw blockprec::InvalidInputError("bound: --dim disagrees with --partition length");
      }
      const blockprec::PenaltyConfig c = bound_pf.resolve(common);
      const blockprec::PriorKind kind = parse_kind(bound_kind);
      Json report;
      report["command"] = "bound";
      report["kind"] = bound_kind;
      report["partition"] = blockprec::to_json(p);
      report["penalties"] = blockprec::to_json(c);
      report["log_bound"] = blockprec::log_bound(kind, p, c);
      emit(report, common);
      return 0;
    }

    if (logz_cmd->parsed()) {
      const blockprec::Partition p(parse_int_list(logz_partition));
      const blockprec::PenaltyConfig c = logz_pf.resolve(common);
      const blockprec::PriorKind kind = parse_kind(logz_kind);
      const blockprec::LogZEstimate est =
          blockprec::estimate_logz_is(p, c, kind, logz_samples, common.seed);
      Json report;
      report["command"] = "logz";
      report["kind"] = logz_kind;
      report["partition"] = blockprec::to_json(p);
      report["penalties"] = blockprec::to_json(c);
      report["estimate"] = blockprec::to_json(est);
      report["log_bound"] = blockprec::log_bound(kind, p, c);
      report["exact_2d"] = nullptr;
      if (p.dim() == 2) {
        try {
          report["exact_2d"] = blockprec::exact_logz_2d(c, p.groups() == 1);
        } catch (const blockprec::Error&) {
          // config outside the closed form's domain: leave null
        }
      }
      emit(report, common);
      return 0;
    }

    if (sample_cmd->parsed()) {
      const blockprec::Partition p(parse_int_list(sample_partition));
      const blockprec::PenaltyConfig c = sample_pf.resolve(common);
      const blockprec::PriorKind kind = parse_kind(sample_kind);
      chain_cfg.seed = common.seed;
      const std::vector<blockprec::ChainSummary> chains =
          blockprec::run_chains(kind, p, c, chain_cfg, sample_chains);
      const blockprec::ChainSummary pooled = blockprec::pool_summaries(chains);
      const auto mean_abs_path = common.out_path("mean_abs.csv");
      blockprec::write_matrix_csv(mean_abs_path.string(), pooled.mean_abs.dense());
      Json report;
      report["command"] = "sample";
      report["kind"] = sample_kind;
      report["partition"] = blockprec::to_json(p);
      report["penalties"] = blockprec::to_json(c);
      report["pooled"] = blockprec::to_json(pooled);
      Json per_chain = Json::array();
      for (const blockprec::ChainSummary& ch : chains) {
        per_chain.push_back(blockprec::to_json(ch));
      }
      report["chains"] = std::move(per_chain);
      report["files"] = {{"mean_abs", mean_abs_path.string()}};
      if (common.format == "csv") {
        std::cout << blockprec::matrix_csv(pooled.mean_abs.dense());
      } else {
        emit(report, common);
      }
      return 0;
    }

    if (search_cmd->parsed()) {
      const blockprec::Dataset raw = blockprec::ingest_csv(search_data, search_header);
      auto [std_data, stats] = blockprec::standardize(raw);
      const blockprec::PenaltyConfig c = search_pf.resolve(common);
      blockprec::SearchOptions sopts;
      sopts.solver.tol = search_tol;
      sopts.solver.max_iter = search_max_iter;
      bool greedy;
      if (search_method == "gl1-ug" || search_method == "gl12-ug") {
        greedy = true;
      } else if (search_method == "gl1-ue" || search_method == "gl12-ue") {
        greedy = false;
      } else {
        throw blockprec::InvalidInputError("search: unknown --method '" + search_method + "'");
      }
      sopts.kind = search_method.rfind("gl1-", 0) == 0 ? blockprec::PriorKind::gl1
                                                       : blockprec::PriorKind::gl12;
      const blockprec::SearchReport res = greedy ? blockprec::greedy_search(stats, c, sopts)
                                                 : blockprec::exhaustive_search(stats, c, sopts);
      const auto omega_path = common.out_path("omega.csv");
      blockprec::write_matrix_csv(omega_path.string(), res.final_omega.dense());
      Json report = blockprec::to_json(res);
      report["command"] = "search";
      report["method"] = search_method;
      report["penalties"] = blockprec::to_json(c);
      report["files"] = {{"omega", omega_path.string()}};
      emit(report, common);
      return 0;
    }

    if (cv_cmd->parsed()) {
      const blockprec::Dataset raw = blockprec::ingest_csv(cv_data, cv_header);
      cv_opts.seed = common.seed;
      if (!cv_known_groups.empty()) {
        cv_opts.known_groups = blockprec::Partition(parse_int_list(cv_known_groups));
      }
      std::vector<blockprec::Method> methods;
      std::stringstream ss(cv_methods);
      std::string name;
      while (std::getline(ss, name, ',')) {
        if (!name.empty()) {
          methods.push_back(blockprec::method_from_name(name));
        }
      }
      if (methods.empty()) {
        throw blockprec::InvalidInputError("cv: no methods given");
      }
      const blockprec::CvReport res = blockprec::cross_validate(raw, methods, cv_opts);
      Json report = blockprec::to_json(res);
      report["command"] = "cv";
      emit(report, common);
      return 0;
    }

    throw blockprec::InvalidInputError("no subcommand given");
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
