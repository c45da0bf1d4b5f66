// captive: command-line front end for the partial-captivity diagnostics.
//
//   captive <command> --config experiment.yaml [--json out.json] [--csv out.csv]
//
// Exit codes: 0 success, 2 configuration/validation failure, 3 numerically
// marginal result (guard-band disagreement), 1 any other failure.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "captive/branch_enum.hpp"
#include "captive/captivity.hpp"
#include "captive/config.hpp"
#include "captive/genericity.hpp"
#include "captive/parallel.hpp"
#include "captive/report.hpp"

using namespace captive;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitMarginal = 3;

struct Outcome {
  Json result;
  bool marginal = false;
  std::function<void(std::ostream&)> csv;
  std::optional<Json> input;  // replaces the config echo
};

struct Context {
  ExperimentConfig cfg;
  std::size_t workers = 1;
};

double require_R(const ExperimentConfig& cfg) {
  if (!cfg.R) throw ConfigError("R: required for this command");
  return *cfg.R;
}

const std::vector<std::size_t>& require_depths(const ExperimentConfig& cfg) {
  if (cfg.depths.empty()) throw ConfigError("n: at least one depth is required");
  return cfg.depths;
}

std::uint64_t require_seed(const ExperimentConfig& cfg) {
  if (!cfg.seed) throw ConfigError("seed: required whenever sampling is used");
  return *cfg.seed;
}

std::vector<double> base_points(const ExperimentConfig& cfg, std::size_t n, double Lambda) {
  if (!cfg.base_points.empty()) return cfg.base_points;
  return sample_points(cfg.strategy, n, Lambda);
}

Json input_json(const ExperimentConfig& cfg) {
  Json in;
  in["map"] = Json{{"degree", cfg.map.degree}, {"sin", cfg.map.sin}, {"cos", cfg.map.cos}};
  Json tau{{"constant", cfg.tau.constant}, {"sin", cfg.tau.sin}, {"cos", cfg.tau.cos}};
  if (cfg.tau.coboundary)
    tau["coboundary"] = Json{{"sin", cfg.tau.coboundary->first}, {"cos", cfg.tau.coboundary->second}};
  in["tau"] = std::move(tau);
  if (cfg.R) in["R"] = *cfg.R;
  if (cfg.R_tilde) in["R_tilde"] = *cfg.R_tilde;
  in["n"] = cfg.depths;
  in["strategy"] = strategy_name(cfg.strategy);
  if (cfg.rho) in["rho"] = *cfg.rho;
  if (cfg.seed) in["seed"] = *cfg.seed;
  if (cfg.samples) in["samples"] = cfg.samples;
  return in;
}

Outcome run_ncal(const Context& ctx) {
  const CircleMap map = ctx.cfg.make_map();
  const RoofFunction tau = ctx.cfg.make_tau(map);
  auto report = std::make_shared<CaptivityReport>(captivity_report(
      map, tau, require_R(ctx.cfg), require_depths(ctx.cfg), ctx.cfg.strategy, ctx.workers));
  Outcome out;
  out.result = to_json(*report);
  out.marginal = report->any_marginal();
  out.csv = [report](std::ostream& os) { write_csv(os, *report); };
  return out;
}

Outcome run_weighted(const Context& ctx) {
  const CircleMap map = ctx.cfg.make_map();
  const RoofFunction tau = ctx.cfg.make_tau(map);
  const double R = require_R(ctx.cfg);
  Json recs = Json::array();
  for (std::size_t n : require_depths(ctx.cfg)) {
    const auto mi = weighted_m(map, tau, R, n, ctx.cfg.strategy, TransversalityMode::intersecting, ctx.workers);
    const auto md = weighted_m(map, tau, R, n, ctx.cfg.strategy, TransversalityMode::disjoint, ctx.workers);
    const auto wn = weighted_n(map, tau, R, n, ctx.cfg.strategy, ctx.workers);
    const auto pts = sample_points(ctx.cfg.strategy, n, map.Lambda());
    double dmax = 0.0;
    for (double x : pts) dmax = std::max(dmax, distortion_sum(map, x, n));
    recs.push_back(Json{{"n", n},
                        {"m_intersecting", mi.value},
                        {"m_intersecting_x", mi.x},
                        {"m_reference", mi.reference.to_string()},
                        {"m_disjoint", md.value},
                        {"n_weighted", wn.value},
                        {"n_weighted_x", wn.x},
                        {"n_weighted_slope", wn.slope},
                        {"distortion_max", dmax},
                        {"chi", chi_estimate(map, n, pts)}});
  }
  return {Json{{"records", recs}}, false, {}, {}};
}

Outcome run_roots(const Context& ctx) {
  const CircleMap map = ctx.cfg.make_map();
  const RoofFunction tau = ctx.cfg.make_tau(map);
  std::vector<std::pair<std::size_t, double>> values;
  bool marginal = false;
  for (std::size_t n : require_depths(ctx.cfg)) {
    const auto r = ncal(map, tau, require_R(ctx.cfg), n, ctx.cfg.strategy, ctx.workers);
    values.emplace_back(n, static_cast<double>(r.value));
    marginal = marginal || r.marginal;
  }
  // grid sups are lower bounds, so violations are advisory
  return {to_json(fekete_roots(values, false)), marginal, {}, {}};
}

Outcome run_distortion(const Context& ctx) {
  const CircleMap map = ctx.cfg.make_map();
  Json recs = Json::array();
  double C = 1.0;
  struct Row {
    std::size_t n;
    double lo, hi;
    std::vector<std::size_t> counts;
  };
  std::vector<Row> rows;
  for (std::size_t n : require_depths(ctx.cfg)) {
    const auto pts = base_points(ctx.cfg, n, map.Lambda());
    std::vector<double> sums(pts.size());
    parallel_for(pts.size(), ctx.workers, [&](std::size_t i) { sums[i] = distortion_sum(map, pts[i], n); });
    Row row{n, *std::min_element(sums.begin(), sums.end()), *std::max_element(sums.begin(), sums.end()), {}};
    C = std::max({C, row.hi, 1.0 / row.lo});
    for (double b : ctx.cfg.thresholds) {
      std::size_t best = 0;
      for (double x : pts) best = std::max(best, count_small_derivative(map, x, n, b));
      row.counts.push_back(best);
    }
    rows.push_back(std::move(row));
  }
  bool all_hold = true;
  for (const auto& row : rows) {
    Json counts = Json::array();
    for (std::size_t k = 0; k < ctx.cfg.thresholds.size(); ++k) {
      const double b = ctx.cfg.thresholds[k];
      const double bound = C * std::exp(b * static_cast<double>(row.n));
      const bool holds = static_cast<double>(row.counts[k]) <= bound;
      all_hold = all_hold && holds;
      counts.push_back(Json{{"b", b}, {"count", row.counts[k]}, {"bound", bound}, {"holds", holds}});
    }
    recs.push_back(Json{{"n", row.n}, {"min_sum", row.lo}, {"max_sum", row.hi}, {"small_derivative", counts}});
  }
  return {Json{{"lambda", map.lambda()}, {"Lambda", map.Lambda()}, {"distortion_constant", C},
               {"lemma_bound_holds", all_hold}, {"records", recs}},
          false, {}, {}};
}

Outcome run_coboundary(const Context& ctx) {
  const CircleMap map = ctx.cfg.make_map();
  const RoofFunction tau = ctx.cfg.make_tau(map);
  const double x = ctx.cfg.base_points.empty() ? 0.0 : ctx.cfg.base_points.front();
  Json recs = Json::array();
  double obstruction = 0.0;
  for (std::size_t n : require_depths(ctx.cfg)) {
    const auto s = coboundary_spread(map, tau, x, n, ctx.cfg.max_period);
    obstruction = s.birkhoff_obstruction;
    recs.push_back(Json{{"n", n}, {"spread", s.spread}, {"tail", tail_bound(tau, map.lambda(), n)}});
  }
  return {Json{{"x", x}, {"sup_deriv", tau.sup_deriv()}, {"max_period", ctx.cfg.max_period},
               {"birkhoff_obstruction", obstruction}, {"records", recs}},
          false, {}, {}};
}

Outcome run_appendix_a(const Context& ctx) {
  const CircleMap map = ctx.cfg.make_map();
  const RoofFunction tau = ctx.cfg.make_tau(map);
  const double R = require_R(ctx.cfg);
  if (!ctx.cfg.R_tilde) throw ConfigError("R_tilde: required for appendix-a");
  const double Rt = *ctx.cfg.R_tilde;
  const Theta th = theta(tau, map.lambda(), R);
  Json recs = Json::array();
  bool marginal = false;
  for (std::size_t n : require_depths(ctx.cfg)) {
    const auto nc = ncal(map, tau, R, n, ctx.cfg.strategy, ctx.workers);
    const auto br = ntilde(map, tau, Rt, n, ctx.cfg.strategy, ctx.workers);
    marginal = marginal || nc.marginal;
    Json rec{{"n", n}, {"ncal", nc.value}, {"ntilde_lower", br.lower}, {"ntilde_upper", br.upper}};
    if (th.theta_R >= Rt + th.theta_tau) rec["lower_le_ncal"] = br.lower <= nc.value;
    if (Rt > th.theta_R + th.theta_tau) rec["ncal_le_upper"] = nc.value <= br.upper;
    recs.push_back(std::move(rec));
  }
  return {Json{{"theta_tau", th.theta_tau}, {"theta_R", th.theta_R}, {"R_tilde", Rt}, {"records", recs}},
          marginal, {}, {}};
}

ProofConstants constants_for(const ExperimentConfig& cfg, const CircleMap& map) {
  if (!cfg.rho) throw ConfigError("rho: required for this command");
  ProofConstants c = proof_constants(*cfg.rho, map.lambda(), map.Lambda());
  if (cfg.witness_N) c.N = *cfg.witness_N;
  if (cfg.witness_q) c.q = *cfg.witness_q;
  return c;
}

Outcome run_witness(const Context& ctx) {
  const CircleMap map = ctx.cfg.make_map();
  const RoofFunction tau = ctx.cfg.make_tau(map);
  const ProofConstants c = constants_for(ctx.cfg, map);
  Json recs = Json::array();
  for (std::size_t n : require_depths(ctx.cfg)) {
    const auto w = witness_extract(map, tau, require_R(ctx.cfg), n, c, ctx.cfg.strategy, ctx.workers);
    recs.push_back(Json{{"n", n}, {"witness", w ? to_json(*w) : Json(nullptr)}});
  }
  return {Json{{"constants", to_json(c)}, {"records", recs}}, false, {}, {}};
}

Outcome run_scan(const Context& ctx) {
  const CircleMap map = ctx.cfg.make_map();
  const PerturbationFamily family = ctx.cfg.make_family(map);
  if (!ctx.cfg.rho) throw ConfigError("rho: required for scan");
  if (ctx.cfg.samples == 0) throw ConfigError("samples: must be positive for scan");
  std::size_t grid_points = 64;
  if (const auto* g = std::get_if<GridStrategy>(&ctx.cfg.strategy)) grid_points = g->points;
  auto report = std::make_shared<ScanReport>(parameter_scan(
      map, family, require_R(ctx.cfg), *ctx.cfg.rho, require_depths(ctx.cfg), ctx.cfg.samples,
      require_seed(ctx.cfg), grid_points, ctx.workers));
  Outcome out;
  out.result = to_json(*report);
  out.csv = [report](std::ostream& os) { write_csv(os, *report); };
  return out;
}

Outcome run_jac(const Context& ctx) {
  const CircleMap map = ctx.cfg.make_map();
  const PerturbationFamily family = ctx.cfg.make_family(map);
  const std::size_t n = ctx.cfg.depths.empty() ? ctx.cfg.jac_nu : ctx.cfg.depths.front();
  const auto s = jac_survey(map, family, ctx.cfg.jac_p, ctx.cfg.jac_nu, n, ctx.cfg.jac_trials,
                            require_seed(ctx.cfg));
  Json j = to_json(s);
  j["p"] = ctx.cfg.jac_p;
  j["nu"] = ctx.cfg.jac_nu;
  j["n"] = n;
  j["m"] = family.size();
  return {j, false, {}, {}};
}

void write_outputs(const std::string& command, const ExperimentConfig& cfg, const Outcome& out) {
  Json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = command;
  doc["input"] = out.input ? *out.input : input_json(cfg);
  doc["result"] = out.result;
  doc["marginal"] = out.marginal;
  const std::string text = doc.dump(2) + "\n";
  if (cfg.json_path) {
    std::ofstream f(*cfg.json_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + *cfg.json_path);
    f << text;
  } else {
    std::cout << text;
  }
  if (cfg.csv_path) {
    if (!out.csv) throw ConfigError("output.csv: command '" + command + "' has no CSV form");
    std::ofstream f(*cfg.csv_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + *cfg.csv_path);
    out.csv(f);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial-captivity diagnostics for U(1) extensions of circle expanding maps"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> json_path;
  std::optional<std::string> csv_path;
  std::optional<std::size_t> workers;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"ncal", "cone-overlap counts with witnesses, weighted counts and chi"},
      {"weighted", "weighted counts m (both readings) and n"},
      {"roots", "n-th roots of the counts with submultiplicativity flags"},
      {"distortion", "distortion sums and small-derivative branch counts"},
      {"coboundary", "slope spread and periodic Birkhoff obstruction"},
      {"appendix-a", "certified brackets on the infinite-sum counts"},
      {"witness", "witness sets B and Sigma(beta)"},
      {"constants", "constants N, q and the rate-interval cover"},
      {"scan", "seeded Monte Carlo scan over the perturbation family"},
      {"jac", "Jacobian survey of the parameter map for the Fourier basis"}};

  double rho = 0.0, lambda = 0.0, Lambda = 0.0;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "YAML experiment file");
    sub->add_option("--json", json_path, "JSON report path (default: stdout)");
    sub->add_option("--csv", csv_path, "CSV report path");
    sub->add_option("-w,--workers", workers,
                    std::string("worker threads (default: $") + kWorkersEnv + " or all cores)");
    if (name == "constants") {
      sub->add_option("--rho", rho, "target exponent rho > 0");
      sub->add_option("--lambda", lambda, "lower expansion bound");
      sub->add_option("--Lambda", Lambda, "upper expansion bound");
    }
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  try {
    Context ctx;
    if (!config_path.empty()) ctx.cfg = load_config(config_path);
    if (json_path) ctx.cfg.json_path = json_path;
    if (csv_path) ctx.cfg.csv_path = csv_path;
    ctx.workers = workers ? *workers : (ctx.cfg.workers ? ctx.cfg.workers : default_workers());

    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    if (command == "constants") {
      if (rho > 0.0 || lambda > 0.0 || Lambda > 0.0) {
        if (!(rho > 0.0) || !(lambda > 0.0) || !(Lambda > 0.0))
          throw ConfigError("--rho, --lambda and --Lambda must be given together");
        ctx.cfg.rho = rho;
        out.result = to_json(proof_constants(rho, lambda, Lambda));
        out.input = Json{{"rho", rho}, {"lambda", lambda}, {"Lambda", Lambda}};
      } else {
        if (config_path.empty()) throw ConfigError("constants: give --rho/--lambda/--Lambda or --config");
        out.result = to_json(constants_for(ctx.cfg, ctx.cfg.make_map()));
      }
    } else {
      if (config_path.empty()) throw ConfigError(command + ": --config is required");
      static const std::map<std::string, Outcome (*)(const Context&)> dispatch = {
          {"ncal", run_ncal},         {"weighted", run_weighted}, {"roots", run_roots},
          {"distortion", run_distortion}, {"coboundary", run_coboundary},
          {"appendix-a", run_appendix_a}, {"witness", run_witness}, {"scan", run_scan},
          {"jac", run_jac}};
      out = dispatch.at(command)(ctx);
    }
    write_outputs(command, ctx.cfg, out);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::cerr << command << ": done in " << elapsed.count() << " s\n";
    if (out.marginal) {
      std::cerr << command << ": guard-band disagreement, result is numerically marginal\n";
      return kExitMarginal;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidMap& e) {
    std::cerr << "invalid map: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidConeRadius& e) {
    std::cerr << "invalid cone radius: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
