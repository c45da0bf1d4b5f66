#include "captive/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace captive {

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) {
  std::ostringstream os;
  const YAML::Mark mark = node.Mark();
  if (mark.is_null())
    os << field << ": " << what;
  else
    os << (mark.line + 1) << ':' << (mark.column + 1) << ": " << field << ": " << what;
  throw ConfigError(os.str());
}

double to_double(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, field, "expected a decimal number");
  const std::string& s = node.Scalar();
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v, std::chars_format::general);
  if (ec != std::errc() || ptr != end || s.empty())
    fail(node, field, "'" + s + "' is not a decimal number");
  return v;
}

std::uint64_t to_unsigned(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, field, "expected a non-negative integer");
  const std::string& s = node.Scalar();
  std::uint64_t v = 0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty())
    fail(node, field, "'" + s + "' is not a non-negative integer");
  return v;
}

std::vector<double> to_doubles(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence()) fail(node, field, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i)
    out.push_back(to_double(node[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

void check_keys(const YAML::Node& node, const std::string& section,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(node, section, "expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, section.empty() ? key : section + "." + key, "unknown field");
  }
}

}  // namespace

CircleMap ExperimentConfig::make_map() const {
  return CircleMap(map.degree, TrigPoly(0.0, map.sin, map.cos));
}

RoofFunction ExperimentConfig::make_tau(const CircleMap& m) const {
  TrigPoly poly(tau.constant, tau.sin, tau.cos);
  if (tau.coboundary)
    return RoofFunction::coboundary(TrigPoly(0.0, tau.coboundary->first, tau.coboundary->second),
                                    0.0, m, poly);
  return RoofFunction(poly);
}

PerturbationFamily ExperimentConfig::make_family(const CircleMap& m) const {
  const FamilySpec spec = family.value_or(FamilySpec{});
  return fourier_family(make_tau(m), spec.modes, spec.scale);
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    std::ostringstream os;
    os << (e.mark.line + 1) << ':' << (e.mark.column + 1) << ": " << e.msg;
    throw ConfigError(os.str());
  }
  ExperimentConfig cfg;
  if (root.IsNull()) return cfg;
  check_keys(root, "",
             {"map", "tau", "family", "R", "R_tilde", "n", "strategy", "rho", "samples", "seed",
              "workers", "x", "b", "period", "witness", "jac", "output"});

  if (const auto m = root["map"]) {
    check_keys(m, "map", {"degree", "sin", "cos"});
    if (m["degree"]) {
      const auto d = to_unsigned(m["degree"], "map.degree");
      if (d < 2) fail(m["degree"], "map.degree", "degree must be at least 2");
      cfg.map.degree = static_cast<unsigned>(d);
    }
    if (m["sin"]) cfg.map.sin = to_doubles(m["sin"], "map.sin");
    if (m["cos"]) cfg.map.cos = to_doubles(m["cos"], "map.cos");
  }
  if (const auto t = root["tau"]) {
    check_keys(t, "tau", {"constant", "sin", "cos", "coboundary"});
    if (t["constant"]) cfg.tau.constant = to_double(t["constant"], "tau.constant");
    if (t["sin"]) cfg.tau.sin = to_doubles(t["sin"], "tau.sin");
    if (t["cos"]) cfg.tau.cos = to_doubles(t["cos"], "tau.cos");
    if (const auto c = t["coboundary"]) {
      check_keys(c, "tau.coboundary", {"sin", "cos"});
      std::vector<double> s, k;
      if (c["sin"]) s = to_doubles(c["sin"], "tau.coboundary.sin");
      if (c["cos"]) k = to_doubles(c["cos"], "tau.coboundary.cos");
      cfg.tau.coboundary = std::make_pair(s, k);
    }
  }
  if (const auto f = root["family"]) {
    check_keys(f, "family", {"modes", "scale"});
    FamilySpec spec;
    if (f["modes"]) spec.modes = to_unsigned(f["modes"], "family.modes");
    if (f["scale"]) spec.scale = to_double(f["scale"], "family.scale");
    if (spec.modes == 0) fail(f["modes"], "family.modes", "need at least one mode");
    cfg.family = spec;
  }
  if (root["R"]) {
    cfg.R = to_double(root["R"], "R");
    if (!(*cfg.R > 0.0)) fail(root["R"], "R", "must be positive");
  }
  if (root["R_tilde"]) {
    cfg.R_tilde = to_double(root["R_tilde"], "R_tilde");
    if (!(*cfg.R_tilde > 0.0)) fail(root["R_tilde"], "R_tilde", "must be positive");
  }
  if (const auto n = root["n"]) {
    if (n.IsScalar()) {
      cfg.depths.push_back(to_unsigned(n, "n"));
    } else {
      if (!n.IsSequence()) fail(n, "n", "expected an integer or a list of integers");
      for (std::size_t i = 0; i < n.size(); ++i)
        cfg.depths.push_back(to_unsigned(n[i], "n[" + std::to_string(i) + "]"));
    }
    for (std::size_t i = 0; i < cfg.depths.size(); ++i)
      if (cfg.depths[i] < 1)
        fail(n.IsSequence() ? n[i] : n, n.IsSequence() ? "n[" + std::to_string(i) + "]" : "n",
             "depths must be at least 1");
  }
  if (const auto s = root["strategy"]) {
    check_keys(s, "strategy", {"kind", "points", "cap", "refine_points", "max_rounds"});
    const std::string kind = s["kind"] ? s["kind"].as<std::string>() : "grid";
    auto count = [&](const char* key, std::size_t dflt) {
      if (!s[key]) return dflt;
      const auto v = to_unsigned(s[key], std::string("strategy.") + key);
      if (v == 0) fail(s[key], std::string("strategy.") + key, "must be positive");
      return static_cast<std::size_t>(v);
    };
    if (kind == "grid") {
      cfg.strategy = GridStrategy{count("points", 512)};
    } else if (kind == "paper_grid") {
      cfg.strategy = PaperGridStrategy{count("cap", 1u << 16)};
    } else if (kind == "adaptive") {
      cfg.strategy = AdaptiveStrategy{count("points", 64), count("refine_points", 16),
                                      count("max_rounds", 12)};
    } else {
      fail(s["kind"], "strategy.kind", "expected grid, paper_grid or adaptive");
    }
  }
  if (root["rho"]) {
    cfg.rho = to_double(root["rho"], "rho");
    if (!(*cfg.rho > 0.0)) fail(root["rho"], "rho", "must be positive");
  }
  if (root["samples"]) cfg.samples = to_unsigned(root["samples"], "samples");
  if (root["seed"]) cfg.seed = to_unsigned(root["seed"], "seed");
  if (root["workers"]) cfg.workers = to_unsigned(root["workers"], "workers");
  if (const auto x = root["x"]) {
    cfg.base_points = x.IsSequence() ? to_doubles(x, "x") : std::vector<double>{to_double(x, "x")};
  }
  if (const auto b = root["b"]) {
    cfg.thresholds = b.IsSequence() ? to_doubles(b, "b") : std::vector<double>{to_double(b, "b")};
  }
  if (root["period"]) cfg.max_period = to_unsigned(root["period"], "period");
  if (const auto w = root["witness"]) {
    check_keys(w, "witness", {"N", "q"});
    if (w["N"]) cfg.witness_N = to_unsigned(w["N"], "witness.N");
    if (w["q"]) cfg.witness_q = to_unsigned(w["q"], "witness.q");
  }
  if (const auto j = root["jac"]) {
    check_keys(j, "jac", {"p", "nu", "trials"});
    if (j["p"]) cfg.jac_p = to_unsigned(j["p"], "jac.p");
    if (j["nu"]) cfg.jac_nu = to_unsigned(j["nu"], "jac.nu");
    if (j["trials"]) cfg.jac_trials = to_unsigned(j["trials"], "jac.trials");
  }
  if (const auto o = root["output"]) {
    check_keys(o, "output", {"json", "csv"});
    if (o["json"]) cfg.json_path = o["json"].as<std::string>();
    if (o["csv"]) cfg.csv_path = o["csv"].as<std::string>();
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ":" + e.what());
  }
}

}  // namespace captive
