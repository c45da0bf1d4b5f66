#include "captive/report.hpp"

#include <iomanip>
#include <sstream>

namespace captive {

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

Json words_json(const std::vector<Word>& words) {
  Json arr = Json::array();
  for (const auto& w : words) arr.push_back(w.to_string());
  return arr;
}

Json to_json(const CaptivityReport& report) {
  Json j;
  j["R"] = report.R;
  j["lambda"] = report.lambda;
  j["Lambda"] = report.Lambda;
  j["sup_deriv"] = report.sup_deriv;
  j["strategy"] = report.strategy;
  j["sup_semantics"] = "lower_bound";
  Json recs = Json::array();
  for (const auto& r : report.records) {
    Json e;
    e["n"] = r.n;
    e["ncal"] = r.ncal;
    e["root"] = r.root;
    e["witness_x"] = r.witness_x;
    e["witness_slope"] = r.witness_slope;
    e["witness_words"] = words_json(r.witness_words);
    e["m"] = r.m_value;
    e["n_weighted"] = r.n_value;
    e["chi"] = r.chi;
    e["marginal"] = r.marginal;
    recs.push_back(std::move(e));
  }
  j["records"] = std::move(recs);
  return j;
}

Json to_json(const FeketeRoots& roots) {
  Json j;
  j["exact"] = roots.exact;
  j["any_violation"] = roots.any_violation;
  Json arr = Json::array();
  for (const auto& e : roots.entries)
    arr.push_back(Json{{"n", e.n}, {"value", e.value}, {"root", e.root}, {"violation", e.violation}});
  j["entries"] = std::move(arr);
  return j;
}

Json to_json(const ProofConstants& c) {
  Json j;
  j["rho"] = c.rho;
  j["lambda"] = c.lambda;
  j["Lambda"] = c.Lambda;
  j["N"] = c.N;
  j["q"] = c.q;
  j["J"] = c.J();
  j["epsilon"] = c.epsilon;
  Json arr = Json::array();
  for (const auto& iv : c.intervals) arr.push_back(Json::array({iv.a, iv.b}));
  j["intervals"] = std::move(arr);
  j["valid"] = c.satisfies_definitions();
  return j;
}

Json to_json(const Witness& w) {
  Json j;
  j["x"] = w.x;
  j["slope"] = w.slope;
  j["interval_index"] = w.interval_index;
  j["count"] = w.count;
  j["size_threshold"] = w.size_threshold;
  j["B"] = words_json(w.B);
  Json groups = Json::array();
  for (const auto& beta : w.B) {
    const auto& members = w.sigma.at(beta);
    groups.push_back(Json{{"beta", beta.to_string()}, {"size", members.size()},
                          {"words", words_json(members)}});
  }
  j["sigma"] = std::move(groups);
  return j;
}

Json to_json(const ScanReport& r) {
  Json j;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["parameters"] = r.parameters;
  j["grid_points"] = r.grid_points;
  j["R"] = r.R;
  j["rho"] = r.rho;
  Json arr = Json::array();
  for (const auto& d : r.depths)
    arr.push_back(Json{{"n", d.n}, {"threshold", d.threshold}, {"exceed", d.exceed},
                       {"fraction", d.fraction}, {"std_error", d.std_error}});
  j["depths"] = std::move(arr);
  return j;
}

Json to_json(const JacSurvey& s) {
  Json j;
  j["trials"] = s.trials;
  j["evaluations"] = s.evaluations;
  j["min_jac"] = s.min_jac;
  j["median_jac"] = s.median_jac;
  j["at_least_one"] = s.at_least_one;
  j["required_scale"] = s.required_scale;
  return j;
}

void write_csv(std::ostream& os, const CaptivityReport& report) {
  os << kCaptivityCsvHeader << '\n';
  for (const auto& r : report.records)
    os << r.n << ',' << r.ncal << ',' << format_number(r.root) << ','
       << format_number(r.m_value) << ',' << format_number(r.n_value) << ','
       << format_number(r.chi) << '\n';
}

void write_csv(std::ostream& os, const ScanReport& report) {
  os << kScanCsvHeader << '\n';
  for (const auto& d : report.depths)
    os << d.n << ',' << format_number(d.threshold) << ',' << d.exceed << ',' << report.samples
       << ',' << format_number(d.fraction) << ',' << format_number(d.std_error) << '\n';
}

}  // namespace captive
