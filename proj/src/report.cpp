#include <sstream>

#include "selfnorm/cli.hpp"
#include "selfnorm/digest.hpp"
#include "selfnorm/errors.hpp"

namespace selfnorm {

Json to_json(const Rational& q) { return Json{{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}}; }

Json to_json(const mpz_class& z) { return z.get_str(); }

Json to_json(const DyadicBound& b) {
  return Json{{"decimal", b.decimal()},
              {"scaled", b.scaled.get_str()},
              {"bits", b.bits},
              {"rounding", b.rounding == Rounding::Down ? "down" : "up"}};
}

Json to_json(const RadicalBound& r) {
  return Json{{"radicand", to_json(r.radicand)}, {"index", r.index}, {"value", to_json(r.value)}};
}

Json to_json(const HaagerupBound& h) {
  return Json{{"layered", to_json(h.layered)},
              {"flat", to_json(h.flat)},
              {"best", to_json(h.best)},
              {"rapid_decay", Json{{"radius", h.polynomial.radius},
                                   {"sum_of_squares", to_json(h.polynomial.sum_of_squares)},
                                   {"value", to_json(h.polynomial.value)}}}};
}

Json to_json(const NormCertificate& c) {
  Json steps = Json::array();
  for (const auto& s : c.steps) {
    Json layers = Json::array();
    for (const auto& layer : s.profile.layers) layers.push_back(to_json(layer));
    steps.push_back(Json{{"m", s.m},
                         {"c", to_json(s.c)},
                         {"radius", s.radius},
                         {"support", s.support},
                         {"layers", std::move(layers)},
                         {"lower", to_json(s.lower)},
                         {"power_bound", to_json(s.power_bound)},
                         {"upper", to_json(s.upper)}});
  }
  return Json{{"element_hash", c.element_hash},
              {"baseline_lower", to_json(c.baseline_lower)},
              {"baseline_upper", to_json(c.baseline_upper)},
              {"steps", std::move(steps)},
              {"best_lower", to_json(c.best_lower)},
              {"best_upper", to_json(c.best_upper)},
              {"lower_monotone", c.lower_monotone},
              {"truncated", c.truncated},
              {"truncation_reason", c.truncation_reason}};
}

Json to_json(const CascadeReport& c) {
  return Json{{"lambda", to_json(c.lambda)},
              {"g_length", to_json(c.g_length)},
              {"displacement", to_json(c.displacement)},
              {"mu_lambda", to_json(c.mu_lambda)},
              {"epsilon_lambda", to_json(c.epsilon_lambda)},
              {"mu_one", to_json(c.mu_one)},
              {"epsilon_one", to_json(c.epsilon_one)},
              {"sigma_zero", to_json(c.sigma_zero)},
              {"sigma_mu_one", to_json(c.sigma_mu_one)},
              {"nu_term", to_json(c.nu_term)},
              {"C", to_json(c.c_lambda)},
              {"B", to_json(c.b_lambda)},
              {"R", to_json(c.r)},
              {"Lambda", to_json(c.big_lambda)},
              {"D", to_json(c.d)},
              {"threshold", to_json(c.threshold)}};
}

Json Report::body() const {
  Json b{{"schema_version", kSchemaVersion},
         {"command", command},
         {"inputs", inputs},
         {"outputs", outputs},
         {"truncated", truncated}};
  return b;
}

std::string Report::body_hash() const { return sha256_hex(body().dump()); }

Json Report::to_json() const {
  Json j = body();
  j["body_hash"] = body_hash();
  if (timing) j["timing"] = *timing;
  return j;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void flatten(const Json& j, const std::string& path, std::ostringstream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, path.empty() ? k : path + "." + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "." + std::to_string(i), out);
  } else {
    out << csv_field(path) << "," << csv_field(j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

}  // namespace

std::string Report::to_csv() const {
  std::ostringstream out;
  out << "path,value\n";
  flatten(to_json(), "", out);
  return out.str();
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return 4;
  if (dynamic_cast<const BudgetExceeded*>(&e) || dynamic_cast<const CoefficientGrowth*>(&e)) return 3;
  if (dynamic_cast<const HypothesisViolation*>(&e) || dynamic_cast<const ContextMismatch*>(&e)) return 2;
  return 1;
}

Json error_object(const std::exception& e) {
  std::string kind = "error";
  Json extra = Json::object();
  if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
    kind = "parse_error";
    extra["position"] = p->position();
  } else if (const auto* b = dynamic_cast<const BudgetExceeded*>(&e)) {
    kind = "budget_exceeded";
    extra["predicted"] = b->predicted();
    extra["budget"] = b->budget();
  } else if (dynamic_cast<const CoefficientGrowth*>(&e)) {
    kind = "budget_exceeded";
  } else if (dynamic_cast<const HypothesisViolation*>(&e) || dynamic_cast<const ContextMismatch*>(&e)) {
    kind = "hypothesis_violation";
  }
  Json j{{"error", Json{{"kind", kind}, {"message", e.what()}, {"exit_code", exit_code_for(e)}}}};
  for (const auto& [k, v] : extra.items()) j["error"][k] = v;
  return j;
}

}  // namespace selfnorm
