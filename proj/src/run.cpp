#include <chrono>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include "selfnorm/cli.hpp"
#include "selfnorm/errors.hpp"

namespace selfnorm {

void RunConfig::validate() const {
  if (budget == 0) throw HypothesisViolation("budget must be positive");
  if (!is_power_of_two(m_max)) throw HypothesisViolation("m-max must be a power of two");
  if (threads == 0) throw HypothesisViolation("thread count must be at least 1");
  if (precision_bits == 0) throw HypothesisViolation("precision must be positive");
}

namespace {

class Args {
 public:
  explicit Args(const Arguments& values) : values_(values) {}

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  const std::string& text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ParseError("missing required argument --" + key, 0);
    return it->second;
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }

  long integer(const std::string& key) const { return to_integer(key, text(key)); }
  long integer(const std::string& key, long fallback) const { return has(key) ? integer(key) : fallback; }

  unsigned natural(const std::string& key, std::optional<unsigned> fallback = std::nullopt) const {
    if (!has(key)) {
      if (!fallback) text(key);
      return *fallback;
    }
    const long v = integer(key);
    if (v < 0) throw ParseError("--" + key + " must be nonnegative", 0);
    return static_cast<unsigned>(v);
  }

  bool flag(const std::string& key) const {
    if (!has(key)) return false;
    const std::string& v = text(key);
    return v.empty() || v == "1" || v == "true" || v == "yes";
  }

  std::vector<long> integers(const std::string& key) const {
    std::vector<long> out;
    for (const auto& item : split(text(key), ',')) out.push_back(to_integer(key, item));
    return out;
  }

  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
      const auto a = item.find_first_not_of(" \t");
      const auto b = item.find_last_not_of(" \t");
      out.push_back(a == std::string::npos ? "" : item.substr(a, b - a + 1));
    }
    return out;
  }

 private:
  static long to_integer(const std::string& key, const std::string& s) {
    long v = 0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      throw ParseError("--" + key + " expects an integer, got '" + s + "'", 0);
    return v;
  }

  const Arguments& values_;
};

Rational parse_rational_text(const std::string& key, const std::string& s) {
  Rational q;
  if (s.empty() || s.find_first_not_of("+-0123456789/") != std::string::npos ||
      q.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0 || sgn(q.get_den()) == 0)
    throw ParseError("--" + key + " expects a rational p/q, got '" + s + "'", 0);
  q.canonicalize();
  return q;
}

std::string rational_text(const Rational& q) { return q.get_str(); }

ConstantProvider load_provider(const std::string& name) {
  if (name == "default") return ConstantProvider::tree_default();
  if (name == "trivial") return ConstantProvider::trivial();
  std::ifstream in(name);
  if (!in) throw ParseError("cannot read provider file '" + name + "'", 0);
  std::ostringstream text;
  text << in.rdbuf();
  return ConstantProvider::parse(text.str());
}

std::vector<Word> parse_words(const GroupContext& ctx, const std::string& text) {
  std::vector<Word> out;
  for (const auto& item : Args::split(text, ';')) out.push_back(ctx.parse_word(item));
  return out;
}

Json words_json(const GroupContext& ctx, const std::vector<Word>& words) {
  Json out = Json::array();
  for (const auto& w : words) out.push_back(ctx.format(w));
  return out;
}

struct Session {
  const RunConfig& config;
  Args args;
  std::unique_ptr<FileCache> cache;

  GroupContext group() const {
    if (config.group.empty()) throw ParseError("missing required argument --group", 0);
    return GroupContext::parse(config.group);
  }

  CertifyOptions certify_options() const {
    CertifyOptions o;
    o.m_max = config.m_max;
    o.precision_bits = config.precision_bits;
    o.convolve.budget = config.budget;
    o.convolve.threads = config.threads;
    o.store = cache.get();
    return o;
  }

  ScanOptions scan_options() const {
    ScanOptions o;
    o.budget = config.budget;
    o.threads = config.threads;
    return o;
  }
};

Json base_inputs(const GroupContext& ctx) { return Json{{"group", ctx.spec()}}; }

// ---------------------------------------------------------------- norm

Report run_norm(Session& s) {
  const GroupContext ctx = s.group();
  const AlgebraElement x = parse_element(s.args.text("element"), ctx);
  Report r;
  r.command = "norm";
  r.inputs = base_inputs(ctx);
  r.inputs["element"] = serialize(x);
  r.inputs["element_hash"] = element_hash(x);
  r.inputs["m_max"] = s.config.m_max;
  r.inputs["precision_bits"] = s.config.precision_bits;
  r.inputs["budget"] = s.config.budget;
  const NormCertificate cert = certify_norm(x, s.certify_options());
  r.outputs["certificate"] = to_json(cert);
  if (s.args.has("probe")) {
    const AlgebraElement probe = parse_element(s.args.text("probe"), ctx);
    r.inputs["probe"] = serialize(probe);
    r.outputs["vector_lower"] = to_json(vector_lower(x, probe, s.config.precision_bits));
  }
  r.truncated = cert.truncated;
  return r;
}

// ---------------------------------------------------------------- selfless

struct RetractionInput {
  Retraction retraction;
  std::optional<RetractionFamily> family;
};

RetractionInput retraction_from(const Session& s, const GroupContext& ctx) {
  RetractionSpec spec;
  if (s.args.has("retraction")) {
    spec = parse_retraction_spec(ctx, s.args.text("retraction"));
  } else if (s.args.has("image")) {
    const std::uint32_t fresh =
        s.args.has("a") ? ctx.generator_index(s.args.text("a")) : static_cast<std::uint32_t>(ctx.rank() - 1);
    return {custom_retraction(ctx, fresh, ctx.parse_word(s.args.text("image"))), std::nullopt};
  } else {
    std::string text = "g=" + s.args.text("g");
    if (s.args.has("H")) text += ";H=" + s.args.text("H");
    if (s.args.has("a")) text += ";a=" + s.args.text("a");
    spec = parse_retraction_spec(ctx, text);
  }
  if (s.args.has("n")) spec.n = s.args.natural("n");
  RetractionFamily family{ctx, spec.g, spec.layout};
  return {family.at(spec.n), family};
}

Json retraction_json(const Retraction& ret) {
  const auto& ctx = ret.context;
  Json j{{"fresh", ctx.alphabet()[ret.fresh]}, {"image_of_a", ctx.format(ret.image_of_a)}};
  if (ret.g) j["g"] = ctx.format(*ret.g);
  if (ret.g_factor) j["g_factor"] = *ret.g_factor;
  if (ret.h_factor) j["h_factor"] = *ret.h_factor;
  if (ret.n) {
    j["n"] = *ret.n;
    j["h_n"] = ctx.format(ret.h_n);
  }
  return j;
}

Report run_selfless(Session& s, const std::string& action) {
  const GroupContext ctx = s.group();
  const RetractionInput in = retraction_from(s, ctx);
  const Retraction& ret = in.retraction;
  Report r;
  r.command = "selfless " + action;
  r.inputs = base_inputs(ctx);
  r.inputs["retraction"] = retraction_json(ret);
  const ScanOptions scan = s.scan_options();
  const unsigned default_radius = ret.n.value_or(1);

  if (action == "injectivity") {
    const unsigned radius = s.args.natural("radius", default_radius);
    r.inputs["radius"] = radius;
    const InjectivityReport rep = check_injectivity(ret, radius, scan);
    Json collisions = Json::array();
    for (const auto& c : rep.collisions)
      collisions.push_back(
          Json{{"first", ctx.format(c.first)}, {"second", ctx.format(c.second)}, {"image", ctx.format(c.image)}});
    r.outputs = Json{{"radius", rep.radius},          {"ball_size", rep.ball_size},
                     {"injective", rep.injective()},  {"collision_count", rep.collision_count},
                     {"max_fiber", rep.max_fiber},    {"collisions", std::move(collisions)}};
  } else if (action == "fibers") {
    const unsigned radius = s.args.natural("radius", default_radius);
    r.inputs["radius"] = radius;
    const FiberStatistics st = fiber_statistics(ret, radius, scan);
    Json histogram = Json::array();
    for (const auto& [size, count] : st.histogram) histogram.push_back(Json{{"fiber_size", size}, {"images", count}});
    r.outputs = Json{{"radius", st.radius},
                     {"ball_size", st.ball_size},
                     {"image_count", st.image_count},
                     {"max_fiber", st.max_fiber},
                     {"histogram", std::move(histogram)}};
    if (st.largest_fiber_image) r.outputs["largest_fiber_image"] = ctx.format(*st.largest_fiber_image);
  } else if (action == "growth") {
    if (!in.family) throw HypothesisViolation("growth needs a retraction family (g and H), not a custom image");
    const unsigned radius_max = s.args.natural("radius-max", s.args.natural("radius", 8));
    r.inputs["radius_max"] = radius_max;
    r.inputs["retraction"].erase("n");
    r.inputs["retraction"].erase("h_n");
    r.inputs["retraction"].erase("image_of_a");
    const GrowthProfile profile = growth_profile(*in.family, radius_max, scan);
    Json points = Json::array();
    for (const auto& p : profile.points) points.push_back(Json{{"n", p.n}, {"f", p.f}, {"envelope", p.envelope}});
    r.outputs = Json{{"points", std::move(points)},
                     {"nondecreasing", profile.nondecreasing},
                     {"within_envelope", profile.within_envelope},
                     {"root_strictly_decreasing", profile.root_strictly_decreasing}};
  } else if (action == "transfer") {
    if (!in.family) throw HypothesisViolation("transfer needs a retraction family (g and H), not a custom image");
    const AlgebraElement z = parse_element(s.args.text("element"), ctx);
    const Rational epsilon = parse_rational_text("epsilon", s.args.text("epsilon", "1/10"));
    std::vector<TransferStep> schedule;
    for (long m : s.args.has("schedule") ? s.args.integers("schedule") : std::vector<long>{1, 2, 4}) {
      if (m <= 0) throw HypothesisViolation("schedule entries must be positive");
      schedule.push_back({static_cast<unsigned>(m), std::nullopt});
    }
    r.inputs["retraction"].erase("n");
    r.inputs["retraction"].erase("h_n");
    r.inputs["retraction"].erase("image_of_a");
    r.inputs["element"] = serialize(z);
    r.inputs["epsilon"] = rational_text(epsilon);
    r.inputs["schedule"] = Json::array();
    for (const auto& st : schedule) r.inputs["schedule"].push_back(st.m);
    const TransferReport rep = transfer_experiment(z, *in.family, epsilon, schedule, s.certify_options(), scan);
    Json points = Json::array();
    for (const auto& p : rep.points)
      points.push_back(Json{{"m", p.m},
                            {"n", p.n},
                            {"c_source", to_json(p.c_source)},
                            {"c_image", to_json(p.c_image)},
                            {"l2_equal", p.l2_equal},
                            {"injective_on_ball", p.injective_on_ball},
                            {"f", p.f},
                            {"factor_radicand", to_json(p.factor_radicand)},
                            {"factor_index", 4 * p.m},
                            {"factor", to_json(p.factor)},
                            {"source_lower", to_json(p.source_lower)},
                            {"chain_upper", to_json(p.chain_upper)},
                            {"factor_times_lower_radicand", to_json(p.factor_times_lower_radicand)},
                            {"chain_identity", p.chain_identity},
                            {"image_upper", to_json(p.image_upper)},
                            {"success", p.success}});
    r.outputs = Json{{"element_hash", rep.element_hash},
                     {"radius", rep.radius},
                     {"points", std::move(points)},
                     {"factor_strictly_decreasing", rep.factor_strictly_decreasing}};
  } else if (action == "product") {
    const std::vector<Word> s_list = parse_words(ctx, s.args.text("s"));
    std::vector<long> p_list;
    if (s.args.has("p") && !s.args.text("p").empty()) p_list = s.args.integers("p");
    r.inputs["s"] = words_json(ctx, s_list);
    r.inputs["p"] = p_list;
    const ProductWitness w = product_nontriviality(s_list, p_list, ret);
    r.outputs = Json{{"product", ctx.format(w.product)},
                     {"product_length", w.product.length()},
                     {"nontrivial", w.nontrivial},
                     {"regrouped", words_json(ctx, w.regrouped)},
                     {"regrouping_alternates", w.regrouping_alternates}};
  } else {
    throw ParseError("unknown selfless action '" + action + "'", 0);
  }
  return r;
}

// ---------------------------------------------------------------- tree

Report run_tree(Session& s, const std::string& action) {
  Report r;
  r.command = "tree " + action;

  if (action == "cascade") {
    const Rational lambda = parse_rational_text("lambda", s.args.text("lambda"));
    const Rational glen = parse_rational_text("glen", s.args.text("glen"));
    const Rational displacement = parse_rational_text("displacement", s.args.text("displacement", "1"));
    const std::string provider_name = s.args.text("provider", "default");
    const ConstantProvider provider = load_provider(provider_name);
    r.inputs = Json{{"lambda", rational_text(lambda)},
                    {"glen", rational_text(glen)},
                    {"displacement", rational_text(displacement)},
                    {"provider", provider.serialize()}};
    r.outputs = to_json(constant_cascade(lambda, glen, provider, displacement));
    return r;
  }

  const GroupContext ctx = s.group();
  const Word g = ctx.parse_word(s.args.text("g"));
  r.inputs = base_inputs(ctx);
  r.inputs["g"] = ctx.format(g);

  if (action == "length") {
    const auto [core, conjugator] = cyclic_reduce(g);
    r.outputs = Json{{"translation_length", translation_length(g)},
                     {"word_length", g.length()},
                     {"core", ctx.format(core)},
                     {"conjugator", ctx.format(conjugator)}};
    if (!g.is_identity()) {
      const PrimitiveRoot root = primitive_root(g);
      r.outputs["primitive_root"] = ctx.format(root.root);
      r.outputs["root_exponent"] = root.exponent;
    }
  } else if (action == "stable") {
    std::vector<unsigned> samples;
    for (long n : s.args.has("samples") ? s.args.integers("samples") : std::vector<long>{1, 2, 4, 8, 16}) {
      if (n <= 0) throw HypothesisViolation("samples must be positive");
      samples.push_back(static_cast<unsigned>(n));
    }
    r.inputs["samples"] = samples;
    const StableLength st = stable_length(g, samples);
    Json empirical = Json::array();
    for (const auto& [n, q] : st.empirical) empirical.push_back(Json{{"n", n}, {"ratio", to_json(q)}});
    r.outputs = Json{{"exact", st.exact}, {"empirical", std::move(empirical)}};
  } else if (action == "project") {
    const Word h = ctx.parse_word(s.args.text("h"));
    r.inputs["h"] = ctx.format(h);
    const ProjectionResult p = projection_diameter(g, h);
    if (p.unbounded) {
      r.outputs = Json{{"unbounded", true}};
    } else {
      r.outputs = Json{{"unbounded", false},
                       {"diameter", p.diameter},
                       {"first", ctx.format(p.first)},
                       {"last", ctx.format(p.last)}};
    }
    r.outputs["h_in_elementary"] = p.unbounded;
  } else if (action == "path") {
    const std::vector<Word> h_list = parse_words(ctx, s.args.text("h"));
    const std::vector<long> n_list = s.args.integers("n");
    const ConstantProvider provider = load_provider(s.args.text("provider", "default"));
    r.inputs["h"] = words_json(ctx, h_list);
    r.inputs["n"] = n_list;
    r.inputs["provider"] = provider.serialize();
    const PathReport p = admissible_path_check(g, h_list, n_list, provider,
                                               static_cast<std::uint64_t>(s.args.integer("max-breakpoints", 4096)));
    Json breakpoints = Json::array();
    for (const auto& v : p.breakpoints)
      breakpoints.push_back(Json{{"vertex", ctx.format(v.vertex)}, {"path_length", v.path_length}});
    r.outputs = Json{{"product", ctx.format(p.product)},
                     {"nontrivial", p.nontrivial},
                     {"lambda_empirical", p.lambda_empirical ? to_json(*p.lambda_empirical) : Json(nullptr)},
                     {"cascade", to_json(p.cascade)},
                     {"above_threshold", p.above_threshold},
                     {"quasi_geodesic_consistent", p.quasi_geodesic_consistent},
                     {"breakpoints", std::move(breakpoints)}};
  } else if (action == "search") {
    const unsigned h_radius = s.args.natural("h-radius", 2);
    const unsigned m = s.args.natural("m", 2);
    const ConstantProvider provider = load_provider(s.args.text("provider", "default"));
    SearchOptions opts;
    opts.exponent_cap = s.args.natural("exponent-cap", 0);
    opts.budget = s.config.budget;
    opts.threads = s.config.threads;
    r.inputs["h_radius"] = h_radius;
    r.inputs["m"] = m;
    r.inputs["provider"] = provider.serialize();
    const SearchReport rep = minimal_exponent_search(ctx, g, h_radius, m, provider, opts);
    r.outputs = Json{{"n_empirical", rep.n_empirical},
                     {"threshold", to_json(rep.threshold)},
                     {"within_threshold", rep.within_threshold},
                     {"exponent_cap", rep.exponent_cap},
                     {"candidates", rep.candidates},
                     {"products_checked", rep.products_checked},
                     {"trivial_products", rep.trivial_products},
                     {"witness_h", words_json(ctx, rep.witness_h)},
                     {"witness_n", rep.witness_n}};
  } else {
    throw ParseError("unknown tree action '" + action + "'", 0);
  }
  return r;
}

// ---------------------------------------------------------------- ball

Report run_ball(Session& s) {
  const GroupContext ctx = s.group();
  const unsigned radius = s.args.natural("radius");
  Report r;
  r.command = "ball";
  r.inputs = base_inputs(ctx);
  r.inputs["radius"] = radius;
  const bool list = s.args.flag("list");
  const std::vector<Word> ball = enumerate_ball(ctx, radius, s.config.budget);
  std::vector<std::uint64_t> layers(radius + 1, 0);
  for (const auto& w : ball) ++layers[w.length()];
  r.outputs = Json{{"size", ball.size()}, {"closed_form", ball_size(ctx.rank(), radius)}, {"layers", layers}};
  if (list) r.outputs["words"] = words_json(ctx, ball);
  return r;
}

}  // namespace

Report run_command(const std::string& command, const std::string& action, const Arguments& args,
                   const RunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  Session session{config, Args(args), nullptr};
  std::string cache_dir = config.cache_dir;
  if (cache_dir.empty()) {
    if (const char* env = std::getenv("SELFNORM_CACHE_DIR")) cache_dir = env;
  }
  if (!cache_dir.empty()) session.cache = std::make_unique<FileCache>(cache_dir);

  Report report;
  if (command == "norm") {
    report = run_norm(session);
  } else if (command == "selfless") {
    report = run_selfless(session, action);
  } else if (command == "tree") {
    report = run_tree(session, action);
  } else if (command == "ball") {
    report = run_ball(session);
  } else {
    throw ParseError("unknown command '" + command + "'", 0);
  }

  if (config.timing) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    Json t{{"seconds", elapsed.count()}, {"threads", config.threads}};
    if (session.cache)
      t["cache"] = Json{{"hits", session.cache->hits()},
                        {"misses", session.cache->misses()},
                        {"corrupt", session.cache->corrupt()}};
    report.timing = std::move(t);
  }
  return report;
}

}  // namespace selfnorm
