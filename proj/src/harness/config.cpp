#include "mints/harness/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace mints::harness {
namespace {

struct Value {
  enum class Kind { Number, Bool, String, Array } kind = Kind::String;
  std::string text;  // number or string as written
  double number = 0.0;
  bool boolean = false;
  std::vector<double> array;
};

struct Entry {
  std::size_t line = 0;
  Value value;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(std::size_t line, std::string_view key, const std::string& msg) {
  std::string out = line > 0 ? "line " + std::to_string(line) + ": " : std::string();
  if (!key.empty()) out += "key `" + std::string(key) + "`: ";
  throw ConfigError(out + msg);
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    return std::nullopt;
  }
  return v;
}

// Strips a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

Value parse_value(std::string_view raw, std::size_t line, std::string_view key) {
  raw = trim(raw);
  Value v;
  if (raw.empty()) fail(line, key, "missing value");
  if (raw.front() == '[') {
    if (raw.back() != ']') fail(line, key, "unterminated array");
    v.kind = Value::Kind::Array;
    std::string_view body = trim(raw.substr(1, raw.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      const std::string_view item = trim(body.substr(0, comma));
      if (item.empty() && comma == std::string_view::npos) break;  // trailing comma
      const auto x = parse_number(item);
      if (!x) fail(line, key, "array element `" + std::string(item) + "` is not a number");
      v.array.push_back(*x);
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
    }
    return v;
  }
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') fail(line, key, "unterminated string");
    v.kind = Value::Kind::String;
    v.text = std::string(raw.substr(1, raw.size() - 2));
    return v;
  }
  if (raw == "true" || raw == "false") {
    v.kind = Value::Kind::Bool;
    v.boolean = raw == "true";
    v.text = std::string(raw);
    return v;
  }
  v.text = std::string(raw);
  if (const auto x = parse_number(raw)) {
    v.kind = Value::Kind::Number;
    v.number = *x;
  } else {
    v.kind = Value::Kind::String;
  }
  return v;
}

std::map<std::string, Entry> tokenize(std::string_view text) {
  std::map<std::string, Entry> out;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string_view::npos) {
      if (line.back() != ']') fail(line_no, "", "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) fail(line_no, "", "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "", "expected `key = value`");
    const std::string_view bare = trim(line.substr(0, eq));
    if (bare.empty()) fail(line_no, "", "missing key");
    for (char c : bare) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) {
        fail(line_no, bare, "invalid character in key");
      }
    }
    std::string key = section.empty() ? std::string(bare) : section + "." + std::string(bare);
    if (out.count(key)) fail(line_no, key, "duplicate key (first set on line " +
                                               std::to_string(out[key].line) + ")");
    out[key] = Entry{line_no, parse_value(line.substr(eq + 1), line_no, key)};
  }
  return out;
}

// Typed access that records which keys were used.
class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  std::size_t line(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  void number(const std::string& key, double& out) {
    if (const Entry* e = take(key)) {
      if (e->value.kind != Value::Kind::Number) fail(e->line, key, "expected a number");
      out = e->value.number;
    }
  }

  void count(const std::string& key, std::size_t& out) {
    if (const Entry* e = take(key)) {
      if (e->value.kind != Value::Kind::Number) fail(e->line, key, "expected an integer");
      std::uint64_t v = 0;
      const std::string& s = e->value.text;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        fail(e->line, key, "expected a nonnegative integer, got `" + s + "`");
      }
      out = static_cast<std::size_t>(v);
    }
  }

  void u64(const std::string& key, std::uint64_t& out) {
    std::size_t v = out;
    count(key, v);
    out = v;
  }

  void boolean(const std::string& key, bool& out) {
    if (const Entry* e = take(key)) {
      if (e->value.kind != Value::Kind::Bool) fail(e->line, key, "expected true or false");
      out = e->value.boolean;
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const Entry* e = take(key)) {
      if (e->value.kind == Value::Kind::Array) fail(e->line, key, "expected a string");
      out = e->value.text;
    }
  }

  void array(const std::string& key, std::vector<double>& out) {
    if (const Entry* e = take(key)) {
      if (e->value.kind == Value::Kind::Number) {
        out = {e->value.number};
        return;
      }
      if (e->value.kind != Value::Kind::Array) fail(e->line, key, "expected a numeric array");
      out = e->value.array;
    }
  }

  void reject_unused() const {
    for (const auto& [key, e] : entries_) {
      if (!used_.count(key)) fail(e.line, key, "unknown key");
    }
  }

 private:
  const Entry* take(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
};

// Precondition helper: message addressed to the key's line.
void check(bool ok, const Reader& r, const std::string& key, const std::string& msg) {
  if (!ok) fail(r.line(key), key, msg);
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void check_prior(const Reader& r, const std::string& key, const std::vector<double>& w,
                 std::size_t k) {
  if (w.empty()) return;
  check(w.size() == k, r, key, "needs " + std::to_string(k) + " entries, got " + std::to_string(w.size()));
  double total = 0.0;
  for (double x : w) {
    check(x >= 0.0 && std::isfinite(x), r, key, "weights must be finite and >= 0");
    total += x;
  }
  check(total > 0.0, r, key, "weights must not all be zero");
}

void read_mab(Reader& r, ExperimentConfig& cfg, bool lipschitz) {
  MabParams& p = cfg.mab;
  r.string("policy", p.policy);
  check(p.policy == "mints" || p.policy == "gaussian_ts", r, "policy",
        "must be `mints` or `gaussian_ts`, got `" + p.policy + "`");
  r.number("model.sigma", p.sigma);
  check(p.sigma > 0.0 && std::isfinite(p.sigma), r, "model.sigma", "must be > 0");
  r.number("solver.tolerance", p.tolerance);
  check(p.tolerance > 0.0, r, "solver.tolerance", "must be > 0");
  std::string kind = "gaussian";
  r.string("env.kind", kind);
  if (kind == "gaussian") {
    p.env_kind = EnvKind::Gaussian;
  } else if (kind == "bernoulli") {
    p.env_kind = EnvKind::Bernoulli;
  } else if (kind == "bounded") {
    p.env_kind = EnvKind::Bounded;
  } else {
    fail(r.line("env.kind"), "env.kind", "must be gaussian, bernoulli or bounded, got `" + kind + "`");
  }
  check(r.has("env.means"), r, "env.means", "required");
  r.array("env.means", p.means);
  check(!p.means.empty() && all_finite(p.means), r, "env.means", "needs at least one finite mean");
  if (p.env_kind == EnvKind::Bernoulli) {
    for (double m : p.means) check(m >= 0.0 && m <= 1.0, r, "env.means", "Bernoulli means must lie in [0, 1]");
  }
  r.number("env.noise_sd", p.noise_sd);
  check(p.noise_sd >= 0.0 && std::isfinite(p.noise_sd), r, "env.noise_sd", "must be >= 0");
  r.number("env.half_width", p.half_width);
  check(p.half_width >= 0.0 && std::isfinite(p.half_width), r, "env.half_width", "must be >= 0");
  r.array("prior.weights", p.prior_weights);
  check_prior(r, "prior.weights", p.prior_weights, p.means.size());
  r.number("baseline.sigma", p.baseline_sigma);
  check(p.baseline_sigma > 0.0 && std::isfinite(p.baseline_sigma), r, "baseline.sigma", "must be > 0");
  if (lipschitz) {
    r.number("model.lipschitz", p.lipschitz);
    check(p.lipschitz > 0.0 && std::isfinite(p.lipschitz), r, "model.lipschitz", "must be > 0");
    if (r.has("model.positions")) {
      r.array("model.positions", p.positions);
    } else {
      p.positions.clear();
      for (std::size_t j = 0; j < p.means.size(); ++j) p.positions.push_back(static_cast<double>(j));
    }
    check(p.positions.size() == p.means.size() && all_finite(p.positions), r, "model.positions",
          "needs one finite position per arm");
  }
  if (p.env_kind == EnvKind::Gaussian && p.noise_sd > 1.0) {
    cfg.warnings.push_back("env.noise_sd > 1: rewards are not 1-sub-Gaussian");
  }
  if (p.env_kind == EnvKind::Bounded && p.half_width > 1.0) {
    cfg.warnings.push_back("env.half_width > 1: rewards are not 1-sub-Gaussian");
  }
}

void read_pricing(Reader& r, ExperimentConfig& cfg) {
  PricingParams& p = cfg.pricing;
  check(r.has("grid.prices"), r, "grid.prices", "required");
  r.array("grid.prices", p.prices);
  check(!p.prices.empty(), r, "grid.prices", "needs at least one price");
  for (std::size_t j = 0; j < p.prices.size(); ++j) {
    check(p.prices[j] > 0.0 && std::isfinite(p.prices[j]), r, "grid.prices", "prices must be > 0");
    check(j == 0 || p.prices[j] > p.prices[j - 1], r, "grid.prices",
          "prices must be strictly increasing");
  }
  r.number("grid.lipschitz", p.lipschitz);
  check(p.lipschitz > 0.0, r, "grid.lipschitz", "must be > 0");
  r.string("valuation.kind", p.valuation);
  if (p.valuation == "uniform") {
    r.number("valuation.low", p.low);
    r.number("valuation.high", p.high);
    check(std::isfinite(p.low), r, "valuation.low", "must be finite");
    check(p.high > p.low && std::isfinite(p.high), r, "valuation.high", "must exceed valuation.low");
  } else if (p.valuation == "piecewise_linear") {
    check(r.has("valuation.knots_x"), r, "valuation.knots_x", "required");
    check(r.has("valuation.knots_cdf"), r, "valuation.knots_cdf", "required");
    r.array("valuation.knots_x", p.knots_x);
    r.array("valuation.knots_cdf", p.knots_cdf);
    try {
      (void)ValuationModel::piecewise_linear(p.knots_x, p.knots_cdf);
    } catch (const Error& e) {
      fail(r.line("valuation.knots_cdf"), "valuation.knots_cdf", e.what());
    }
  } else {
    fail(r.line("valuation.kind"), "valuation.kind",
         "must be uniform or piecewise_linear, got `" + p.valuation + "`");
  }
  std::string h = "revenue";
  r.string("hypothesis", h);
  if (h == "revenue") {
    p.hypothesis = Hypothesis::Revenue;
  } else if (h == "literal") {
    p.hypothesis = Hypothesis::Literal;
  } else {
    fail(r.line("hypothesis"), "hypothesis", "must be revenue or literal, got `" + h + "`");
  }
  r.array("prior.weights", p.prior_weights);
  check_prior(r, "prior.weights", p.prior_weights, p.prices.size());
  r.number("solver.tolerance", p.tolerance);
  check(p.tolerance > 0.0, r, "solver.tolerance", "must be > 0");
}

void read_continuum(Reader& r, ExperimentConfig& cfg) {
  ContinuumParams& p = cfg.continuum;
  r.count("dim", p.dim);
  check(p.dim >= 1 && p.dim <= 3, r, "dim", "must be 1, 2 or 3");
  r.number("model.lipschitz", p.lipschitz);
  check(p.lipschitz > 0.0 && std::isfinite(p.lipschitz), r, "model.lipschitz", "must be > 0");
  r.number("model.sigma", p.sigma);
  check(p.sigma > 0.0 && std::isfinite(p.sigma), r, "model.sigma", "must be > 0");
  r.boolean("model.noiseless", p.noiseless);
  if (r.has("env.peak")) {
    r.array("env.peak", p.peak);
  } else {
    p.peak.assign(p.dim, 0.5);
  }
  check(p.peak.size() == p.dim, r, "env.peak", "needs " + std::to_string(p.dim) + " coordinates");
  for (double c : p.peak) check(c >= 0.0 && c <= 1.0, r, "env.peak", "coordinates must lie in [0, 1]");
  r.number("env.slope", p.slope);
  check(p.slope >= 0.0 && std::isfinite(p.slope), r, "env.slope", "must be >= 0");
  check(p.slope <= p.lipschitz, r, "env.slope", "must not exceed model.lipschitz");
  r.number("env.height", p.height);
  check(std::isfinite(p.height), r, "env.height", "must be finite");
  r.number("env.noise_sd", p.noise_sd);
  check(p.noise_sd >= 0.0 && std::isfinite(p.noise_sd), r, "env.noise_sd", "must be >= 0");
  if (p.noiseless) {
    check(p.noise_sd == 0.0, r, "env.noise_sd", "must be 0 when model.noiseless = true");
  }
  r.count("sampler.max_attempts", p.max_attempts);
  check(p.max_attempts >= 1, r, "sampler.max_attempts", "must be >= 1");
}

void read_cog(Reader& r, ExperimentConfig& cfg) {
  CogParams& p = cfg.cog;
  r.array("objective.center", p.center);
  r.array("objective.curvature", p.curvature);
  r.array("domain.lower", p.lower);
  r.array("domain.upper", p.upper);
  check(p.center.size() == 2 && all_finite(p.center), r, "objective.center", "needs 2 finite coordinates");
  check(p.curvature.size() == 2, r, "objective.curvature", "needs 2 entries");
  for (double c : p.curvature) check(c > 0.0 && std::isfinite(c), r, "objective.curvature", "entries must be > 0");
  check(p.lower.size() == 2 && all_finite(p.lower), r, "domain.lower", "needs 2 finite coordinates");
  check(p.upper.size() == 2 && all_finite(p.upper), r, "domain.upper", "needs 2 finite coordinates");
  check(p.upper[0] > p.lower[0] && p.upper[1] > p.lower[1], r, "domain.upper",
        "must exceed domain.lower in both coordinates");
}

void read_ellipsoid(Reader& r, ExperimentConfig& cfg) {
  EllipsoidParams& p = cfg.ellipsoid;
  r.count("dim", p.dim);
  check(p.dim >= 1 && p.dim <= 50, r, "dim", "must be between 1 and 50");
  p.center.assign(p.dim, 0.5);
  p.curvature.assign(p.dim, 1.0);
  p.start_center.assign(p.dim, 0.0);
  r.array("objective.center", p.center);
  r.array("objective.curvature", p.curvature);
  r.array("start.center", p.start_center);
  r.number("start.radius", p.start_radius);
  check(p.center.size() == p.dim && all_finite(p.center), r, "objective.center",
        "needs " + std::to_string(p.dim) + " finite coordinates");
  check(p.curvature.size() == p.dim, r, "objective.curvature", "needs " + std::to_string(p.dim) + " entries");
  for (double c : p.curvature) check(c > 0.0 && std::isfinite(c), r, "objective.curvature", "entries must be > 0");
  check(p.start_center.size() == p.dim && all_finite(p.start_center), r, "start.center",
        "needs " + std::to_string(p.dim) + " finite coordinates");
  check(p.start_radius > 0.0 && std::isfinite(p.start_radius), r, "start.radius", "must be > 0");
  double d2 = 0.0;
  for (std::size_t k = 0; k < p.dim; ++k) d2 += (p.center[k] - p.start_center[k]) * (p.center[k] - p.start_center[k]);
  check(std::sqrt(d2) <= p.start_radius, r, "start.radius", "the start ball must contain objective.center");
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fmt(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v[i]);
  }
  return s + "]";
}

const char* env_name(EnvKind k) {
  switch (k) {
    case EnvKind::Gaussian:
      return "gaussian";
    case EnvKind::Bernoulli:
      return "bernoulli";
    case EnvKind::Bounded:
      return "bounded";
  }
  return "gaussian";
}

// Settings that define the problem instance, in a fixed order.
std::vector<std::pair<std::string, std::string>> instance_settings(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("family", to_string(cfg.family));
  kv.emplace_back("horizon", std::to_string(cfg.horizon));
  switch (cfg.family) {
    case Family::Mab:
    case Family::MabLipschitz: {
      const MabParams& p = cfg.mab;
      kv.emplace_back("model.sigma", fmt(p.sigma));
      kv.emplace_back("solver.tolerance", fmt(p.tolerance));
      kv.emplace_back("env.kind", env_name(p.env_kind));
      kv.emplace_back("env.means", fmt(p.means));
      if (p.env_kind == EnvKind::Gaussian) kv.emplace_back("env.noise_sd", fmt(p.noise_sd));
      if (p.env_kind == EnvKind::Bounded) kv.emplace_back("env.half_width", fmt(p.half_width));
      kv.emplace_back("prior.weights", fmt(p.prior_weights));
      kv.emplace_back("baseline.sigma", fmt(p.baseline_sigma));
      if (cfg.family == Family::MabLipschitz) {
        kv.emplace_back("model.lipschitz", fmt(p.lipschitz));
        kv.emplace_back("model.positions", fmt(p.positions));
      }
      break;
    }
    case Family::Pricing: {
      const PricingParams& p = cfg.pricing;
      kv.emplace_back("grid.prices", fmt(p.prices));
      kv.emplace_back("grid.lipschitz", fmt(p.lipschitz));
      kv.emplace_back("valuation.kind", p.valuation);
      if (p.valuation == "uniform") {
        kv.emplace_back("valuation.low", fmt(p.low));
        kv.emplace_back("valuation.high", fmt(p.high));
      } else {
        kv.emplace_back("valuation.knots_x", fmt(p.knots_x));
        kv.emplace_back("valuation.knots_cdf", fmt(p.knots_cdf));
      }
      kv.emplace_back("hypothesis", p.hypothesis == Hypothesis::Revenue ? "revenue" : "literal");
      kv.emplace_back("prior.weights", fmt(p.prior_weights));
      kv.emplace_back("solver.tolerance", fmt(p.tolerance));
      break;
    }
    case Family::LipschitzContinuum: {
      const ContinuumParams& p = cfg.continuum;
      kv.emplace_back("dim", std::to_string(p.dim));
      kv.emplace_back("model.lipschitz", fmt(p.lipschitz));
      kv.emplace_back("model.sigma", fmt(p.sigma));
      kv.emplace_back("model.noiseless", p.noiseless ? "true" : "false");
      kv.emplace_back("env.peak", fmt(p.peak));
      kv.emplace_back("env.slope", fmt(p.slope));
      kv.emplace_back("env.height", fmt(p.height));
      kv.emplace_back("env.noise_sd", fmt(p.noise_sd));
      kv.emplace_back("sampler.max_attempts", std::to_string(p.max_attempts));
      break;
    }
    case Family::Cog: {
      const CogParams& p = cfg.cog;
      kv.emplace_back("objective.center", fmt(p.center));
      kv.emplace_back("objective.curvature", fmt(p.curvature));
      kv.emplace_back("domain.lower", fmt(p.lower));
      kv.emplace_back("domain.upper", fmt(p.upper));
      break;
    }
    case Family::Ellipsoid: {
      const EllipsoidParams& p = cfg.ellipsoid;
      kv.emplace_back("dim", std::to_string(p.dim));
      kv.emplace_back("objective.center", fmt(p.center));
      kv.emplace_back("objective.curvature", fmt(p.curvature));
      kv.emplace_back("start.center", fmt(p.start_center));
      kv.emplace_back("start.radius", fmt(p.start_radius));
      break;
    }
  }
  return kv;
}

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::Mab:
      return "mab";
    case Family::MabLipschitz:
      return "mab_lipschitz";
    case Family::Pricing:
      return "pricing";
    case Family::LipschitzContinuum:
      return "lipschitz_continuum";
    case Family::Cog:
      return "cog";
    case Family::Ellipsoid:
      return "ellipsoid";
  }
  return "mab";
}

std::optional<Family> family_from_string(std::string_view s) {
  for (Family f : {Family::Mab, Family::MabLipschitz, Family::Pricing, Family::LipschitzContinuum,
                   Family::Cog, Family::Ellipsoid}) {
    if (s == to_string(f)) return f;
  }
  return std::nullopt;
}

std::string ExperimentConfig::policy() const {
  if (family == Family::Mab || family == Family::MabLipschitz) return mab.policy;
  return to_string(family);
}

ExperimentConfig parse_config(std::string_view text, std::optional<Family> family) {
  Reader r(tokenize(text));
  ExperimentConfig cfg;

  if (r.has("family")) {
    std::string name;
    r.string("family", name);
    const auto f = family_from_string(name);
    if (!f) fail(r.line("family"), "family", "unknown family `" + name + "`");
    if (family && *family != *f) {
      fail(r.line("family"), "family",
           "config is for `" + name + "` but `" + to_string(*family) + "` was requested");
    }
    cfg.family = *f;
  } else if (family) {
    cfg.family = *family;
  } else {
    throw ConfigError("key `family`: required");
  }

  r.u64("seed", cfg.seed);
  r.count("replications", cfg.replications);
  check(cfg.replications >= 1, r, "replications", "must be >= 1");
  r.string("output_dir", cfg.output_dir);
  r.count("horizon", cfg.horizon);
  check(cfg.horizon >= 1, r, "horizon", "must be >= 1");

  switch (cfg.family) {
    case Family::Mab:
      read_mab(r, cfg, false);
      break;
    case Family::MabLipschitz:
      read_mab(r, cfg, true);
      break;
    case Family::Pricing:
      read_pricing(r, cfg);
      break;
    case Family::LipschitzContinuum:
      read_continuum(r, cfg);
      break;
    case Family::Cog:
      read_cog(r, cfg);
      break;
    case Family::Ellipsoid:
      read_ellipsoid(r, cfg);
      break;
  }
  r.reject_unused();
  return cfg;
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  for (const auto& [k, v] : instance_settings(cfg)) out << k << " = " << v << '\n';
  if (cfg.family == Family::Mab || cfg.family == Family::MabLipschitz) {
    out << "policy = " << cfg.mab.policy << '\n';
  }
  out << "seed = " << cfg.seed << '\n';
  out << "replications = " << cfg.replications << '\n';
  out << "output_dir = \"" << cfg.output_dir << "\"\n";
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& [k, v] : instance_settings(cfg)) {
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace mints::harness
