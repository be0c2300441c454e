#include "heatctl/scenario.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

namespace heatctl {

namespace {

constexpr double kPi = std::numbers::pi;

// Reads typed fields out of a YAML mapping, reporting the offending line.
class FieldReader {
public:
  FieldReader(const YAML::Node& node, std::string path, std::string source)
      : node_(node), path_(std::move(path)), source_(std::move(source)) {
    if (!node_.IsMap()) fail(node_, path_, "expected a mapping");
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

  template <typename T>
  T get(const std::string& key) {
    seen_.insert(key);
    const YAML::Node child = node_[key];
    if (!child) fail(node_, qualified(key), "missing required field");
    return convert<T>(child, key);
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    seen_.insert(key);
    const YAML::Node child = node_[key];
    if (!child) return fallback;
    return convert<T>(child, key);
  }

  FieldReader child(const std::string& key) {
    seen_.insert(key);
    const YAML::Node c = node_[key];
    if (!c) fail(node_, qualified(key), "missing required section");
    return FieldReader(c, qualified(key), source_);
  }

  // Unknown keys are errors so typos do not silently fall back to defaults.
  void finish() const {
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(kv.first, qualified(key), "unknown field");
    }
  }

  [[noreturn]] void fail_field(const std::string& key, const std::string& what) const {
    const YAML::Node child = node_[key];
    fail(child ? child : node_, qualified(key), what);
  }

  [[noreturn]] void fail(const YAML::Node& at, const std::string& field, const std::string& what) const {
    throw ScenarioError(source_, at.Mark().line + 1, field, what);
  }

private:
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  T convert(const YAML::Node& child, const std::string& key) {
    try {
      return child.as<T>();
    } catch (const YAML::Exception&) {
      fail(child, qualified(key), "wrong type");
    }
  }

  YAML::Node node_;
  std::string path_;
  std::string source_;
  std::set<std::string> seen_;
};

std::string domain_kind_name(DomainKind kind) { return kind == DomainKind::interval ? "interval" : "rectangle"; }

void emit_doubles(YAML::Emitter& out, const std::vector<double>& xs) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double x : xs) out << x;
  out << YAML::EndSeq;
}

}  // namespace

Tolerances Tolerances::tightened(double factor) const {
  Tolerances t = *this;
  t.tau_tol /= factor;
  t.dual_tol /= factor;
  t.oracle_tol /= factor;
  return t;
}

ScenarioError::ScenarioError(const std::string& source, int line, const std::string& field, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": field '" + field + "': " + what),
      line_(line),
      field_(field) {}

Scenario Scenario::refined() const {
  Scenario s = *this;
  s.modes *= 2;
  s.steps *= 2;
  s.quadrature = quadrature.refined();
  s.name = name + "+refined";
  return s;
}

void Scenario::validate() const {
  domain.validate();
  region.validate(domain);
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("horizon must be positive");
  if (modes == 0) throw InvalidArgument("modes must be >= 1");
  if (steps == 0) throw InvalidArgument("steps must be >= 1");
  if (quadrature.order == 0 || quadrature.tail_order == 0) throw InvalidArgument("quadrature orders must be >= 1");
  if (!(tolerances.tau_tol > 0.0 && tolerances.tau_tol < 1.0)) throw InvalidArgument("tau_tol must lie in (0, 1)");
  if (!(tolerances.dual_tol > 0.0) || !(tolerances.oracle_tol > 0.0)) throw InvalidArgument("tolerances must be positive");
  if (const auto* ic = std::get_if<InitialCoefficients>(&initial)) {
    if (ic->values.size() > modes) throw InvalidArgument("initial state has more coefficients than modes");
  }
  const BoundProfile m = make_bound(*this);
  if (std::abs(m.horizon() - horizon) > 1e-12 * horizon) throw InvalidArgument("bound profile must end at the horizon");
}

std::vector<std::string> preset_names() {
  return {"standard", "zero-bound", "constant-bound", "single-mode", "rectangle"};
}

Scenario preset(std::string_view name) {
  Scenario s;
  s.name = std::string(name);
  s.domain = DomainSpec::interval(kPi);
  s.region = ControlRegion::interval(0.2, 0.8);
  s.horizon = 1.0;
  s.modes = 16;
  s.steps = 64;
  s.initial = InitialPreset{"two-mode"};
  s.bound = BoundGenerator{"sine", 1.0, 0.5, 1.0, 16};
  s.seed = 42;
  if (name == "standard") return s;
  if (name == "zero-bound") {
    s.bound = BoundGenerator{"zero", 0.0, 0.0, 1.0, 1};
    return s;
  }
  if (name == "constant-bound") {
    s.bound = BoundGenerator{"constant", 1.0, 0.0, 1.0, 16};
    return s;
  }
  if (name == "single-mode") {
    s.modes = 1;
    s.initial = InitialPreset{"first-mode"};
    return s;
  }
  if (name == "rectangle") {
    s.domain = DomainSpec::rectangle(kPi, kPi);
    s.region = ControlRegion::rectangle(0.2, 1.4, 0.3, 1.5);
    s.initial = InitialPreset{"two-mode"};
    return s;
  }
  throw InvalidArgument("unknown scenario preset '" + std::string(name) + "'");
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(source, e.mark.line + 1, "<document>", e.msg);
  }
  FieldReader top(root, "", source);
  Scenario s;
  s.name = top.get_or<std::string>("name", "custom");

  {
    auto d = top.child("domain");
    const auto kind = d.get<std::string>("kind");
    if (kind == "interval") {
      s.domain.kind = DomainKind::interval;
    } else if (kind == "rectangle") {
      s.domain.kind = DomainKind::rectangle;
    } else {
      d.fail_field("kind", "expected 'interval' or 'rectangle'");
    }
    s.domain.lengths = d.get<std::vector<double>>("lengths");
    d.finish();
    try {
      s.domain.validate();
    } catch (const InvalidArgument& e) {
      d.fail_field("lengths", e.what());
    }
  }
  {
    auto r = top.child("region");
    s.region.lower = r.get<std::vector<double>>("lower");
    s.region.upper = r.get<std::vector<double>>("upper");
    r.finish();
    try {
      s.region.validate(s.domain);
    } catch (const InvalidArgument& e) {
      r.fail_field("lower", e.what());
    }
  }

  s.horizon = top.get<double>("horizon");
  if (!(s.horizon > 0.0)) top.fail_field("horizon", "must be positive");
  const int modes = top.get_or<int>("modes", 16);
  if (modes < 1) top.fail_field("modes", "must be >= 1");
  s.modes = static_cast<std::size_t>(modes);
  const int steps = top.get_or<int>("steps", 64);
  if (steps < 1) top.fail_field("steps", "must be >= 1");
  s.steps = static_cast<std::size_t>(steps);

  {
    auto ic = top.child("initial_state");
    if (ic.has("preset")) {
      const auto name = ic.get<std::string>("preset");
      if (name != "first-mode" && name != "two-mode") ic.fail_field("preset", "expected 'first-mode' or 'two-mode'");
      s.initial = InitialPreset{name};
    } else {
      auto values = ic.get<std::vector<double>>("coefficients");
      if (values.size() > s.modes) ic.fail_field("coefficients", "more coefficients than modes");
      s.initial = InitialCoefficients{std::move(values)};
    }
    ic.finish();
  }

  {
    auto b = top.child("bound");
    if (b.has("generator")) {
      BoundGenerator g;
      g.kind = b.get<std::string>("generator");
      if (g.kind != "sine" && g.kind != "constant" && g.kind != "zero") {
        b.fail_field("generator", "expected 'sine', 'constant' or 'zero'");
      }
      g.base = b.get_or<double>("base", g.kind == "zero" ? 0.0 : 1.0);
      g.amplitude = b.get_or<double>("amplitude", 0.0);
      g.frequency = b.get_or<double>("frequency", 1.0);
      const int pieces = b.get_or<int>("pieces", 1);
      if (pieces < 1) b.fail_field("pieces", "must be >= 1");
      g.pieces = static_cast<std::size_t>(pieces);
      s.bound = g;
    } else {
      BoundPieces p;
      p.breakpoints = b.get<std::vector<double>>("breakpoints");
      p.values = b.get<std::vector<double>>("values");
      s.bound = p;
    }
    b.finish();
    try {
      const BoundProfile m = make_bound(s);
      if (std::abs(m.horizon() - s.horizon) > 1e-12 * s.horizon) b.fail_field("breakpoints", "must end at the horizon");
      if (m.inf() < 0.0) b.fail_field("values", "must be >= 0");
    } catch (const InvalidArgument& e) {
      b.fail_field(b.has("generator") ? "generator" : "values", e.what());
    }
  }

  if (top.has("tolerances")) {
    auto t = top.child("tolerances");
    Tolerances d;
    s.tolerances.tau_tol = t.get_or<double>("tau_tol", d.tau_tol);
    s.tolerances.dual_tol = t.get_or<double>("dual_tol", d.dual_tol);
    s.tolerances.dual_max_iters = t.get_or<std::size_t>("dual_max_iters", d.dual_max_iters);
    s.tolerances.oracle_tol = t.get_or<double>("oracle_tol", d.oracle_tol);
    s.tolerances.oracle_max_iters = t.get_or<std::size_t>("oracle_max_iters", d.oracle_max_iters);
    t.finish();
    if (!(s.tolerances.tau_tol > 0.0 && s.tolerances.tau_tol < 1.0)) t.fail_field("tau_tol", "must lie in (0, 1)");
  }
  if (top.has("quadrature")) {
    auto q = top.child("quadrature");
    s.quadrature.order = q.get_or<std::size_t>("order", s.quadrature.order);
    s.quadrature.tail_order = q.get_or<std::size_t>("tail_order", s.quadrature.tail_order);
    q.finish();
    if (s.quadrature.order == 0) q.fail_field("order", "must be >= 1");
    if (s.quadrature.tail_order == 0) q.fail_field("tail_order", "must be >= 1");
  }
  s.seed = top.get_or<std::uint64_t>("seed", 42);
  top.finish();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string(), 0, "<file>", "cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

Scenario resolve_scenario(const std::string& name_or_path) {
  if (!std::filesystem::exists(name_or_path)) {
    for (const auto& p : preset_names()) {
      if (p == name_or_path) return preset(p);
    }
  }
  return load_scenario(name_or_path);
}

std::string serialize_scenario(const Scenario& s) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << s.name;

  out << YAML::Key << "domain" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << domain_kind_name(s.domain.kind);
  out << YAML::Key << "lengths" << YAML::Value;
  emit_doubles(out, s.domain.lengths);
  out << YAML::EndMap;

  out << YAML::Key << "region" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "lower" << YAML::Value;
  emit_doubles(out, s.region.lower);
  out << YAML::Key << "upper" << YAML::Value;
  emit_doubles(out, s.region.upper);
  out << YAML::EndMap;

  out << YAML::Key << "horizon" << YAML::Value << s.horizon;
  out << YAML::Key << "modes" << YAML::Value << s.modes;
  out << YAML::Key << "steps" << YAML::Value << s.steps;

  out << YAML::Key << "initial_state" << YAML::Value << YAML::BeginMap;
  if (const auto* p = std::get_if<InitialPreset>(&s.initial)) {
    out << YAML::Key << "preset" << YAML::Value << p->name;
  } else {
    out << YAML::Key << "coefficients" << YAML::Value;
    emit_doubles(out, std::get<InitialCoefficients>(s.initial).values);
  }
  out << YAML::EndMap;

  out << YAML::Key << "bound" << YAML::Value << YAML::BeginMap;
  if (const auto* g = std::get_if<BoundGenerator>(&s.bound)) {
    out << YAML::Key << "generator" << YAML::Value << g->kind;
    out << YAML::Key << "base" << YAML::Value << g->base;
    out << YAML::Key << "amplitude" << YAML::Value << g->amplitude;
    out << YAML::Key << "frequency" << YAML::Value << g->frequency;
    out << YAML::Key << "pieces" << YAML::Value << g->pieces;
  } else {
    const auto& p = std::get<BoundPieces>(s.bound);
    out << YAML::Key << "breakpoints" << YAML::Value;
    emit_doubles(out, p.breakpoints);
    out << YAML::Key << "values" << YAML::Value;
    emit_doubles(out, p.values);
  }
  out << YAML::EndMap;

  out << YAML::Key << "tolerances" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "tau_tol" << YAML::Value << s.tolerances.tau_tol;
  out << YAML::Key << "dual_tol" << YAML::Value << s.tolerances.dual_tol;
  out << YAML::Key << "dual_max_iters" << YAML::Value << s.tolerances.dual_max_iters;
  out << YAML::Key << "oracle_tol" << YAML::Value << s.tolerances.oracle_tol;
  out << YAML::Key << "oracle_max_iters" << YAML::Value << s.tolerances.oracle_max_iters;
  out << YAML::EndMap;

  out << YAML::Key << "quadrature" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "order" << YAML::Value << s.quadrature.order;
  out << YAML::Key << "tail_order" << YAML::Value << s.quadrature.tail_order;
  out << YAML::EndMap;

  out << YAML::Key << "seed" << YAML::Value << s.seed;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_scenario(s);
}

std::string scenario_hash(const Scenario& s) {
  const std::string text = serialize_scenario(s);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

BoundProfile make_bound(const Scenario& s) {
  if (const auto* p = std::get_if<BoundPieces>(&s.bound)) return BoundProfile(p->breakpoints, p->values);
  const auto& g = std::get<BoundGenerator>(s.bound);
  if (g.kind == "zero") return BoundProfile::constant(s.horizon, 0.0);
  if (g.kind == "constant") return BoundProfile::sampled(s.horizon, g.pieces, [&](double) { return g.base; });
  if (g.kind == "sine") {
    return BoundProfile::sampled(s.horizon, g.pieces, [&](double t) {
      return g.base + g.amplitude * std::sin(2.0 * kPi * g.frequency * t / s.horizon);
    });
  }
  throw InvalidArgument("unknown bound generator '" + g.kind + "'");
}

SpectralField make_initial_state(const Scenario& s) {
  Vector c = Vector::Zero(static_cast<Eigen::Index>(s.modes));
  if (const auto* p = std::get_if<InitialPreset>(&s.initial)) {
    c[0] = 1.0;
    if (p->name == "two-mode" && s.modes > 1) c[1] = 0.5;
    else if (p->name != "two-mode" && p->name != "first-mode") throw InvalidArgument("unknown initial-state preset");
  } else {
    const auto& v = std::get<InitialCoefficients>(s.initial).values;
    for (std::size_t k = 0; k < v.size() && k < s.modes; ++k) c[static_cast<Eigen::Index>(k)] = v[k];
  }
  return SpectralField(std::move(c));
}

Problem::Problem(Scenario scenario)
    : scenario_((scenario.validate(), std::move(scenario))),
      basis_(build_basis(scenario_.domain, scenario_.modes)),
      gram_(control_gram(scenario_.domain, scenario_.region, basis_)),
      bound_(make_bound(scenario_)),
      y0_(make_initial_state(scenario_)),
      free_terminal_(propagate(y0_, scenario_.horizon, basis_)),
      grid_(uniform_grid(scenario_.horizon, scenario_.steps)) {}

}  // namespace heatctl
