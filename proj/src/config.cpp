#include "tubecurv/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tubecurv {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number '" + s + "' in " + where);
  }
}

std::vector<double> parse_vector(const std::string& s, const std::string& where) {
  std::vector<double> out;
  for (const std::string& tok : split(s, ','))
    if (!tok.empty()) out.push_back(parse_number(tok, where));
  return out;
}

}  // namespace

double ScheduleRule::eval(double delta) const { return c * std::pow(delta, p); }

ScheduleRule ScheduleRule::parse(const std::string& text) {
  // grammar: c * delta^p
  auto parts = split(text, '*');
  if (parts.size() != 2) throw ConfigError("schedule rule must be 'c * delta^p': " + text);
  ScheduleRule r;
  r.c = parse_number(parts[0], "schedule rule");
  auto caret = parts[1].find('^');
  if (parts[1].substr(0, caret) != "delta" || caret == std::string::npos)
    throw ConfigError("schedule rule must be 'c * delta^p': " + text);
  r.p = parse_number(trim(parts[1].substr(caret + 1)), "schedule rule exponent");
  return r;
}

std::string ScheduleRule::to_string() const {
  return format_double(c) + " * delta^" + format_double(p);
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string cur;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      cur = trim(t.substr(1, t.size() - 2));
      if (sections.count(cur)) throw ConfigError("config: duplicate section [" + cur + "]");
      sections[cur] = {};
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos || cur.empty())
      throw ConfigError("config: expected 'key = value' at line " + std::to_string(lineno));
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (sections[cur].count(key))
      throw ConfigError("config: duplicate key '" + key + "' in [" + cur + "]");
    sections[cur][key] = val;
  }

  const std::set<std::string> known_sections{"experiment", "manifold", "base",
                                             "schedule",   "methods",  "pointcloud", "checks"};
  for (const auto& [sec, _] : sections)
    if (!known_sections.count(sec)) throw ConfigError("config: unknown section [" + sec + "]");

  auto take = [&](const std::string& sec, const std::string& key,
                  bool required) -> std::optional<std::string> {
    auto its = sections.find(sec);
    if (its == sections.end()) {
      if (required) throw ConfigError("config: missing section [" + sec + "]");
      return std::nullopt;
    }
    auto itk = its->second.find(key);
    if (itk == its->second.end()) {
      if (required) throw ConfigError("config: missing key '" + key + "' in [" + sec + "]");
      return std::nullopt;
    }
    std::string v = itk->second;
    its->second.erase(itk);
    return v;
  };

  cfg.name = *take("experiment", "name", true);
  cfg.kind = *take("experiment", "kind", true);
  cfg.seed = static_cast<std::uint64_t>(parse_number(*take("experiment", "seed", true), "seed"));

  cfg.manifold_type = *take("manifold", "type", true);
  if (sections.count("manifold"))
    for (auto& [k, v] : sections["manifold"]) cfg.manifold_params[k] = parse_number(v, k);
  sections["manifold"].clear();

  cfg.base_point = parse_vector(*take("base", "point", true), "base point");
  cfg.base_direction = parse_vector(*take("base", "direction", true), "base direction");

  cfg.delta0 = parse_number(*take("schedule", "delta0", true), "delta0");
  cfg.levels = static_cast<int>(parse_number(*take("schedule", "levels", true), "levels"));
  cfg.sigma_rule = ScheduleRule::parse(*take("schedule", "sigma", true));
  cfg.eps_rule = ScheduleRule::parse(*take("schedule", "epsilon", true));

  for (const std::string& mname : split(*take("methods", "list", true), ','))
    if (!mname.empty()) cfg.methods.push_back(method_from_name(mname));
  if (auto v = take("methods", "order", false)) cfg.order = static_cast<int>(parse_number(*v, "order"));
  if (auto v = take("methods", "budget", false))
    cfg.budget = static_cast<int>(parse_number(*v, "budget"));
  if (auto v = take("methods", "trials", false))
    cfg.trials = static_cast<int>(parse_number(*v, "trials"));

  if (auto v = take("pointcloud", "intensities", false)) cfg.intensities = parse_vector(*v, "intensities");
  if (auto v = take("pointcloud", "band", false)) cfg.band = parse_number(*v, "band");

  if (auto v = take("checks", "closed_form", false)) cfg.closed_form = *v;
  if (auto v = take("checks", "closed_form_rtol", false))
    cfg.closed_form_rtol = parse_number(*v, "closed_form_rtol");
  if (auto v = take("checks", "coeff_rtol", false)) cfg.coeff_rtol = parse_number(*v, "coeff_rtol");
  if (auto v = take("checks", "resid_slope_min", false))
    cfg.resid_slope_min = parse_number(*v, "resid_slope_min");
  if (auto v = take("checks", "abs_kappa_slope_min", false))
    cfg.abs_kappa_slope_min = parse_number(*v, "abs_kappa_slope_min");

  for (const auto& [sec, kv] : sections)
    for (const auto& [k, _] : kv) throw ConfigError("config: unknown key '" + k + "' in [" + sec + "]");

  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  if (kind != "sweep" && kind != "pointcloud")
    throw ConfigError("config: kind must be 'sweep' or 'pointcloud'");
  if (levels < 1) throw ConfigError("config: need at least one level");
  if (!(delta0 > 0.0)) throw ConfigError("config: delta0 must be positive");
  if (methods.empty()) throw ConfigError("config: empty method list");
  if (kind == "pointcloud" && intensities.size() < 1)
    throw ConfigError("config: pointcloud kind needs intensities");
  for (int level = 0; level < levels; ++level) {
    double delta = delta0 / std::pow(2.0, level);
    double s = sigma_at(delta), e = eps_at(delta);
    if (!(s > 0.0) || !(e > 0.0))
      throw ConfigError("config: schedule produces non-positive sigma/epsilon");
    if (std::max(s, e) > 0.25 * delta * (1.0 + 1e-12))
      throw ConfigError("config: schedule violates sigma v eps <= delta / 4");
  }
  make_manifold();  // rejects unknown manifold parameters
}

std::unique_ptr<Manifold> ExperimentConfig::make_manifold() const {
  auto params = manifold_params;
  auto get = [&](const std::string& key, std::optional<double> def = std::nullopt) {
    auto it = params.find(key);
    if (it == params.end()) {
      if (def) return *def;
      throw ConfigError("config: manifold '" + manifold_type + "' needs parameter '" + key + "'");
    }
    double v = it->second;
    params.erase(it);
    return v;
  };
  std::unique_ptr<Manifold> M;
  if (manifold_type == "circle") {
    M = make_circle(get("radius"));
  } else if (manifold_type == "sphere") {
    M = make_sphere(static_cast<int>(get("dim", 2.0)), get("radius"));
  } else if (manifold_type == "flat-torus") {
    M = make_flat_torus(get("radius1"), get("radius2"));
  } else if (manifold_type == "parabola") {
    M = make_parabola(get("coeff", 1.0), get("window", 2.0));
  } else if (manifold_type == "ellipse") {
    M = make_ellipse(get("axis_a"), get("axis_b"), get("t0", 0.0), get("window", 2.0));
  } else if (manifold_type == "helix") {
    M = make_helix(get("radius"), get("pitch"), get("window", 4.0));
  } else if (manifold_type == "planar-line") {
    M = make_planar_line(get("window", 10.0));
  } else if (manifold_type == "graph-surface") {
    M = make_graph_surface(get("fxx", 0.0), get("fyy", 0.0), get("fxy", 0.0), get("window", 2.0));
  } else {
    throw ConfigError("config: unknown manifold type '" + manifold_type + "'");
  }
  if (!params.empty())
    throw ConfigError("config: unknown manifold parameter '" + params.begin()->first + "'");
  return M;
}

std::string describe_manifold_catalogue() {
  return
      "circle         radius                      m=1 k=1 in R^2\n"
      "parabola       coeff window                m=1 k=1 in R^2, y = coeff x^2/2\n"
      "ellipse        axis_a axis_b t0 window     m=1 k=1 in R^2, arc around t0\n"
      "planar-line    window                      m=1 k=1 in R^2, zero curvature\n"
      "helix          radius pitch window         m=1 k=2 in R^3\n"
      "sphere         radius [dim]                m=2 k=1 in R^3\n"
      "flat-torus     radius1 radius2             m=2 k=2 in R^4\n"
      "graph-surface  fxx fyy fxy window          m=2 k=1 in R^3, z = f(x,y)\n";
}

}  // namespace tubecurv
