#include "bubbly/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bubbly/numerics.hpp"

namespace bubbly {

namespace {

Vec3 as_vec3(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence() || n.size() != 3) throw Error("config: '" + what + "' must be a list of three numbers");
  return {n[0].as<double>(), n[1].as<double>(), n[2].as<double>()};
}

template <typename T>
void read(const YAML::Node& parent, const char* key, T& target) {
  if (parent && parent[key]) target = parent[key].as<T>();
}

Domain parse_domain(const YAML::Node& n) {
  const std::string kind = n["kind"] ? n["kind"].as<std::string>() : "box";
  if (kind == "box") {
    const Vec3 lo = n["lo"] ? as_vec3(n["lo"], "domain.lo") : Vec3{0.0, 0.0, 0.0};
    const Vec3 hi = n["hi"] ? as_vec3(n["hi"], "domain.hi") : Vec3{1.0, 1.0, 1.0};
    return Domain::make_box(lo, hi);
  }
  if (kind == "ball") {
    if (!n["radius"] && !n["center"]) return Domain::unit_volume_ball();
    const Vec3 c = n["center"] ? as_vec3(n["center"], "domain.center") : Vec3{0.5, 0.5, 0.5};
    const double r = n["radius"] ? n["radius"].as<double>() : std::cbrt(3.0 / (4.0 * kPi));
    return Domain::make_ball(c, r);
  }
  throw Error("config: unknown domain kind '" + kind + "'");
}

KField parse_kfield(const YAML::Node& n) {
  const std::string kind = n["kind"] ? n["kind"].as<std::string>() : "constant";
  if (kind == "constant") return KField::constant(n["value"] ? n["value"].as<double>() : 0.0);
  if (kind == "integer") return KField::integer_constant(n["value"] ? n["value"].as<long>() : 0);
  if (kind == "linear") {
    return KField::linear(n["base"] ? n["base"].as<double>() : 0.0,
                          n["gradient"] ? as_vec3(n["gradient"], "kfield.gradient") : Vec3{});
  }
  if (kind == "gaussian") {
    return KField::gaussian(n["base"] ? n["base"].as<double>() : 0.0,
                            n["amplitude"] ? n["amplitude"].as<double>() : 0.0,
                            n["center"] ? as_vec3(n["center"], "kfield.center") : Vec3{0.5, 0.5, 0.5},
                            n["width"] ? n["width"].as<double>() : 1.0);
  }
  throw Error("config: unknown kfield kind '" + kind + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
  medium.validate();
  pulse.validate();
  if (!(shape_radius > 0.0)) throw Error("config: shape radius must be positive");
  if (deltas.empty()) throw Error("config: delta list is empty");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw Error("config: deltas must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) throw Error("config: delta list must be strictly decreasing");
  }
  if (!(lambda1 > 0.0)) throw Error("config: lambda1 must be positive");
  if (!(t_end > 0.0)) throw Error("config: t_end must be positive");
  if (effective.refine < 1) throw Error("config: effective.refine must be at least 1");
  if (!(effective.b_scale >= 0.0)) throw Error("config: effective.b_scale must be non-negative");
  if (domain.distance_to(source) <= 0.0) throw Error("config: source must lie outside the closed domain");
  if (!auto_probes) {
    if (probes.empty()) throw Error("config: probe list is empty");
    for (const Vec3& p : probes)
      if (domain.distance_to(p) <= 0.0) throw Error("config: probes must lie strictly outside the closed domain");
  }
  if (laplace.bromwich_count < 2) throw Error("config: laplace.bromwich_count must be at least 2");
}

PointSource ExperimentConfig::point_source() const { return {source, pulse, medium.c0()}; }

ShapeConstants ExperimentConfig::shape() const { return make_sphere(shape_radius); }

std::vector<Vec3> ExperimentConfig::resolved_probes() const {
  return auto_probes ? automatic_probes(domain, source) : probes;
}

double ExperimentConfig::effective_hbar() const {
  return effective.hbar > 0.0 ? effective.hbar : minnaert_h(medium, shape()).hbar;
}

double ExperimentConfig::effective_b() const {
  return effective.b > 0.0 ? effective.b : scattering_b(medium, shape());
}

std::vector<Vec3> automatic_probes(const Domain& domain, const Vec3& source) {
  const Vec3 c = domain.centroid();
  const double R = 2.0 * domain.circumradius();
  std::vector<Vec3> dirs{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  const double s = 1.0 / std::sqrt(3.0);
  dirs.push_back({s, s, s});
  Vec3 toward = source - c;
  const double len = norm(toward);
  std::size_t drop = dirs.size() - 1;
  if (len > 0.0) {
    toward *= 1.0 / len;
    double best = -2.0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const double cs = dot(dirs[i], toward);
      if (cs > best) {
        best = cs;
        drop = i;
      }
    }
  }
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < dirs.size(); ++i)
    if (i != drop && out.size() < 6) out.push_back(c + dirs[i] * R);
  return out;
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  try {
    if (root["domain"]) c.domain = parse_domain(root["domain"]);
    if (root["kfield"]) c.kfield = parse_kfield(root["kfield"]);
    if (const auto m = root["medium"]) {
      read(m, "rho_c", c.medium.rho_c);
      read(m, "k_c", c.medium.k_c);
      read(m, "rho_b_bar", c.medium.rho_b_bar);
      read(m, "k_b_bar", c.medium.k_b_bar);
    }
    if (const auto s = root["shape"]) {
      if (s["kind"]) parse_shape_kind(s["kind"].as<std::string>());
      read(s, "radius", c.shape_radius);
    }
    if (const auto p = root["pulse"]) {
      if (p["kind"]) c.pulse.kind = parse_pulse_kind(p["kind"].as<std::string>());
      read(p, "support", c.pulse.support);
      read(p, "omega0", c.pulse.omega0);
      read(p, "amplitude", c.pulse.amplitude);
    }
    if (root["source"]) c.source = as_vec3(root["source"], "source");
    if (const auto p = root["probes"]) {
      if (p.IsScalar() && p.as<std::string>() == "auto") {
        c.auto_probes = true;
      } else if (p.IsSequence()) {
        c.auto_probes = false;
        for (const auto& q : p) c.probes.push_back(as_vec3(q, "probes[]"));
      } else {
        throw Error("config: probes must be 'auto' or a list of points");
      }
    }
    if (const auto s = root["sweep"]) {
      if (s["deltas"]) c.deltas = s["deltas"].as<std::vector<double>>();
      if (s["epsilon_rule"]) {
        const auto r = s["epsilon_rule"].as<std::string>();
        if (r == "snap") c.epsilon_rule = EpsilonRule::Snap;
        else if (r == "exact") c.epsilon_rule = EpsilonRule::Exact;
        else throw Error("config: epsilon_rule must be 'snap' or 'exact'");
      }
      read(s, "lambda1", c.lambda1);
      read(s, "seed", c.seed);
      read(s, "jitter", c.jitter);
      read(s, "budget", c.budget);
    }
    if (const auto t = root["time"]) {
      read(t, "h", c.h);
      read(t, "t_end", c.t_end);
    }
    if (const auto s = root["solvers"]) {
      read(s, "bubbles", c.solve_bubbles);
      read(s, "effective", c.solve_effective);
    }
    if (const auto e = root["effective"]) {
      read(e, "hbar", c.effective.hbar);
      read(e, "b", c.effective.b);
      read(e, "voxel_edge", c.effective.voxel_edge);
      read(e, "refine", c.effective.refine);
      read(e, "b_scale", c.effective.b_scale);
    }
    if (const auto f = root["fdtd"]) {
      read(f, "dx", c.fdtd.dx);
      read(f, "dt", c.fdtd.dt);
      read(f, "t_end", c.fdtd.t_end);
      read(f, "padding", c.fdtd.padding);
    }
    if (const auto l = root["laplace"]) {
      if (l["sigmas"]) c.laplace.sigmas = l["sigmas"].as<std::vector<double>>();
      if (l["omegas"]) c.laplace.omegas = l["omegas"].as<std::vector<double>>();
      read(l, "bromwich_sigma", c.laplace.bromwich_sigma);
      read(l, "bromwich_dw", c.laplace.bromwich_dw);
      read(l, "bromwich_count", c.laplace.bromwich_count);
    }
    if (const auto a = root["assertions"]) {
      read(a, "min_slope", c.min_slope);
      read(a, "require_decreasing", c.require_decreasing);
    }
    read(root, "output_dir", c.output_dir);
  } catch (const YAML::Exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace bubbly
