#include "bubbly/placement.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "bubbly/numerics.hpp"

namespace bubbly {

namespace {

std::vector<double> parse_numbers(std::istringstream& in, std::size_t expected, const std::string& what) {
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(std::stod(tok));
  if (out.size() != expected) throw Error("malformed " + what + " descriptor");
  return out;
}

}  // namespace

Domain Domain::unit_cube() { return make_box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}); }

Domain Domain::make_box(const Vec3& lo, const Vec3& hi) {
  if (!(hi.x > lo.x && hi.y > lo.y && hi.z > lo.z)) throw Error("box domain must have positive extents");
  Domain d;
  d.kind = DomainKind::Box;
  d.box = {lo, hi};
  d.center = (lo + hi) * 0.5;
  return d;
}

Domain Domain::unit_volume_ball() { return make_ball({0.5, 0.5, 0.5}, std::cbrt(3.0 / (4.0 * kPi))); }

Domain Domain::make_ball(const Vec3& center, double radius) {
  if (!(radius > 0.0)) throw Error("ball domain must have positive radius");
  Domain d;
  d.kind = DomainKind::Ball;
  d.center = center;
  d.radius = radius;
  d.box = {center - Vec3{radius, radius, radius}, center + Vec3{radius, radius, radius}};
  return d;
}

double Domain::volume() const {
  if (kind == DomainKind::Box) return box.volume();
  return 4.0 * kPi * radius * radius * radius / 3.0;
}

Box3 Domain::bounding_box() const { return box; }

bool Domain::contains(const Vec3& p) const {
  if (kind == DomainKind::Box) return box.contains(p);
  return distance(p, center) <= radius;
}

bool Domain::contains_box(const Box3& b) const {
  if (kind == DomainKind::Box) return box.contains(b.lo) && box.contains(b.hi);
  for (const Vec3& c : b.corners())
    if (!contains(c)) return false;
  return true;
}

double Domain::distance_to(const Vec3& p) const {
  if (kind == DomainKind::Ball) return std::max(0.0, distance(p, center) - radius);
  Vec3 q;
  for (int a = 0; a < 3; ++a) q[a] = std::clamp(p[a], box.lo[a], box.hi[a]);
  return distance(p, q);
}

double Domain::circumradius() const {
  if (kind == DomainKind::Ball) return radius;
  return 0.5 * norm(box.extent());
}

Vec3 Domain::centroid() const { return kind == DomainKind::Ball ? center : box.center(); }

std::string Domain::describe() const {
  std::ostringstream out;
  if (kind == DomainKind::Box) {
    out << "box";
    for (double v : {box.lo.x, box.lo.y, box.lo.z, box.hi.x, box.hi.y, box.hi.z}) out << ' ' << format_double(v);
  } else {
    out << "ball";
    for (double v : {center.x, center.y, center.z, radius}) out << ' ' << format_double(v);
  }
  return out.str();
}

Domain Domain::parse(const std::string& descriptor) {
  std::istringstream in(descriptor);
  std::string kind;
  in >> kind;
  if (kind == "box") {
    const auto v = parse_numbers(in, 6, "domain");
    return make_box({v[0], v[1], v[2]}, {v[3], v[4], v[5]});
  }
  if (kind == "ball") {
    const auto v = parse_numbers(in, 4, "domain");
    return make_ball({v[0], v[1], v[2]}, v[3]);
  }
  throw Error("unknown domain kind: " + kind);
}

KField KField::constant(double value) {
  if (!(value >= 0.0)) throw Error("K must be non-negative");
  KField k;
  k.kind = KKind::Constant;
  k.base = value;
  return k;
}

KField KField::integer_constant(long value) {
  if (value < 0) throw Error("K must be non-negative");
  KField k;
  k.kind = KKind::IntegerConstant;
  k.base = static_cast<double>(value);
  return k;
}

KField KField::linear(double base, const Vec3& gradient) {
  KField k;
  k.kind = KKind::Linear;
  k.base = base;
  k.gradient_vec = gradient;
  return k;
}

KField KField::gaussian(double base, double amplitude, const Vec3& center, double width) {
  if (!(width > 0.0)) throw Error("gaussian K width must be positive");
  KField k;
  k.kind = KKind::Gaussian;
  k.base = base;
  k.amplitude = amplitude;
  k.center = center;
  k.width = width;
  return k;
}

double KField::value(const Vec3& x) const {
  switch (kind) {
    case KKind::Constant:
    case KKind::IntegerConstant:
      return base;
    case KKind::Linear:
      return base + dot(gradient_vec, x);
    case KKind::Gaussian: {
      const Vec3 r = x - center;
      return base + amplitude * std::exp(-dot(r, r) / (2.0 * width * width));
    }
  }
  return base;
}

Vec3 KField::gradient(const Vec3& x) const {
  switch (kind) {
    case KKind::Constant:
    case KKind::IntegerConstant:
      return {};
    case KKind::Linear:
      return gradient_vec;
    case KKind::Gaussian: {
      const Vec3 r = x - center;
      const double g = amplitude * std::exp(-dot(r, r) / (2.0 * width * width));
      return r * (-g / (width * width));
    }
  }
  return {};
}

long KField::weight(const Vec3& x) const {
  const double v = value(x);
  if (v < 0.0) throw Error("K(x) is negative at a sampled point");
  return entire_part(v) + 1;
}

std::string KField::describe() const {
  std::ostringstream out;
  switch (kind) {
    case KKind::Constant:
      out << "constant " << format_double(base);
      break;
    case KKind::IntegerConstant:
      out << "integer " << static_cast<long>(base);
      break;
    case KKind::Linear:
      out << "linear " << format_double(base);
      for (int a = 0; a < 3; ++a) out << ' ' << format_double(gradient_vec[a]);
      break;
    case KKind::Gaussian:
      out << "gaussian " << format_double(base) << ' ' << format_double(amplitude);
      for (int a = 0; a < 3; ++a) out << ' ' << format_double(center[a]);
      out << ' ' << format_double(width);
      break;
  }
  return out.str();
}

KField KField::parse(const std::string& descriptor) {
  std::istringstream in(descriptor);
  std::string kind;
  in >> kind;
  if (kind == "constant") return constant(parse_numbers(in, 1, "K")[0]);
  if (kind == "integer") return integer_constant(std::lround(parse_numbers(in, 1, "K")[0]));
  if (kind == "linear") {
    const auto v = parse_numbers(in, 4, "K");
    return linear(v[0], {v[1], v[2], v[3]});
  }
  if (kind == "gaussian") {
    const auto v = parse_numbers(in, 6, "K");
    return gaussian(v[0], v[1], {v[2], v[3], v[4]}, v[5]);
  }
  throw Error("unknown K kind: " + kind);
}

std::string validate_kfield(const KField& k, std::span<const Vec3> points) {
  for (const Vec3& p : points) {
    const double v = k.value(p);
    if (v < 0.0) return "K is negative at a sampled point";
    if (k.kind == KKind::Linear || k.kind == KKind::Gaussian) {
      if (v == std::floor(v) && norm(k.gradient(p)) == 0.0)
        return "K has a vanishing gradient at an integer level";
    }
  }
  return {};
}

CellPartition partition_domain(const Domain& domain, double epsilon) {
  const double vol = domain.volume();
  if (!(epsilon > 0.0)) throw Error("partition_domain: epsilon must be positive");
  if (!(epsilon < vol)) throw Error("partition_domain: epsilon must be smaller than the domain volume");
  CellPartition p;
  p.domain = domain;
  p.epsilon = epsilon;
  p.edge = std::cbrt(epsilon);
  const Box3 bb = domain.bounding_box();
  p.origin = bb.lo;
  const Vec3 ext = bb.extent();
  p.nx = static_cast<int>(std::floor(ext.x / p.edge + 1e-9));
  p.ny = static_cast<int>(std::floor(ext.y / p.edge + 1e-9));
  p.nz = static_cast<int>(std::floor(ext.z / p.edge + 1e-9));
  p.nominal_count = entire_part(1.0 / epsilon + 1e-9);
  for (int i = 0; i < p.nx; ++i) {
    for (int j = 0; j < p.ny; ++j) {
      for (int k = 0; k < p.nz; ++k) {
        Cell c;
        c.ix = i;
        c.iy = j;
        c.iz = k;
        c.box.lo = p.origin + Vec3{i * p.edge, j * p.edge, k * p.edge};
        c.box.hi = c.box.lo + Vec3{p.edge, p.edge, p.edge};
        // absorb round-off so exact tilings stay inside the bounding box
        for (int a = 0; a < 3; ++a)
          if (c.box.hi[a] > bb.hi[a] && c.box.hi[a] - bb.hi[a] < 1e-8 * p.edge) c.box.hi[a] = bb.hi[a];
        if (!domain.contains_box(c.box)) continue;
        c.centroid = c.box.center();
        c.index = static_cast<int>(p.cells.size());
        p.cells.push_back(c);
      }
    }
  }
  if (p.cells.empty()) throw Error("partition_domain: epsilon too large, no cell fits inside the domain");
  p.dropped_volume = std::max(0.0, vol - static_cast<double>(p.cells.size()) * epsilon);
  return p;
}

std::vector<Vec3> BubbleCloud::centers() const {
  std::vector<Vec3> out(bubbles.size());
  for (std::size_t i = 0; i < bubbles.size(); ++i) out[i] = bubbles[i].center;
  return out;
}

double BubbleCloud::max_diameter() const {
  double m = 0.0;
  for (const auto& s : shapes) m = std::max(m, s.diameter);
  return delta * m;
}

BubbleCloud place_bubbles(const CellPartition& partition, const KField& k, double delta,
                          const ShapeConstants& shape, const PlacementOptions& options) {
  if (!(delta > 0.0)) throw Error("place_bubbles: delta must be positive");
  if (!(options.jitter >= 0.0 && options.jitter <= 1.0)) throw Error("place_bubbles: jitter must lie in [0, 1]");
  BubbleCloud cloud;
  cloud.domain = partition.domain;
  cloud.kfield = k;
  cloud.delta = delta;
  cloud.cell_epsilon = partition.epsilon;
  cloud.cell_edge = partition.edge;
  cloud.seed = options.seed;
  cloud.jitter = options.jitter;
  ShapeConstants s = shape;
  s.id = 0;
  cloud.shapes.push_back(s);
  const double bubble_diam = delta * shape.diameter;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  const double a = partition.edge;
  for (const Cell& c : partition.cells) {
    cloud.cell_begin.push_back(static_cast<int>(cloud.bubbles.size()));
    cloud.cell_boxes.push_back(c.box);
    int g = 1;
    long count = 0;
    for (;; ++g) {
      if (g > 1024) throw Error("place_bubbles: K too large in cell " + std::to_string(c.index));
      const double sub = a / g;
      const Vec3 first = c.box.lo + Vec3{0.5 * sub, 0.5 * sub, 0.5 * sub};
      count = k.weight(first);
      if (count <= static_cast<long>(g) * g * g) break;
    }
    const double sub = a / g;
    if (!(sub > bubble_diam)) {
      throw Error("place_bubbles: infeasible packing in cell " + std::to_string(c.index) + " (" +
                  std::to_string(count) + " bubbles of diameter " + format_double(bubble_diam) +
                  " need sub-box edge " + format_double(sub) + ")");
    }
    const double slack = sub - bubble_diam;
    for (long l = 0; l < count; ++l) {
      const long ix = l / (static_cast<long>(g) * g);
      const long iy = (l / g) % g;
      const long iz = l % g;
      Vec3 p = c.box.lo + Vec3{(ix + 0.5) * sub, (iy + 0.5) * sub, (iz + 0.5) * sub};
      if (options.jitter > 0.0 && l > 0) {
        for (int ax = 0; ax < 3; ++ax) p[ax] += options.jitter * slack * unit(rng);
      }
      cloud.bubbles.push_back({p, c.index, 0});
    }
  }
  cloud.cell_begin.push_back(static_cast<int>(cloud.bubbles.size()));
  return cloud;
}

BubbleCloud make_point_cloud(std::span<const Vec3> centers, double delta, const ShapeConstants& shape) {
  if (centers.empty()) throw Error("make_point_cloud: need at least one centre");
  BubbleCloud cloud;
  Box3 bb{centers[0], centers[0]};
  for (const Vec3& p : centers) {
    for (int a = 0; a < 3; ++a) {
      bb.lo[a] = std::min(bb.lo[a], p[a]);
      bb.hi[a] = std::max(bb.hi[a], p[a]);
    }
  }
  const double pad = delta * shape.diameter + 1e-12;
  cloud.domain = Domain::make_box(bb.lo - Vec3{pad, pad, pad}, bb.hi + Vec3{pad, pad, pad});
  cloud.kfield = KField::constant(0.0);
  cloud.delta = delta;
  ShapeConstants s = shape;
  s.id = 0;
  cloud.shapes.push_back(s);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    cloud.cell_begin.push_back(static_cast<int>(i));
    cloud.cell_boxes.push_back({centers[i], centers[i]});
    cloud.bubbles.push_back({centers[i], static_cast<int>(i), 0});
  }
  cloud.cell_begin.push_back(static_cast<int>(centers.size()));
  return cloud;
}

double min_pair_distance_bruteforce(std::span<const Vec3> points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) best = std::min(best, distance(points[i], points[j]));
  return best;
}

double min_pair_distance(std::span<const Vec3> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a].x < points[b].x; });
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < order.size(); ++a) {
    const Vec3& p = points[order[a]];
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const Vec3& q = points[order[b]];
      if (q.x - p.x > best) break;
      best = std::min(best, distance(p, q));
    }
  }
  return best;
}

CloudStats cloud_stats(const BubbleCloud& cloud, const RegimeBands& bands) {
  if (cloud.size() < 1) throw Error("cloud_stats: empty cloud");
  CloudStats s;
  const auto pts = cloud.centers();
  s.M = pts.size();
  s.d = pts.size() >= 2 ? min_pair_distance(pts) : std::numeric_limits<double>::infinity();
  s.epsilon = cloud.max_diameter();
  s.md3 = static_cast<double>(s.M) * s.d * s.d * s.d;
  s.d_over_delta3 = s.d / (cloud.delta * cloud.delta * cloud.delta);
  s.md3_in_band = s.md3 >= bands.md3_lo && s.md3 <= bands.md3_hi;
  s.d_delta3_in_band = s.d_over_delta3 >= bands.d_over_delta3_lo && s.d_over_delta3 <= bands.d_over_delta3_hi;
  return s;
}

std::vector<CountingResult> verify_counting(std::span<const Vec3> points, std::span<const double> exponents) {
  const std::size_t M = points.size();
  const std::size_t K = exponents.size();
  if (M < 2) throw Error("verify_counting: need at least two points");
  std::vector<CountingResult> out(K);
  for (std::size_t e = 0; e < K; ++e) {
    if (!(exponents[e] > 0.0)) throw Error("verify_counting: exponent must be positive");
    out[e].exponent = exponents[e];
    out[e].sums.assign(M, 0.0);
  }
  std::vector<double> half(K);
  std::vector<int> even(K);
  for (std::size_t e = 0; e < K; ++e) {
    half[e] = 0.5 * exponents[e];
    even[e] = (exponents[e] == std::floor(exponents[e]) && exponents[e] <= 8.0) ? static_cast<int>(exponents[e]) : 0;
  }
  std::vector<double> xs(M), ys(M), zs(M);
  for (std::size_t i = 0; i < M; ++i) {
    xs[i] = points[i].x;
    ys[i] = points[i].y;
    zs[i] = points[i].z;
  }
  int max_power = 0;
  bool all_integer = true;
  for (std::size_t e = 0; e < K; ++e) {
    max_power = std::max(max_power, even[e]);
    all_integer = all_integer && even[e] > 0;
  }
  // each pair is visited once; per-thread compensated partials are merged in thread order,
  // so the result is bit-stable for a fixed thread count
  const int nthreads = thread_count();
  std::vector<std::vector<CompensatedSum>> partial(static_cast<std::size_t>(nthreads));
#pragma omp parallel num_threads(nthreads)
  {
    int tid = 0;
#ifdef _OPENMP
    tid = omp_get_thread_num();
#endif
    std::vector<CompensatedSum>& local = partial[static_cast<std::size_t>(tid)];
    local.assign(K * M, CompensatedSum{});
    double pw[9];
#pragma omp for schedule(static, 16)
    for (std::size_t i = 0; i < M; ++i) {
      const double px = xs[i], py = ys[i], pz = zs[i];
      for (std::size_t j = i + 1; j < M; ++j) {
        const double dx = xs[j] - px, dy = ys[j] - py, dz = zs[j] - pz;
        const double r2 = dx * dx + dy * dy + dz * dz;
        pw[1] = 1.0 / std::sqrt(r2);
        for (int p = 2; p <= max_power; ++p) pw[p] = pw[p - 1] * pw[1];
        for (std::size_t e = 0; e < K; ++e) {
          const double term = all_integer || even[e] > 0 ? pw[even[e]] : std::pow(r2, -half[e]);
          local[e * M + i].add(term);
          local[e * M + j].add(term);
        }
      }
    }
  }
  for (std::size_t e = 0; e < K; ++e)
    for (std::size_t i = 0; i < M; ++i) {
      CompensatedSum total;
      for (const auto& local : partial)
        if (!local.empty()) {
          total.add(local[e * M + i].value());
        }
      out[e].sums[i] = total.value();
    }
  const double d = min_pair_distance(points);
  for (auto& res : out) {
    res.d = d;
    res.max_sum = *std::max_element(res.sums.begin(), res.sums.end());
    const double k = res.exponent;
    if (k < 3.0) {
      res.normalized = res.max_sum * d * d * d;
    } else if (k == 3.0) {
      res.normalized = res.max_sum * d * d * d / (1.0 + std::abs(std::log(d)));
    } else {
      res.normalized = res.max_sum * std::pow(d, k);
    }
  }
  return out;
}

CountingResult verify_counting(std::span<const Vec3> points, double exponent) {
  const double e[1] = {exponent};
  return std::move(verify_counting(points, std::span<const double>(e, 1)).front());
}

std::vector<Vec3> cubic_lattice(int n) {
  if (n < 1) throw Error("cubic_lattice: n must be positive");
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(n) * n * n);
  const double a = 1.0 / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) pts.push_back({(i + 0.5) * a, (j + 0.5) * a, (k + 0.5) * a});
  return pts;
}

}  // namespace bubbly
