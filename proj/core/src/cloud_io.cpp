#include "bubbly/cloud_io.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "bubbly/numerics.hpp"

namespace bubbly {

void write_cloud(std::ostream& out, const BubbleCloud& cloud) {
  const std::size_t M = cloud.size();
  const double d = M >= 2 ? min_pair_distance(cloud.centers()) : 0.0;
  out << kCloudFormatTag << ' ' << kCloudFormatVersion << '\n';
  out << "delta " << format_double(cloud.delta) << '\n';
  out << "epsilon " << format_double(cloud.cell_epsilon) << '\n';
  out << "d " << format_double(d) << '\n';
  out << "M " << M << '\n';
  out << "domain " << cloud.domain.describe() << '\n';
  out << "kfield " << cloud.kfield.describe() << '\n';
  out << "seed " << cloud.seed << '\n';
  out << "jitter " << format_double(cloud.jitter) << '\n';
  out << "shapes " << cloud.shapes.size() << '\n';
  for (const auto& s : cloud.shapes)
    out << "shape " << s.id << ' ' << shape_kind_name(s.kind) << ' ' << format_double(s.radius) << '\n';
  out << "cells " << cloud.cell_count() << '\n';
  out << "bubbles\n";
  for (std::size_t i = 0; i < M; ++i) {
    const Bubble& b = cloud.bubbles[i];
    out << i << ' ' << b.cell << ' ' << format_double(b.center.x) << ' ' << format_double(b.center.y) << ' '
        << format_double(b.center.z) << ' ' << b.shape << '\n';
  }
  if (!out) throw Error("write_cloud: stream failure");
}

void write_cloud(const std::string& path, const BubbleCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw Error("write_cloud: cannot open " + path);
  write_cloud(out, cloud);
}

namespace {

std::string expect_line(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw Error("read_cloud: unexpected end of file before '" + key + "'");
  if (line.rfind(key, 0) != 0) throw Error("read_cloud: expected '" + key + "', found '" + line + "'");
  return line.size() > key.size() ? line.substr(key.size() + 1) : std::string{};
}

}  // namespace

BubbleCloud read_cloud(std::istream& in) {
  BubbleCloud cloud;
  {
    std::string line;
    if (!std::getline(in, line)) throw Error("read_cloud: empty input");
    std::istringstream hs(line);
    std::string tag;
    int version = 0;
    hs >> tag >> version;
    if (tag != kCloudFormatTag) throw Error("read_cloud: not a cloud record");
    if (version != kCloudFormatVersion) throw Error("read_cloud: unsupported version " + std::to_string(version));
  }
  cloud.delta = std::stod(expect_line(in, "delta"));
  cloud.cell_epsilon = std::stod(expect_line(in, "epsilon"));
  expect_line(in, "d");
  const std::size_t M = std::stoul(expect_line(in, "M"));
  cloud.domain = Domain::parse(expect_line(in, "domain"));
  cloud.kfield = KField::parse(expect_line(in, "kfield"));
  cloud.seed = std::stoull(expect_line(in, "seed"));
  cloud.jitter = std::stod(expect_line(in, "jitter"));
  const std::size_t nshapes = std::stoul(expect_line(in, "shapes"));
  for (std::size_t s = 0; s < nshapes; ++s) {
    std::istringstream ss(expect_line(in, "shape"));
    int id = 0;
    std::string kind, radius;
    ss >> id >> kind >> radius;
    parse_shape_kind(kind);
    cloud.shapes.push_back(make_sphere(std::stod(radius), id));
  }
  const std::size_t ncells = std::stoul(expect_line(in, "cells"));
  expect_line(in, "bubbles");
  cloud.bubbles.resize(M);
  for (std::size_t i = 0; i < M; ++i) {
    std::string line;
    if (!std::getline(in, line)) throw Error("read_cloud: truncated bubble list");
    std::istringstream ls(line);
    std::size_t idx = 0;
    std::string x, y, z;
    Bubble b;
    ls >> idx >> b.cell >> x >> y >> z >> b.shape;
    if (!ls || idx != i) throw Error("read_cloud: malformed bubble line " + std::to_string(i));
    b.center = {std::stod(x), std::stod(y), std::stod(z)};
    if (b.shape < 0 || static_cast<std::size_t>(b.shape) >= cloud.shapes.size())
      throw Error("read_cloud: unknown shape id on line " + std::to_string(i));
    cloud.bubbles[i] = b;
  }
  if (cloud.cell_epsilon > 0.0) {
    const CellPartition p = partition_domain(cloud.domain, cloud.cell_epsilon);
    if (p.cells.size() != ncells) throw Error("read_cloud: cell count does not match the partition");
    cloud.cell_edge = p.edge;
    for (const Cell& c : p.cells) cloud.cell_boxes.push_back(c.box);
  } else {
    for (std::size_t i = 0; i < M; ++i) cloud.cell_boxes.push_back({cloud.bubbles[i].center, cloud.bubbles[i].center});
  }
  cloud.cell_begin.assign(ncells + 1, 0);
  int prev = 0;
  for (std::size_t i = 0; i < M; ++i) {
    const int c = cloud.bubbles[i].cell;
    if (c < prev || static_cast<std::size_t>(c) >= ncells) throw Error("read_cloud: bubbles must be grouped by cell");
    prev = c;
  }
  std::size_t i = 0;
  for (std::size_t c = 0; c < ncells; ++c) {
    cloud.cell_begin[c] = static_cast<int>(i);
    while (i < M && static_cast<std::size_t>(cloud.bubbles[i].cell) == c) ++i;
  }
  cloud.cell_begin[ncells] = static_cast<int>(M);
  return cloud;
}

BubbleCloud read_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_cloud: cannot open " + path);
  return read_cloud(in);
}

}  // namespace bubbly
