#include "bubbly/outputs.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace bubbly {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error("write failure on " + path);
}

}  // namespace

std::vector<std::string> emit_outputs(const ComparisonResult& result, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir + ": " + ec.message());
  std::vector<std::string> written;
  const auto path = [&](const std::string& name) { return (std::filesystem::path(dir) / name).string(); };

  {
    const std::string p = path("errors.csv");
    auto out = open_out(p);
    out << "delta,M,d,eps,e_max,e_l2,runtime_s\n";
    for (const auto& r : result.runs) {
      if (r.skipped) continue;
      out << format_double(r.delta) << ',' << r.M << ',' << format_double(r.d) << ',' << format_double(r.eps) << ','
          << format_double(r.e_max) << ',' << format_double(r.e_l2) << ',' << format_double(r.runtime_s) << '\n';
    }
    finish(out, p);
    written.push_back(p);
  }
  {
    const std::string p = path("conditions.csv");
    auto out = open_out(p);
    out << "delta,id,lhs,rhs,margin,pass\n";
    for (const auto& r : result.runs)
      for (const auto& c : r.conditions.rows)
        out << format_double(r.delta) << ',' << c.id << ',' << format_double(c.lhs) << ',' << format_double(c.rhs)
            << ',' << format_double(c.margin) << ',' << (c.pass ? 1 : 0) << '\n';
    finish(out, p);
    written.push_back(p);
  }
  for (std::size_t k = 0; k < result.runs.size(); ++k) {
    const auto& r = result.runs[k];
    if (r.skipped) continue;
    const std::string p = path("probes_" + std::to_string(k) + ".csv");
    auto out = open_out(p);
    out << "t,probe,u_s,w_s\n";
    for (std::size_t q = 0; q < r.u_s.size(); ++q)
      for (std::size_t n = 0; n < r.times.size(); ++n)
        out << format_double(r.times[n]) << ',' << q << ',' << format_double(r.u_s[q][n]) << ','
            << format_double(r.w_s[q][n]) << '\n';
    finish(out, p);
    written.push_back(p);
  }
  {
    const std::string p = path("plot_data.csv");
    auto out = open_out(p);
    out << "log10_delta,log10_e,log10_fit\n";
    for (const auto& r : result.runs) {
      if (r.skipped || !(r.e_max > 0.0)) continue;
      const double fit =
          result.fit ? (result.fit->intercept + result.fit->slope * std::log(r.delta)) / std::log(10.0) : NAN;
      out << format_double(std::log10(r.delta)) << ',' << format_double(std::log10(r.e_max)) << ','
          << format_double(fit) << '\n';
    }
    finish(out, p);
    written.push_back(p);
  }
  return written;
}

std::vector<ErrorRow> read_errors_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line != "delta,M,d,eps,e_max,e_l2,runtime_s") throw Error("unexpected errors.csv header in " + path);
  std::vector<ErrorRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f[7];
    for (auto& s : f)
      if (!std::getline(ls, s, ',')) throw Error("malformed errors.csv row: " + line);
    rows.push_back({std::stod(f[0]), std::stoul(f[1]), std::stod(f[2]), std::stod(f[3]), std::stod(f[4]),
                    std::stod(f[5]), std::stod(f[6])});
  }
  return rows;
}

void write_probe_csv(const std::string& path, const std::vector<double>& times,
                     const std::vector<std::vector<double>>& series) {
  auto out = open_out(path);
  out << "t,probe,value\n";
  for (std::size_t q = 0; q < series.size(); ++q)
    for (std::size_t n = 0; n < times.size() && n < series[q].size(); ++n)
      out << format_double(times[n]) << ',' << q << ',' << format_double(series[q][n]) << '\n';
  finish(out, path);
}

}  // namespace bubbly
