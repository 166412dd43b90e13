#include "mml/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

using nlohmann::json;

namespace mml {

namespace {
json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}
}  // namespace

MetricMeasureSpace load_space(const std::string& path) {
  json j = read_json(path);
  int n = j.at("n").get<int>();
  Eigen::VectorXd mu(n);
  const auto& meas = j.at("measure");
  if (static_cast<int>(meas.size()) != n)
    throw std::runtime_error("measure length mismatch in " + path);
  for (int i = 0; i < n; ++i) mu[i] = meas[i].get<double>();

  const auto& metric = j.at("metric");
  std::string type = metric.at("type").get<std::string>();
  MetricMeasureSpace s;
  if (type == "explicit") {
    Eigen::MatrixXd d(n, n);
    const auto& mat = metric.at("matrix");
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) d(i, k) = mat[i][k].get<double>();
    s = MetricMeasureSpace::from_matrix(std::move(d), std::move(mu));
  } else if (type == "graph") {
    std::vector<Edge> edges;
    for (const auto& e : metric.at("edges")) {
      Edge ed;
      ed.u = e[0].get<int>();
      ed.v = e[1].get<int>();
      ed.length = e[2].get<double>();
      ed.conductance = e.size() > 3 ? e[3].get<double>() : 1.0 / ed.length;
      edges.push_back(ed);
    }
    s = MetricMeasureSpace::from_graph(n, std::move(edges), std::move(mu));
  } else {
    throw std::runtime_error("unknown metric type '" + type + "'");
  }
  if (j.contains("coords")) {
    for (const auto& row : j["coords"])
      s.coords.push_back(row.get<std::vector<double>>());
  }
  if (j.contains("generator")) s.generator = j["generator"].get<std::string>();
  return s;
}

void save_space(const MetricMeasureSpace& s, const std::string& path) {
  json j;
  j["n"] = s.n;
  j["measure"] = std::vector<double>(s.mu.data(), s.mu.data() + s.n);
  if (s.graph_metric()) {
    json edges = json::array();
    for (const auto& e : s.edges)
      edges.push_back({e.u, e.v, e.length, e.conductance});
    j["metric"] = {{"type", "graph"}, {"edges", edges}};
  } else {
    json mat = json::array();
    for (int i = 0; i < s.n; ++i) {
      Eigen::VectorXd row = s.dist_row(i);
      mat.push_back(std::vector<double>(row.data(), row.data() + s.n));
    }
    j["metric"] = {{"type", "explicit"}, {"matrix", mat}};
  }
  if (!s.coords.empty()) j["coords"] = s.coords;
  if (!s.generator.empty()) j["generator"] = s.generator;
  write_json(j, path);
}

CubeHierarchy load_hierarchy(const std::string& path) {
  json j = read_json(path);
  CubeHierarchy h;
  h.rho = j.at("rho").get<double>();
  h.m = j.at("m").get<int>();
  for (const auto& lvl : j.at("levels")) {
    std::vector<Cube> cubes;
    for (const auto& cj : lvl.at("cubes")) {
      Cube c;
      c.center = cj.at("center").get<int>();
      c.members = cj.at("members").get<std::vector<int>>();
      if (cj.contains("parent")) c.parent = cj["parent"].get<int>();
      cubes.push_back(std::move(c));
    }
    h.levels.push_back(std::move(cubes));
  }
  return h;
}

void save_hierarchy(const CubeHierarchy& h, const std::string& path) {
  json j;
  j["rho"] = h.rho;
  j["m"] = h.m;
  json levels = json::array();
  for (size_t i = 0; i < h.levels.size(); ++i) {
    json cubes = json::array();
    for (const auto& c : h.levels[i]) {
      json cj = {{"center", c.center}, {"members", c.members}};
      if (c.parent >= 0) cj["parent"] = c.parent;
      cubes.push_back(cj);
    }
    levels.push_back({{"k", h.m + static_cast<int>(i)}, {"cubes", cubes}});
  }
  j["levels"] = levels;
  write_json(j, path);
}

Eigen::VectorXd load_potential(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string first;
  std::getline(in, first);
  in.seekg(0);
  if (!first.empty() && first[0] == '[') {
    json j;
    in >> j;
    if (static_cast<int>(j.size()) != n)
      throw std::runtime_error("potential length mismatch in " + path);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = j[i].get<double>();
    return v;
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  std::vector<char> seen(n, 0);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("bad CSV line in " + path + ": " + line);
    std::string a = line.substr(0, comma), b = line.substr(comma + 1);
    try {
      int id = std::stoi(a);
      double val = std::stod(b);
      if (id < 0 || id >= n)
        throw std::runtime_error("point id out of range in " + path);
      v[id] = val;
      seen[id] = 1;
    } catch (const std::invalid_argument&) {
      continue;  // header line
    }
  }
  return v;
}

void save_csv_vector(const Eigen::VectorXd& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "point_id,value\n";
  char buf[64];
  for (int i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g\n", i, v[i]);
    out << buf;
  }
}

KernelSpec load_kernel_spec(const std::string& path) {
  json j = read_json(path);
  KernelSpec k;
  k.type = j.at("type").get<std::string>();
  if (k.type == "riesz") {
    k.s = j.at("s").get<double>();
  } else if (k.type == "bessel") {
    k.s = j.at("s").get<double>();
    k.lambda = j.at("lambda").get<double>();
  } else if (k.type == "power") {
    k.exponent = j.at("exponent").get<double>();
  } else if (k.type == "matrix") {
    k.matrix_path = j.at("path").get<std::string>();
  } else {
    throw std::runtime_error("unknown kernel type '" + k.type + "'");
  }
  return k;
}

void save_matrix_binary(const Eigen::MatrixXd& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  std::uint64_t n = static_cast<std::uint64_t>(m.rows());
  unsigned char hdr[8];
  for (int i = 0; i < 8; ++i) hdr[i] = (n >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(hdr), 8);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      double v = m(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
}

Eigen::MatrixXd load_matrix_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  unsigned char hdr[8];
  in.read(reinterpret_cast<char*>(hdr), 8);
  if (!in) throw std::runtime_error("truncated header in " + path);
  std::uint64_t n = 0;
  for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(hdr[i]) << (8 * i);
  Eigen::MatrixXd m(n, n);
  for (std::uint64_t r = 0; r < n; ++r)
    for (std::uint64_t c = 0; c < n; ++c) {
      double v;
      in.read(reinterpret_cast<char*>(&v), sizeof(double));
      if (!in) throw std::runtime_error("truncated matrix in " + path);
      m(r, c) = v;
    }
  return m;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
    if (!in) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(h));
  return out;
}

void write_svg_plot(const std::string& path, const std::vector<double>& xs,
                    const std::vector<std::vector<double>>& series,
                    const std::vector<std::string>& labels,
                    const std::string& title) {
  if (xs.empty() || series.empty())
    throw std::invalid_argument("empty plot data");
  for (const auto& s : series)
    if (s.size() != xs.size())
      throw std::invalid_argument("series/x length mismatch");
  const double W = 640, H = 420, ml = 60, mr = 20, mt = 40, mb = 40;
  double xmin = xs.front(), xmax = xs.front();
  for (double x : xs) { xmin = std::min(xmin, x); xmax = std::max(xmax, x); }
  double ymin = series[0][0], ymax = series[0][0];
  for (const auto& s : series)
    for (double y : s) { ymin = std::min(ymin, y); ymax = std::max(ymax, y); }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b"};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.4g", ymin);
  out << "<text x=\"6\" y=\"" << H - mb << "\" font-family=\"sans-serif\" "
         "font-size=\"11\">" << buf << "</text>\n";
  std::snprintf(buf, sizeof(buf), "%.4g", ymax);
  out << "<text x=\"6\" y=\"" << mt + 4 << "\" font-family=\"sans-serif\" "
         "font-size=\"11\">" << buf << "</text>\n";
  for (size_t si = 0; si < series.size(); ++si) {
    out << "<polyline fill=\"none\" stroke=\"" << colors[si % 6]
        << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < xs.size(); ++i)
      out << px(xs[i]) << ',' << py(series[si][i]) << ' ';
    out << "\"/>\n";
    std::string label = si < labels.size() ? labels[si] : "";
    if (!label.empty())
      out << "<text x=\"" << W - mr - 150 << "\" y=\"" << mt + 16 * (si + 1)
          << "\" fill=\"" << colors[si % 6]
          << "\" font-family=\"sans-serif\" font-size=\"12\">" << label
          << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace mml
