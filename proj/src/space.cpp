#include "mml/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <set>

namespace mml {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MetricMeasureSpace MetricMeasureSpace::from_matrix(Eigen::MatrixXd d,
                                                   Eigen::VectorXd mu) {
  MetricMeasureSpace s;
  s.n = static_cast<int>(d.rows());
  if (d.cols() != s.n) throw std::invalid_argument("distance matrix not square");
  if (mu.size() != s.n) throw std::invalid_argument("measure size mismatch");
  s.mu = std::move(mu);
  s.dense_ = std::move(d);
  s.has_dense_ = true;
  s.validate();
  return s;
}

MetricMeasureSpace MetricMeasureSpace::from_graph(int n, std::vector<Edge> edges,
                                                  Eigen::VectorXd mu) {
  MetricMeasureSpace s;
  s.n = n;
  if (mu.size() != n) throw std::invalid_argument("measure size mismatch");
  s.mu = std::move(mu);
  s.edges = std::move(edges);
  for (const auto& e : s.edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.length <= 0) throw std::invalid_argument("non-positive edge length");
  }
  s.build_adjacency();
  // connectivity check via one sweep
  Eigen::VectorXd row = s.sssp(0);
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(row[i]))
      throw std::invalid_argument("graph metric requires a connected graph");
  s.validate();
  return s;
}

void MetricMeasureSpace::build_adjacency() {
  adj_.assign(n, {});
  for (const auto& e : edges) {
    adj_[e.u].push_back({e.v, e.length});
    adj_[e.v].push_back({e.u, e.length});
  }
}

Eigen::VectorXd MetricMeasureSpace::sssp(int source) const {
  Eigen::VectorXd d = Eigen::VectorXd::Constant(n, kInf);
  d[source] = 0.0;
  // uniform edge lengths: plain BFS
  bool uniform = true;
  double len0 = edges.empty() ? 1.0 : edges[0].length;
  for (const auto& e : edges)
    if (e.length != len0) { uniform = false; break; }
  if (uniform) {
    std::vector<int> q{source};
    std::vector<int> next;
    double level = 0.0;
    std::vector<char> seen(n, 0);
    seen[source] = 1;
    while (!q.empty()) {
      next.clear();
      for (int u : q) {
        d[u] = level;
        for (auto [v, w] : adj_[u])
          if (!seen[v]) { seen[v] = 1; next.push_back(v); }
      }
      level += len0;
      std::swap(q, next);
    }
    return d;
  }
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du > d[u]) continue;
    for (auto [v, w] : adj_[u]) {
      if (du + w < d[v]) {
        d[v] = du + w;
        pq.push({d[v], v});
      }
    }
  }
  return d;
}

void MetricMeasureSpace::ensure_dense() const {
  if (has_dense_ || n > kDenseCap) return;
  dense_.resize(n, n);
  for (int i = 0; i < n; ++i) dense_.row(i) = sssp(i).transpose();
  has_dense_ = true;
}

double MetricMeasureSpace::dist(int x, int y) const {
  if (x == y) return 0.0;
  ensure_dense();
  if (has_dense_) return dense_(x, y);
  return sssp(x)[y];
}

Eigen::VectorXd MetricMeasureSpace::dist_row(int x) const {
  ensure_dense();
  if (has_dense_) return dense_.row(x);
  return sssp(x);
}

double MetricMeasureSpace::diameter() const {
  if (diameter_ >= 0) return diameter_;
  double d = 0;
  ensure_dense();
  if (has_dense_) {
    d = dense_.maxCoeff();
  } else {
    for (int i = 0; i < n; ++i) d = std::max(d, dist_row(i).maxCoeff());
  }
  diameter_ = d;
  return d;
}

double MetricMeasureSpace::min_positive_distance() const {
  if (min_pos_ >= 0) return min_pos_;
  double m = kInf;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd row = dist_row(i);
    for (int j = 0; j < n; ++j)
      if (row[j] > 0) m = std::min(m, row[j]);
  }
  min_pos_ = (n > 1) ? m : 1.0;
  return min_pos_;
}

double MetricMeasureSpace::total_measure() const { return mu.sum(); }

std::vector<int> MetricMeasureSpace::ball_members(int center, double r) const {
  if (center < 0 || center >= n) throw std::invalid_argument("unknown point id");
  if (r <= 0) throw std::invalid_argument("ball radius must be positive");
  Eigen::VectorXd row = dist_row(center);
  std::vector<int> out;
  for (int j = 0; j < n; ++j)
    if (row[j] < r) out.push_back(j);
  return out;
}

double MetricMeasureSpace::ball_measure(int center, double r) const {
  Eigen::VectorXd row = dist_row(center);
  double m = 0;
  for (int j = 0; j < n; ++j)
    if (row[j] < r) m += mu[j];
  return m;
}

std::vector<double> MetricMeasureSpace::distance_values(int x) const {
  Eigen::VectorXd row = dist_row(x);
  std::set<double> vals;
  for (int j = 0; j < n; ++j)
    if (row[j] > 0) vals.insert(row[j]);
  return {vals.begin(), vals.end()};
}

std::vector<double> MetricMeasureSpace::critical_radii(int x, double rmax) const {
  std::set<double> breaks;
  for (double d : distance_values(x)) {
    breaks.insert(d);
    breaks.insert(d / 2);
  }
  std::vector<double> b(breaks.begin(), breaks.end());
  std::vector<double> out;
  double prev = 0.0;
  for (double v : b) {
    if (v > rmax) break;
    out.push_back(0.5 * (prev + v));
    out.push_back(v);
    prev = v;
  }
  if (prev < rmax) out.push_back(std::min(rmax, prev + 0.5));
  std::vector<double> res;
  for (double r : out)
    if (r > 0 && r <= rmax) res.push_back(r);
  return res;
}

void MetricMeasureSpace::validate() const {
  for (int i = 0; i < n; ++i)
    if (!(mu[i] > 0)) throw std::invalid_argument("measure must be positive");
  if (!has_dense_ && n > kDenseCap) return;  // graph metric is valid by construction
  ensure_dense();
  if (!has_dense_) return;
  for (int i = 0; i < n; ++i) {
    if (dense_(i, i) != 0) throw std::invalid_argument("d(x,x) != 0");
    for (int j = i + 1; j < n; ++j) {
      if (dense_(i, j) != dense_(j, i))
        throw std::invalid_argument("metric not symmetric");
      if (!(dense_(i, j) > 0))
        throw std::invalid_argument("zero distance between distinct points");
    }
  }
  if (graph_metric()) return;  // shortest paths satisfy the triangle inequality
  auto check = [&](int i, int j, int k) {
    if (dense_(i, j) > dense_(i, k) + dense_(k, j) + 1e-12)
      throw std::invalid_argument("triangle inequality violated");
  };
  if (n <= 500) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = 0; k < n; ++k) check(i, j, k);
  } else {
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int t = 0; t < 1000000; ++t) check(pick(rng), pick(rng), pick(rng));
  }
}

SortedBallScan::SortedBallScan(const MetricMeasureSpace& s, int center) {
  Eigen::VectorXd row = s.dist_row(center);
  order.resize(s.n);
  for (int i = 0; i < s.n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return row[a] < row[b]; });
  dist.resize(s.n);
  mu_pre.resize(s.n);
  double acc = 0;
  for (int i = 0; i < s.n; ++i) {
    dist[i] = row[order[i]];
    acc += s.mu[order[i]];
    mu_pre[i] = acc;
  }
}

DoublingProfile doubling_profile(const MetricMeasureSpace& s, double R) {
  if (R <= 0) throw std::invalid_argument("R must be positive");
  DoublingProfile p;
  p.R = R;
  for (int x = 0; x < s.n; ++x) {
    SortedBallScan scan(s, x);
    for (double r : s.critical_radii(x, R)) {
      // mu(B(x,r)) and mu(B(x,2r)) via the sorted row
      auto measure_below = [&](double rad) {
        auto it = std::lower_bound(scan.dist.begin(), scan.dist.end(), rad);
        int k = static_cast<int>(it - scan.dist.begin());
        return (k == 0) ? 0.0 : scan.mu_pre[k - 1];
      };
      double inner = measure_below(r);
      if (inner <= 0) continue;
      double outer = measure_below(2 * r);
      double ratio = outer / inner;
      if (ratio > p.A) {
        p.A = ratio;
        p.witness_center = x;
        p.witness_radius = r;
      }
    }
  }
  // reverse-doubling constant: max mu(B)/mu(2B) over the same family
  double amax = 0.0;
  for (int x = 0; x < s.n; ++x) {
    SortedBallScan scan(s, x);
    for (double r : s.critical_radii(x, R)) {
      auto measure_below = [&](double rad) {
        auto it = std::lower_bound(scan.dist.begin(), scan.dist.end(), rad);
        int k = static_cast<int>(it - scan.dist.begin());
        return (k == 0) ? 0.0 : scan.mu_pre[k - 1];
      };
      double inner = measure_below(r);
      double outer = measure_below(2 * r);
      if (inner <= 0 || outer <= 0) continue;
      amax = std::max(amax, inner / outer);
    }
  }
  p.a = (amax > 0) ? amax : 1.0;
  p.eta = std::log2(p.A);
  p.nu = -std::log2(p.a);
  p.D = 8.0 * std::log(p.A);
  return p;
}

double annuli_constant(const MetricMeasureSpace& s, double R) {
  if (R <= 0) throw std::invalid_argument("R must be positive");
  double C = 1.0;
  double Rq = R / 4;
  for (int x = 0; x < s.n; ++x) {
    SortedBallScan scan(s, x);
    auto measure_below = [&](double rad) {
      auto it = std::lower_bound(scan.dist.begin(), scan.dist.end(), rad);
      int k = static_cast<int>(it - scan.dist.begin());
      return (k == 0) ? 0.0 : scan.mu_pre[k - 1];
    };
    for (double r : s.critical_radii(x, s.diameter() + 1)) {
      double inner = measure_below(r);
      if (inner <= 0) continue;
      C = std::max(C, measure_below(r + Rq) / inner);
    }
  }
  return C;
}

ExpDoublingResult exp_doubling_constant(const MetricMeasureSpace& s, double R) {
  if (R <= 0) throw std::invalid_argument("R must be positive");
  ExpDoublingResult res;
  for (int x = 0; x < s.n; ++x) {
    SortedBallScan scan(s, x);
    auto measure_below = [&](double rad) {
      auto it = std::lower_bound(scan.dist.begin(), scan.dist.end(), rad);
      int k = static_cast<int>(it - scan.dist.begin());
      return (k == 0) ? 0.0 : scan.mu_pre[k - 1];
    };
    double mR = measure_below(R);
    for (double r : s.critical_radii(x, s.diameter() + 1)) {
      double m = measure_below(r);
      if (m <= mR) continue;
      // need exp(D r / R) >= m / mR
      res.D_emp = std::max(res.D_emp, std::log(m / mR) * R / r);
    }
  }
  res.D_bound = doubling_profile(s, R).D;
  return res;
}

std::vector<int> separated_cover(const MetricMeasureSpace& s, int center,
                                 double r, double delta) {
  if (delta <= 0) throw std::invalid_argument("delta must be positive");
  if (delta > r) throw std::invalid_argument("delta exceeds ball radius");
  std::vector<int> members = s.ball_members(center, r);
  std::vector<int> out;
  for (int y : members) {
    bool ok = true;
    for (int c : out)
      if (s.dist(y, c) < delta) { ok = false; break; }
    if (ok) out.push_back(y);
  }
  return out;
}

std::vector<int> vitali_subcover(const MetricMeasureSpace& s,
                                 const std::vector<BallSpec>& balls, double c) {
  if (c <= 3) throw std::invalid_argument("dilation factor must exceed 3");
  std::vector<int> idx(balls.size());
  for (size_t i = 0; i < balls.size(); ++i) idx[i] = static_cast<int>(i);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return balls[a].radius > balls[b].radius;
  });
  std::vector<std::vector<char>> member(balls.size(),
                                        std::vector<char>(s.n, 0));
  for (size_t i = 0; i < balls.size(); ++i)
    for (int y : s.ball_members(balls[i].center, balls[i].radius))
      member[i][y] = 1;
  std::vector<int> chosen;
  for (int i : idx) {
    bool disjoint = true;
    for (int j : chosen) {
      for (int y = 0; y < s.n && disjoint; ++y)
        if (member[i][y] && member[j][y]) disjoint = false;
      if (!disjoint) break;
    }
    if (disjoint) chosen.push_back(i);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

// --- generators ---

MetricMeasureSpace make_path(int n, double h) {
  if (n < 1 || h <= 0) throw std::invalid_argument("bad path parameters");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i)
    edges.push_back({i, i + 1, h, 1.0 / h});  // w = sigma^2 h^{d-2}, d = 1
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(n, h);
  MetricMeasureSpace s =
      (n == 1) ? MetricMeasureSpace::from_matrix(Eigen::MatrixXd::Zero(1, 1), mu)
               : MetricMeasureSpace::from_graph(n, edges, mu);
  s.coords.resize(n);
  for (int i = 0; i < n; ++i) s.coords[i] = {i * h};
  s.generator = "path(" + std::to_string(n) + ")";
  return s;
}

MetricMeasureSpace make_grid(int dim, int side, double h, const WeightFn& sigma2) {
  if (dim < 1 || side < 1 || h <= 0) throw std::invalid_argument("bad grid");
  int n = 1;
  for (int k = 0; k < dim; ++k) n *= side;
  std::vector<std::vector<double>> coords(n, std::vector<double>(dim));
  for (int i = 0; i < n; ++i) {
    int rem = i;
    for (int k = dim - 1; k >= 0; --k) {
      coords[i][k] = (rem % side) * h;
      rem /= side;
    }
  }
  auto w_at = [&](const std::vector<double>& c) {
    return sigma2 ? sigma2(c) : 1.0;
  };
  std::vector<Edge> edges;
  int stride = 1;
  for (int k = dim - 1; k >= 0; --k) {
    for (int i = 0; i < n; ++i) {
      int coord = (i / stride) % side;
      if (coord + 1 < side) {
        int j = i + stride;
        std::vector<double> mid(dim);
        for (int q = 0; q < dim; ++q) mid[q] = 0.5 * (coords[i][q] + coords[j][q]);
        edges.push_back({i, j, h, w_at(mid) * std::pow(h, dim - 2)});
      }
    }
    stride *= side;
  }
  Eigen::VectorXd mu(n);
  for (int i = 0; i < n; ++i) mu[i] = w_at(coords[i]) * std::pow(h, dim);
  MetricMeasureSpace s =
      (n == 1) ? MetricMeasureSpace::from_matrix(Eigen::MatrixXd::Zero(1, 1), mu)
               : MetricMeasureSpace::from_graph(n, std::move(edges), mu);
  s.coords = std::move(coords);
  s.generator = "grid(" + std::to_string(dim) + "," + std::to_string(side) + ")";
  return s;
}

MetricMeasureSpace make_binary_tree(int depth) {
  if (depth < 0) throw std::invalid_argument("bad depth");
  int n = (1 << (depth + 1)) - 1;
  std::vector<Edge> edges;
  for (int i = 1; i < n; ++i) edges.push_back({(i - 1) / 2, i, 1.0, 1.0});
  Eigen::VectorXd mu = Eigen::VectorXd::Ones(n);
  MetricMeasureSpace s =
      (n == 1) ? MetricMeasureSpace::from_matrix(Eigen::MatrixXd::Zero(1, 1), mu)
               : MetricMeasureSpace::from_graph(n, std::move(edges), mu);
  s.generator = "binary_tree(" + std::to_string(depth) + ")";
  return s;
}

MetricMeasureSpace make_connected_sum(
    const std::vector<MetricMeasureSpace>& parts, int neck_length) {
  if (parts.size() < 2) throw std::invalid_argument("need at least two parts");
  if (neck_length < 1) throw std::invalid_argument("bad neck length");
  for (const auto& p : parts)
    if (!p.graph_metric())
      throw std::invalid_argument("connected sum requires graph parts");
  int total = 0;
  std::vector<int> offset;
  for (const auto& p : parts) {
    offset.push_back(total);
    total += p.n;
  }
  std::vector<Edge> edges;
  std::vector<double> muv;
  for (size_t k = 0; k < parts.size(); ++k) {
    for (const auto& e : parts[k].edges)
      edges.push_back({e.u + offset[k], e.v + offset[k], e.length, e.conductance});
    for (int i = 0; i < parts[k].n; ++i) muv.push_back(parts[k].mu[i]);
  }
  // necks: chain part k's point 0 to part k+1's point 0 through fresh points
  for (size_t k = 0; k + 1 < parts.size(); ++k) {
    int prev = offset[k];
    for (int t = 0; t < neck_length - 1; ++t) {
      int fresh = total++;
      muv.push_back(1.0);
      edges.push_back({prev, fresh, 1.0, 1.0});
      prev = fresh;
    }
    edges.push_back({prev, offset[k + 1], 1.0, 1.0});
  }
  Eigen::VectorXd mu = Eigen::Map<Eigen::VectorXd>(muv.data(), muv.size());
  MetricMeasureSpace s = MetricMeasureSpace::from_graph(total, std::move(edges), mu);
  s.generator = "connected_sum";
  return s;
}

MetricMeasureSpace product_space(const MetricMeasureSpace& s, int n_line,
                                 double h) {
  if (n_line < 2) throw std::invalid_argument("n_line must be >= 2");
  if (h <= 0) throw std::invalid_argument("bad spacing");
  int N = n_line * s.n;
  Eigen::MatrixXd d(N, N);
  Eigen::VectorXd mu(N);
  auto id = [&](int t, int m) { return t * s.n + m; };
  for (int t = 0; t < n_line; ++t) {
    for (int m = 0; m < s.n; ++m) {
      mu[id(t, m)] = h * s.mu[m];
    }
  }
  for (int t = 0; t < n_line; ++t) {
    for (int m = 0; m < s.n; ++m) {
      Eigen::VectorXd row = s.dist_row(m);
      for (int u = 0; u < n_line; ++u) {
        double dt = h * std::abs(t - u);
        for (int q = 0; q < s.n; ++q)
          d(id(t, m), id(u, q)) = std::sqrt(dt * dt + row[q] * row[q]);
      }
    }
  }
  MetricMeasureSpace out = MetricMeasureSpace::from_matrix(std::move(d), mu);
  out.generator = "product";
  return out;
}

MetricMeasureSpace make_random_cloud(int n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_real_distribution<double> wdist(0.5, 2.0);
  Eigen::MatrixXd pts(n, dim);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k) pts(i, k) = unif(rng);
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    d(i, i) = 0;
    for (int j = i + 1; j < n; ++j) {
      double v = (pts.row(i) - pts.row(j)).norm();
      d(i, j) = d(j, i) = v;
    }
  }
  Eigen::VectorXd mu(n);
  for (int i = 0; i < n; ++i) mu[i] = wdist(rng);
  MetricMeasureSpace s = MetricMeasureSpace::from_matrix(std::move(d), mu);
  s.coords.resize(n);
  for (int i = 0; i < n; ++i) {
    s.coords[i].resize(dim);
    for (int k = 0; k < dim; ++k) s.coords[i][k] = pts(i, k);
  }
  s.generator = "random_cloud";
  return s;
}

}  // namespace mml
