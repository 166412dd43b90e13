#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mml {

struct Edge {
  int u = 0;
  int v = 0;
  double length = 1.0;
  double conductance = 1.0;
};

// Finite metric-measure space. The metric is either an explicit dense matrix
// or derived from a weighted graph via shortest paths. Distances are cached
// densely for n <= kDenseCap and recomputed per row above that.
class MetricMeasureSpace {
 public:
  static constexpr int kDenseCap = 4000;

  int n = 0;
  Eigen::VectorXd mu;                       // strictly positive weights
  std::vector<std::vector<double>> coords;  // optional, generators only
  std::vector<Edge> edges;                  // present iff graph metric
  std::string generator;                    // descriptor, informational

  static MetricMeasureSpace from_matrix(Eigen::MatrixXd d, Eigen::VectorXd mu);
  static MetricMeasureSpace from_graph(int n, std::vector<Edge> edges,
                                       Eigen::VectorXd mu);

  bool graph_metric() const { return !edges.empty(); }

  double dist(int x, int y) const;
  Eigen::VectorXd dist_row(int x) const;

  double diameter() const;
  double min_positive_distance() const;
  double total_measure() const;

  // Open ball {y : d(x,y) < r}, strict inequality.
  std::vector<int> ball_members(int center, double r) const;
  double ball_measure(int center, double r) const;

  // Distinct positive distances from x, ascending.
  std::vector<double> distance_values(int x) const;
  // Radii hitting every distinct ball/ratio configuration around x up to
  // rmax: the distances themselves, their halves, and interval midpoints.
  std::vector<double> critical_radii(int x, double rmax) const;

  void validate() const;  // metric axioms (exact n<=500, sampled above)

 private:
  mutable Eigen::MatrixXd dense_;  // cached distance matrix if n <= kDenseCap
  mutable bool has_dense_ = false;
  mutable double diameter_ = -1.0;
  mutable double min_pos_ = -1.0;
  std::vector<std::vector<std::pair<int, double>>> adj_;

  void build_adjacency();
  Eigen::VectorXd sssp(int source) const;  // BFS or Dijkstra on the graph
  void ensure_dense() const;
};

// Per-center sorted view of distances with measure prefix sums; the basic
// device for evaluating ball averages and sup-over-radius quantities exactly.
struct SortedBallScan {
  std::vector<int> order;       // points sorted by distance from the center
  std::vector<double> dist;     // sorted distances (dist[0] == 0)
  std::vector<double> mu_pre;   // prefix sums of mu in that order
  explicit SortedBallScan(const MetricMeasureSpace& s, int center);

  // Walk over distinct balls: for each maximal index block [0..j] with
  // dist[j] < dist[j+1], report j and the next distinct distance (the
  // supremum of radii producing this ball).
  template <typename F>
  void for_each_ball(double rmax, F&& fn) const {
    const int m = static_cast<int>(dist.size());
    int i = 0;
    while (i < m) {
      int j = i;
      while (j + 1 < m && dist[j + 1] == dist[i]) ++j;
      double next = (j + 1 < m) ? dist[j + 1] : dist[j] + 1.0;
      fn(j, std::min(next, rmax));
      if (next >= rmax) break;
      i = j + 1;
    }
  }
};

struct DoublingProfile {
  double A = 1.0;    // doubling constant, max mu(2B)/mu(B)
  double eta = 0.0;  // log2(A)
  double a = 1.0;    // reverse-doubling constant, max mu(B)/mu(2B)
  double nu = 0.0;   // -log2(a)
  double D = 0.0;    // 8*log(A)
  double R = 0.0;
  int witness_center = 0;
  double witness_radius = 0.0;
};

DoublingProfile doubling_profile(const MetricMeasureSpace& s, double R);

// max over x, r > 0, R' <= R of mu(B(x, r + R'/4)) / mu(B(x, r)).
double annuli_constant(const MetricMeasureSpace& s, double R);

struct ExpDoublingResult {
  double D_emp = 0.0;  // smallest D with mu(B(x,r)) <= exp(D r/R) mu(B(x,R))
  double D_bound = 0.0;  // a-priori 8*log(A)
};
ExpDoublingResult exp_doubling_constant(const MetricMeasureSpace& s, double R);

// Greedy maximal delta-separated family inside the ball (ascending id).
std::vector<int> separated_cover(const MetricMeasureSpace& s, int center,
                                 double r, double delta);

struct BallSpec {
  int center = 0;
  double radius = 0.0;
};

// Greedy Vitali selection by decreasing radius; returns indices into balls.
std::vector<int> vitali_subcover(const MetricMeasureSpace& s,
                                 const std::vector<BallSpec>& balls, double c);

// --- generators ---

MetricMeasureSpace make_path(int n, double h);
using WeightFn = std::function<double(const std::vector<double>&)>;
MetricMeasureSpace make_grid(int dim, int side, double h,
                             const WeightFn& sigma2 = nullptr);
MetricMeasureSpace make_binary_tree(int depth);
MetricMeasureSpace make_connected_sum(const std::vector<MetricMeasureSpace>& parts,
                                      int neck_length);
// Line(n_line, h) x s with metric sqrt(|s-t|^2 + d^2) and measure h*mu.
MetricMeasureSpace product_space(const MetricMeasureSpace& s, int n_line,
                                 double h);

// Random point cloud in [0,1]^dim with Euclidean metric; measure ~ U(0.5, 2).
MetricMeasureSpace make_random_cloud(int n, int dim, std::uint64_t seed);

}  // namespace mml
