#include "mml/cubes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mml {

namespace {

// Greedy maximal sep-separated subset of candidates (ascending id), so every
// candidate lies within sep of a selected point.
std::vector<int> greedy_net(const MetricMeasureSpace& s,
                            const std::vector<int>& candidates, double sep) {
  std::vector<int> net;
  for (int c : candidates) {
    bool ok = true;
    for (int z : net)
      if (s.dist(c, z) < sep) { ok = false; break; }
    if (ok) net.push_back(c);
  }
  return net;
}

}  // namespace

// Construction: nested nets N_m = all points, N_{k+1} = greedy maximal
// 3*rho^{k+1}-separated subset of N_k. Level-m cubes are singletons; a
// level-k cube attaches to the level-(k+1) net point that claims one of its
// members (d < rho^{k+1}), or failing that to the net point nearest its
// center. The separation factor 3 makes claims conflict-free and keeps the
// outer radius below (24/7)*rho^k < rho^{k+1}, so the ball sandwich holds
// exactly at every level.
CubeHierarchy build_hierarchy(const MetricMeasureSpace& s, int m, double rho) {
  if (rho <= 1) throw std::invalid_argument("rho must exceed 1");
  if (s.n > 1 && std::pow(rho, m) > s.min_positive_distance())
    throw std::invalid_argument(
        "base level too coarse: rho^m must not exceed the minimum distance");

  CubeHierarchy h;
  h.rho = rho;
  h.m = m;

  std::vector<int> net(s.n);
  for (int i = 0; i < s.n; ++i) net[i] = i;

  std::vector<Cube> level;
  for (int x : net) level.push_back({x, {x}, -1});
  h.levels.push_back(level);

  int k = m;
  while (net.size() > 1) {
    ++k;
    double len = std::pow(rho, k);
    std::vector<int> up = greedy_net(s, net, 3 * len);
    std::vector<Cube>& prev = h.levels.back();
    std::vector<Cube> cur;
    std::vector<int> slot(s.n, -1);  // net point id -> cube index at level k
    for (int z : up) {
      slot[z] = static_cast<int>(cur.size());
      cur.push_back({z, {}, -1});
    }
    for (size_t ci = 0; ci < prev.size(); ++ci) {
      Cube& c = prev[ci];
      int target = -1;
      for (int p : c.members) {
        for (int z : up) {
          if (s.dist(p, z) < len) { target = z; break; }
        }
        if (target >= 0) break;
      }
      if (target < 0) {
        double best = std::numeric_limits<double>::infinity();
        for (int z : up) {
          double d = s.dist(c.center, z);
          if (d < best) { best = d; target = z; }
        }
      }
      c.parent = slot[target];
      Cube& pc = cur[slot[target]];
      pc.members.insert(pc.members.end(), c.members.begin(), c.members.end());
    }
    for (Cube& c : cur) std::sort(c.members.begin(), c.members.end());
    h.levels.push_back(std::move(cur));
    net = std::move(up);
  }

  HierarchyCheck chk = verify_hierarchy(s, h);
  if (!chk.pass())
    throw std::runtime_error("hierarchy construction failed: " + chk.witness);
  return h;
}

HierarchyCheck verify_hierarchy(const MetricMeasureSpace& s,
                                const CubeHierarchy& h) {
  HierarchyCheck out;
  auto fail = [&](bool& flag, const std::string& msg) {
    if (out.witness.empty()) out.witness = msg;
    flag = false;
  };

  for (size_t li = 0; li < h.levels.size(); ++li) {
    int k = h.m + static_cast<int>(li);
    double inner = std::pow(h.rho, k);
    double outer = std::pow(h.rho, k + 1);
    std::vector<int> owner(s.n, -1);
    for (size_t ci = 0; ci < h.levels[li].size(); ++ci) {
      const Cube& c = h.levels[li][ci];
      std::vector<char> in_cube(s.n, 0);
      for (int p : c.members) {
        if (owner[p] != -1)
          fail(out.partition, "level " + std::to_string(k) + ": point " +
                                  std::to_string(p) + " in two cubes");
        owner[p] = static_cast<int>(ci);
        in_cube[p] = 1;
      }
      Eigen::VectorXd row = s.dist_row(c.center);
      for (int y = 0; y < s.n; ++y) {
        if (row[y] < inner && !in_cube[y])
          fail(out.sandwich, "level " + std::to_string(k) + " cube " +
                                 std::to_string(ci) + ": inner ball escapes");
        if (in_cube[y] && !(row[y] < outer))
          fail(out.sandwich, "level " + std::to_string(k) + " cube " +
                                 std::to_string(ci) + ": member outside outer ball");
      }
    }
    for (int p = 0; p < s.n; ++p)
      if (owner[p] < 0)
        fail(out.partition,
             "level " + std::to_string(k) + ": point " + std::to_string(p) +
                 " uncovered");
    if (li > 0) {
      // each cube of the previous level must sit inside exactly one cube here
      for (size_t ci = 0; ci < h.levels[li - 1].size(); ++ci) {
        const Cube& c = h.levels[li - 1][ci];
        int host = c.members.empty() ? -1 : owner[c.members[0]];
        for (int p : c.members) {
          if (owner[p] != host) {
            fail(out.nesting, "level " + std::to_string(k - 1) + " cube " +
                                  std::to_string(ci) + " split across parents");
            break;
          }
        }
      }
    }
  }
  return out;
}

Eigen::VectorXd dyadic_maximal(const MetricMeasureSpace& s,
                               const CubeHierarchy& h, const Eigen::VectorXd& f,
                               double lmax) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(s.n);
  for (size_t li = 0; li < h.levels.size(); ++li) {
    int k = h.m + static_cast<int>(li);
    if (std::pow(h.rho, k) > lmax) break;
    for (const Cube& c : h.levels[li]) {
      double mass = 0, total = 0;
      for (int p : c.members) {
        mass += std::abs(f[p]) * s.mu[p];
        total += s.mu[p];
      }
      double avg = mass / total;
      for (int p : c.members) out[p] = std::max(out[p], avg);
    }
  }
  return out;
}

}  // namespace mml
