#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "mml/space.hpp"

namespace mml {

struct Cube {
  int center = 0;            // point id of the cube center
  std::vector<int> members;  // sorted point ids
  int parent = -1;           // index into the next level's cube list
};

// Leveled partition: level k cubes sit between B(center, rho^k) and
// B(center, rho^{k+1}), partition the space, and nest across levels.
struct CubeHierarchy {
  double rho = 8.0;
  int m = 0;                              // base level
  std::vector<std::vector<Cube>> levels;  // levels[i] = cubes at level m+i

  int top_level() const { return m + static_cast<int>(levels.size()) - 1; }
  double length(int k) const { return std::pow(rho, k); }
};

// Build a hierarchy from nested separated nets. Level m must resolve single
// points: rho^m <= min positive distance. Throws on invalid parameters; the
// returned hierarchy always satisfies the sandwich/partition/nesting
// invariants (checked internally).
CubeHierarchy build_hierarchy(const MetricMeasureSpace& s, int m,
                              double rho = 8.0);

struct HierarchyCheck {
  bool sandwich = true;
  bool partition = true;
  bool nesting = true;
  std::string witness;  // first counterexample, empty when all pass
  bool pass() const { return sandwich && partition && nesting; }
};

HierarchyCheck verify_hierarchy(const MetricMeasureSpace& s,
                                const CubeHierarchy& h);

// M_d f(x) = max over cubes Q containing x with length <= lmax of the
// mu-average of |f| over Q. Exact: each point lies in one cube per level.
Eigen::VectorXd dyadic_maximal(const MetricMeasureSpace& s,
                               const CubeHierarchy& h, const Eigen::VectorXd& f,
                               double lmax = std::numeric_limits<double>::infinity());

}  // namespace mml
