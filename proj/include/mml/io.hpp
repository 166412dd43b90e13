#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mml/cubes.hpp"
#include "mml/space.hpp"

namespace mml {

// Space file: { "n": int,
//               "metric": {"type": "explicit"|"graph",
//                          "matrix": [[...]] | "edges": [[u,v,len],...] },
//               "measure": [...], "coords": optional [[...],...] }
MetricMeasureSpace load_space(const std::string& path);
void save_space(const MetricMeasureSpace& s, const std::string& path);

// Hierarchy file: { "rho": ..., "m": ..., "levels":
//                   [{"k": ..., "cubes": [{"center": c, "members": [...]}]}] }
CubeHierarchy load_hierarchy(const std::string& path);
void save_hierarchy(const CubeHierarchy& h, const std::string& path);

// Potentials / functions: CSV lines "point_id,value" (header optional) or a
// JSON array of n values.
Eigen::VectorXd load_potential(const std::string& path, int n);
void save_csv_vector(const Eigen::VectorXd& v, const std::string& path);

// Kernel spec: {"type":"riesz","s":...} | {"type":"bessel","s":...,"lambda":...}
//            | {"type":"power","exponent":...} | {"type":"matrix","path":...}
struct KernelSpec {
  std::string type;
  double s = 1.0;
  double lambda = 0.0;
  double exponent = 0.0;
  std::string matrix_path;
};
KernelSpec load_kernel_spec(const std::string& path);

// Dense matrix with an 8-byte header: n as unsigned 64-bit little-endian,
// then n*n row-major little-endian doubles.
void save_matrix_binary(const Eigen::MatrixXd& m, const std::string& path);
Eigen::MatrixXd load_matrix_binary(const std::string& path);

// 64-bit FNV-1a of a file's bytes, lowercase hex.
std::string file_digest(const std::string& path);

// Minimal SVG line plot (one polyline per series) for constant-vs-scale
// sweeps; series share the x grid.
void write_svg_plot(const std::string& path, const std::vector<double>& xs,
                    const std::vector<std::vector<double>>& series,
                    const std::vector<std::string>& labels,
                    const std::string& title);

}  // namespace mml
