// Acceptance battery: one pass/fail line per criterion, exit nonzero when
// any criterion fails. Criterion 10 needs the CLI binary (--mmlab PATH).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mml/cubes.hpp"
#include "mml/io.hpp"
#include "mml/kernels.hpp"
#include "mml/maximal.hpp"
#include "mml/space.hpp"
#include "mml/spectral.hpp"

using namespace mml;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", idx,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

int base_level_for(const MetricMeasureSpace& s, double rho) {
  double dmin = s.min_positive_distance();
  int m = static_cast<int>(std::floor(std::log(dmin) / std::log(rho)));
  while (std::pow(rho, m) > dmin) --m;
  return m;
}

// The potential family used for bracket validation: squared-uniform fields,
// single point masses, lognormal fields.
Eigen::VectorXd draw_potential(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> pick(0, n - 1);
  Eigen::VectorXd V(n);
  switch (seed % 3) {
    case 0: {
      double amp = 0.1 + 4.9 * unif(rng);
      for (int i = 0; i < n; ++i) {
        double u = unif(rng);
        V[i] = amp * u * u;
      }
      break;
    }
    case 1:
      V.setZero();
      V[pick(rng)] = 1.0 + 19.0 * unif(rng);
      break;
    default:
      for (int i = 0; i < n; ++i) V[i] = std::exp(gauss(rng));
  }
  return V;
}

// ----------------------------------------------------------------------

void criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string first_fail;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> sz(20, 300);
  for (int t = 0; t < 50 && pass; ++t) {
    MetricMeasureSpace s = make_random_cloud(sz(rng), 2, 5000 + t);
    try {
      CubeHierarchy h = build_hierarchy(s, base_level_for(s, 8.0));
      HierarchyCheck c = verify_hierarchy(s, h);
      if (!c.pass()) {
        pass = false;
        first_fail = "cloud " + std::to_string(t) + ": " + c.witness;
      }
    } catch (const std::exception& e) {
      pass = false;
      first_fail = "cloud " + std::to_string(t) + ": " + e.what();
    }
  }
  std::vector<MetricMeasureSpace> gens;
  gens.push_back(make_path(201, 1.0));
  gens.push_back(make_grid(2, 33, 1.0));
  gens.push_back(make_binary_tree(8));
  for (auto& s : gens) {
    if (!pass) break;
    CubeHierarchy h = build_hierarchy(s, base_level_for(s, 8.0));
    HierarchyCheck c = verify_hierarchy(s, h);
    if (!c.pass()) {
      pass = false;
      first_fail = s.generator + ": " + c.witness;
    }
  }
  double dt = elapsed_s(t0);
  if (dt > 120.0) {
    pass = false;
    first_fail = "runtime " + std::to_string(dt) + "s > 120s";
  }
  std::ostringstream d;
  d << "50 clouds + 3 generators, rho=8, " << dt << "s";
  if (!pass) d << "; " << first_fail;
  report(1, "cube hierarchy exactness", pass, d.str());
}

void criterion2() {
  bool pass = true;
  double worst = 0;
  for (int which = 0; which < 2 && pass; ++which) {
    MetricMeasureSpace s =
        which == 0 ? make_path(201, 1.0) : make_grid(2, 41, 1.0);
    CubeHierarchy h = build_hierarchy(s, 0);
    std::mt19937_64 rng(31337 + which);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int t = 0; t < 100 && pass; ++t) {
      Eigen::VectorXd f(s.n);
      for (int i = 0; i < s.n; ++i) f[i] = unif(rng);
      Eigen::VectorXd md = dyadic_maximal(s, h, f);
      double l1 = f.cwiseAbs().dot(s.mu);
      std::vector<double> lambdas(md.data(), md.data() + md.size());
      std::sort(lambdas.begin(), lambdas.end());
      lambdas.erase(std::unique(lambdas.begin(), lambdas.end()),
                    lambdas.end());
      for (double lam : lambdas) {
        if (lam <= 0) continue;
        double mass = 0;
        for (int i = 0; i < s.n; ++i)
          if (md[i] > lam) mass += s.mu[i];
        worst = std::max(worst, mass * lam / l1);
        if (mass > l1 / lam) pass = false;  // zero tolerance
      }
    }
  }
  std::ostringstream d;
  d << "100 f on path(201) and grid(2,41); max lambda*mass/||f||_1 = "
    << worst;
  report(2, "dyadic weak-(1,1) constant 1", pass, d.str());
}

void criterion3() {
  auto t0 = std::chrono::steady_clock::now();
  MetricMeasureSpace s = make_path(31, 1.0);
  DirichletOperator op = dirichlet_operator(s);
  MetricMeasureSpace line = make_path(31, 1.0);
  DirichletOperator lop = dirichlet_operator(line);
  DirichletOperator prod = product_operator(line, lop, s, op);

  double worst_lam = 0;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd V = draw_potential(31, 9000 + t);
    Eigen::VectorXd Vt(prod.n);
    for (int a = 0; a < 31; ++a)
      for (int b = 0; b < 31; ++b) Vt[a * 31 + b] = V[b];
    double lf = schrodinger_lambda1(op, V);
    double lp = schrodinger_lambda1(prod, Vt);
    worst_lam = std::max(worst_lam, std::abs(lp - lf));
  }

  // heat factorization (V-independent)
  std::vector<double> times{0.1, 1.0, 10.0};
  HeatKernel hl = heat_kernel(lop, times);
  HeatKernel hm = heat_kernel(op, times);
  HeatKernel hp = heat_kernel(prod, times);
  double worst_heat = 0;
  for (size_t ti = 0; ti < times.size(); ++ti)
    for (int a1 = 0; a1 < 31; ++a1)
      for (int b1 = 0; b1 < 31; ++b1)
        for (int a2 = 0; a2 < 31; ++a2)
          for (int b2 = 0; b2 < 31; ++b2) {
            double lhs = hp.mats[ti](a1 * 31 + b1, a2 * 31 + b2);
            double rhs = hl.mats[ti](a1, a2) * hm.mats[ti](b1, b2);
            worst_heat = std::max(worst_heat, std::abs(lhs - rhs));
          }
  double dt = elapsed_s(t0);
  bool pass = worst_lam < 1e-9 && worst_heat < 1e-8 && dt < 60.0;
  std::ostringstream d;
  d << "max|dlambda1| = " << worst_lam << ", max heat err = " << worst_heat
    << ", " << dt << "s";
  report(3, "product identity", pass, d.str());
}

void criterion4() {
  bool pass = true;
  std::ostringstream d;
  for (int which = 0; which < 2; ++which) {
    MetricMeasureSpace s =
        which == 0 ? make_path(201, 1.0) : make_grid(2, 41, 1.0);
    DirichletOperator op = dirichlet_operator(s);
    DoublingProfile dp = doubling_profile(s, s.diameter());
    double C1 = std::pow(dp.A, -1.0 - dp.eta / 2);
    double Cp = calibrate_cp(s, op, 2.0, 7);  // frozen calibration family
    int fails = 0;
    double worst_slack = -1e18;
    for (int t = 0; t < 50; ++t) {
      Eigen::VectorXd V = draw_potential(s.n, 420000 + 37 * t + which);
      SpectrumBoundResult r = spectrum_bounds(s, op, V, 2.0, C1, Cp);
      double slack =
          std::max(r.lower - (-r.exact), (-r.exact) - r.upper);
      worst_slack = std::max(worst_slack, slack);
      if (slack > 1e-12) ++fails;
    }
    if (fails > 0) pass = false;
    d << (which == 0 ? "path(201): " : "; grid(2,41): ") << (50 - fails)
      << "/50, Cp=" << Cp << ", worst slack " << worst_slack;
  }
  report(4, "spectrum bound bracket", pass, d.str());
}

void criterion5() {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<int> sides{21, 31, 41};
  std::vector<double> inv;
  for (int side : sides) {
    MetricMeasureSpace s = make_grid(3, side, 1.0);
    DirichletOperator op = dirichlet_operator(s, interior_domain(s));
    int o = (side * side * side - 1) / 2;
    HardyOptions opts;
    opts.compute_kp = false;
    opts.dense_cross_check = (side == 21);
    HardyReport rep = hardy_check(s, op, o, 2.0, opts);
    inv.push_back(rep.inv_C_H);
  }
  double target = 0.25;
  double rel = std::abs(inv.back() - target) / target;
  bool close = rel <= 0.25;
  bool monotone = std::abs(inv[1] - target) <= std::abs(inv[0] - target) &&
                  std::abs(inv[2] - target) <= std::abs(inv[1] - target);
  double dt = elapsed_s(t0);
  bool pass = close && monotone && dt < 300.0;
  std::ostringstream d;
  d << "1/C_H = " << inv[0] << ", " << inv[1] << ", " << inv[2]
    << " at s=21,31,41; rel err at 41 = " << rel << " (need <= 0.25), gap "
    << (monotone ? "monotone" : "not monotone") << ", " << dt << "s";
  report(5, "hardy constant convergence", pass, d.str());
}

void criterion6() {
  double fits[2];
  int idx = 0;
  for (int side : {17, 25}) {
    MetricMeasureSpace s = make_grid(3, side, 1.0);
    DirichletOperator op = dirichlet_operator(s, interior_domain(s));
    fits[idx++] = riesz_bound_fit(s, op, 1.0);
  }
  double ratio = fits[1] / fits[0];
  bool pass = ratio < 2.0 && ratio > 0.5;
  std::ostringstream d;
  d << "fitted C = " << fits[0] << " (side 17) vs " << fits[1]
    << " (side 25), ratio " << ratio;
  report(6, "riesz bound stability", pass, d.str());
}

void criterion7() {
  double fits[2];
  int idx = 0;
  std::vector<double> times{1.0, 4.0, 16.0, 64.0, 100.0, 200.0};
  for (int side : {41, 81}) {
    MetricMeasureSpace s = make_grid(2, side, 1.0);
    DirichletOperator op = dirichlet_operator(s);
    GaussianFit fit = gaussian_bound_fit(s, op, times, 8.0, 5.0);
    fits[idx++] = fit.C_small;
  }
  double ratio = fits[1] / fits[0];
  bool pass = ratio < 2.0 && ratio > 0.5;
  std::ostringstream d;
  d << "C_small = " << fits[0] << " (side 41) vs " << fits[1]
    << " (side 81), ratio " << ratio;
  report(7, "gaussian bound stability", pass, d.str());
}

void criterion8() {
  double cs[2];
  bool finite = true;
  int idx = 0;
  for (int n : {101, 201}) {
    MetricMeasureSpace s = make_path(n, 1.0);
    KernelMatrix K = riesz_form_kernel(s, 1.0);
    DominationReport rep = domination_check(s, K, 8.0, 2.0, 40, 17);
    cs[idx++] = rep.C_emp;
    if (rep.violation) finite = false;
    for (double r : rep.trial_ratios)
      if (!std::isfinite(r)) finite = false;
  }
  double ratio = cs[1] / cs[0];
  bool pass = finite && ratio < 2.0 && ratio > 0.5;
  std::ostringstream d;
  d << "C_emp = " << cs[0] << " (n=101) vs " << cs[1] << " (n=201), ratio "
    << ratio << (finite ? ", all trials finite" : ", non-finite trial");
  report(8, "domination stability", pass, d.str());
}

void criterion9() {
  MetricMeasureSpace tree = make_binary_tree(10);
  double A2 = doubling_profile(tree, 2.0).A;
  double A8 = doubling_profile(tree, 8.0).A;
  bool nondoubling = A8 > 1.5 * A2;
  DirichletOperator op = dirichlet_operator(tree);
  double eta = doubling_profile(tree, 2.0).eta;
  double b2 = faber_krahn_fit(tree, op, 2.0, eta, 120, 23).b;
  double b8 = faber_krahn_fit(tree, op, 8.0, eta, 120, 23).b;
  bool collapse = b8 < 0.5 * b2;
  bool pass = nondoubling && collapse;
  std::ostringstream d;
  d << "A(2) = " << A2 << ", A(8) = " << A8 << " (x" << A8 / A2
    << "); FK b: " << b2 << " -> " << b8;
  report(9, "negative controls on the tree", pass, d.str());
}

void criterion10(const std::string& mmlab) {
  bool pass = false;
  std::string detail;
  if (mmlab.empty()) {
    detail = "no --mmlab binary given";
  } else {
    std::string dir = "/tmp/mml_acceptance";
    std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());
    auto run = [&](const std::string& tag) {
      std::string cmd = "cd " + dir + " && MMLAB_SEED=12345 " + mmlab +
                        " suite acceptance --scale small --report r_" + tag +
                        ".json --manifest m_" + tag + ".json > /dev/null 2>&1";
      return std::system(cmd.c_str());
    };
    int rc1 = run("a");
    int rc2 = run("b");
    auto slurp = [&](const std::string& p) {
      std::ifstream in(dir + "/" + p, std::ios::binary);
      return std::string((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
    };
    std::string a = slurp("r_a.json"), b = slurp("r_b.json");
    pass = !a.empty() && a == b && rc1 == rc2;
    detail = "two runs, report bytes " +
             std::string(a == b ? "identical" : "DIFFER") + " (" +
             std::to_string(a.size()) + " bytes)";
  }
  report(10, "determinism of the suite", pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
  std::string mmlab;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--mmlab") mmlab = argv[i + 1];

  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10(mmlab);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
