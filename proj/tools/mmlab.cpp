// mmlab: generators, analyses, and verification suites for finite
// metric-measure spaces, with machine-readable reports.

#include <chrono>
#include <random>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mml/cubes.hpp"
#include "mml/io.hpp"
#include "mml/kernels.hpp"
#include "mml/maximal.hpp"
#include "mml/space.hpp"
#include "mml/spectral.hpp"

using nlohmann::json;
using namespace mml;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Ctx {
  std::string command;
  json params = json::object();
  json report = json::object();
  std::vector<std::string> inputs;   // files whose digests go to the manifest
  std::string report_path = "report.json";
  std::string manifest_path = "manifest.json";
  std::string plot_path;
  bool csv = false;
  std::uint64_t seed = 1;
  int threads = 1;
  int exit_code = 0;
};

void add_common(CLI::App* sub, Ctx& ctx) {
  sub->add_option("--report", ctx.report_path, "report JSON path");
  sub->add_option("--manifest", ctx.manifest_path, "manifest JSON path");
  sub->add_option("--seed", ctx.seed, "RNG seed (MMLAB_SEED overrides)");
  sub->add_option("--threads", ctx.threads, "worker cap");
  sub->add_flag("--csv", ctx.csv, "also flatten scalar results to CSV");
  sub->add_option("--plot", ctx.plot_path, "SVG plot output path");
}

MetricMeasureSpace load_input_space(Ctx& ctx, const std::string& path) {
  ctx.inputs.push_back(path);
  try {
    return load_space(path);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("space input: ") + e.what());
  }
}

Eigen::VectorXd load_input_potential(Ctx& ctx, const std::string& path, int n) {
  ctx.inputs.push_back(path);
  try {
    return load_potential(path, n);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("potential input: ") + e.what());
  }
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  if (out.empty()) throw std::invalid_argument("empty list: " + csv);
  return out;
}

std::vector<int> resolve_domain(const MetricMeasureSpace& s,
                                const std::string& spec) {
  if (spec == "all" || spec.empty()) return {};
  if (spec == "interior") return interior_domain(s);
  throw std::invalid_argument("unknown domain '" + spec + "'");
}

void flatten_csv(const json& j, const std::string& path) {
  std::ofstream out(path);
  out << "key,value\n";
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it->is_number() || it->is_boolean())
      out << it.key() << ',' << it->dump() << '\n';
}

void finalize(Ctx& ctx, std::chrono::steady_clock::time_point t0) {
  {
    std::ofstream out(ctx.report_path);
    out << ctx.report.dump(2) << '\n';
  }
  if (ctx.csv) {
    std::string p = ctx.report_path;
    auto dot = p.rfind('.');
    flatten_csv(ctx.report, (dot == std::string::npos ? p : p.substr(0, dot)) +
                                ".csv");
  }
  json manifest;
  manifest["command"] = ctx.command;
  manifest["parameters"] = ctx.params;
  manifest["seed"] = ctx.seed;
  manifest["tool_version"] = kVersion;
  json digests = json::object();
  for (const auto& f : ctx.inputs) digests[f] = file_digest(f);
  manifest["input_digests"] = digests;
  manifest["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::ofstream mout(ctx.manifest_path);
  mout << manifest.dump(2) << '\n';
}

json check_entry(const std::string& name, bool pass, double worst) {
  return json{{"name", name}, {"pass", pass}, {"worst_case", worst}};
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string kind, out = "space.json", grids = "2x9,2x9", space;
  int dim = 2, side = 9, n = 101, depth = 8, neck = 3, n_line = 31;
  double h = 1.0;
};

void run_gen(Ctx& ctx, const GenArgs& a) {
  MetricMeasureSpace s;
  if (a.kind == "grid") {
    s = make_grid(a.dim, a.side, a.h);
  } else if (a.kind == "path") {
    s = make_path(a.n, a.h);
  } else if (a.kind == "tree") {
    s = make_binary_tree(a.depth);
  } else if (a.kind == "connected-sum") {
    std::vector<MetricMeasureSpace> parts;
    std::stringstream ss(a.grids);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      auto x = tok.find('x');
      if (x == std::string::npos)
        throw std::invalid_argument("grids spec must be dimxside,...");
      parts.push_back(make_grid(std::stoi(tok.substr(0, x)),
                                std::stoi(tok.substr(x + 1)), a.h));
    }
    s = make_connected_sum(parts, a.neck);
  } else if (a.kind == "product") {
    MetricMeasureSpace base = load_input_space(ctx, a.space);
    s = product_space(base, a.n_line, a.h);
  }
  s.validate();
  save_space(s, a.out);
  ctx.report["n"] = s.n;
  ctx.report["diameter"] = s.diameter();
  ctx.report["total_measure"] = s.total_measure();
  ctx.report["output"] = a.out;
  std::cout << "wrote " << a.out << " (n=" << s.n << ")\n";
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string kind, space;
  double radius = 8.0, delta = 1.0;
  int center = 0;
};

void run_analyze(Ctx& ctx, const AnalyzeArgs& a) {
  MetricMeasureSpace s = load_input_space(ctx, a.space);
  if (a.kind == "doubling") {
    DoublingProfile dp = doubling_profile(s, a.radius);
    ctx.report["A"] = dp.A;
    ctx.report["eta"] = dp.eta;
    ctx.report["a"] = dp.a;
    ctx.report["nu"] = dp.nu;
    ctx.report["D"] = dp.D;
    ctx.report["witnesses"] = json::array(
        {json{{"center", dp.witness_center}, {"radius", dp.witness_radius}}});
    std::cout << "A=" << dp.A << " eta=" << dp.eta << '\n';
  } else if (a.kind == "annuli") {
    double A = annuli_constant(s, a.radius);
    ctx.report["A_annuli"] = A;
    std::cout << "A_annuli=" << A << '\n';
  } else {
    std::vector<int> cover = separated_cover(s, a.center, a.radius, a.delta);
    ctx.report["cover_size"] = cover.size();
    ctx.report["points"] = cover;
    std::cout << "cover size " << cover.size() << '\n';
  }
}

// ---------------------------------------------------------------- cubes

struct CubesArgs {
  std::string kind, space, hierarchy = "hierarchy.json";
  double rho = 8.0;
  int level_min = 0;
};

void run_cubes(Ctx& ctx, const CubesArgs& a) {
  MetricMeasureSpace s = load_input_space(ctx, a.space);
  if (a.kind == "build") {
    CubeHierarchy h = build_hierarchy(s, a.level_min, a.rho);
    save_hierarchy(h, a.hierarchy);
    json per_level = json::array();
    for (const auto& lvl : h.levels) per_level.push_back(lvl.size());
    ctx.report["levels"] = h.levels.size();
    ctx.report["top_level"] = h.top_level();
    ctx.report["cubes_per_level"] = per_level;
    ctx.report["output"] = a.hierarchy;
    std::cout << "built " << h.levels.size() << " levels -> " << a.hierarchy
              << '\n';
  } else {
    ctx.inputs.push_back(a.hierarchy);
    CubeHierarchy h = load_hierarchy(a.hierarchy);
    HierarchyCheck c = verify_hierarchy(s, h);
    ctx.report["checks"] = json::array(
        {check_entry("sandwich", c.sandwich, 0),
         check_entry("partition", c.partition, 0),
         check_entry("nesting", c.nesting, 0)});
    ctx.report["witnesses"] =
        c.witness.empty() ? json::array() : json::array({c.witness});
    if (!c.pass()) {
      ctx.exit_code = 1;
      std::cout << "FAIL: " << c.witness << '\n';
    } else {
      std::cout << "hierarchy valid\n";
    }
  }
}

// ---------------------------------------------------------------- maximal

struct MaximalArgs {
  std::string kind, space, fn, hierarchy, out = "maximal.csv";
  double s = 0.0, delta = std::numeric_limits<double>::infinity();
};

void run_maximal(Ctx& ctx, const MaximalArgs& a) {
  MetricMeasureSpace s = load_input_space(ctx, a.space);
  Eigen::VectorXd f = load_input_potential(ctx, a.fn, s.n);
  Eigen::VectorXd mf;
  if (a.kind == "centered") {
    mf = fractional_maximal(s, f, 0.0, a.delta);
  } else if (a.kind == "uncentered") {
    mf = uncentered_maximal(s, f, a.delta);
  } else if (a.kind == "fractional") {
    mf = fractional_maximal(s, f, a.s, a.delta);
  } else {  // dyadic
    if (a.hierarchy.empty())
      throw std::invalid_argument("dyadic maximal needs --hierarchy");
    ctx.inputs.push_back(a.hierarchy);
    mf = dyadic_maximal(s, load_hierarchy(a.hierarchy), f);
  }
  save_csv_vector(mf, a.out);
  ctx.report["max"] = mf.maxCoeff();
  ctx.report["output"] = a.out;
  std::cout << "max value " << mf.maxCoeff() << " -> " << a.out << '\n';
}

// ---------------------------------------------------------------- morrey

struct MorreyArgs {
  std::string space, potential;
  double p = 2.0, radius = std::numeric_limits<double>::infinity();
};

void run_morrey(Ctx& ctx, const MorreyArgs& a) {
  MetricMeasureSpace s = load_input_space(ctx, a.space);
  Eigen::VectorXd V = load_input_potential(ctx, a.potential, s.n);
  double N = morrey_norm(s, V, a.p, a.radius);
  ctx.report["morrey_norm"] = N;
  ctx.report["p"] = a.p;
  std::cout << N << '\n';
}

// ---------------------------------------------------------------- spectral

struct SpectralArgs {
  std::string kind, space, domain = "all", potential, out, times = "0.1,1,10";
  double s = 1.0, lambda = 0.5, radius = 8.0, c = 5.0, eta = 0.0;
  int samples = 200;
};

void run_spectral(Ctx& ctx, const SpectralArgs& a) {
  MetricMeasureSpace s = load_input_space(ctx, a.space);
  DirichletOperator op = dirichlet_operator(s, resolve_domain(s, a.domain));
  if (a.kind == "lambda1") {
    double v;
    if (!a.potential.empty()) {
      Eigen::VectorXd V = load_input_potential(ctx, a.potential, s.n);
      v = schrodinger_lambda1(op, V);
    } else {
      v = lambda1(op);
    }
    ctx.report["lambda1"] = v;
    std::cout << v << '\n';
  } else if (a.kind == "fk-fit") {
    double eta = a.eta;
    if (eta <= 0) eta = std::max(doubling_profile(s, a.radius).eta, 1e-3);
    FaberKrahnFit fit = faber_krahn_fit(s, op, a.radius, eta, a.samples,
                                        ctx.seed);
    ctx.report["b"] = fit.b;
    ctx.report["eta"] = eta;
    ctx.report["witnesses"] = json::array({json{
        {"center", fit.witness_center},
        {"radius", fit.witness_radius},
        {"subset_size", fit.witness_subset_size}}});
    std::cout << "b=" << fit.b << '\n';
  } else if (a.kind == "heat") {
    std::vector<double> times = parse_list(a.times);
    HeatKernel hk = heat_kernel(op, times);
    json traces = json::array();
    for (size_t i = 0; i < times.size(); ++i) {
      traces.push_back(hk.mats[i].trace());
      if (!a.out.empty())
        save_matrix_binary(hk.mats[i], a.out + "." + std::to_string(i));
    }
    ctx.report["times"] = times;
    ctx.report["traces"] = traces;
    std::cout << "heat kernel at " << times.size() << " times\n";
  } else if (a.kind == "riesz") {
    double fitC = riesz_bound_fit(s, op, a.s);
    ctx.report["fitted_C"] = fitC;
    if (!a.out.empty() && op.dim() <= kDenseEig)
      save_matrix_binary(riesz_kernel(op, a.s), a.out);
    std::cout << "fitted C=" << fitC << '\n';
  } else {  // bessel
    Eigen::MatrixXd g = bessel_kernel(op, a.s, a.lambda);
    if (!a.out.empty()) save_matrix_binary(g, a.out);
    BesselSeparation sep =
        bessel_separation_check(s, op, g, a.s, a.lambda, {0.25, 0.5, 0.75});
    ctx.report["gammas"] = sep.gammas;
    ctx.report["fitted_C"] = sep.fitted_C;
    std::cout << "bessel fitted C(gamma=0.5)=" << sep.fitted_C[1] << '\n';
  }
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string kind, space, potential, kernel, domain = "all", origin = "center";
  std::string times = "0.1,1,10";
  double p = 2.0, radius = 8.0, cp = 0.0, c1 = 0.0, lambda = 0.0, delta = 8.0;
  double h = 1.0;
  int n_line = 31, trials = 40;
  bool dense_cross_check = false;
  std::string witness;  // "r,R,nu"
};

void run_verify(Ctx& ctx, const VerifyArgs& a) {
  MetricMeasureSpace s = load_input_space(ctx, a.space);
  DirichletOperator op = dirichlet_operator(s, resolve_domain(s, a.domain));
  json checks = json::array();

  if (a.kind == "fefferman-phong") {
    Eigen::VectorXd V = load_input_potential(ctx, a.potential, s.n);
    double C = fefferman_phong_constant(s, op, V, a.p, a.radius);
    ctx.report["constant"] = C;
    checks.push_back(check_entry("finite", std::isfinite(C), C));
    std::cout << "C=" << C << '\n';
  } else if (a.kind == "weak-positivity") {
    Eigen::VectorXd V = load_input_potential(ctx, a.potential, s.n);
    double cp = a.cp > 0 ? a.cp : calibrate_cp(s, op, a.p, ctx.seed);
    double lam1M = lambda1(op);
    PositivityReport rep =
        positivity_checks(s, op, V, a.p, a.radius, cp, lam1M, a.lambda);
    ctx.report["Cp"] = cp;
    ctx.report["lambda1_M"] = lam1M;
    if (lam1M > 0) {
      ctx.report["ratio_lam"] = rep.ratio_lam;
      ctx.report["bound_lam"] = rep.bound_lam;
      checks.push_back(
          check_entry("positivity_lam1", rep.pass_lam, rep.ratio_lam));
    }
    if (a.lambda > 0) {
      ctx.report["ratio_lambda"] = rep.ratio_lambda;
      ctx.report["bound_lambda"] = rep.bound_lambda;
      checks.push_back(
          check_entry("positivity_lambda", rep.pass_lambda, rep.ratio_lambda));
    }
  } else if (a.kind == "hardy") {
    int o = a.origin == "center" ? 0 : std::stoi(a.origin);
    if (a.origin == "center") {
      // point minimizing the max distance to the rest
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < s.n; ++i) {
        double m = s.dist_row(i).maxCoeff();
        if (m < best) { best = m; o = i; }
      }
    }
    HardyOptions opts;
    opts.dense_cross_check = a.dense_cross_check;
    if (!a.witness.empty()) {
      std::vector<double> w = parse_list(a.witness);
      if (w.size() != 3)
        throw std::invalid_argument("--witness expects r,R,nu");
      opts.witness_r = w[0];
      opts.witness_R = w[1];
      opts.witness_nu = w[2];
    }
    HardyReport rep = hardy_check(s, op, o, a.p, opts);
    ctx.report["origin"] = o;
    ctx.report["C_H"] = rep.C_H;
    ctx.report["inv_C_H"] = rep.inv_C_H;
    ctx.report["K_p"] = rep.K_p;
    if (!a.witness.empty()) {
      ctx.report["witness_lhs"] = rep.witness_lhs;
      ctx.report["witness_rhs"] = rep.witness_rhs;
      ctx.report["witness_rayleigh"] = rep.witness_rayleigh;
    }
    checks.push_back(
        check_entry("hardy_constant_finite", std::isfinite(rep.C_H), rep.C_H));
    std::cout << "1/C_H=" << rep.inv_C_H << '\n';
  } else if (a.kind == "spectrum-bounds") {
    Eigen::VectorXd V = load_input_potential(ctx, a.potential, s.n);
    DoublingProfile dp = doubling_profile(s, s.diameter());
    double C1 = a.c1 > 0 ? a.c1 : std::pow(dp.A, -1.0 - dp.eta / 2);
    double Cp = a.cp > 0 ? a.cp : calibrate_cp(s, op, a.p, ctx.seed);
    SpectrumBoundResult res = spectrum_bounds(s, op, V, a.p, C1, Cp);
    ctx.report["lower"] = res.lower;
    ctx.report["upper"] = res.upper;
    ctx.report["exact"] = res.exact;
    ctx.report["tent_bound"] = res.tent_bound;
    ctx.report["constants"] = json{{"C1", C1}, {"Cp", Cp}};
    ctx.report["witnesses"] = json::array(
        {json{{"side", "lower"},
              {"x", res.lower_witness_x},
              {"delta", res.lower_witness_delta}},
         json{{"side", "upper"},
              {"x", res.upper_witness_x},
              {"delta", res.upper_witness_delta}}});
    bool lo_ok = res.lower <= -res.exact + 1e-12;
    bool hi_ok = -res.exact <= res.upper + 1e-12;
    checks.push_back(check_entry("lower_bound", lo_ok, res.lower + res.exact));
    checks.push_back(check_entry("upper_bound", hi_ok, -res.exact - res.upper));
    std::cout << res.lower << " <= " << -res.exact << " <= " << res.upper
              << '\n';
  } else if (a.kind == "product-identity") {
    Eigen::VectorXd V = load_input_potential(ctx, a.potential, s.n);
    ProductIdentityReport rep =
        product_identity_check(s, op, V, a.n_line, a.h, parse_list(a.times));
    ctx.report["lambda1_factor"] = rep.lambda1_factor;
    ctx.report["lambda1_product"] = rep.lambda1_product;
    ctx.report["delta_lambda1"] =
        std::abs(rep.lambda1_product - rep.lambda1_factor);
    ctx.report["heat_factorization_err"] = rep.heat_factorization_err;
    ctx.report["morrey_ratio"] = rep.morrey_ratio_lo;
    ctx.report["morrey_cap"] = rep.morrey_ratio_hi;
    ctx.report["product_doubling_A"] = rep.product_doubling_A;
    checks.push_back(check_entry(
        "lambda1_identity",
        std::abs(rep.lambda1_product - rep.lambda1_factor) < 1e-9,
        std::abs(rep.lambda1_product - rep.lambda1_factor)));
    checks.push_back(check_entry("heat_factorization",
                                 rep.heat_factorization_err < 1e-8,
                                 rep.heat_factorization_err));
    std::cout << "|dlambda1|="
              << std::abs(rep.lambda1_product - rep.lambda1_factor) << '\n';
  } else if (a.kind == "domination") {
    KernelMatrix K;
    if (!a.kernel.empty()) {
      ctx.inputs.push_back(a.kernel);
      KernelSpec spec = load_kernel_spec(a.kernel);
      if (spec.type == "riesz") K = riesz_form_kernel(s, spec.s);
      else if (spec.type == "bessel")
        K = bessel_form_kernel(s, spec.s, spec.lambda);
      else if (spec.type == "power") K = power_kernel(s, spec.exponent);
      else {
        K.values = load_matrix_binary(spec.matrix_path);
        K.tag = "matrix";
      }
    } else {
      K = riesz_form_kernel(s, 1.0);
    }
    DominationReport rep =
        domination_check(s, K, a.delta, a.p, a.trials, ctx.seed);
    ctx.report["C_emp"] = rep.C_emp;
    ctx.report["doubling_at_scale"] = rep.doubling_at_scale;
    ctx.report["trial_ratios"] = rep.trial_ratios;
    checks.push_back(
        check_entry("no_violation", !rep.violation,
                    static_cast<double>(rep.violation_trial)));
    checks.push_back(
        check_entry("finite_C", std::isfinite(rep.C_emp), rep.C_emp));
    std::cout << "C_emp=" << rep.C_emp << '\n';
  } else {
    throw std::invalid_argument("unknown verify subcommand '" + a.kind + "'");
  }

  ctx.report["checks"] = checks;
  for (const auto& c : checks)
    if (!c["pass"].get<bool>()) ctx.exit_code = 1;
}

// ---------------------------------------------------------------- suite

void run_suite(Ctx& ctx, const std::string& scale) {
  bool full = scale == "full";
  json checks = json::array();

  // cube hierarchy on a seeded random cloud and a path
  {
    MetricMeasureSpace cloud = make_random_cloud(full ? 120 : 40, 2, ctx.seed);
    CubeHierarchy h = build_hierarchy(cloud, -8);
    HierarchyCheck c = verify_hierarchy(cloud, h);
    checks.push_back(check_entry("hierarchy_random_cloud", c.pass(), 0));
    MetricMeasureSpace path = make_path(full ? 201 : 51, 1.0);
    CubeHierarchy hp = build_hierarchy(path, 0);
    checks.push_back(
        check_entry("hierarchy_path", verify_hierarchy(path, hp).pass(), 0));
  }
  // dyadic weak-(1,1) constant exactly 1
  {
    MetricMeasureSpace path = make_path(full ? 201 : 51, 1.0);
    CubeHierarchy h = build_hierarchy(path, 0);
    std::mt19937_64 rng(ctx.seed + 11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0;
    for (int t = 0; t < (full ? 25 : 8); ++t) {
      Eigen::VectorXd f(path.n);
      for (int i = 0; i < path.n; ++i) f[i] = unif(rng);
      Eigen::VectorXd md = dyadic_maximal(path, h, f);
      double l1 = f.cwiseAbs().dot(path.mu);
      std::vector<double> lambdas(md.data(), md.data() + md.size());
      std::sort(lambdas.begin(), lambdas.end());
      lambdas.erase(std::unique(lambdas.begin(), lambdas.end()),
                    lambdas.end());
      for (double lam : lambdas) {
        if (lam <= 0) continue;
        double mass = 0;
        for (int i = 0; i < path.n; ++i)
          if (md[i] > lam) mass += path.mu[i];
        worst = std::max(worst, mass * lam / l1);
      }
    }
    checks.push_back(check_entry("dyadic_weak11", worst <= 1.0 + 1e-12, worst));
  }
  // product identity
  {
    int n = full ? 31 : 11;
    MetricMeasureSpace path = make_path(n, 1.0);
    DirichletOperator op = dirichlet_operator(path);
    std::mt19937_64 rng(ctx.seed + 17);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd V(n);
    for (int i = 0; i < n; ++i) { double u = unif(rng); V[i] = u * u; }
    ProductIdentityReport rep =
        product_identity_check(path, op, V, n, 1.0, {0.1, 1.0, 10.0});
    checks.push_back(check_entry(
        "product_lambda1",
        std::abs(rep.lambda1_product - rep.lambda1_factor) < 1e-9,
        std::abs(rep.lambda1_product - rep.lambda1_factor)));
    checks.push_back(check_entry("product_heat",
                                 rep.heat_factorization_err < 1e-8,
                                 rep.heat_factorization_err));
  }
  // spectrum bounds with calibrated constants
  {
    MetricMeasureSpace path = make_path(full ? 201 : 101, 1.0);
    DirichletOperator op = dirichlet_operator(path);
    DoublingProfile dp = doubling_profile(path, path.diameter());
    double C1 = std::pow(dp.A, -1.0 - dp.eta / 2);
    double Cp = calibrate_cp(path, op, 2.0, ctx.seed);
    std::mt19937_64 rng(ctx.seed + 23);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = -1;
    bool ok = true;
    for (int t = 0; t < (full ? 20 : 5); ++t) {
      Eigen::VectorXd V(path.n);
      for (int i = 0; i < path.n; ++i) { double u = unif(rng); V[i] = u * u; }
      SpectrumBoundResult r = spectrum_bounds(path, op, V, 2.0, C1, Cp);
      double slack =
          std::max(r.lower - (-r.exact), (-r.exact) - r.upper);
      worst = std::max(worst, slack);
      if (slack > 1e-12) ok = false;
    }
    checks.push_back(check_entry("spectrum_bracket", ok, worst));
  }
  // negative control: tree non-doubling and FK collapse
  {
    MetricMeasureSpace tree = make_binary_tree(full ? 10 : 8);
    double A2 = doubling_profile(tree, 2.0).A;
    double A8 = doubling_profile(tree, 8.0).A;
    checks.push_back(check_entry("tree_nondoubling", A8 > 1.5 * A2, A8 / A2));
    DirichletOperator op = dirichlet_operator(tree);
    double eta2 = doubling_profile(tree, 2.0).eta;
    double b2 = faber_krahn_fit(tree, op, 2.0, eta2, full ? 120 : 50,
                                ctx.seed).b;
    double b8 = faber_krahn_fit(tree, op, 8.0, eta2, full ? 120 : 50,
                                ctx.seed).b;
    checks.push_back(check_entry("tree_fk_collapse", b8 < 0.5 * b2,
                                 b2 > 0 ? b8 / b2 : 0.0));
  }
  // domination on a path
  {
    MetricMeasureSpace path = make_path(full ? 101 : 51, 1.0);
    KernelMatrix K = riesz_form_kernel(path, 1.0);
    DominationReport rep =
        domination_check(path, K, 8.0, 2.0, full ? 40 : 15, ctx.seed);
    checks.push_back(check_entry("domination_no_violation", !rep.violation,
                                 rep.C_emp));
  }

  ctx.report["scale"] = scale;
  ctx.report["checks"] = checks;
  int failed = 0;
  for (const auto& c : checks)
    if (!c["pass"].get<bool>()) ++failed;
  ctx.report["failed"] = failed;
  if (failed > 0) ctx.exit_code = 1;
  for (const auto& c : checks)
    std::cout << (c["pass"].get<bool>() ? "[PASS] " : "[FAIL] ")
              << c["name"].get<std::string>() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  auto t0 = std::chrono::steady_clock::now();
  CLI::App app{"geometric analysis on finite metric-measure spaces"};
  app.require_subcommand(1);
  Ctx ctx;

  GenArgs gen;
  auto* sgen = app.add_subcommand("gen", "generate a space file");
  sgen->set_help_flag("--help", "print help");  // frees -h for --h below
  sgen->add_option("kind", gen.kind, "grid|path|tree|connected-sum|product")
      ->required();
  sgen->add_option("--dim", gen.dim);
  sgen->add_option("--side", gen.side);
  sgen->add_option("--h", gen.h);
  sgen->add_option("--n", gen.n);
  sgen->add_option("--depth", gen.depth);
  sgen->add_option("--grids", gen.grids, "connected-sum parts, dimxside,...");
  sgen->add_option("--neck", gen.neck);
  sgen->add_option("--space", gen.space, "base space for product");
  sgen->add_option("--n-line", gen.n_line);
  sgen->add_option("-o,--out", gen.out);
  add_common(sgen, ctx);

  AnalyzeArgs an;
  auto* san = app.add_subcommand("analyze", "doubling/annuli/cover analyses");
  san->add_option("kind", an.kind, "doubling|annuli|cover")->required();
  san->add_option("--space", an.space)->required();
  san->add_option("--radius", an.radius);
  san->add_option("--center", an.center);
  san->add_option("--delta", an.delta);
  add_common(san, ctx);

  CubesArgs cu;
  auto* scu = app.add_subcommand("cubes", "build/verify cube hierarchies");
  scu->add_option("kind", cu.kind, "build|verify")->required();
  scu->add_option("--space", cu.space)->required();
  scu->add_option("--rho", cu.rho);
  scu->add_option("--level-min", cu.level_min);
  scu->add_option("--hierarchy", cu.hierarchy);
  add_common(scu, ctx);

  MaximalArgs mx;
  auto* smx = app.add_subcommand("maximal", "maximal functions");
  smx->add_option("kind", mx.kind, "centered|uncentered|fractional|dyadic")
      ->required();
  smx->add_option("--space", mx.space)->required();
  smx->add_option("--fn", mx.fn)->required();
  smx->add_option("-s,--s", mx.s);
  smx->add_option("--delta", mx.delta);
  smx->add_option("--hierarchy", mx.hierarchy);
  smx->add_option("-o,--out", mx.out);
  add_common(smx, ctx);

  MorreyArgs mo;
  auto* smo = app.add_subcommand("morrey", "Morrey norm of a potential");
  smo->add_option("--space", mo.space)->required();
  smo->add_option("--potential", mo.potential)->required();
  smo->add_option("--p", mo.p);
  smo->add_option("--radius", mo.radius);
  add_common(smo, ctx);

  SpectralArgs sp;
  auto* ssp = app.add_subcommand("spectral", "eigenvalues and kernels");
  ssp->add_option("kind", sp.kind, "lambda1|fk-fit|heat|riesz|bessel")
      ->required();
  ssp->add_option("--space", sp.space)->required();
  ssp->add_option("--domain", sp.domain, "all|interior");
  ssp->add_option("--potential", sp.potential);
  ssp->add_option("--times", sp.times);
  ssp->add_option("--s", sp.s);
  ssp->add_option("--lambda", sp.lambda);
  ssp->add_option("--radius", sp.radius);
  ssp->add_option("--c", sp.c);
  ssp->add_option("--eta", sp.eta);
  ssp->add_option("--samples", sp.samples);
  ssp->add_option("-o,--out", sp.out);
  add_common(ssp, ctx);

  VerifyArgs vf;
  auto* svf = app.add_subcommand("verify", "inequality verification suites");
  svf->set_help_flag("--help", "print help");  // frees -h for --h below
  svf->add_option("kind", vf.kind,
                  "fefferman-phong|weak-positivity|hardy|spectrum-bounds|"
                  "product-identity|domination")
      ->required();
  svf->add_option("--space", vf.space)->required();
  svf->add_option("--potential", vf.potential);
  svf->add_option("--kernel", vf.kernel);
  svf->add_option("--domain", vf.domain);
  svf->add_option("--origin", vf.origin);
  svf->add_option("--p", vf.p);
  svf->add_option("--radius", vf.radius);
  svf->add_option("--cp", vf.cp);
  svf->add_option("--c1", vf.c1);
  svf->add_option("--lambda", vf.lambda);
  svf->add_option("--delta", vf.delta);
  svf->add_option("--n-line", vf.n_line);
  svf->add_option("--h", vf.h);
  svf->add_option("--times", vf.times);
  svf->add_option("--trials", vf.trials);
  svf->add_flag("--dense-cross-check", vf.dense_cross_check);
  svf->add_option("--witness", vf.witness, "r,R,nu for the Hardy witness");
  add_common(svf, ctx);

  std::string suite_kind, suite_scale = "small";
  auto* ssu = app.add_subcommand("suite", "batched check suites");
  ssu->add_option("kind", suite_kind, "acceptance")->required();
  ssu->add_option("--scale", suite_scale, "small|full");
  add_common(ssu, ctx);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (const char* env = std::getenv("MMLAB_SEED")) ctx.seed = std::stoull(env);
  Eigen::setNbThreads(std::max(1, ctx.threads));

  try {
    if (sgen->parsed()) {
      ctx.command = "gen " + gen.kind;
      run_gen(ctx, gen);
    } else if (san->parsed()) {
      ctx.command = "analyze " + an.kind;
      run_analyze(ctx, an);
    } else if (scu->parsed()) {
      ctx.command = "cubes " + cu.kind;
      run_cubes(ctx, cu);
    } else if (smx->parsed()) {
      ctx.command = "maximal " + mx.kind;
      run_maximal(ctx, mx);
    } else if (smo->parsed()) {
      ctx.command = "morrey";
      run_morrey(ctx, mo);
    } else if (ssp->parsed()) {
      ctx.command = "spectral " + sp.kind;
      run_spectral(ctx, sp);
    } else if (svf->parsed()) {
      ctx.command = "verify " + vf.kind;
      run_verify(ctx, vf);
    } else if (ssu->parsed()) {
      if (suite_kind != "acceptance")
        throw std::invalid_argument("unknown suite '" + suite_kind + "'");
      if (suite_scale != "small" && suite_scale != "full")
        throw std::invalid_argument("--scale must be small or full");
      ctx.command = "suite acceptance";
      ctx.params["scale"] = suite_scale;
      run_suite(ctx, suite_scale);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }

  try {
    finalize(ctx, t0);
  } catch (const std::exception& e) {
    std::cerr << "report error: " << e.what() << '\n';
    return 2;
  }
  return ctx.exit_code;
}
