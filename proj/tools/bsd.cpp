#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bsd/bench.hpp"
#include "bsd/calibrate.hpp"
#include "bsd/cubature.hpp"
#include "bsd/estimators.hpp"
#include "bsd/needlets.hpp"
#include "bsd/operators.hpp"
#include "bsd/simulate.hpp"
#include "bsd/window.hpp"

namespace {

using namespace bsd;

HarmonicCoeffs random_coeffs(int lmax, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  HarmonicCoeffs c(lmax);
  for (double& v : c.data()) v = normal(rng);
  return c;
}

struct Check {
  std::string name;
  std::function<double()> defect;
  double tolerance;
};

int run_selftest() {
  std::mt19937_64 rng(7);
  const std::vector<Check> checks{
      {"quadrature exactness (degree 20)", [] { return exactness_defect(product_rule(20), 20); }, 1e-9},
      {"partition of unity",
       [] {
         WindowFunction w;
         double worst = 0.0;
         for (double x = 1.0; x <= 1e4; x *= 1.01) {
           double s = 0.0;
           for (int j = 0; j <= 15; ++j) s += std::pow(w.b(x / std::ldexp(1.0, j)), 2);
           worst = std::max(worst, std::abs(s - 1.0));
         }
         return worst;
       },
       1e-10},
      {"harmonic round trip (lmax 8)",
       [&] {
         const HarmonicCoeffs c = random_coeffs(8, rng);
         const CubatureSet q = product_rule(16);
         const HarmonicCoeffs back = analyze(evaluate_on(c, q), 8, q);
         double worst = 0.0;
         for (std::size_t i = 0; i < c.data().size(); ++i) worst = std::max(worst, std::abs(c.data()[i] - back.data()[i]));
         return worst;
       },
       1e-9},
      {"needlet frame identity (J 4)",
       [&] {
         const NeedletFrame frame(4);
         const HarmonicCoeffs c = random_coeffs(16, rng).resized(31);
         return std::abs(needlet_analyze(c, frame).squared_norm() - c.squared_norm()) / c.squared_norm();
       },
       1e-9},
      {"blockwise apply (lmax 8)",
       [&] {
         std::normal_distribution<double> normal;
         std::vector<Eigen::MatrixXd> blocks;
         for (int l = 0; l <= 8; ++l) blocks.push_back(Eigen::MatrixXd::NullaryExpr(2 * l + 1, 2 * l + 1, [&] { return normal(rng); }));
         const BlockOperator k(std::move(blocks));
         const HarmonicCoeffs f = random_coeffs(8, rng);
         const HarmonicCoeffs kf = apply(k, f);
         const Eigen::VectorXd dense = k.dense() * Eigen::Map<const Eigen::VectorXd>(f.data().data(), f.data().size());
         return (dense - Eigen::Map<const Eigen::VectorXd>(kf.data().data(), kf.data().size())).cwiseAbs().maxCoeff();
       },
       1e-12},
      {"Rosenthal(pi, 1) ill-posedness",
       [] { return std::abs(estimate_dip(rosenthal_spectrum(kPi, 1.0, 64), 4, 64).nu - 1.0); }, 0.05},
      {"noiseless recovery (J 3)",
       [&] {
         const int level = 3;
         const NeedletFrame frame(level);
         const HarmonicCoeffs f = random_coeffs(8, rng).resized(15);
         const ScalarBlockOperator k = rosenthal_spectrum(kPi, 1.0, 16);
         const Observation obs = observe_signal(f.resized(16), k, 0.0, 1);
         ThresholdConfig cfg;
         cfg.level = level;
         const EstimateResult r = bnd_estimate(obs, k, cfg, frame);
         HarmonicCoeffs diff = r.f_hat;
         for (std::size_t i = 0; i < diff.data().size(); ++i) diff.data()[i] -= f.data()[i];
         return std::sqrt(diff.squared_norm() / f.squared_norm());
       },
       1e-8},
  };
  int failed = 0;
  for (const Check& c : checks) {
    double d = 0.0;
    std::string note;
    try {
      d = c.defect();
    } catch (const std::exception& e) {
      d = std::nan("");
      note = std::string(" (") + e.what() + ")";
    }
    const bool ok = d <= c.tolerance;
    failed += ok ? 0 : 1;
    std::printf("%s  %-36s defect %.3e  tol %.1e%s\n", ok ? "PASS" : "FAIL", c.name.c_str(), d, c.tolerance,
                note.c_str());
  }
  return failed == 0 ? 0 : 1;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad grid value: " + item);
    grid.push_back(v);
  }
  return grid;
}

void emit(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
  } else {
    write_file_atomic(path, body);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind spherical deconvolution with needlets"};
  app.require_subcommand(1);

  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");

  auto* calibrate = app.add_subcommand("calibrate", "Calibrate kappa, tau_sig or tau_op and print the count matrix as CSV");
  std::string cal_what = "kappa";
  double cal_delta = -1.0, cal_eps = -1.0, cal_kappa = 0.8;
  std::string cal_grid;
  int cal_runs = 10;
  std::uint64_t cal_seed = 0;
  std::string cal_out;
  calibrate->add_option("--what", cal_what, "kappa | tau_sig | tau_op")
      ->check(CLI::IsMember({"kappa", "tau_sig", "tau_op"}))
      ->capture_default_str();
  calibrate->add_option("--delta", cal_delta, "Operator noise (default 1e-3; 1e-4 for tau_sig)");
  calibrate->add_option("--eps", cal_eps, "Signal noise for tau runs (default 1e-3; 1e-4 for tau_op)");
  calibrate->add_option("--kappa", cal_kappa, "kappa used by tau runs")->capture_default_str();
  calibrate->add_option("--grid", cal_grid, "Comma-separated ascending grid");
  calibrate->add_option("--runs", cal_runs, "Replicates per grid value")->capture_default_str()->check(CLI::PositiveNumber);
  calibrate->add_option("--seed", cal_seed, "Master seed")->capture_default_str();
  calibrate->add_option("--out", cal_out, "CSV output file (default stdout)");

  auto* estimate = app.add_subcommand("estimate", "Run an estimator on a fixture and write the result as JSON");
  std::string est_fixture, est_method = "bnd", est_out;
  estimate->add_option("--fixture", est_fixture, "Fixture config file (key = value lines)")->required()->check(CLI::ExistingFile);
  estimate->add_option("--method", est_method, "bnd | bbd")->check(CLI::IsMember({"bnd", "bbd"}))->capture_default_str();
  estimate->add_option("--out", est_out, "JSON output file (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo error study; writes delta,eps,method,replicate,l2,linf");
  bool sim_table3 = false;
  int sim_n = 20, sim_jmax = 8;
  std::uint64_t sim_seed = 0;
  std::string sim_out, sim_summary;
  double sim_kappa = 0.8, sim_tau_sig = 0.9, sim_tau_op = 0.2;
  simulate->add_flag("--table3", sim_table3, "Use the six (delta, eps) pairs of the standard study")->required();
  simulate->add_option("--N", sim_n, "Replicates per cell")->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "Master seed")->capture_default_str();
  simulate->add_option("--jmax", sim_jmax, "Cap on the maximal level J")->capture_default_str()->check(CLI::Range(0, 10));
  simulate->add_option("--kappa", sim_kappa)->capture_default_str();
  simulate->add_option("--tau-sig", sim_tau_sig)->capture_default_str();
  simulate->add_option("--tau-op", sim_tau_op)->capture_default_str();
  simulate->add_option("--out", sim_out, "Per-replicate CSV")->required();
  simulate->add_option("--summary", sim_summary, "Optional CSV of means and standard errors");

  auto* field = app.add_subcommand("export-field", "Evaluate an estimate on a Fibonacci grid; writes x,y,z,value");
  std::string field_in, field_out;
  int field_points = 4096;
  field->add_option("--in", field_in, "Estimate JSON")->required()->check(CLI::ExistingFile);
  field->add_option("--out", field_out, "CSV output file (default stdout)");
  field->add_option("--points", field_points, "Grid size")->capture_default_str()->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*selftest) return run_selftest();

    if (*calibrate) {
      if (cal_what == "kappa") {
        const double delta = cal_delta > 0 ? cal_delta : 1e-3;
        const auto grid = cal_grid.empty() ? std::vector<double>{0.3, 0.4, 0.5, 0.6, 0.7, 0.8} : parse_grid(cal_grid);
        const KappaCalibration c = calibrate_kappa(delta, cal_runs, grid, cal_seed);
        emit(cal_out, [&](std::ostream& out) { write_kappa_csv(out, c); });
        std::cerr << "kappa = " << c.kappa << (c.exhausted ? " (grid exhausted)" : "") << '\n';
        return c.exhausted ? 2 : 0;
      }
      const bool sig = cal_what == "tau_sig";
      const double delta = cal_delta >= 0 ? cal_delta : (sig ? 1e-4 : 1e-3);
      const double eps = cal_eps >= 0 ? cal_eps : (sig ? 1e-3 : 1e-4);
      const auto grid = !cal_grid.empty() ? parse_grid(cal_grid)
                        : sig             ? std::vector<double>{0.5, 0.6, 0.7, 0.8, 0.9}
                                          : std::vector<double>{0.1, 0.2};
      const TauCalibration c =
          calibrate_tau(sig ? TauKind::sig : TauKind::op, eps, delta, cal_kappa, grid, cal_runs, cal_seed);
      emit(cal_out, [&](std::ostream& out) { write_tau_csv(out, c); });
      std::cerr << cal_what << " = " << c.tau << (c.exhausted ? " (grid exhausted)" : "") << '\n';
      return c.exhausted ? 2 : 0;
    }

    if (*estimate) {
      std::ifstream in(est_fixture);
      const FixtureConfig cfg = parse_fixture_config(in);
      const Fixture fx = make_fixture(cfg);
      const ThresholdConfig tc = threshold_config(cfg);
      EstimateResult r;
      if (est_method == "bnd") {
        const NeedletFrame frame(fx.level);
        r = bnd_estimate(fx.obs, *fx.kd, tc, frame);
      } else {
        r = bbd_estimate(fx.obs, *fx.kd, tc);
      }
      emit(est_out, [&](std::ostream& out) { write_estimate(out, r); });
      const EvalGrid grid = eval_grid(4096);
      std::cerr << est_method << " J=" << r.level << " l2=" << lp_error(r.f_hat, fx.target, grid, ErrorNorm::l2)
                << " linf=" << lp_error(r.f_hat, fx.target, grid, ErrorNorm::linf) << '\n';
      return 0;
    }

    if (*simulate) {
      StudyConfig cfg = table3_config();
      cfg.replicates = sim_n;
      cfg.seed = sim_seed;
      cfg.j_max = sim_jmax;
      cfg.kappa = sim_kappa;
      cfg.tau_sig = sim_tau_sig;
      cfg.tau_op = sim_tau_op;
      const ErrorReport report = run_study(cfg, [](const ErrorRow& row) {
        std::cerr << row.delta << ' ' << row.eps << ' ' << row.method << " #" << row.replicate << " l2=" << row.l2
                  << " linf=" << row.linf << (row.failure.empty() ? "" : " FAILED: " + row.failure) << '\n';
      });
      write_file_atomic(sim_out, [&](std::ostream& out) { write_results_csv(out, report); });
      if (!sim_summary.empty()) write_file_atomic(sim_summary, [&](std::ostream& out) { write_summary_csv(out, report); });
      write_summary_csv(std::cout, report);
      return 0;
    }

    if (*field) {
      std::ifstream in(field_in);
      const EstimateResult r = read_estimate(in);
      const auto samples = export_field(r.f_hat, eval_grid(field_points));
      emit(field_out, [&](std::ostream& out) { write_field_csv(out, samples); });
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
