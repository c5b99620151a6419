#include "bsd/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "bsd/estimators.hpp"
#include "bsd/needlets.hpp"
#include "bsd/seeding.hpp"

namespace bsd {

EvalGrid eval_grid(int n) {
  if (n < 1) throw std::invalid_argument("eval_grid: n must be >= 1");
  EvalGrid g;
  g.points.reserve(n);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    g.points.push_back(SphPoint::from_cartesian(r * std::cos(phi), r * std::sin(phi), z));
  }
  g.weights.assign(n, kFourPi / n);
  return g;
}

double lp_error(std::span<const double> estimate, std::span<const double> truth, std::span<const double> weights,
                ErrorNorm p) {
  if (estimate.size() != truth.size() || truth.size() != weights.size()) {
    throw std::invalid_argument("lp_error: size mismatch");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = std::abs(estimate[i] - truth[i]);
    if (p == ErrorNorm::l2) {
      num += weights[i] * d * d;
      den += weights[i] * truth[i] * truth[i];
    } else {
      num = std::max(num, d);
      den = std::max(den, std::abs(truth[i]));
    }
  }
  if (p == ErrorNorm::l2) {
    num = std::sqrt(num);
    den = std::sqrt(den);
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

double lp_error(const HarmonicCoeffs& f_hat, const TargetDensity& f_true, const EvalGrid& grid, ErrorNorm p) {
  const std::vector<double> est = synthesize(f_hat, grid.points);
  std::vector<double> truth;
  truth.reserve(grid.points.size());
  for (const SphPoint& x : grid.points) truth.push_back(f_true(x));
  return lp_error(est, truth, grid.weights, p);
}

StudyConfig table3_config() {
  StudyConfig cfg;
  for (double delta : {3e-3, 1e-3, 1e-4}) {
    for (double eps : {1e-3, 1e-4}) cfg.pairs.emplace_back(delta, eps);
  }
  return cfg;
}

ErrorReport run_study(const StudyConfig& cfg, const std::function<void(const ErrorRow&)>& progress) {
  if (cfg.replicates < 1) throw std::invalid_argument("run_study: replicates must be >= 1");
  for (const auto& m : cfg.methods) {
    if (m != "bnd" && m != "bbd") throw std::invalid_argument("run_study: unknown method " + m);
  }
  const EvalGrid grid = eval_grid(cfg.grid_points);
  const TargetDensity target = TargetDensity::exp_spike();
  std::vector<double> truth;
  for (const SphPoint& x : grid.points) truth.push_back(target(x));

  const NeedletFrame frame(cfg.j_max);
  std::map<int, HarmonicCoeffs> projections;

  ErrorReport report;
  for (const auto& [delta, eps] : cfg.pairs) {
    FixtureConfig fc;
    fc.delta = delta;
    fc.eps = eps;
    fc.kappa = cfg.kappa;
    fc.tau_sig = cfg.tau_sig;
    fc.tau_op = cfg.tau_op;
    fc.lambda = cfg.lambda;
    fc.j_max = cfg.j_max;
    const int level = fixture_level(fc);
    const int band = (1 << (level + 1)) - 1;
    if (!projections.count(level)) projections.emplace(level, project_target(target, band));
    const ThresholdConfig tc = threshold_config(fc);

    for (int r = 0; r < cfg.replicates; ++r) {
      fc.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
      std::optional<Fixture> fx;
      std::string fixture_failure;
      try {
        fx = make_fixture(fc, &projections.at(level));
      } catch (const std::exception& e) {
        fixture_failure = e.what();
      }
      for (const auto& method : cfg.methods) {
        ErrorRow row{delta, eps, method, r, std::nan(""), std::nan(""), fixture_failure};
        if (fx) {
          try {
            const EstimateResult est = method == "bnd" ? bnd_estimate(fx->obs, *fx->kd, tc, frame)
                                                       : bbd_estimate(fx->obs, *fx->kd, tc);
            const std::vector<double> values = synthesize(est.f_hat, grid.points);
            row.l2 = lp_error(values, truth, grid.weights, ErrorNorm::l2);
            row.linf = lp_error(values, truth, grid.weights, ErrorNorm::linf);
          } catch (const std::exception& e) {
            row.failure = e.what();
          }
        }
        report.rows.push_back(row);
        if (progress) progress(row);
      }
    }
  }
  return report;
}

std::vector<ErrorAggregate> ErrorReport::aggregate() const {
  std::vector<ErrorAggregate> out;
  auto find = [&](const ErrorRow& row) -> ErrorAggregate& {
    for (auto& a : out) {
      if (a.delta == row.delta && a.eps == row.eps && a.method == row.method) return a;
    }
    out.push_back(ErrorAggregate{row.delta, row.eps, row.method});
    return out.back();
  };
  std::vector<std::vector<std::pair<double, double>>> samples;
  for (const ErrorRow& row : rows) {
    const std::size_t before = out.size();
    ErrorAggregate& a = find(row);
    if (out.size() != before) samples.emplace_back();
    const std::size_t idx = static_cast<std::size_t>(&a - out.data());
    if (row.failure.empty()) samples[idx].emplace_back(row.l2, row.linf);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& s = samples[i];
    ErrorAggregate& a = out[i];
    a.n = static_cast<int>(s.size());
    if (s.empty()) {
      a.mean_l2 = a.mean_linf = a.se_l2 = a.se_linf = std::nan("");
      continue;
    }
    for (const auto& [l2, linf] : s) {
      a.mean_l2 += l2 / a.n;
      a.mean_linf += linf / a.n;
    }
    if (a.n > 1) {
      double v2 = 0.0, vi = 0.0;
      for (const auto& [l2, linf] : s) {
        v2 += (l2 - a.mean_l2) * (l2 - a.mean_l2);
        vi += (linf - a.mean_linf) * (linf - a.mean_linf);
      }
      a.se_l2 = std::sqrt(v2 / (a.n - 1) / a.n);
      a.se_linf = std::sqrt(vi / (a.n - 1) / a.n);
    }
  }
  return out;
}

void write_results_csv(std::ostream& out, const ErrorReport& report) {
  out << "delta,eps,method,replicate,l2,linf\n";
  out.precision(10);
  for (const ErrorRow& r : report.rows) {
    out << r.delta << ',' << r.eps << ',' << r.method << ',' << r.replicate << ',' << r.l2 << ',' << r.linf << '\n';
  }
}

void write_summary_csv(std::ostream& out, const ErrorReport& report) {
  out << "delta,eps,method,n,mean_l2,se_l2,mean_linf,se_linf\n";
  out.precision(6);
  for (const ErrorAggregate& a : report.aggregate()) {
    out << a.delta << ',' << a.eps << ',' << a.method << ',' << a.n << ',' << a.mean_l2 << ',' << a.se_l2 << ','
        << a.mean_linf << ',' << a.se_linf << '\n';
  }
}

std::vector<FieldSample> export_field(const HarmonicCoeffs& f, const EvalGrid& grid) {
  const std::vector<double> values = synthesize(f, grid.points);
  std::vector<FieldSample> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out.push_back({grid.points[i], values[i]});
  return out;
}

void write_field_csv(std::ostream& out, const std::vector<FieldSample>& field) {
  out << "x,y,z,value\n";
  out.precision(12);
  for (const FieldSample& s : field) {
    out << s.point.x << ',' << s.point.y << ',' << s.point.z << ',' << s.value << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    body(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace bsd
