#include "bsd/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace bsd {

double noise_scale(double x) {
  if (x == 0.0) return 0.0;
  return x * std::sqrt(std::abs(std::log(x)));
}

int max_level(double eps, double delta, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("max_level: lambda must be > 0");
  if (eps < 0.0 || delta < 0.0) throw std::invalid_argument("max_level: noise levels must be >= 0");
  const double inf = std::numeric_limits<double>::infinity();
  const double se = noise_scale(eps);
  const double sd = noise_scale(delta);
  const double a = se > 0.0 ? 1.0 / se : inf;
  const double b = sd > 0.0 ? 1.0 / (sd * sd) : inf;
  const double m = std::min(a, b);
  if (std::isinf(m)) throw std::invalid_argument("max_level: both noise levels vanish; give an explicit level");
  const double v = lambda * std::floor(m);
  if (v < 2.0) return 0;
  return static_cast<int>(std::floor(std::log2(v)));
}

int ThresholdConfig::max_level() const {
  if (level) {
    if (*level < 0) throw std::invalid_argument("ThresholdConfig: level must be >= 0");
    return *level;
  }
  return bsd::max_level(eps, delta, lambda);
}

ThresholdConfig threshold_config(const FixtureConfig& fx) {
  ThresholdConfig cfg;
  cfg.kappa = fx.kappa;
  cfg.tau_sig = fx.tau_sig;
  cfg.tau_op = fx.tau_op;
  cfg.lambda = fx.lambda;
  cfg.eps = fx.eps;
  cfg.delta = fx.delta;
  cfg.level = fixture_level(fx);
  return cfg;
}

int smallest_kept_degree(const ThresholdedOperator& top, int j) {
  const int lo = j == 0 ? 1 : 1 << (j - 1);
  const int hi = (1 << (j + 1)) - 1;
  return top.first_kept(lo, hi);
}

double signal_threshold(int j, const ThresholdedOperator& top, double eps, double delta, double tau_sig,
                        double tau_op) {
  const int lj = smallest_kept_degree(top, j);
  if (lj < 0) return std::numeric_limits<double>::infinity();
  const double noise = std::max(tau_sig * noise_scale(eps), tau_op * std::pow(2.0, -0.5 * j) * noise_scale(delta));
  if (noise == 0.0) return 0.0;
  return top.inverse_norm(lj) * noise;
}

NeedletStage needlet_stage(const Observation& obs, const BlockSource& kd, const ThresholdConfig& cfg,
                           const NeedletFrame& frame) {
  NeedletStage st;
  st.level = cfg.max_level();
  const int band = (1 << (st.level + 1)) - 1;
  if (frame.max_level() < st.level) throw std::invalid_argument("estimate: needlet frame is shallower than J");
  if (obs.g.lmax() < band) throw std::invalid_argument("estimate: observation bandwidth below 2^{J+1} - 1");
  if (kd.lmax() < band) throw std::invalid_argument("estimate: operator bandwidth below 2^{J+1} - 1");

  st.top = t_op(kd, cfg.delta, cfg.kappa, st.level);
  st.solution = HarmonicCoeffs(band);
  for (int l = 0; l <= band; ++l) {
    if (!st.top.kept(l)) continue;
    const Eigen::VectorXd x = st.top.solve(l, obs.g.block(l));
    std::copy(x.data(), x.data() + x.size(), st.solution.block(l).begin());
  }

  st.beta = NeedletCoeffs(st.level);
  st.beta.set_constant(st.solution.at(0, 0));
  for (int j = 0; j <= st.level; ++j) {
    st.l_j.push_back(smallest_kept_degree(st.top, j));
    if (st.l_j.back() >= 0) st.beta.level(j) = needlet_analyze_level(st.solution, frame, j);
  }
  return st;
}

std::size_t count_above(const std::vector<double>& beta, double s) {
  std::size_t n = 0;
  for (double b : beta) n += std::abs(b) > s ? 1 : 0;
  return n;
}

std::size_t EstimateResult::survived_count(int j) const {
  std::size_t n = 0;
  for (bool s : survived.at(j)) n += s ? 1 : 0;
  return n;
}

EstimateResult bnd_estimate(const Observation& obs, const BlockSource& kd, const ThresholdConfig& cfg,
                            const NeedletFrame& frame) {
  NeedletStage st = needlet_stage(obs, kd, cfg, frame);
  EstimateResult r;
  r.method = "bnd";
  r.level = st.level;
  r.config = cfg;
  r.config.level = st.level;
  r.kept_blocks = st.top.keep_mask();
  r.l_j = st.l_j;

  NeedletCoeffs kept(st.level);
  kept.set_constant(st.beta.constant());
  for (int j = 0; j <= st.level; ++j) {
    const double s = signal_threshold(j, st.top, cfg.eps, cfg.delta, cfg.tau_sig, cfg.tau_op);
    r.s_j.push_back(s);
    const std::vector<double>& beta = st.beta.level(j);
    std::vector<bool> mask(beta.size());
    std::vector<double> out(beta.size(), 0.0);
    bool any = false;
    for (std::size_t i = 0; i < beta.size(); ++i) {
      mask[i] = std::abs(beta[i]) > s;
      if (mask[i]) {
        out[i] = beta[i];
        any = true;
      }
    }
    r.survived.push_back(std::move(mask));
    if (any) kept.level(j) = std::move(out);
  }
  r.f_hat = needlet_synthesize(kept, frame);
  r.beta_hat = std::move(st.beta);
  return r;
}

EstimateResult bbd_estimate(const Observation& obs, const BlockSource& kd, const ThresholdConfig& cfg) {
  EstimateResult r;
  r.method = "bbd";
  r.level = cfg.max_level();
  r.config = cfg;
  r.config.level = r.level;
  const int top_degree = std::min({1 << (r.level + 1), obs.g.lmax(), kd.lmax()});
  if (obs.g.lmax() < (1 << (r.level + 1)) - 1) {
    throw std::invalid_argument("estimate: observation bandwidth below 2^{J+1} - 1");
  }
  const ThresholdedOperator top = t_op(kd, cfg.delta, cfg.kappa, r.level);
  r.kept_blocks = top.keep_mask();
  r.f_hat = HarmonicCoeffs(top_degree);
  for (int l = 0; l <= top_degree; ++l) {
    if (!top.kept(l)) continue;
    const Eigen::VectorXd x = top.solve(l, obs.g.block(l));
    std::copy(x.data(), x.data() + x.size(), r.f_hat.block(l).begin());
  }
  return r;
}

namespace {

using nlohmann::json;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void write_estimate(std::ostream& out, const EstimateResult& r) {
  json j;
  j["format"] = "bsd-estimate";
  j["version"] = 1;
  j["method"] = r.method;
  j["level"] = r.level;
  j["config"] = {{"kappa", r.config.kappa}, {"tau_sig", r.config.tau_sig}, {"tau_op", r.config.tau_op},
                 {"lambda", r.config.lambda}, {"eps", r.config.eps},         {"delta", r.config.delta}};
  j["lmax"] = r.f_hat.lmax();
  j["f_hat"] = std::vector<double>(r.f_hat.data().begin(), r.f_hat.data().end());
  std::vector<int> keep(r.kept_blocks.begin(), r.kept_blocks.end());
  j["kept_blocks"] = keep;
  json s = json::array();
  for (double v : r.s_j) s.push_back(finite_or_null(v));
  j["s_j"] = s;
  j["l_j"] = r.l_j;
  json survived = json::array();
  for (const auto& level : r.survived) survived.push_back(std::vector<int>(level.begin(), level.end()));
  j["survived"] = survived;
  json beta;
  beta["constant"] = r.beta_hat.constant();
  json levels = json::array();
  for (int lev = 0; lev <= r.beta_hat.max_level(); ++lev) levels.push_back(r.beta_hat.level(lev));
  beta["levels"] = levels;
  j["beta_hat"] = beta;
  out << j.dump() << '\n';
}

EstimateResult read_estimate(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("read_estimate: ") + e.what());
  }
  if (j.value("format", "") != "bsd-estimate") throw std::runtime_error("read_estimate: not an estimate file");
  try {
    EstimateResult r;
    r.method = j.at("method").get<std::string>();
    r.level = j.at("level").get<int>();
    const json& c = j.at("config");
    r.config.kappa = c.at("kappa");
    r.config.tau_sig = c.at("tau_sig");
    r.config.tau_op = c.at("tau_op");
    r.config.lambda = c.at("lambda");
    r.config.eps = c.at("eps");
    r.config.delta = c.at("delta");
    r.config.level = r.level;
    r.f_hat = HarmonicCoeffs(j.at("lmax").get<int>());
    const auto data = j.at("f_hat").get<std::vector<double>>();
    if (data.size() != r.f_hat.data().size()) throw std::runtime_error("read_estimate: f_hat length mismatch");
    std::copy(data.begin(), data.end(), r.f_hat.data().begin());
    for (int k : j.at("kept_blocks").get<std::vector<int>>()) r.kept_blocks.push_back(k != 0);
    for (const json& v : j.at("s_j")) r.s_j.push_back(v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>());
    r.l_j = j.at("l_j").get<std::vector<int>>();
    for (const json& level : j.at("survived")) {
      std::vector<bool> mask;
      for (int k : level.get<std::vector<int>>()) mask.push_back(k != 0);
      r.survived.push_back(std::move(mask));
    }
    const json& beta = j.at("beta_hat");
    const json& levels = beta.at("levels");
    r.beta_hat = NeedletCoeffs(static_cast<int>(levels.size()) - 1);
    r.beta_hat.set_constant(beta.at("constant"));
    for (std::size_t lev = 0; lev < levels.size(); ++lev) {
      r.beta_hat.level(static_cast<int>(lev)) = levels[lev].get<std::vector<double>>();
    }
    return r;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("read_estimate: ") + e.what());
  }
}

}  // namespace bsd
