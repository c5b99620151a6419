#include "bsd/harmonics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace bsd {

HarmonicCoeffs::HarmonicCoeffs(int lmax) : lmax_(lmax), data_(lmax >= 0 ? sh_count(lmax) : 0, 0.0) {
  if (lmax < 0) throw std::invalid_argument("HarmonicCoeffs: negative lmax");
}

double HarmonicCoeffs::squared_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return s;
}

double HarmonicCoeffs::block_squared_norm(int l) const {
  double s = 0.0;
  for (double v : block(l)) s += v * v;
  return s;
}

HarmonicCoeffs HarmonicCoeffs::resized(int lmax) const {
  HarmonicCoeffs out(lmax);
  const int keep = std::min(lmax, lmax_);
  if (keep >= 0) std::copy_n(data_.begin(), sh_count(keep), out.data_.begin());
  return out;
}

int HarmonicCoeffs::effective_lmax() const {
  for (int l = lmax_; l >= 0; --l) {
    for (double v : block(l)) {
      if (v != 0.0) return l;
    }
  }
  return -1;
}

HarmonicCoeffs& HarmonicCoeffs::operator+=(const HarmonicCoeffs& other) {
  if (other.lmax_ > lmax_) *this = resized(other.lmax_);
  for (std::size_t i = 0; i < other.data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

namespace {

using cplx = std::complex<double>;

template <class T>
struct FftwFree {
  void operator()(T* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree<T>>;

FftwBuffer<double> alloc_real(int n) { return FftwBuffer<double>(fftw_alloc_real(std::max(n, 1))); }
FftwBuffer<fftw_complex> alloc_complex(int n) {
  return FftwBuffer<fftw_complex>(fftw_alloc_complex(std::max(n, 1)));
}

struct RingPlans {
  fftw_plan c2r = nullptr;
  fftw_plan r2c = nullptr;
};

// Planning is not thread-safe in FFTW; execution on fresh aligned buffers is.
const RingPlans& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, RingPlans> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto real = alloc_real(n);
  auto spec = alloc_complex(n / 2 + 1);
  RingPlans p;
  p.c2r = fftw_plan_dft_c2r_1d(n, spec.get(), real.get(), FFTW_ESTIMATE);
  p.r2c = fftw_plan_dft_r2c_1d(n, real.get(), spec.get(), FFTW_ESTIMATE);
  return cache.emplace(n, p).first->second;
}

// Runs the normalized recurrence for one ring and hands each (l, m, Pbar) to
// `visit`. Stops raising m once the diagonal term underflows.
template <class Visit>
void ring_recurrence(const NormalizedLegendre& rec, int lmax, double t, Visit&& visit) {
  const double s = std::sqrt((1.0 - t) * (1.0 + t));
  double pmm = 1.0 / std::sqrt(kFourPi);
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) pmm = rec.diagonal_step(m, s, pmm);
    if (pmm == 0.0) break;
    visit(m, m, pmm);
    if (m == lmax) break;
    double p2 = pmm;
    double p1 = rec.a(m + 1, m) * t * pmm;
    visit(m + 1, m, p1);
    for (int l = m + 2; l <= lmax; ++l) {
      const double p = rec.a(l, m) * (t * p1 - p2 / rec.a(l - 1, m));
      visit(l, m, p);
      p2 = p1;
      p1 = p;
    }
  }
}

// out_l^m += Pbar_l^m(t) * (ac[m] for m >= 0, as[|m|] for m < 0).
void accumulate_ring(const NormalizedLegendre& rec, int lmax, double t, std::span<const double> ac,
                     std::span<const double> as, HarmonicCoeffs& out) {
  ring_recurrence(rec, lmax, t, [&](int l, int m, double p) {
    out.at(l, m) += p * ac[m];
    if (m > 0) out.at(l, -m) += p * as[m];
  });
}

std::vector<double> evaluate_rings(const HarmonicCoeffs& c, int lmax, const CubatureSet& q) {
  const RingLayout& rings = *q.rings();
  const int n = rings.n_phi;
  const int half = n / 2;
  const RingPlans& plans = plans_for(n);
  const NormalizedLegendre rec(std::max(lmax, 0));
  const double inv_root2 = 1.0 / std::sqrt(2.0);

  std::vector<double> out(q.size());
  std::vector<double> fc(lmax + 1), fs(lmax + 1);
  auto spec = alloc_complex(half + 1);
  auto real = alloc_real(n);
  for (std::size_t r = 0; r < rings.cos_theta.size(); ++r) {
    std::fill(fc.begin(), fc.end(), 0.0);
    std::fill(fs.begin(), fs.end(), 0.0);
    ring_recurrence(rec, lmax, rings.cos_theta[r], [&](int l, int m, double p) {
      fc[m] += p * c.at(l, m);
      if (m > 0) fs[m] += p * c.at(l, -m);
    });
    std::fill_n(reinterpret_cast<double*>(spec.get()), 2 * (half + 1), 0.0);
    auto bin = [&](int k) -> cplx& { return reinterpret_cast<cplx*>(spec.get())[k]; };
    bin(0) += fc[0];
    for (int m = 1; m <= lmax; ++m) {
      // sqrt(2)(fc cos + fs sin) = 2 Re[(fc - i fs)/sqrt(2) e^{i m phi}]
      const cplx z = cplx(fc[m], -fs[m]) * inv_root2 * std::polar(1.0, m * rings.phi0);
      const int k = m % n;
      if (k == 0 || (n % 2 == 0 && k == half)) {
        bin(k) += 2.0 * z.real();
      } else if (k < half || (n % 2 == 1 && k == half)) {
        bin(k) += z;
      } else {
        bin(n - k) += std::conj(z);
      }
    }
    fftw_execute_dft_c2r(plans.c2r, spec.get(), real.get());
    std::copy_n(real.get(), n, out.begin() + static_cast<std::ptrdiff_t>(r) * n);
  }
  return out;
}

HarmonicCoeffs adjoint_rings(std::span<const double> values, const CubatureSet& q, int lmax) {
  const RingLayout& rings = *q.rings();
  const int n = rings.n_phi;
  const int half = n / 2;
  const RingPlans& plans = plans_for(n);
  const NormalizedLegendre rec(lmax);
  const double root2 = std::sqrt(2.0);

  HarmonicCoeffs out(lmax);
  std::vector<double> ac(lmax + 1), as(lmax + 1);
  auto spec = alloc_complex(half + 1);
  auto real = alloc_real(n);
  for (std::size_t r = 0; r < rings.cos_theta.size(); ++r) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(r) * n, n, real.get());
    fftw_execute_dft_r2c(plans.r2c, real.get(), spec.get());
    auto bin = [&](int k) { return reinterpret_cast<const cplx*>(spec.get())[k]; };
    ac[0] = bin(0).real();
    for (int m = 1; m <= lmax; ++m) {
      const int k = m % n;
      const cplx v = (k <= half) ? bin(k) : std::conj(bin(n - k));
      // sum_k v_k e^{-i m phi_k}
      const cplx sum = v * std::polar(1.0, -m * rings.phi0);
      ac[m] = root2 * sum.real();
      as[m] = -root2 * sum.imag();
    }
    accumulate_ring(rec, lmax, rings.cos_theta[r], ac, as, out);
  }
  return out;
}

}  // namespace

HarmonicCoeffs analyze_piecewise(const std::function<double(const SphPoint&)>& f, int lmax,
                                 std::span<const double> theta_breaks, std::span<const double> phi_breaks,
                                 int nodes) {
  if (lmax < 0) throw std::invalid_argument("analyze_piecewise: lmax must be >= 0");
  const int n = nodes > 0 ? nodes : lmax + 32;
  const auto [gx, gw] = gauss_legendre(n);

  std::vector<double> tb{0.0};
  for (double b : theta_breaks) {
    if (!(b > 0.0 && b < kPi)) throw std::invalid_argument("analyze_piecewise: theta break outside (0, pi)");
    tb.push_back(b);
  }
  tb.push_back(kPi);
  std::sort(tb.begin(), tb.end());

  std::vector<double> pb(phi_breaks.begin(), phi_breaks.end());
  for (double b : pb) {
    if (!(b >= 0.0 && b < 2 * kPi)) throw std::invalid_argument("analyze_piecewise: phi break outside [0, 2pi)");
  }
  std::sort(pb.begin(), pb.end());
  if (pb.empty()) pb.push_back(0.0);
  pb.push_back(pb.front() + 2 * kPi);

  // Longitude nodes and weights shared by every ring.
  std::vector<double> phis, phi_w;
  for (std::size_t k = 0; k + 1 < pb.size(); ++k) {
    const double mid = 0.5 * (pb[k] + pb[k + 1]);
    const double half = 0.5 * (pb[k + 1] - pb[k]);
    for (int i = 0; i < n; ++i) {
      phis.push_back(mid + half * gx[i]);
      phi_w.push_back(half * gw[i]);
    }
  }

  const NormalizedLegendre rec(lmax);
  const double root2 = std::sqrt(2.0);
  HarmonicCoeffs out(lmax);
  std::vector<double> ac(lmax + 1), as(lmax + 1);
  for (std::size_t k = 0; k + 1 < tb.size(); ++k) {
    const double mid = 0.5 * (tb[k] + tb[k + 1]);
    const double half = 0.5 * (tb[k + 1] - tb[k]);
    for (int i = 0; i < n; ++i) {
      const double theta = mid + half * gx[i];
      const double ring_weight = half * gw[i] * std::sin(theta);
      std::fill(ac.begin(), ac.end(), 0.0);
      std::fill(as.begin(), as.end(), 0.0);
      for (std::size_t p = 0; p < phis.size(); ++p) {
        const double v = ring_weight * phi_w[p] * f(SphPoint::from_angles(theta, phis[p]));
        if (v == 0.0) continue;
        // cos(m phi), sin(m phi) by the Chebyshev recurrence
        const double c1 = std::cos(phis[p]), s1 = std::sin(phis[p]);
        double cm = 1.0, sm = 0.0, cprev = c1, sprev = -s1;
        for (int m = 0; m <= lmax; ++m) {
          ac[m] += v * cm;
          as[m] += v * sm;
          const double cn = 2.0 * c1 * cm - cprev;
          const double sn = 2.0 * c1 * sm - sprev;
          cprev = cm;
          sprev = sm;
          cm = cn;
          sm = sn;
        }
      }
      for (int m = 1; m <= lmax; ++m) {
        ac[m] *= root2;
        as[m] *= root2;
      }
      accumulate_ring(rec, lmax, std::cos(theta), ac, as, out);
    }
  }
  return out;
}

std::vector<double> evaluate_on(const HarmonicCoeffs& c, const CubatureSet& q) {
  const int lmax = c.effective_lmax();
  if (lmax < 0) return std::vector<double>(q.size(), 0.0);
  if (q.rings()) return evaluate_rings(c, lmax, q);
  return synthesize(c.resized(lmax), q.nodes());
}

HarmonicCoeffs adjoint_on(std::span<const double> values, const CubatureSet& q, int lmax) {
  if (values.size() != q.size()) throw std::invalid_argument("adjoint_on: value count does not match rule");
  if (q.rings()) return adjoint_rings(values, q, lmax);
  HarmonicCoeffs out(lmax);
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (values[k] == 0.0) continue;
    const auto y = sh_values(lmax, q.nodes()[k]);
    for (std::size_t i = 0; i < y.size(); ++i) out.data()[i] += values[k] * y[i];
  }
  return out;
}

HarmonicCoeffs analyze(std::span<const double> samples, int lmax, const CubatureSet& q) {
  if (q.degree() < 2 * lmax) {
    throw std::invalid_argument("analyze: rule exact to degree " + std::to_string(q.degree()) +
                                ", need " + std::to_string(2 * lmax));
  }
  if (samples.size() != q.size()) throw std::invalid_argument("analyze: sample count does not match rule");
  std::vector<double> weighted(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) weighted[k] = samples[k] * q.weights()[k];
  return adjoint_on(weighted, q, lmax);
}

HarmonicCoeffs analyze(const std::function<double(const SphPoint&)>& f, int lmax, const CubatureSet& q) {
  std::vector<double> samples(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) samples[k] = f(q.nodes()[k]);
  return analyze(samples, lmax, q);
}

std::vector<double> synthesize(const HarmonicCoeffs& c, std::span<const SphPoint> points) {
  const int lmax = c.effective_lmax();
  std::vector<double> out(points.size(), 0.0);
  if (lmax < 0) return out;
  const NormalizedLegendre rec(lmax);
  std::vector<double> pbar(NormalizedLegendre::table_size(lmax));
  const double root2 = std::sqrt(2.0);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const SphPoint& p = points[k];
    rec.table(p.z, std::sqrt(p.x * p.x + p.y * p.y), pbar);
    const cplx step = std::polar(1.0, p.phi);
    cplx rot(1.0, 0.0);
    double value = 0.0;
    for (int m = 0; m <= lmax; ++m) {
      double sc = 0.0, ss = 0.0;
      for (int l = m; l <= lmax; ++l) {
        const double v = pbar[NormalizedLegendre::offset(l, m)];
        sc += v * c.at(l, m);
        if (m > 0) ss += v * c.at(l, -m);
      }
      value += (m == 0) ? sc : root2 * (sc * rot.real() + ss * rot.imag());
      rot *= step;
    }
    out[k] = value;
  }
  return out;
}

double synthesize(const HarmonicCoeffs& c, const SphPoint& p) {
  return synthesize(c, std::span<const SphPoint>(&p, 1))[0];
}

}  // namespace bsd
