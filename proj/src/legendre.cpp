#include "bsd/legendre.hpp"

#include <cmath>
#include <stdexcept>

namespace bsd {

namespace {

void check_argument(double t) {
  if (!(std::abs(t) <= 1.0)) throw std::domain_error("Legendre argument outside [-1, 1]");
}

}  // namespace

double eval_legendre(int l, int m, double t) {
  if (m < 0 || m > l) throw std::domain_error("eval_legendre: order must satisfy 0 <= m <= l");
  check_argument(t);
  double pmm = 1.0;
  if (m > 0) {
    const double s = std::sqrt((1.0 - t) * (1.0 + t));
    double odd = 1.0;
    for (int i = 1; i <= m; ++i) {
      pmm *= -odd * s;
      odd += 2.0;
    }
  }
  if (l == m) return pmm;
  double pm1 = t * (2 * m + 1) * pmm;
  if (l == m + 1) return pm1;
  double pl = 0.0;
  for (int ll = m + 2; ll <= l; ++ll) {
    pl = (t * (2 * ll - 1) * pm1 - (ll + m - 1) * pmm) / (ll - m);
    pmm = pm1;
    pm1 = pl;
  }
  return pl;
}

double legendre_polynomial(int l, double t) {
  if (l < 0) throw std::domain_error("legendre_polynomial: negative degree");
  check_argument(t);
  if (l == 0) return 1.0;
  double p0 = 1.0;
  double p1 = t;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double legendre_kernel(int l, double t) { return (2 * l + 1) / kFourPi * legendre_polynomial(l, t); }

NormalizedLegendre::NormalizedLegendre(int lmax)
    : lmax_(lmax), a_(table_size(lmax), 0.0), diag_(lmax + 1, 0.0) {
  for (int m = 1; m <= lmax; ++m) diag_[m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
  for (int m = 0; m <= lmax; ++m) {
    for (int l = m + 1; l <= lmax; ++l) {
      a_[offset(l, m)] = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
    }
  }
}

void NormalizedLegendre::table(double t, double s, std::span<double> out) const {
  double pmm = 1.0 / std::sqrt(kFourPi);
  for (int m = 0; m <= lmax_; ++m) {
    if (m > 0) pmm = diagonal_step(m, s, pmm);
    out[offset(m, m)] = pmm;
    if (m == lmax_) break;
    double p2 = pmm;
    double p1 = a(m + 1, m) * t * pmm;
    out[offset(m + 1, m)] = p1;
    for (int l = m + 2; l <= lmax_; ++l) {
      const double al = a(l, m);
      const double p = al * (t * p1 - p2 / a(l - 1, m));
      out[offset(l, m)] = p;
      p2 = p1;
      p1 = p;
    }
  }
}

double eval_sh(int l, int m, const SphPoint& p) {
  if (l < 0 || m < -l || m > l) throw std::domain_error("eval_sh: order must satisfy |m| <= l");
  const auto values = sh_values(l, p);
  return values[sh_index(l, m)];
}

std::vector<double> sh_values(int lmax, const SphPoint& p) {
  NormalizedLegendre rec(lmax);
  std::vector<double> pbar(NormalizedLegendre::table_size(lmax));
  rec.table(p.z, std::sqrt(p.x * p.x + p.y * p.y), pbar);
  std::vector<double> out(sh_count(lmax));
  const double root2 = std::sqrt(2.0);
  for (int m = 0; m <= lmax; ++m) {
    const double c = std::cos(m * p.phi);
    const double s = std::sin(m * p.phi);
    for (int l = m; l <= lmax; ++l) {
      const double v = pbar[NormalizedLegendre::offset(l, m)];
      if (m == 0) {
        out[sh_index(l, 0)] = v;
      } else {
        out[sh_index(l, m)] = root2 * v * c;
        out[sh_index(l, -m)] = root2 * v * s;
      }
    }
  }
  return out;
}

}  // namespace bsd
