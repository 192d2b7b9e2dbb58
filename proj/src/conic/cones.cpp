#include <cmath>
#include <limits>

#include "acots/conic.hpp"

namespace acots {

int ConeDims::total() const {
  int n = nonneg;
  for (int d : soc) n += d;
  return n;
}

int ConeDims::degree() const { return nonneg + static_cast<int>(soc.size()); }

namespace detail {

namespace {

double soc_residual(const double* u, int d) {
  double r = u[0] * u[0];
  for (int i = 1; i < d; ++i) r -= u[i] * u[i];
  return r;
}

}  // namespace

bool compute_nt_scaling(const ConeDims& k, const Eigen::VectorXd& s, const Eigen::VectorXd& z,
                        NtScaling& w, Eigen::VectorXd& lambda) {
  const int m = k.total();
  lambda.resize(m);
  w.lp_w.resize(k.nonneg);
  for (int i = 0; i < k.nonneg; ++i) {
    if (s[i] <= 0.0 || z[i] <= 0.0) return false;
    w.lp_w[i] = std::sqrt(s[i] / z[i]);
    lambda[i] = std::sqrt(s[i] * z[i]);
  }
  w.soc_eta.resize(k.soc.size());
  w.soc_w.resize(m - k.nonneg);
  int off = k.nonneg;
  for (std::size_t c = 0; c < k.soc.size(); ++c) {
    const int d = k.soc[c];
    const double sres = soc_residual(s.data() + off, d);
    const double zres = soc_residual(z.data() + off, d);
    if (sres <= 0.0 || zres <= 0.0 || s[off] <= 0.0 || z[off] <= 0.0) return false;
    const double snorm = std::sqrt(sres);
    const double znorm = std::sqrt(zres);
    Eigen::VectorXd sb = s.segment(off, d) / snorm;
    Eigen::VectorXd zb = z.segment(off, d) / znorm;
    const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
    double* wb = w.soc_w.data() + (off - k.nonneg);
    wb[0] = (sb[0] + zb[0]) / (2.0 * gamma);
    for (int i = 1; i < d; ++i) wb[i] = (sb[i] - zb[i]) / (2.0 * gamma);
    // Re-normalize so that wb lies on the unit hyperboloid.
    double tail = 0.0;
    for (int i = 1; i < d; ++i) tail += wb[i] * wb[i];
    wb[0] = std::sqrt(1.0 + tail);
    w.soc_eta[c] = std::sqrt(snorm / znorm);
    off += d;
  }
  lambda.tail(m - k.nonneg) = apply_w(k, w, z).tail(m - k.nonneg);
  return true;
}

namespace {

template <bool kInverse>
Eigen::VectorXd apply_scaling(const ConeDims& k, const NtScaling& w, const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  for (int i = 0; i < k.nonneg; ++i) out[i] = kInverse ? v[i] / w.lp_w[i] : v[i] * w.lp_w[i];
  int off = k.nonneg;
  for (std::size_t c = 0; c < k.soc.size(); ++c) {
    const int d = k.soc[c];
    const double* wb = w.soc_w.data() + (off - k.nonneg);
    const double eta = kInverse ? 1.0 / w.soc_eta[c] : w.soc_eta[c];
    const double sgn = kInverse ? -1.0 : 1.0;
    double w1v1 = 0.0;
    for (int i = 1; i < d; ++i) w1v1 += wb[i] * v[off + i];
    const double v0 = v[off];
    out[off] = eta * (wb[0] * v0 + sgn * w1v1);
    const double f = sgn * v0 + w1v1 / (1.0 + wb[0]);
    for (int i = 1; i < d; ++i) out[off + i] = eta * (v[off + i] + f * wb[i]);
    off += d;
  }
  return out;
}

}  // namespace

Eigen::VectorXd apply_w(const ConeDims& k, const NtScaling& w, const Eigen::VectorXd& v) {
  return apply_scaling<false>(k, w, v);
}

Eigen::VectorXd apply_w_inv(const ConeDims& k, const NtScaling& w, const Eigen::VectorXd& v) {
  return apply_scaling<true>(k, w, v);
}

Eigen::VectorXd cone_product(const ConeDims& k, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  Eigen::VectorXd out(u.size());
  for (int i = 0; i < k.nonneg; ++i) out[i] = u[i] * v[i];
  int off = k.nonneg;
  for (int d : k.soc) {
    out[off] = u.segment(off, d).dot(v.segment(off, d));
    for (int i = 1; i < d; ++i) out[off + i] = u[off] * v[off + i] + v[off] * u[off + i];
    off += d;
  }
  return out;
}

// Solves u o x = v for x.
Eigen::VectorXd cone_division(const ConeDims& k, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  Eigen::VectorXd out(u.size());
  for (int i = 0; i < k.nonneg; ++i) out[i] = v[i] / u[i];
  int off = k.nonneg;
  for (int d : k.soc) {
    const double u0 = u[off];
    double u1v1 = 0.0;
    for (int i = 1; i < d; ++i) u1v1 += u[off + i] * v[off + i];
    const double rho = soc_residual(u.data() + off, d);
    const double x0 = (u0 * v[off] - u1v1) / rho;
    out[off] = x0;
    for (int i = 1; i < d; ++i) out[off + i] = (v[off + i] - u[off + i] * x0) / u0;
    off += d;
  }
  return out;
}

double max_step(const ConeDims& k, const Eigen::VectorXd& u, const Eigen::VectorXd& du) {
  double alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k.nonneg; ++i) {
    if (du[i] < 0.0) alpha = std::min(alpha, -u[i] / du[i]);
  }
  int off = k.nonneg;
  for (int d : k.soc) {
    const double u0 = u[off], d0 = du[off];
    double a = d0 * d0, b = u0 * d0, c = u0 * u0;
    for (int i = 1; i < d; ++i) {
      a -= du[off + i] * du[off + i];
      b -= u[off + i] * du[off + i];
      c -= u[off + i] * u[off + i];
    }
    // f(t) = a t^2 + 2 b t + c, c > 0; find the first positive root.
    double t = std::numeric_limits<double>::infinity();
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    if (std::abs(a) <= 1e-14 * scale) {
      if (b < 0.0) t = -c / (2.0 * b);
    } else {
      const double disc = b * b - a * c;
      if (disc >= 0.0) {
        const double q = -(b + std::copysign(std::sqrt(disc), b));
        const double r1 = q / a;
        const double r2 = (q != 0.0) ? c / q : std::numeric_limits<double>::infinity();
        for (double r : {r1, r2}) {
          if (r > 0.0) t = std::min(t, r);
        }
      }
    }
    if (d0 < 0.0) t = std::min(t, -u0 / d0);
    alpha = std::min(alpha, std::max(t, 0.0));
    off += d;
  }
  return alpha;
}

}  // namespace detail
}  // namespace acots
