#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "quatmark/errors.hpp"
#include "quatmark/qsvd.hpp"

namespace quatmark {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// m[:, i] <- c m[:, i] + s m[:, j];  m[:, j] <- -s m[:, i] + c m[:, j]
void rotate_columns(RealMatrix& m, std::size_t i, std::size_t j, double c, double s) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double a = m(r, i);
    const double b = m(r, j);
    m(r, i) = c * a + s * b;
    m(r, j) = -s * a + c * b;
  }
}

// (c, s, r) with c f + s g = r and -s f + c g = 0.
struct Rotation {
  double c = 1.0;
  double s = 0.0;
  double r = 0.0;
};

Rotation make_rotation(double f, double g) {
  if (g == 0.0) return {1.0, 0.0, f};
  const double r = std::hypot(f, g);
  return {f / r, g / r, r};
}

class BidiagonalQr {
 public:
  BidiagonalQr(std::vector<double> d, std::vector<double> e)
      : n_(d.size()), d_(std::move(d)), e_(std::move(e)), u_(RealMatrix::identity(n_)), v_(RealMatrix::identity(n_)) {
    for (double x : d_) anorm_ = std::max(anorm_, std::abs(x));
    for (double x : e_) anorm_ = std::max(anorm_, std::abs(x));
  }

  void run() {
    if (n_ <= 1) return;
    const std::size_t max_sweeps = 75 * n_ * n_;
    std::size_t sweeps = 0;
    for (;;) {
      deflate();
      std::size_t hi = n_ - 1;
      while (hi > 0 && e_[hi - 1] == 0.0) --hi;
      if (hi == 0) return;
      std::size_t lo = hi - 1;
      while (lo > 0 && e_[lo - 1] != 0.0) --lo;
      if (chase_zero_diagonal(lo, hi)) continue;
      if (++sweeps > max_sweeps) throw InvariantError("real_bidiagonal_svd: no convergence");
      qr_sweep(lo, hi);
    }
  }

  std::vector<double>& d() { return d_; }
  RealMatrix& u() { return u_; }
  RealMatrix& v() { return v_; }

 private:
  void deflate() {
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      const double scale = std::abs(d_[i]) + std::abs(d_[i + 1]);
      if (std::abs(e_[i]) <= kEps * scale || std::abs(e_[i]) <= std::numeric_limits<double>::min()) e_[i] = 0.0;
    }
  }

  bool negligible(double x) const { return std::abs(x) <= kEps * anorm_; }

  bool chase_zero_diagonal(std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      if (!negligible(d_[i])) continue;
      // Row i holds only e_i; push it right with left rotations until it leaves.
      d_[i] = 0.0;
      double f = e_[i];
      e_[i] = 0.0;
      for (std::size_t j = i + 1; j <= hi && f != 0.0; ++j) {
        const Rotation rot = make_rotation(d_[j], f);
        d_[j] = rot.r;
        if (j < hi) {
          f = -rot.s * e_[j];
          e_[j] = rot.c * e_[j];
        }
        rotate_columns(u_, j, i, rot.c, rot.s);
      }
      return true;
    }
    if (negligible(d_[hi])) {
      // Column hi holds only e_{hi-1}; push it up with right rotations.
      d_[hi] = 0.0;
      double f = e_[hi - 1];
      e_[hi - 1] = 0.0;
      for (std::size_t j = hi; j-- > lo && f != 0.0;) {
        const Rotation rot = make_rotation(d_[j], f);
        d_[j] = rot.r;
        if (j > lo) {
          f = -rot.s * e_[j - 1];
          e_[j - 1] = rot.c * e_[j - 1];
        }
        rotate_columns(v_, j, hi, rot.c, rot.s);
      }
      return true;
    }
    return false;
  }

  double wilkinson_shift(std::size_t lo, std::size_t hi) const {
    const double dm = d_[hi - 1];
    const double dn = d_[hi];
    const double em = e_[hi - 1];
    const double emm = hi - 1 > lo ? e_[hi - 2] : 0.0;
    const double a = dm * dm + emm * emm;
    const double b = dm * em;
    const double c = dn * dn + em * em;
    const double delta = (a - c) / 2.0;
    if (delta == 0.0 && b == 0.0) return c;
    const double denom = delta + std::copysign(std::hypot(delta, b), delta);
    return c - b * b / denom;
  }

  void qr_sweep(std::size_t lo, std::size_t hi) {
    const double mu = wilkinson_shift(lo, hi);
    double y = d_[lo] * d_[lo] - mu;
    double z = d_[lo] * e_[lo];
    for (std::size_t k = lo; k < hi; ++k) {
      Rotation rot = make_rotation(y, z);
      if (k > lo) e_[k - 1] = rot.r;
      const double dk = rot.c * d_[k] + rot.s * e_[k];
      const double ek = -rot.s * d_[k] + rot.c * e_[k];
      const double bulge = rot.s * d_[k + 1];
      const double dk1 = rot.c * d_[k + 1];
      rotate_columns(v_, k, k + 1, rot.c, rot.s);

      rot = make_rotation(dk, bulge);
      d_[k] = rot.r;
      e_[k] = rot.c * ek + rot.s * dk1;
      d_[k + 1] = -rot.s * ek + rot.c * dk1;
      if (k + 1 < hi) {
        z = rot.s * e_[k + 1];
        e_[k + 1] = rot.c * e_[k + 1];
      }
      y = e_[k];
      rotate_columns(u_, k, k + 1, rot.c, rot.s);
    }
  }

  std::size_t n_;
  std::vector<double> d_;
  std::vector<double> e_;
  RealMatrix u_;
  RealMatrix v_;
  double anorm_ = 0.0;
};

}  // namespace

RealSvd real_bidiagonal_svd(const RealMatrix& b) {
  const std::size_t m = b.rows();
  const std::size_t n = b.cols();
  if (m < n) throw DimensionError("real_bidiagonal_svd: expects rows >= cols");

  std::vector<double> d(n);
  std::vector<double> e(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) d[i] = b(i, i);
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = b(i, i + 1);

  BidiagonalQr qr(std::move(d), std::move(e));
  qr.run();

  std::vector<double>& dv = qr.d();
  RealMatrix& un = qr.u();
  RealMatrix& vn = qr.v();
  for (std::size_t i = 0; i < n; ++i)
    if (dv[i] < 0.0) {
      dv[i] = -dv[i];
      for (std::size_t r = 0; r < n; ++r) vn(r, i) = -vn(r, i);
    }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return dv[a] > dv[c]; });

  RealSvd out{RealMatrix::identity(m), std::vector<double>(n), RealMatrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.d[j] = dv[src];
    for (std::size_t r = 0; r < n; ++r) {
      out.u(r, j) = un(r, src);
      out.v(r, j) = vn(r, src);
    }
  }
  return out;
}

}  // namespace quatmark
