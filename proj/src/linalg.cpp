#include "stirlab/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace stirlab {

namespace smallmat {

void multiply(const double* a, const double* b, double* out, int n) {
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += a[r * n + k] * b[k * n + c];
      out[r * n + c] = s;
    }
}

void invert(double* a, int n) {
  std::vector<double> inv(n * n, 0.0);
  for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (a[piv * n + col] == 0.0) throw std::runtime_error("singular block");
    if (piv != col)
      for (int c = 0; c < n; ++c) {
        std::swap(a[piv * n + c], a[col * n + c]);
        std::swap(inv[piv * n + c], inv[col * n + c]);
      }
    double d = 1.0 / a[col * n + col];
    for (int c = 0; c < n; ++c) {
      a[col * n + c] *= d;
      inv[col * n + c] *= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r * n + col];
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        a[r * n + c] -= f * a[col * n + c];
        inv[r * n + c] -= f * inv[col * n + c];
      }
    }
  }
  for (int i = 0; i < n * n; ++i) a[i] = inv[i];
}

void apply(const double* a, const double* x, double* y, int n) {
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (int c = 0; c < n; ++c) s += a[r * n + c] * x[c];
    y[r] = s;
  }
}

}  // namespace smallmat

std::vector<double> cyclic_tridiagonal_solve(double sub, double diag, double sup,
                                             const std::vector<double>& rhs) {
  std::size_t m = rhs.size();
  if (m < 3) throw std::invalid_argument("cyclic solve needs >= 3 unknowns");

  auto thomas = [&](double d0, double dl, const std::vector<double>& r) {
    std::vector<double> c(m), x(m);
    double d = d0;
    c[0] = sup / d;
    x[0] = r[0] / d;
    for (std::size_t i = 1; i < m; ++i) {
      double di = (i == m - 1) ? dl : diag;
      d = di - sub * c[i - 1];
      c[i] = sup / d;
      x[i] = (r[i] - sub * x[i - 1]) / d;
    }
    for (std::size_t i = m - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    return x;
  };

  // Sherman-Morrison removal of the two corner entries
  double gamma = -diag;
  double d0 = diag - gamma;
  double dl = diag - sup * sub / gamma;
  std::vector<double> u(m, 0.0);
  u[0] = gamma;
  u[m - 1] = sup;
  std::vector<double> x = thomas(d0, dl, rhs);
  std::vector<double> z = thomas(d0, dl, u);
  double vx = x[0] + sub / gamma * x[m - 1];
  double vz = z[0] + sub / gamma * z[m - 1];
  double f = vx / (1.0 + vz);
  for (std::size_t i = 0; i < m; ++i) x[i] -= f * z[i];
  return x;
}

BlockCyclicTridiag::BlockCyclicTridiag(std::size_t blocks, int block_size)
    : m_(blocks), n_(static_cast<std::size_t>(block_size)),
      lower_(blocks * n_ * n_, 0.0), diag_(blocks * n_ * n_, 0.0),
      upper_(blocks * n_ * n_, 0.0) {
  if (blocks < 3) throw std::invalid_argument("block cyclic solve needs >= 3 blocks");
  if (block_size < 1) throw std::invalid_argument("block size must be >= 1");
}

void BlockCyclicTridiag::thomas(const std::vector<double>& rhs, std::size_t n_rhs,
                               std::vector<double>& out) const {
  const int n = static_cast<int>(n_);
  std::vector<double> cprime(m_ * n_ * n_);
  std::vector<double> g(m_ * n_ * n_rhs);
  std::vector<double> denom(n_ * n_), tmp(n_ * n_), vec(n_);

  // forward sweep; the acyclic band drops lower(0) and upper(m-1)
  for (std::size_t i = 0; i < n_ * n_; ++i) denom[i] = diag_[i];
  smallmat::invert(denom.data(), n);
  smallmat::multiply(denom.data(), upper_.data(), cprime.data(), n);
  for (std::size_t r = 0; r < n_rhs; ++r)
    smallmat::apply(denom.data(), rhs.data() + r * m_ * n_, g.data() + r * m_ * n_, n);

  for (std::size_t j = 1; j < m_; ++j) {
    smallmat::multiply(lower_.data() + j * n_ * n_, cprime.data() + (j - 1) * n_ * n_,
                       tmp.data(), n);
    for (std::size_t i = 0; i < n_ * n_; ++i) denom[i] = diag_[j * n_ * n_ + i] - tmp[i];
    smallmat::invert(denom.data(), n);
    smallmat::multiply(denom.data(), upper_.data() + j * n_ * n_,
                       cprime.data() + j * n_ * n_, n);
    for (std::size_t r = 0; r < n_rhs; ++r) {
      const double* gprev = g.data() + r * m_ * n_ + (j - 1) * n_;
      const double* bj = rhs.data() + r * m_ * n_ + j * n_;
      smallmat::apply(lower_.data() + j * n_ * n_, gprev, vec.data(), n);
      for (int i = 0; i < n; ++i) vec[i] = bj[i] - vec[i];
      smallmat::apply(denom.data(), vec.data(), g.data() + r * m_ * n_ + j * n_, n);
    }
  }

  // back substitution
  out.assign(n_rhs * m_ * n_, 0.0);
  for (std::size_t r = 0; r < n_rhs; ++r) {
    double* x = out.data() + r * m_ * n_;
    const double* gr = g.data() + r * m_ * n_;
    for (std::size_t i = 0; i < n_; ++i) x[(m_ - 1) * n_ + i] = gr[(m_ - 1) * n_ + i];
    for (std::size_t j = m_ - 1; j-- > 0;) {
      smallmat::apply(cprime.data() + j * n_ * n_, x + (j + 1) * n_, vec.data(), n);
      for (std::size_t i = 0; i < n_; ++i) x[j * n_ + i] = gr[j * n_ + i] - vec[i];
    }
  }
}

std::vector<double> BlockCyclicTridiag::solve(const std::vector<double>& rhs) const {
  if (rhs.size() != m_ * n_) throw std::invalid_argument("rhs size mismatch");
  const int n = static_cast<int>(n_);
  const std::size_t stride = m_ * n_;

  // right-hand sides: b, then the 2n columns of P (identity blocks at rows 0
  // and m-1); corners enter through Q^T = [L_0 at block m-1; U_{m-1} at block 0]
  std::size_t n_rhs = 1 + 2 * n_;
  std::vector<double> packed(n_rhs * stride, 0.0);
  for (std::size_t i = 0; i < stride; ++i) packed[i] = rhs[i];
  for (std::size_t c = 0; c < n_; ++c) {
    packed[(1 + c) * stride + 0 * n_ + c] = 1.0;                 // P column c
    packed[(1 + n_ + c) * stride + (m_ - 1) * n_ + c] = 1.0;     // P column n+c
  }

  std::vector<double> sol;
  thomas(packed, n_rhs, sol);

  const double* yb = sol.data();
  // S = I + Q^T T^{-1} P, of size 2n
  std::vector<double> s(4 * n_ * n_, 0.0);
  std::vector<double> qy(2 * n_, 0.0);
  auto fill = [&](const double* col, double* out_col) {
    // Q^T y: top rows apply L_0 to block m-1, bottom rows apply U_{m-1} to block 0
    std::vector<double> top(n_), bot(n_);
    smallmat::apply(lower_.data(), col + (m_ - 1) * n_, top.data(), n);
    smallmat::apply(upper_.data() + (m_ - 1) * n_ * n_, col, bot.data(), n);
    for (std::size_t i = 0; i < n_; ++i) {
      out_col[i] = top[i];
      out_col[n_ + i] = bot[i];
    }
  };
  fill(yb, qy.data());
  std::vector<double> col(2 * n_);
  for (std::size_t c = 0; c < 2 * n_; ++c) {
    fill(sol.data() + (1 + c) * stride, col.data());
    for (std::size_t rr = 0; rr < 2 * n_; ++rr) s[rr * 2 * n_ + c] = col[rr];
    s[c * 2 * n_ + c] += 1.0;
  }
  std::vector<double> coeff = dense_solve(s, qy);

  std::vector<double> x(stride);
  for (std::size_t i = 0; i < stride; ++i) {
    double corr = 0.0;
    for (std::size_t c = 0; c < 2 * n_; ++c) corr += sol[(1 + c) * stride + i] * coeff[c];
    x[i] = yb[i] - corr;
  }
  return x;
}

std::vector<double> BlockCyclicTridiag::dense() const {
  const std::size_t dim = m_ * n_;
  std::vector<double> a(dim * dim, 0.0);
  auto put = [&](std::size_t jr, std::size_t jc, const std::vector<double>& blk,
                 std::size_t j) {
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t c = 0; c < n_; ++c)
        a[(jr * n_ + r) * dim + jc * n_ + c] += blk[(j * n_ + r) * n_ + c];
  };
  for (std::size_t j = 0; j < m_; ++j) {
    put(j, j, diag_, j);
    put(j, (j + 1) % m_, upper_, j);
    put(j, (j + m_ - 1) % m_, lower_, j);
  }
  return a;
}

std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
  std::size_t n = b.size();
  if (a.size() != n * n) throw std::invalid_argument("matrix/vector size mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (a[piv * n + col] == 0.0) throw std::runtime_error("singular dense system");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    double d = 1.0 / a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a[r * n + col] * d;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i * n + c] * b[c];
    b[i] = s / a[i * n + i];
  }
  return b;
}

}  // namespace stirlab
