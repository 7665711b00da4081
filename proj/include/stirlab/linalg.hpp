#pragma once

#include <cstddef>
#include <vector>

namespace stirlab {

/// Dense column-major-free small matrix helpers (row-major, n x n).
namespace smallmat {

// out = a * b
void multiply(const double* a, const double* b, double* out, int n);
// in-place Gauss-Jordan inverse with partial pivoting; throws when singular
void invert(double* a, int n);
// y = a * x
void apply(const double* a, const double* x, double* y, int n);

}  // namespace smallmat

/// Solve the periodic tridiagonal system with constant bands
///   sub * x[i-1] + diag * x[i] + sup * x[i+1] = rhs[i]   (indices mod M)
/// via the Thomas algorithm plus a Sherman-Morrison corner correction.
std::vector<double> cyclic_tridiagonal_solve(double sub, double diag, double sup,
                                             const std::vector<double>& rhs);

/// Block cyclic tridiagonal system with n x n blocks: row j couples to
/// j-1, j, j+1 (mod M). Blocks are row-major. Solved by block LU on the
/// acyclic part and a rank-2n Woodbury correction for the corner blocks.
class BlockCyclicTridiag {
 public:
  BlockCyclicTridiag(std::size_t blocks, int block_size);

  double& lower(std::size_t j, int r, int c) { return lower_[entry(j, r, c)]; }
  double& diag(std::size_t j, int r, int c) { return diag_[entry(j, r, c)]; }
  double& upper(std::size_t j, int r, int c) { return upper_[entry(j, r, c)]; }

  // rhs and solution are laid out block by block
  std::vector<double> solve(const std::vector<double>& rhs) const;

  // dense copy, for small-system cross checks
  std::vector<double> dense() const;

 private:
  std::size_t entry(std::size_t j, int r, int c) const {
    return (j * n_ + static_cast<std::size_t>(r)) * n_ + static_cast<std::size_t>(c);
  }
  void thomas(const std::vector<double>& rhs, std::size_t n_rhs,
              std::vector<double>& out) const;

  std::size_t m_;
  std::size_t n_;
  std::vector<double> lower_, diag_, upper_;
};

/// Dense Gaussian elimination with partial pivoting (small systems only).
std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b);

}  // namespace stirlab
