#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "quatmark/op_ledger.hpp"
#include "quatmark/quaternion.hpp"

namespace quatmark {

struct BidiagOptions {
  /// Substitute the generalized Givens rotation for the last two H3 sites.
  /// false gives the H3-only pipeline.
  bool use_givens = true;
};

/// Q = U_acc * B * V_acc^H with B real upper bidiagonal (m >= n).
struct BidiagResult {
  RealMatrix b;        // m x n
  CompactReal u_acc;   // m x m, row variant
  CompactReal v_acc;   // n x n, column variant
  std::size_t givens_substitutions = 0;
};

/// Alternating left/right reduction of an m x n quaternion matrix, m >= n.
/// Sequence for 4x4: H3 left, H3 right, H3 left, Givens right, Givens left,
/// phase right, phase left. Throws FormatError for an empty matrix and
/// DimensionError for m < n.
BidiagResult bidiagonalize(const QuatMatrix& q, OpLedger* ledger = nullptr, const BidiagOptions& options = {});

/// B = u * diag(d) * v^T, d nonnegative and descending.
struct RealSvd {
  RealMatrix u;  // m x m
  std::vector<double> d;  // min(m, n)
  RealMatrix v;  // n x n
};

/// Implicit-shift Golub-Kahan SVD of a real upper-bidiagonal m x n matrix
/// (m >= n; entries off the two diagonals are ignored).
RealSvd real_bidiagonal_svd(const RealMatrix& b);

struct QsvdFactors {
  QuatMatrix u;           // m x m
  std::vector<double> s;  // min(m, n), descending
  QuatMatrix v;           // n x n
};

/// Full quaternion SVD Q = U diag(S) V^H. Column j of U and V share a unit
/// right phase chosen so that the first nonzero entry of V's column j is
/// real and positive.
QsvdFactors qsvd(const QuatMatrix& q, OpLedger* ledger = nullptr, const BidiagOptions& options = {});

/// U_k diag(S) V_k^H for k = S.size().
QuatMatrix reconstruct(const QsvdFactors& f);
/// ||Q - U diag(S) V^H||_F
double residual(const QuatMatrix& q, const QsvdFactors& f);
/// ||M^H M - I||_F
double unitarity_error(const QuatMatrix& m);

/// Random matrix with components uniform on [0, 1).
QuatMatrix random_quat_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

struct BenchRow {
  std::size_t k = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  std::uint64_t wall_ns = 0;       // best of the trials
  std::uint64_t flops = 0;         // calibrated ledger total
  std::uint64_t assignments = 0;   // calibrated ledger total
  double residual = 0.0;           // ||Q - U S V^H||_F
  std::uint64_t bidiag_arith_flops = 0;  // arithmetic on the working matrix
};

/// For k = 1..k_max, timed qsvd of a random (a k) x (b k) matrix.
/// Throws PreconditionError if k_max, a, b or trials is zero.
std::vector<BenchRow> bench_qsvd(std::size_t a, std::size_t b, std::size_t k_max, std::size_t trials,
                                 std::uint64_t seed = 1, const BidiagOptions& options = {});

/// Header `k,m,n,wall_ns,flops,assignments,residual`.
void write_bench_csv(std::ostream& os, std::span<const BenchRow> rows);

}  // namespace quatmark
