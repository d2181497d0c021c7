#include "forge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "forge/error.hpp"
#include "forge/kernels.hpp"
#include "forge/random.hpp"

namespace forge::linalg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Block {
  std::size_t begin;
  std::size_t size;
};

// k-th smallest (0-based) eigenvalue of one unreduced block by bisection.
double bisect(const std::vector<double>& diag, const std::vector<double>& off, std::size_t k,
              double lo, double hi, double abs_tol) {
  for (int iter = 0; iter < 200 && hi - lo > abs_tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(diag, off, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// LU factorization with partial pivoting of a shifted tridiagonal matrix,
// laid out like LAPACK's dgttrf.
struct TridiagonalLu {
  std::vector<double> dl, d, du, du2;
  std::vector<bool> swapped;

  TridiagonalLu(std::span<const double> diag, std::span<const double> off, double shift,
                double tiny) {
    const std::size_t n = diag.size();
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = diag[i] - shift;
    dl.assign(off.begin(), off.end());
    du.assign(off.begin(), off.end());
    du2.assign(n > 2 ? n - 2 : 0, 0.0);
    swapped.assign(n > 0 ? n - 1 : 0, false);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) d[i] = tiny;
        const double fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = true;
      }
    }
    for (double& v : d)
      if (std::abs(v) < tiny) v = std::copysign(tiny, v == 0.0 ? 1.0 : v);
  }

  void solve(std::span<double> b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) {
        const double temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl[i] * b[i];
      } else {
        b[i + 1] -= dl[i] * b[i];
      }
    }
    b[n - 1] /= d[n - 1];
    if (n >= 2) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t i = n - 2; i-- > 0;)
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
  }
};

double residual(std::span<const double> diag, std::span<const double> off, double lambda,
                std::span<const double> x) {
  const std::size_t n = diag.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = (diag[i] - lambda) * x[i];
    if (i > 0) r += off[i - 1] * x[i - 1];
    if (i + 1 < n) r += off[i] * x[i + 1];
    acc += r * r;
  }
  return std::sqrt(acc);
}

void normalize(std::span<double> x) {
  const double norm = std::sqrt(kernels::dot(x, x));
  if (norm > 0.0) kernels::scale(1.0 / norm, x);
}

void orthogonalize(std::span<double> x, const std::vector<std::vector<double>>& basis) {
  // two passes of modified Gram-Schmidt
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) kernels::axpy(-kernels::dot(q, x), q, x);
}

}  // namespace

std::size_t sturm_count(const std::vector<double>& diag, const std::vector<double>& off, double x) {
  std::size_t count = 0;
  double q = 1.0;
  const double pivmin = std::numeric_limits<double>::min() * 4;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double e2 = i > 0 ? off[i - 1] * off[i - 1] : 0.0;
    q = diag[i] - x - (i > 0 ? e2 / q : 0.0);
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

EigenPairs smallest_eigenpairs(const Eigen::MatrixXd& symmetric, std::size_t count,
                               std::uint64_t seed, double tolerance) {
  const auto n = static_cast<std::size_t>(symmetric.rows());
  count = std::min(count, n);
  EigenPairs out;
  out.vectors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(count));
  if (count == 0) return out;
  if (n == 1) {
    out.values = {symmetric(0, 0)};
    out.vectors(0, 0) = 1.0;
    return out;
  }

  Eigen::Tridiagonalization<Eigen::MatrixXd> tri(symmetric);
  std::vector<double> diag(n), off(n - 1);
  for (std::size_t i = 0; i < n; ++i) diag[i] = tri.diagonal()(static_cast<Eigen::Index>(i));
  for (std::size_t i = 0; i + 1 < n; ++i) off[i] = tri.subDiagonal()(static_cast<Eigen::Index>(i));

  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(diag[i]);
    if (i > 0) row += std::abs(off[i - 1]);
    if (i + 1 < n) row += std::abs(off[i]);
    norm = std::max(norm, row);
  }
  const double scale = norm > 0.0 ? norm : 1.0;

  // Split at negligible off-diagonals into unreduced blocks.
  std::vector<Block> blocks;
  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(off[i]) <= 2.0 * kEps * scale) {
      off[i] = 0.0;
      blocks.push_back({start, i + 1 - start});
      start = i + 1;
    }
  }
  blocks.push_back({start, n - start});

  struct Candidate {
    double value;
    std::size_t block;
    std::size_t rank;
  };
  std::vector<Candidate> candidates;
  const double abs_tol = 4.0 * kEps * scale;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto [begin, size] = blocks[b];
    std::vector<double> bd(diag.begin() + begin, diag.begin() + begin + size);
    std::vector<double> be(off.begin() + begin, off.begin() + begin + size - 1);
    double lo = bd[0], hi = bd[0];
    for (std::size_t i = 0; i < size; ++i) {
      double radius = (i > 0 ? std::abs(be[i - 1]) : 0.0) + (i + 1 < size ? std::abs(be[i]) : 0.0);
      lo = std::min(lo, bd[i] - radius);
      hi = std::max(hi, bd[i] + radius);
    }
    lo -= abs_tol;
    hi += abs_tol;
    const std::size_t wanted = std::min(count, size);
    for (std::size_t k = 0; k < wanted; ++k)
      candidates.push_back({bisect(bd, be, k, lo, hi, abs_tol), b, k});
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.block != b.block) return a.block < b.block;
    return a.rank < b.rank;
  });
  candidates.resize(count);

  Eigen::MatrixXd tri_vectors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                       static_cast<Eigen::Index>(count));
  std::vector<std::vector<std::vector<double>>> found(blocks.size());
  const double tiny = kEps * scale;
  for (std::size_t c = 0; c < count; ++c) {
    const auto& cand = candidates[c];
    const auto [begin, size] = blocks[cand.block];
    std::span<const double> bd(diag.data() + begin, size);
    std::span<const double> be(off.data() + begin, size - 1);
    std::vector<double> x(size);
    if (size == 1) {
      x[0] = 1.0;
    } else {
      Rng rng({seed, cand.block, cand.rank});
      for (double& v : x) v = rng.unit() - 0.5;
      TridiagonalLu lu(bd, be, cand.value, tiny);
      double res = std::numeric_limits<double>::infinity();
      for (int iter = 0; iter < 10; ++iter) {
        orthogonalize(x, found[cand.block]);
        normalize(x);
        lu.solve(x);
        orthogonalize(x, found[cand.block]);
        normalize(x);
        res = residual(bd, be, cand.value, x);
        if (iter >= 1 && res <= tolerance * scale) break;
      }
      if (!(res <= 1e-6 * scale))
        throw Error(ErrorKind::NonConvergence, "collab",
                    "inverse iteration residual " + std::to_string(res) + " for eigenvalue " +
                        std::to_string(cand.value));
    }
    for (std::size_t i = 0; i < size; ++i)
      tri_vectors(static_cast<Eigen::Index>(begin + i), static_cast<Eigen::Index>(c)) = x[i];
    found[cand.block].push_back(std::move(x));
    out.values.push_back(cand.value);
  }

  out.vectors = tri.matrixQ() * tri_vectors;
  return out;
}

}  // namespace forge::linalg
