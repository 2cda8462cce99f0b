#pragma once

// Spectral kernels behind the codecs: symmetric/skew splitting, cyclic
// Jacobi eigendecomposition, one-sided Jacobi SVD, and rank-k truncation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "nmc/error.hpp"
#include "nmc/matrix.hpp"

namespace nmc {

struct SymSpectrum {
  std::size_t order = 0;
  std::vector<double> values;  // descending |value|, ties by signed value
  Matrix vectors;              // row i is the unit eigenvector for values[i]
};

struct SkewPair {
  double mu = 0.0;           // the pair carries eigenvalues +-i*mu
  std::vector<double> p, q;  // C p = mu q, C q = -mu p
};

struct SkewSpectrum {
  std::size_t order = 0;
  std::vector<SkewPair> pairs;  // mu descending, exactly floor(order/2) pairs
};

struct SvdFactors {
  std::size_t order = 0;
  std::vector<double> sigma;  // descending, nonnegative
  Matrix u;                   // row i is the i-th left singular vector
  Matrix v;                   // row i is the i-th right singular vector
};

namespace detail {

inline void require_square(const Matrix& m, const char* who) {
  if (!m.square()) throw DimensionError(std::string(who) + ": matrix must be square");
}

inline double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Smaller-magnitude root of t^2 + 2*tau*t - 1 = 0: the rotation closest to
// the identity that zeroes the targeted entry.
inline double jacobi_tangent(double tau) {
  const double root = std::sqrt(1.0 + tau * tau);
  return tau >= 0.0 ? 1.0 / (tau + root) : -1.0 / (-tau + root);
}

// Cyclic one-sided Jacobi: right plane rotations make the rows of g
// mutually orthogonal, accumulating into w. Row-only updates keep every
// memory access contiguous.
inline void one_sided_jacobi(Matrix& g, Matrix& w, const char* who) {
  const std::size_t n = g.rows();
  const std::size_t m = g.cols();
  w = Matrix::identity(n);
  constexpr double rel = 1e-14;
  constexpr std::size_t max_sweeps = 30;
  // Rows below this norm are numerically zero. Rotating them against real
  // rows cycles rounding junk forever (their norm only shrinks under the
  // sort-enhancing tangent), so such pairs are skipped outright.
  const double floor2 = rel * rel * g.frobenius_norm() * g.frobenius_norm();
  bool clean_sweep = false;
  for (std::size_t sweep = 0; sweep < max_sweeps && !clean_sweep; ++sweep) {
    clean_sweep = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double* gp = g.row(p);
        double* gq = g.row(q);
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          alpha += gp[j] * gp[j];
          beta += gq[j] * gq[j];
          gamma += gp[j] * gq[j];
        }
        if (gamma == 0.0 || alpha <= floor2 || beta <= floor2) continue;
        if (std::abs(gamma) <= rel * std::sqrt(alpha * beta)) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = jacobi_tangent(zeta);
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t j = 0; j < m; ++j) {
          const double x = gp[j], y = gq[j];
          gp[j] = c * x - s * y;
          gq[j] = s * x + c * y;
        }
        double* wp = w.row(p);
        double* wq = w.row(q);
        for (std::size_t j = 0; j < n; ++j) {
          const double x = wp[j], y = wq[j];
          wp[j] = c * x - s * y;
          wq[j] = s * x + c * y;
        }
        clean_sweep = false;
      }
    }
  }
  if (!clean_sweep) {
    double worst = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          alpha += g(p, j) * g(p, j);
          beta += g(q, j) * g(q, j);
          gamma += g(p, j) * g(q, j);
        }
        if (alpha > floor2 && beta > floor2)
          worst = std::max(worst, std::abs(gamma) / std::sqrt(alpha * beta));
      }
    if (worst > rel)
      throw ConvergenceError(std::string(who) + ": one-sided Jacobi sweeps exhausted", worst);
  }
}

inline std::vector<double> row_norms(const Matrix& g) {
  std::vector<double> out(g.rows());
  for (std::size_t i = 0; i < g.rows(); ++i) {
    double s = 0.0;
    const double* r = g.row(i);
    for (std::size_t j = 0; j < g.cols(); ++j) s += r[j] * r[j];
    out[i] = std::sqrt(s);
  }
  return out;
}

inline std::vector<std::size_t> descending_order(const std::vector<double>& vals) {
  std::vector<std::size_t> idx(vals.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
  return idx;
}

}  // namespace detail

inline Matrix symmetric_part(const Matrix& x) {
  detail::require_square(x, "symmetric_part");
  const std::size_t n = x.rows();
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    b(i, i) = x(i, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (x(i, j) + x(j, i));
      b(i, j) = v;
      b(j, i) = v;
    }
  }
  return b;
}

inline Matrix skew_symmetric_part(const Matrix& x) {
  detail::require_square(x, "skew_symmetric_part");
  const std::size_t n = x.rows();
  Matrix c(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (x(i, j) - x(j, i));
      c(i, j) = v;
      c(j, i) = -v;
    }
  return c;
}

// Eigendecomposition of a symmetric matrix by cyclic two-sided Jacobi.
// Sweeps run in fixed row-major pair order with a deterministic skip
// threshold, capped at 30 sweeps; convergence is off(A) <= 1e-12 * ||B||_F.
inline SymSpectrum eig_symmetric(const Matrix& b) {
  detail::require_square(b, "eig_symmetric");
  const std::size_t n = b.rows();
  const double fnorm = b.frobenius_norm();
  const double scale = std::max(1.0, fnorm);
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      asym = std::max(asym, std::abs(b(i, j) - b(j, i)));
  if (asym > 1e-12 * scale)
    throw ContractError("eig_symmetric: input is not symmetric");

  Matrix a = b;
  Matrix w = Matrix::identity(n);
  const double tol = 1e-12 * fnorm;
  // A full sweep of skipped entries leaves off(A) <= n * skip = tol / 2.
  const double skip = n > 0 ? tol / (2.0 * double(n)) : 0.0;
  constexpr std::size_t max_sweeps = 30;
  bool converged = false;
  double off = 0.0;
  for (std::size_t sweep = 0; sweep <= max_sweeps; ++sweep) {
    off = detail::off_diagonal_norm(a);
    if (off <= tol) {
      converged = true;
      break;
    }
    if (sweep == max_sweeps) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= skip) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = detail::jacobi_tangent(tau);
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double app = a(p, p), aqq = a(q, q);
        double* rp = a.row(p);
        double* rq = a.row(q);
        for (std::size_t j = 0; j < n; ++j) {
          const double x = rp[j], y = rq[j];
          rp[j] = c * x - s * y;
          rq[j] = s * x + c * y;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const double x = a(j, p), y = a(j, q);
          a(j, p) = c * x - s * y;
          a(j, q) = s * x + c * y;
        }
        // The 2x2 corner analytically, from pre-rotation values; keeps the
        // zeroed entry exactly zero and the matrix exactly symmetric.
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        double* wp = w.row(p);
        double* wq = w.row(q);
        for (std::size_t j = 0; j < n; ++j) {
          const double x = wp[j], y = wq[j];
          wp[j] = c * x - s * y;
          wq[j] = s * x + c * y;
        }
      }
    }
  }
  if (!converged)
    throw ConvergenceError("eig_symmetric: Jacobi sweeps exhausted", off);

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) {
    const double ml = std::abs(a(l, l)), mr = std::abs(a(r, r));
    if (ml != mr) return ml > mr;
    return a(l, l) > a(r, r);
  });
  SymSpectrum out;
  out.order = n;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = a(idx[i], idx[i]);
    const double* src = w.row(idx[i]);
    std::copy(src, src + n, out.vectors.row(i));
  }
  return out;
}

inline SvdFactors svd(const Matrix& x) {
  detail::require_square(x, "svd");
  const std::size_t n = x.rows();
  Matrix g = x.transposed();  // rows of g are the columns of x
  Matrix w(0, 0);
  detail::one_sided_jacobi(g, w, "svd");

  const std::vector<double> norms = detail::row_norms(g);
  const std::vector<std::size_t> idx = detail::descending_order(norms);

  SvdFactors f;
  f.order = n;
  f.sigma.resize(n);
  f.u = Matrix(n, n);
  f.v = Matrix(n, n);
  const double tiny = 1e-13 * std::max(1.0, x.frobenius_norm());
  std::vector<std::size_t> deficient;
  std::vector<std::vector<double>> ubasis;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = idx[i];
    f.sigma[i] = norms[src];
    std::copy(w.row(src), w.row(src) + n, f.v.row(i));
    if (norms[src] > tiny) {
      double* u = f.u.row(i);
      for (std::size_t j = 0; j < n; ++j) u[j] = g(src, j) / norms[src];
      ubasis.emplace_back(u, u + n);
    } else {
      deficient.push_back(i);
    }
  }
  // Left vectors for (numerically) zero singular values: complete the
  // basis from the best-surviving standard basis vector, deterministically.
  for (std::size_t i : deficient) {
    std::vector<double> best;
    double best_norm = -1.0;
    for (std::size_t cand = 0; cand < n; ++cand) {
      std::vector<double> vec(n, 0.0);
      vec[cand] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& bvec : ubasis) {
          double d = 0.0;
          for (std::size_t j = 0; j < n; ++j) d += vec[j] * bvec[j];
          for (std::size_t j = 0; j < n; ++j) vec[j] -= d * bvec[j];
        }
      double nn = 0.0;
      for (double t : vec) nn += t * t;
      nn = std::sqrt(nn);
      if (nn > best_norm) {
        best_norm = nn;
        best = std::move(vec);
      }
    }
    for (auto& t : best) t /= best_norm;
    std::copy(best.begin(), best.end(), f.u.row(i));
    ubasis.push_back(std::move(best));
  }
  return f;
}

// Paired real decomposition of a skew-symmetric matrix. A skew C makes the
// SVD an eigendecomposition in disguise: eigenvalue pairs +-i*mu appear as
// doubled singular values mu with C v = mu u and C u = -mu v, so (p, q) =
// (v, u). Extracting through the one-sided SVD keeps full relative accuracy
// for small mu, which squaring into -C^2 would halve.
inline SkewSpectrum eig_skew(const Matrix& c) {
  detail::require_square(c, "eig_skew");
  const std::size_t n = c.rows();
  const double scale = std::max(1.0, c.frobenius_norm());
  double defect = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      defect = std::max(defect, std::abs(c(i, j) + c(j, i)));
  if (defect > 1e-12 * scale)
    throw ContractError("eig_skew: input is not skew-symmetric");

  Matrix g = c.transposed();
  Matrix w(0, 0);
  detail::one_sided_jacobi(g, w, "eig_skew");
  const std::vector<double> norms = detail::row_norms(g);
  const std::vector<std::size_t> idx = detail::descending_order(norms);
  const double zero_thr = 1e-10 * scale;

  // Each nonzero singular value belongs to a doubled couple spanning one
  // pair plane; the first member met claims the plane, its partner then
  // projects to nothing and is skipped. Null directions pair up with mu=0.
  std::vector<std::vector<double>> accepted;
  auto reduce = [&](std::vector<double>& vec) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& bvec : accepted) {
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) d += vec[j] * bvec[j];
        for (std::size_t j = 0; j < n; ++j) vec[j] -= d * bvec[j];
      }
    double nn = 0.0;
    for (double t : vec) nn += t * t;
    return std::sqrt(nn);
  };

  SkewSpectrum out;
  out.order = n;
  std::vector<std::vector<double>> nulls;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = idx[r];
    std::vector<double> p(w.row(i), w.row(i) + n);
    const double pn = reduce(p);
    if (pn < 0.5) continue;
    for (auto& t : p) t /= pn;
    if (norms[i] > zero_thr) {
      accepted.push_back(p);
      std::vector<double> q(n);
      const double* gi = g.row(i);
      for (std::size_t j = 0; j < n; ++j) q[j] = gi[j] / norms[i];
      const double qn = reduce(q);
      if (qn < 0.5) throw Error("eig_skew: pairing lost a partner vector");
      for (auto& t : q) t /= qn;
      accepted.push_back(q);
      out.pairs.push_back(SkewPair{norms[i], std::move(p), std::move(q)});
    } else {
      accepted.push_back(p);
      nulls.push_back(std::move(p));
    }
  }
  for (std::size_t j = 0; j + 1 < nulls.size(); j += 2)
    out.pairs.push_back(SkewPair{0.0, std::move(nulls[j]), std::move(nulls[j + 1])});
  if (out.pairs.size() != n / 2)
    throw Error("eig_skew: pairing produced a wrong pair count");
  return out;
}

inline Matrix truncate_sym(const SymSpectrum& s, std::size_t k) {
  const std::size_t n = s.order;
  if (k < 1 || k > n) throw ArgumentError("truncate_sym: k out of range");
  Matrix m(n, n);
  for (std::size_t t = 0; t < k; ++t) {
    const double lam = s.values[t];
    const double* u = s.vectors.row(t);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) m(i, j) += lam * u[i] * u[j];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(j, i) = m(i, j);
  return m;
}

// k counts complex rank-1 terms. A full pair contributes mu (q p^T - p q^T);
// odd k leaves a lone conjugate-pair member, whose real part is the same
// generator at half weight. Output is skew-symmetric by construction.
inline Matrix truncate_skew(const SkewSpectrum& s, std::size_t k) {
  const std::size_t n = s.order;
  if (k < 1 || k > n) throw ArgumentError("truncate_skew: k out of range");
  Matrix m(n, n);
  const std::size_t terms = std::min(k, 2 * s.pairs.size());
  const std::size_t whole = terms / 2;
  auto add_pair = [&](const SkewPair& pr, double wgt) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        m(i, j) += wgt * (pr.q[i] * pr.p[j] - pr.p[i] * pr.q[j]);
  };
  for (std::size_t j = 0; j < whole; ++j) add_pair(s.pairs[j], s.pairs[j].mu);
  if (terms % 2 == 1) add_pair(s.pairs[whole], 0.5 * s.pairs[whole].mu);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(j, i) = -m(i, j);
  return m;
}

inline Matrix truncate_svd(const SvdFactors& f, std::size_t k) {
  const std::size_t n = f.order;
  if (k < 1 || k > n) throw ArgumentError("truncate_svd: k out of range");
  Matrix m(n, n);
  for (std::size_t t = 0; t < k; ++t) {
    const double sig = f.sigma[t];
    const double* u = f.u.row(t);
    const double* v = f.v.row(t);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) += sig * u[i] * v[j];
  }
  return m;
}

}  // namespace nmc
