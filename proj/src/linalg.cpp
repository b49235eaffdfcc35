#include "lddflow/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <Eigen/SVD>

namespace lddflow {

CsrMatrix to_csr(const TripletMatrix& t) {
  if (t.n_rows < 0 || t.n_cols < 0)
    throw std::invalid_argument("to_csr: negative dimensions");
  for (const auto& e : t.entries) {
    if (e.row() < 0 || e.row() >= t.n_rows || e.col() < 0 || e.col() >= t.n_cols)
      throw std::out_of_range("to_csr: triplet index out of range");
  }
  SparseStorage m(t.n_rows, t.n_cols);
  m.setFromTriplets(t.entries.begin(), t.entries.end());
  return CsrMatrix(std::move(m));
}

Vector spmv(const CsrMatrix& a, const Vector& x) {
  if (x.size() != a.cols()) throw std::invalid_argument("spmv: dimension mismatch");
  return a.eigen() * x;
}

namespace {

// Solution of the least-squares problem accumulated by the Givens rotations:
// back substitution on the upper-triangular Hessenberg and update of x.
void gmres_update_solution(const Matrix& hessenberg, const Matrix& basis, const Vector& g,
                           int k, const Vector* inv_diag, Vector& x) {
  Vector y = g.head(k);
  for (int i = k - 1; i >= 0; --i) {
    for (int j = i + 1; j < k; ++j) y(i) -= hessenberg(i, j) * y(j);
    y(i) /= hessenberg(i, i);
  }
  Vector update = basis.leftCols(k) * y;
  if (inv_diag) update = inv_diag->cwiseProduct(update);
  x += update;
}

}  // namespace

GmresResult gmres(const CsrMatrix& a, const Vector& b, const Vector& x0,
                  const GmresOptions& opts) {
  if (a.rows() != a.cols()) throw std::invalid_argument("gmres: matrix must be square");
  if (b.size() != a.rows() || x0.size() != a.rows())
    throw std::invalid_argument("gmres: dimension mismatch");
  if (opts.restart < 1) throw std::invalid_argument("gmres: restart must be at least 1");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("gmres: tolerance must be positive");

  const Index n = a.rows();
  const Index max_iter = opts.max_iterations > 0 ? opts.max_iterations : 10 * n;
  const int m = static_cast<int>(std::min<Index>(opts.restart, n));

  GmresResult result;
  result.x = x0;

  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    result.x.setZero();
    result.stats.converged = true;
    return result;
  }

  Vector inv_diag;
  const Vector* inv_diag_ptr = nullptr;
  if (opts.jacobi) {
    inv_diag = a.eigen().diagonal();
    for (Index i = 0; i < n; ++i)
      inv_diag(i) = inv_diag(i) != 0.0 ? 1.0 / inv_diag(i) : 1.0;
    inv_diag_ptr = &inv_diag;
  }

  Matrix basis(n, m + 1);
  Matrix hessenberg = Matrix::Zero(m + 1, m);
  Vector g(m + 1), cs(m), sn(m);

  GmresStats& stats = result.stats;
  Vector residual = b - spmv(a, result.x);
  stats.residual = residual.norm() / b_norm;

  while (stats.iterations < max_iter) {
    const double beta = residual.norm();
    if (beta / b_norm <= opts.tol) {
      stats.converged = true;
      stats.status = GmresStatus::converged;
      return result;
    }
    basis.col(0) = residual / beta;
    g.setZero();
    g(0) = beta;

    int k = 0;
    bool broke_down = false;
    while (k < m && stats.iterations < max_iter) {
      Vector w;
      if (inv_diag_ptr)
        w = inv_diag_ptr->cwiseProduct(basis.col(k));
      else
        w = basis.col(k);
      w = spmv(a, w);
      // modified Gram-Schmidt
      for (int i = 0; i <= k; ++i) {
        hessenberg(i, k) = basis.col(i).dot(w);
        w -= hessenberg(i, k) * basis.col(i);
      }
      hessenberg(k + 1, k) = w.norm();
      ++stats.iterations;

      const bool tiny = hessenberg(k + 1, k) <= 1e-14 * beta;
      if (!tiny) basis.col(k + 1) = w / hessenberg(k + 1, k);

      // apply accumulated rotations, then the new one
      for (int i = 0; i < k; ++i) {
        const double t = cs(i) * hessenberg(i, k) + sn(i) * hessenberg(i + 1, k);
        hessenberg(i + 1, k) = -sn(i) * hessenberg(i, k) + cs(i) * hessenberg(i + 1, k);
        hessenberg(i, k) = t;
      }
      const double denom = std::hypot(hessenberg(k, k), hessenberg(k + 1, k));
      if (denom == 0.0) {
        // column contributes nothing; solve with the columns so far
        broke_down = true;
        break;
      }
      cs(k) = hessenberg(k, k) / denom;
      sn(k) = hessenberg(k + 1, k) / denom;
      hessenberg(k, k) = denom;
      hessenberg(k + 1, k) = 0.0;
      g(k + 1) = -sn(k) * g(k);
      g(k) = cs(k) * g(k);
      ++k;

      if (tiny) {
        broke_down = true;
        break;
      }
      if (std::abs(g(k)) / b_norm <= opts.tol) break;
    }

    gmres_update_solution(hessenberg, basis, g, k, inv_diag_ptr, result.x);
    residual = b - spmv(a, result.x);
    stats.residual = residual.norm() / b_norm;
    ++stats.restarts;

    if (broke_down) {
      stats.converged = stats.residual <= opts.tol;
      stats.status = stats.converged ? GmresStatus::converged : GmresStatus::breakdown;
      return result;
    }
  }

  stats.converged = stats.residual <= opts.tol;
  stats.status = stats.converged ? GmresStatus::converged : GmresStatus::max_iterations;
  return result;
}

ConditionReport condition_number_dense(const CsrMatrix& a) {
  if (a.rows() > 5000 || a.cols() > 5000)
    throw std::invalid_argument("condition_number_dense: matrix too large to densify");
  const Matrix dense = a.dense();
  Eigen::BDCSVD<Matrix> svd(dense);
  const auto& sigma = svd.singularValues();
  ConditionReport report;
  const double s_max = sigma.size() > 0 ? sigma(0) : 0.0;
  const double s_min = sigma.size() > 0 ? sigma(sigma.size() - 1) : 0.0;
  if (s_min == 0.0) {
    report.singular = true;
    report.value = std::numeric_limits<double>::infinity();
  } else {
    report.value = s_max / s_min;
  }
  return report;
}

namespace {

void write_entry(std::ostream& out, Index row, Index col, double value) {
  char line[96];
  std::snprintf(line, sizeof(line), "%lld %lld %.17g\n", static_cast<long long>(row),
                static_cast<long long>(col), value);
  out << line;
}

}  // namespace

void dump_coordinate_format(const CsrMatrix& a, std::ostream& out) {
  const auto& m = a.eigen();
  for (Index r = 0; r < m.rows(); ++r)
    for (SparseStorage::InnerIterator it(m, r); it; ++it)
      write_entry(out, it.row(), it.col(), it.value());
}

void dump_coordinate_format(const TripletMatrix& t, std::ostream& out) {
  for (const auto& e : t.entries) write_entry(out, e.row(), e.col(), e.value());
}

}  // namespace lddflow
