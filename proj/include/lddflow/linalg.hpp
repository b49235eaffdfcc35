#ifndef LDDFLOW_LINALG_HPP
#define LDDFLOW_LINALG_HPP

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "lddflow/types.hpp"

namespace lddflow {

/// Sparse matrix under construction: a list of (row, col, value) entries.
/// Duplicate positions are allowed and are summed on conversion.
struct TripletMatrix {
  Index n_rows = 0;
  Index n_cols = 0;
  std::vector<Eigen::Triplet<double>> entries;

  TripletMatrix() = default;
  TripletMatrix(Index rows, Index cols) : n_rows(rows), n_cols(cols) {}

  void add(Index row, Index col, double value) { entries.emplace_back(row, col, value); }
};

using SparseStorage = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using StorageIndex = SparseStorage::StorageIndex;

/// Compressed-row matrix. Column indices are strictly increasing within each
/// row; structural zeros from the triplet input are retained.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  explicit CsrMatrix(SparseStorage storage) : storage_(std::move(storage)) {}

  Index rows() const { return storage_.rows(); }
  Index cols() const { return storage_.cols(); }
  Index non_zeros() const { return storage_.nonZeros(); }

  std::span<const StorageIndex> row_offsets() const {
    return {storage_.outerIndexPtr(), static_cast<size_t>(storage_.rows() + 1)};
  }
  std::span<const StorageIndex> col_indices() const {
    return {storage_.innerIndexPtr(), static_cast<size_t>(storage_.nonZeros())};
  }
  std::span<const double> values() const {
    return {storage_.valuePtr(), static_cast<size_t>(storage_.nonZeros())};
  }

  const SparseStorage& eigen() const { return storage_; }

  Matrix dense() const { return Matrix(storage_); }

 private:
  SparseStorage storage_;
};

/// Converts triplets to compressed rows, summing duplicates. Throws on
/// out-of-range indices.
CsrMatrix to_csr(const TripletMatrix& t);

/// y = A x. Fixed summation order per row, independent of threading.
Vector spmv(const CsrMatrix& a, const Vector& x);

struct GmresOptions {
  int restart = 30;
  double tol = 1e-10;      // relative residual |b - A x| / |b|
  Index max_iterations = 0;  // 0 selects 10 * n
  bool jacobi = false;       // diagonal (right) preconditioning
};

enum class GmresStatus { converged, max_iterations, breakdown };

struct GmresStats {
  Index iterations = 0;  // total inner iterations
  int restarts = 0;
  double residual = 0.0;  // final true relative residual
  bool converged = false;
  GmresStatus status = GmresStatus::converged;
};

struct GmresResult {
  Vector x;
  GmresStats stats;
};

/// Restarted GMRES with modified Gram-Schmidt orthogonalisation and Givens
/// rotations for the least-squares problem. Optional Jacobi scaling is
/// applied from the right, so residuals are residuals of the original
/// system. On breakdown with the tolerance already met the result counts as
/// converged; otherwise the breakdown is reported in the status.
GmresResult gmres(const CsrMatrix& a, const Vector& b, const Vector& x0,
                  const GmresOptions& opts);

struct ConditionReport {
  double value = 0.0;
  bool singular = false;
};

/// 2-norm condition number sigma_max / sigma_min of the densified matrix.
/// Only for diagnostics: refuses n > 5000. Singular matrices are flagged and
/// report an infinite value.
ConditionReport condition_number_dense(const CsrMatrix& a);

/// Writes "row col value" lines, 17 significant digits, one entry per line.
void dump_coordinate_format(const CsrMatrix& a, std::ostream& out);
void dump_coordinate_format(const TripletMatrix& t, std::ostream& out);

}  // namespace lddflow

#endif
