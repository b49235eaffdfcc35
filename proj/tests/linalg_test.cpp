#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/LU>

#include "lddflow/linalg.hpp"

using namespace lddflow;

namespace {

TripletMatrix random_sparse(Index n, double fill, unsigned seed, bool diag_dominant) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  TripletMatrix t(n, n);
  Vector row_sum = Vector::Zero(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && coin(rng) < fill) {
        const double v = value(rng);
        t.add(i, j, v);
        row_sum(i) += std::abs(v);
      }
  for (Index i = 0; i < n; ++i)
    t.add(i, i, diag_dominant ? row_sum(i) + 1.0 : value(rng));
  return t;
}

// independent oracle: accumulate triplets densely
Matrix dense_oracle(const TripletMatrix& t) {
  Matrix m = Matrix::Zero(t.n_rows, t.n_cols);
  for (const auto& e : t.entries) m(e.row(), e.col()) += e.value();
  return m;
}

}  // namespace

TEST_CASE("to_csr sums duplicates") {
  TripletMatrix t(1, 1);
  t.add(0, 0, 1.0);
  t.add(0, 0, 2.0);
  const CsrMatrix a = to_csr(t);
  CHECK(a.non_zeros() == 1);
  CHECK(a.dense()(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("to_csr identity layout") {
  TripletMatrix t(2, 2);
  t.add(0, 0, 1.0);
  t.add(1, 1, 1.0);
  const CsrMatrix a = to_csr(t);
  REQUIRE(a.row_offsets().size() == 3);
  CHECK(a.row_offsets()[0] == 0);
  CHECK(a.row_offsets()[1] == 1);
  CHECK(a.row_offsets()[2] == 2);
  CHECK(a.col_indices()[0] == 0);
  CHECK(a.col_indices()[1] == 1);
}

TEST_CASE("to_csr equals the dense accumulation oracle") {
  const TripletMatrix t = random_sparse(50, 0.1, 777, false);
  const Matrix expected = dense_oracle(t);
  const Matrix actual = to_csr(t).dense();
  CHECK((actual - expected).cwiseAbs().maxCoeff() == 0.0);

  TripletMatrix bad(2, 2);
  bad.add(0, 2, 1.0);
  CHECK_THROWS_AS(to_csr(bad), std::out_of_range);
}

TEST_CASE("to_csr and spmv match the dense oracle on 100 random instances") {
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (unsigned k = 0; k < 100; ++k) {
    const TripletMatrix t = random_sparse(30, 0.15, 1000 + k, false);
    const Matrix dense = dense_oracle(t);
    const CsrMatrix a = to_csr(t);
    CHECK((a.dense() - dense).cwiseAbs().maxCoeff() == 0.0);
    Vector x(30);
    for (Index i = 0; i < 30; ++i) x(i) = dist(rng);
    const Vector expected = dense * x;
    CHECK((spmv(a, x) - expected).norm() <= 1e-14 * std::max(1.0, expected.norm()));
  }
}

TEST_CASE("to_csr keeps structural zeros and sorts columns") {
  TripletMatrix t(2, 3);
  t.add(0, 2, 0.0);
  t.add(0, 0, 1.0);
  t.add(1, 1, 2.0);
  const CsrMatrix a = to_csr(t);
  CHECK(a.non_zeros() == 3);  // the explicit zero is retained
  CHECK(a.col_indices()[0] == 0);
  CHECK(a.col_indices()[1] == 2);
}

TEST_CASE("spmv") {
  TripletMatrix eye(3, 3);
  for (Index i = 0; i < 3; ++i) eye.add(i, i, 1.0);
  Vector x(3);
  x << 1.0, -2.0, 0.5;
  CHECK((spmv(to_csr(eye), x) - x).norm() == 0.0);

  TripletMatrix d(2, 2);
  d.add(0, 0, 2.0);
  d.add(1, 1, 3.0);
  Vector ones = Vector::Ones(2);
  const Vector y = spmv(to_csr(d), ones);
  CHECK(y(0) == doctest::Approx(2.0));
  CHECK(y(1) == doctest::Approx(3.0));

  const TripletMatrix t = random_sparse(100, 0.08, 31, false);
  const CsrMatrix a = to_csr(t);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector z(100);
  for (Index i = 0; i < 100; ++i) z(i) = dist(rng);
  const Vector via_sparse = spmv(a, z);
  const Vector via_dense = dense_oracle(t) * z;
  CHECK((via_sparse - via_dense).norm() <=
        1e-14 * std::max(1.0, via_dense.norm()));

  CHECK_THROWS_AS(spmv(a, Vector::Zero(7)), std::invalid_argument);
}

TEST_CASE("gmres solves the identity in one iteration") {
  TripletMatrix eye(4, 4);
  for (Index i = 0; i < 4; ++i) eye.add(i, i, 1.0);
  Vector b(4);
  b << 1.0, 2.0, 3.0, 4.0;
  const GmresResult r = gmres(to_csr(eye), b, Vector::Zero(4), {});
  CHECK(r.stats.converged);
  CHECK(r.stats.iterations == 1);
  CHECK((r.x - b).norm() <= 1e-12);
}

TEST_CASE("gmres diagonal hand case") {
  TripletMatrix d(2, 2);
  d.add(0, 0, 2.0);
  d.add(1, 1, 3.0);
  Vector b(2);
  b << 2.0, 3.0;
  GmresOptions opts;
  opts.tol = 1e-12;
  const GmresResult r = gmres(to_csr(d), b, Vector::Zero(2), opts);
  CHECK(r.stats.converged);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gmres matches the dense LU oracle on a well-conditioned system") {
  const TripletMatrix t = random_sparse(80, 0.1, 99, true);
  const CsrMatrix a = to_csr(t);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector b(80);
  for (Index i = 0; i < 80; ++i) b(i) = dist(rng);

  GmresOptions opts;
  opts.tol = 1e-12;
  const GmresResult r = gmres(a, b, Vector::Zero(80), opts);
  CHECK(r.stats.converged);

  const Vector x_lu = Eigen::PartialPivLU<Matrix>(dense_oracle(t)).solve(b);
  CHECK((r.x - x_lu).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("gmres with restart >= n finishes within n iterations") {
  const TripletMatrix t = random_sparse(50, 0.15, 4242, true);
  const CsrMatrix a = to_csr(t);
  Vector b = Vector::Ones(50);
  GmresOptions opts;
  opts.restart = 60;
  opts.tol = 1e-10;
  const GmresResult r = gmres(a, b, Vector::Zero(50), opts);
  CHECK(r.stats.converged);
  CHECK(r.stats.iterations <= 50);
  const double recomputed = (b - spmv(a, r.x)).norm() / b.norm();
  CHECK(recomputed <= 1e-8);
}

TEST_CASE("gmres reported residual equals the recomputed residual") {
  const TripletMatrix t = random_sparse(40, 0.2, 2024, true);
  const CsrMatrix a = to_csr(t);
  Vector b = Vector::LinSpaced(40, 1.0, 4.0);
  GmresOptions opts;
  opts.jacobi = true;
  const GmresResult r = gmres(a, b, Vector::Zero(40), opts);
  const double recomputed = (b - spmv(a, r.x)).norm() / b.norm();
  CHECK(r.stats.residual == doctest::Approx(recomputed).epsilon(1e-12).scale(1.0));
}

TEST_CASE("gmres breakdown reporting") {
  TripletMatrix t(2, 2);
  t.add(0, 0, 1.0);
  t.add(1, 1, 0.0);
  const CsrMatrix a = to_csr(t);

  // consistent singular system: breakdown coincides with convergence
  Vector b_ok(2);
  b_ok << 1.0, 0.0;
  const GmresResult ok = gmres(a, b_ok, Vector::Zero(2), {});
  CHECK(ok.stats.converged);

  // inconsistent system: breakdown must be reported distinctly
  Vector b_bad(2);
  b_bad << 1.0, 1.0;
  const GmresResult bad = gmres(a, b_bad, Vector::Zero(2), {});
  CHECK_FALSE(bad.stats.converged);
  CHECK(bad.stats.status == GmresStatus::breakdown);
}

TEST_CASE("gmres on zero right hand side") {
  TripletMatrix t(3, 3);
  for (Index i = 0; i < 3; ++i) t.add(i, i, 2.0);
  const GmresResult r = gmres(to_csr(t), Vector::Zero(3), Vector::Ones(3), {});
  CHECK(r.stats.converged);
  CHECK(r.x.norm() == 0.0);
}

TEST_CASE("condition number of small matrices") {
  TripletMatrix eye(3, 3);
  for (Index i = 0; i < 3; ++i) eye.add(i, i, 1.0);
  CHECK(condition_number_dense(to_csr(eye)).value == doctest::Approx(1.0).epsilon(1e-12));

  TripletMatrix d(2, 2);
  d.add(0, 0, 10.0);
  d.add(1, 1, 0.1);
  const ConditionReport r = condition_number_dense(to_csr(d));
  CHECK_FALSE(r.singular);
  CHECK(r.value == doctest::Approx(100.0).epsilon(1e-10));

  TripletMatrix s(2, 2);
  s.add(0, 0, 1.0);
  s.add(1, 1, 0.0);
  const ConditionReport sr = condition_number_dense(to_csr(s));
  CHECK(sr.singular);
  CHECK(std::isinf(sr.value));

  CHECK_THROWS_AS(condition_number_dense(to_csr(TripletMatrix(5001, 5001))),
                  std::invalid_argument);
}

TEST_CASE("coordinate dump format") {
  TripletMatrix t(2, 2);
  t.add(0, 0, 1.5);
  t.add(1, 0, -2.0);
  std::ostringstream out;
  dump_coordinate_format(to_csr(t), out);
  CHECK(out.str() == "0 0 1.5\n1 0 -2\n");
}
