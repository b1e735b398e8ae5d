#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "semcomm/autodiff.hpp"
#include "semcomm/rng.hpp"

using namespace semcomm;
using ad::Mat;
using ad::Tape;
using ad::Var;

namespace {

Mat random_mat(int r, int c, Rng& rng, double scl = 1.0) {
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = scl * rng.gaussian();
  return m;
}

// Central-difference check of d(f)/d(x) against the backward sweep.
// f builds a scalar from a single leaf; returns max relative error.
double gradcheck(const Mat& x0, const std::function<Var(Tape&, Var)>& f,
                 double eps = 1e-5) {
  Tape tape;
  Var x = tape.leaf(x0, true);
  Var y = f(tape, x);
  tape.backward(y);
  const Mat analytic = tape.grad(x);

  double worst = 0.0;
  for (int i = 0; i < x0.rows(); ++i) {
    for (int j = 0; j < x0.cols(); ++j) {
      Mat xp = x0, xm = x0;
      xp(i, j) += eps;
      xm(i, j) -= eps;
      Tape tp, tm;
      const double fp = tp.val(f(tp, tp.leaf(xp, true)))(0, 0);
      const double fm = tm.val(f(tm, tm.leaf(xm, true)))(0, 0);
      const double numeric = (fp - fm) / (2.0 * eps);
      const double denom = std::max({std::abs(numeric), std::abs(analytic(i, j)), 1e-8});
      worst = std::max(worst, std::abs(numeric - analytic(i, j)) / denom);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("elementwise and linear ops match finite differences") {
  Rng rng(42);
  const Mat a = random_mat(3, 4, rng);
  const Mat w = random_mat(4, 5, rng);

  CHECK(gradcheck(a, [](Tape&, Var x) { return ad::mean_all(x); }) < 1e-6);
  CHECK(gradcheck(a, [](Tape&, Var x) { return ad::sum_all(ad::mul(x, x)); }) < 1e-6);
  CHECK(gradcheck(a, [](Tape&, Var x) { return ad::sum_all(ad::scale(x, -2.5)); }) < 1e-6);
  CHECK(gradcheck(a, [&](Tape& t, Var x) {
          return ad::sum_all(ad::mul(ad::add(x, t.constant(a)), ad::sub(x, t.constant(w.topRows(3).leftCols(4)))));
        }) < 1e-6);
  CHECK(gradcheck(a, [&](Tape& t, Var x) {
          Var vw = t.leaf(w, true);
          return ad::mean_all(ad::matmul(x, vw));
        }) < 1e-6);
  CHECK(gradcheck(a, [](Tape&, Var x) { return ad::sum_all(ad::transpose(x)); }) < 1e-6);
  CHECK(gradcheck(a, [](Tape&, Var x) { return ad::sum_all(ad::sigmoid(x)); }) < 1e-6);
  CHECK(gradcheck(a, [](Tape&, Var x) { return ad::sum_all(ad::tanh_(x)); }) < 1e-6);
  CHECK(gradcheck(a, [](Tape&, Var x) { return ad::sum_all(ad::exp_(x)); }) < 1e-6);
}

TEST_CASE("matmul gradient w.r.t. the right operand") {
  Rng rng(1);
  const Mat a = random_mat(2, 3, rng);
  const Mat b0 = random_mat(3, 4, rng);
  CHECK(gradcheck(b0, [&](Tape& t, Var b) {
          return ad::sum_all(ad::matmul(t.constant(a), b));
        }) < 1e-6);
}

TEST_CASE("relu gradient away from the kink") {
  Rng rng(7);
  Mat a = random_mat(4, 4, rng);
  // keep entries off zero so the finite difference is clean
  a = a.unaryExpr([](double x) { return std::abs(x) < 0.1 ? x + 0.5 : x; });
  CHECK(gradcheck(a, [](Tape&, Var x) { return ad::sum_all(ad::relu(x)); }) < 1e-6);
}

TEST_CASE("log gradient on positive inputs") {
  Rng rng(3);
  Mat a = random_mat(3, 3, rng).array().abs().matrix() + Mat::Constant(3, 3, 0.5);
  CHECK(gradcheck(a, [](Tape&, Var x) { return ad::sum_all(ad::log_(x)); }) < 1e-6);
}

TEST_CASE("softmax family matches finite differences") {
  Rng rng(11);
  const Mat a = random_mat(3, 5, rng, 2.0);
  const Mat weights = random_mat(3, 5, rng);
  Mat mask = Mat::Zero(3, 5);
  mask(0, 4) = -1e30;  // knock one position out

  CHECK(gradcheck(a, [&](Tape& t, Var x) {
          return ad::sum_all(ad::mul(ad::row_softmax(x), t.constant(weights)));
        }) < 1e-6);
  CHECK(gradcheck(a, [&](Tape& t, Var x) {
          return ad::sum_all(ad::mul(ad::row_softmax(x, &mask), t.constant(weights)));
        }) < 1e-6);
  CHECK(gradcheck(a, [&](Tape& t, Var x) {
          return ad::sum_all(ad::mul(ad::row_log_softmax(x), t.constant(weights)));
        }) < 1e-6);
}

TEST_CASE("masked softmax zeroes the masked position") {
  Tape t;
  Mat a = Mat::Zero(1, 3);
  Mat mask = Mat::Zero(1, 3);
  mask(0, 2) = -1e30;
  Var p = ad::row_softmax(t.leaf(a, false), &mask);
  CHECK(t.val(p)(0, 2) == doctest::Approx(0.0));
  CHECK(t.val(p)(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("layer norm matches finite differences in x, gain and bias") {
  Rng rng(13);
  const Mat x0 = random_mat(4, 6, rng);
  const Mat g0 = random_mat(1, 6, rng);
  const Mat b0 = random_mat(1, 6, rng);
  const Mat weights = random_mat(4, 6, rng);

  auto through = [&](Tape& t, Var x, Var g, Var b) {
    return ad::sum_all(ad::mul(ad::layer_norm_rows(x, g, b), t.constant(weights)));
  };
  CHECK(gradcheck(x0, [&](Tape& t, Var x) {
          return through(t, x, t.leaf(g0, true), t.leaf(b0, true));
        }) < 1e-5);
  CHECK(gradcheck(g0, [&](Tape& t, Var g) {
          return through(t, t.leaf(x0, true), g, t.leaf(b0, true));
        }) < 1e-6);
  CHECK(gradcheck(b0, [&](Tape& t, Var b) {
          return through(t, t.leaf(x0, true), t.leaf(g0, true), b);
        }) < 1e-6);
}

TEST_CASE("shape ops route gradients to the right slots") {
  Rng rng(17);
  const Mat a = random_mat(3, 6, rng);
  CHECK(gradcheck(a, [](Tape&, Var x) {
          return ad::sum_all(ad::mul(ad::slice_cols(x, 2, 3), ad::slice_cols(x, 0, 3)));
        }) < 1e-6);
  CHECK(gradcheck(a, [](Tape&, Var x) {
          std::vector<Var> parts{ad::slice_cols(x, 0, 2), ad::slice_cols(x, 2, 4)};
          return ad::sum_all(ad::mul(ad::hstack(parts), ad::hstack(parts)));
        }) < 1e-6);
}

TEST_CASE("bias_add_rows, mul_scalar, gather, pick") {
  Rng rng(19);
  const Mat x0 = random_mat(4, 3, rng);
  const Mat b0 = random_mat(1, 3, rng);
  const Mat s0 = random_mat(1, 1, rng);

  CHECK(gradcheck(x0, [&](Tape& t, Var x) {
          return ad::sum_all(ad::bias_add_rows(ad::mul(x, x), t.leaf(b0, true)));
        }) < 1e-6);
  CHECK(gradcheck(b0, [&](Tape& t, Var b) {
          return ad::sum_all(ad::bias_add_rows(t.leaf(x0, true), b));
        }) < 1e-6);
  CHECK(gradcheck(s0, [&](Tape& t, Var s) {
          return ad::sum_all(ad::mul_scalar(t.leaf(x0, true), s));
        }) < 1e-6);
  CHECK(gradcheck(x0, [&](Tape& t, Var x) {
          return ad::sum_all(ad::mul_scalar(x, t.leaf(s0, true)));
        }) < 1e-6);
  CHECK(gradcheck(x0, [](Tape&, Var x) {
          return ad::sum_all(ad::gather_rows(x, {0, 2, 2, 3}));
        }) < 1e-6);
  CHECK(gradcheck(x0, [](Tape&, Var x) {
          Var y = ad::pick(x, {{0, 1}, {3, 2}, {0, 1}});
          return ad::sum_all(ad::mul(y, y));
        }) < 1e-6);
}

TEST_CASE("rms_normalize: unit mean square and exact gradient") {
  Rng rng(23);
  const Mat x0 = random_mat(3, 4, rng, 2.0);
  Tape t;
  Var y = ad::rms_normalize(t.leaf(x0, false));
  const double ms = t.val(y).squaredNorm() / t.val(y).size();
  CHECK(ms == doctest::Approx(1.0).epsilon(1e-9));

  const Mat weights = random_mat(3, 4, rng);
  CHECK(gradcheck(x0, [&](Tape& tt, Var x) {
          return ad::sum_all(ad::mul(ad::rms_normalize(x), tt.constant(weights)));
        }) < 1e-6);

  Tape t2;
  CHECK_THROWS_AS(ad::rms_normalize(t2.leaf(Mat::Zero(2, 2), false)), std::domain_error);
}

TEST_CASE("backward skips constants and requires a scalar root") {
  Tape t;
  Var c = t.constant(Mat::Ones(2, 2));
  Var x = t.leaf(Mat::Ones(2, 2), true);
  Var y = ad::mul(x, c);
  CHECK_THROWS_AS(t.backward(y), std::invalid_argument);  // non-scalar root
  Var s = ad::sum_all(y);
  t.backward(s);
  CHECK(t.grad(x)(0, 0) == doctest::Approx(1.0));

  Tape t2;
  Var c2 = t2.constant(Mat::Ones(1, 1));
  CHECK_THROWS_AS(t2.backward(c2), std::invalid_argument);  // no differentiable leaf
}
