#include "mmude/sigproc/transfer_function.hpp"
#include "mmude/sigproc/ude_filters.hpp"

#include "../support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mmude;

namespace {

constexpr double kTs = 0.008;

// Amplitude and phase of the steady sinusoidal response by least squares over whole periods.
std::pair<double, double> sine_response(FilterState f, double w, double Ts) {
  const int n = static_cast<int>(60.0 / Ts);
  const int start = n / 2;
  Eigen::MatrixXd A(n - start, 2);
  Eigen::VectorXd y(n - start);
  for (int k = 0; k < n; ++k) {
    const double t = k * Ts;
    const double out = f.step(std::sin(w * t));
    if (k >= start) {
      A(k - start, 0) = std::sin(w * t);
      A(k - start, 1) = std::cos(w * t);
      y[k - start] = out;
    }
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
  return {std::hypot(c[0], c[1]), std::atan2(c[1], c[0])};
}

}  // namespace

TEST(TransferFunction, EvaluationAndProperness) {
  const TransferFunction g = bandpass_gf1();
  EXPECT_EQ(g.order(), 2);
  EXPECT_TRUE(g.proper());
  EXPECT_TRUE(g.strictly_proper());
  EXPECT_FALSE(g.times_s().strictly_proper());
  EXPECT_TRUE(g.times_s().proper());
  EXPECT_FALSE(g.times_s().times_s().proper());
  EXPECT_DOUBLE_EQ(g.dc_gain(), 0.0);
}

TEST(Discretize, FirstOrderStepSettles) {
  const double w = 3.0;
  FilterState f = discretize(TransferFunction::first_order_lowpass(w), kTs);
  double y = 0.0;
  const int n = static_cast<int>(std::ceil((5.0 / w) / kTs));
  for (int k = 0; k <= n; ++k) y = f.step(1.0);
  EXPECT_NEAR(y, 1.0, 1e-2);  // 1 - e^-5 = 0.9933 at t = 5/w
  for (int k = 0; k < 2000; ++k) y = f.step(1.0);
  EXPECT_NEAR(y, 1.0, 1e-3);
}

TEST(Discretize, UnitGainIsIdentity) {
  FilterState f = discretize(TransferFunction::gain(1.0), kTs);
  std::mt19937 rng(1);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const double u = n(rng);
    EXPECT_EQ(f.step(u), u);
  }
}

TEST(Discretize, StepAndImpulseMatchOversampledContinuous) {
  const TransferFunction tf = TransferFunction::first_order_lowpass(3.0);
  const FilterState d = discretize(tf, kTs);
  EXPECT_LT(oracle::step_response_deviation(tf, d, 5.0, 100), 1e-4);
  // impulse: unit sample at k = 0
  std::vector<double> u(600, 0.0);
  u[0] = 1.0;
  const auto yc = oracle::simulate_sampled(oracle::ContinuousFilter(tf.num, tf.den), u, kTs, 100);
  FilterState f = d;
  double worst = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) worst = std::max(worst, std::abs(f.step(u[k]) - yc[k]));
  EXPECT_LT(worst, 1e-4);
}

TEST(Discretize, DcGainPreserved) {
  for (auto method : {Discretization::tustin, Discretization::triangle_hold}) {
    for (const TransferFunction& tf :
         {TransferFunction::first_order_lowpass(6.0), TransferFunction::first_order_lowpass(3.0), lowpass_gf1(),
          bandpass_gf1(), bandpass_gf1().times_s(), TransferFunction({2.0, 1.0}, {4.0, 3.0, 1.0})}) {
      EXPECT_NEAR(discretize(tf, kTs, method).dc_gain(), tf.dc_gain(), 1e-12) << tf.to_string();
    }
  }
}

TEST(Discretize, RejectsImproper) {
  EXPECT_THROW(discretize(TransferFunction({0.0, 0.0, 1.0}, {1.0, 1.0}), kTs), std::invalid_argument);
  EXPECT_THROW(discretize(TransferFunction::first_order_lowpass(1.0), 0.0), std::invalid_argument);
}

TEST(Discretize, CanonicalRealizationShape) {
  const FilterState f = discretize(bandpass_gf1(), kTs);
  EXPECT_EQ(f.order(), 2);
  EXPECT_EQ(f.A()(1, 0), 1.0);
  EXPECT_EQ(f.A()(1, 1), 0.0);
  EXPECT_EQ(f.B()[0], 1.0);
  EXPECT_EQ(f.B()[1], 0.0);
}

TEST(Discretize, DefaultFiltersMatchContinuousStepResponse) {
  const UdeFilters pf = make_default_filters(kTs);
  EXPECT_LT(oracle::step_response_deviation(pf.gf1, pf.gf1_bank.axis(0), 5.0, 8), 1e-3);
  EXPECT_LT(oracle::step_response_deviation(pf.sgf1, pf.sgf1_bank.axis(0), 5.0, 8), 1e-3);
  for (int i = 0; i < 6; ++i) {
    EXPECT_LT(oracle::step_response_deviation(pf.gf2[i], pf.gf2_bank.axis(i), 5.0, 8), 1e-3);
  }
}

TEST(Discretize, TustinOnCouplingFilterIsOutsideStepTolerance) {
  // documents why the coupling filters use the triangle-hold equivalent
  const TransferFunction g = bandpass_gf1();
  EXPECT_GT(oracle::step_response_deviation(g, discretize(g, kTs, Discretization::tustin), 5.0, 8), 1e-3);
}

TEST(FilterStep, ZeroInZeroOut) {
  FilterBank6 b(bandpass_gf1(), kTs);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(b.step(Vec6::Zero()), Vec6::Zero());
}

TEST(FilterStep, ConstantInputReachesDcGain) {
  FilterBank6 b(TransferFunction::first_order_lowpass(6.0), kTs);
  const Vec6 c = (Vec6() << 1, -2, 3, 0.5, 0, 7).finished();
  Vec6 y;
  for (int k = 0; k < 2000; ++k) y = b.step(c);
  EXPECT_LT((y - c).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FilterStep, CutoffGainAndPhase) {
  for (double w : {3.0, 6.0}) {
    const auto [amp, phase] = sine_response(discretize(TransferFunction::first_order_lowpass(w), kTs), w, kTs);
    EXPECT_NEAR(amp, 1.0 / std::sqrt(2.0), 0.02 / std::sqrt(2.0));
    EXPECT_NEAR(phase, -M_PI / 4, 0.02 * M_PI / 4);
  }
}

TEST(FilterStep, Linearity) {
  std::mt19937 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  FilterState a = discretize(bandpass_gf1(), kTs), b = a, c = a;
  const double alpha = 1.7, beta = -0.3;
  for (int k = 0; k < 500; ++k) {
    const double u = n(rng), v = n(rng);
    const double ya = a.step(u), yb = b.step(v), yc = c.step(alpha * u + beta * v);
    EXPECT_NEAR(yc, alpha * ya + beta * yb, 1e-10);
  }
}

TEST(FilterStep, DeterministicReplay) {
  FilterState a = discretize(lowpass_gf1(), kTs), b = a;
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.step(std::sin(0.1 * k)), b.step(std::sin(0.1 * k)));
}

TEST(UdeFilters, CouplingFilterShape) {
  const UdeFilters pf = make_default_filters();
  EXPECT_DOUBLE_EQ(pf.gf1.dc_gain(), 0.0);
  double best_w = 0.0, best = 0.0;
  for (double w = 0.01; w < 50.0; w += 0.001) {
    const double g = std::abs(pf.gf1.frequency_response(w));
    if (g > best) {
      best = g;
      best_w = w;
    }
  }
  EXPECT_NEAR(best_w, 6.0, 0.01);
  EXPECT_NEAR(best, 108.0 * 6.0 / (8.485 * 6.0), 1e-6);
  EXPECT_NEAR(best, 12.73, 0.01);
  // sG_f1 realized as the proper biquad 108 s^2 / (s^2 + 8.485 s + 36)
  EXPECT_EQ(pf.sgf1.num, (Poly{0.0, 0.0, 108.0}));
  EXPECT_EQ(pf.sgf1.den, (Poly{36.0, 8.485, 1.0}));
}

TEST(UdeFilters, CutoffsPerAxis) {
  const UdeFilters pf = make_default_filters();
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(pf.composite.axis(i).omega(), 6.0);
  for (int i = 3; i < 6; ++i) EXPECT_DOUBLE_EQ(pf.composite.axis(i).omega(), 3.0);
  for (int i = 3; i < 6; ++i) EXPECT_EQ(pf.gf2[i].num, (Poly{3.0}));
}

TEST(CompositeOperators, IntegralMatchesRationalTustinAndRamp) {
  const double w = 6.0, c = 1.5;
  CompositeOperator op = CompositeOperator::first_order(w, kTs);
  EXPECT_EQ(op.form(), CompositeOperator::Form::simplified);
  // 1/(1 - G) = (s + w)/s discretized directly
  FilterState rational = discretize(TransferFunction({w, 1.0}, {0.0, 1.0}), kTs);
  for (int k = 0; k < 1000; ++k) {
    const double y = op.integral_step(c);
    EXPECT_NEAR(y, rational.step(c), 1e-6);
    // trapezoidal integration of a sampled step: c + w c (t + T/2)
    EXPECT_NEAR(y, c + w * c * (k * kTs + 0.5 * kTs), 1e-9);
  }
}

TEST(CompositeOperators, ProportionalIsPureGain) {
  CompositeOperator op = CompositeOperator::first_order(6.0, kTs);
  std::mt19937 rng(3);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const double u = n(rng);
    EXPECT_EQ(op.proportional_step(u), 6.0 * u);
  }
}

TEST(CompositeOperators, ZeroInputLeavesIntegratorAtZero) {
  CompositeOperator op = CompositeOperator::first_order(3.0, kTs);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(op.integral_step(0.0), 0.0);
  EXPECT_EQ(op.integrator_state(), 0.0);
}

TEST(CompositeOperators, FreezeHoldsIntegrator) {
  CompositeOperator op = CompositeOperator::first_order(3.0, kTs);
  for (int k = 0; k < 10; ++k) op.integral_step(1.0);
  const double held = op.integrator_state();
  for (int k = 0; k < 10; ++k) EXPECT_DOUBLE_EQ(op.integral_step(1.0, true), 1.0 + 3.0 * held);
  EXPECT_EQ(op.integrator_state(), held);
}

TEST(CompositeOperators, SecondOrderFallsBackToRational) {
  const TransferFunction g = lowpass_gf1();
  CompositeOperator op(g, kTs);
  EXPECT_EQ(op.form(), CompositeOperator::Form::rational);
  const Poly diff = poly::sub(g.den, g.num);
  FilterState integral = discretize(TransferFunction(g.den, diff), kTs);
  for (int k = 0; k < 200; ++k) EXPECT_NEAR(op.integral_step(1.0), integral.step(1.0), 1e-12);
}

TEST(CompositeOperators, RejectsUnsupportedFilters) {
  EXPECT_THROW(CompositeOperator(TransferFunction({1.0, 1.0}, {1.0, 1.0}), kTs), std::invalid_argument);
  EXPECT_THROW(CompositeOperator(bandpass_gf1(), kTs), std::invalid_argument);  // zero DC gain
  EXPECT_THROW(CompositeOperator::first_order(-1.0, kTs), std::invalid_argument);
}

TEST(CompositeOperators, FixedPointAndExplicitFormsAgree) {
  // f = v - G*(s X) + G*f solved per sample versus f = [1/(1-G)] v - [sG/(1-G)] X
  for (double w : {6.0, 3.0}) {
    const TransferFunction g = TransferFunction::first_order_lowpass(w);
    FilterState Gd = discretize(g, kTs);
    FilterState SGd = discretize(g.times_s(), kTs);
    CompositeOperator op = CompositeOperator::first_order(w, kTs);
    std::mt19937 rng(4);
    std::normal_distribution<double> n(0.0, 5.0);
    double worst = 0.0;
    for (int k = 0; k < 5000; ++k) {
      const double v = n(rng) + 10.0 * std::sin(0.01 * k);
      const double X = n(rng) + 3.0 * std::cos(0.02 * k);
      const double s = SGd.step(X);
      const double f18 = (v - s + Gd.state_output()) / (1.0 - Gd.D());
      Gd.advance(f18);
      const double f19 = op.integral_step(v) - op.proportional_step(X);
      worst = std::max(worst, std::abs(f18 - f19));
    }
    EXPECT_LT(worst, 1e-6) << "w=" << w;
  }
}
