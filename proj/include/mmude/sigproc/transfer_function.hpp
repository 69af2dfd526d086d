/**
 * @file transfer_function.hpp
 * @brief Rational transfer functions and their discrete state-space realizations.
 */
#pragma once

#include "mmude/core/types.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmude {

/// Polynomial with ascending coefficients: p(s) = c[0] + c[1] s + ...
using Poly = std::vector<double>;

namespace poly {

inline Poly trim(Poly p) {
  while (p.size() > 1 && p.back() == 0.0) p.pop_back();
  if (p.empty()) p.push_back(0.0);
  return p;
}

inline int degree(const Poly& p) { return static_cast<int>(trim(p).size()) - 1; }

inline Poly add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return trim(r);
}

inline Poly scale(const Poly& a, double k) {
  Poly r = a;
  for (double& c : r) c *= k;
  return trim(r);
}

inline Poly sub(const Poly& a, const Poly& b) { return add(a, scale(b, -1.0)); }

inline Poly mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return trim(r);
}

inline Poly pow(const Poly& a, int k) {
  Poly r{1.0};
  for (int i = 0; i < k; ++i) r = mul(r, a);
  return r;
}

template <typename T>
T eval(const Poly& p, T x) {
  T acc = T(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + T(*it);
  return acc;
}

}  // namespace poly

/// G(s) = num(s) / den(s), coefficients in ascending powers of s.
struct TransferFunction {
  Poly num{1.0};
  Poly den{1.0};

  TransferFunction() = default;
  TransferFunction(Poly n, Poly d) : num(poly::trim(std::move(n))), den(poly::trim(std::move(d))) {
    if (den.back() == 0.0) throw std::invalid_argument("transfer function: zero denominator");
  }

  static TransferFunction gain(double k) { return {{k}, {1.0}}; }
  /// w / (s + w)
  static TransferFunction first_order_lowpass(double w) { return {{w}, {w, 1.0}}; }

  [[nodiscard]] int order() const { return poly::degree(den); }
  [[nodiscard]] bool proper() const { return poly::degree(num) <= poly::degree(den); }
  [[nodiscard]] bool strictly_proper() const {
    return poly::degree(num) < poly::degree(den) || (num.size() == 1 && num[0] == 0.0);
  }

  [[nodiscard]] std::complex<double> eval(std::complex<double> s) const {
    return poly::eval(num, s) / poly::eval(den, s);
  }
  [[nodiscard]] std::complex<double> frequency_response(double w) const { return eval({0.0, w}); }
  [[nodiscard]] double dc_gain() const { return num[0] / den[0]; }

  /// Multiplies by s.
  [[nodiscard]] TransferFunction times_s() const {
    Poly n(num.size() + 1, 0.0);
    for (std::size_t i = 0; i < num.size(); ++i) n[i + 1] = num[i];
    return {n, den};
  }

  [[nodiscard]] std::string to_string() const {
    auto fmt = [](const Poly& p) {
      std::ostringstream os;
      os.precision(10);
      bool first = true;
      for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) {
        if (p[i] == 0.0 && p.size() > 1) continue;
        if (!first) os << " + ";
        os << p[i];
        if (i >= 1) os << "s";
        if (i >= 2) os << "^" << i;
        first = false;
      }
      return os.str();
    };
    return "(" + fmt(num) + ")/(" + fmt(den) + ")";
  }
};

inline constexpr int kMaxFilterOrder = 4;

enum class Discretization {
  tustin,        // bilinear substitution s = (2/T)(z-1)/(z+1)
  triangle_hold  // exact for inputs that are linear between samples
};

inline const char* to_string(Discretization d) {
  return d == Discretization::tustin ? "tustin" : "triangle_hold";
}

/// Discrete filter y = (b0 + b1 z^-1 + ...) / (1 + a1 z^-1 + ...) u, realized in controllable
/// canonical form: x+ = A x + B u, y = C x + D u with A a companion matrix and B = e1.
class FilterState {
 public:
  using MatN = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxFilterOrder, kMaxFilterOrder>;
  using VecN = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxFilterOrder, 1>;

  FilterState() = default;

  /// @param b numerator in powers of z^-1, @param a denominator in powers of z^-1 with a[0] != 0
  FilterState(std::vector<double> b, std::vector<double> a, double Ts) : Ts_(Ts) {
    if (!(Ts > 0.0)) throw std::invalid_argument("filter: sample period must be > 0");
    if (a.empty() || a[0] == 0.0) throw std::invalid_argument("filter: leading denominator coefficient is zero");
    const std::size_t n = a.size() - 1;
    if (b.size() > a.size()) throw std::invalid_argument("filter: improper discrete filter");
    if (n > static_cast<std::size_t>(kMaxFilterOrder)) throw std::invalid_argument("filter: order too high");
    b.resize(a.size(), 0.0);
    const double a0 = a[0];
    for (double& c : a) c /= a0;
    for (double& c : b) c /= a0;
    b_ = b;
    a_ = a;
    const int N = static_cast<int>(n);
    A_ = MatN::Zero(N, N);
    B_ = VecN::Zero(N);
    C_ = VecN::Zero(N);
    D_ = b[0];
    for (int i = 0; i < N; ++i) {
      A_(0, i) = -a[i + 1];
      C_[i] = b[i + 1] - b[0] * a[i + 1];
      if (i + 1 < N) A_(i + 1, i) = 1.0;
    }
    if (N > 0) B_[0] = 1.0;
    x_ = VecN::Zero(N);
  }

  [[nodiscard]] int order() const { return static_cast<int>(x_.size()); }
  [[nodiscard]] double sample_period() const { return Ts_; }
  [[nodiscard]] const std::vector<double>& b() const { return b_; }
  [[nodiscard]] const std::vector<double>& a() const { return a_; }
  [[nodiscard]] const MatN& A() const { return A_; }
  [[nodiscard]] const VecN& B() const { return B_; }
  [[nodiscard]] const VecN& C() const { return C_; }
  [[nodiscard]] double D() const { return D_; }
  [[nodiscard]] const VecN& state() const { return x_; }

  /// Contribution of the stored state to the next output (the part not multiplied by u).
  [[nodiscard]] double state_output() const { return order() > 0 ? C_.dot(x_) : 0.0; }
  [[nodiscard]] double preview(double u) const { return state_output() + D_ * u; }

  void advance(double u) {
    if (order() > 0) x_ = A_ * x_ + B_ * u;
  }

  double step(double u) {
    const double y = preview(u);
    advance(u);
    return y;
  }

  void reset() { x_.setZero(); }

  [[nodiscard]] double dc_gain() const {
    double nb = 0.0, na = 0.0;
    for (double c : b_) nb += c;
    for (double c : a_) na += c;
    return nb / na;
  }

 private:
  std::vector<double> b_, a_;
  MatN A_;
  VecN B_, C_;
  double D_ = 1.0;
  VecN x_;
  double Ts_ = 1.0;
};

namespace detail {

/// Tustin: substitute s = c (1 - z^-1)/(1 + z^-1) and clear denominators with (1 + z^-1)^N.
inline FilterState tustin(const TransferFunction& tf, double Ts) {
  const int N = tf.order();
  const double c = 2.0 / Ts;
  const Poly one_minus{1.0, -1.0}, one_plus{1.0, 1.0};
  auto map = [&](const Poly& p) {
    Poly r{0.0};
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[k] == 0.0) continue;
      r = poly::add(r, poly::scale(poly::mul(poly::pow(one_minus, static_cast<int>(k)), poly::pow(one_plus, N - static_cast<int>(k))),
                                   p[k] * std::pow(c, static_cast<double>(k))));
    }
    r.resize(N + 1, 0.0);
    return r;
  };
  return FilterState(map(tf.num), map(tf.den), Ts);
}

/// Continuous controllable canonical realization of a proper tf.
struct ContinuousSS {
  Eigen::MatrixXd A;
  Eigen::VectorXd B, C;
  double D = 0.0;
};

inline ContinuousSS continuous_realization(const TransferFunction& tf) {
  const int N = tf.order();
  const double lead = tf.den[N];
  Poly a = poly::scale(tf.den, 1.0 / lead);
  Poly b = poly::scale(tf.num, 1.0 / lead);
  a.resize(N + 1, 0.0);
  b.resize(N + 1, 0.0);
  ContinuousSS ss;
  ss.D = b[N];
  ss.A = Eigen::MatrixXd::Zero(N, N);
  ss.B = Eigen::VectorXd::Zero(N);
  ss.C = Eigen::VectorXd::Zero(N);
  for (int i = 0; i + 1 < N; ++i) ss.A(i, i + 1) = 1.0;
  for (int i = 0; i < N; ++i) {
    ss.A(N - 1, i) = -a[i];
    ss.C[i] = b[i] - ss.D * a[i];
  }
  if (N > 0) ss.B[N - 1] = 1.0;
  return ss;
}

/// Characteristic polynomial (descending, monic) and adjugate coefficients by Faddeev-LeVerrier:
/// adj(zI - A) = sum_k Mk z^(N-k).
inline void faddeev_leverrier(const Eigen::MatrixXd& A, std::vector<double>& charpoly, std::vector<Eigen::MatrixXd>& adj) {
  const int N = static_cast<int>(A.rows());
  charpoly.assign(N + 1, 0.0);
  charpoly[0] = 1.0;
  adj.clear();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  for (int k = 1; k <= N; ++k) {
    M = A * M + charpoly[k - 1] * Eigen::MatrixXd::Identity(N, N);
    adj.push_back(M);
    charpoly[k] = -(A * M).trace() / k;
  }
}

/// Triangle-hold equivalent: input interpolated linearly between consecutive samples.
inline FilterState triangle_hold(const TransferFunction& tf, double Ts) {
  const ContinuousSS c = continuous_realization(tf);
  const int N = static_cast<int>(c.A.rows());
  if (N == 0) return FilterState({c.D}, {1.0}, Ts);
  // exp([[A, B, 0], [0, 0, 1/T], [0, 0, 0]] T) = [[Phi, G1, G2], ...]
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(N + 2, N + 2);
  big.topLeftCorner(N, N) = c.A * Ts;
  big.block(0, N, N, 1) = c.B * Ts;
  big(N, N + 1) = 1.0;
  const Eigen::MatrixXd E = big.exp();
  const Eigen::MatrixXd Phi = E.topLeftCorner(N, N);
  const Eigen::VectorXd G1 = E.block(0, N, N, 1);
  const Eigen::VectorXd G2 = E.block(0, N + 1, N, 1);
  // x_k = Phi x_{k-1} + (G1 - G2) u_{k-1} + G2 u_k; shift xi = x - G2 u to make it proper
  const Eigen::VectorXd Bd = Phi * G2 + G1 - G2;
  const double Dd = c.D + c.C.dot(G2);
  std::vector<double> charpoly;
  std::vector<Eigen::MatrixXd> adj;
  faddeev_leverrier(Phi, charpoly, adj);
  // H(z) = (C adj(zI - Phi) Bd + Dd det(zI - Phi)) / det(zI - Phi); descending powers of z
  std::vector<double> b(N + 1, 0.0);
  for (int k = 0; k <= N; ++k) b[k] = Dd * charpoly[k];
  for (int k = 1; k <= N; ++k) b[k] += c.C.dot(adj[k - 1] * Bd);
  return FilterState(b, charpoly, Ts);
}

}  // namespace detail

/// Discretizes a proper transfer function at sample period Ts.
inline FilterState discretize(const TransferFunction& tf, double Ts, Discretization method = Discretization::tustin) {
  if (!tf.proper()) throw std::invalid_argument("discretize: transfer function " + tf.to_string() + " is improper");
  if (!(Ts > 0.0)) throw std::invalid_argument("discretize: sample period must be > 0");
  if (tf.order() > kMaxFilterOrder) throw std::invalid_argument("discretize: order exceeds supported maximum");
  return method == Discretization::tustin ? detail::tustin(tf, Ts) : detail::triangle_hold(tf, Ts);
}

/// Six independent scalar sections, one per task axis.
class FilterBank6 {
 public:
  FilterBank6() = default;
  explicit FilterBank6(const std::array<FilterState, 6>& f) : f_(f) {}
  FilterBank6(const TransferFunction& tf, double Ts, Discretization m = Discretization::tustin) {
    const FilterState s = discretize(tf, Ts, m);
    f_.fill(s);
  }

  Vec6 step(const Vec6& u) {
    Vec6 y;
    for (int i = 0; i < 6; ++i) y[i] = f_[i].step(u[i]);
    return y;
  }
  [[nodiscard]] Vec6 preview(const Vec6& u) const {
    Vec6 y;
    for (int i = 0; i < 6; ++i) y[i] = f_[i].preview(u[i]);
    return y;
  }
  [[nodiscard]] Vec6 state_output() const {
    Vec6 y;
    for (int i = 0; i < 6; ++i) y[i] = f_[i].state_output();
    return y;
  }
  [[nodiscard]] Vec6 feedthrough() const {
    Vec6 d;
    for (int i = 0; i < 6; ++i) d[i] = f_[i].D();
    return d;
  }
  void advance(const Vec6& u) {
    for (int i = 0; i < 6; ++i) f_[i].advance(u[i]);
  }
  void reset() {
    for (auto& f : f_) f.reset();
  }
  [[nodiscard]] const FilterState& axis(int i) const { return f_[i]; }

 private:
  std::array<FilterState, 6> f_;
};

}  // namespace mmude
