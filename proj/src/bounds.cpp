#include "rothe/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rothe/elliptic.hpp"
#include "rothe/errors.hpp"
#include "rothe/numerics.hpp"
#include "rothe/stepper.hpp"

namespace rothe {

double Curve::operator()(double time) const {
  if (time <= t.front()) return y.front();
  if (time >= t.back()) return y.back();
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
  const double h = t[i + 1] - t[i];
  const double s = (time - t[i]) / h;
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  return h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1];
}

double Curve::max() const { return *std::max_element(y.begin(), y.end()); }

namespace {

Curve integrate_scalar(double y0, const std::function<double(double)>& f,
                       double T, int steps) {
  Curve c;
  const double h = T / steps;
  double y = y0;
  c.t.reserve(static_cast<std::size_t>(steps) + 1);
  c.t.push_back(0.0);
  c.y.push_back(y);
  c.dy.push_back(f(y));
  for (int n = 1; n <= steps; ++n) {
    const double k1 = f(y);
    const double k2 = f(y + 0.5 * h * k1);
    const double k3 = f(y + 0.5 * h * k2);
    const double k4 = f(y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    c.t.push_back(T * n / steps);
    c.y.push_back(y);
    c.dy.push_back(f(y));
  }
  return c;
}

}  // namespace

Curve hat_M(double m_bar, const std::function<double(double)>& f_max, double T) {
  if (!(T > 0.0)) throw DomainError("hat_M needs T > 0");
  int steps = 10000;
  Curve coarse = integrate_scalar(m_bar, f_max, T, steps);
  for (int halvings = 0; halvings < 12; ++halvings) {
    steps *= 2;
    Curve fine = integrate_scalar(m_bar, f_max, T, steps);
    const bool done = std::abs(fine.back() - coarse.back()) < 1e-9;
    coarse = std::move(fine);
    if (done) break;
  }
  return coarse;
}

void check_comparison_hypotheses(const Kinetics& kin, double s_lo, double s_hi) {
  if (kin.substrates() != 1) {
    throw DomainError("comparison system is defined for one substrate only");
  }
  constexpr int kPts = 41;
  std::array<double, 1> s{};
  for (int a = 0; a < kPts; ++a) {
    const double m = static_cast<double>(a) / (kPts - 1);
    for (int b = 0; b + 1 < kPts; ++b) {
      const double s0 = s_lo + (s_hi - s_lo) * b / (kPts - 1);
      const double s1 = s_lo + (s_hi - s_lo) * (b + 1) / (kPts - 1);
      s[0] = s0;
      const double f_lo = kin.rate0(m, s);
      s[0] = s1;
      const double f_hi = kin.rate0(m, s);
      if (f_hi < f_lo - 1e-14) {
        std::ostringstream msg;
        msg << "f0(" << m << ", s) decreases in s near s = " << s0;
        throw MonotonicityViolation(msg.str());
      }
    }
  }
  for (int b = 0; b < kPts; ++b) {
    s[0] = s_lo + (s_hi - s_lo) * b / (kPts - 1);
    for (int a = 0; a + 1 < kPts; ++a) {
      const double m0 = static_cast<double>(a) / (kPts - 1);
      const double m1 = static_cast<double>(a + 1) / (kPts - 1);
      if (kin.rate(0, m1, s) > kin.rate(0, m0, s) + 1e-14) {
        std::ostringstream msg;
        msg << "f1(m, " << s[0] << ") increases in m near m = " << m0;
        throw MonotonicityViolation(msg.str());
      }
    }
  }
}

namespace {

using State = std::array<double, 4>;  // checkM, checkS, hatM, hatS

State comparison_rhs(const Kinetics& kin, const State& y) {
  const std::array<double, 1> cs{y[1]};
  const std::array<double, 1> hs{y[3]};
  return {kin.rate0(y[0], cs), kin.rate(0, y[2], cs), kin.rate0(y[2], hs),
          kin.rate(0, y[0], hs)};
}

State rk4(const Kinetics& kin, const State& y, double h) {
  auto axpy = [](const State& a, double c, const State& b) {
    State r;
    for (int i = 0; i < 4; ++i) r[i] = a[i] + c * b[i];
    return r;
  };
  const State k1 = comparison_rhs(kin, y);
  const State k2 = comparison_rhs(kin, axpy(y, 0.5 * h, k1));
  const State k3 = comparison_rhs(kin, axpy(y, 0.5 * h, k2));
  const State k4 = comparison_rhs(kin, axpy(y, h, k3));
  State r;
  for (int i = 0; i < 4; ++i) r[i] = y[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return r;
}

// Crossing time of component c through `level` inside [t, t + h], found by
// bisection on the length of a single RK4 step from the left end.
double crossing(const Kinetics& kin, const State& y, double t, double h, int c,
                double level) {
  double lo = 0.0, hi = h;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (rk4(kin, y, mid)[static_cast<std::size_t>(c)] >= level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return t + 0.5 * (lo + hi);
}

ComparisonCurves integrate_comparison(const State& y0, const Kinetics& kin,
                                      double T, int steps) {
  ComparisonCurves out;
  const double level = 1.0 - kEtaStop;
  const double h = T / steps;
  State y = y0;
  auto record = [&](double t) {
    out.t.push_back(t);
    out.checkM.push_back(y[0]);
    out.checkS.push_back(y[1]);
    out.hatM.push_back(y[2]);
    out.hatS.push_back(y[3]);
  };
  record(0.0);
  if (y[2] >= level) out.hat_hit = 0.0;
  if (y[0] >= level) {
    out.check_hit = 0.0;
    return out;
  }
  for (int n = 1; n <= steps; ++n) {
    const double t = T * (n - 1) / steps;
    const State next = rk4(kin, y, h);
    if (!out.hat_hit && next[2] >= level) out.hat_hit = crossing(kin, y, t, h, 2, level);
    if (next[0] >= level) {
      out.check_hit = crossing(kin, y, t, h, 0, level);
      y = next;
      record(T * n / steps);
      return out;
    }
    y = next;
    record(T * n / steps);
  }
  return out;
}

}  // namespace

ComparisonCurves comparison_system(double m_lo, double s_lo, double m_hi,
                                   double s_hi, const Kinetics& kin, double T) {
  if (!(T > 0.0)) throw DomainError("comparison system needs T > 0");
  if (m_lo > m_hi || s_lo > s_hi) throw DomainError("comparison system needs lower <= upper data");
  check_comparison_hypotheses(kin, std::min(s_lo, 0.0), std::max(s_hi, 1.0));
  const State y0{m_lo, s_lo, m_hi, s_hi};
  int steps = 10000;
  ComparisonCurves coarse = integrate_comparison(y0, kin, T, steps);
  // One halving check; keep halving while the endpoint or hit time moves.
  for (int halvings = 0; halvings < 8; ++halvings) {
    steps *= 2;
    ComparisonCurves fine = integrate_comparison(y0, kin, T, steps);
    double change = std::abs(fine.hatM.back() - coarse.hatM.back()) +
                    std::abs(fine.checkM.back() - coarse.checkM.back());
    if (fine.check_hit.has_value() != coarse.check_hit.has_value()) {
      change = 1.0;
    } else if (fine.check_hit) {
      change = std::abs(*fine.check_hit - *coarse.check_hit);
    }
    coarse = std::move(fine);
    if (change < 1e-9) break;
  }
  return coarse;
}

std::string Classification::describe() const {
  char buf[96];
  switch (verdict) {
    case Verdict::BlowUpPredicted:
      std::snprintf(buf, sizeof buf, "BlowUpPredicted(%.16e)", value);
      return buf;
    case Verdict::BoundedBy:
      std::snprintf(buf, sizeof buf, "BoundedBy(%.16e)", value);
      return buf;
    case Verdict::Indeterminate:
      break;
  }
  return "Indeterminate";
}

Classification classify(const ClassifyInput& in) {
  if (in.check_hit) return {Verdict::BlowUpPredicted, *in.check_hit};
  if (in.delta_margin > 0.0 && in.hat_max <= 1.0 - in.delta_margin) {
    return {Verdict::BoundedBy, 1.0 - in.delta_margin};
  }
  if (in.barrier_delta && *in.barrier_delta > 0.0) {
    return {Verdict::BoundedBy, 1.0 - *in.barrier_delta};
  }
  return {};
}

double delta_margin(const Curve& hat) { return 1.0 - hat.max(); }

Barrier barrier_delta(const StructuredGrid& g, const KirchhoffTransform& phi,
                      const std::function<double(double)>& f_max,
                      const Curve& hat, double m_bar) {
  Barrier b;
  for (double m : hat.y) b.c_hat = std::max(b.c_hat, f_max(m));
  b.u_hat = solve_poisson_barrier(g, b.c_hat);
  b.u_max = *std::max_element(b.u_hat.begin(), b.u_hat.end()) + m_bar;
  if (b.u_max > phi.max_value()) {
    std::ostringstream msg;
    msg << "barrier value " << b.u_max << " exceeds Phi(1 - 1e-8) = "
        << phi.max_value() << "; no bound below 1 can be certified";
    throw RangeError(msg.str());
  }
  b.delta = 1.0 - phi.inverse(b.u_max);
  return b;
}

namespace {

// Hit time of M = 1 for the uniform cellulolytic system at a fixed step, or
// nullopt once M' <= 0.
std::optional<double> uniform_hit(double m_bar, double s_bar, double lambda,
                                  double h) {
  auto rhs = [lambda](const std::array<double, 2>& y) {
    const double sp = std::max(y[1], 0.0);
    const double sigma = sp / (1.0 + sp);
    return std::array<double, 2>{(sigma - lambda) * y[0], -sigma * y[0]};
  };
  auto step = [&](const std::array<double, 2>& y, double dt) {
    auto add = [](const std::array<double, 2>& a, double c, const std::array<double, 2>& b) {
      return std::array<double, 2>{a[0] + c * b[0], a[1] + c * b[1]};
    };
    const auto k1 = rhs(y);
    const auto k2 = rhs(add(y, 0.5 * dt, k1));
    const auto k3 = rhs(add(y, 0.5 * dt, k2));
    const auto k4 = rhs(add(y, dt, k3));
    return std::array<double, 2>{
        y[0] + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        y[1] + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
  };
  std::array<double, 2> y{m_bar, s_bar};
  double t = 0.0;
  constexpr double kHorizon = 1e4;
  while (t < kHorizon) {
    if (rhs(y)[0] <= 0.0) return std::nullopt;
    const auto next = step(y, h);
    if (next[0] >= 1.0) {
      double lo = 0.0, hi = h;
      for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (step(y, mid)[0] >= 1.0 ? hi : lo) = mid;
      }
      return t + 0.5 * (lo + hi);
    }
    y = next;
    t += h;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> constant_state_blowup_time(double m_bar, double s_bar,
                                                 double lambda) {
  if (!(m_bar > 0.0 && m_bar < 1.0 && s_bar > 0.0 && lambda >= 0.0)) {
    throw DomainError("constant-state blow-up needs M in (0,1), S > 0, lambda >= 0");
  }
  if (lambda == 0.0) {
    const double c = m_bar + s_bar;
    if (c <= 1.0) return std::nullopt;
    return numerics::adaptive_simpson(
        [c](double m) { return (1.0 + c - m) / (m * (c - m)); }, m_bar, 1.0, 1e-13);
  }
  double h = 1e-3;
  std::optional<double> prev = uniform_hit(m_bar, s_bar, lambda, h);
  for (int i = 0; i < 10; ++i) {
    h *= 0.5;
    const std::optional<double> next = uniform_hit(m_bar, s_bar, lambda, h);
    if (prev.has_value() == next.has_value() &&
        (!next || std::abs(*next - *prev) < 1e-9)) {
      return next;
    }
    prev = next;
  }
  return prev;
}

}  // namespace rothe
