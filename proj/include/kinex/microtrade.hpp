#ifndef KINEX_MICROTRADE_HPP_
#define KINEX_MICROTRADE_HPP_

#include <array>
#include <cmath>
#include <utility>

#include "kinex/core.hpp"

// Two-agent, two-good exchange with Cobb-Douglas preferences over
// (good 1, good 2, money). Agent 1 produces q1 units of good 1, agent 2
// produces q2 units of good 2; money is the numeraire.

namespace kinex {

/// Cobb-Douglas exponents (good 1, good 2, money). Sum to one.
struct AgentPrefs {
  double a1 = 0.0;
  double a2 = 0.0;
  double lambda = 0.0;

  AgentPrefs() = default;
  AgentPrefs(double a1_, double a2_, double lambda_) : a1(a1_), a2(a2_), lambda(lambda_) {
    detail::require(a1 > 0.0 && a2 > 0.0 && lambda > 0.0,
                    "Cobb-Douglas exponents must be strictly positive");
    detail::require(std::abs(a1 + a2 + lambda - 1.0) <= 1e-12, "exponents must sum to one");
  }
};

struct TradeSetup {
  AgentPrefs prefs_1;
  AgentPrefs prefs_2;
  double m1 = 1.0;
  double m2 = 1.0;
  double q1 = 1.0;
  double q2 = 1.0;

  void validate() const {
    detail::require(prefs_1.a1 > 0.0 && prefs_1.a2 > 0.0 && prefs_1.lambda > 0.0 &&
                        prefs_2.a1 > 0.0 && prefs_2.a2 > 0.0 && prefs_2.lambda > 0.0,
                    "degenerate preferences");
    detail::require(prefs_1.lambda == prefs_2.lambda, "both agents must share the money exponent");
    detail::require(std::isfinite(m1) && m1 >= 0.0 && std::isfinite(m2) && m2 >= 0.0,
                    "money holdings must be non-negative");
    detail::require(std::isfinite(q1) && q1 > 0.0 && std::isfinite(q2) && q2 > 0.0,
                    "endowments of goods must be positive");
  }
};

struct Demands {
  double x1 = 0.0;
  double x2 = 0.0;
  double m = 0.0;
};

struct ClearingOutcome {
  double p1 = 0.0;
  double p2 = 0.0;
  Demands agent1;  // x1*, x2*, m1*
  Demands agent2;  // y1*, y2*, m2*
  double m1_next = 0.0;
  double m2_next = 0.0;
  /// theta[i][j]: share of M_j flowing into agent i beyond the saved fraction.
  std::array<std::array<double, 2>, 2> theta{};
};

/// Utility-maximizing bundle for budget `wealth` at prices (p1, p2).
inline Demands solve_demands(const AgentPrefs& prefs, double wealth, double p1, double p2) {
  detail::require(std::isfinite(p1) && p1 > 0.0 && std::isfinite(p2) && p2 > 0.0,
                  "prices must be positive");
  detail::require(std::isfinite(wealth) && wealth > 0.0, "wealth must be positive");
  return {prefs.a1 * wealth / p1, prefs.a2 * wealth / p2, prefs.lambda * wealth};
}

/// Closed-form exchange coefficients of the money update
///   m1' = lambda M1 + theta11 M1 + theta12 M2,  m2' = lambda M2 + theta21 M1 + theta22 M2.
inline std::array<std::array<double, 2>, 2> theta_coefficients(const AgentPrefs& a,
                                                                const AgentPrefs& b) {
  const double lambda = a.lambda;
  const double denom = 1.0 - a.a1 + b.a1;
  return {{{(lambda * a.a1 + (1.0 - lambda) * b.a1) / denom, b.a1 / denom},
           {a.a2 / denom, (lambda * b.a2 + (1.0 - lambda) * a.a2) / denom}}};
}

/// Market-clearing prices and the induced money transfer.
///
/// Writing u = p1 q1 and v = p2 q2 (the values of the two endowments), the
/// clearing conditions x1 + y1 = q1 and x2 + y2 = q2 are linear in (u, v):
///   (1 - a1) u - b1 v = a1 M1 + b1 M2
///   -a2 u + (1 - b2) v = a2 M1 + b2 M2
/// and are solved directly. Money demands then give m_i' = lambda (M_i + value_i).
inline ClearingOutcome clear_market(const TradeSetup& setup) {
  setup.validate();
  const AgentPrefs& a = setup.prefs_1;
  const AgentPrefs& b = setup.prefs_2;
  const double rhs1 = a.a1 * setup.m1 + b.a1 * setup.m2;
  const double rhs2 = a.a2 * setup.m1 + b.a2 * setup.m2;
  const double det = (1.0 - a.a1) * (1.0 - b.a2) - b.a1 * a.a2;
  detail::require(det > 0.0, "clearing system is singular");
  const double u = (rhs1 * (1.0 - b.a2) + b.a1 * rhs2) / det;
  const double v = ((1.0 - a.a1) * rhs2 + a.a2 * rhs1) / det;

  ClearingOutcome out;
  out.p1 = u / setup.q1;
  out.p2 = v / setup.q2;
  detail::require(out.p1 > 0.0 && out.p2 > 0.0, "clearing prices are not positive");
  out.agent1 = solve_demands(a, setup.m1 + u, out.p1, out.p2);
  out.agent2 = solve_demands(b, setup.m2 + v, out.p1, out.p2);
  out.m1_next = out.agent1.m;
  out.m2_next = out.agent2.m;
  out.theta = theta_coefficients(a, b);
  return out;
}

/// Money update through the theta coefficients, for comparison with clear_market.
inline std::pair<double, double> theta_update(const TradeSetup& setup) {
  const auto t = theta_coefficients(setup.prefs_1, setup.prefs_2);
  const double lambda = setup.prefs_1.lambda;
  return {lambda * setup.m1 + t[0][0] * setup.m1 + t[0][1] * setup.m2,
          lambda * setup.m2 + t[1][0] * setup.m1 + t[1][1] * setup.m2};
}

/// Random preferences with fixed money exponent: a1 ~ U(0, 1 - lambda),
/// a2 = 1 - lambda - a1, drawn independently for each agent.
inline std::pair<AgentPrefs, AgentPrefs> sample_prefs(RandomSource& rng, double lambda) {
  detail::require(std::isfinite(lambda) && lambda > 0.0 && lambda < 1.0,
                  "lambda must lie in (0, 1) for Cobb-Douglas preferences");
  const double span = 1.0 - lambda;
  auto draw = [&] {
    for (;;) {
      const double a1 = span * rng.uniform_open();
      const double a2 = span - a1;
      if (a1 > 0.0 && a2 > 0.0) return AgentPrefs(a1, a2, lambda);
    }
  };
  AgentPrefs first = draw();
  return {first, draw()};
}

}  // namespace kinex

#endif  // KINEX_MICROTRADE_HPP_
