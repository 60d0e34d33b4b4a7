#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"
#include "extrapolation.hpp"
#include "kernels.hpp"
#include "specfun.hpp"

namespace localfrac::diffops {

enum class Direction { Plus, Minus, SymmetricAverage };
enum class Side { Left, Right };

struct EvalConfig {
  double base_step = 0.0;  // <= 0 selects 2^-10 * max(1, |t|)
  int levels = 6;          // extrapolation levels, in [2, 12]
  double rel_tol = 1e-7;
  Direction direction = Direction::Plus;

  void validate() const {
    if (levels < 2 || levels > 12)
      throw std::invalid_argument("EvalConfig.levels must lie in [2, 12]");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("EvalConfig.rel_tol must be > 0");
  }

  double step_for(double t) const {
    return base_step > 0.0 ? base_step : std::ldexp(std::max(1.0, std::abs(t)), -10);
  }
};

struct Sample {
  double eps;
  double quotient;
};

struct DerivResult {
  double value = 0.0;
  double error_estimate = std::numeric_limits<double>::infinity();
  bool converged = false;
  std::vector<Sample> samples;
};

// --- operator variants -------------------------------------------------

// N_F^alpha f(t) = lim (f(t + eps F(t,alpha)) - f(t)) / eps
struct AdditiveN {
  kernels::Kernel kernel;
  double alpha;
};

// D^alpha f(t) = lim (f(t e^{eps t^-alpha}) - f(t)) / eps
struct Multiplicative {
  double alpha;
};

// lim_{x->x0} (f(x) - f(x0)) / (x^alpha - x0^alpha)
struct PointQuotient {
  double alpha;
};

// lim Gamma(1+alpha) (f(x) - f(x0)) / |x - x0|^alpha, one side at a time
struct YangQuotient {
  double alpha;
  Side side = Side::Right;
};

// G_T^alpha f(t) = lim h^-n sum_k (-1)^k C(n,k) f(t - k h T(t,alpha)), n = ceil(alpha)
struct HigherOrderG {
  kernels::Kernel step_kernel;
  double alpha;

  int order() const { return std::max(1, static_cast<int>(std::ceil(alpha))); }
};

// D_p^alpha f(t) = lim (f(p(t, eps, alpha)) - f(t)) / eps
struct GeneralP {
  std::function<double(double t, double eps, double alpha)> p;
  std::optional<expr::Expression> p_expr;  // in variables (t, eps, alpha)
  double alpha;
};

inline GeneralP make_general_p(expr::Expression p_expression, double alpha) {
  GeneralP gp;
  gp.p = [e = p_expression](double t, double eps, double alpha_) {
    return e.eval(expr::Bindings{{"t", t}, {"eps", eps}, {"alpha", alpha_}});
  };
  gp.p_expr = std::move(p_expression);
  gp.alpha = alpha;
  return gp;
}

// DH_beta^alpha f(t) = lim (H(eps,beta) f(t + eps F(t,alpha)) - f(t)) / eps,
// with H -> 1 as eps -> 0 and the order split alpha + beta = 1.
struct WeightedDH {
  enum class H { Linear, Power, Exponential };

  kernels::Kernel kernel;
  double alpha;
  double beta;
  H h = H::Linear;
  double r = 1.0;  // exponent of the Power variant

  // H'(0), the coefficient of f in the first-order expansion
  double h_slope() const {
    return h == H::Power ? std::pow(beta, r) : beta;
  }

  double h_at(double eps) const {
    switch (h) {
      case H::Linear: return 1.0 + eps * beta;
      case H::Power: return 1.0 + eps * std::pow(beta, r);
      case H::Exponential: return specfun::mittag_leffler(1.0, 1.0, eps * beta);
    }
    return 1.0;
  }
};

using OperatorSpec = std::variant<AdditiveN, Multiplicative, PointQuotient, YangQuotient,
                                  HigherOrderG, GeneralP, WeightedDH>;

namespace detail {

inline void validate(const OperatorSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AdditiveN>) {
          if (!(s.alpha > 0.0 && s.alpha <= 1.0))
            throw std::invalid_argument("AdditiveN: alpha must lie in (0, 1]");
        } else if constexpr (std::is_same_v<T, Multiplicative>) {
          if (!(s.alpha > 0.0 && s.alpha < 1.0))
            throw std::invalid_argument("Multiplicative: alpha must lie in (0, 1)");
        } else if constexpr (std::is_same_v<T, PointQuotient>) {
          if (!(s.alpha > 0.0 && s.alpha <= 1.0))
            throw std::invalid_argument("PointQuotient: alpha must lie in (0, 1]");
        } else if constexpr (std::is_same_v<T, YangQuotient>) {
          if (!(s.alpha > 0.0 && s.alpha <= 1.0))
            throw std::invalid_argument("YangQuotient: alpha must lie in (0, 1]");
        } else if constexpr (std::is_same_v<T, HigherOrderG>) {
          if (!(s.alpha > 0.0))
            throw std::invalid_argument("HigherOrderG: alpha must be > 0");
        } else if constexpr (std::is_same_v<T, GeneralP>) {
          if (!s.p) throw std::invalid_argument("GeneralP: missing p function");
          if (!(s.alpha > 0.0 && s.alpha < 1.0))
            throw std::invalid_argument("GeneralP: alpha must lie in (0, 1)");
        } else if constexpr (std::is_same_v<T, WeightedDH>) {
          if (std::abs(s.alpha + s.beta - 1.0) > 1e-12)
            throw std::invalid_argument("WeightedDH: requires alpha + beta = 1");
          if (!(s.beta >= 0.0 && s.beta <= 1.0))
            throw std::invalid_argument("WeightedDH: beta must lie in [0, 1]");
          if (s.h == WeightedDH::H::Power && !(s.r > 0.0))
            throw std::invalid_argument("WeightedDH: power variant needs r > 0");
        }
      },
      spec);
}

// Collects quotient samples at eps_j = h0 * 2^-j and Richardson-extrapolates.
// On domain/overflow failures while sampling, h0 is halved up to 8 times
// before the error propagates (increments may step outside the domain).
template <class Quotient>
DerivResult accelerate(Quotient&& q, double h0, const EvalConfig& cfg, int p0, int dp) {
  std::vector<double> qs;
  std::vector<Sample> samples;
  for (int attempt = 0;; ++attempt) {
    try {
      qs.clear();
      samples.clear();
      double eps = h0;
      for (int j = 0; j < cfg.levels; ++j, eps *= 0.5) {
        const double v = q(eps);
        qs.push_back(v);
        samples.push_back({eps, v});
      }
      break;
    } catch (const DomainError&) {
      if (attempt >= 8) throw;
      h0 *= 0.5;
    } catch (const OverflowError&) {
      if (attempt >= 8) throw;
      h0 *= 0.5;
    }
  }
  const auto acc = extrapolation::richardson(qs, 2.0, p0, dp, cfg.rel_tol);
  DerivResult r;
  r.value = acc.value;
  r.error_estimate = acc.error_estimate;
  r.converged = acc.converged && !extrapolation::diverging_tail(qs);
  r.samples = std::move(samples);
  return r;
}

// One-sided or symmetric acceleration of a signed-eps difference quotient.
template <class Quotient>
DerivResult directed_accelerate(Quotient&& q, double h0, const EvalConfig& cfg) {
  switch (cfg.direction) {
    case Direction::Plus:
      return accelerate([&](double e) { return q(e); }, h0, cfg, 1, 1);
    case Direction::Minus:
      return accelerate([&](double e) { return q(-e); }, h0, cfg, 1, 1);
    case Direction::SymmetricAverage:
      return accelerate([&](double e) { return 0.5 * (q(e) + q(-e)); }, h0, cfg, 2, 2);
  }
  throw std::invalid_argument("bad direction");
}

inline double binomial(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

}  // namespace detail

// Numeric evaluation of `spec` applied to a plain callable at t.
inline DerivResult eval_operator(const OperatorSpec& spec,
                                 const std::function<double(double)>& f, double t,
                                 EvalConfig cfg = {}) {
  cfg.validate();
  detail::validate(spec);
  const double h0 = cfg.step_for(t);

  return std::visit(
      [&](const auto& s) -> DerivResult {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AdditiveN>) {
          const double F = s.kernel.eval(t, s.alpha);
          const double f0 = f(t);
          return detail::directed_accelerate(
              [&](double e) { return (f(t + e * F) - f0) / e; }, h0, cfg);
        } else if constexpr (std::is_same_v<T, Multiplicative>) {
          if (!(t > 0.0)) throw DomainError("Multiplicative: t must be > 0");
          const double p = std::pow(t, -s.alpha);
          const double f0 = f(t);
          return detail::directed_accelerate(
              [&](double e) { return (f(t * std::exp(e * p)) - f0) / e; }, h0, cfg);
        } else if constexpr (std::is_same_v<T, PointQuotient>) {
          if (!(t > 0.0)) throw DomainError("PointQuotient: x0 must be > 0");
          const double f0 = f(t);
          const double t_alpha = std::pow(t, s.alpha);
          return detail::directed_accelerate(
              [&](double d) {
                const double denom = std::pow(t + d, s.alpha) - t_alpha;
                if (denom == 0.0) throw DomainError("PointQuotient: degenerate increment");
                return (f(t + d) - f0) / denom;
              },
              h0, cfg);
        } else if constexpr (std::is_same_v<T, YangQuotient>) {
          if (!(t > 0.0) && s.side == Side::Left)
            throw DomainError("YangQuotient: left side needs x0 > 0");
          const double f0 = f(t);
          const double g = specfun::gamma(1.0 + s.alpha);
          const double sgn = s.side == Side::Right ? 1.0 : -1.0;
          std::vector<double> qs;
          std::vector<Sample> samples;
          double d = h0;
          for (int attempt = 0;; ++attempt) {
            try {
              qs.clear();
              samples.clear();
              double dj = d;
              for (int j = 0; j < cfg.levels; ++j, dj *= 0.5) {
                const double v = sgn * g * (f(t + sgn * dj) - f0) / std::pow(dj, s.alpha);
                qs.push_back(v);
                samples.push_back({dj, v});
              }
              break;
            } catch (const DomainError&) {
              if (attempt >= 8) throw;
              d *= 0.5;
            } catch (const OverflowError&) {
              if (attempt >= 8) throw;
              d *= 0.5;
            }
          }
          const auto acc = extrapolation::aitken(qs, cfg.rel_tol);
          DerivResult r;
          r.value = acc.value;
          r.error_estimate = acc.error_estimate;
          // drifting or oscillating quotients report as unconverged, not as errors
          r.converged = acc.converged && !extrapolation::diverging_tail(qs);
          r.samples = std::move(samples);
          return r;
        } else if constexpr (std::is_same_v<T, HigherOrderG>) {
          const int n = s.order();
          const double T_ = s.step_kernel.eval(t, s.alpha);
          std::vector<double> coeff(n + 1);
          for (int k = 0; k <= n; ++k)
            coeff[k] = (k % 2 ? -1.0 : 1.0) * detail::binomial(n, k);
          return detail::accelerate(
              [&](double h) {
                double acc = 0.0;
                for (int k = 0; k <= n; ++k) acc += coeff[k] * f(t - k * h * T_);
                return acc / std::pow(h, n);
              },
              h0, cfg, 1, 1);
        } else if constexpr (std::is_same_v<T, GeneralP>) {
          const double f0 = f(t);
          return detail::directed_accelerate(
              [&](double e) { return (f(s.p(t, e, s.alpha)) - f0) / e; }, h0, cfg);
        } else {  // WeightedDH
          const double F = s.kernel.eval(t, s.alpha);
          const double f0 = f(t);
          return detail::directed_accelerate(
              [&](double e) { return (s.h_at(e) * f(t + e * F) - f0) / e; }, h0, cfg);
        }
      },
      spec);
}

inline DerivResult eval_operator(const OperatorSpec& spec, const expr::Expression& f,
                                 double t, EvalConfig cfg = {}) {
  return eval_operator(spec, [&f](double s) { return f.eval(s); }, t, cfg);
}

// Symbolic closed form of the operator applied to a differentiable f, where
// one exists and the kernel is representable in the expression grammar.
// PointQuotient and YangQuotient have no general closed form.
inline std::optional<expr::Expression> closed_form(const OperatorSpec& spec,
                                                   const expr::Expression& f) {
  detail::validate(spec);
  const expr::Expression t = expr::Expression::variable("t");

  return std::visit(
      [&](const auto& s) -> std::optional<expr::Expression> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AdditiveN>) {
          auto F = s.kernel.symbolic(s.alpha);
          if (!F) return std::nullopt;
          return *F * f.diff();
        } else if constexpr (std::is_same_v<T, Multiplicative>) {
          return expr::pow(t, 1.0 - s.alpha) * f.diff();
        } else if constexpr (std::is_same_v<T, HigherOrderG>) {
          auto T_ = s.step_kernel.symbolic(s.alpha);
          if (!T_) return std::nullopt;
          expr::Expression dn = f;
          for (int i = 0; i < s.order(); ++i) dn = dn.diff();
          return expr::pow(*T_, static_cast<double>(s.order())) * dn;
        } else if constexpr (std::is_same_v<T, GeneralP>) {
          if (!s.p_expr) return std::nullopt;
          // partial of p in eps at eps = 0, with alpha pinned
          const expr::Expression dp =
              s.p_expr->diff("eps")
                  .substitute("eps", expr::Expression::constant(0.0))
                  .substitute("alpha", expr::Expression::constant(s.alpha));
          return dp * f.diff();
        } else if constexpr (std::is_same_v<T, WeightedDH>) {
          auto F = s.kernel.symbolic(s.alpha);
          if (!F) return std::nullopt;
          return *F * f.diff() + expr::Expression::constant(s.h_slope()) * f;
        } else {
          return std::nullopt;
        }
      },
      spec);
}

// Numeric value of the closed form at t; covers every kernel (the symbolic
// route requires a grammar-representable kernel, this one does not).
inline std::optional<double> closed_form_value(const OperatorSpec& spec,
                                               const expr::Expression& f, double t) {
  detail::validate(spec);
  return std::visit(
      [&](const auto& s) -> std::optional<double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AdditiveN>) {
          return s.kernel.eval(t, s.alpha) * f.diff().eval(t);
        } else if constexpr (std::is_same_v<T, Multiplicative>) {
          return std::pow(t, 1.0 - s.alpha) * f.diff().eval(t);
        } else if constexpr (std::is_same_v<T, HigherOrderG>) {
          expr::Expression dn = f;
          for (int i = 0; i < s.order(); ++i) dn = dn.diff();
          return std::pow(s.step_kernel.eval(t, s.alpha), s.order()) * dn.eval(t);
        } else if constexpr (std::is_same_v<T, GeneralP>) {
          double slope;
          if (s.p_expr) {
            slope = s.p_expr->diff("eps").eval(
                expr::Bindings{{"t", t}, {"eps", 0.0}, {"alpha", s.alpha}});
          } else {
            // symmetric-difference limit of (p(t,e,a) - p(t,-e,a)) / 2e
            std::vector<double> qs;
            double e = 1e-4 * std::max(1.0, std::abs(t));
            for (int j = 0; j < 6; ++j, e *= 0.5)
              qs.push_back((s.p(t, e, s.alpha) - s.p(t, -e, s.alpha)) / (2.0 * e));
            slope = extrapolation::richardson(qs, 2.0, 2, 2, 1e-10).value;
          }
          return slope * f.diff().eval(t);
        } else if constexpr (std::is_same_v<T, WeightedDH>) {
          return s.kernel.eval(t, s.alpha) * f.diff().eval(t) + s.h_slope() * f.eval(t);
        } else {
          return std::nullopt;
        }
      },
      spec);
}

// Limit of the operator value as t -> 0+, taken along t_k = 0.5 * 2^-k with
// iterated-Aitken acceleration.  Divergent inner limits or a non-monotone
// tail report converged = false rather than an error.
inline DerivResult eval_at_zero(const OperatorSpec& spec, const expr::Expression& f,
                                EvalConfig cfg = {}) {
  cfg.validate();
  detail::validate(spec);

  constexpr int kOuterSamples = 10;
  std::vector<double> vs;
  std::vector<Sample> samples;
  bool inner_ok = true;
  double tk = 0.5;
  for (int k = 0; k < kOuterSamples; ++k, tk *= 0.5) {
    try {
      const DerivResult inner = eval_operator(spec, f, tk, cfg);
      vs.push_back(inner.value);
      samples.push_back({tk, inner.value});
      inner_ok = inner_ok && inner.converged;
    } catch (const DomainError&) {
      break;  // ran out of evaluable range; extrapolate from what we have
    } catch (const OverflowError&) {
      break;
    }
  }

  DerivResult r;
  r.samples = std::move(samples);
  if (vs.size() < 4) {
    r.value = vs.empty() ? 0.0 : vs.back();
    r.converged = false;
    return r;
  }
  if (extrapolation::diverging_tail(vs)) {
    r.value = vs.back();
    r.error_estimate = std::abs(vs[vs.size() - 1] - vs[vs.size() - 2]);
    r.converged = false;
    return r;
  }
  const auto acc = extrapolation::aitken(vs, cfg.rel_tol);
  r.value = acc.value;
  r.error_estimate = acc.error_estimate;
  bool monotone_tail = true;
  for (std::size_t i = vs.size() - 3; i + 1 < vs.size(); ++i)
    monotone_tail = monotone_tail &&
                    std::abs(vs[i + 1] - vs[i]) <= std::abs(vs[i] - vs[i - 1]) * (1.0 + 1e-9);
  r.converged = acc.converged && inner_ok && monotone_tail;
  return r;
}

// D(fg) - D(f) g - f D(g) at t.  Zero (within tolerance) for Leibniz-obeying
// operators; the weighted DH family has the model value -H'(0) f g.
inline double leibniz_defect(const OperatorSpec& spec, const expr::Expression& f,
                             const expr::Expression& g, double t, EvalConfig cfg = {}) {
  const expr::Expression fg = f * g;
  const double dfg = eval_operator(spec, fg, t, cfg).value;
  const double df = eval_operator(spec, f, t, cfg).value;
  const double dg = eval_operator(spec, g, t, cfg).value;
  return dfg - df * g.eval(t) - f.eval(t) * dg;
}

// N(f o g)(t) - f'(g(t)) N(g)(t); the additive-N family obeys the chain rule
// so this is zero (within tolerance) on smooth inputs.
inline double chain_rule_residual(const OperatorSpec& spec, const expr::Expression& f,
                                  const expr::Expression& g, double t,
                                  EvalConfig cfg = {}) {
  if (!std::holds_alternative<AdditiveN>(spec))
    throw std::invalid_argument("chain_rule_residual: restricted to the additive-N operator");
  const expr::Expression composed = f.substitute("t", g);
  const double lhs = eval_operator(spec, composed, t, cfg).value;
  const double rhs = f.diff().eval(g.eval(t)) * eval_operator(spec, g, t, cfg).value;
  return lhs - rhs;
}

// Fractal mass (b-a)^alpha / Gamma(1+alpha).
inline double mass_function(double alpha, double a, double b) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw DomainError("mass_function: alpha must lie in (0, 1]");
  if (!(b >= a)) throw DomainError("mass_function: requires b >= a");
  return std::pow(b - a, alpha) / specfun::gamma(1.0 + alpha);
}

// Signed cumulative mass: +mass(alpha, a, x) for x >= a, else -mass of |x-a|.
inline double staircase(double alpha, double a, double x) {
  if (x >= a) return mass_function(alpha, a, x);
  return -mass_function(alpha, x, a);
}

}  // namespace localfrac::diffops
