#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"
#include "specfun.hpp"

namespace localfrac::kernels {

struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double t) const { return t > lo && t < hi; }
};

enum class AlphaLimitTag { ClassicalSlope, NonClassical, Other };

inline std::string_view to_string(AlphaLimitTag tag) {
  switch (tag) {
    case AlphaLimitTag::ClassicalSlope: return "classical_slope";
    case AlphaLimitTag::NonClassical: return "non_classical";
    case AlphaLimitTag::Other: return "other";
  }
  return "other";
}

// Increment-scaling function F(t, alpha) of the generalized derivative.
// Every built-in lives on t in (0, inf).  The nominal operator order is
// alpha in (0, 1]; evaluation additionally admits alpha = 0 (the weighted
// family splits the order as alpha + beta = 1, so beta = 1 lands there) and
// alpha > 1 (higher-order difference operators reuse kernels as their
// step-scaling function T).
class Kernel {
 public:
  using EvalFn = std::function<double(double t, double alpha)>;
  using SymbolicFn = std::function<std::optional<expr::Expression>(double alpha)>;

  Kernel() = default;
  Kernel(std::string name, EvalFn f, AlphaLimitTag tag, std::string tag_description)
      : name_(std::move(name)),
        f_(std::move(f)),
        tag_(tag),
        tag_description_(std::move(tag_description)) {}

  const std::string& name() const { return name_; }
  const std::vector<std::pair<std::string, double>>& params() const { return params_; }
  Interval t_domain() const { return domain_; }
  AlphaLimitTag limit_alpha_to_1() const { return tag_; }
  const std::string& limit_description() const { return tag_description_; }

  // F(t, alpha); validates the domain and the positivity invariant.
  double eval(double t, double alpha) const {
    check_args(t, alpha);
    const double v = f_(t, alpha);
    if (!std::isfinite(v))
      throw OverflowError("kernel '" + name_ + "' overflows at t = " + std::to_string(t) +
                          ", alpha = " + std::to_string(alpha));
    if (!(v > 0.0))
      throw DomainError("kernel '" + name_ + "' is not positive at t = " +
                        std::to_string(t) + ", alpha = " + std::to_string(alpha));
    return v;
  }

  // 1/F(t, alpha), the weight of the companion integral.  Kernels whose
  // weight extends continuously to t = 0 override this, both so the closure
  // endpoint is integrable and so e^{t^-alpha} underflows to 0 instead of
  // erroring near 0.
  double weight(double t, double alpha) const {
    if (weight_) {
      if (!(t >= domain_.lo && t < domain_.hi))
        throw DomainError("kernel '" + name_ + "': t = " + std::to_string(t) +
                          " outside the closure of the domain");
      if (!(alpha >= 0.0 && alpha <= kAlphaMax))
        throw DomainError("kernel '" + name_ + "': alpha out of range");
      return weight_(t, alpha);
    }
    return 1.0 / eval(t, alpha);
  }

  // F(t, alpha) as an expression in t for a fixed alpha, when representable
  // in the expression grammar.
  std::optional<expr::Expression> symbolic(double alpha) const {
    if (!symbolic_) return std::nullopt;
    return symbolic_(alpha);
  }

  Kernel& with_params(std::vector<std::pair<std::string, double>> p) {
    params_ = std::move(p);
    return *this;
  }
  Kernel& with_symbolic(SymbolicFn s) {
    symbolic_ = std::move(s);
    return *this;
  }
  Kernel& with_weight(EvalFn w) {
    weight_ = std::move(w);
    return *this;
  }

  static constexpr double kAlphaMax = 64.0;

 private:
  void check_args(double t, double alpha) const {
    if (!domain_.contains(t))
      throw DomainError("kernel '" + name_ + "': t = " + std::to_string(t) +
                        " outside domain (0, inf)");
    if (!(alpha >= 0.0 && alpha <= kAlphaMax))
      throw DomainError("kernel '" + name_ + "': alpha = " + std::to_string(alpha) +
                        " outside [0, " + std::to_string(kAlphaMax) + "]");
  }

  std::string name_;
  std::vector<std::pair<std::string, double>> params_;
  EvalFn f_;
  AlphaLimitTag tag_ = AlphaLimitTag::Other;
  std::string tag_description_;
  Interval domain_{};
  SymbolicFn symbolic_;
  EvalFn weight_;
};

inline double kernel_eval(const Kernel& k, double t, double alpha) {
  return k.eval(t, alpha);
}

namespace detail {

inline expr::Expression tvar() { return expr::Expression::variable("t"); }

}  // namespace detail

// t^(1-alpha): the conformable kernel, classical slope at alpha = 1.
inline Kernel make_conformable() {
  Kernel k("conformable",
           [](double t, double a) { return std::pow(t, 1.0 - a); },
           AlphaLimitTag::ClassicalSlope, "F(t,1) = 1 recovers the classical slope");
  k.with_symbolic([](double a) -> std::optional<expr::Expression> {
    return expr::pow(detail::tvar(), 1.0 - a);
  });
  k.with_weight([](double t, double a) { return std::pow(t, a - 1.0); });
  return k;
}

// e^{t^-alpha}: does not reduce to the classical slope as alpha -> 1.
inline Kernel make_nonconformable_exp() {
  Kernel k("nonconformable_exp",
           [](double t, double a) {
             const double p = std::pow(t, -a);
             if (p > 700.0)
               throw OverflowError("kernel 'nonconformable_exp': e^(t^-alpha) overflows at t = " +
                                   std::to_string(t));
             return std::exp(p);
           },
           AlphaLimitTag::NonClassical, "F(t,1) = e^(1/t) != 1");
  k.with_symbolic([](double a) -> std::optional<expr::Expression> {
    return expr::exp(expr::pow(detail::tvar(), -a));
  });
  k.with_weight([](double t, double a) { return std::exp(-std::pow(t, -a)); });
  return k;
}

// 1/t^alpha: derivative decays to 0 as t -> inf for bounded f'.
inline Kernel make_reciprocal_power() {
  Kernel k("reciprocal_power",
           [](double t, double a) { return std::pow(t, -a); },
           AlphaLimitTag::NonClassical, "F(t,1) = 1/t");
  k.with_symbolic([](double a) -> std::optional<expr::Expression> {
    return expr::pow(detail::tvar(), -a);
  });
  k.with_weight([](double t, double a) { return std::pow(t, a); });
  return k;
}

// 1 + 1/t^alpha: approaches the classical derivative as t -> inf.
inline Kernel make_one_plus_reciprocal() {
  Kernel k("one_plus_reciprocal",
           [](double t, double a) { return 1.0 + std::pow(t, -a); },
           AlphaLimitTag::Other, "classical only in the t -> inf limit");
  k.with_symbolic([](double a) -> std::optional<expr::Expression> {
    return expr::Expression::constant(1.0) + expr::pow(detail::tvar(), -a);
  });
  k.with_weight([](double t, double a) { return 1.0 / (1.0 + std::pow(t, -a)); });
  return k;
}

// t^alpha E_{1,alpha+1}(a t): the Mellin-Ross kernel.
inline Kernel make_mellin_ross(double a) {
  Kernel k("mellin_ross:a=" + expr::Expression::constant(a).render(),
           [a](double t, double al) {
             return std::pow(t, al) * specfun::mittag_leffler(1.0, al + 1.0, a * t);
           },
           AlphaLimitTag::Other, "F(t,1) = t E_{1,2}(a t)");
  k.with_params({{"a", a}});
  return k;
}

// t^alpha E_{alpha+1,alpha+1}(beta t^{alpha+1}): the Robotov kernel.
inline Kernel make_robotov(double beta) {
  Kernel k("robotov:beta=" + expr::Expression::constant(beta).render(),
           [beta](double t, double al) {
             return std::pow(t, al) *
                    specfun::mittag_leffler(al + 1.0, al + 1.0, beta * std::pow(t, al + 1.0));
           },
           AlphaLimitTag::Other, "F(t,1) = t E_{2,2}(beta t^2)");
  k.with_params({{"beta", beta}});
  return k;
}

// F == 1: the ordinary derivative.
inline Kernel make_classical() {
  Kernel k("classical", [](double, double) { return 1.0; }, AlphaLimitTag::ClassicalSlope,
           "F == 1, the ordinary derivative for every alpha");
  k.with_symbolic([](double) -> std::optional<expr::Expression> {
    return expr::Expression::constant(1.0);
  });
  return k;
}

// The seven built-ins, in registry order.  Parameterized entries carry the
// documented defaults (mellin_ross a = 1, robotov beta = 1).
inline std::vector<Kernel> builtin_kernels() {
  return {make_conformable(),        make_nonconformable_exp(), make_reciprocal_power(),
          make_one_plus_reciprocal(), make_mellin_ross(1.0),     make_robotov(1.0),
          make_classical()};
}

// Name -> kernel map.  Built-ins are registered once and immutable; user
// kernels may be added under fresh names.  Parameterized kernel instances are
// resolvable with the `name:param=value` syntax.
class KernelRegistry {
 public:
  KernelRegistry() {
    for (Kernel& k : builtin_kernels()) {
      const std::string key = base_name(k.name());
      kernels_.emplace(key, std::move(k));
      builtin_names_.push_back(key);
    }
  }

  static const KernelRegistry& builtins() {
    static const KernelRegistry r;
    return r;
  }

  bool has(const std::string& name) const { return kernels_.count(name) > 0; }

  const Kernel& get(const std::string& name) const {
    auto it = kernels_.find(name);
    if (it == kernels_.end())
      throw std::invalid_argument("unknown kernel '" + name + "'");
    return it->second;
  }

  void register_kernel(Kernel k) {
    const std::string key = k.name();
    if (kernels_.count(key))
      throw std::invalid_argument("kernel name '" + key + "' already registered");
    kernels_.emplace(key, std::move(k));
  }

  // Resolves `name` or `name:param=value`.  Parameterized built-ins
  // (mellin_ross, robotov) accept overrides; everything else must match a
  // registered name exactly.
  Kernel resolve(const std::string& spec) const {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) return get(spec);
    const std::string name = spec.substr(0, colon);
    const std::string assign = spec.substr(colon + 1);
    const auto eq = assign.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("kernel spec '" + spec + "': expected param=value");
    const std::string pname = assign.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(assign.substr(eq + 1), &used);
      if (used != assign.size() - eq - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("kernel spec '" + spec + "': bad numeric value");
    }
    if (name == "mellin_ross" && pname == "a") return make_mellin_ross(value);
    if (name == "robotov" && pname == "beta") return make_robotov(value);
    throw std::invalid_argument("kernel spec '" + spec +
                                "': no parameter '" + pname + "' for kernel '" + name + "'");
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : kernels_) out.push_back(k);
    return out;
  }

  const std::vector<std::string>& builtin_names() const { return builtin_names_; }

 private:
  // registry key drops the parameter suffix of the defaults
  static std::string base_name(const std::string& full) {
    return full.substr(0, full.find(':'));
  }

  std::map<std::string, Kernel> kernels_;
  std::vector<std::string> builtin_names_;
};

}  // namespace localfrac::kernels
