#pragma once

#include <string>
#include <vector>

#include "expr.hpp"

namespace localfrac::corpus {

struct Entry {
  std::string name;
  expr::Expression f;
};

// The default verification corpus: smooth functions on t in [0.25, 5] that
// exercise powers, oscillation, growth, decay, quotients, and constants.
inline const std::vector<Entry>& default_corpus() {
  static const std::vector<Entry> c = [] {
    std::vector<Entry> v;
    for (const char* src : {"t", "t^2", "t^3", "t^0.5", "sin(t)", "cos(t)", "exp(t)",
                            "ln(t)", "1/(1+t^2)", "t*sin(t)", "exp(-t)", "7"})
      v.push_back({src, expr::parse(src)});
    return v;
  }();
  return c;
}

inline constexpr double kDomainLo = 0.25;
inline constexpr double kDomainHi = 5.0;

}  // namespace localfrac::corpus
