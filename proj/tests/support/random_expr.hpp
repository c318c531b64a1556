#pragma once

// Random expression text for property tests. Every generated expression is
// defined and smooth on [-1, 1]^k (logs and roots only see shifted positives).

#include <cstddef>
#include <random>
#include <string>
#include <vector>

namespace polyham::testing {

inline std::string random_constant(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(1, 9);
  const int v = d(rng);
  return (rng() % 3 == 0) ? std::to_string(v) + ".5" : std::to_string(v);
}

inline std::string random_smooth(std::mt19937_64& rng, const std::vector<std::string>& vars, int depth) {
  std::uniform_int_distribution<std::size_t> pick_var(0, vars.size() - 1);
  if (depth == 0 || rng() % 4 == 0) {
    return rng() % 3 == 0 ? random_constant(rng) : vars[pick_var(rng)];
  }
  auto sub = [&] { return random_smooth(rng, vars, depth - 1); };
  switch (rng() % 14) {
    case 0: return sub() + " + " + sub();
    case 1: return sub() + " - " + sub();
    case 2: return "(" + sub() + ")*(" + sub() + ")";
    case 3: return "(" + sub() + ")/(2 + cos(" + sub() + "))";
    case 4: return "sin(" + sub() + ")";
    case 5: return "cos(" + sub() + ")";
    case 6: return "exp(0.5*sin(" + sub() + "))";
    case 7: return "log(1 + (" + sub() + ")^2)";
    case 8: return "sqrt(2 + sin(" + sub() + "))";
    case 9: return "sinh(0.5*cos(" + sub() + "))";
    case 10: return "cosh(0.5*sin(" + sub() + "))";
    case 11: return "tan(0.4*sin(" + sub() + "))";
    case 12: return "(" + sub() + ")^" + std::to_string(2 + rng() % 2);
    default: return "-(" + sub() + ")";
  }
}

// Polynomial of total degree <= max_degree with small integer coefficients.
inline std::string random_polynomial(std::mt19937_64& rng, const std::vector<std::string>& vars,
                                     int max_degree) {
  std::string out;
  const int terms = 2 + static_cast<int>(rng() % 5);
  for (int t = 0; t < terms; ++t) {
    int budget = static_cast<int>(rng() % (max_degree + 1));
    std::string term = std::to_string(1 + rng() % 7);
    while (budget > 0) {
      const auto& v = vars[rng() % vars.size()];
      const int e = 1 + static_cast<int>(rng() % budget);
      term += "*" + v + (e > 1 ? "^" + std::to_string(e) : "");
      budget -= e;
    }
    out += (t == 0 ? "" : (rng() % 2 ? " + " : " - ")) + term;
  }
  return out;
}

}  // namespace polyham::testing
