#pragma once

// Smooth test functions for the critical Stein operator, in u = t sqrt(k).

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

struct TestFunction {
  const char* name;
  std::function<double(double)> f;
  std::function<double(double)> df;
};

inline std::vector<TestFunction> stein_test_family(double k) {
  const double s = std::sqrt(k);
  return {
      {"one", [](double) { return 1.0; }, [](double) { return 0.0; }},
      {"u", [s](double t) { return s * t; }, [s](double) { return s; }},
      {"u2", [s](double t) { return s * s * t * t; }, [s](double t) { return 2 * s * s * t; }},
      {"u3", [s](double t) { return std::pow(s * t, 3); }, [s](double t) { return 3 * s * std::pow(s * t, 2); }},
      {"exp", [s](double t) { return std::exp(-s * t); }, [s](double t) { return -s * std::exp(-s * t); }},
      {"bump", [s](double t) { return std::exp(-std::pow(s * t - 1.0, 2)); },
       [s](double t) { return -2.0 * s * (s * t - 1.0) * std::exp(-std::pow(s * t - 1.0, 2)); }},
      {"sin", [s](double t) { return std::sin(3 * s * t); }, [s](double t) { return 3 * s * std::cos(3 * s * t); }},
      {"u_bump", [s](double t) { return s * t * std::exp(-s * s * t * t); },
       [s](double t) { return s * (1.0 - 2.0 * s * s * t * t) * std::exp(-s * s * t * t); }},
      {"rational", [s](double t) { return 1.0 / (1.0 + s * t); },
       [s](double t) { return -s / std::pow(1.0 + s * t, 2); }},
      {"log", [s](double t) { return std::log1p(s * t); }, [s](double t) { return s / (1.0 + s * t); }},
  };
}

}  // namespace oracle
