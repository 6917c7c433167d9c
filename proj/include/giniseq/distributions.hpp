#pragma once

#include <string>

#include "giniseq/rng.hpp"

namespace giniseq {

enum class IncomeFamily { Gamma, Pareto, Lognormal };

// Household income law. Parameterizations:
//   Gamma(shape, scale), Pareto(x_m, a), Lognormal(meanlog, sdlog).
class IncomeDistribution {
 public:
  IncomeDistribution(IncomeFamily family, double p1, double p2);

  // Parses e.g. "gamma:2.649,0.84", "pareto:20000,5", "lognormal:2.185,0.562".
  static IncomeDistribution parse(const std::string& text);

  double sample(Rng& rng) const;

  // Inverse CDF.
  double quantile(double p) const;

  // Closed-form population Gini index of the law.
  double analytic_gini() const;

  IncomeFamily family() const { return family_; }
  double param1() const { return p1_; }
  double param2() const { return p2_; }
  std::string to_string() const;

 private:
  IncomeFamily family_;
  double p1_;
  double p2_;
};

}  // namespace giniseq
