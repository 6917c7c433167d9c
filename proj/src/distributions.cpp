#include "giniseq/distributions.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "giniseq/math.hpp"

namespace giniseq {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

IncomeDistribution::IncomeDistribution(IncomeFamily family, double p1,
                                       double p2)
    : family_(family), p1_(p1), p2_(p2) {
  switch (family_) {
    case IncomeFamily::Gamma:
      if (!(p1 > 0.0) || !(p2 > 0.0)) {
        throw std::invalid_argument("Gamma requires shape > 0 and scale > 0");
      }
      break;
    case IncomeFamily::Pareto:
      if (!(p1 > 0.0)) {
        throw std::invalid_argument("Pareto requires x_m > 0");
      }
      if (!(p2 > 1.0)) {
        throw std::invalid_argument("Pareto requires a > 1");
      }
      break;
    case IncomeFamily::Lognormal:
      if (!std::isfinite(p1) || !(p2 > 0.0)) {
        throw std::invalid_argument(
            "Lognormal requires finite meanlog and sdlog > 0");
      }
      break;
  }
}

IncomeDistribution IncomeDistribution::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("distribution must look like family:p1,p2");
  }
  std::string name = text.substr(0, colon);
  std::string rest = text.substr(colon + 1);
  auto comma = rest.find(',');
  if (comma == std::string::npos) {
    throw std::invalid_argument("distribution must have two parameters");
  }
  double p1 = 0.0;
  double p2 = 0.0;
  try {
    p1 = std::stod(rest.substr(0, comma));
    p2 = std::stod(rest.substr(comma + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("could not parse distribution parameters: " +
                                text);
  }
  if (name == "gamma") return {IncomeFamily::Gamma, p1, p2};
  if (name == "pareto") return {IncomeFamily::Pareto, p1, p2};
  if (name == "lognormal") return {IncomeFamily::Lognormal, p1, p2};
  throw std::invalid_argument("unknown income family: " + name);
}

double IncomeDistribution::sample(Rng& rng) const {
  switch (family_) {
    case IncomeFamily::Gamma: {
      std::gamma_distribution<double> d(p1_, p2_);
      return d(rng.engine());
    }
    case IncomeFamily::Pareto: {
      double u = rng.uniform01();
      // Guard u == 0, which would be +inf.
      if (u <= 0.0) u = std::numeric_limits<double>::min();
      return p1_ * std::pow(u, -1.0 / p2_);
    }
    case IncomeFamily::Lognormal: {
      std::lognormal_distribution<double> d(p1_, p2_);
      return d(rng.engine());
    }
  }
  return 0.0;  // unreachable
}

double IncomeDistribution::quantile(double p) const {
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::invalid_argument("quantile: p must be in [0,1)");
  }
  switch (family_) {
    case IncomeFamily::Gamma:
      return p2_ * gamma_quantile(p1_, p);
    case IncomeFamily::Pareto:
      return p1_ * std::pow(1.0 - p, -1.0 / p2_);
    case IncomeFamily::Lognormal:
      if (p == 0.0) return 0.0;
      return std::exp(p1_ + p2_ * normal_quantile(p));
  }
  return 0.0;  // unreachable
}

double IncomeDistribution::analytic_gini() const {
  switch (family_) {
    case IncomeFamily::Gamma:
      return std::exp(std::lgamma(p1_ + 0.5) - std::lgamma(p1_ + 1.0)) /
             std::sqrt(M_PI);
    case IncomeFamily::Pareto:
      return 1.0 / (2.0 * p2_ - 1.0);
    case IncomeFamily::Lognormal:
      return 2.0 * normal_cdf(p2_ / std::sqrt(2.0)) - 1.0;
  }
  return 0.0;  // unreachable
}

std::string IncomeDistribution::to_string() const {
  std::ostringstream os;
  switch (family_) {
    case IncomeFamily::Gamma:
      os << "gamma:";
      break;
    case IncomeFamily::Pareto:
      os << "pareto:";
      break;
    case IncomeFamily::Lognormal:
      os << "lognormal:";
      break;
  }
  os << p1_ << "," << p2_;
  return os.str();
}

}  // namespace giniseq
