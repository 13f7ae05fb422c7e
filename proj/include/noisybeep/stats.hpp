#pragma once

#include <cstdint>
#include <span>

namespace nbeep {

inline constexpr double kZ95 = 1.959964;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const noexcept { return hi - lo; }
};

/// Wilson score interval for `successes` out of `trials` (trials >= 1).
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95);

/// sqrt(p(1-p)/trials) at p = successes/trials.
double standard_error(std::uint64_t successes, std::uint64_t trials);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares; needs at least two distinct x values.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace nbeep
