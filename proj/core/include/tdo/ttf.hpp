#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tdo {

/// Seconds, either an absolute time (day offset included) or a duration.
using Seconds = double;

inline constexpr Seconds kDefaultPeriod = 86400.0;

struct Breakpoint {
  Seconds time = 0.0;
  Seconds delay = 0.0;

  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Slope bounds of a delay function: every slope lies in
/// [-lambda_min, lambda_max]. FIFO requires lambda_min < 1.
struct SlopeBounds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

class TtfError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Continuous, periodic, piecewise-linear travel-time function.
///
/// The breakpoints live in [0, period) with strictly increasing times. The
/// function interpolates linearly between consecutive breakpoints and wraps
/// from the last breakpoint to the first one shifted by one period, so the
/// value approaching the period equals the value at 0. A single breakpoint
/// is a constant function.
///
/// Values are immutable once constructed.
class Ttf {
 public:
  Ttf() : Ttf(kDefaultPeriod, 1.0) {}
  Ttf(Seconds period, Seconds constant_delay);
  Ttf(Seconds period, std::vector<Breakpoint> points);

  static Ttf constant(Seconds period, Seconds delay) { return Ttf(period, delay); }

  Seconds period() const { return period_; }
  std::span<const Breakpoint> breakpoints() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool is_constant() const;

  /// Delay for a departure at absolute time t (reduced modulo the period).
  Seconds eval(Seconds t) const;
  Seconds arrival(Seconds t) const { return t + eval(t); }

  Seconds min_delay() const;
  Seconds max_delay() const;

  /// Same shape, every delay increased by offset.
  Ttf shifted(Seconds offset) const;

  /// Drops breakpoints that are collinear with their cyclic neighbours.
  Ttf simplified(double tolerance = 1e-9) const;

  friend bool operator==(const Ttf&, const Ttf&) = default;

 private:
  Seconds period_;
  std::vector<Breakpoint> points_;
};

/// Time of day for an absolute time.
Seconds reduce_time(Seconds t, Seconds period);

/// Composition of two legs: h(t) = f(t) + g(t + f(t)).
Ttf link(const Ttf& f, const Ttf& g);

/// Pointwise minimum.
Ttf minimum(const Ttf& f, const Ttf& g);

/// True iff every segment (wrap segment included) has slope > -1.
bool fifo_check(const Ttf& f);

SlopeBounds slope_range(const Ttf& f);

/// Signed slope of every segment, wrap segment last.
std::vector<double> segment_slopes(const Ttf& f);

}  // namespace tdo
