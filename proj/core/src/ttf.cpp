#include "tdo/ttf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tdo {

namespace {

constexpr Seconds kTimeMergeTolerance = 1e-7;

struct Segment {
  Breakpoint from;
  Breakpoint to;  // to.time may exceed the period on the wrap segment
};

Segment segment_at(std::span<const Breakpoint> pts, std::size_t i, Seconds period) {
  const auto& a = pts[i];
  if (i + 1 < pts.size()) return {a, pts[i + 1]};
  return {a, {pts.front().time + period, pts.front().delay}};
}

double slope_of(const Segment& s) {
  return (s.to.delay - s.from.delay) / (s.to.time - s.from.time);
}

double interpolate(const Breakpoint& a, const Breakpoint& b, Seconds t) {
  if (b.time == a.time) return a.delay;
  return a.delay + (b.delay - a.delay) * (t - a.time) / (b.time - a.time);
}

std::vector<Seconds> sorted_unique(std::vector<Seconds> times) {
  std::sort(times.begin(), times.end());
  std::vector<Seconds> out;
  out.reserve(times.size());
  for (Seconds t : times) {
    if (out.empty() || t - out.back() > kTimeMergeTolerance) out.push_back(t);
  }
  return out;
}

void check_same_period(const Ttf& f, const Ttf& g) {
  if (f.period() != g.period()) {
    throw TtfError("travel-time functions have mismatched periods: " +
                   std::to_string(f.period()) + " vs " + std::to_string(g.period()));
  }
}

}  // namespace

Seconds reduce_time(Seconds t, Seconds period) {
  Seconds r = std::fmod(t, period);
  if (r < 0) r += period;
  if (r >= period) r = 0;
  return r;
}

Ttf::Ttf(Seconds period, Seconds constant_delay)
    : Ttf(period, std::vector<Breakpoint>{{0.0, constant_delay}}) {}

Ttf::Ttf(Seconds period, std::vector<Breakpoint> points)
    : period_(period), points_(std::move(points)) {
  if (!(period_ > 0) || !std::isfinite(period_)) {
    throw TtfError("period must be positive");
  }
  if (points_.empty()) throw TtfError("travel-time function needs at least one breakpoint");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.time) || !std::isfinite(p.delay)) {
      throw TtfError("non-finite breakpoint");
    }
    if (p.time < 0 || p.time >= period_) {
      throw TtfError("breakpoint time " + std::to_string(p.time) + " outside [0, period)");
    }
    if (p.delay < 0) throw TtfError("negative delay " + std::to_string(p.delay));
    if (i > 0 && !(p.time > points_[i - 1].time)) {
      throw TtfError("breakpoint times must be strictly increasing");
    }
  }
}

bool Ttf::is_constant() const {
  return std::all_of(points_.begin(), points_.end(),
                     [&](const Breakpoint& p) { return p.delay == points_.front().delay; });
}

Seconds Ttf::eval(Seconds t) const {
  if (points_.size() == 1) return points_.front().delay;
  const Seconds tau = reduce_time(t, period_);
  auto it = std::upper_bound(points_.begin(), points_.end(), tau,
                             [](Seconds v, const Breakpoint& p) { return v < p.time; });
  if (it == points_.begin()) {
    Breakpoint prev = points_.back();
    prev.time -= period_;
    return interpolate(prev, points_.front(), tau);
  }
  if (it == points_.end()) {
    Breakpoint next = points_.front();
    next.time += period_;
    return interpolate(points_.back(), next, tau);
  }
  return interpolate(*(it - 1), *it, tau);
}

Seconds Ttf::min_delay() const {
  return std::min_element(points_.begin(), points_.end(),
                          [](const auto& a, const auto& b) { return a.delay < b.delay; })
      ->delay;
}

Seconds Ttf::max_delay() const {
  return std::max_element(points_.begin(), points_.end(),
                          [](const auto& a, const auto& b) { return a.delay < b.delay; })
      ->delay;
}

Ttf Ttf::shifted(Seconds offset) const {
  auto pts = points_;
  for (auto& p : pts) p.delay += offset;
  return Ttf(period_, std::move(pts));
}

Ttf Ttf::simplified(double tolerance) const {
  if (points_.size() < 2) return *this;
  const auto k = points_.size();
  auto collinear = [&](const Breakpoint& a, const Breakpoint& b, const Breakpoint& c) {
    const double expected = interpolate(a, c, b.time);
    return std::abs(expected - b.delay) <= tolerance * std::max(1.0, std::abs(b.delay));
  };
  std::vector<Breakpoint> out{points_.front()};
  for (std::size_t i = 1; i < k; ++i) {
    Breakpoint next = (i + 1 < k) ? points_[i + 1]
                                  : Breakpoint{points_.front().time + period_, points_.front().delay};
    if (!collinear(out.back(), points_[i], next)) out.push_back(points_[i]);
  }
  if (out.size() >= 2) {
    Breakpoint prev = out.back();
    prev.time -= period_;
    if (collinear(prev, out.front(), out[1])) out.erase(out.begin());
  }
  return Ttf(period_, std::move(out));
}

std::vector<double> segment_slopes(const Ttf& f) {
  const auto pts = f.breakpoints();
  if (pts.size() == 1) return {0.0};
  std::vector<double> slopes;
  slopes.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) slopes.push_back(slope_of(segment_at(pts, i, f.period())));
  return slopes;
}

bool fifo_check(const Ttf& f) {
  const auto slopes = segment_slopes(f);
  return std::all_of(slopes.begin(), slopes.end(), [](double s) { return s > -1.0; });
}

SlopeBounds slope_range(const Ttf& f) {
  const auto slopes = segment_slopes(f);
  const auto [lo, hi] = std::minmax_element(slopes.begin(), slopes.end());
  return {std::max(0.0, -*lo), std::max(0.0, *hi)};
}

Ttf link(const Ttf& f, const Ttf& g) {
  check_same_period(f, g);
  const Seconds period = f.period();
  const auto fp = f.breakpoints();

  // Arrival-time nodes of f over [0, period]; strictly increasing under FIFO.
  std::vector<Breakpoint> arrival_nodes;  // (departure, arrival)
  arrival_nodes.reserve(fp.size() + 2);
  const Seconds f0 = f.eval(0.0);
  arrival_nodes.push_back({0.0, f0});
  for (const auto& p : fp) {
    if (p.time > 0.0) arrival_nodes.push_back({p.time, p.time + p.delay});
  }
  arrival_nodes.push_back({period, period + f0});

  std::vector<Seconds> candidates;
  candidates.reserve(fp.size() + g.size());
  for (const auto& p : fp) candidates.push_back(p.time);

  for (const auto& q : g.breakpoints()) {
    // representative of q.time's class in [f0, f0 + period)
    Seconds target = q.time + std::ceil((f0 - q.time) / period) * period;
    if (target >= f0 + period) target -= period;
    auto it = std::upper_bound(arrival_nodes.begin(), arrival_nodes.end(), target,
                               [](Seconds v, const Breakpoint& n) { return v < n.delay; });
    if (it == arrival_nodes.begin()) continue;
    if (it == arrival_nodes.end()) it = arrival_nodes.end() - 1;
    const auto& a = *(it - 1);
    const auto& b = *it;
    Seconds t = a.time;
    if (b.delay > a.delay) t = a.time + (target - a.delay) * (b.time - a.time) / (b.delay - a.delay);
    if (t >= period) t -= period;
    if (t < 0) t = 0;
    candidates.push_back(t);
  }

  std::vector<Breakpoint> out;
  for (Seconds t : sorted_unique(std::move(candidates))) {
    if (t >= period) continue;
    const Seconds df = f.eval(t);
    out.push_back({t, df + g.eval(t + df)});
  }
  return Ttf(period, std::move(out)).simplified();
}

Ttf minimum(const Ttf& f, const Ttf& g) {
  check_same_period(f, g);
  const Seconds period = f.period();
  std::vector<Seconds> times;
  for (const auto& p : f.breakpoints()) times.push_back(p.time);
  for (const auto& p : g.breakpoints()) times.push_back(p.time);
  times = sorted_unique(std::move(times));

  std::vector<Seconds> all = times;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Seconds a = times[i];
    const Seconds b = (i + 1 < times.size()) ? times[i + 1] : times.front() + period;
    const double da = f.eval(a) - g.eval(a);
    const double db = f.eval(b) - g.eval(b);
    if ((da < 0 && db > 0) || (da > 0 && db < 0)) {
      Seconds cross = a + (b - a) * da / (da - db);
      all.push_back(reduce_time(cross, period));
    }
  }
  all = sorted_unique(std::move(all));

  std::vector<Breakpoint> out;
  out.reserve(all.size());
  for (Seconds t : all) out.push_back({t, std::min(f.eval(t), g.eval(t))});
  return Ttf(period, std::move(out)).simplified();
}

}  // namespace tdo
