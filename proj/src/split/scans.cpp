// Linear-scan techniques: temporal gaps, bins and per-record label transitions.

#include <algorithm>
#include <chrono>

#include "multiseg/stats.hpp"
#include "multiseg/technique.hpp"

namespace multiseg::techniques {
namespace {

constexpr Timestamp kDayMs = 86'400'000;

Timestamp floor_div(Timestamp a, Timestamp b) {
  Timestamp q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Smallest calendar boundary strictly after `x` (UTC).
Timestamp next_calendar_boundary(Timestamp x, CalendarUnit unit) {
  const Timestamp day = floor_div(x, kDayMs);
  switch (unit) {
    case CalendarUnit::day:
      return (day + 1) * kDayMs;
    case CalendarUnit::week: {
      // 1970-01-01 was a Thursday; weekday 0 is Monday.
      const Timestamp weekday = ((day + 3) % 7 + 7) % 7;
      return (day - weekday + 7) * kDayMs;
    }
    case CalendarUnit::month: {
      using namespace std::chrono;
      const year_month_day ymd{sys_days{days{day}}};
      const year_month next = year_month{ymd.year(), ymd.month()} + months{1};
      const auto first = sys_days{next / std::chrono::day{1}};
      return static_cast<Timestamp>(first.time_since_epoch().count()) * kDayMs;
    }
  }
  return x + kDayMs;
}

}  // namespace

SplitIndexList temporal_gaps(std::span<const Timestamp> t, const TemporalGaps& spec) {
  const auto length = static_cast<std::int64_t>(t.size());
  if (t.size() < 3) return SplitIndexList::trivial(length);

  std::vector<double> dt(t.size() - 1);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) dt[i] = static_cast<double>(t[i + 1] - t[i]);
  const double med = stats::median(dt);
  const double mad = stats::mad(dt, med);

  std::vector<std::int64_t> splits;
  for (std::size_t i = 0; i < dt.size(); ++i) {
    const bool anomalous = mad > 0 ? (dt[i] - med) / (stats::kMadScale * mad) > spec.factor
                                   : dt[i] > spec.factor * med;
    // split after local record i+1
    if (anomalous) splits.push_back(static_cast<std::int64_t>(i) + 1);
  }
  return SplitIndexList::from_interior(length, std::move(splits));
}

SplitIndexList bins(std::span<const Timestamp> t, const Bins& spec) {
  const auto length = static_cast<std::int64_t>(t.size());
  std::vector<std::int64_t> splits;
  if (spec.mode == BinMode::count) {
    for (std::int64_t s = spec.width; s < length; s += spec.width) splits.push_back(s);
    return SplitIndexList::from_interior(length, std::move(splits));
  }

  const Timestamp origin = t.front();
  auto next_boundary = [&](Timestamp x) {
    if (spec.mode == BinMode::duration) {
      return origin + (floor_div(x - origin, spec.width) + 1) * spec.width;
    }
    return next_calendar_boundary(x, spec.unit);
  };
  // Jump from boundary to boundary via the first record at or after each one,
  // so empty stretches cost nothing.
  Timestamp boundary = next_boundary(origin);
  while (boundary <= t.back()) {
    const auto it = std::lower_bound(t.begin(), t.end(), boundary);
    const auto s = static_cast<std::int64_t>(it - t.begin());
    splits.push_back(s);
    boundary = next_boundary(*it);
  }
  return SplitIndexList::from_interior(length, std::move(splits));
}

SplitIndexList label_transitions(std::span<const std::int64_t> labels) {
  std::vector<std::int64_t> splits;
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] != labels[i - 1]) splits.push_back(static_cast<std::int64_t>(i));
  }
  return SplitIndexList::from_interior(static_cast<std::int64_t>(labels.size()), std::move(splits));
}

SplitIndexList value_range(std::span<const double> v, const ValueRange& spec) {
  std::vector<std::int64_t> inside(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    inside[i] = !is_missing(v[i]) && v[i] >= spec.min && v[i] <= spec.max ? 1 : 0;
  }
  return label_transitions(inside);
}

SplitIndexList categorical_change(std::span<const std::int32_t> codes) {
  // kMissingCode is a category of its own.
  std::vector<std::int64_t> labels(codes.begin(), codes.end());
  return label_transitions(labels);
}

}  // namespace multiseg::techniques
