#include <charconv>
#include <set>

#include "multiseg/technique.hpp"

namespace multiseg {
namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

[[noreturn]] void out_of_range(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParameterOutOfRange, what, path);
}

/// Typed access to a params object; remembers which keys were consumed so
/// unknown keys can be reported.
class ParamReader {
 public:
  ParamReader(const json& params, std::string path) : params_(params), path_(std::move(path)) {
    if (!params_.is_object()) out_of_range(path_, "params must be an object");
  }

  bool has(const char* key) const { return params_.contains(key); }

  std::string string(const char* key) {
    const auto& v = at(key);
    if (!v.is_string()) out_of_range(sub(key), "expected a string");
    return v.get<std::string>();
  }

  std::optional<std::string> optional_string(const char* key) {
    if (!has(key)) return std::nullopt;
    return string(key);
  }

  double real(const char* key) {
    const auto& v = at(key);
    if (!v.is_number()) out_of_range(sub(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) out_of_range(sub(key), "expected a finite number");
    return d;
  }

  double real_or(const char* key, double fallback) { return has(key) ? real(key) : fallback; }

  std::int64_t integer(const char* key) {
    const auto& v = at(key);
    if (!v.is_number_integer()) out_of_range(sub(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::int64_t integer_or(const char* key, std::int64_t fallback) {
    return has(key) ? integer(key) : fallback;
  }

  const json& raw(const char* key) { return at(key); }

  std::string sub(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : params_.items()) {
      if (!used_.contains(key)) out_of_range(path_ + "." + key, "unknown parameter");
    }
  }

 private:
  const json& at(const char* key) {
    used_.insert(key);
    if (!params_.contains(key)) out_of_range(sub(key), "missing required parameter");
    return params_.at(key);
  }

  const json& params_;
  std::string path_;
  std::set<std::string> used_;
};

const Dimension& numeric_dimension(const TimeSeries& series, const std::string& name) {
  const auto& dim = series.dimension(name);
  if (dim.is_categorical()) {
    throw Error(ErrorCode::DimensionKindMismatch,
                "dimension '" + name + "' is categorical; a numeric dimension is required");
  }
  return dim;
}

const Dimension& categorical_dimension(const TimeSeries& series, const std::string& name) {
  const auto& dim = series.dimension(name);
  if (!dim.is_categorical()) {
    throw Error(ErrorCode::DimensionKindMismatch,
                "dimension '" + name + "' is not categorical");
  }
  return dim;
}

std::pair<const Dimension*, const Dimension*> geo_dimensions(const TimeSeries& series) {
  const auto* lat = series.first_of_kind(DimensionKind::latitude);
  const auto* lon = series.first_of_kind(DimensionKind::longitude);
  if (lat == nullptr || lon == nullptr) {
    throw Error(ErrorCode::DimensionKindMismatch,
                "technique requires latitude and longitude dimensions");
  }
  return {lat, lon};
}

}  // namespace

std::string technique_name(const TechniqueSpec& spec) {
  return std::visit(
      overloaded{
          [](const TemporalGaps&) { return std::string("temporal_gaps"); },
          [](const Bins&) { return std::string("bins"); },
          [](const ChangePoints&) { return std::string("change_points"); },
          [](const ValueRange&) { return std::string("value_range"); },
          [](const CategoricalChange&) { return std::string("categorical_change"); },
          [](const Seasonality&) { return std::string("seasonality"); },
          [](const MotifRepresentatives&) { return std::string("motifs"); },
          [](const PatternMatches&) { return std::string("pattern_matches"); },
          [](const GeoArea&) { return std::string("geo_area"); },
          [](const DensityClusters&) { return std::string("density_clusters"); },
          [](const FptMinima&) { return std::string("fpt_minima"); },
      },
      spec);
}

std::string describe(const TechniqueSpec& spec) {
  // The canonical JSON params double as a compact, stable descriptor.
  const auto j = technique_to_json(spec);
  return j.at("type").get<std::string>() + j.at("params").dump();
}

void validate(const TechniqueSpec& spec) {
  std::visit(
      overloaded{
          [](const TemporalGaps& s) {
            if (!(s.factor > 0)) out_of_range("factor", "factor must be > 0");
          },
          [](const Bins& s) {
            if (s.mode != BinMode::calendar && s.width < 1) out_of_range("width", "width must be >= 1");
          },
          [](const ChangePoints& s) {
            if (s.dimension.empty()) out_of_range("dimension", "dimension required");
            if (s.mode == ChangePointMode::fixed_k && s.k < 1) out_of_range("k", "k must be >= 1");
            if (s.mode == ChangePointMode::penalty && !(s.penalty >= 0))
              out_of_range("penalty", "penalty must be >= 0");
          },
          [](const ValueRange& s) {
            if (s.dimension.empty()) out_of_range("dimension", "dimension required");
            if (!(s.min <= s.max)) out_of_range("min", "min must not exceed max");
          },
          [](const CategoricalChange& s) {
            if (s.dimension.empty()) out_of_range("dimension", "dimension required");
          },
          [](const Seasonality& s) {
            if (s.dimension.empty()) out_of_range("dimension", "dimension required");
            if (s.min_cycles < 1) out_of_range("min_cycles", "min_cycles must be >= 1");
          },
          [](const MotifRepresentatives& s) {
            if (s.dimension.empty()) out_of_range("dimension", "dimension required");
            if (s.length < 2) out_of_range("length", "motif length must be >= 2");
            if (s.top_k < 1) out_of_range("top_k", "top_k must be >= 1");
          },
          [](const PatternMatches& s) {
            if (s.dimension.empty()) out_of_range("dimension", "dimension required");
            if (s.pattern.size() < 2) out_of_range("pattern", "pattern needs >= 2 values");
            for (double v : s.pattern) {
              if (!std::isfinite(v)) out_of_range("pattern", "pattern values must be finite");
            }
            if (!(s.threshold >= 0)) out_of_range("threshold", "threshold must be >= 0");
          },
          [](const GeoArea& s) {
            if (s.polygon.size() < 3) out_of_range("polygon", "polygon needs >= 3 vertices");
            for (const auto& p : s.polygon) {
              if (!(p.lat >= -90 && p.lat <= 90 && p.lon >= -180 && p.lon <= 180))
                out_of_range("polygon", "vertex outside valid coordinates");
            }
          },
          [](const DensityClusters& s) {
            if (!(s.eps_meters > 0)) out_of_range("eps", "eps must be > 0");
            if (s.min_pts < 1) out_of_range("min_pts", "min_pts must be >= 1");
          },
          [](const FptMinima& s) {
            if (!(s.radius_meters > 0)) out_of_range("radius", "radius must be > 0");
            if (!(s.prominence_seconds >= 0)) out_of_range("prominence", "prominence must be >= 0");
          },
      },
      spec);
}

void check_compatible(const TechniqueSpec& spec, const TimeSeries& series) {
  std::visit(overloaded{
                 [](const TemporalGaps&) {},
                 [](const Bins&) {},
                 [&](const ChangePoints& s) { numeric_dimension(series, s.dimension); },
                 [&](const ValueRange& s) { numeric_dimension(series, s.dimension); },
                 [&](const CategoricalChange& s) { categorical_dimension(series, s.dimension); },
                 [&](const Seasonality& s) { numeric_dimension(series, s.dimension); },
                 [&](const MotifRepresentatives& s) { numeric_dimension(series, s.dimension); },
                 [&](const PatternMatches& s) { numeric_dimension(series, s.dimension); },
                 [&](const GeoArea&) { geo_dimensions(series); },
                 [&](const DensityClusters&) { geo_dimensions(series); },
                 [&](const FptMinima&) { geo_dimensions(series); },
             },
             spec);
}

TechniqueSpec technique_from_json(const json& node, const std::string& path) {
  if (!node.is_object() || !node.contains("type") || !node.at("type").is_string()) {
    throw Error(ErrorCode::SyntaxError, "technique requires a string 'type'", path);
  }
  for (const auto& [key, value] : node.items()) {
    if (key != "type" && key != "params") {
      throw Error(ErrorCode::SyntaxError, "unexpected key '" + key + "' in technique", path);
    }
  }
  const auto type = node.at("type").get<std::string>();
  static const json kEmpty = json::object();
  const json& params = node.contains("params") ? node.at("params") : kEmpty;
  ParamReader p(params, path + ".params");

  TechniqueSpec spec;
  if (type == "temporal_gaps") {
    spec = TemporalGaps{p.real_or("factor", 10.0)};
  } else if (type == "bins") {
    Bins b;
    const auto mode = p.string("mode");
    if (mode == "count") {
      b.mode = BinMode::count;
      b.width = p.integer("width");
    } else if (mode == "duration") {
      b.mode = BinMode::duration;
      b.width = p.integer("width");
    } else if (mode == "calendar") {
      b.mode = BinMode::calendar;
      const auto unit = p.string("unit");
      if (unit == "day") b.unit = CalendarUnit::day;
      else if (unit == "week") b.unit = CalendarUnit::week;
      else if (unit == "month") b.unit = CalendarUnit::month;
      else out_of_range(p.sub("unit"), "unit must be day, week or month");
    } else {
      out_of_range(p.sub("mode"), "mode must be count, duration or calendar");
    }
    if (b.mode != BinMode::calendar && b.width < 1) out_of_range(p.sub("width"), "width must be >= 1");
    spec = b;
  } else if (type == "change_points") {
    ChangePoints c;
    c.dimension = p.string("dimension");
    if (auto cost = p.optional_string("cost"); cost && *cost != "l2") {
      out_of_range(p.sub("cost"), "only the 'l2' cost is supported");
    }
    const bool has_k = p.has("k");
    const bool has_penalty = p.has("penalty");
    if (has_k == has_penalty) {
      out_of_range(path + ".params", "exactly one of 'k' or 'penalty' is required");
    }
    if (has_k) {
      const auto k = p.integer("k");
      if (k < 1 || k > 1'000'000) out_of_range(p.sub("k"), "k must be >= 1");
      c.mode = ChangePointMode::fixed_k;
      c.k = static_cast<int>(k);
    } else {
      c.mode = ChangePointMode::penalty;
      c.penalty = p.real("penalty");
      if (c.penalty < 0) out_of_range(p.sub("penalty"), "penalty must be >= 0");
    }
    spec = c;
  } else if (type == "value_range") {
    ValueRange v{p.string("dimension"), p.real("min"), p.real("max")};
    if (v.min > v.max) out_of_range(p.sub("min"), "min must not exceed max");
    spec = v;
  } else if (type == "categorical_change") {
    spec = CategoricalChange{p.string("dimension")};
  } else if (type == "seasonality") {
    Seasonality s{p.string("dimension"), 2};
    const auto cycles = p.integer_or("min_cycles", 2);
    if (cycles < 1 || cycles > 1'000'000) out_of_range(p.sub("min_cycles"), "min_cycles must be >= 1");
    s.min_cycles = static_cast<int>(cycles);
    spec = s;
  } else if (type == "motifs") {
    MotifRepresentatives m;
    m.dimension = p.string("dimension");
    const auto length = p.integer("length");
    if (length < 2 || length > 1'000'000) out_of_range(p.sub("length"), "motif length must be >= 2");
    const auto top_k = p.integer_or("top_k", 1);
    if (top_k < 1 || top_k > 1'000'000) out_of_range(p.sub("top_k"), "top_k must be >= 1");
    m.length = static_cast<int>(length);
    m.top_k = static_cast<int>(top_k);
    spec = m;
  } else if (type == "pattern_matches") {
    PatternMatches m;
    m.dimension = p.string("dimension");
    const auto& pattern = p.raw("pattern");
    if (!pattern.is_array() || pattern.size() < 2) {
      out_of_range(p.sub("pattern"), "pattern must be an array of >= 2 numbers");
    }
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      if (!pattern[i].is_number()) {
        out_of_range(p.sub("pattern") + "[" + std::to_string(i) + "]", "expected a number");
      }
      m.pattern.push_back(pattern[i].get<double>());
    }
    m.threshold = p.real("threshold");
    if (m.threshold < 0) out_of_range(p.sub("threshold"), "threshold must be >= 0");
    if (auto d = p.optional_string("distance"); d && *d != "znorm_euclidean") {
      out_of_range(p.sub("distance"), "only 'znorm_euclidean' is supported");
    }
    spec = m;
  } else if (type == "geo_area") {
    GeoArea g;
    const auto& polygon = p.raw("polygon");
    if (!polygon.is_array()) out_of_range(p.sub("polygon"), "polygon must be an array");
    for (std::size_t i = 0; i < polygon.size(); ++i) {
      const auto& v = polygon[i];
      const auto at = p.sub("polygon") + "[" + std::to_string(i) + "]";
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        out_of_range(at, "vertex must be [lat, long]");
      }
      g.polygon.push_back({v[0].get<double>(), v[1].get<double>()});
      const auto& q = g.polygon.back();
      if (!(q.lat >= -90 && q.lat <= 90 && q.lon >= -180 && q.lon <= 180)) {
        out_of_range(at, "vertex outside valid coordinates");
      }
    }
    if (g.polygon.size() < 3) out_of_range(p.sub("polygon"), "polygon needs >= 3 vertices");
    spec = g;
  } else if (type == "density_clusters") {
    DensityClusters d;
    d.eps_meters = p.real("eps");
    if (d.eps_meters <= 0) out_of_range(p.sub("eps"), "eps must be > 0");
    const auto min_pts = p.integer("min_pts");
    if (min_pts < 1 || min_pts > 1'000'000) out_of_range(p.sub("min_pts"), "min_pts must be >= 1");
    d.min_pts = static_cast<int>(min_pts);
    spec = d;
  } else if (type == "fpt_minima") {
    FptMinima f;
    f.radius_meters = p.real("radius");
    if (f.radius_meters <= 0) out_of_range(p.sub("radius"), "radius must be > 0");
    f.prominence_seconds = p.real_or("prominence", 0.0);
    if (f.prominence_seconds < 0) out_of_range(p.sub("prominence"), "prominence must be >= 0");
    spec = f;
  } else {
    throw Error(ErrorCode::UnknownTechnique, "unknown technique '" + type + "'", path + ".type");
  }
  p.finish();
  return spec;
}

json technique_to_json(const TechniqueSpec& spec) {
  json params = json::object();
  std::visit(
      overloaded{
          [&](const TemporalGaps& s) { params["factor"] = s.factor; },
          [&](const Bins& s) {
            switch (s.mode) {
              case BinMode::count:
                params["mode"] = "count";
                params["width"] = s.width;
                break;
              case BinMode::duration:
                params["mode"] = "duration";
                params["width"] = s.width;
                break;
              case BinMode::calendar:
                params["mode"] = "calendar";
                params["unit"] = s.unit == CalendarUnit::day    ? "day"
                                 : s.unit == CalendarUnit::week ? "week"
                                                                : "month";
                break;
            }
          },
          [&](const ChangePoints& s) {
            params["dimension"] = s.dimension;
            params["cost"] = "l2";
            if (s.mode == ChangePointMode::fixed_k) params["k"] = s.k;
            else params["penalty"] = s.penalty;
          },
          [&](const ValueRange& s) {
            params["dimension"] = s.dimension;
            params["min"] = s.min;
            params["max"] = s.max;
          },
          [&](const CategoricalChange& s) { params["dimension"] = s.dimension; },
          [&](const Seasonality& s) {
            params["dimension"] = s.dimension;
            params["min_cycles"] = s.min_cycles;
          },
          [&](const MotifRepresentatives& s) {
            params["dimension"] = s.dimension;
            params["length"] = s.length;
            params["top_k"] = s.top_k;
          },
          [&](const PatternMatches& s) {
            params["dimension"] = s.dimension;
            params["pattern"] = s.pattern;
            params["threshold"] = s.threshold;
            params["distance"] = "znorm_euclidean";
          },
          [&](const GeoArea& s) {
            json polygon = json::array();
            for (const auto& p : s.polygon) polygon.push_back({p.lat, p.lon});
            params["polygon"] = polygon;
          },
          [&](const DensityClusters& s) {
            params["eps"] = s.eps_meters;
            params["min_pts"] = s.min_pts;
          },
          [&](const FptMinima& s) {
            params["radius"] = s.radius_meters;
            params["prominence"] = s.prominence_seconds;
          },
      },
      spec);
  return json{{"type", technique_name(spec)}, {"params", params}};
}

SplitIndexList compute_split_indices(const TechniqueSpec& spec, const TimeSeries& series,
                                     RecordIndex from, RecordIndex to) {
  const auto view = series.view({from, to});
  if (view.size() == 1) return SplitIndexList::trivial(1);
  return std::visit(
      overloaded{
          [&](const TemporalGaps& s) { return techniques::temporal_gaps(view.timestamps(), s); },
          [&](const Bins& s) { return techniques::bins(view.timestamps(), s); },
          [&](const ChangePoints& s) {
            return techniques::change_points(view.values(numeric_dimension(series, s.dimension)), s);
          },
          [&](const ValueRange& s) {
            return techniques::value_range(view.values(numeric_dimension(series, s.dimension)), s);
          },
          [&](const CategoricalChange& s) {
            return techniques::categorical_change(
                view.codes(categorical_dimension(series, s.dimension)));
          },
          [&](const Seasonality& s) {
            return techniques::seasonality(view.values(numeric_dimension(series, s.dimension)), s);
          },
          [&](const MotifRepresentatives& s) {
            return techniques::motifs(view.values(numeric_dimension(series, s.dimension)), s);
          },
          [&](const PatternMatches& s) {
            return techniques::pattern_matches(view.values(numeric_dimension(series, s.dimension)),
                                               s);
          },
          [&](const GeoArea& s) {
            const auto [lat, lon] = geo_dimensions(series);
            return techniques::geo_area(view.values(*lat), view.values(*lon), s);
          },
          [&](const DensityClusters& s) {
            const auto [lat, lon] = geo_dimensions(series);
            return techniques::density_clusters(view.values(*lat), view.values(*lon), s);
          },
          [&](const FptMinima& s) {
            const auto [lat, lon] = geo_dimensions(series);
            return techniques::fpt_minima(view.timestamps(), view.values(*lat), view.values(*lon),
                                          s);
          },
      },
      spec);
}

SplitIndexList get_split_indices(const TechniqueSpec& spec, const TimeSeries& series,
                                 RecordIndex from, RecordIndex to,
                                 std::vector<std::string>* warnings) {
  try {
    return compute_split_indices(spec, series, from, to);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
    if (warnings != nullptr) {
      warnings->push_back(technique_name(spec) + " on [" + std::to_string(from) + ", " +
                          std::to_string(to) + "]: " + e.what());
    }
    return SplitIndexList::trivial(to - from + 1);
  }
}

std::vector<std::string> automatic_labels(const TechniqueSpec& spec, const SeriesView& child) {
  std::vector<std::string> labels;
  const auto& series = child.series();
  if (const auto* range = std::get_if<ValueRange>(&spec)) {
    const auto* dim = series.find(range->dimension);
    if (dim == nullptr || dim->is_categorical()) return labels;
    bool all_in = true;
    bool all_out = true;
    for (double v : child.values(*dim)) {
      const bool inside = !is_missing(v) && v >= range->min && v <= range->max;
      all_in = all_in && inside;
      all_out = all_out && !inside;
    }
    const auto bounds = "[" + number(range->min) + ", " + number(range->max) + "]";
    if (all_in) labels.push_back("inside value range " + bounds);
    if (all_out) labels.push_back("outside value range " + bounds);
  } else if (const auto* cat = std::get_if<CategoricalChange>(&spec)) {
    const auto* dim = series.find(cat->dimension);
    if (dim == nullptr || !dim->is_categorical()) return labels;
    const auto codes = child.codes(*dim);
    if (std::all_of(codes.begin(), codes.end(), [&](auto c) { return c == codes.front(); })) {
      labels.push_back(cat->dimension + " = " +
                       (codes.front() == kMissingCode
                            ? std::string("(missing)")
                            : dim->categories[static_cast<std::size_t>(codes.front())]));
    }
  } else if (const auto* area = std::get_if<GeoArea>(&spec)) {
    const auto* lat = series.first_of_kind(DimensionKind::latitude);
    const auto* lon = series.first_of_kind(DimensionKind::longitude);
    if (lat == nullptr || lon == nullptr) return labels;
    const auto la = child.values(*lat);
    const auto lo = child.values(*lon);
    bool all_in = true;
    bool all_out = true;
    for (std::size_t i = 0; i < la.size(); ++i) {
      const bool inside = !is_missing(la[i]) && !is_missing(lo[i]) &&
                          point_in_polygon({la[i], lo[i]}, area->polygon);
      all_in = all_in && inside;
      all_out = all_out && !inside;
    }
    if (all_in) labels.push_back("inside area");
    if (all_out) labels.push_back("outside area");
  }
  return labels;
}

}  // namespace multiseg
