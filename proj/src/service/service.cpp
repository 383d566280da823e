#include "multiseg/service.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stop_token>

#include "multiseg/guidance.hpp"

namespace multiseg {

using nlohmann::json;

namespace {

struct EvalState {
  std::mutex mutex;
  EvalProgress progress;
  bool running = false;
  std::uint64_t runs = 0;
  std::stop_source stop;
};

struct SeriesState {
  std::shared_ptr<const TimeSeries> series;
  std::optional<QuerySpec> query;
  std::optional<SegmentTree> tree;
  Annotations annotations;
  std::shared_ptr<SplitCache> cache = std::make_shared<SplitCache>();
  std::shared_ptr<EvalState> eval = std::make_shared<EvalState>();
};

struct ForwardEntry {
  std::string series;
  std::string node;
  bool operator==(const ForwardEntry&) const = default;
};

/// Cached splits are dropped once the cache grows beyond this many entries.
constexpr std::size_t kMaxCacheEntries = 200'000;

std::string_view to_string(ForwardTarget t) { return t == ForwardTarget::temporal ? "temporal" : "geographic"; }

ForwardTarget parse_target(const std::string& s) {
  if (s == "temporal") return ForwardTarget::temporal;
  if (s == "geographic") return ForwardTarget::geographic;
  throw Error(ErrorCode::InvalidParameter, "target must be 'temporal' or 'geographic'", "target");
}

std::string new_token() {
  static std::mutex mutex;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mutex);
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

json series_summary(const std::string& name, const TimeSeries& s) {
  json dims = json::array();
  for (const auto& d : s.dimensions()) {
    json entry{{"name", d.name}, {"kind", std::string(to_string(d.kind))}};
    if (d.is_categorical()) entry["categories"] = d.categories;
    dims.push_back(std::move(entry));
  }
  const auto ts = s.timestamps();
  return json{{"name", name},
              {"records", s.size()},
              {"dimensions", std::move(dims)},
              {"start", format_timestamp(ts.front())},
              {"end", format_timestamp(ts.back())}};
}

json forward_list(const std::vector<ForwardEntry>& entries) {
  json out = json::array();
  for (const auto& e : entries) out.push_back({{"series", e.series}, {"node_id", e.node}});
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

struct Service::Session {
  std::string id;
  mutable std::shared_mutex mutex;
  std::vector<std::string> order;
  std::map<std::string, SeriesState> series;
  std::vector<ForwardEntry> temporal;
  std::vector<ForwardEntry> geographic;

  SeriesState& require(const std::string& name) {
    const auto it = series.find(name);
    if (it == series.end()) throw Error(ErrorCode::NotFound, "no series named '" + name + "'");
    return it->second;
  }
  const SeriesState& require(const std::string& name) const {
    return const_cast<Session*>(this)->require(name);
  }
  std::vector<ForwardEntry>& list(ForwardTarget t) { return t == ForwardTarget::temporal ? temporal : geographic; }
};

namespace {

const SegmentTree& require_tree(const SeriesState& st, const std::string& name) {
  if (!st.tree) throw Error(ErrorCode::NoTree, "series '" + name + "' has no evaluated tree yet");
  return *st.tree;
}

const SegmentNode& require_node(const SegmentTree& tree, const std::string& id) {
  const auto* node = find_node(tree, id);
  if (node == nullptr) throw Error(ErrorCode::UnknownNode, "no node with id '" + id + "'");
  return *node;
}

}  // namespace

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::UnknownNode: return 404;
    case ErrorCode::NoTree:
    case ErrorCode::Cancelled: return 409;
    case ErrorCode::PayloadTooLarge: return 413;
    default: return 400;
  }
}

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  if (const char* bind = std::getenv("MULTISEG_BIND"); bind != nullptr && *bind != '\0') {
    std::string b = bind;
    if (const auto colon = b.rfind(':'); colon != std::string::npos) {
      c.port = std::atoi(b.c_str() + colon + 1);
      b.resize(colon);
    }
    if (!b.empty()) c.bind_host = b;
  }
  if (const char* max = std::getenv("MULTISEG_MAX_UPLOAD_BYTES"); max != nullptr && *max != '\0') {
    c.max_upload_bytes = std::strtoull(max, nullptr, 10);
  }
  if (const char* w = std::getenv("MULTISEG_WORKERS"); w != nullptr && *w != '\0') {
    c.workers = std::max<std::size_t>(1, std::strtoull(w, nullptr, 10));
  }
  if (const char* s = std::getenv("MULTISEG_SNAPSHOT"); s != nullptr && *s != '\0') c.snapshot_path = s;
  return c;
}

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  if (config_.snapshot_path) replay(*config_.snapshot_path);
}

Service::~Service() = default;

std::shared_ptr<Service::Session> Service::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "no session '" + id + "'");
  return it->second;
}

void Service::log(const json& entry) {
  if (!config_.snapshot_path || replaying_) return;
  std::lock_guard lock(log_mutex_);
  std::ofstream out(*config_.snapshot_path, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot append to snapshot '" + *config_.snapshot_path + "'");
  out << entry.dump() << '\n';
}

void Service::replay(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return;
  replaying_ = true;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    try {
      const auto e = json::parse(line);
      const auto op = e.at("op").get<std::string>();
      const auto session = e.at("session").get<std::string>();
      if (op == "create_session") {
        auto s = std::make_shared<Session>();
        s->id = session;
        std::unique_lock lock(sessions_mutex_);
        sessions_[session] = std::move(s);
      } else if (op == "upload") {
        upload_series(session, e.at("name"), e.at("csv").get<std::string>());
      } else if (op == "query") {
        run_query(session, e.at("series"), e.at("query").get<std::string>());
      } else if (op == "bookmark") {
        set_bookmark(session, e.at("series"), e.at("node"), e.at("flag"));
      } else if (op == "label") {
        label_node(session, e.at("series"), e.at("node"), e.at("text"));
      } else if (op == "forward") {
        forward_segment(session, e.at("series"), e.at("node"), parse_target(e.at("target")));
      }
    } catch (const std::exception&) {
      // a damaged entry only loses itself
    }
  }
  replaying_ = false;
}

std::string Service::create_session() {
  auto s = std::make_shared<Session>();
  {
    std::unique_lock lock(sessions_mutex_);
    do {
      s->id = new_token();
    } while (sessions_.contains(s->id));
    sessions_[s->id] = s;
  }
  log({{"op", "create_session"}, {"session", s->id}});
  return s->id;
}

json Service::session_summary(const std::string& session) const {
  const auto s = find(session);
  std::shared_lock lock(s->mutex);
  return json{{"session_id", s->id},
              {"series", s->order},
              {"forwarded", {{"temporal", forward_list(s->temporal)}, {"geographic", forward_list(s->geographic)}}}};
}

json Service::upload_series(const std::string& session, const std::string& name, std::string_view csv) {
  if (csv.size() > config_.max_upload_bytes) {
    throw Error(ErrorCode::PayloadTooLarge, "upload exceeds " + std::to_string(config_.max_upload_bytes) + " bytes");
  }
  if (name.empty()) throw Error(ErrorCode::InvalidParameter, "series name must not be empty", "name");
  const auto s = find(session);
  CsvOptions options;
  options.source_name = name;
  auto series = std::make_shared<const TimeSeries>(parse_csv(csv, options));
  auto summary = series_summary(name, *series);
  {
    std::unique_lock lock(s->mutex);
    if (!s->series.contains(name)) s->order.push_back(name);
    SeriesState st;
    st.series = std::move(series);
    s->series[name] = std::move(st);
    for (auto* list : {&s->temporal, &s->geographic}) {
      std::erase_if(*list, [&](const ForwardEntry& e) { return e.series == name; });
    }
  }
  log({{"op", "upload"}, {"session", session}, {"name", name}, {"csv", std::string(csv)}});
  return summary;
}

json Service::list_series(const std::string& session) const {
  const auto s = find(session);
  std::shared_lock lock(s->mutex);
  json out = json::array();
  for (const auto& name : s->order) out.push_back(series_summary(name, *s->series.at(name).series));
  return out;
}

json Service::run_query(const std::string& session, const std::string& series_name,
                        std::string_view query_json) {
  const auto s = find(session);
  const auto query = parse_query(query_json);
  std::shared_ptr<const TimeSeries> series;
  Annotations annotations;
  std::shared_ptr<SplitCache> cache;
  std::shared_ptr<EvalState> eval;
  {
    std::shared_lock lock(s->mutex);
    const auto& st = s->require(series_name);
    series = st.series;
    annotations = st.annotations;
    cache = st.cache;
    eval = st.eval;
  }
  check_compatible(query, *series);
  if (cache->size() > kMaxCacheEntries) cache->clear();

  std::stop_token token;
  {
    std::lock_guard lock(eval->mutex);
    eval->stop = std::stop_source();
    token = eval->stop.get_token();
    eval->running = true;
    eval->progress = {0, static_cast<int>(query.levels.size()), 0, 0};
    ++eval->runs;
  }
  EvalOptions options;
  options.threads = config_.workers;
  options.cache = cache.get();
  options.stop = token;
  options.progress = [eval](const EvalProgress& p) {
    std::lock_guard lock(eval->mutex);
    eval->progress = p;
  };
  std::optional<SegmentTree> tree;
  try {
    tree = evaluate(query, series, annotations, options);
  } catch (...) {
    std::lock_guard lock(eval->mutex);
    eval->running = false;
    throw;
  }
  {
    std::lock_guard lock(eval->mutex);
    eval->running = false;
  }

  auto out = tree_to_json(*tree);
  {
    std::unique_lock lock(s->mutex);
    auto& st = s->require(series_name);
    if (st.series != series) {
      throw Error(ErrorCode::NotFound, "series '" + series_name + "' was replaced during evaluation");
    }
    st.query = query;
    st.tree = std::move(tree);
    for (auto* list : {&s->temporal, &s->geographic}) {
      std::erase_if(*list, [&](const ForwardEntry& e) {
        return e.series == series_name && find_node(*st.tree, e.node) == nullptr;
      });
    }
  }
  log({{"op", "query"}, {"session", session}, {"series", series_name}, {"query", std::string(query_json)}});
  return out;
}

json Service::get_tree(const std::string& session, const std::string& series) const {
  const auto s = find(session);
  std::shared_lock lock(s->mutex);
  return tree_to_json(require_tree(s->require(series), series));
}

json Service::sibling_similarity(const std::string& session, const std::string& series,
                                 const std::string& node, const std::vector<std::string>& dimensions) const {
  const auto s = find(session);
  std::shared_lock lock(s->mutex);
  const auto& tree = require_tree(s->require(series), series);
  GuidanceOptions options;
  options.threads = config_.workers;
  json out = json::array();
  for (const auto& sim : sibling_distances(tree, node, dimensions, options)) {
    out.push_back({{"node_id", sim.node_id},
                   {"d_bar", sim.d_bar},
                   {"scale_domain",
                    {{"min", sim.scale_domain.min}, {"max", sim.scale_domain.max}, {"midpoint", sim.scale_domain.midpoint}}},
                   {"dimension_set", sim.dimension_set},
                   {"color_position", color_position(sim.d_bar, sim.scale_domain)}});
  }
  return out;
}

json Service::forward_segment(const std::string& session, const std::string& series,
                              const std::string& node, ForwardTarget target) {
  const auto s = find(session);
  json out;
  {
    std::unique_lock lock(s->mutex);
    require_node(require_tree(s->require(series), series), node);
    auto& list = s->list(target);
    const ForwardEntry entry{series, node};
    std::erase(list, entry);
    list.insert(list.begin(), entry);
    out = json{{"ok", true}, {"target", std::string(to_string(target))}, {"forwarded", forward_list(list)}};
  }
  log({{"op", "forward"}, {"session", session}, {"series", series}, {"node", node},
       {"target", std::string(to_string(target))}});
  return out;
}

json Service::forwarded(const std::string& session) const {
  const auto s = find(session);
  std::shared_lock lock(s->mutex);
  return json{{"temporal", forward_list(s->temporal)}, {"geographic", forward_list(s->geographic)}};
}

json Service::detail(const std::string& session, const std::string& series_name, const std::string& node_id,
                     const std::set<Detector>& detectors, const std::optional<std::string>& dimension,
                     const DetectorParams& params) const {
  const auto s = find(session);
  std::shared_ptr<const TimeSeries> series;
  IndexInterval interval;
  {
    std::shared_lock lock(s->mutex);
    const auto& st = s->require(series_name);
    interval = require_node(require_tree(st, series_name), node_id).interval;
    series = st.series;
  }
  std::string dim;
  if (dimension) {
    dim = *dimension;
  } else if (const auto* d = series->first_of_kind(DimensionKind::numeric)) {
    dim = d->name;
  } else {
    throw Error(ErrorCode::DimensionKindMismatch, "series has no numeric dimension", "dimension");
  }
  const auto a = analyze_segment(*series, interval, dim, detectors, params);

  json anomalies = json::array();
  for (const auto& p : a.anomalies) {
    anomalies.push_back({{"index", p.index}, {"type", std::string(to_string(p.type))}, {"score", p.score}});
  }
  json types = json::array();
  for (std::size_t t = 0; t < kAnomalyTypeCount; ++t) types.push_back(std::string(to_string(static_cast<AnomalyType>(t))));
  json counts = json::array();
  for (const auto& row : a.histogram.counts) counts.push_back(row);
  json det = json::array();
  for (auto d : detectors) det.push_back(std::string(to_string(d)));

  const auto view = series->view(interval);
  const auto ts = view.timestamps();
  json out{{"node_id", node_id},
           {"interval", {{"from", interval.from}, {"to", interval.to}}},
           {"dimension", dim},
           {"detectors", std::move(det)},
           {"timestamps", std::vector<Timestamp>(ts.begin(), ts.end())},
           {"values", a.values},
           {"anomalies", std::move(anomalies)},
           {"histogram",
            {{"bin_count", a.histogram.bin_count},
             {"normalization", std::string(to_string(a.histogram.normalization))},
             {"types", std::move(types)},
             {"counts", std::move(counts)}}},
           {"density", a.density},
           {"warnings", a.warnings}};
  const auto* lat = series->first_of_kind(DimensionKind::latitude);
  const auto* lon = series->first_of_kind(DimensionKind::longitude);
  if (lat != nullptr && lon != nullptr) {
    const auto la = view.values(*lat);
    const auto lo = view.values(*lon);
    out["geo"] = {{"lat", std::vector<double>(la.begin(), la.end())}, {"lon", std::vector<double>(lo.begin(), lo.end())}};
  }
  return out;
}

json Service::set_bookmark(const std::string& session, const std::string& series, const std::string& node, bool flag) {
  const auto s = find(session);
  {
    std::unique_lock lock(s->mutex);
    auto& st = s->require(series);
    require_tree(st, series);
    multiseg::set_bookmark(*st.tree, node, flag);
    if (flag) st.annotations.bookmarks.insert(node);
    else st.annotations.bookmarks.erase(node);
  }
  log({{"op", "bookmark"}, {"session", session}, {"series", series}, {"node", node}, {"flag", flag}});
  return json{{"ok", true}, {"node_id", node}, {"bookmarked", flag}};
}

json Service::label_node(const std::string& session, const std::string& series, const std::string& node,
                         const std::string& text) {
  const auto s = find(session);
  json out;
  {
    std::unique_lock lock(s->mutex);
    auto& st = s->require(series);
    require_tree(st, series);
    multiseg::label_node(*st.tree, node, text);
    st.annotations.user_labels[node].push_back(text);
    out = json{{"ok", true}, {"node_id", node}, {"labels", find_node(*st.tree, node)->all_labels()}};
  }
  log({{"op", "label"}, {"session", session}, {"series", series}, {"node", node}, {"text", text}});
  return out;
}

std::string Service::export_data(const std::string& session, const std::string& series,
                                 const std::string& kind, std::string* content_type) const {
  const auto s = find(session);
  std::shared_lock lock(s->mutex);
  const auto& st = s->require(series);
  if (kind == "tree_csv") {
    if (content_type != nullptr) *content_type = "text/csv";
    return export_tree_csv(require_tree(st, series));
  }
  if (kind == "query_json") {
    if (!st.query) throw Error(ErrorCode::NoTree, "series '" + series + "' has no query yet");
    if (content_type != nullptr) *content_type = "application/json";
    return serialize_query(*st.query);
  }
  throw Error(ErrorCode::InvalidParameter, "kind must be 'tree_csv' or 'query_json'", "kind");
}

json Service::progress(const std::string& session, const std::string& series) const {
  const auto s = find(session);
  std::shared_ptr<EvalState> eval;
  {
    std::shared_lock lock(s->mutex);
    eval = s->require(series).eval;
  }
  std::lock_guard lock(eval->mutex);
  return json{{"running", eval->running},
              {"runs", eval->runs},
              {"level", eval->progress.level},
              {"levels", eval->progress.levels},
              {"parents_done", eval->progress.parents_done},
              {"parents_total", eval->progress.parents_total}};
}

void Service::cancel(const std::string& session, const std::string& series) {
  const auto s = find(session);
  std::shared_ptr<EvalState> eval;
  {
    std::shared_lock lock(s->mutex);
    eval = s->require(series).eval;
  }
  std::lock_guard lock(eval->mutex);
  if (eval->running) eval->stop.request_stop();
}

// Routing --------------------------------------------------------------------

namespace {

HttpResponse json_response(const json& body, int status = 200) {
  // uploaded text may echo back invalid UTF-8; replace rather than throw
  return {status, "application/json", body.dump(-1, ' ', false, json::error_handler_t::replace)};
}

HttpResponse error_response(int status, std::string_view code, const std::string& message,
                            const std::string& location = {}) {
  json body{{"code", code}, {"message", message}};
  if (!location.empty()) body["location"] = location;
  return json_response(body, status);
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    const auto j = path.find('/', i);
    const auto end = j == std::string::npos ? path.size() : j;
    if (end > i) out.push_back(path.substr(i, end - i));
    i = end;
  }
  return out;
}

std::optional<std::string> param(const HttpRequest& r, const std::string& key) {
  const auto it = r.query.find(key);
  if (it == r.query.end()) return std::nullopt;
  return it->second;
}

template <class T>
T number_param(const HttpRequest& r, const std::string& key, T fallback) {
  const auto text = param(r, key);
  if (!text) return fallback;
  T value{};
  const auto* end = text->data() + text->size();
  const auto [ptr, ec] = std::from_chars(text->data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::InvalidParameter, "'" + *text + "' is not a valid number", key);
  }
  return value;
}

json body_json(const HttpRequest& r) {
  if (r.body.empty()) return json::object();
  try {
    auto j = json::parse(r.body);
    if (!j.is_object()) throw Error(ErrorCode::SyntaxError, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, e.what(), "byte " + std::to_string(e.byte));
  } catch (const json::exception& e) {
    // number overflow and similar are syntax errors of the document too
    throw Error(ErrorCode::SyntaxError, e.what());
  }
}

DetectorParams detector_params(const HttpRequest& r) {
  DetectorParams p;
  p.lof_k = number_param(r, "lof_k", p.lof_k);
  p.lof_threshold = number_param(r, "lof_threshold", p.lof_threshold);
  p.mad_c = number_param(r, "mad_c", p.mad_c);
  if (param(r, "period")) p.shesd_period = number_param<std::size_t>(r, "period", 0);
  p.shesd_alpha = number_param(r, "alpha", p.shesd_alpha);
  p.shesd_max_anoms = number_param(r, "max_anoms", p.shesd_max_anoms);
  p.io_tc_delta = number_param(r, "delta", p.io_tc_delta);
  p.io_tc_threshold = number_param(r, "io_threshold", p.io_tc_threshold);
  p.bin_count = number_param(r, "bins", p.bin_count);
  if (const auto n = param(r, "normalization")) {
    const auto parsed = parse_normalization(*n);
    if (!parsed) throw Error(ErrorCode::InvalidParameter, "unknown normalization '" + *n + "'", "normalization");
    p.normalization = *parsed;
  }
  return p;
}

}  // namespace

HttpResponse Service::handle(const HttpRequest& r) {
  try {
    const auto seg = split_path(r.path);
    const bool get = r.method == "GET";
    const bool post = r.method == "POST";
    const auto n = seg.size();
    if (n == 0 || seg[0] != "sessions") throw Error(ErrorCode::NotFound, "no route for " + r.path);

    if (n == 1 && post) return json_response({{"session_id", create_session()}}, 201);
    if (n == 2 && get) return json_response(session_summary(seg[1]));
    if (n == 3 && seg[2] == "forwarded" && get) return json_response(forwarded(seg[1]));
    if (n == 3 && seg[2] == "series") {
      if (get) return json_response(list_series(seg[1]));
      if (post) {
        auto name = param(r, "name");
        if (!name) name = "series-" + std::to_string(list_series(seg[1]).size() + 1);
        return json_response(upload_series(seg[1], *name, r.body), 201);
      }
    }
    if (n >= 5 && seg[2] == "series") {
      const auto& id = seg[1];
      const auto& name = seg[3];
      const auto& action = seg[4];
      if (n == 5) {
        if (action == "query" && post) return json_response(run_query(id, name, r.body));
        if (action == "tree" && get) return json_response(get_tree(id, name));
        if (action == "progress" && get) return json_response(progress(id, name));
        if (action == "cancel" && post) {
          cancel(id, name);
          return json_response({{"ok", true}});
        }
        if (action == "export" && get) {
          HttpResponse out;
          out.body = export_data(id, name, param(r, "kind").value_or(""), &out.content_type);
          return out;
        }
      }
      if (n == 7 && action == "nodes") {
        const auto& node = seg[5];
        const auto& verb = seg[6];
        if (verb == "siblings" && get) {
          return json_response(sibling_similarity(id, name, node, split_list(param(r, "dimensions").value_or(""))));
        }
        if (verb == "forward" && post) {
          return json_response(forward_segment(id, name, node, parse_target(param(r, "target").value_or(""))));
        }
        if (verb == "detail" && get) {
          std::set<Detector> detectors;
          for (const auto& d : split_list(param(r, "detectors").value_or(""))) detectors.insert(parse_detector(d));
          if (detectors.empty()) detectors = all_detectors();
          return json_response(detail(id, name, node, detectors, param(r, "dimension"), detector_params(r)));
        }
        if (verb == "bookmark" && post) {
          const auto body = body_json(r);
          bool flag = true;
          if (body.contains("bookmarked")) {
            if (!body["bookmarked"].is_boolean()) {
              throw Error(ErrorCode::InvalidParameter, "bookmarked must be a boolean", "bookmarked");
            }
            flag = body["bookmarked"].get<bool>();
          }
          return json_response(set_bookmark(id, name, node, flag));
        }
        if (verb == "label" && post) {
          const auto body = body_json(r);
          if (!body.contains("label") || !body["label"].is_string()) {
            throw Error(ErrorCode::InvalidParameter, "body needs a string 'label'", "label");
          }
          return json_response(label_node(id, name, node, body["label"].get<std::string>()));
        }
      }
    }
    throw Error(ErrorCode::NotFound, "no route for " + r.method + " " + r.path);
  } catch (const Error& e) {
    return error_response(http_status(e.code()), to_string(e.code()), e.what(), e.location());
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

}  // namespace multiseg
