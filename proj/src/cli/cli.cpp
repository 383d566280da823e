#include "multiseg/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "multiseg/anomaly.hpp"
#include "multiseg/guidance.hpp"
#include "multiseg/segment_tree.hpp"
#include "multiseg/service.hpp"

namespace multiseg::cli {

int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Io: return kExitIo;
    case ErrorCode::MissingTimestampColumn:
    case ErrorCode::NonMonotonicAfterSort:
    case ErrorCode::RaggedRow:
    case ErrorCode::UnparsableValue:
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownTechnique:
    case ErrorCode::ParameterOutOfRange:
    case ErrorCode::ArityError: return kExitParse;
    default: return kExitEvaluation;
  }
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path + "'", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "error while reading '" + path + "'", path);
  return buf.str();
}

void write_output(const std::string& path, const std::string& bytes, std::ostream& out) {
  if (path.empty()) {
    out << bytes;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file || !(file << bytes) || !file.flush()) {
    throw Error(ErrorCode::Io, "cannot write '" + path + "'", path);
  }
}

std::shared_ptr<const TimeSeries> load_series(const std::string& path) {
  CsvOptions options;
  options.source_name = path;
  return std::make_shared<const TimeSeries>(parse_csv(read_file(path), options));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string number(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

struct Common {
  std::string series;
  std::string query;
  std::string out;
  std::string format = "csv";
  std::size_t threads = 1;
};

void add_common(CLI::App& cmd, Common& c, bool query_required) {
  cmd.add_option("--series", c.series, "CSV time series")->required();
  auto* q = cmd.add_option("--query", c.query, "query JSON file");
  if (query_required) q->required();
  cmd.add_option("--out", c.out, "output file (default: stdout)");
  cmd.add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd.add_option("--threads", c.threads, "worker cap")->check(CLI::PositiveNumber);
}

SegmentTree build_tree(const Common& c) {
  auto series = load_series(c.series);
  const auto query = parse_query(read_file(c.query));
  check_compatible(query, *series);
  EvalOptions options;
  options.threads = c.threads;
  return evaluate(query, std::move(series), {}, options);
}

int cmd_segment(const Common& c, bool verify, std::ostream& out, std::ostream& err) {
  const auto tree = build_tree(c);
  if (verify) {
    const auto bad = partition_violations(tree);
    for (const auto& v : bad) err << "partition violation: " << v << "\n";
    if (!bad.empty()) return kExitEvaluation;
  }
  for (const auto& w : tree.warnings) err << "warning: " << w << "\n";
  write_output(c.out, c.format == "json" ? tree_to_json(tree).dump() : export_tree_csv(tree), out);
  return kExitOk;
}

int cmd_similarity(const Common& c, const std::string& node, const std::string& dims, std::ostream& out) {
  const auto tree = build_tree(c);
  GuidanceOptions options;
  options.threads = c.threads;
  const auto sims = sibling_distances(tree, node.empty() ? tree.root.id : node, split_list(dims), options);
  std::string text;
  if (c.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : sims) {
      arr.push_back({{"node_id", s.node_id},
                     {"d_bar", s.d_bar},
                     {"scale_domain", {{"min", s.scale_domain.min}, {"max", s.scale_domain.max}, {"midpoint", s.scale_domain.midpoint}}},
                     {"dimension_set", s.dimension_set},
                     {"color_position", color_position(s.d_bar, s.scale_domain)}});
    }
    text = arr.dump();
  } else {
    text = "node_id,d_bar,domain_min,domain_max,midpoint,color_position\n";
    for (const auto& s : sims) {
      text += s.node_id + "," + number(s.d_bar) + "," + number(s.scale_domain.min) + "," +
              number(s.scale_domain.max) + "," + number(s.scale_domain.midpoint) + "," +
              number(color_position(s.d_bar, s.scale_domain)) + "\n";
    }
  }
  write_output(c.out, text, out);
  return kExitOk;
}

struct AnomalyArgs {
  std::string node;
  std::string dimension;
  std::string detectors;
  RecordIndex from = 0;
  RecordIndex to = 0;
  DetectorParams params;
  std::string normalization = "absolute";
};

int cmd_anomaly(const Common& c, AnomalyArgs& a, std::ostream& out, std::ostream& err) {
  std::shared_ptr<const TimeSeries> series;
  IndexInterval interval;
  if (!c.query.empty()) {
    const auto tree = build_tree(c);
    const auto* node = find_node(tree, a.node.empty() ? tree.root.id : a.node);
    if (node == nullptr) throw Error(ErrorCode::UnknownNode, "no node with id '" + a.node + "'");
    series = tree.series;
    interval = node->interval;
  } else {
    series = load_series(c.series);
    interval = series->full();
  }
  if (a.from > 0) interval.from = a.from;
  if (a.to > 0) interval.to = a.to;
  std::string dim = a.dimension;
  if (dim.empty()) {
    const auto* d = series->first_of_kind(DimensionKind::numeric);
    if (d == nullptr) throw Error(ErrorCode::DimensionKindMismatch, "series has no numeric dimension");
    dim = d->name;
  }
  std::set<Detector> detectors;
  for (const auto& d : split_list(a.detectors)) detectors.insert(parse_detector(d));
  if (detectors.empty()) detectors = all_detectors();
  const auto norm = parse_normalization(a.normalization);
  if (!norm) throw Error(ErrorCode::InvalidParameter, "unknown normalization '" + a.normalization + "'");
  a.params.normalization = *norm;

  const auto result = analyze_segment(*series, interval, dim, detectors, a.params);
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";
  const auto ts = series->timestamps();
  std::string text;
  if (c.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : result.anomalies) {
      arr.push_back({{"index", p.index},
                     {"timestamp", format_timestamp(ts[static_cast<std::size_t>(p.index - 1)])},
                     {"type", std::string(to_string(p.type))},
                     {"score", p.score}});
    }
    nlohmann::json counts = nlohmann::json::array();
    for (const auto& row : result.histogram.counts) counts.push_back(row);
    text = nlohmann::json{{"dimension", dim},
                          {"interval", {{"from", interval.from}, {"to", interval.to}}},
                          {"anomalies", arr},
                          {"histogram", counts},
                          {"density", result.density}}
               .dump();
  } else {
    text = "index,timestamp,type,score\n";
    for (const auto& p : result.anomalies) {
      text += std::to_string(p.index) + "," + format_timestamp(ts[static_cast<std::size_t>(p.index - 1)]) + "," +
              std::string(to_string(p.type)) + "," + number(p.score) + "\n";
    }
  }
  write_output(c.out, text, out);
  return kExitOk;
}

int cmd_serve(const std::string& bind, std::size_t threads, std::ostream& err) {
  auto config = ServiceConfig::from_env();
  if (!bind.empty()) {
    std::string b = bind;
    if (const auto colon = b.rfind(':'); colon != std::string::npos) {
      config.port = std::stoi(b.substr(colon + 1));
      b.resize(colon);
    }
    if (!b.empty()) config.bind_host = b;
  }
  if (threads > 0) config.workers = threads;
  Service service(config);
  HttpServer server(service);
  err << "listening on " << config.bind_host << ":" << config.port << "\n";
  if (!server.listen(config.bind_host, config.port)) {
    throw Error(ErrorCode::Io, "cannot listen on " + config.bind_host + ":" + std::to_string(config.port));
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-scale time series segmentation"};
  app.name("multiseg");
  app.require_subcommand(1);

  Common seg, sim, ano;
  bool verify = false;
  auto* segment = app.add_subcommand("segment", "evaluate a query into a segment tree");
  add_common(*segment, seg, true);
  segment->add_flag("--verify", verify, "re-check the partition invariant");

  std::string sim_node, sim_dims;
  auto* similarity = app.add_subcommand("similarity", "sibling DTW guidance for one node's children");
  add_common(*similarity, sim, true);
  similarity->add_option("--node", sim_node, "parent node id (default: root)");
  similarity->add_option("--dimensions", sim_dims, "comma-separated dimensions");

  AnomalyArgs a;
  auto* anomaly = app.add_subcommand("anomaly", "point anomalies of one segment");
  add_common(*anomaly, ano, false);
  anomaly->add_option("--node", a.node, "node id (needs --query)");
  anomaly->add_option("--from", a.from, "first record (1-based)");
  anomaly->add_option("--to", a.to, "last record (1-based)");
  anomaly->add_option("--dimension", a.dimension, "numeric dimension");
  anomaly->add_option("--detectors", a.detectors, "lof,mad,shesd,io_tc (default: all)");
  anomaly->add_option("--lof-k", a.params.lof_k);
  anomaly->add_option("--mad-c", a.params.mad_c);
  anomaly->add_option("--period", a.params.shesd_period);
  anomaly->add_option("--bins", a.params.bin_count);
  anomaly->add_option("--normalization", a.normalization);

  std::string bind;
  std::size_t serve_threads = 0;
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--bind", bind, "host[:port]");
  serve->add_option("--threads", serve_threads, "worker count");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "multiseg: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*segment) return cmd_segment(seg, verify, out, err);
    if (*similarity) return cmd_similarity(sim, sim_node, sim_dims, out);
    if (*anomaly) return cmd_anomaly(ano, a, out, err);
    if (*serve) return cmd_serve(bind, serve_threads, err);
  } catch (const Error& e) {
    err << "multiseg: " << to_string(e.code()) << ": " << e.what();
    if (!e.location().empty()) err << " (at " << e.location() << ")";
    err << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "multiseg: " << e.what() << "\n";
    return kExitEvaluation;
  }
  return kExitUsage;
}

}  // namespace multiseg::cli
