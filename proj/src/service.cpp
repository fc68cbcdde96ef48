#include "gazesim/service.hpp"

#include <algorithm>
#include <cmath>

#include "httplib.h"
#include "json.hpp"

#include "gazesim/config.hpp"
#include "gazesim/csv.hpp"
#include "gazesim/error.hpp"

namespace gazesim {

namespace {

using Query = std::multimap<std::string, std::string>;
using nlohmann::json;

struct BadRequest {
  std::string message;
};

HttpResponse json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

HttpResponse error_response(int status, const std::string& message) {
  return json_response(status, json{{"error", message}});
}

std::optional<std::string> param(const Query& q, const std::string& name) {
  const auto it = q.find(name);
  if (it == q.end()) return std::nullopt;
  return it->second;
}

std::optional<long long> int_param(const Query& q, const std::string& name) {
  const auto v = param(q, name);
  if (!v) return std::nullopt;
  const auto i = csv::parse_int(*v);
  if (!i) throw BadRequest{"parameter '" + name + "' must be an integer"};
  return i;
}

std::optional<double> double_param(const Query& q, const std::string& name) {
  const auto v = param(q, name);
  if (!v) return std::nullopt;
  const auto d = csv::parse_double(*v);
  if (!d) throw BadRequest{"parameter '" + name + "' must be a number"};
  return d;
}

double required_double(const Query& q, const std::string& name) {
  const auto d = double_param(q, name);
  if (!d) throw BadRequest{"parameter '" + name + "' is required"};
  return *d;
}

TwedParams params_from(const Query& q, const TwedParams& fallback) {
  TwedParams p{double_param(q, "lambda").value_or(fallback.lambda), double_param(q, "gamma").value_or(fallback.gamma)};
  if (p.lambda < 0.0 || p.gamma < 0.0) throw BadRequest{"lambda and gamma must be >= 0"};
  return p;
}

WindowSpec window_from(const Query& q) {
  WindowSpec w{required_double(q, "start_s"), required_double(q, "len_s")};
  if (w.start_s < 0.0 || w.length_s <= 0.0) throw BadRequest{"start_s must be >= 0 and len_s > 0"};
  return w;
}

int status_for(Errc code) {
  switch (code) {
    case Errc::UnknownViewer:
    case Errc::UnknownChannel: return 404;
    case Errc::OutOfRange: return 422;
    default: return 400;
  }
}

json matrix_json(const SimilarityMatrix& sim) {
  json values = json::array();
  for (std::size_t i = 0; i < sim.values.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < sim.values.size(); ++j) row.push_back(sim.values(i, j));
    values.push_back(std::move(row));
  }
  return json{{"viewers", sim.viewer_ids},
              {"values", std::move(values)},
              {"start_s", sim.window.start_s},
              {"len_s", sim.window.length_s},
              {"lambda", sim.params.lambda},
              {"gamma", sim.params.gamma},
              {"normalization", normalization_name(sim.normalization)},
              {"distance_scale", sim.distance_scale}};
}

}  // namespace

std::size_t SimilarityCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

GazeService::GazeService(CohortDataset cohort, ServiceOptions options)
    : cohort_(std::move(cohort)), options_(options), cache_(std::max<std::size_t>(1, options.cache_capacity)) {
  const std::size_t frames = cohort_.frame_count();
  if (!cohort_.viewers.empty()) start_ms_ = cohort_.viewers.begin()->second.start_ms;
  if (cohort_.frame_rate_fps > 0.0) {
    duration_ms_ = std::llround(1000.0 * static_cast<double>(frames) / cohort_.frame_rate_fps);
  }
}

HttpResponse GazeService::handle(const std::string& path, const Query& query) const {
  try {
    if (path == "/api/meta") return meta();
    if (path == "/api/gaze") return gaze(query);
    if (path == "/api/eeg") return eeg(query);
    if (path == "/api/similarity") return similarity(query);
    if (path == "/api/clusters") return clusters(query);
    return error_response(404, "no endpoint " + path);
  } catch (const BadRequest& e) {
    return error_response(400, e.message);
  } catch (const Error& e) {
    return error_response(status_for(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

HttpResponse GazeService::meta() const {
  std::vector<std::string> channels;
  for (const auto& [id, rec] : cohort_.eeg) {
    for (const auto& c : rec.channels) {
      if (std::find(channels.begin(), channels.end(), c) == channels.end()) channels.push_back(c);
    }
  }
  std::vector<std::string> eeg_viewers;
  for (const auto& [id, rec] : cohort_.eeg) eeg_viewers.push_back(id);
  return json_response(200, json{{"video_id", cohort_.video_id},
                                 {"fps", cohort_.frame_rate_fps},
                                 {"frame_count", cohort_.frame_count()},
                                 {"start_ms", start_ms_},
                                 {"duration_ms", duration_ms_},
                                 {"screen", {{"width_px", cohort_.screen.width_px}, {"height_px", cohort_.screen.height_px}}},
                                 {"viewers", cohort_.viewer_ids()},
                                 {"eeg_viewers", eeg_viewers},
                                 {"channels", channels}});
}

HttpResponse GazeService::gaze(const Query& query) const {
  std::vector<std::string> ids = parse_name_list(param(query, "viewers").value_or(""));
  if (ids.empty()) ids = cohort_.viewer_ids();
  for (const auto& id : ids) {
    if (!cohort_.viewers.contains(id)) throw Error(Errc::UnknownViewer, "'" + id + "'");
  }
  const std::int64_t end_ms = start_ms_ + duration_ms_;
  const std::int64_t from = int_param(query, "from_ms").value_or(start_ms_);
  const std::int64_t to = std::min<std::int64_t>(int_param(query, "to_ms").value_or(end_ms), end_ms);
  if (from > int_param(query, "to_ms").value_or(end_ms)) throw BadRequest{"from_ms must not exceed to_ms"};
  if (from < start_ms_ || from > end_ms) throw Error(Errc::OutOfRange, "from_ms outside the recording");

  const auto& any = cohort_.viewers.at(ids.front());
  std::vector<std::size_t> frames;
  for (std::size_t k = 0; k < any.size(); ++k) {
    const auto t = any.time_ms(k);
    if (t >= from && t <= to) frames.push_back(k);
  }
  json times = json::array();
  json frame_idx = json::array();
  for (const auto k : frames) {
    times.push_back(any.time_ms(k));
    frame_idx.push_back(k);
  }
  json viewers = json::object();
  for (const auto& id : ids) {
    const auto& s = cohort_.viewers.at(id);
    json xs = json::array(), ys = json::array(), mask = json::array();
    for (const auto k : frames) {
      xs.push_back(s.mask[k] ? json(s.xs[k]) : json(nullptr));
      ys.push_back(s.mask[k] ? json(s.ys[k]) : json(nullptr));
      mask.push_back(static_cast<bool>(s.mask[k]));
    }
    viewers[id] = json{{"x", std::move(xs)}, {"y", std::move(ys)}, {"mask", std::move(mask)}};
  }
  return json_response(200, json{{"fps", cohort_.frame_rate_fps},
                                 {"from_ms", from},
                                 {"to_ms", to},
                                 {"frames", std::move(frame_idx)},
                                 {"t_ms", std::move(times)},
                                 {"viewers", std::move(viewers)}});
}

HttpResponse GazeService::eeg(const Query& query) const {
  if (cohort_.eeg.empty()) throw Error(Errc::UnknownViewer, "dataset has no EEG recordings");
  const auto viewer = param(query, "viewer").value_or(cohort_.eeg.begin()->first);
  const auto it = cohort_.eeg.find(viewer);
  if (it == cohort_.eeg.end()) throw Error(Errc::UnknownViewer, "no EEG for '" + viewer + "'");
  const auto& rec = it->second;

  const std::int64_t center = int_param(query, "center_ms").value_or(0);
  const std::int64_t half = int_param(query, "half_window_ms").value_or(5000);
  if (half <= 0) throw BadRequest{"half_window_ms must be > 0"};

  std::vector<std::string> channels = parse_name_list(param(query, "channels").value_or(""));
  if (channels.empty()) channels = rec.channels;
  std::vector<std::size_t> columns;
  for (const auto& c : channels) {
    const auto idx = rec.channel_index(c);
    if (!idx) throw Error(Errc::UnknownChannel, "'" + c + "'");
    columns.push_back(*idx);
  }

  const double from = static_cast<double>(center - half);
  const double to = static_cast<double>(center + half);
  json times = json::array();
  std::vector<json> traces(columns.size(), json::array());
  for (std::size_t i = 0; i < rec.sample_count(); ++i) {
    const double t = rec.time_ms(i);
    if (t < from || t > to) continue;
    times.push_back(t);
    for (std::size_t c = 0; c < columns.size(); ++c) traces[c].push_back(rec.samples[i][columns[c]]);
  }
  json by_channel = json::object();
  for (std::size_t c = 0; c < columns.size(); ++c) by_channel[channels[c]] = std::move(traces[c]);
  return json_response(200, json{{"viewer", viewer},
                                 {"sample_rate_hz", rec.sample_rate_hz},
                                 {"center_ms", center},
                                 {"half_window_ms", half},
                                 {"from_ms", center - half},
                                 {"to_ms", center + half},
                                 {"t_ms", std::move(times)},
                                 {"channels", std::move(by_channel)}});
}

std::shared_ptr<const SimilarityMatrix> GazeService::similarity_for(const WindowSpec& window,
                                                                     const TwedParams& params) const {
  return cache_.get_or_compute({window.start_s, window.length_s, params.lambda, params.gamma}, [&] {
    ++computations_;
    auto matrices = compute_window_matrices(cohort_, std::span<const WindowSpec>(&window, 1), params);
    return std::make_shared<const SimilarityMatrix>(std::move(matrices.front()));
  });
}

HttpResponse GazeService::similarity(const Query& query) const {
  const auto window = window_from(query);
  const auto params = params_from(query, options_.default_params);
  return json_response(200, matrix_json(*similarity_for(window, params)));
}

HttpResponse GazeService::clusters(const Query& query) const {
  const auto window = window_from(query);
  const auto params = params_from(query, options_.default_params);
  const double scale = double_param(query, "scale").value_or(1.0);
  const auto seed = int_param(query, "seed").value_or(0);
  if (scale < 0.0) throw BadRequest{"scale must be >= 0"};
  if (seed < 0) throw BadRequest{"seed must be >= 0"};

  const auto sim = similarity_for(window, params);
  const auto graph = build_graph(*sim);
  const auto part = detect_communities_at(graph, scale, static_cast<std::uint64_t>(seed));
  return json_response(200, json{{"viewers", graph.node_ids},
                                 {"communities", part.assignment},
                                 {"community_count", part.community_count()},
                                 {"q", part.q_value},
                                 {"scale", scale},
                                 {"seed", seed},
                                 {"start_s", window.start_s},
                                 {"len_s", window.length_s},
                                 {"lambda", params.lambda},
                                 {"gamma", params.gamma}});
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(const GazeService& service, const std::filesystem::path& ui_dir)
    : impl_(std::make_unique<Impl>()) {
  for (const char* path : {"/api/meta", "/api/gaze", "/api/eeg", "/api/similarity", "/api/clusters"}) {
    impl_->server.Get(path, [&service, path](const httplib::Request& req, httplib::Response& res) {
      const Query query(req.params.begin(), req.params.end());
      const auto out = service.handle(path, query);
      res.status = out.status;
      res.set_content(out.body, out.content_type);
    });
  }
  if (!ui_dir.empty() && !impl_->server.set_mount_point("/", ui_dir.string())) {
    throw Error(Errc::Io, "cannot serve UI directory " + ui_dir.string());
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(Errc::Io, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(Errc::Io, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace gazesim
