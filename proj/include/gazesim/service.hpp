#pragma once

#include <atomic>
#include <filesystem>
#include <future>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

#include "gazesim/cluster.hpp"
#include "gazesim/ingest.hpp"
#include "gazesim/simmatrix.hpp"

namespace gazesim {

/// Bounded least-recently-used cache of similarity matrices keyed by
/// (window start, window length, lambda, gamma). Concurrent requests for the
/// same key share a single computation.
class SimilarityCache {
 public:
  using Key = std::tuple<double, double, double, double>;
  using Value = std::shared_ptr<const SimilarityMatrix>;

  explicit SimilarityCache(std::size_t capacity) : capacity_(capacity) {}

  template <typename Compute>
  Value get_or_compute(const Key& key, Compute&& compute);

  std::size_t size() const;

 private:
  struct Entry {
    std::shared_future<Value> value;
    std::list<Key>::iterator lru;
  };

  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::map<Key, Entry> entries_;
  std::list<Key> order_;  // front = most recent
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct ServiceOptions {
  TwedParams default_params{5000.0, 5000.0};
  std::size_t cache_capacity = 64;
};

/// Read-only query surface over a preprocessed cohort. Handlers are safe to
/// call concurrently; the dataset is immutable after construction.
class GazeService {
 public:
  GazeService(CohortDataset cohort, ServiceOptions options);

  /// Dispatches GET `path` with decoded query parameters.
  HttpResponse handle(const std::string& path, const std::multimap<std::string, std::string>& query) const;

  HttpResponse meta() const;
  HttpResponse gaze(const std::multimap<std::string, std::string>& query) const;
  HttpResponse eeg(const std::multimap<std::string, std::string>& query) const;
  HttpResponse similarity(const std::multimap<std::string, std::string>& query) const;
  HttpResponse clusters(const std::multimap<std::string, std::string>& query) const;

  /// Number of similarity matrices actually computed (cache misses).
  std::size_t similarity_computations() const { return computations_.load(); }

  const CohortDataset& cohort() const { return cohort_; }

 private:
  std::shared_ptr<const SimilarityMatrix> similarity_for(const WindowSpec& window, const TwedParams& params) const;

  CohortDataset cohort_;
  ServiceOptions options_;
  std::int64_t start_ms_ = 0;
  std::int64_t duration_ms_ = 0;
  mutable SimilarityCache cache_;
  mutable std::atomic<std::size_t> computations_{0};
};

/// HTTP front end for a GazeService; also serves `ui_dir` as static files
/// when it is non-empty.
class HttpServer {
 public:
  HttpServer(const GazeService& service, const std::filesystem::path& ui_dir);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds host:port (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// --- template implementation ------------------------------------------------

template <typename Compute>
SimilarityCache::Value SimilarityCache::get_or_compute(const Key& key, Compute&& compute) {
  std::promise<Value> promise;
  std::shared_future<Value> future;
  bool owner = false;
  {
    std::lock_guard lock(mutex_);
    if (const auto it = entries_.find(key); it != entries_.end()) {
      order_.splice(order_.begin(), order_, it->second.lru);
      future = it->second.value;
    } else {
      future = promise.get_future().share();
      order_.push_front(key);
      entries_.emplace(key, Entry{future, order_.begin()});
      while (entries_.size() > capacity_) {
        entries_.erase(order_.back());
        order_.pop_back();
      }
      owner = true;
    }
  }
  if (owner) {
    try {
      promise.set_value(compute());
    } catch (...) {
      promise.set_exception(std::current_exception());
      // Failed computations are not cached.
      std::lock_guard lock(mutex_);
      if (const auto it = entries_.find(key); it != entries_.end()) {
        order_.erase(it->second.lru);
        entries_.erase(it);
      }
    }
  }
  return future.get();
}

}  // namespace gazesim
