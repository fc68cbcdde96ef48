#include "gazesim/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>

#include "gazesim/csv.hpp"
#include "gazesim/error.hpp"
#include "parallel.hpp"

namespace gazesim {

namespace {

// Gains at or below this count as zero.
constexpr double kMinGain = 1e-12;

void check_assignment(std::span<const std::size_t> assignment, const CouplingGraph& graph) {
  if (graph.size() == 0) throw Error(Errc::EmptyGraph, "graph has no nodes");
  if (assignment.size() != graph.size()) {
    throw Error(Errc::InvalidArgument, "partition covers " + std::to_string(assignment.size()) + " nodes, graph has " +
                                           std::to_string(graph.size()));
  }
}

double move_gain(double k_target, double k_own, double s_own, double s_target, double s_node, double w, double p) {
  return (k_target - k_own) / w - p * s_node * (s_target - s_own + s_node) / (2.0 * w * w);
}

double merge_gain(double w_between, double s_a, double s_b, double w, double p) {
  return w_between / w - p * s_a * s_b / (2.0 * w * w);
}

// Mutable state of one greedy run. Labels live in [0, n).
class Greedy {
 public:
  Greedy(const CouplingGraph& graph, double scale, std::uint64_t seed, std::vector<double>* trace)
      : graph_(graph), n_(graph.size()), p_(scale), w_(graph.total_weight()), rng_(seed), trace_(trace) {
    strength_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) strength_[i] = graph.strength(i);
    label_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) label_[i] = i;
    community_strength_ = strength_;
    q_ = compute_q(label_, graph_, p_);
  }

  void run() {
    if (w_ == 0.0) return;
    bool changed = true;
    while (changed) {
      const bool moved = move_phase();
      const bool merged = merge_phase();
      changed = moved || merged;
    }
  }

  const std::vector<std::size_t>& labels() const { return label_; }

 private:
  std::size_t take_random(std::vector<std::size_t>& pool) {
    const std::size_t k = static_cast<std::size_t>(rng_() % pool.size());
    const std::size_t picked = pool[k];
    pool[k] = pool.back();
    pool.pop_back();
    return picked;
  }

  void refresh_strength(std::size_t label) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (label_[i] == label) s += strength_[i];
    }
    community_strength_[label] = s;
  }

  void accept(double gain) {
    q_ += gain;
    if (trace_) trace_->push_back(q_);
  }

  bool move_phase() {
    bool any = false;
    std::vector<double> k_to(n_);
    std::vector<std::size_t> neighbours;
    while (true) {
      bool moved = false;
      std::vector<std::size_t> pool(n_);
      for (std::size_t i = 0; i < n_; ++i) pool[i] = i;
      while (!pool.empty()) {
        const std::size_t node = take_random(pool);
        const std::size_t own = label_[node];

        std::fill(k_to.begin(), k_to.end(), 0.0);
        neighbours.clear();
        for (std::size_t j = 0; j < n_; ++j) {
          const double wj = graph_.weights(node, j);
          if (j == node || wj <= 0.0) continue;
          if (k_to[label_[j]] == 0.0 && label_[j] != own) neighbours.push_back(label_[j]);
          k_to[label_[j]] += wj;
        }
        if (neighbours.empty()) continue;
        if (move_breaks_community(node, label_, graph_)) continue;

        double best = 0.0;
        std::size_t best_label = own;
        for (const std::size_t c : neighbours) {
          const double gain = move_gain(k_to[c], k_to[own], community_strength_[own], community_strength_[c],
                                        strength_[node], w_, p_);
          if (gain > best) {
            best = gain;
            best_label = c;
          }
        }
        if (best > kMinGain) {
          label_[node] = best_label;
          refresh_strength(own);
          refresh_strength(best_label);
          accept(best);
          moved = true;
        }
      }
      if (!moved) break;
      any = true;
    }
    return any;
  }

  bool merge_phase() {
    bool any = false;
    std::vector<double> between(n_);
    while (true) {
      bool merged = false;
      std::vector<std::size_t> pool;
      {
        std::vector<bool> seen(n_, false);
        for (std::size_t i = 0; i < n_; ++i) {
          if (!seen[label_[i]]) {
            seen[label_[i]] = true;
            pool.push_back(label_[i]);
          }
        }
        std::sort(pool.begin(), pool.end());
      }
      while (!pool.empty()) {
        const std::size_t c = take_random(pool);
        std::fill(between.begin(), between.end(), 0.0);
        bool exists = false;
        for (std::size_t i = 0; i < n_; ++i) {
          if (label_[i] != c) continue;
          exists = true;
          for (std::size_t j = 0; j < n_; ++j) {
            if (label_[j] != c && graph_.weights(i, j) > 0.0) between[label_[j]] += graph_.weights(i, j);
          }
        }
        if (!exists) continue;

        double best = 0.0;
        std::size_t best_label = c;
        for (std::size_t d = 0; d < n_; ++d) {
          if (d == c || between[d] <= 0.0) continue;
          const double gain = merge_gain(between[d], community_strength_[c], community_strength_[d], w_, p_);
          if (gain > best) {
            best = gain;
            best_label = d;
          }
        }
        if (best > kMinGain) {
          for (auto& l : label_) {
            if (l == c) l = best_label;
          }
          community_strength_[c] = 0.0;
          refresh_strength(best_label);
          accept(best);
          merged = true;
        }
      }
      if (!merged) break;
      any = true;
    }
    return any;
  }

  const CouplingGraph& graph_;
  std::size_t n_;
  double p_;
  double w_;
  std::mt19937_64 rng_;
  std::vector<double>* trace_;
  std::vector<double> strength_;
  std::vector<double> community_strength_;
  std::vector<std::size_t> label_;
  double q_ = 0.0;
};

}  // namespace

double CouplingGraph::total_weight() const {
  double w = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) w += weights(i, j);
  }
  return w;
}

double CouplingGraph::strength(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < size(); ++j) {
    if (j != i) s += weights(i, j);
  }
  return s;
}

void CouplingGraph::validate() const {
  if (weights.size() != node_ids.size()) throw Error(Errc::InvalidArgument, "weight grid does not match node list");
  for (std::size_t i = 0; i < size(); ++i) {
    if (weights(i, i) != 0.0) throw Error(Errc::InvalidArgument, "coupling graph has a self-loop");
    for (std::size_t j = 0; j < size(); ++j) {
      const double w = weights(i, j);
      if (!(w >= 0.0) || !std::isfinite(w) || w != weights(j, i)) {
        throw Error(Errc::InvalidArgument, "coupling weights must be finite, non-negative and symmetric");
      }
    }
  }
}

std::size_t Partition::community_count() const {
  std::size_t count = 0;
  for (const auto c : assignment) count = std::max(count, c + 1);
  return count;
}

CouplingGraph build_graph(const SimilarityMatrix& sim, double min_weight) {
  CouplingGraph g;
  g.node_ids = sim.viewer_ids;
  const std::size_t n = sim.values.size();
  g.weights = SquareMatrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = sim.values(i, j);
      if (i != j && w >= min_weight) g.weights(i, j) = w;
    }
  }
  g.validate();
  return g;
}

double compute_q(std::span<const std::size_t> assignment, const CouplingGraph& graph, double scale) {
  check_assignment(assignment, graph);
  const double w = graph.total_weight();
  if (w == 0.0) return 0.0;
  std::map<std::size_t, std::pair<double, double>> per_community;  // label -> (W_c, S_c)
  const std::size_t n = graph.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto& [inside, strength] = per_community[assignment[i]];
    strength += graph.strength(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (assignment[j] == assignment[i]) inside += graph.weights(i, j);
    }
  }
  double q = 0.0;
  for (const auto& [label, ws] : per_community) {
    const double frac = ws.second / (2.0 * w);
    q += ws.first / w - scale * frac * frac;
  }
  return q;
}

double compute_q(const Partition& partition, const CouplingGraph& graph, double scale) {
  return compute_q(partition.assignment, graph, scale);
}

double delta_q_move(std::size_t node, std::size_t target, std::span<const std::size_t> assignment,
                    const CouplingGraph& graph, double scale) {
  check_assignment(assignment, graph);
  if (node >= graph.size()) throw Error(Errc::InvalidArgument, "node index out of range");
  const std::size_t own = assignment[node];
  if (target == own) return 0.0;

  double k_own = 0.0, k_target = 0.0, s_own = 0.0, s_target = 0.0;
  for (std::size_t j = 0; j < graph.size(); ++j) {
    if (assignment[j] == own) s_own += graph.strength(j);
    if (assignment[j] == target) s_target += graph.strength(j);
    if (j == node) continue;
    if (assignment[j] == own) k_own += graph.weights(node, j);
    if (assignment[j] == target) k_target += graph.weights(node, j);
  }
  if (!(k_target > 0.0)) {
    throw Error(Errc::NotNeighbor, "node " + std::to_string(node) + " has no edge into community " + std::to_string(target));
  }
  return move_gain(k_target, k_own, s_own, s_target, graph.strength(node), graph.total_weight(), scale);
}

double delta_q_merge(std::size_t a, std::size_t b, std::span<const std::size_t> assignment, const CouplingGraph& graph,
                     double scale) {
  check_assignment(assignment, graph);
  if (a == b) return 0.0;
  double between = 0.0, s_a = 0.0, s_b = 0.0;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (assignment[i] == a) {
      s_a += graph.strength(i);
      for (std::size_t j = 0; j < graph.size(); ++j) {
        if (assignment[j] == b) between += graph.weights(i, j);
      }
    } else if (assignment[i] == b) {
      s_b += graph.strength(i);
    }
  }
  const double w = graph.total_weight();
  if (w == 0.0) return 0.0;
  return merge_gain(between, s_a, s_b, w, scale);
}

bool move_breaks_community(std::size_t node, std::span<const std::size_t> assignment, const CouplingGraph& graph) {
  const std::size_t own = assignment[node];
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (i != node && assignment[i] == own) members.push_back(i);
  }
  if (members.size() <= 1) return false;

  std::vector<bool> reached(graph.size(), false);
  std::queue<std::size_t> frontier;
  frontier.push(members.front());
  reached[members.front()] = true;
  std::size_t count = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (const std::size_t v : members) {
      if (!reached[v] && graph.weights(u, v) > 0.0) {
        reached[v] = true;
        ++count;
        frontier.push(v);
      }
    }
  }
  return count != members.size();
}

std::vector<std::size_t> canonicalize(std::span<const std::size_t> assignment) {
  std::map<std::size_t, std::size_t> relabel;
  std::vector<std::size_t> out(assignment.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const auto [it, inserted] = relabel.emplace(assignment[i], relabel.size());
    out[i] = it->second;
  }
  return out;
}

Partition detect_communities_at(const CouplingGraph& graph, double scale, std::uint64_t seed,
                                std::vector<double>* q_trace) {
  if (graph.size() == 0) throw Error(Errc::EmptyGraph, "graph has no nodes");
  if (!std::isfinite(scale) || scale < 0.0) throw Error(Errc::InvalidArgument, "scale must be finite and >= 0");
  graph.validate();
  Greedy greedy(graph, scale, seed, q_trace);
  greedy.run();
  Partition out;
  out.assignment = canonicalize(greedy.labels());
  out.scale = scale;
  out.q_value = compute_q(out.assignment, graph, scale);
  return out;
}

ScaleSweep detect_communities(const CouplingGraph& graph, std::span<const double> scales, std::uint64_t seed) {
  if (graph.size() == 0) throw Error(Errc::EmptyGraph, "graph has no nodes");
  if (scales.empty()) throw Error(Errc::InvalidArgument, "at least one scale is required");
  ScaleSweep sweep;
  sweep.scales.assign(scales.begin(), scales.end());
  sweep.partitions.resize(scales.size());
  const auto count = static_cast<std::ptrdiff_t>(scales.size());
  // Exceptions may not escape an OpenMP region; validate before entering it.
  graph.validate();
  for (const double p : scales) {
    if (!std::isfinite(p) || p < 0.0) throw Error(Errc::InvalidArgument, "scale must be finite and >= 0");
  }
  detail::parallel_for(count, [&](std::ptrdiff_t k) {
    sweep.partitions[k] = detect_communities_at(graph, scales[k], seed);
  });
  return sweep;
}

GephiTables export_gephi(const CouplingGraph& graph, const Partition& partition) {
  check_assignment(partition.assignment, graph);
  GephiTables t;
  t.nodes_csv = "Id,Label,Community\n";
  for (std::size_t i = 0; i < graph.size(); ++i) {
    t.nodes_csv += std::to_string(i) + "," + csv::escape(graph.node_ids[i]) + "," +
                   std::to_string(partition.assignment[i]) + "\n";
  }
  t.edges_csv = "Source,Target,Weight,Type\n";
  for (std::size_t i = 0; i < graph.size(); ++i) {
    for (std::size_t j = i + 1; j < graph.size(); ++j) {
      if (graph.weights(i, j) > 0.0) {
        t.edges_csv += std::to_string(i) + "," + std::to_string(j) + "," + csv::format_double(graph.weights(i, j)) +
                       ",Undirected\n";
      }
    }
  }
  return t;
}

CouplingGraph import_gephi_edges(std::string_view edges_csv, std::vector<std::string> node_ids) {
  CouplingGraph g;
  g.weights = SquareMatrix(node_ids.size());
  g.node_ids = std::move(node_ids);
  bool header = true;
  std::size_t line_no = 0;
  for (const auto line : csv::lines(edges_csv)) {
    ++line_no;
    if (csv::is_blank(line)) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto row = csv::split_line(line, ',');
    if (row.size() < 3) throw Error(Errc::MalformedRow, "edge table line " + std::to_string(line_no));
    const auto s = csv::parse_int(row[0]);
    const auto t = csv::parse_int(row[1]);
    const auto w = csv::parse_double(row[2]);
    if (!s || !t || !w || *s < 0 || *t < 0 || static_cast<std::size_t>(*s) >= g.size() ||
        static_cast<std::size_t>(*t) >= g.size()) {
      throw Error(Errc::MalformedRow, "edge table line " + std::to_string(line_no));
    }
    g.weights(*s, *t) = *w;
    g.weights(*t, *s) = *w;
  }
  g.validate();
  return g;
}

std::string partition_csv(const CouplingGraph& graph, const ScaleSweep& sweep) {
  std::string out = "viewer_id,community,scale,Q\n";
  for (const auto& part : sweep.partitions) {
    for (std::size_t i = 0; i < graph.size(); ++i) {
      out += csv::escape(graph.node_ids[i]) + "," + std::to_string(part.assignment[i]) + "," +
             csv::format_double(part.scale) + "," + csv::format_double(part.q_value) + "\n";
    }
  }
  return out;
}

}  // namespace gazesim
