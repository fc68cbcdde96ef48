#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gazesim/simmatrix.hpp"

namespace gazesim {

/// Undirected weighted graph over viewers; weights[i][j] = J_ij, zero diagonal.
struct CouplingGraph {
  std::vector<std::string> node_ids;
  SquareMatrix weights;

  std::size_t size() const noexcept { return node_ids.size(); }
  /// Sum of J over unordered pairs.
  double total_weight() const;
  /// Sum of incident weights of node i.
  double strength(std::size_t i) const;
  void validate() const;
};

/// Community assignment, ids contiguous from 0 in order of each community's
/// smallest node index.
struct Partition {
  std::vector<std::size_t> assignment;
  double q_value = 0.0;
  double scale = 1.0;

  std::size_t community_count() const;
};

struct ScaleSweep {
  std::vector<double> scales;
  std::vector<Partition> partitions;
};

/// Copies the off-diagonal similarities as weights; entries below `min_weight`
/// are dropped (0 keeps everything).
CouplingGraph build_graph(const SimilarityMatrix& sim, double min_weight = 0.0);

/// Multi-scale modularity Q(p) = sum_c [ W_c / W - p * (S_c / 2W)^2 ], where W
/// is the total edge weight, W_c the weight inside community c and S_c the sum
/// of its members' strengths. Defined as 0 when the graph carries no weight.
double compute_q(std::span<const std::size_t> assignment, const CouplingGraph& graph, double scale);
double compute_q(const Partition& partition, const CouplingGraph& graph, double scale);

/// Change in Q from moving `node` into the community labelled `target`.
/// Zero when `target` is the node's own community; NotNeighbor when the node
/// has no positive edge into `target`.
double delta_q_move(std::size_t node, std::size_t target, std::span<const std::size_t> assignment,
                    const CouplingGraph& graph, double scale);

/// Change in Q from merging communities `a` and `b`.
double delta_q_merge(std::size_t a, std::size_t b, std::span<const std::size_t> assignment, const CouplingGraph& graph,
                     double scale);

/// True when taking `node` out of its community leaves the rest of that
/// community disconnected (over positive-weight edges).
bool move_breaks_community(std::size_t node, std::span<const std::size_t> assignment, const CouplingGraph& graph);

/// Relabels to contiguous ids ordered by smallest member.
std::vector<std::size_t> canonicalize(std::span<const std::size_t> assignment);

/// Greedy node-move / community-merge optimisation of Q at one scale, starting
/// from singletons. The visiting order comes from `seed`. If `q_trace` is
/// given, Q after every accepted move or merge is appended to it.
Partition detect_communities_at(const CouplingGraph& graph, double scale, std::uint64_t seed,
                                std::vector<double>* q_trace = nullptr);

/// detect_communities_at for every scale (scales run in parallel).
ScaleSweep detect_communities(const CouplingGraph& graph, std::span<const double> scales, std::uint64_t seed);

struct GephiTables {
  std::string nodes_csv;  // Id,Label,Community
  std::string edges_csv;  // Source,Target,Weight,Type
};

/// Gephi spreadsheet-import tables. Ids are node indices, labels the viewer ids.
GephiTables export_gephi(const CouplingGraph& graph, const Partition& partition);

/// Rebuilds a graph from an exported edge table.
CouplingGraph import_gephi_edges(std::string_view edges_csv, std::vector<std::string> node_ids);

/// viewer_id,community,scale,Q rows for every scale of the sweep.
std::string partition_csv(const CouplingGraph& graph, const ScaleSweep& sweep);

}  // namespace gazesim
