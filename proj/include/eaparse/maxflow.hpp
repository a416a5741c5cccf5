#pragma once

#include <cstdint>
#include <vector>

namespace eaparse {

/// s-t graph over n nodes: each node has a source link and a sink link, and
/// undirected neighbor links carry the same capacity in both directions.
class GridGraph {
 public:
  struct Edge {
    int a;
    int b;
    double capacity;
  };

  explicit GridGraph(int node_count);

  int node_count() const noexcept { return static_cast<int>(source_caps_.size()); }

  /// Adds to the node's terminal capacities.
  void add_terminal(int node, double source_cap, double sink_cap);
  void add_edge(int a, int b, double capacity);

  const std::vector<double>& source_caps() const noexcept { return source_caps_; }
  const std::vector<double>& sink_caps() const noexcept { return sink_caps_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

 private:
  std::vector<double> source_caps_;
  std::vector<double> sink_caps_;
  std::vector<Edge> edges_;
};

struct MinCut {
  double flow = 0.0;
  /// 1 = node stays on the source side of the residual graph.
  std::vector<std::uint8_t> source_side;
};

/// Dinic max-flow (shortest augmenting paths over BFS level graphs). Edges are
/// explored in insertion order, so results are deterministic.
MinCut max_flow(const GridGraph& graph);

/// Capacity of the cut induced by `source_side`.
double cut_value(const GridGraph& graph, const std::vector<std::uint8_t>& source_side);

}  // namespace eaparse
