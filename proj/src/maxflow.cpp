#include "eaparse/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "eaparse/error.hpp"

namespace eaparse {

GridGraph::GridGraph(int node_count) {
  if (node_count < 0) fail(Errc::InvalidArgument, "negative node count");
  source_caps_.assign(static_cast<std::size_t>(node_count), 0.0);
  sink_caps_.assign(static_cast<std::size_t>(node_count), 0.0);
}

namespace {

void check_capacity(double cap) {
  if (!std::isfinite(cap) || cap < 0.0) {
    fail(Errc::InvalidArgument, "capacities must be finite and non-negative");
  }
}

}  // namespace

void GridGraph::add_terminal(int node, double source_cap, double sink_cap) {
  if (node < 0 || node >= node_count()) fail(Errc::InvalidArgument, "node index out of range");
  check_capacity(source_cap);
  check_capacity(sink_cap);
  source_caps_[static_cast<std::size_t>(node)] += source_cap;
  sink_caps_[static_cast<std::size_t>(node)] += sink_cap;
}

void GridGraph::add_edge(int a, int b, double capacity) {
  if (a < 0 || b < 0 || a >= node_count() || b >= node_count() || a == b) {
    fail(Errc::InvalidArgument, "invalid neighbor link " + std::to_string(a) + "-" +
                                    std::to_string(b));
  }
  check_capacity(capacity);
  edges_.push_back({a, b, capacity});
}

namespace {

/// Residual network in CSR form. Arc i and arc i^1 are each other's reverse.
class Residual {
 public:
  explicit Residual(const GridGraph& g)
      : n_(g.node_count()), source_(n_), sink_(n_ + 1), first_(static_cast<std::size_t>(n_) + 3, 0) {
    const auto total_nodes = static_cast<std::size_t>(n_) + 2;
    std::vector<int> degree(total_nodes, 0);
    for (int v = 0; v < n_; ++v) {
      degree[static_cast<std::size_t>(v)] += 2;
      degree[static_cast<std::size_t>(source_)] += 1;
      degree[static_cast<std::size_t>(sink_)] += 1;
    }
    for (const auto& e : g.edges()) {
      ++degree[static_cast<std::size_t>(e.a)];
      ++degree[static_cast<std::size_t>(e.b)];
    }
    for (std::size_t v = 0; v < total_nodes; ++v) first_[v + 1] = first_[v] + degree[v];
    const auto arc_count = static_cast<std::size_t>(first_[total_nodes]);
    to_.resize(arc_count);
    from_.resize(arc_count);
    residual_.resize(arc_count);
    reverse_.resize(arc_count);
    std::vector<int> fill(first_.begin(), first_.end() - 1);

    auto add_pair = [&](int a, int b, double cap_ab, double cap_ba) {
      const int i = fill[static_cast<std::size_t>(a)]++;
      const int j = fill[static_cast<std::size_t>(b)]++;
      to_[i] = b;
      from_[i] = a;
      residual_[i] = cap_ab;
      reverse_[i] = j;
      to_[j] = a;
      from_[j] = b;
      residual_[j] = cap_ba;
      reverse_[j] = i;
    };

    for (int v = 0; v < n_; ++v) {
      double s = g.source_caps()[static_cast<std::size_t>(v)];
      double t = g.sink_caps()[static_cast<std::size_t>(v)];
      // Flow through s -> v -> t that needs no other arc.
      const double direct = std::min(s, t);
      flow_ += direct;
      s -= direct;
      t -= direct;
      add_pair(source_, v, s, direct);
      add_pair(v, sink_, t, direct);
    }
    for (const auto& e : g.edges()) add_pair(e.a, e.b, e.capacity, e.capacity);
  }

  double run() {
    const auto total_nodes = static_cast<std::size_t>(n_) + 2;
    level_.assign(total_nodes, -1);
    cursor_.assign(total_nodes, 0);
    while (build_levels()) {
      for (std::size_t v = 0; v < total_nodes; ++v) cursor_[v] = first_[v];
      augment_phase();
    }
    return flow_;
  }

  std::vector<std::uint8_t> source_side() const {
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(n_) + 2, 0);
    std::deque<int> queue{source_};
    seen[static_cast<std::size_t>(source_)] = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int a = first_[u]; a < first_[u + 1]; ++a) {
        const int v = to_[a];
        if (residual_[a] > 0.0 && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          queue.push_back(v);
        }
      }
    }
    seen.resize(static_cast<std::size_t>(n_));
    return seen;
  }

 private:
  bool build_levels() {
    std::fill(level_.begin(), level_.end(), -1);
    std::deque<int> queue{source_};
    level_[static_cast<std::size_t>(source_)] = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int a = first_[u]; a < first_[u + 1]; ++a) {
        const int v = to_[a];
        if (residual_[a] > 0.0 && level_[static_cast<std::size_t>(v)] < 0) {
          level_[static_cast<std::size_t>(v)] = level_[static_cast<std::size_t>(u)] + 1;
          queue.push_back(v);
        }
      }
    }
    return level_[static_cast<std::size_t>(sink_)] >= 0;
  }

  // Iterative blocking-flow search; recursion depth would otherwise scale with
  // the path length on large grids.
  void augment_phase() {
    std::vector<int> path;
    int u = source_;
    while (true) {
      if (u == sink_) {
        double bottleneck = residual_[path.front()];
        for (int a : path) bottleneck = std::min(bottleneck, residual_[a]);
        for (int a : path) {
          residual_[a] -= bottleneck;
          residual_[reverse_[a]] += bottleneck;
        }
        flow_ += bottleneck;
        std::size_t keep = 0;
        while (keep < path.size() && residual_[path[keep]] > 0.0) ++keep;
        path.resize(keep);
        u = path.empty() ? source_ : to_[path.back()];
        continue;
      }
      int& a = cursor_[static_cast<std::size_t>(u)];
      const int end = first_[u + 1];
      const int next_level = level_[static_cast<std::size_t>(u)] + 1;
      while (a < end && !(residual_[a] > 0.0 && level_[static_cast<std::size_t>(to_[a])] == next_level)) {
        ++a;
      }
      if (a < end) {
        path.push_back(a);
        u = to_[a];
        continue;
      }
      // Dead end: prune u from this phase and back up.
      level_[static_cast<std::size_t>(u)] = -1;
      if (path.empty()) return;
      const int back = path.back();
      path.pop_back();
      u = from_[back];
      ++cursor_[static_cast<std::size_t>(u)];
    }
  }

  int n_;
  int source_;
  int sink_;
  std::vector<int> first_;
  std::vector<int> to_;
  std::vector<int> from_;
  std::vector<int> reverse_;
  std::vector<double> residual_;
  std::vector<int> level_;
  std::vector<int> cursor_;
  double flow_ = 0.0;
};

}  // namespace

MinCut max_flow(const GridGraph& graph) {
  Residual residual(graph);
  MinCut result;
  result.flow = residual.run();
  result.source_side = residual.source_side();
  return result;
}

double cut_value(const GridGraph& graph, const std::vector<std::uint8_t>& source_side) {
  if (source_side.size() != static_cast<std::size_t>(graph.node_count())) {
    fail(Errc::InvalidArgument, "partition size differs from node count");
  }
  double total = 0.0;
  for (std::size_t v = 0; v < source_side.size(); ++v) {
    total += source_side[v] ? graph.sink_caps()[v] : graph.source_caps()[v];
  }
  for (const auto& e : graph.edges()) {
    if (source_side[static_cast<std::size_t>(e.a)] != source_side[static_cast<std::size_t>(e.b)]) {
      total += e.capacity;
    }
  }
  return total;
}

}  // namespace eaparse
