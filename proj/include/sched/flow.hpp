#pragma once

#include <cstdint>
#include <vector>

namespace sched::flow {

/// Dinic's maximum flow on an explicit residual graph.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes);

  int add_edge(int from, int to, std::int64_t capacity);
  std::int64_t run(int source, int sink);
  std::int64_t flow_on(int edge) const;

 private:
  struct Edge {
    int to;
    std::int64_t capacity;
  };

  bool build_levels(int source, int sink);
  std::int64_t push(int node, int sink, std::int64_t limit);

  std::vector<Edge> edges_;
  std::vector<std::int64_t> original_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> level_;
  std::vector<std::size_t> cursor_;
};

/// Successive shortest paths with Johnson potentials. Negative edge costs are
/// allowed on the initial graph as long as it has no negative cycle.
class MinCostFlow {
 public:
  explicit MinCostFlow(int nodes);

  int add_edge(int from, int to, std::int64_t capacity, std::int64_t cost);

  struct Result {
    std::int64_t flow = 0;
    std::int64_t cost = 0;
  };

  /// Augments along cheapest paths. With `only_negative` set, stops as soon as
  /// the cheapest augmenting path has non-negative cost (minimum-cost flow of
  /// any value, used for maximum-weight matching).
  Result run(int source, int sink, bool only_negative);
  std::int64_t flow_on(int edge) const;

 private:
  struct Edge {
    int to;
    std::int64_t capacity;
    std::int64_t cost;
  };

  void init_potentials(int source);

  std::vector<Edge> edges_;
  std::vector<std::int64_t> original_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<std::int64_t> potential_;
};

}  // namespace sched::flow
