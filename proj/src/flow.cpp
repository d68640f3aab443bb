#include "sched/flow.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <queue>

namespace sched::flow {

namespace {
constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
}

MaxFlow::MaxFlow(int nodes)
    : adjacency_(static_cast<std::size_t>(nodes)),
      level_(static_cast<std::size_t>(nodes)),
      cursor_(static_cast<std::size_t>(nodes)) {}

int MaxFlow::add_edge(int from, int to, std::int64_t capacity) {
  const int id = static_cast<int>(edges_.size());
  edges_.push_back({to, capacity});
  edges_.push_back({from, 0});
  original_.push_back(capacity);
  original_.push_back(0);
  adjacency_[static_cast<std::size_t>(from)].push_back(id);
  adjacency_[static_cast<std::size_t>(to)].push_back(id + 1);
  return id;
}

bool MaxFlow::build_levels(int source, int sink) {
  std::fill(level_.begin(), level_.end(), -1);
  std::queue<int> queue;
  level_[static_cast<std::size_t>(source)] = 0;
  queue.push(source);
  while (!queue.empty()) {
    const int node = queue.front();
    queue.pop();
    for (int id : adjacency_[static_cast<std::size_t>(node)]) {
      const auto& e = edges_[static_cast<std::size_t>(id)];
      if (e.capacity > 0 && level_[static_cast<std::size_t>(e.to)] < 0) {
        level_[static_cast<std::size_t>(e.to)] = level_[static_cast<std::size_t>(node)] + 1;
        queue.push(e.to);
      }
    }
  }
  return level_[static_cast<std::size_t>(sink)] >= 0;
}

std::int64_t MaxFlow::push(int node, int sink, std::int64_t limit) {
  if (node == sink) return limit;
  auto& adj = adjacency_[static_cast<std::size_t>(node)];
  for (auto& i = cursor_[static_cast<std::size_t>(node)]; i < adj.size(); ++i) {
    const int id = adj[i];
    auto& e = edges_[static_cast<std::size_t>(id)];
    if (e.capacity <= 0 ||
        level_[static_cast<std::size_t>(e.to)] != level_[static_cast<std::size_t>(node)] + 1) {
      continue;
    }
    const auto pushed = push(e.to, sink, std::min(limit, e.capacity));
    if (pushed > 0) {
      e.capacity -= pushed;
      edges_[static_cast<std::size_t>(id ^ 1)].capacity += pushed;
      return pushed;
    }
  }
  return 0;
}

std::int64_t MaxFlow::run(int source, int sink) {
  std::int64_t total = 0;
  while (build_levels(source, sink)) {
    std::fill(cursor_.begin(), cursor_.end(), 0);
    while (const auto pushed = push(source, sink, kInf)) total += pushed;
  }
  return total;
}

std::int64_t MaxFlow::flow_on(int edge) const {
  return original_[static_cast<std::size_t>(edge)] - edges_[static_cast<std::size_t>(edge)].capacity;
}

MinCostFlow::MinCostFlow(int nodes)
    : adjacency_(static_cast<std::size_t>(nodes)), potential_(static_cast<std::size_t>(nodes), 0) {}

int MinCostFlow::add_edge(int from, int to, std::int64_t capacity, std::int64_t cost) {
  const int id = static_cast<int>(edges_.size());
  edges_.push_back({to, capacity, cost});
  edges_.push_back({from, 0, -cost});
  original_.push_back(capacity);
  original_.push_back(0);
  adjacency_[static_cast<std::size_t>(from)].push_back(id);
  adjacency_[static_cast<std::size_t>(to)].push_back(id + 1);
  return id;
}

void MinCostFlow::init_potentials(int source) {
  // Bellman-Ford (queue based) from the source over positive-capacity edges.
  const auto n = adjacency_.size();
  std::vector<std::int64_t> dist(n, kInf);
  std::vector<bool> queued(n, false);
  std::deque<int> queue;
  dist[static_cast<std::size_t>(source)] = 0;
  queue.push_back(source);
  while (!queue.empty()) {
    const int node = queue.front();
    queue.pop_front();
    queued[static_cast<std::size_t>(node)] = false;
    for (int id : adjacency_[static_cast<std::size_t>(node)]) {
      const auto& e = edges_[static_cast<std::size_t>(id)];
      if (e.capacity <= 0) continue;
      const auto candidate = dist[static_cast<std::size_t>(node)] + e.cost;
      if (candidate < dist[static_cast<std::size_t>(e.to)]) {
        dist[static_cast<std::size_t>(e.to)] = candidate;
        if (!queued[static_cast<std::size_t>(e.to)]) {
          queued[static_cast<std::size_t>(e.to)] = true;
          queue.push_back(e.to);
        }
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) potential_[v] = dist[v] == kInf ? 0 : dist[v];
}

MinCostFlow::Result MinCostFlow::run(int source, int sink, bool only_negative) {
  init_potentials(source);
  const auto n = adjacency_.size();
  Result result;
  std::vector<std::int64_t> dist(n);
  std::vector<int> via(n);
  using Entry = std::pair<std::int64_t, int>;

  while (true) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(via.begin(), via.end(), -1);
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[static_cast<std::size_t>(source)] = 0;
    heap.emplace(0, source);
    while (!heap.empty()) {
      const auto [d, node] = heap.top();
      heap.pop();
      if (d > dist[static_cast<std::size_t>(node)]) continue;
      for (int id : adjacency_[static_cast<std::size_t>(node)]) {
        const auto& e = edges_[static_cast<std::size_t>(id)];
        if (e.capacity <= 0) continue;
        const auto reduced = e.cost + potential_[static_cast<std::size_t>(node)] -
                             potential_[static_cast<std::size_t>(e.to)];
        const auto candidate = d + reduced;
        if (candidate < dist[static_cast<std::size_t>(e.to)]) {
          dist[static_cast<std::size_t>(e.to)] = candidate;
          via[static_cast<std::size_t>(e.to)] = id;
          heap.emplace(candidate, e.to);
        }
      }
    }
    if (dist[static_cast<std::size_t>(sink)] == kInf) break;
    for (std::size_t v = 0; v < n; ++v) {
      if (dist[v] < kInf) potential_[v] += dist[v];
    }
    const auto path_cost =
        potential_[static_cast<std::size_t>(sink)] - potential_[static_cast<std::size_t>(source)];
    if (only_negative && path_cost >= 0) break;

    std::int64_t bottleneck = kInf;
    for (int v = sink; v != source;) {
      const int id = via[static_cast<std::size_t>(v)];
      bottleneck = std::min(bottleneck, edges_[static_cast<std::size_t>(id)].capacity);
      v = edges_[static_cast<std::size_t>(id ^ 1)].to;
    }
    for (int v = sink; v != source;) {
      const int id = via[static_cast<std::size_t>(v)];
      edges_[static_cast<std::size_t>(id)].capacity -= bottleneck;
      edges_[static_cast<std::size_t>(id ^ 1)].capacity += bottleneck;
      v = edges_[static_cast<std::size_t>(id ^ 1)].to;
    }
    result.flow += bottleneck;
    result.cost += bottleneck * path_cost;
  }
  return result;
}

std::int64_t MinCostFlow::flow_on(int edge) const {
  return original_[static_cast<std::size_t>(edge)] - edges_[static_cast<std::size_t>(edge)].capacity;
}

}  // namespace sched::flow
