#include "sae/area_graph.hpp"

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "sae/errors.hpp"

namespace sae {

AreaGraph build_area_graph(int n_areas, std::vector<std::pair<int, int>> index_edges) {
  if (n_areas <= 0) {
    throw DataError(errc::empty_graph, "graph needs at least one area");
  }
  AreaGraph g;
  g.n = n_areas;
  for (auto& [i, k] : index_edges) {
    if (i < 0 || k < 0 || i >= n_areas || k >= n_areas) {
      throw DataError(errc::unknown_area_id,
                      "edge endpoint out of range: (" + std::to_string(i) + ", " + std::to_string(k) + ")");
    }
    if (i == k) {
      throw DataError(errc::self_loop, "self loop on area index " + std::to_string(i));
    }
    if (i > k) std::swap(i, k);
  }
  std::sort(index_edges.begin(), index_edges.end());
  index_edges.erase(std::unique(index_edges.begin(), index_edges.end()), index_edges.end());
  g.edges = std::move(index_edges);

  g.neighbors.assign(g.n, {});
  for (const auto& [i, k] : g.edges) {
    g.neighbors[i].push_back(k);
    g.neighbors[k].push_back(i);
  }
  for (auto& nb : g.neighbors) std::sort(nb.begin(), nb.end());
  g.degree.resize(g.n);
  for (int i = 0; i < g.n; ++i) g.degree[i] = static_cast<int>(g.neighbors[i].size());

  // Connected components by iterative DFS.
  g.component.assign(g.n, -1);
  g.n_components = 0;
  std::vector<int> stack;
  for (int start = 0; start < g.n; ++start) {
    if (g.component[start] != -1) continue;
    const int label = g.n_components++;
    stack.push_back(start);
    g.component[start] = label;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : g.neighbors[v]) {
        if (g.component[w] == -1) {
          g.component[w] = label;
          stack.push_back(w);
        }
      }
    }
  }
  return g;
}

AreaGraph build_area_graph(const std::vector<std::string>& area_ids,
                           const std::vector<std::pair<std::string, std::string>>& id_edges) {
  std::unordered_map<std::string, int> index;
  index.reserve(area_ids.size());
  for (int i = 0; i < static_cast<int>(area_ids.size()); ++i) {
    if (!index.emplace(area_ids[i], i).second) {
      throw DataError(errc::duplicate_area_id, "duplicate area id '" + area_ids[i] + "'");
    }
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(id_edges.size());
  for (const auto& [a, b] : id_edges) {
    const auto ia = index.find(a);
    if (ia == index.end()) throw DataError(errc::unknown_area_id, "unknown area id '" + a + "'");
    const auto ib = index.find(b);
    if (ib == index.end()) throw DataError(errc::unknown_area_id, "unknown area id '" + b + "'");
    edges.emplace_back(ia->second, ib->second);
  }
  return build_area_graph(static_cast<int>(area_ids.size()), std::move(edges));
}

}  // namespace sae
