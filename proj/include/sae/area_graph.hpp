#pragma once

#include <string>
#include <utility>
#include <vector>

namespace sae {

// Undirected contiguity graph over survey areas.  Edges are stored once in
// canonical (low index, high index) order; duplicates and reversed
// duplicates collapse.  Isolated nodes are representable (they only become
// an error when an intrinsic spatial prior is requested).
struct AreaGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> neighbors;  // sorted adjacency lists
  std::vector<int> degree;
  std::vector<int> component;  // connected-component label per node, 0-based
  int n_components = 0;

  bool has_edges() const { return !edges.empty(); }
};

// Build from 0-based index pairs.
AreaGraph build_area_graph(int n_areas, std::vector<std::pair<int, int>> index_edges);

// Build from area-id pairs resolved against the ordered id list.
AreaGraph build_area_graph(const std::vector<std::string>& area_ids,
                           const std::vector<std::pair<std::string, std::string>>& id_edges);

}  // namespace sae
