#include "bevclust/graph.hpp"

namespace bevclust {

ComponentLabeling components_from_union_find(UnionFind& uf, std::size_t node_count) {
  ComponentLabeling out;
  out.labels.assign(node_count, 0);
  constexpr std::uint32_t kUnset = 0xffffffffu;
  std::vector<std::uint32_t> root_label(node_count, kUnset);
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < node_count; ++i) {
    const std::uint32_t root = uf.find(static_cast<std::uint32_t>(i));
    if (root_label[root] == kUnset) root_label[root] = next++;
    out.labels[i] = root_label[root];
  }
  out.component_count = next;
  return out;
}

ComponentLabeling connected_components(const AdjacencyGraph& graph) {
  UnionFind uf(graph.node_count);
  for (const auto& [u, v] : graph.edges) {
    if (u >= graph.node_count || v >= graph.node_count) {
      throw ContractViolation("connected_components: edge endpoint out of range");
    }
    uf.unite(u, v);
  }
  return components_from_union_find(uf, graph.node_count);
}

}  // namespace bevclust
