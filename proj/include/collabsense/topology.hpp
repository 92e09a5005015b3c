#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "collabsense/types.hpp"

namespace collabsense {

/// A directed collaboration edge: `receiver` has access to the observation of `source`.
struct Edge {
    int receiver = 0;
    int source = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Collaboration adjacency with explicit self-loops.
///
/// Edges are kept sorted row-major (by receiver, then source). That order is the
/// canonical layout of the weight vector used by the snapshot solvers, so every
/// receiver's sources form one contiguous run of the edge list.
class Topology {
public:
    /// Validates and takes ownership of `edges`. Throws std::invalid_argument if the
    /// list is unsorted, has duplicates or out-of-range indices, or lacks a self-loop.
    Topology(int n_nodes, std::vector<Edge> edges,
             std::optional<std::vector<Point2>> positions = std::nullopt);

    int n_nodes() const { return n_nodes_; }
    std::size_t n_edges() const { return edges_.size(); }
    std::span<const Edge> edges() const { return edges_; }
    const std::optional<std::vector<Point2>>& positions() const { return positions_; }

    /// Edge-list index range [first, last) of the sources feeding `receiver`.
    std::pair<std::size_t, std::size_t> row_range(int receiver) const {
        return {row_offsets_[receiver], row_offsets_[receiver + 1]};
    }
    int in_degree(int receiver) const {
        return static_cast<int>(row_offsets_[receiver + 1] - row_offsets_[receiver]);
    }
    std::size_t non_self_edges() const { return edges_.size() - static_cast<std::size_t>(n_nodes_); }

    bool contains(Edge e) const;
    /// (n,m) present iff (m,n) present.
    bool is_symmetric() const;

private:
    int n_nodes_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> row_offsets_;
    std::optional<std::vector<Point2>> positions_;
};

/// Disjoint fully connected clusters of size `q`: A = I_K (x) 1 1^T.
Topology q_clique(int n_nodes, int q);

/// Each node listens to itself and its q-1 nearest neighbors (Euclidean, ties to lower index).
Topology nearest_neighbor(std::span<const Point2> positions, int q);

/// Random geometric graph: edge iff distance <= radius. Symmetric, self-loops included.
Topology rgg(std::span<const Point2> positions, double radius);

/// Radius whose disc holds `q_tilde` nodes in expectation: r = sqrt(q_tilde / (N pi)).
double rgg_radius_for_degree(int n_nodes, double q_tilde);

/// n i.i.d. uniform points in the unit square.
std::vector<Point2> uniform_positions(int n_nodes, std::uint64_t seed);

/// Plain-text edge list: `n_nodes=<N>` then one `n m` line per edge.
void write_edge_list(std::ostream& out, const Topology& topology);
Topology read_edge_list(std::istream& in);

}  // namespace collabsense
