#include "collabsense/topology.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "collabsense/rng.hpp"

namespace collabsense {

Topology::Topology(int n_nodes, std::vector<Edge> edges, std::optional<std::vector<Point2>> positions)
    : n_nodes_(n_nodes), edges_(std::move(edges)), positions_(std::move(positions)) {
    if (n_nodes_ <= 0) {
        throw std::invalid_argument("topology: n_nodes must be positive, got " + std::to_string(n_nodes_));
    }
    if (positions_ && static_cast<int>(positions_->size()) != n_nodes_) {
        throw std::invalid_argument("topology: positions size does not match n_nodes");
    }
    row_offsets_.assign(static_cast<std::size_t>(n_nodes_) + 1, 0);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.receiver < 0 || e.receiver >= n_nodes_ || e.source < 0 || e.source >= n_nodes_) {
            throw std::invalid_argument("topology: edge (" + std::to_string(e.receiver) + "," +
                                        std::to_string(e.source) + ") out of range");
        }
        if (i > 0 && !(edges_[i - 1] < e)) {
            throw std::invalid_argument("topology: edge list not strictly row-major sorted at index " +
                                        std::to_string(i));
        }
        ++row_offsets_[static_cast<std::size_t>(e.receiver) + 1];
    }
    for (int n = 0; n < n_nodes_; ++n) {
        row_offsets_[n + 1] += row_offsets_[n];
    }
    for (int n = 0; n < n_nodes_; ++n) {
        if (!contains({n, n})) {
            throw std::invalid_argument("topology: node " + std::to_string(n) + " has no self-loop");
        }
    }
}

bool Topology::contains(Edge e) const {
    if (e.receiver < 0 || e.receiver >= n_nodes_) return false;
    auto [first, last] = row_range(e.receiver);
    return std::binary_search(edges_.begin() + static_cast<std::ptrdiff_t>(first),
                              edges_.begin() + static_cast<std::ptrdiff_t>(last), e);
}

bool Topology::is_symmetric() const {
    return std::all_of(edges_.begin(), edges_.end(),
                       [this](const Edge& e) { return contains({e.source, e.receiver}); });
}

Topology q_clique(int n_nodes, int q) {
    if (n_nodes <= 0 || q <= 0) {
        throw std::invalid_argument("q_clique: n_nodes and q must be positive");
    }
    if (n_nodes % q != 0) {
        throw std::invalid_argument("q_clique: clique size q=" + std::to_string(q) +
                                    " does not divide n_nodes=" + std::to_string(n_nodes));
    }
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n_nodes) * static_cast<std::size_t>(q));
    for (int n = 0; n < n_nodes; ++n) {
        const int base = (n / q) * q;
        for (int m = base; m < base + q; ++m) edges.push_back({n, m});
    }
    return Topology(n_nodes, std::move(edges));
}

Topology nearest_neighbor(std::span<const Point2> positions, int q) {
    const int n_nodes = static_cast<int>(positions.size());
    if (q <= 0 || q > n_nodes) {
        throw std::invalid_argument("nearest_neighbor: q=" + std::to_string(q) + " must lie in [1, " +
                                    std::to_string(n_nodes) + "]");
    }
    {
        std::vector<std::pair<double, double>> sorted;
        sorted.reserve(positions.size());
        for (const auto& p : positions) sorted.emplace_back(p.x(), p.y());
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::invalid_argument("nearest_neighbor: duplicate positions");
        }
    }

    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n_nodes) * static_cast<std::size_t>(q));
    std::vector<std::pair<double, int>> candidates;
    std::vector<int> chosen;
    for (int n = 0; n < n_nodes; ++n) {
        candidates.clear();
        for (int m = 0; m < n_nodes; ++m) {
            if (m != n) candidates.emplace_back((positions[m] - positions[n]).squaredNorm(), m);
        }
        const auto k = static_cast<std::ptrdiff_t>(q - 1);
        // (distance, index) ordering gives the lower-index tie-break.
        std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end());
        chosen.assign(1, n);
        for (std::ptrdiff_t i = 0; i < k; ++i) chosen.push_back(candidates[i].second);
        std::sort(chosen.begin(), chosen.end());
        for (int m : chosen) edges.push_back({n, m});
    }
    return Topology(n_nodes, std::move(edges),
                    std::vector<Point2>(positions.begin(), positions.end()));
}

Topology rgg(std::span<const Point2> positions, double radius) {
    const int n_nodes = static_cast<int>(positions.size());
    if (!(radius >= 0.0)) {
        throw std::invalid_argument("rgg: radius must be nonnegative");
    }
    const double r2 = radius * radius;
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(n_nodes));
    for (int n = 0; n < n_nodes; ++n) {
        rows[n].push_back(n);
        for (int m = n + 1; m < n_nodes; ++m) {
            if ((positions[m] - positions[n]).squaredNorm() <= r2) {
                rows[n].push_back(m);
                rows[m].push_back(n);
            }
        }
    }
    std::vector<Edge> edges;
    for (int n = 0; n < n_nodes; ++n) {
        std::sort(rows[n].begin(), rows[n].end());
        for (int m : rows[n]) edges.push_back({n, m});
    }
    return Topology(n_nodes, std::move(edges),
                    std::vector<Point2>(positions.begin(), positions.end()));
}

double rgg_radius_for_degree(int n_nodes, double q_tilde) {
    if (n_nodes <= 0 || !(q_tilde >= 0.0)) {
        throw std::invalid_argument("rgg_radius_for_degree: need n_nodes > 0 and q_tilde >= 0");
    }
    return std::sqrt(q_tilde / (n_nodes * std::numbers::pi));
}

std::vector<Point2> uniform_positions(int n_nodes, std::uint64_t seed) {
    Engine engine(seed);
    std::vector<Point2> points(static_cast<std::size_t>(std::max(n_nodes, 0)));
    for (auto& p : points) {
        const double x = open_uniform(engine);
        const double y = open_uniform(engine);
        p = Point2(x, y);
    }
    return points;
}

void write_edge_list(std::ostream& out, const Topology& topology) {
    out << "n_nodes=" << topology.n_nodes() << '\n';
    for (const Edge& e : topology.edges()) out << e.receiver << ' ' << e.source << '\n';
}

Topology read_edge_list(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("n_nodes=", 0) != 0) {
        throw std::invalid_argument("edge list: missing `n_nodes=<N>` header");
    }
    int n_nodes = 0;
    try {
        n_nodes = std::stoi(line.substr(8));
    } catch (const std::exception&) {
        throw std::invalid_argument("edge list: bad header `" + line + "`");
    }
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        Edge e;
        if (!(fields >> e.receiver >> e.source)) {
            throw std::invalid_argument("edge list: bad line `" + line + "`");
        }
        edges.push_back(e);
    }
    return Topology(n_nodes, std::move(edges));
}

}  // namespace collabsense
