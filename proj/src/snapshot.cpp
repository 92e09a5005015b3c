#include "collabsense/snapshot.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace collabsense {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

constexpr double kShermanMorrisonFloor = 1e-14;
constexpr double kMaxCondition = 1e12;

void check_dimensions(const SensorField& field, const Topology& topology) {
    field.validate();
    if (field.size() != topology.n_nodes()) {
        throw std::invalid_argument("dimension mismatch: field has " + std::to_string(field.size()) +
                                    " sensors, topology has " + std::to_string(topology.n_nodes()) + " nodes");
    }
}

// Omega_n^{-1} x for the block sigma^2 I + eta^2 h_S h_S^T.
struct BlockInverse {
    double inv_sigma2;
    double rank1;  // eta^2 / (sigma^2 + eta^2 |h_S|^2)

    template <typename V, typename H>
    VectorXd apply(const V& x, const H& h_s) const {
        return inv_sigma2 * (x - rank1 * h_s.dot(x) * h_s);
    }
};

}  // namespace

CollaborationMatrix::CollaborationMatrix(const Topology& topology, VectorXd values)
    : topology_(&topology), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.size()) != topology.n_edges()) {
        throw std::invalid_argument("collaboration matrix: " + std::to_string(values_.size()) +
                                    " weights for " + std::to_string(topology.n_edges()) + " edges");
    }
}

MatrixXd CollaborationMatrix::to_dense() const {
    MatrixXd dense = MatrixXd::Zero(topology_->n_nodes(), topology_->n_nodes());
    const auto edges = topology_->edges();
    for (std::size_t l = 0; l < edges.size(); ++l) {
        dense(edges[l].receiver, edges[l].source) = values_[static_cast<Eigen::Index>(l)];
    }
    return dense;
}

std::string SnapshotMetrics::to_csv() const {
    char buffer[160];
    std::snprintf(buffer, sizeof buffer, "%.12g,%.12g,%.12g,%.12g,%.12g", mu, zeta2, fisher, distortion, energy);
    return buffer;
}

VectorXd transmit_energy_per_node(const SensorField& field, const CollaborationMatrix& W) {
    const Topology& topology = W.topology();
    check_dimensions(field, topology);
    const auto edges = topology.edges();
    VectorXd energy(topology.n_nodes());
    for (int n = 0; n < topology.n_nodes(); ++n) {
        auto [first, last] = topology.row_range(n);
        double signal = 0.0;
        double noise = 0.0;
        for (std::size_t l = first; l < last; ++l) {
            const double w = W.values()[static_cast<Eigen::Index>(l)];
            signal += w * field.h[edges[l].source];
            noise += w * w;
        }
        energy[n] = field.eta2 * signal * signal + field.sigma2 * noise;
    }
    return energy;
}

SnapshotMetrics evaluate(const SensorField& field, const CollaborationMatrix& W) {
    const Topology& topology = W.topology();
    check_dimensions(field, topology);
    const VectorXd g = effective_channel_gains(field);
    const auto edges = topology.edges();

    double mu = 0.0;
    VectorXd weighted_channel = VectorXd::Zero(topology.n_nodes());  // W^T g
    for (std::size_t l = 0; l < edges.size(); ++l) {
        const double w = W.values()[static_cast<Eigen::Index>(l)];
        const double gn = g[edges[l].receiver];
        mu += gn * w * field.h[edges[l].source];
        weighted_channel[edges[l].source] += gn * w;
    }

    SnapshotMetrics metrics;
    metrics.mu = mu;
    metrics.zeta2 = field.sigma2 * weighted_channel.squaredNorm() + field.xi2;
    metrics.fisher = mu * mu / metrics.zeta2;
    metrics.distortion = 1.0 / (1.0 / field.eta2 + metrics.fisher);
    metrics.energy = transmit_energy_per_node(field, W).sum();
    return metrics;
}

CollaborationMatrix equal_ea(const SensorField& field, const Topology& topology, double total_energy) {
    check_dimensions(field, topology);
    if (!(total_energy > 0.0)) throw std::invalid_argument("equal_ea: total energy must be positive");
    const int n_nodes = topology.n_nodes();
    const auto edges = topology.edges();
    const double per_node = total_energy / n_nodes;

    VectorXd values(static_cast<Eigen::Index>(topology.n_edges()));
    for (int n = 0; n < n_nodes; ++n) {
        auto [first, last] = topology.row_range(n);
        double gain_sum = 0.0;
        for (std::size_t l = first; l < last; ++l) gain_sum += field.h[edges[l].source];
        const double denominator =
            gain_sum * gain_sum * field.eta2 + static_cast<double>(last - first) * field.sigma2;
        if (!(denominator > 0.0)) {
            throw std::invalid_argument("equal_ea: zero transmit power normalizer at node " + std::to_string(n));
        }
        const double d = std::sqrt(per_node / denominator);
        for (std::size_t l = first; l < last; ++l) values[static_cast<Eigen::Index>(l)] = d;
    }
    return {topology, std::move(values)};
}

OptimalSolution optimal_ea(const SensorField& field, const Topology& topology, double total_energy) {
    check_dimensions(field, topology);
    if (!(total_energy > 0.0)) throw std::invalid_argument("optimal_ea: total energy must be positive");
    if (!(field.sigma2 > 0.0)) {
        throw std::invalid_argument("optimal_ea: sigma2 must be positive (energy form is singular at sigma2 = 0)");
    }
    const int n_nodes = topology.n_nodes();
    const auto edges = topology.edges();
    const VectorXd g = effective_channel_gains(field);
    const double energy_xi = total_energy / field.xi2;

    std::vector<BlockInverse> blocks(static_cast<std::size_t>(n_nodes));
    std::vector<Eigen::Triplet<double>> triplets;
    std::size_t nnz = 0;
    for (int n = 0; n < n_nodes; ++n) nnz += static_cast<std::size_t>(topology.in_degree(n)) * topology.in_degree(n);
    triplets.reserve(nnz);

    VectorXd h_s;
    for (int n = 0; n < n_nodes; ++n) {
        auto [first, last] = topology.row_range(n);
        const auto size = static_cast<Eigen::Index>(last - first);
        h_s.resize(size);
        for (Eigen::Index i = 0; i < size; ++i) h_s[i] = field.h[edges[first + i].source];
        const double denominator = field.sigma2 + field.eta2 * h_s.squaredNorm();
        if (!(denominator > kShermanMorrisonFloor)) {
            throw std::runtime_error("optimal_ea: degenerate energy block at receiver " + std::to_string(n));
        }
        BlockInverse& block = blocks[n];
        block.inv_sigma2 = 1.0 / field.sigma2;
        block.rank1 = field.eta2 / denominator;

        // g_n^2 Omega_n^{-1} scattered onto the sources of receiver n.
        const double scale = g[n] * g[n] * block.inv_sigma2;
        for (Eigen::Index i = 0; i < size; ++i) {
            for (Eigen::Index j = 0; j < size; ++j) {
                const double entry = (i == j ? 1.0 : 0.0) - block.rank1 * h_s[i] * h_s[j];
                triplets.emplace_back(edges[first + i].source, edges[first + j].source, scale * entry);
            }
        }
    }

    SparseMatrix gram(n_nodes, n_nodes);  // G^T Omega^{-1} G
    gram.setFromTriplets(triplets.begin(), triplets.end());
    triplets.clear();
    triplets.shrink_to_fit();

    Eigen::SimplicialLDLT<SparseMatrix> gram_factor(gram);
    if (gram_factor.info() != Eigen::Success) {
        throw std::runtime_error("optimal_ea: factorization of G^T Omega^{-1} G failed");
    }
    const VectorXd pivots = gram_factor.vectorD();
    const double smallest = pivots.minCoeff();
    const double largest = pivots.maxCoeff();
    if (!(smallest > 0.0)) {
        throw std::runtime_error("optimal_ea: G^T Omega^{-1} G is singular (smallest pivot " +
                                 std::to_string(smallest) + "); some observation reaches no transmitter");
    }
    const double condition = largest / smallest;
    if (condition > kMaxCondition) {
        throw std::runtime_error("optimal_ea: G^T Omega^{-1} G is ill-conditioned (estimate " +
                                 std::to_string(condition) + ")");
    }

    SparseMatrix shifted = field.sigma2 * gram;
    for (int n = 0; n < n_nodes; ++n) shifted.coeffRef(n, n) += 1.0 / energy_xi;
    Eigen::SimplicialLDLT<SparseMatrix> shifted_factor(shifted);
    if (shifted_factor.info() != Eigen::Success) {
        throw std::runtime_error("optimal_ea: factorization of sigma^2 M + I/E_xi failed");
    }
    const VectorXd u = shifted_factor.solve(field.h);
    const double fisher = u.dot(gram * field.h);

    VectorXd values(static_cast<Eigen::Index>(topology.n_edges()));
    double raw_energy = 0.0;
    VectorXd u_s;
    for (int n = 0; n < n_nodes; ++n) {
        auto [first, last] = topology.row_range(n);
        const auto size = static_cast<Eigen::Index>(last - first);
        h_s.resize(size);
        u_s.resize(size);
        for (Eigen::Index i = 0; i < size; ++i) {
            h_s[i] = field.h[edges[first + i].source];
            u_s[i] = u[edges[first + i].source];
        }
        const VectorXd block_w = g[n] * blocks[n].apply(u_s, h_s);
        values.segment(static_cast<Eigen::Index>(first), size) = block_w;
        raw_energy += g[n] * u_s.dot(block_w);
    }
    if (!(raw_energy > 0.0)) {
        throw std::runtime_error("optimal_ea: optimal direction has zero energy");
    }
    values *= std::sqrt(total_energy / raw_energy);

    return {CollaborationMatrix(topology, std::move(values)), fisher, condition};
}

void write_triplets(std::ostream& out, const CollaborationMatrix& W) {
    const auto edges = W.topology().edges();
    char buffer[32];
    for (std::size_t l = 0; l < edges.size(); ++l) {
        std::snprintf(buffer, sizeof buffer, "%.17g", W.values()[static_cast<Eigen::Index>(l)]);
        out << edges[l].receiver << ' ' << edges[l].source << ' ' << buffer << '\n';
    }
}

CollaborationMatrix read_triplets(std::istream& in, const Topology& topology) {
    const auto edges = topology.edges();
    VectorXd values(static_cast<Eigen::Index>(edges.size()));
    std::string line;
    std::size_t l = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        Edge e;
        double value = 0.0;
        if (!(fields >> e.receiver >> e.source >> value)) {
            throw std::invalid_argument("triplets: bad line `" + line + "`");
        }
        if (l >= edges.size() || !(edges[l] == e)) {
            throw std::invalid_argument("triplets: entry " + std::to_string(l) + " does not match topology edge order");
        }
        values[static_cast<Eigen::Index>(l++)] = value;
    }
    if (l != edges.size()) {
        throw std::invalid_argument("triplets: expected " + std::to_string(edges.size()) + " entries, read " +
                                    std::to_string(l));
    }
    return {topology, std::move(values)};
}

}  // namespace collabsense
