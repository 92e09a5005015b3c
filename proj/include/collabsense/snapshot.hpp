#pragma once

#include <iosfwd>
#include <string>

#include "collabsense/gains.hpp"
#include "collabsense/topology.hpp"
#include "collabsense/types.hpp"

namespace collabsense {

/// A-sparse collaboration matrix W stored as one weight per topology edge, in the
/// topology's canonical row-major edge order. Non-owning: the topology must outlive it.
class CollaborationMatrix {
public:
    CollaborationMatrix(const Topology& topology, VectorXd values);

    /// All-zero weights.
    static CollaborationMatrix zeros(const Topology& topology) {
        return {topology, VectorXd::Zero(static_cast<Eigen::Index>(topology.n_edges()))};
    }

    const Topology& topology() const { return *topology_; }
    const VectorXd& values() const { return values_; }
    VectorXd& values() { return values_; }

    /// Dense N x N copy. Only meant for small instances and tests.
    MatrixXd to_dense() const;

private:
    const Topology* topology_;
    VectorXd values_;
};

/// Performance of one collaboration matrix on one sensor field.
struct SnapshotMetrics {
    double mu = 0.0;          ///< net gain g^T W h
    double zeta2 = 0.0;       ///< net noise variance g^T W Sigma W^T g + xi^2
    double fisher = 0.0;      ///< J = mu^2 / zeta^2
    double distortion = 0.0;  ///< D = 1 / (1/eta^2 + J)
    double energy = 0.0;      ///< Tr(W E_x W^T)

    static constexpr const char* csv_header = "mu,zeta2,fisher,distortion,energy";
    /// One CSV record, 12 significant digits, no trailing newline.
    std::string to_csv() const;
};

SnapshotMetrics evaluate(const SensorField& field, const CollaborationMatrix& W);

/// E[z_n^2] for every transmitting node; sums to evaluate(...).energy.
VectorXd transmit_energy_per_node(const SensorField& field, const CollaborationMatrix& W);

/// Equal energy allocation: node n averages its neighborhood with weight d_n chosen
/// so that E[z_n^2] = total_energy / N.
CollaborationMatrix equal_ea(const SensorField& field, const Topology& topology, double total_energy);

struct OptimalSolution {
    CollaborationMatrix weights;
    double fisher;              ///< closed-form J_opt
    double condition_estimate;  ///< of G^T Omega^{-1} G, from its LDL^T pivots
};

/// Minimum-distortion A-sparse weights under the cumulative energy budget.
///
/// The energy form Omega is block diagonal by receiver (each block is the restriction
/// of E_x = eta^2 h h^T + sigma^2 I to the receiver's sources) and is inverted block by
/// block with Sherman-Morrison. M = G^T Omega^{-1} G is assembled sparsely. With
/// B = sigma^2 M + I / E_xi and u = B^{-1} h,
///
///     J_opt = h^T (Sigma + M^{-1}/E_xi)^{-1} h = u^T M h,
///     w_opt = kappa Omega^{-1} G u,   kappa > 0 fixing w^T Omega w = E,
///
/// which avoids forming Gamma = M^{-1} explicitly.
///
/// Throws std::invalid_argument for sigma2 == 0 or a non-positive budget, and
/// std::runtime_error when M is singular or its condition estimate exceeds 1e12.
OptimalSolution optimal_ea(const SensorField& field, const Topology& topology, double total_energy);

/// `n m value` triplets, one per edge, canonical order.
void write_triplets(std::ostream& out, const CollaborationMatrix& W);
/// Reads triplets written for `topology`; edges must match it one-for-one.
CollaborationMatrix read_triplets(std::istream& in, const Topology& topology);

}  // namespace collabsense
