#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "collabsense/gains.hpp"
#include "collabsense/snapshot.hpp"
#include "collabsense/topology.hpp"

namespace collabsense {

/// Invalid configuration, detected before any computation. CLI exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind { snapshot_nn, snapshot_rgg, snapshot_clique, ou_variance, ou_avar, ou_trace };
enum class TopologyKind { clique, nn, rgg };
enum class StrategySelection { optimal, equal, both };

std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::snapshot_clique;
    TopologyKind topology = TopologyKind::clique;  ///< implied by snapshot kinds; set for ou-avar
    int n_nodes = 2000;
    std::vector<double> q;        ///< clique size / NN neighborhood size (with self)
    std::vector<double> q_tilde;  ///< RGG target degree, radius = sqrt(q_tilde / (N pi))
    std::vector<double> radius;   ///< RGG radius given directly
    StrategySelection strategy = StrategySelection::both;
    std::optional<double> energy;
    std::optional<double> power;
    std::optional<double> c;  ///< spatial constant override for ou-variance / ou-trace
    std::vector<double> periods;
    double eta2 = 1.0;
    double sigma2 = 1.0;
    double xi2 = 1.0;
    double tau = 1.0;
    GainModel observation = RayleighGain{1.0};
    GainModel channel = RayleighGain{1.0};
    int trials = 1;
    std::uint64_t seed = 1;
    double t_obs = 30.0;
    int m_steps = 1600;
    int profile_points = 201;
    std::string output;

    /// Throws ConfigError describing the first violated constraint.
    void validate() const;
    std::vector<Strategy> strategies() const;
};

/// Parses the flat `key = value` format (`#` comments, comma-separated lists) and validates.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::filesystem::path& path);
/// Same keys as the file format.
ExperimentConfig config_from_pairs(const std::map<std::string, std::string>& pairs);

using Cell = std::variant<double, std::string>;

/// Column-named result table written as CSV with 12 significant digits.
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::size_t column(const std::string& name) const;
    double number(std::size_t row, const std::string& name) const;
    const std::string& text(std::size_t row, const std::string& name) const;

    void write_csv(std::ostream& out) const;
    /// Throws std::runtime_error naming the path on I/O failure.
    void write_csv(const std::filesystem::path& path) const;
};

/// Monte Carlo mean of per-trial values with its standard error (NaN for one trial).
struct TrialSummary {
    double mean = 0.0;
    double std_error = 0.0;
};
TrialSummary summarize(const std::vector<double>& values);

/// Worker count: COLLABSENSE_THREADS if set and positive, else hardware concurrency.
int thread_count();

/// Runs body(i) for i in [0, n) on thread_count() workers. Exceptions are rethrown
/// (lowest index first) after all workers finish.
void parallel_for(int n, const std::function<void(int)>& body);

/// Seeds of one snapshot trial: positions, observation gains, channel gains.
struct TrialSeeds {
    std::uint64_t positions;
    std::uint64_t observation;
    std::uint64_t channel;
};
TrialSeeds trial_seeds(std::uint64_t master, int trial);

/// The random network of one trial.
struct NetworkRealization {
    std::vector<Point2> positions;
    SensorField field;
};
NetworkRealization realize_network(const ExperimentConfig& config, int trial);

/// Collaboration topology for sweep value `x` (Q, Q-tilde or radius depending on config).
Topology build_topology(const ExperimentConfig& config, const std::vector<Point2>& positions, double x);

/// Snapshot Fisher information of one strategy on one network at the given budget.
double strategy_fisher(Strategy strategy, const SensorField& field, const Topology& topology, double energy);

ResultTable run(const ExperimentConfig& config);

enum class FigureScale { desk, full };

/// Writes the CSV files of a figure into out_dir and returns their paths.
/// Names: fig5a, fig5b, fig6, fig7a, fig7b.
std::vector<std::filesystem::path> reproduce_figure(const std::string& name, FigureScale scale,
                                                    const std::filesystem::path& out_dir, std::uint64_t seed = 1);

/// Configs behind a figure, keyed by output file stem.
std::vector<std::pair<std::string, ExperimentConfig>> figure_configs(const std::string& name, FigureScale scale,
                                                                     std::uint64_t seed = 1);

}  // namespace collabsense
