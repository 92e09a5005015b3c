// collabsense: command-line front end for the experiment harness.
//
// Exit codes: 0 success, 2 configuration error, 1 runtime error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "collabsense/harness.hpp"
#include "collabsense/snapshot.hpp"

namespace cs = collabsense;

namespace {

constexpr const char* kSchemas = R"(CSV schemas (numbers printed with 12 significant digits, `nan` for undefined):
  snapshot-clique, snapshot-nn : q,strategy,trials,mean_fisher,se_fisher,theory_fisher
  snapshot-rgg                 : q_tilde|radius,mean_degree,se_degree,theory_q,strategy,trials,
                                 mean_fisher,se_fisher,theory_fisher
  ou-variance                  : strategy,period,t,var   (period 0 rows hold the T->0 limit Var0)
  ou-avar                      : q|q_tilde|radius,strategy,period,trials,mean_fisher,se_fisher,
                                 mean_avar,se_avar,theory_avar,theory_var0
  ou-trace                     : strategy,period,t,theta,estimate,sample

Per-trial seeds: base = mix64(mix64(seed) ^ trial), with mix64(x) one SplitMix64 output for state x;
positions, observation gains and channel gains use mix64(mix64(base) ^ k) for k = 1, 2, 3.

Environment: COLLABSENSE_THREADS overrides the worker count.)";

std::string join(const std::vector<double>& values) {
    std::string out;
    for (double v : values) {
        if (!out.empty()) out += ',';
        std::ostringstream s;
        s.precision(17);
        s << v;
        out += s.str();
    }
    return out;
}

void emit(const cs::ResultTable& table, const cs::ExperimentConfig& config) {
    if (config.output.empty()) table.write_csv(std::cout);
}

struct CommonFlags {
    int n_nodes = 2000;
    std::vector<double> q;
    std::vector<double> q_tilde;
    std::vector<double> radius;
    std::string strategy = "both";
    double eta2 = 1.0;
    double sigma2 = 1.0;
    double xi2 = 1.0;
    std::string observation_gain = "rayleigh:1";
    std::string channel_gain = "rayleigh:1";
    int trials = 1;
    std::uint64_t seed = 1;
    std::string out;

    void attach(CLI::App* app) {
        app->add_option("--n-nodes", n_nodes, "Number of sensors")->capture_default_str();
        app->add_option("--q", q, "Clique / neighborhood sizes (with self)")->delimiter(',');
        app->add_option("--q-tilde", q_tilde, "RGG target degrees")->delimiter(',');
        app->add_option("--radius", radius, "RGG radii")->delimiter(',');
        app->add_option("--strategy", strategy, "optimal | equal | both")->capture_default_str();
        app->add_option("--eta2", eta2, "Prior variance")->capture_default_str();
        app->add_option("--sigma2", sigma2, "Measurement noise variance")->capture_default_str();
        app->add_option("--xi2", xi2, "Channel noise variance")->capture_default_str();
        app->add_option("--observation-gain", observation_gain, "rayleigh[:alpha] | constant:<v>")
            ->capture_default_str();
        app->add_option("--channel-gain", channel_gain, "rayleigh[:alpha] | constant:<v>")->capture_default_str();
        app->add_option("--trials", trials, "Monte Carlo trials")->capture_default_str();
        app->add_option("--seed", seed, "Master seed")->capture_default_str();
        app->add_option("--out", out, "Output CSV (stdout if omitted)");
    }

    std::map<std::string, std::string> pairs() const {
        std::map<std::string, std::string> p = {
            {"n_nodes", std::to_string(n_nodes)},     {"strategy", strategy},
            {"eta2", join({eta2})},                   {"sigma2", join({sigma2})},
            {"xi2", join({xi2})},                     {"observation_gain", observation_gain},
            {"channel_gain", channel_gain},           {"trials", std::to_string(trials)},
            {"seed", std::to_string(seed)},
        };
        if (!q.empty()) p["q"] = join(q);
        if (!q_tilde.empty()) p["q_tilde"] = join(q_tilde);
        if (!radius.empty()) p["radius"] = join(radius);
        if (!out.empty()) p["output"] = out;
        return p;
    }
};

// Writes the first trial's network, weights and metrics at the first sweep value.
void dump_instance(const cs::ExperimentConfig& config, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const cs::NetworkRealization network = cs::realize_network(config, 0);
    const double x = config.topology == cs::TopologyKind::rgg
                         ? (config.q_tilde.empty() ? config.radius.front() : config.q_tilde.front())
                         : config.q.front();
    const cs::Topology topology = cs::build_topology(config, network.positions, x);

    auto open = [&](const std::string& name) {
        std::ofstream out(dir / name);
        if (!out) throw std::runtime_error("cannot open " + (dir / name).string() + " for writing");
        return out;
    };
    {
        auto out = open("topology.txt");
        cs::write_edge_list(out, topology);
    }
    {
        auto out = open("gains.csv");
        out.precision(17);
        out << "n,h,g_tilde\n";
        for (int n = 0; n < network.field.size(); ++n) {
            out << n << ',' << network.field.h[n] << ',' << network.field.g_tilde[n] << '\n';
        }
    }
    auto metrics = open("metrics.csv");
    metrics << "strategy," << cs::SnapshotMetrics::csv_header << '\n';
    for (cs::Strategy s : config.strategies()) {
        const cs::CollaborationMatrix W = s == cs::Strategy::optimal
                                              ? cs::optimal_ea(network.field, topology, *config.energy).weights
                                              : cs::equal_ea(network.field, topology, *config.energy);
        auto out = open(std::string("weights_") + cs::to_string(s) + ".txt");
        cs::write_triplets(out, W);
        metrics << cs::to_string(s) << ',' << cs::evaluate(network.field, W).to_csv() << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collaborative linear coherent estimation toolkit"};
    app.footer(kSchemas);
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment described by a key = value config file");
    run_cmd->add_option("config", config_path, "Config file")->required();

    std::string figure_name;
    std::string scale = "desk";
    std::string figure_out = ".";
    std::uint64_t figure_seed = 1;
    auto* figure_cmd = app.add_subcommand("figure", "Reproduce a figure as CSV (fig5a fig5b fig6 fig7a fig7b)");
    figure_cmd->add_option("name", figure_name, "Figure name")->required();
    figure_cmd->add_option("--scale", scale, "desk (N=2000) | full (N=10^4)")->capture_default_str();
    figure_cmd->add_option("--out", figure_out, "Output directory")->capture_default_str();
    figure_cmd->add_option("--seed", figure_seed, "Master seed")->capture_default_str();

    CommonFlags snap;
    std::string snap_topology = "clique";
    double snap_energy = 0.7;
    std::string dump_dir;
    auto* snapshot_cmd = app.add_subcommand("snapshot", "Single-snapshot Monte Carlo sweep");
    snap.attach(snapshot_cmd);
    snapshot_cmd->add_option("--topology", snap_topology, "clique | nn | rgg")->capture_default_str();
    snapshot_cmd->add_option("--energy", snap_energy, "Total energy budget")->capture_default_str();
    snapshot_cmd->add_option("--dump-dir", dump_dir, "Also write trial-0 topology, gains, weights and metrics here");

    CommonFlags ou;
    std::string ou_mode = "variance";
    std::string ou_topology = "clique";
    double ou_power = 1.4;
    std::optional<double> ou_c;
    std::vector<double> ou_periods = {0.7, 0.4, 0.1};
    double ou_tau = 1.0;
    double ou_t_obs = 30.0;
    int ou_m_steps = 1600;
    int ou_points = 201;
    auto* ou_cmd = app.add_subcommand("ou", "Ornstein-Uhlenbeck sampling experiments");
    ou.attach(ou_cmd);
    ou_cmd->add_option("--mode", ou_mode, "variance | avar | trace")->capture_default_str();
    ou_cmd->add_option("--topology", ou_topology, "Network topology for avar: clique | nn | rgg")
        ->capture_default_str();
    ou_cmd->add_option("--power", ou_power, "Power budget P")->capture_default_str();
    ou_cmd->add_option("--c", ou_c, "Spatial constant override (variance / trace)");
    ou_cmd->add_option("--periods", ou_periods, "Sampling periods")->delimiter(',');
    ou_cmd->add_option("--tau", ou_tau, "OU time constant")->capture_default_str();
    ou_cmd->add_option("--t-obs", ou_t_obs, "Observation window (s)")->capture_default_str();
    ou_cmd->add_option("--m-steps", ou_m_steps, "Estimation grid points")->capture_default_str();
    ou_cmd->add_option("--profile-points", ou_points, "Points per variance profile")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run_cmd) {
            const cs::ExperimentConfig config = cs::parse_config_file(config_path);
            emit(cs::run(config), config);
        } else if (*figure_cmd) {
            if (scale != "desk" && scale != "full") throw cs::ConfigError("--scale must be desk or full");
            const auto files = cs::reproduce_figure(
                figure_name, scale == "full" ? cs::FigureScale::full : cs::FigureScale::desk, figure_out, figure_seed);
            for (const auto& f : files) std::cerr << "wrote " << f.string() << '\n';
        } else if (*snapshot_cmd) {
            auto pairs = snap.pairs();
            pairs["kind"] = "snapshot-" + snap_topology;
            pairs["energy"] = join({snap_energy});
            const cs::ExperimentConfig config = cs::config_from_pairs(pairs);
            if (!dump_dir.empty()) dump_instance(config, dump_dir);
            emit(cs::run(config), config);
        } else if (*ou_cmd) {
            auto pairs = ou.pairs();
            pairs["kind"] = "ou-" + ou_mode;
            if (ou_mode == "avar") pairs["topology"] = ou_topology;
            pairs["power"] = join({ou_power});
            if (ou_c) pairs["c"] = join({*ou_c});
            pairs["periods"] = join(ou_periods);
            pairs["tau"] = join({ou_tau});
            pairs["t_obs"] = join({ou_t_obs});
            pairs["m_steps"] = std::to_string(ou_m_steps);
            pairs["profile_points"] = std::to_string(ou_points);
            if (ou_mode != "variance" && ou_mode != "avar" && ou_mode != "trace") {
                throw cs::ConfigError("--mode must be variance, avar or trace");
            }
            if (ou_mode != "avar" && ou.q.empty() && !ou_c) pairs["q"] = "1";
            const cs::ExperimentConfig config = cs::config_from_pairs(pairs);
            emit(cs::run(config), config);
        }
    } catch (const cs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
