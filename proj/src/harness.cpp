#include "collabsense/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "collabsense/asymptotic.hpp"
#include "collabsense/ouprocess.hpp"
#include "collabsense/rng.hpp"

namespace collabsense {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ConfigError("config: `" + key + "` expects a number, got `" + text + "`");
    }
}

long long parse_integer(const std::string& key, const std::string& text) {
    const double value = parse_number(key, text);
    if (value != std::floor(value) || std::abs(value) > 9e15) {
        throw ConfigError("config: `" + key + "` expects an integer, got `" + text + "`");
    }
    return static_cast<long long>(value);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) values.push_back(parse_number(key, item));
    }
    if (values.empty()) throw ConfigError("config: `" + key + "` is an empty list");
    return values;
}

// `rayleigh`, `rayleigh:<alpha>` or `constant:<value>`.
GainModel parse_gain(const std::string& key, const std::string& text) {
    const auto colon = text.find(':');
    const std::string family = trim(text.substr(0, colon));
    const std::string argument = colon == std::string::npos ? "" : trim(text.substr(colon + 1));
    if (family == "rayleigh") {
        const double alpha = argument.empty() ? 1.0 : parse_number(key, argument);
        if (!(alpha > 0.0)) throw ConfigError("config: `" + key + "` Rayleigh alpha must be positive");
        return RayleighGain{alpha};
    }
    if (family == "constant" && !argument.empty()) return ConstantGain{parse_number(key, argument)};
    throw ConfigError("config: `" + key + "` expects rayleigh[:alpha] or constant:<value>, got `" + text + "`");
}

ExperimentKind parse_kind(const std::string& text) {
    static const std::map<std::string, ExperimentKind> kinds = {
        {"snapshot-nn", ExperimentKind::snapshot_nn},         {"snapshot-rgg", ExperimentKind::snapshot_rgg},
        {"snapshot-clique", ExperimentKind::snapshot_clique}, {"ou-variance", ExperimentKind::ou_variance},
        {"ou-avar", ExperimentKind::ou_avar},                 {"ou-trace", ExperimentKind::ou_trace},
    };
    const auto it = kinds.find(text);
    if (it == kinds.end()) throw ConfigError("config: unknown experiment kind `" + text + "`");
    return it->second;
}

TopologyKind parse_topology(const std::string& text) {
    if (text == "clique") return TopologyKind::clique;
    if (text == "nn") return TopologyKind::nn;
    if (text == "rgg") return TopologyKind::rgg;
    throw ConfigError("config: topology must be clique, nn or rgg, got `" + text + "`");
}

StrategySelection parse_strategy(const std::string& text) {
    if (text == "optimal") return StrategySelection::optimal;
    if (text == "equal") return StrategySelection::equal;
    if (text == "both") return StrategySelection::both;
    throw ConfigError("config: strategy must be optimal, equal or both, got `" + text + "`");
}

bool is_snapshot(ExperimentKind kind) {
    return kind == ExperimentKind::snapshot_nn || kind == ExperimentKind::snapshot_rgg ||
           kind == ExperimentKind::snapshot_clique;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

const std::vector<double>& sweep_values(const ExperimentConfig& config) {
    if (config.topology != TopologyKind::rgg) return config.q;
    return config.q_tilde.empty() ? config.radius : config.q_tilde;
}

std::string sweep_name(const ExperimentConfig& config) {
    if (config.topology != TopologyKind::rgg) return "q";
    return config.q_tilde.empty() ? "radius" : "q_tilde";
}

// Clique size used for the closed-form reference of a sweep value.
int theory_q(const ExperimentConfig& config, double x) {
    if (config.topology == TopologyKind::rgg && config.q_tilde.empty()) {
        return std::max(1, static_cast<int>(std::lround(config.n_nodes * std::numbers::pi * x * x)));
    }
    return std::max(1, static_cast<int>(std::lround(x)));
}

AsymptoticConfig asymptotic_config(const ExperimentConfig& config, int q, double energy) {
    AsymptoticConfig cfg;
    cfg.energy = energy;
    cfg.eta2 = config.eta2;
    cfg.xi2 = config.xi2;
    cfg.sigma2 = config.sigma2;
    cfg.q = q;
    cfg.observation = config.observation;
    cfg.channel = config.channel;
    return cfg;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::snapshot_nn: return "snapshot-nn";
        case ExperimentKind::snapshot_rgg: return "snapshot-rgg";
        case ExperimentKind::snapshot_clique: return "snapshot-clique";
        case ExperimentKind::ou_variance: return "ou-variance";
        case ExperimentKind::ou_avar: return "ou-avar";
        case ExperimentKind::ou_trace: return "ou-trace";
    }
    return "unknown";
}

std::vector<Strategy> ExperimentConfig::strategies() const {
    switch (strategy) {
        case StrategySelection::optimal: return {Strategy::optimal};
        case StrategySelection::equal: return {Strategy::equal};
        case StrategySelection::both: return {Strategy::optimal, Strategy::equal};
    }
    return {};
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw ConfigError("config: trials must be >= 1");
    if (n_nodes < 1) throw ConfigError("config: n_nodes must be >= 1");
    if (!(eta2 > 0.0) || !(xi2 > 0.0) || !(sigma2 >= 0.0) || !(tau > 0.0)) {
        throw ConfigError("config: need eta2 > 0, xi2 > 0, sigma2 >= 0, tau > 0");
    }
    const bool snapshot = is_snapshot(kind);
    if (snapshot) {
        if (!energy) throw ConfigError("config: " + to_string(kind) + " requires `energy`");
        if (power || !periods.empty()) {
            throw ConfigError("config: " + to_string(kind) + " takes `energy`, not `power`/`periods`");
        }
        if (!(*energy > 0.0)) throw ConfigError("config: energy must be positive");
    } else {
        if (energy) throw ConfigError("config: " + to_string(kind) + " takes `power` and `periods`, not `energy`");
        if (!power) throw ConfigError("config: " + to_string(kind) + " requires `power`");
        if (periods.empty()) throw ConfigError("config: " + to_string(kind) + " requires `periods`");
        if (!(*power > 0.0)) throw ConfigError("config: power must be positive");
        for (double T : periods) {
            if (!(T > 0.0)) throw ConfigError("config: sampling periods must be positive");
        }
        if (c && !(*c > 0.0)) throw ConfigError("config: c must be positive");
    }

    const bool needs_network = snapshot || kind == ExperimentKind::ou_avar;
    const bool needs_q = needs_network || !c;
    if (needs_network) {
        if (topology == TopologyKind::rgg) {
            if (q_tilde.empty() == radius.empty()) {
                throw ConfigError("config: rgg experiments need exactly one of `q_tilde` or `radius`");
            }
            for (double r : radius) {
                if (!(r >= 0.0)) throw ConfigError("config: radius must be nonnegative");
            }
            for (double q_t : q_tilde) {
                if (!(q_t >= 1.0)) throw ConfigError("config: q_tilde must be >= 1");
            }
        } else if (q.empty()) {
            throw ConfigError("config: `q` list required");
        }
    } else if (needs_q && q.empty()) {
        throw ConfigError("config: " + to_string(kind) + " needs `c`, or `q` to derive it");
    }
    if (needs_q && (!needs_network || topology != TopologyKind::rgg)) {
        for (double value : q) {
            if (value < 1.0 || value != std::floor(value)) {
                throw ConfigError("config: q values must be positive integers");
            }
            if (needs_network && topology == TopologyKind::clique && n_nodes % static_cast<int>(value) != 0) {
                throw ConfigError("config: clique size q=" + format_number(value) +
                                  " does not divide n_nodes=" + std::to_string(n_nodes));
            }
            if (needs_network && topology == TopologyKind::nn && value > n_nodes) {
                throw ConfigError("config: q=" + format_number(value) + " exceeds n_nodes");
            }
        }
    }
    if (needs_network && sigma2 == 0.0 && strategy != StrategySelection::equal) {
        throw ConfigError("config: optimal energy allocation requires sigma2 > 0");
    }
    if (kind == ExperimentKind::ou_avar || kind == ExperimentKind::ou_trace) {
        if (!(t_obs > 0.0) || m_steps < 1) throw ConfigError("config: need t_obs > 0 and m_steps >= 1");
    }
    if (kind == ExperimentKind::ou_variance && profile_points < 2) {
        throw ConfigError("config: profile_points must be >= 2");
    }
}

ExperimentConfig config_from_pairs(const std::map<std::string, std::string>& pairs) {
    ExperimentConfig config;
    const auto kind_it = pairs.find("kind");
    if (kind_it == pairs.end()) throw ConfigError("config: missing `kind`");
    config.kind = parse_kind(kind_it->second);
    switch (config.kind) {
        case ExperimentKind::snapshot_nn: config.topology = TopologyKind::nn; break;
        case ExperimentKind::snapshot_rgg: config.topology = TopologyKind::rgg; break;
        default: config.topology = TopologyKind::clique; break;
    }

    for (const auto& [key, value] : pairs) {
        if (key == "kind") continue;
        if (key == "topology") {
            if (is_snapshot(config.kind)) throw ConfigError("config: `topology` is implied by " + to_string(config.kind));
            config.topology = parse_topology(value);
        } else if (key == "n_nodes") {
            config.n_nodes = static_cast<int>(parse_integer(key, value));
        } else if (key == "q") {
            config.q = parse_list(key, value);
        } else if (key == "q_tilde") {
            config.q_tilde = parse_list(key, value);
        } else if (key == "radius") {
            config.radius = parse_list(key, value);
        } else if (key == "strategy") {
            config.strategy = parse_strategy(value);
        } else if (key == "energy") {
            config.energy = parse_number(key, value);
        } else if (key == "power") {
            config.power = parse_number(key, value);
        } else if (key == "c") {
            config.c = parse_number(key, value);
        } else if (key == "periods") {
            config.periods = parse_list(key, value);
        } else if (key == "eta2") {
            config.eta2 = parse_number(key, value);
        } else if (key == "sigma2") {
            config.sigma2 = parse_number(key, value);
        } else if (key == "xi2") {
            config.xi2 = parse_number(key, value);
        } else if (key == "tau") {
            config.tau = parse_number(key, value);
        } else if (key == "observation_gain") {
            config.observation = parse_gain(key, value);
        } else if (key == "channel_gain") {
            config.channel = parse_gain(key, value);
        } else if (key == "trials") {
            config.trials = static_cast<int>(parse_integer(key, value));
        } else if (key == "seed") {
            const long long seed = parse_integer(key, value);
            if (seed < 0) throw ConfigError("config: seed must be nonnegative");
            config.seed = static_cast<std::uint64_t>(seed);
        } else if (key == "t_obs") {
            config.t_obs = parse_number(key, value);
        } else if (key == "m_steps") {
            config.m_steps = static_cast<int>(parse_integer(key, value));
        } else if (key == "profile_points") {
            config.profile_points = static_cast<int>(parse_integer(key, value));
        } else if (key == "output") {
            config.output = value;
        } else {
            throw ConfigError("config: unknown key `" + key + "`");
        }
    }
    config.validate();
    return config;
}

ExperimentConfig parse_config(std::istream& in) {
    std::map<std::string, std::string> pairs;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto equals = line.find('=');
        if (equals == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_number) + ": expected `key = value`");
        }
        const std::string key = trim(line.substr(0, equals));
        const std::string value = trim(line.substr(equals + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line " + std::to_string(line_number) + ": empty key or value");
        }
        if (!pairs.emplace(key, value).second) {
            throw ConfigError("config line " + std::to_string(line_number) + ": duplicate key `" + key + "`");
        }
    }
    return config_from_pairs(pairs);
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    return parse_config(in);
}

std::size_t ResultTable::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range("result table: no column `" + name + "`");
    return static_cast<std::size_t>(it - columns.begin());
}

double ResultTable::number(std::size_t row, const std::string& name) const {
    return std::get<double>(rows.at(row).at(column(name)));
}

const std::string& ResultTable::text(std::size_t row, const std::string& name) const {
    return std::get<std::string>(rows.at(row).at(column(name)));
}

void ResultTable::write_csv(std::ostream& out) const {
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            if (const auto* number = std::get_if<double>(&row[i])) {
                out << format_number(*number);
            } else {
                out << std::get<std::string>(row[i]);
            }
        }
        out << '\n';
    }
}

void ResultTable::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_csv(out);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

TrialSummary summarize(const std::vector<double>& values) {
    if (values.empty()) return {kNaN, kNaN};
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return {mean, kNaN};
    double squares = 0.0;
    for (double v : values) squares += (v - mean) * (v - mean);
    const double variance = squares / static_cast<double>(values.size() - 1);
    return {mean, std::sqrt(variance / static_cast<double>(values.size()))};
}

int thread_count() {
    if (const char* env = std::getenv("COLLABSENSE_THREADS")) {
        const int requested = std::atoi(env);
        if (requested > 0) return requested;
    }
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

void parallel_for(int n, const std::function<void(int)>& body) {
    if (n <= 0) return;
    const int workers = std::min(n, thread_count());
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    auto drain = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        drain();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
    }
    for (const auto& error : errors) {
        if (error) std::rethrow_exception(error);
    }
}

TrialSeeds trial_seeds(std::uint64_t master, int trial) {
    const std::uint64_t base = derive_seed(master, static_cast<std::uint64_t>(trial));
    return {derive_seed(base, 1), derive_seed(base, 2), derive_seed(base, 3)};
}

NetworkRealization realize_network(const ExperimentConfig& config, int trial) {
    const TrialSeeds seeds = trial_seeds(config.seed, trial);
    NetworkRealization network;
    if (config.topology != TopologyKind::clique) network.positions = uniform_positions(config.n_nodes, seeds.positions);
    network.field.h = sample_gains(config.n_nodes, config.observation, seeds.observation);
    network.field.g_tilde = sample_gains(config.n_nodes, config.channel, seeds.channel);
    network.field.eta2 = config.eta2;
    network.field.sigma2 = config.sigma2;
    network.field.xi2 = config.xi2;
    return network;
}

Topology build_topology(const ExperimentConfig& config, const std::vector<Point2>& positions, double x) {
    switch (config.topology) {
        case TopologyKind::clique: return q_clique(config.n_nodes, static_cast<int>(x));
        case TopologyKind::nn: return nearest_neighbor(positions, static_cast<int>(x));
        case TopologyKind::rgg: {
            const double r = config.q_tilde.empty() ? x : rgg_radius_for_degree(config.n_nodes, x);
            return rgg(positions, r);
        }
    }
    throw std::logic_error("unreachable topology kind");
}

double strategy_fisher(Strategy strategy, const SensorField& field, const Topology& topology, double energy) {
    if (strategy == Strategy::optimal) return optimal_ea(field, topology, energy).fisher;
    return evaluate(field, equal_ea(field, topology, energy)).fisher;
}

namespace {

ResultTable run_snapshot(const ExperimentConfig& config) {
    const auto& sweep = sweep_values(config);
    const auto strategies = config.strategies();
    const bool random_graph = config.topology == TopologyKind::rgg;
    const std::size_t cells = sweep.size() * strategies.size();

    std::vector<std::vector<double>> fisher(static_cast<std::size_t>(config.trials));
    std::vector<std::vector<double>> degree(static_cast<std::size_t>(config.trials));
    parallel_for(config.trials, [&](int trial) {
        const NetworkRealization network = realize_network(config, trial);
        auto& out = fisher[trial];
        out.reserve(cells);
        for (double x : sweep) {
            const Topology topology = build_topology(config, network.positions, x);
            degree[trial].push_back(static_cast<double>(topology.non_self_edges()) / config.n_nodes);
            for (Strategy s : strategies) out.push_back(strategy_fisher(s, network.field, topology, *config.energy));
        }
    });

    ResultTable table;
    table.columns = {sweep_name(config)};
    if (random_graph) table.columns.insert(table.columns.end(), {"mean_degree", "se_degree", "theory_q"});
    table.columns.insert(table.columns.end(), {"strategy", "trials", "mean_fisher", "se_fisher", "theory_fisher"});
    for (std::size_t xi = 0; xi < sweep.size(); ++xi) {
        const int q = theory_q(config, sweep[xi]);
        std::vector<double> degrees;
        for (const auto& d : degree) degrees.push_back(d[xi]);
        const TrialSummary degree_summary = summarize(degrees);
        for (std::size_t si = 0; si < strategies.size(); ++si) {
            std::vector<double> values;
            for (const auto& f : fisher) values.push_back(f[xi * strategies.size() + si]);
            const TrialSummary s = summarize(values);
            std::vector<Cell> row = {sweep[xi]};
            if (random_graph) row.insert(row.end(), {degree_summary.mean, degree_summary.std_error, double(q)});
            row.insert(row.end(), {std::string(to_string(strategies[si])), double(config.trials), s.mean, s.std_error,
                                   j_asym(strategies[si], asymptotic_config(config, q, *config.energy))});
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

// Spatial constants for the ou-variance / ou-trace kinds: the override, or one per strategy.
std::vector<std::pair<std::string, double>> scheme_constants(const ExperimentConfig& config) {
    if (config.c) return {{"fixed", *config.c}};
    std::vector<std::pair<std::string, double>> out;
    const int q = static_cast<int>(config.q.front());
    for (Strategy s : config.strategies()) {
        out.emplace_back(to_string(s), spatial_constant(s, asymptotic_config(config, q, 0.0)));
    }
    return out;
}

ResultTable run_ou_variance(const ExperimentConfig& config) {
    ResultTable table;
    table.columns = {"strategy", "period", "t", "var"};
    const double longest = *std::max_element(config.periods.begin(), config.periods.end());
    for (const auto& [name, c] : scheme_constants(config)) {
        for (double T : config.periods) {
            const OUSamplingScheme scheme(config.eta2, config.tau, T, *config.power, c);
            const VarianceProfile profile = variance_profile(scheme, config.profile_points);
            for (std::size_t i = 0; i < profile.times.size(); ++i) {
                table.rows.push_back({name, T, profile.times[i], profile.variances[i]});
            }
        }
        // The T -> 0 limit, reported as period 0 across the longest period.
        const double limit = var0(config.eta2, config.tau, *config.power, c);
        for (int i = 0; i < config.profile_points; ++i) {
            table.rows.push_back({name, 0.0, longest * i / (config.profile_points - 1), limit});
        }
    }
    return table;
}

ResultTable run_ou_trace(const ExperimentConfig& config) {
    ResultTable table;
    table.columns = {"strategy", "period", "t", "theta", "estimate", "sample"};
    const std::string empty;
    std::uint64_t stream = 0;
    for (const auto& [name, c] : scheme_constants(config)) {
        for (double T : config.periods) {
            const OUSamplingScheme scheme(config.eta2, config.tau, T, *config.power, c);
            const FilterTrace trace =
                simulate_filter_trace(scheme, config.t_obs, config.m_steps, derive_seed(config.seed, stream++));
            std::vector<std::pair<double, std::vector<Cell>>> rows;
            for (std::size_t j = 0; j < trace.grid.size(); ++j) {
                const auto idx = static_cast<Eigen::Index>(j);
                rows.push_back({trace.grid[j], {name, T, trace.grid[j], trace.theta[idx], trace.estimate[idx], empty}});
            }
            for (std::size_t k = 0; k < trace.sample_times.size(); ++k) {
                const double s = trace.sample_times[k];
                if (s < 0.0 || s >= config.t_obs) continue;
                rows.push_back({s, {name, T, s, empty, empty, trace.samples[static_cast<Eigen::Index>(k)]}});
            }
            std::stable_sort(rows.begin(), rows.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            for (auto& row : rows) table.rows.push_back(std::move(row.second));
        }
    }
    return table;
}

ResultTable run_ou_avar(const ExperimentConfig& config) {
    const auto& sweep = sweep_values(config);
    const auto strategies = config.strategies();
    const auto& periods = config.periods;

    std::vector<std::vector<double>> fisher(static_cast<std::size_t>(config.trials));
    std::vector<std::vector<double>> mse(static_cast<std::size_t>(config.trials));
    parallel_for(config.trials, [&](int trial) {
        const NetworkRealization network = realize_network(config, trial);
        const std::uint64_t trial_seed = derive_seed(derive_seed(config.seed, static_cast<std::uint64_t>(trial)), 4);
        std::uint64_t cell = 0;
        for (double x : sweep) {
            const Topology topology = build_topology(config, network.positions, x);
            for (Strategy s : strategies) {
                for (double T : periods) {
                    const double j = strategy_fisher(s, network.field, topology, *config.power * T);
                    const auto scheme = OUSamplingScheme::with_fisher(config.eta2, config.tau, T, j);
                    fisher[trial].push_back(j);
                    mse[trial].push_back(
                        simulate_filter_trace(scheme, config.t_obs, config.m_steps, derive_seed(trial_seed, cell++))
                            .mse());
                }
            }
        }
    });

    ResultTable table;
    table.columns = {sweep_name(config), "strategy", "period", "trials", "mean_fisher", "se_fisher",
                     "mean_avar", "se_avar", "theory_avar", "theory_var0"};
    std::size_t cell = 0;
    for (double x : sweep) {
        const int q = theory_q(config, x);
        for (Strategy s : strategies) {
            const double c = spatial_constant(s, asymptotic_config(config, q, 0.0));
            for (double T : periods) {
                std::vector<double> js;
                std::vector<double> errors;
                for (int trial = 0; trial < config.trials; ++trial) {
                    js.push_back(fisher[trial][cell]);
                    errors.push_back(mse[trial][cell]);
                }
                ++cell;
                const TrialSummary j_summary = summarize(js);
                const TrialSummary avar_summary = summarize(errors);
                const OUSamplingScheme theory(config.eta2, config.tau, T, *config.power, c);
                table.rows.push_back({x, std::string(to_string(s)), T, double(config.trials), j_summary.mean,
                                      j_summary.std_error, avar_summary.mean, avar_summary.std_error, avar(theory),
                                      var0(theory)});
            }
        }
    }
    return table;
}

}  // namespace

ResultTable run(const ExperimentConfig& config) {
    config.validate();
    ResultTable table;
    switch (config.kind) {
        case ExperimentKind::snapshot_nn:
        case ExperimentKind::snapshot_rgg:
        case ExperimentKind::snapshot_clique: table = run_snapshot(config); break;
        case ExperimentKind::ou_variance: table = run_ou_variance(config); break;
        case ExperimentKind::ou_avar: table = run_ou_avar(config); break;
        case ExperimentKind::ou_trace: table = run_ou_trace(config); break;
    }
    if (!config.output.empty()) table.write_csv(std::filesystem::path(config.output));
    return table;
}

std::vector<std::pair<std::string, ExperimentConfig>> figure_configs(const std::string& name, FigureScale scale,
                                                                     std::uint64_t seed) {
    const bool full = scale == FigureScale::full;
    const std::vector<double> degrees = {1, 2, 3, 5, 8, 12, 20, 30};
    ExperimentConfig base;
    base.n_nodes = full ? 10000 : 2000;
    base.trials = full ? 100 : 50;
    base.seed = seed;
    base.eta2 = 1.0;
    base.xi2 = 1.0;
    base.observation = RayleighGain{1.0};
    base.channel = RayleighGain{1.0};

    std::vector<std::pair<std::string, ExperimentConfig>> out;
    if (name == "fig5a" || name == "fig5b") {
        const bool nn = name == "fig5a";
        for (double sigma2 : {1.0, 2.0}) {
            ExperimentConfig cfg = base;
            cfg.kind = nn ? ExperimentKind::snapshot_nn : ExperimentKind::snapshot_rgg;
            cfg.topology = nn ? TopologyKind::nn : TopologyKind::rgg;
            (nn ? cfg.q : cfg.q_tilde) = degrees;
            cfg.sigma2 = sigma2;
            cfg.energy = 0.7;
            out.emplace_back(name + "_sigma2_" + format_number(sigma2), cfg);
        }
    } else if (name == "fig6") {
        ExperimentConfig variance = base;
        variance.kind = ExperimentKind::ou_variance;
        variance.tau = 1.0;
        variance.power = 2.5;
        variance.c = 1.0;  // c P / eta2 = 2.5
        variance.periods = {0.1, 0.75, 1.5, 3.0};
        out.emplace_back("fig6", variance);
        ExperimentConfig trace = variance;
        trace.kind = ExperimentKind::ou_trace;
        trace.periods = {0.75, 3.0};
        out.emplace_back("fig6_trace", trace);
    } else if (name == "fig7a" || name == "fig7b") {
        const bool nn = name == "fig7a";
        ExperimentConfig cfg = base;
        cfg.kind = ExperimentKind::ou_avar;
        cfg.topology = nn ? TopologyKind::nn : TopologyKind::rgg;
        (nn ? cfg.q : cfg.q_tilde) = degrees;
        cfg.sigma2 = 1.0;
        cfg.tau = 1.0;
        cfg.power = 1.4;
        cfg.periods = {0.7, 0.4, 0.1};
        out.emplace_back(name, cfg);
    } else {
        throw ConfigError("unknown figure `" + name + "` (expected fig5a, fig5b, fig6, fig7a or fig7b)");
    }
    for (auto& [stem, cfg] : out) cfg.validate();
    return out;
}

std::vector<std::filesystem::path> reproduce_figure(const std::string& name, FigureScale scale,
                                                    const std::filesystem::path& out_dir, std::uint64_t seed) {
    auto configs = figure_configs(name, scale, seed);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    for (auto& [stem, cfg] : configs) {
        const auto path = out_dir / (stem + ".csv");
        cfg.output = path.string();
        run(cfg);
        written.push_back(path);
    }
    return written;
}

}  // namespace collabsense
