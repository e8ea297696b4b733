/*******************************************************************************
 * Configuration handling and the multilevel driver.
 *
 * @file:   partitioner.cc
 ******************************************************************************/
#include <charconv>
#include <chrono>
#include <sstream>

#include "djet/multilevel.h"
#include "djet/random.h"

namespace djet {
namespace {
class Timer {
public:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - _start).count();
  }

private:
  std::chrono::steady_clock::time_point _start = std::chrono::steady_clock::now();
};

std::string format_double(const double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

template <typename T> T parse_number(const std::string &key, const std::string &value) {
  T result{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), result);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw_invalid_argument("invalid value '" + value + "' for '" + key + "'");
  }
  return result;
}

std::string trim(const std::string &s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string to_string(const ExecutionMode mode) {
  switch (mode) {
  case ExecutionMode::kSequential:
    return "sequential";
  case ExecutionMode::kReverse:
    return "reverse";
  case ExecutionMode::kShuffled:
    return "shuffled";
  case ExecutionMode::kThreaded:
    return "threaded";
  }
  return "sequential";
}

ExecutionMode parse_execution(const std::string &name) {
  if (name == "sequential") {
    return ExecutionMode::kSequential;
  }
  if (name == "reverse") {
    return ExecutionMode::kReverse;
  }
  if (name == "shuffled") {
    return ExecutionMode::kShuffled;
  }
  if (name == "threaded") {
    return ExecutionMode::kThreaded;
  }
  throw_invalid_argument("unknown execution mode '" + name + "'");
}
} // namespace

std::string to_string(const RefinerKind kind) {
  return kind == RefinerKind::kJet ? "jet" : "lp";
}

RefinerKind parse_refiner(const std::string &name) {
  if (name == "jet") {
    return RefinerKind::kJet;
  }
  if (name == "lp") {
    return RefinerKind::kLabelPropagation;
  }
  throw_invalid_argument("unknown refiner '" + name + "' (expected lp or jet)");
}

void JetConfig::validate() const {
  if (rounds < 1) {
    throw_invalid_argument("rounds must be at least 1");
  }
  if (!(0.0 <= final_temperature && final_temperature <= initial_temperature && initial_temperature <= 1.0)) {
    throw_invalid_argument("temperatures must satisfy 0 <= tau_1 <= tau_0 <= 1");
  }
  if (patience < 1) {
    throw_invalid_argument("patience must be at least 1");
  }
  if (pe_count < 1) {
    throw_invalid_argument("PE count must be at least 1");
  }
  if (lp_rounds < 0 || initial_repetitions < 1) {
    throw_invalid_argument("lp_rounds must be >= 0 and initial_repetitions >= 1");
  }
  if (!(rebalance.alpha > 1.0)) {
    throw_invalid_argument("alpha must be > 1");
  }
  if (!(rebalance.trigger_threshold >= 0.0 && rebalance.trigger_threshold <= 1.0)) {
    throw_invalid_argument("trigger threshold must lie in [0, 1]");
  }
  if (rebalance.max_iterations < 0 || rebalance.admissions_per_block < 1 || rebalance.reported_per_block < 1) {
    throw_invalid_argument("invalid rebalancer limits");
  }
}

std::string JetConfig::to_text() const {
  std::ostringstream out;
  out << "refiner = " << to_string(refiner) << '\n'
      << "rounds = " << rounds << '\n'
      << "initial_temperature = " << format_double(initial_temperature) << '\n'
      << "final_temperature = " << format_double(final_temperature) << '\n'
      << "patience = " << patience << '\n'
      << "seed = " << seed << '\n'
      << "pes = " << pe_count << '\n'
      << "lp_rounds = " << lp_rounds << '\n'
      << "initial_repetitions = " << initial_repetitions << '\n'
      << "alpha = " << format_double(rebalance.alpha) << '\n'
      << "trigger_threshold = " << format_double(rebalance.trigger_threshold) << '\n'
      << "rebalance_max_iterations = " << rebalance.max_iterations << '\n'
      << "admissions_per_block = " << rebalance.admissions_per_block << '\n'
      << "reported_per_block = " << rebalance.reported_per_block << '\n'
      << "execution = " << to_string(execution) << '\n'
      << "threads = " << threads << '\n';
  return out.str();
}

void JetConfig::set(const std::string &key, const std::string &value) {
  if (key == "refiner") {
    refiner = parse_refiner(value);
  } else if (key == "rounds") {
    rounds = parse_number<int>(key, value);
  } else if (key == "initial_temperature") {
    initial_temperature = parse_number<double>(key, value);
  } else if (key == "final_temperature") {
    final_temperature = parse_number<double>(key, value);
  } else if (key == "patience") {
    patience = parse_number<int>(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "pes") {
    pe_count = parse_number<PEID>(key, value);
  } else if (key == "lp_rounds") {
    lp_rounds = parse_number<int>(key, value);
  } else if (key == "initial_repetitions") {
    initial_repetitions = parse_number<int>(key, value);
  } else if (key == "alpha") {
    rebalance.alpha = parse_number<double>(key, value);
  } else if (key == "trigger_threshold") {
    rebalance.trigger_threshold = parse_number<double>(key, value);
  } else if (key == "rebalance_max_iterations") {
    rebalance.max_iterations = parse_number<int>(key, value);
  } else if (key == "admissions_per_block") {
    rebalance.admissions_per_block = parse_number<int>(key, value);
  } else if (key == "reported_per_block") {
    rebalance.reported_per_block = parse_number<int>(key, value);
  } else if (key == "execution") {
    execution = parse_execution(value);
  } else if (key == "threads") {
    threads = parse_number<unsigned>(key, value);
  } else {
    throw_invalid_argument("unknown configuration key '" + key + "'");
  }
}

void JetConfig::apply_text(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kParse, "config line " + std::to_string(line_number) + ": expected 'key = value'");
    }
    try {
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error &e) {
      throw Error(ErrorKind::kParse, "config line " + std::to_string(line_number) + ": " + e.what());
    }
  }
}

JetConfig JetConfig::parse_text(const std::string &text) {
  JetConfig config;
  config.apply_text(text);
  return config;
}

std::vector<double> temperature_schedule(const JetConfig &config) {
  std::vector<double> schedule;
  schedule.reserve(config.rounds);
  for (int i = 0; i < config.rounds; ++i) {
    schedule.push_back(
        config.initial_temperature +
        static_cast<double>(i) / config.rounds * (config.final_temperature - config.initial_temperature)
    );
  }
  return schedule;
}

PartitionResult
partition(const Graph &graph, const BlockID k, const double epsilon, const JetConfig &config) {
  config.validate();
  const Timer total_timer;

  PartitionResult result;
  result.k = k;
  result.epsilon = epsilon;
  const BalanceSpec final_spec(k, epsilon, graph.total_node_weight());
  result.l_max = final_spec.l_max();
  if (config.refiner == RefinerKind::kJet) {
    result.temperatures = temperature_schedule(config);
  }

  std::vector<BlockID> assignment(graph.n(), 0);
  if (k > 1 && graph.n() > 0) {
    const Timer coarsening_timer;
    const Hierarchy hierarchy = coarsen(graph, k, config.seed);
    result.time_coarsening = coarsening_timer.elapsed();
    result.levels = hierarchy.num_levels();
    result.coarsest_n = hierarchy.coarsest().n();

    const Timer initial_timer;
    const Partition initial = initial_partition(hierarchy.coarsest(), k, epsilon, config);
    assignment.assign(initial.assignment().begin(), initial.assignment().end());
    result.time_initial = initial_timer.elapsed();

    const Timer refinement_timer;
    RefinementState state;
    state.seed = random_bits(config.seed, streams::kRebalanceBase - 1, 0);
    state.exec = Executor(config.execution, config.seed, config.threads);

    for (std::size_t level = hierarchy.num_levels(); level-- > 0;) {
      if (level + 1 < hierarchy.num_levels()) {
        assignment = hierarchy.project(level, assignment);
      }
      const Graph &level_graph = hierarchy.graph(level);
      const PEID pes = std::min<PEID>(config.pe_count, level_graph.n());
      const DistGraph dg = distribute(level_graph, pes);
      DistPartition dp = scatter(dg, BalanceSpec(k, epsilon, level_graph.total_node_weight()), assignment);

      if (!dp.is_balanced()) {
        const RebalanceStats stats =
            rebalance(dg, dp, config.rebalance, state.seed, state.rebalance_round, state.exec);
        result.probabilistic_rounds += stats.probabilistic_rounds;
      }
      result.lp_moves += lp_refine(dg, dp, config.lp_rounds, state).moved;

      if (config.refiner == RefinerKind::kJet && dp.is_balanced()) {
        for (const double temperature : result.temperatures) {
          result.jet_rounds.push_back(jet_round(dg, dp, temperature, config, state));
          result.probabilistic_rounds += result.jet_rounds.back().probabilistic_rounds;
        }
      }
      assignment = gather(dg, dp);
    }
    result.time_refinement = refinement_timer.elapsed();
  }

  const Partition final_partition(graph, k, epsilon, assignment);
  result.cut = edge_cut(graph, assignment);
  result.block_weights.assign(final_partition.block_weights().begin(), final_partition.block_weights().end());
  result.balanced = final_partition.is_balanced();
  result.imbalance = final_partition.imbalance();
  result.residual_overload = final_partition.overload_report().total_overload;
  result.assignment = std::move(assignment);
  result.time_total = total_timer.elapsed();
  return result;
}
} // namespace djet
