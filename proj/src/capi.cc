/*******************************************************************************
 * C interface of the djet graph partitioner.
 *
 * @file:   capi.cc
 ******************************************************************************/
#include "djet/djet.h"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "djet/graph.h"
#include "djet/multilevel.h"
#include "djet/profile.h"

struct djet_graph {
  djet::Graph graph;
};

struct djet_result {
  djet::PartitionResult result;
  djet::JetConfig config;
  djet::NodeID n = 0;
  djet::EdgeID m = 0;
};

namespace {
thread_local std::string last_error;

djet_status fail(const djet_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <typename Body> djet_status guarded(Body &&body) {
  try {
    body();
    last_error.clear();
    return DJET_OK;
  } catch (const djet::Error &e) {
    switch (e.kind()) {
    case djet::ErrorKind::kInvalidArgument:
      return fail(DJET_INVALID_ARGUMENT, e.what());
    case djet::ErrorKind::kParse:
      return fail(DJET_PARSE_ERROR, e.what());
    case djet::ErrorKind::kIO:
      return fail(DJET_IO_ERROR, e.what());
    }
    return fail(DJET_INTERNAL_ERROR, e.what());
  } catch (const std::bad_alloc &) {
    return fail(DJET_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception &e) {
    return fail(DJET_INTERNAL_ERROR, e.what());
  }
}

#define DJET_REQUIRE(cond, msg)                                                                    \
  do {                                                                                             \
    if (!(cond)) {                                                                                 \
      return fail(DJET_INVALID_ARGUMENT, msg);                                                     \
    }                                                                                              \
  } while (false)

char *copy_string(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (out == nullptr) {
    throw std::bad_alloc();
  }
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string format_double(const double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

djet::JetConfig to_cpp(const djet_config &c) {
  djet::JetConfig config;
  if (c.refiner != DJET_REFINER_LP && c.refiner != DJET_REFINER_JET) {
    djet::throw_invalid_argument("unknown refiner value " + std::to_string(c.refiner));
  }
  if (c.execution < DJET_EXEC_SEQUENTIAL || c.execution > DJET_EXEC_THREADED) {
    djet::throw_invalid_argument("unknown execution value " + std::to_string(c.execution));
  }
  config.refiner = c.refiner == DJET_REFINER_JET ? djet::RefinerKind::kJet : djet::RefinerKind::kLabelPropagation;
  config.rounds = c.rounds;
  config.initial_temperature = c.initial_temperature;
  config.final_temperature = c.final_temperature;
  config.patience = c.patience;
  config.seed = c.seed;
  config.pe_count = c.pes;
  config.lp_rounds = c.lp_rounds;
  config.initial_repetitions = c.initial_repetitions;
  config.rebalance.alpha = c.alpha;
  config.rebalance.trigger_threshold = c.trigger_threshold;
  config.rebalance.max_iterations = c.rebalance_max_iterations;
  config.rebalance.admissions_per_block = c.admissions_per_block;
  config.rebalance.reported_per_block = c.reported_per_block;
  config.execution = static_cast<djet::ExecutionMode>(c.execution);
  config.threads = c.threads;
  return config;
}

djet_config to_c(const djet::JetConfig &config) {
  djet_config c{};
  c.refiner = config.refiner == djet::RefinerKind::kJet ? DJET_REFINER_JET : DJET_REFINER_LP;
  c.rounds = config.rounds;
  c.initial_temperature = config.initial_temperature;
  c.final_temperature = config.final_temperature;
  c.patience = config.patience;
  c.seed = config.seed;
  c.pes = config.pe_count;
  c.lp_rounds = config.lp_rounds;
  c.initial_repetitions = config.initial_repetitions;
  c.alpha = config.rebalance.alpha;
  c.trigger_threshold = config.rebalance.trigger_threshold;
  c.rebalance_max_iterations = config.rebalance.max_iterations;
  c.admissions_per_block = config.rebalance.admissions_per_block;
  c.reported_per_block = config.rebalance.reported_per_block;
  c.execution = static_cast<int32_t>(config.execution);
  c.threads = config.threads;
  return c;
}

std::string metrics_text(const djet_result &r) {
  const djet::PartitionResult &res = r.result;
  std::ostringstream out;
  out << "n=" << r.n << '\n'
      << "m=" << r.m << '\n'
      << "k=" << res.k << '\n'
      << "epsilon=" << format_double(res.epsilon) << '\n'
      << "l_max=" << format_double(res.l_max) << '\n'
      << "refiner=" << djet::to_string(r.config.refiner) << '\n'
      << "seed=" << r.config.seed << '\n'
      << "pes=" << r.config.pe_count << '\n'
      << "cut=" << res.cut << '\n'
      << "imbalance=" << format_double(res.imbalance) << '\n'
      << "balanced=" << (res.balanced ? 1 : 0) << '\n'
      << "residual_overload=" << format_double(res.residual_overload) << '\n'
      << "levels=" << res.levels << '\n'
      << "coarsest_n=" << res.coarsest_n << '\n'
      << "temperatures=";
  for (std::size_t i = 0; i < res.temperatures.size(); ++i) {
    out << (i > 0 ? "," : "") << format_double(res.temperatures[i]);
  }
  out << '\n'
      << "jet_rounds=" << res.jet_rounds.size() << '\n'
      << "lp_moves=" << res.lp_moves << '\n'
      << "probabilistic_rounds=" << res.probabilistic_rounds << '\n'
      << "time_coarsening=" << format_double(res.time_coarsening) << '\n'
      << "time_initial=" << format_double(res.time_initial) << '\n'
      << "time_refinement=" << format_double(res.time_refinement) << '\n'
      << "time_total=" << format_double(res.time_total) << '\n';
  return out.str();
}

nlohmann::json metrics_json(const djet_result &r) {
  const djet::PartitionResult &res = r.result;
  nlohmann::json rounds = nlohmann::json::array();
  for (const djet::JetRoundStats &s : res.jet_rounds) {
    rounds.push_back({
        {"temperature", s.temperature},
        {"iterations", s.iterations},
        {"improvements", s.improvements},
        {"input_cut", s.input_cut},
        {"output_cut", s.output_cut},
        {"jet_moves", s.jet_moves},
        {"rebalance_calls", s.rebalance_calls},
        {"probabilistic_rounds", s.probabilistic_rounds},
    });
  }
  return {
      {"n", r.n},
      {"m", r.m},
      {"k", res.k},
      {"epsilon", res.epsilon},
      {"l_max", res.l_max},
      {"refiner", djet::to_string(r.config.refiner)},
      {"seed", r.config.seed},
      {"pes", r.config.pe_count},
      {"cut", res.cut},
      {"imbalance", res.imbalance},
      {"balanced", res.balanced},
      {"residual_overload", res.residual_overload},
      {"block_weights", res.block_weights},
      {"levels", res.levels},
      {"coarsest_n", res.coarsest_n},
      {"temperatures", res.temperatures},
      {"jet_rounds", rounds},
      {"lp_moves", res.lp_moves},
      {"probabilistic_rounds", res.probabilistic_rounds},
      {"time",
       {
           {"coarsening", res.time_coarsening},
           {"initial", res.time_initial},
           {"refinement", res.time_refinement},
           {"total", res.time_total},
       }},
  };
}
} // namespace

extern "C" {
const char *djet_version(void) {
  return "1.0.0";
}

const char *djet_last_error(void) {
  return last_error.c_str();
}

const char *djet_status_string(const djet_status status) {
  switch (status) {
  case DJET_OK:
    return "ok";
  case DJET_INVALID_ARGUMENT:
    return "invalid argument";
  case DJET_PARSE_ERROR:
    return "parse error";
  case DJET_IO_ERROR:
    return "I/O error";
  case DJET_INTERNAL_ERROR:
    return "internal error";
  }
  return "unknown status";
}

void djet_string_free(char *str) {
  std::free(str);
}

djet_status djet_graph_read(const char *path, djet_graph **out) {
  DJET_REQUIRE(path != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = new djet_graph{djet::read_metis(path)}; });
}

djet_status djet_graph_parse(const char *text, const size_t length, djet_graph **out) {
  DJET_REQUIRE((text != nullptr || length == 0) && out != nullptr, "null argument");
  return guarded([&] { *out = new djet_graph{djet::parse_metis(std::string_view(text, length))}; });
}

djet_status djet_graph_write(const djet_graph *graph, const char *path) {
  DJET_REQUIRE(graph != nullptr && path != nullptr, "null argument");
  return guarded([&] { djet::write_metis(graph->graph, std::string(path)); });
}

djet_status djet_graph_gen_grid(const int64_t width, const int64_t height, djet_graph **out) {
  DJET_REQUIRE(out != nullptr, "null argument");
  return guarded([&] { *out = new djet_graph{djet::gen_grid(width, height)}; });
}

djet_status djet_graph_gen_rgg2d(const int64_t n, const double radius, const uint64_t seed, djet_graph **out) {
  DJET_REQUIRE(out != nullptr, "null argument");
  return guarded([&] { *out = new djet_graph{djet::gen_rgg2d(n, radius, seed)}; });
}

void djet_graph_free(djet_graph *graph) {
  delete graph;
}

uint32_t djet_graph_n(const djet_graph *graph) {
  return graph != nullptr ? graph->graph.n() : 0;
}

uint64_t djet_graph_m(const djet_graph *graph) {
  return graph != nullptr ? graph->graph.m() : 0;
}

int64_t djet_graph_total_node_weight(const djet_graph *graph) {
  return graph != nullptr ? graph->graph.total_node_weight() : 0;
}

djet_status djet_edge_cut(const djet_graph *graph, const uint32_t *assignment, const size_t length, int64_t *cut) {
  DJET_REQUIRE(graph != nullptr && cut != nullptr && (assignment != nullptr || length == 0), "null argument");
  return guarded([&] { *cut = djet::edge_cut(graph->graph, std::span<const uint32_t>(assignment, length)); });
}

void djet_config_init(djet_config *config) {
  if (config != nullptr) {
    *config = to_c(djet::JetConfig{});
  }
}

djet_status djet_config_validate(const djet_config *config) {
  DJET_REQUIRE(config != nullptr, "null argument");
  return guarded([&] { to_cpp(*config).validate(); });
}

djet_status djet_config_apply_text(djet_config *config, const char *text) {
  DJET_REQUIRE(config != nullptr && text != nullptr, "null argument");
  return guarded([&] {
    djet::JetConfig cpp = to_cpp(*config);
    cpp.apply_text(text);
    *config = to_c(cpp);
  });
}

djet_status djet_config_to_text(const djet_config *config, char **out) {
  DJET_REQUIRE(config != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = copy_string(to_cpp(*config).to_text()); });
}

djet_status djet_temperature_schedule(const djet_config *config, double *out, const size_t capacity) {
  DJET_REQUIRE(config != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    const djet::JetConfig cpp = to_cpp(*config);
    cpp.validate();
    const auto schedule = djet::temperature_schedule(cpp);
    if (schedule.size() > capacity) {
      djet::throw_invalid_argument("output buffer holds fewer than " + std::to_string(schedule.size()) + " values");
    }
    std::copy(schedule.begin(), schedule.end(), out);
  });
}

djet_status djet_partition(
    const djet_graph *graph, const uint32_t k, const double epsilon, const djet_config *config, djet_result **out
) {
  DJET_REQUIRE(graph != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    auto result = std::make_unique<djet_result>();
    if (config != nullptr) {
      result->config = to_cpp(*config);
    }
    result->n = graph->graph.n();
    result->m = graph->graph.m();
    result->result = djet::partition(graph->graph, k, epsilon, result->config);
    *out = result.release();
  });
}

void djet_result_free(djet_result *result) {
  delete result;
}

int64_t djet_result_cut(const djet_result *result) {
  return result->result.cut;
}

double djet_result_imbalance(const djet_result *result) {
  return result->result.imbalance;
}

int djet_result_balanced(const djet_result *result) {
  return result->result.balanced ? 1 : 0;
}

double djet_result_l_max(const djet_result *result) {
  return result->result.l_max;
}

double djet_result_residual_overload(const djet_result *result) {
  return result->result.residual_overload;
}

uint32_t djet_result_k(const djet_result *result) {
  return result->result.k;
}

size_t djet_result_levels(const djet_result *result) {
  return result->result.levels;
}

size_t djet_result_num_temperatures(const djet_result *result) {
  return result->result.temperatures.size();
}

double djet_result_temperature(const djet_result *result, const size_t i) {
  return i < result->result.temperatures.size() ? result->result.temperatures[i] : 0.0;
}

size_t djet_result_num_jet_rounds(const djet_result *result) {
  return result->result.jet_rounds.size();
}

double djet_result_time_total(const djet_result *result) {
  return result->result.time_total;
}

const uint32_t *djet_result_assignment(const djet_result *result, size_t *length) {
  if (length != nullptr) {
    *length = result->result.assignment.size();
  }
  return result->result.assignment.data();
}

int64_t djet_result_block_weight(const djet_result *result, const uint32_t block) {
  return block < result->result.block_weights.size() ? result->result.block_weights[block] : 0;
}

djet_status djet_result_write_partition(const djet_result *result, const char *path) {
  DJET_REQUIRE(result != nullptr && path != nullptr, "null argument");
  return guarded([&] { djet::write_partition(result->result.assignment, std::string(path)); });
}

djet_status djet_result_metrics(const djet_result *result, char **out) {
  DJET_REQUIRE(result != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = copy_string(metrics_text(*result)); });
}

djet_status djet_result_json(const djet_result *result, char **out) {
  DJET_REQUIRE(result != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = copy_string(metrics_json(*result).dump(2) + "\n"); });
}

djet_status
djet_profile_csv(const char *records_csv, const double *deltas, const size_t num_deltas, char **out_csv) {
  DJET_REQUIRE(records_csv != nullptr && out_csv != nullptr, "null argument");
  DJET_REQUIRE(deltas != nullptr || num_deltas == 0, "null delta array");
  return guarded([&] {
    std::istringstream in(records_csv);
    const auto records = djet::parse_run_records(in);
    const std::vector<double> grid =
        deltas != nullptr ? std::vector<double>(deltas, deltas + num_deltas) : djet::default_profile_deltas();
    std::ostringstream out;
    djet::write_profile(out, djet::performance_profile(records, grid));
    *out_csv = copy_string(out.str());
  });
}
}
