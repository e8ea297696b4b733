/*******************************************************************************
 * Command line front end: partition, gen, profile and bench subcommands.
 *
 * @file:   djet_cli.cc
 ******************************************************************************/
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "djet/djet.h"

namespace {
class CliError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

void check(const djet_status status, const std::string &context) {
  if (status != DJET_OK) {
    throw CliError(context + ": " + djet_last_error());
  }
}

struct GraphDeleter {
  void operator()(djet_graph *g) const {
    djet_graph_free(g);
  }
};
struct ResultDeleter {
  void operator()(djet_result *r) const {
    djet_result_free(r);
  }
};
struct StringDeleter {
  void operator()(char *s) const {
    djet_string_free(s);
  }
};
using GraphPtr = std::unique_ptr<djet_graph, GraphDeleter>;
using ResultPtr = std::unique_ptr<djet_result, ResultDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CliError("cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::string &path, const std::string &text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw CliError("cannot write '" + path + "'");
  }
}

// Parses "WxH".
std::pair<std::int64_t, std::int64_t> parse_dims(const std::string &text) {
  const auto x = text.find('x');
  try {
    std::size_t pos_w = 0;
    std::size_t pos_h = 0;
    const std::int64_t w = std::stoll(text.substr(0, x), &pos_w);
    const std::int64_t h = std::stoll(text.substr(x + 1), &pos_h);
    if (x == std::string::npos || pos_w != x || pos_h != text.size() - x - 1) {
      throw std::invalid_argument(text);
    }
    return {w, h};
  } catch (const std::exception &) {
    throw CliError("expected grid size WIDTHxHEIGHT, got '" + text + "'");
  }
}

// A graph argument is a METIS path, "grid:WxH" or "rgg2d:N:RADIUS[:SEED]".
GraphPtr load_graph(const std::string &spec) {
  djet_graph *graph = nullptr;
  if (spec.rfind("grid:", 0) == 0) {
    const auto [w, h] = parse_dims(spec.substr(5));
    check(djet_graph_gen_grid(w, h, &graph), spec);
  } else if (spec.rfind("rgg2d:", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream ss(spec.substr(6));
    for (std::string part; std::getline(ss, part, ':');) {
      parts.push_back(part);
    }
    if (parts.size() < 2 || parts.size() > 3) {
      throw CliError("expected rgg2d:N:RADIUS[:SEED], got '" + spec + "'");
    }
    try {
      check(
          djet_graph_gen_rgg2d(
              std::stoll(parts[0]), std::stod(parts[1]), parts.size() == 3 ? std::stoull(parts[2]) : 0, &graph
          ),
          spec
      );
    } catch (const std::logic_error &) {
      throw CliError("malformed generator arguments in '" + spec + "'");
    }
  } else {
    check(djet_graph_read(spec.c_str(), &graph), "reading graph");
  }
  return GraphPtr(graph);
}

std::string graph_name(const std::string &spec) {
  if (spec.rfind("grid:", 0) == 0 || spec.rfind("rgg2d:", 0) == 0) {
    return spec;
  }
  return std::filesystem::path(spec).stem().string();
}

djet_refiner refiner_from(const std::string &name) {
  if (name == "jet") {
    return DJET_REFINER_JET;
  }
  if (name == "lp") {
    return DJET_REFINER_LP;
  }
  throw CliError("unknown refiner '" + name + "'");
}

struct PartitionOptions {
  std::string graph;
  std::uint32_t k = 2;
  double epsilon = 0.03;
  std::uint32_t pes = 1;
  std::uint64_t seed = 0;
  std::string refiner = "jet";
  int jet_rounds = 4;
  double alpha = 1.1;
  std::string out;
  std::string config_file;
  std::string json;
};

int cmd_partition(const PartitionOptions &opt, const CLI::App &app) {
  djet_config config;
  djet_config_init(&config);
  if (!opt.config_file.empty()) {
    check(djet_config_apply_text(&config, read_file(opt.config_file).c_str()), opt.config_file);
  }
  // Explicit flags win over the configuration file.
  if (app.count("--pes") > 0) {
    config.pes = opt.pes;
  }
  if (app.count("--seed") > 0) {
    config.seed = opt.seed;
  }
  if (app.count("--refiner") > 0) {
    config.refiner = refiner_from(opt.refiner);
  }
  if (app.count("--jet-rounds") > 0) {
    config.rounds = opt.jet_rounds;
  }
  if (app.count("--alpha") > 0) {
    config.alpha = opt.alpha;
  }
  check(djet_config_validate(&config), "configuration");

  const GraphPtr graph = load_graph(opt.graph);
  djet_result *raw = nullptr;
  check(djet_partition(graph.get(), opt.k, opt.epsilon, &config, &raw), "partitioning");
  const ResultPtr result(raw);

  char *metrics = nullptr;
  check(djet_result_metrics(result.get(), &metrics), "metrics");
  std::cout << StringPtr(metrics).get();

  if (!opt.json.empty()) {
    char *json = nullptr;
    check(djet_result_json(result.get(), &json), "json");
    write_text(opt.json, StringPtr(json).get());
  }
  if (!opt.out.empty()) {
    check(djet_result_write_partition(result.get(), opt.out.c_str()), "writing partition");
  }
  return 0;
}

int cmd_profile(const std::string &input, const std::string &output, const std::vector<double> &deltas) {
  const std::string csv = input == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {}) : read_file(input);
  char *profile = nullptr;
  check(
      djet_profile_csv(csv.c_str(), deltas.empty() ? nullptr : deltas.data(), deltas.size(), &profile),
      input
  );
  write_text(output, StringPtr(profile).get());
  return 0;
}

struct BenchOptions {
  std::vector<std::string> graphs;
  std::vector<std::uint32_t> ks{2, 4, 8, 16};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::vector<std::string> algorithms{"lp", "jet"};
  double epsilon = 0.03;
  std::uint32_t pes = 1;
  std::string out = "-";
};

int cmd_bench(const BenchOptions &opt) {
  std::ostringstream csv;
  csv << "algorithm,graph,k,seed,cut,time_s\n";
  for (const std::string &spec : opt.graphs) {
    const GraphPtr graph = load_graph(spec);
    const std::string name = graph_name(spec);
    for (const std::uint32_t k : opt.ks) {
      for (const std::uint64_t seed : opt.seeds) {
        for (const std::string &algorithm : opt.algorithms) {
          djet_config config;
          djet_config_init(&config);
          config.refiner = refiner_from(algorithm);
          config.seed = seed;
          config.pes = opt.pes;

          djet_result *raw = nullptr;
          check(djet_partition(graph.get(), k, opt.epsilon, &config, &raw), name);
          const ResultPtr result(raw);
          csv << algorithm << ',' << name << ',' << k << ',' << seed << ',' << djet_result_cut(result.get()) << ','
              << djet_result_time_total(result.get()) << '\n';
          std::cerr << algorithm << ' ' << name << " k=" << k << " seed=" << seed
                    << " cut=" << djet_result_cut(result.get())
                    << (djet_result_balanced(result.get()) ? "" : " UNBALANCED") << '\n';
        }
      }
    }
  }
  write_text(opt.out, csv.str());
  return 0;
}
} // namespace

int main(int argc, char **argv) {
  CLI::App app{"djet: distributed Jet refinement graph partitioner (simulated PEs)"};
  app.require_subcommand(1);

  PartitionOptions part;
  CLI::App *partition = app.add_subcommand("partition", "Partition a graph and print key=value metrics");
  partition->add_option("--graph", part.graph, "METIS file, grid:WxH or rgg2d:N:RADIUS[:SEED]")->required();
  partition->add_option("--k", part.k, "Number of blocks")->required()->check(CLI::PositiveNumber);
  partition->add_option("--epsilon", part.epsilon, "Imbalance parameter")->capture_default_str();
  partition->add_option("--pes", part.pes, "Number of simulated PEs")->check(CLI::PositiveNumber);
  partition->add_option("--seed", part.seed, "Random seed");
  partition->add_option("--refiner", part.refiner, "Refinement algorithm")->check(CLI::IsMember({"lp", "jet"}));
  partition->add_option("--jet-rounds", part.jet_rounds, "Jet rounds t per level");
  partition->add_option("--alpha", part.alpha, "Bucket base of the rebalancer");
  partition->add_option("--out", part.out, "Write the partition (one block id per line)");
  partition->add_option("--config", part.config_file, "key = value configuration file");
  partition->add_option("--json", part.json, "Write a JSON metrics dump ('-' for stdout)");

  std::string gen_out = "-";
  std::string grid_size;
  CLI::App *gen = app.add_subcommand("gen", "Generate a benchmark graph in METIS format");
  gen->require_subcommand(1);
  CLI::App *gen_grid = gen->add_subcommand("grid", "2D grid graph");
  gen_grid->add_option("size", grid_size, "WIDTHxHEIGHT")->required();
  gen_grid->add_option("-o,--out", gen_out, "Output path ('-' for stdout)");
  std::int64_t rgg_n = 0;
  double rgg_radius = 0.0;
  std::uint64_t rgg_seed = 0;
  CLI::App *gen_rgg = gen->add_subcommand("rgg2d", "Random geometric graph in the unit square");
  gen_rgg->add_option("--n", rgg_n, "Number of vertices")->required();
  gen_rgg->add_option("--radius", rgg_radius, "Connection radius")->required();
  gen_rgg->add_option("--seed", rgg_seed, "Random seed");
  gen_rgg->add_option("-o,--out", gen_out, "Output path ('-' for stdout)");

  std::string profile_in;
  std::string profile_out = "-";
  std::vector<double> profile_deltas;
  CLI::App *profile = app.add_subcommand("profile", "Performance profile from a run-record CSV");
  profile->add_option("input", profile_in, "CSV with header algorithm,graph,k,seed,cut,time_s ('-' for stdin)")
      ->required();
  profile->add_option("-o,--out", profile_out, "Output CSV ('-' for stdout)");
  profile->add_option("--deltas", profile_deltas, "Delta grid (default 1.00..1.10, 1.2..2.0)")->delimiter(',');

  BenchOptions bench_opt;
  CLI::App *bench = app.add_subcommand("bench", "Run lp and jet on graphs and write run records");
  bench->add_option("graphs", bench_opt.graphs, "METIS files or generator specs")->required();
  bench->add_option("--k", bench_opt.ks, "Block counts")->delimiter(',');
  bench->add_option("--seeds", bench_opt.seeds, "Seeds")->delimiter(',');
  bench->add_option("--algorithms", bench_opt.algorithms, "Refiners")->delimiter(',');
  bench->add_option("--epsilon", bench_opt.epsilon, "Imbalance parameter");
  bench->add_option("--pes", bench_opt.pes, "Number of simulated PEs")->check(CLI::PositiveNumber);
  bench->add_option("-o,--out", bench_opt.out, "Output CSV ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*partition) {
      return cmd_partition(part, *partition);
    }
    if (*gen) {
      djet_graph *raw = nullptr;
      if (*gen_grid) {
        const auto [w, h] = parse_dims(grid_size);
        check(djet_graph_gen_grid(w, h, &raw), "grid");
      } else {
        check(djet_graph_gen_rgg2d(rgg_n, rgg_radius, rgg_seed, &raw), "rgg2d");
      }
      const GraphPtr graph(raw);
      check(djet_graph_write(graph.get(), gen_out == "-" ? "/dev/stdout" : gen_out.c_str()), "writing graph");
      return 0;
    }
    if (*profile) {
      return cmd_profile(profile_in, profile_out, profile_deltas);
    }
    if (*bench) {
      return cmd_bench(bench_opt);
    }
  } catch (const CliError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
