/*******************************************************************************
 * Run records and performance profiles for comparing partitioners.
 *
 * @file:   profile.cc
 ******************************************************************************/
#include "djet/profile.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace djet {
namespace {
[[noreturn]] void parse_error(const std::size_t line, const std::string &what) {
  throw Error(ErrorKind::kParse, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_fields(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

template <typename T> T parse_field(const std::string &text, const std::size_t line, const char *name) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    parse_error(line, std::string("invalid ") + name + " '" + text + "'");
  }
  return value;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  return line;
}

std::string format_double(const double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

using Instance = std::tuple<std::string, BlockID, std::uint64_t>;
} // namespace

std::vector<RunRecord> parse_run_records(std::istream &in) {
  std::vector<RunRecord> records;
  std::string line;
  std::size_t line_number = 0;
  bool seen_header = false;

  while (std::getline(in, line)) {
    ++line_number;
    line = strip_cr(line);
    if (line.empty()) {
      continue;
    }
    if (!seen_header) {
      if (line != kRunRecordHeader) {
        parse_error(line_number, std::string("expected header '") + kRunRecordHeader + "'");
      }
      seen_header = true;
      continue;
    }

    const auto fields = split_fields(line);
    if (fields.size() != 6) {
      parse_error(line_number, "expected 6 fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      parse_error(line_number, "empty algorithm or graph name");
    }

    RunRecord record;
    record.algorithm = fields[0];
    record.graph = fields[1];
    record.k = parse_field<BlockID>(fields[2], line_number, "k");
    record.seed = parse_field<std::uint64_t>(fields[3], line_number, "seed");
    record.cut = parse_field<Weight>(fields[4], line_number, "cut");
    record.time_s = parse_field<double>(fields[5], line_number, "time");
    if (record.cut < 0) {
      parse_error(line_number, "negative cut");
    }
    records.push_back(std::move(record));
  }

  if (!seen_header) {
    parse_error(line_number, "missing header");
  }
  return records;
}

std::vector<RunRecord> read_run_records(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIO, "cannot open '" + path + "'");
  }
  return parse_run_records(in);
}

void write_run_records(std::ostream &out, const std::vector<RunRecord> &records) {
  out << kRunRecordHeader << '\n';
  for (const RunRecord &r : records) {
    out << r.algorithm << ',' << r.graph << ',' << r.k << ',' << r.seed << ',' << r.cut << ','
        << format_double(r.time_s) << '\n';
  }
}

std::vector<double> default_profile_deltas() {
  std::vector<double> deltas;
  for (int i = 100; i <= 110; ++i) {
    deltas.push_back(i / 100.0);
  }
  for (int i = 12; i <= 20; ++i) {
    deltas.push_back(i / 10.0);
  }
  return deltas;
}

std::vector<ProfileCurve>
performance_profile(const std::vector<RunRecord> &records, const std::vector<double> &deltas) {
  for (const double delta : deltas) {
    if (!(delta >= 1.0)) {
      throw_invalid_argument("profile deltas must be >= 1");
    }
  }

  std::set<std::string> algorithms;
  std::set<Instance> instances;
  std::map<std::pair<std::string, Instance>, Weight> cuts;
  for (const RunRecord &r : records) {
    const Instance instance{r.graph, r.k, r.seed};
    algorithms.insert(r.algorithm);
    instances.insert(instance);
    if (!cuts.emplace(std::make_pair(r.algorithm, instance), r.cut).second) {
      throw_invalid_argument(
          "duplicate record for algorithm '" + r.algorithm + "' on " + r.graph + " k=" + std::to_string(r.k) +
          " seed=" + std::to_string(r.seed)
      );
    }
  }

  std::string gaps;
  std::size_t num_gaps = 0;
  for (const std::string &algorithm : algorithms) {
    for (const Instance &instance : instances) {
      if (!cuts.contains({algorithm, instance})) {
        if (num_gaps++ < 10) {
          gaps += "\n  " + algorithm + " on " + std::get<0>(instance) +
                  " k=" + std::to_string(std::get<1>(instance)) +
                  " seed=" + std::to_string(std::get<2>(instance));
        }
      }
    }
  }
  if (num_gaps > 0) {
    throw_invalid_argument(std::to_string(num_gaps) + " missing (algorithm, instance) pairs:" + gaps);
  }

  std::map<Instance, Weight> best;
  for (const auto &[key, cut] : cuts) {
    auto [it, inserted] = best.emplace(key.second, cut);
    if (!inserted) {
      it->second = std::min(it->second, cut);
    }
  }

  std::vector<ProfileCurve> curves;
  for (const std::string &algorithm : algorithms) {
    ProfileCurve curve{algorithm, deltas, std::vector<double>(deltas.size(), 0.0)};
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      std::size_t within = 0;
      for (const Instance &instance : instances) {
        const double q = static_cast<double>(cuts.at({algorithm, instance}));
        const double bound = deltas[i] * static_cast<double>(best.at(instance));
        if (q <= bound * (1.0 + kProfileTolerance)) {
          ++within;
        }
      }
      curve.fractions[i] = static_cast<double>(within) / static_cast<double>(instances.size());
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

void write_profile(std::ostream &out, const std::vector<ProfileCurve> &curves) {
  out << kProfileHeader << '\n';
  for (const ProfileCurve &curve : curves) {
    for (std::size_t i = 0; i < curve.deltas.size(); ++i) {
      out << curve.algorithm << ',' << format_double(curve.deltas[i]) << ',' << format_double(curve.fractions[i])
          << '\n';
    }
  }
}

std::vector<ProfileCurve> parse_profile(std::istream &in) {
  std::vector<ProfileCurve> curves;
  std::string line;
  std::size_t line_number = 0;
  bool seen_header = false;

  while (std::getline(in, line)) {
    ++line_number;
    line = strip_cr(line);
    if (line.empty()) {
      continue;
    }
    if (!seen_header) {
      if (line != kProfileHeader) {
        parse_error(line_number, std::string("expected header '") + kProfileHeader + "'");
      }
      seen_header = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 3 || fields[0].empty()) {
      parse_error(line_number, "expected 'algorithm,delta,fraction'");
    }
    if (curves.empty() || curves.back().algorithm != fields[0]) {
      curves.push_back({fields[0], {}, {}});
    }
    curves.back().deltas.push_back(parse_field<double>(fields[1], line_number, "delta"));
    curves.back().fractions.push_back(parse_field<double>(fields[2], line_number, "fraction"));
  }
  if (!seen_header) {
    parse_error(line_number, "missing header");
  }
  return curves;
}
} // namespace djet
