/*******************************************************************************
 * Run records and performance profiles for comparing partitioners.
 *
 * @file:   profile.h
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "djet/definitions.h"

namespace djet {
struct RunRecord {
  std::string algorithm;
  std::string graph;
  BlockID k = 0;
  std::uint64_t seed = 0;
  Weight cut = 0;
  double time_s = 0.0;

  bool operator==(const RunRecord &) const = default;
};

inline constexpr const char *kRunRecordHeader = "algorithm,graph,k,seed,cut,time_s";

std::vector<RunRecord> parse_run_records(std::istream &in);
std::vector<RunRecord> read_run_records(const std::string &path);
void write_run_records(std::ostream &out, const std::vector<RunRecord> &records);

// One curve per algorithm; fractions[i] belongs to deltas[i].
struct ProfileCurve {
  std::string algorithm;
  std::vector<double> deltas;
  std::vector<double> fractions;

  bool operator==(const ProfileCurve &) const = default;
};

// Relative slack applied to delta * best so that decimal deltas like 1.1 do not
// miss exact ratios because of binary rounding.
inline constexpr double kProfileTolerance = 1e-12;

std::vector<double> default_profile_deltas();

// Curves are sorted by algorithm name. Throws if some algorithm lacks a record
// for an instance, or has more than one.
std::vector<ProfileCurve>
performance_profile(const std::vector<RunRecord> &records, const std::vector<double> &deltas);

inline constexpr const char *kProfileHeader = "algorithm,delta,fraction";

void write_profile(std::ostream &out, const std::vector<ProfileCurve> &curves);
std::vector<ProfileCurve> parse_profile(std::istream &in);
} // namespace djet
