/*******************************************************************************
 * Rebalancing after unconstrained moves: probabilistic bucket rounds plus a
 * coordinated finisher.
 *
 * @file:   rebalance.cc
 ******************************************************************************/
#include "djet/rebalance.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "djet/random.h"

namespace djet {
double relative_gain(const Weight gain, const Weight weight) {
  if (gain > 0) {
    return static_cast<double>(gain) * static_cast<double>(weight);
  }
  return static_cast<double>(gain) / static_cast<double>(weight);
}

namespace {
constexpr long double kPowerTableLimit = 1e12L;
constexpr std::size_t kPowerTableMaxSize = 4096;

// alpha^0, alpha^1, ... up to the first power above kPowerTableLimit.
const std::vector<long double> &power_table(const double alpha) {
  thread_local double cached_alpha = 0.0;
  thread_local std::vector<long double> powers;
  if (alpha != cached_alpha) {
    powers.clear();
    const long double a = alpha;
    for (int e = 0;; ++e) {
      powers.push_back(std::pow(a, static_cast<long double>(e)));
      if (powers.back() > kPowerTableLimit || powers.size() == kPowerTableMaxSize) {
        break;
      }
    }
    cached_alpha = alpha;
  }
  return powers;
}
} // namespace

int bucket_index(const double relative_gain, const double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw_invalid_argument("bucket base alpha must be a finite number > 1");
  }
  if (std::isnan(relative_gain) || (std::isinf(relative_gain) && relative_gain < 0)) {
    throw_invalid_argument("relative gain must be finite");
  }
  if (relative_gain >= 0.0) {
    return 0;
  }

  // Smallest e >= 0 with alpha^e >= 1 - r. The powers are tabulated once per
  // alpha; values beyond the table fall back to stepping with pow().
  const long double x = 1.0L - static_cast<long double>(relative_gain);
  const long double a = alpha;
  const std::vector<long double> &powers = power_table(alpha);
  if (x <= powers.back()) {
    return 1 + static_cast<int>(std::lower_bound(powers.begin(), powers.end(), x) - powers.begin());
  }
  long double estimate = std::ceil(std::log(x) / std::log(a));
  int exponent = static_cast<int>(std::max<long double>(powers.size(), estimate));
  while (exponent > static_cast<int>(powers.size()) && std::pow(a, static_cast<long double>(exponent - 1)) >= x) {
    --exponent;
  }
  while (std::pow(a, static_cast<long double>(exponent)) < x) {
    ++exponent;
  }
  return 1 + exponent;
}

RelocationScan
scan_relocations(const DistGraph &dg, const DistPartition &dp, const double alpha, const Executor &exec) {
  const BlockID k = dp.k();
  const BalanceSpec &spec = dp.spec;
  const std::vector<Weight> weights(dp.block_weights().begin(), dp.block_weights().end());

  RelocationScan scan;
  scan.candidates.resize(dg.num_pes());
  if (std::all_of(weights.begin(), weights.end(), [&](const Weight w) { return spec.fits(w); })) {
    return scan;
  }

  std::vector<std::uint64_t> excluded(dg.num_pes(), 0);
  exec.superstep(dg.num_pes(), [&](const PEID pe) {
    const LocalGraph &local = dg.local(pe);
    const auto &blocks = dp.locals[pe].blocks;
    std::vector<Weight> rating(k, 0);
    std::vector<BlockID> touched;

    for (NodeID u = 0; u < local.n_owned(); ++u) {
      const BlockID from = blocks[u];
      if (spec.fits(weights[from])) {
        continue;
      }
      const Weight w = local.node_weight(u);
      auto feasible = [&](const BlockID b) {
        return b != from && spec.fits(weights[b] + w);
      };

      Weight conn_from = 0;
      local.for_each_neighbor(u, [&](const NodeID v, const Weight ew) {
        const BlockID b = blocks[v];
        if (b == from) {
          conn_from += ew;
          return;
        }
        if (rating[b] == 0) {
          touched.push_back(b);
        }
        rating[b] += ew;
      });

      BlockID to = kInvalidBlockID;
      for (const BlockID b : touched) {
        if (feasible(b) &&
            (to == kInvalidBlockID || rating[b] > rating[to] || (rating[b] == rating[to] && b < to))) {
          to = b;
        }
      }
      Weight conn_to = to == kInvalidBlockID ? 0 : rating[to];
      for (const BlockID b : touched) {
        rating[b] = 0;
      }
      touched.clear();

      if (to == kInvalidBlockID) {
        for (BlockID b = 0; b < k; ++b) {
          if (feasible(b)) {
            to = b;
            break;
          }
        }
      }
      if (to == kInvalidBlockID) {
        ++excluded[pe];
        continue;
      }

      const Weight gain = conn_to - conn_from;
      const double r = relative_gain(gain, w);
      scan.candidates[pe].push_back({u, local.local_to_global(u), w, from, to, gain, r, bucket_index(r, alpha)});
    }
  });
  for (const std::uint64_t count : excluded) {
    scan.excluded += count;
  }
  return scan;
}

BucketTable
build_buckets(const DistGraph &dg, const DistPartition &dp, const double alpha, const Executor &exec) {
  BucketTable table;
  table.round_start_weights.assign(dp.block_weights().begin(), dp.block_weights().end());
  table.slot_of.assign(dp.k(), -1);
  for (BlockID b = 0; b < dp.k(); ++b) {
    if (!dp.spec.fits(table.round_start_weights[b])) {
      table.slot_of[b] = static_cast<int>(table.overloaded.size());
      table.overloaded.push_back(b);
    }
  }

  RelocationScan scan = scan_relocations(dg, dp, alpha, exec);
  table.candidates = std::move(scan.candidates);
  table.excluded = scan.excluded;
  table.local_bucket_weights.resize(dg.num_pes());
  if (table.empty()) {
    return table;
  }

  std::vector<std::vector<Weight>> local_max(dg.num_pes(), std::vector<Weight>(1, 0));
  for (PEID pe = 0; pe < dg.num_pes(); ++pe) {
    for (const RelocationCandidate &candidate : table.candidates[pe]) {
      local_max[pe][0] = std::max<Weight>(local_max[pe][0], candidate.bucket + 1);
    }
  }
  table.num_buckets = static_cast<int>(allreduce_max(local_max)[0]);

  const std::size_t slots = table.overloaded.size();
  exec.superstep(dg.num_pes(), [&](const PEID pe) {
    auto &weights = table.local_bucket_weights[pe];
    weights.assign(slots * table.num_buckets, 0);
    for (const RelocationCandidate &candidate : table.candidates[pe]) {
      const auto slot = static_cast<std::size_t>(table.slot_of[candidate.from]);
      weights[slot * table.num_buckets + candidate.bucket] += candidate.weight;
    }
  });
  return table;
}

int cutoff_bucket(const std::span<const Weight> bucket_weights, const Weight excess) {
  Weight prefix = 0;
  for (std::size_t j = 0; j < bucket_weights.size(); ++j) {
    if (prefix >= excess) {
      return static_cast<int>(j);
    }
    prefix += bucket_weights[j];
  }
  return static_cast<int>(bucket_weights.size());
}

void compute_cutoffs_and_probs(BucketTable &table, const DistPartition &dp) {
  const BlockID k = dp.k();
  const BalanceSpec &spec = dp.spec;
  const std::size_t slots = table.overloaded.size();
  const std::size_t num_pes = table.candidates.size();

  table.cutoff.assign(slots, 0);
  table.cutoff_uncovered.assign(slots, false);
  table.candidate_weight.assign(k, 0);
  table.probability.assign(k, 0.0);
  if (table.empty()) {
    table.global_bucket_weights.clear();
    return;
  }

  table.global_bucket_weights = allreduce_sum(table.local_bucket_weights);
  for (std::size_t slot = 0; slot < slots; ++slot) {
    // sum >= c(V_o) - L_max  <=>  sum >= c(V_o) - floor(L_max) for integral sums
    const Weight excess = table.round_start_weights[table.overloaded[slot]] - spec.max_block_weight();
    const std::span<const Weight> buckets(
        table.global_bucket_weights.data() + slot * table.num_buckets, table.num_buckets
    );
    table.cutoff[slot] = cutoff_bucket(buckets, excess);
    Weight total = 0;
    for (const Weight w : buckets) {
      total += w;
    }
    table.cutoff_uncovered[slot] = total < excess;
  }

  std::vector<std::vector<Weight>> partial(num_pes, std::vector<Weight>(k, 0));
  for (std::size_t pe = 0; pe < num_pes; ++pe) {
    for (const RelocationCandidate &candidate : table.candidates[pe]) {
      if (candidate.bucket < table.cutoff[table.slot_of[candidate.from]]) {
        partial[pe][candidate.to] += candidate.weight;
      }
    }
  }
  table.candidate_weight = allreduce_sum(partial);

  for (BlockID b = 0; b < k; ++b) {
    const Weight w = table.candidate_weight[b];
    if (w > 0) {
      const double slack = std::max(0.0, spec.slack(table.round_start_weights[b]));
      table.probability[b] = std::min(1.0, slack / static_cast<double>(w));
    }
  }
}

MoveBatchResult probabilistic_round(
    const DistGraph &dg,
    DistPartition &dp,
    const BucketTable &table,
    const std::uint64_t seed,
    const std::uint64_t round,
    const Executor &exec
) {
  std::vector<std::vector<LocalMove>> moves(dg.num_pes());
  if (!table.empty()) {
    exec.superstep(dg.num_pes(), [&](const PEID pe) {
      for (const RelocationCandidate &candidate : table.candidates[pe]) {
        if (candidate.bucket >= table.cutoff[table.slot_of[candidate.from]]) {
          continue;
        }
        const double p = table.probability[candidate.to];
        if (random_unit(seed, streams::kRebalanceBase + round, candidate.global) < p) {
          moves[pe].push_back({candidate.local, candidate.to});
        }
      }
    });
  }
  return apply_moves(dg, dp, moves, exec);
}

namespace {
struct Report {
  Weight weight;
  BlockID from;
  BlockID to;
  double relative_gain;
};

bool ranks_before(const double r_a, const NodeID a, const double r_b, const NodeID b) {
  return r_a > r_b || (r_a == r_b && a < b);
}
} // namespace

MoveBatchResult coordinated_round(
    const DistGraph &dg, DistPartition &dp, const RebalanceConfig &config, const Executor &exec
) {
  const PEID num_pes = dg.num_pes();
  const BlockID k = dp.k();
  const BalanceSpec &spec = dp.spec;
  constexpr PEID kRoot = 0;

  RelocationScan scan = scan_relocations(dg, dp, config.alpha, exec);

  // Each PE reports its best candidates per overloaded block to the root.
  MessageQueue<Report> reports(num_pes);
  exec.superstep(num_pes, [&](const PEID pe) {
    std::vector<std::vector<const RelocationCandidate *>> by_block(k);
    for (const RelocationCandidate &c : scan.candidates[pe]) {
      by_block[c.from].push_back(&c);
    }
    for (auto &list : by_block) {
      const std::size_t top = std::min<std::size_t>(list.size(), config.reported_per_block);
      std::partial_sort(list.begin(), list.begin() + top, list.end(), [](const auto *a, const auto *b) {
        return ranks_before(a->relative_gain, a->global, b->relative_gain, b->global);
      });
      for (std::size_t i = 0; i < top; ++i) {
        const RelocationCandidate &c = *list[i];
        reports.send(pe, kRoot, c.global, {c.weight, c.from, c.to, c.relative_gain});
      }
    }
  });
  auto inboxes = reports.deliver();

  // Root admits candidates in global priority order against live weights.
  MessageQueue<BlockID> admissions(num_pes);
  exec.superstep(num_pes, [&](const PEID pe) {
    if (pe != kRoot) {
      return;
    }
    auto &received = inboxes[kRoot];
    std::sort(received.begin(), received.end(), [](const auto &a, const auto &b) {
      return ranks_before(a.payload.relative_gain, a.global, b.payload.relative_gain, b.global);
    });
    std::vector<Weight> live(dp.block_weights().begin(), dp.block_weights().end());
    std::vector<int> admitted(k, 0);
    for (const auto &message : received) {
      const Report &report = message.payload;
      if (admitted[report.from] >= config.admissions_per_block || spec.fits(live[report.from]) ||
          !spec.fits(live[report.to] + report.weight)) {
        continue;
      }
      live[report.from] -= report.weight;
      live[report.to] += report.weight;
      ++admitted[report.from];
      admissions.send(kRoot, dg.owner_of(message.global), message.global, report.to);
    }
  });
  const auto admitted = admissions.deliver();

  std::vector<std::vector<LocalMove>> moves(num_pes);
  exec.superstep(num_pes, [&](const PEID pe) {
    const LocalGraph &local = dg.local(pe);
    for (const auto &message : admitted[pe]) {
      moves[pe].push_back({local.global_to_local(message.global), message.payload});
    }
  });
  return apply_moves(dg, dp, moves, exec);
}

bool triggers_probabilistic_round(const double before, const double after, const double threshold) {
  return after > 0.0 && (before - after) < threshold * before;
}

RebalanceStats rebalance(
    const DistGraph &dg,
    DistPartition &dp,
    const RebalanceConfig &config,
    const std::uint64_t seed,
    std::uint64_t &round,
    const Executor &exec
) {
  RebalanceStats stats;
  stats.overload_before = dp.total_overload();
  auto record = [&](const MoveBatchResult &result) {
    stats.moved += result.moved;
    stats.cut_delta += result.cut_delta;
  };

  bool stalled = false;
  while (!dp.is_balanced() && !stalled) {
    if (stats.iterations == config.max_iterations) {
      stats.hit_iteration_cap = true;
      break;
    }
    ++stats.iterations;

    const double before = dp.total_overload();
    const MoveBatchResult coordinated = coordinated_round(dg, dp, config, exec);
    ++stats.coordinated_epochs;
    record(coordinated);
    const double after = dp.total_overload();

    std::uint64_t probabilistic_moves = 0;
    if (triggers_probabilistic_round(before, after, config.trigger_threshold)) {
      BucketTable table = build_buckets(dg, dp, config.alpha, exec);
      compute_cutoffs_and_probs(table, dp);
      const MoveBatchResult probabilistic = probabilistic_round(dg, dp, table, seed, round++, exec);
      ++stats.probabilistic_rounds;
      record(probabilistic);
      probabilistic_moves = probabilistic.moved;
    }
    stalled = coordinated.moved == 0 && probabilistic_moves == 0;
  }

  // Coordinated epochs only: they never overload a block, so whatever remains
  // can only shrink.
  while (!dp.is_balanced()) {
    const MoveBatchResult epoch = coordinated_round(dg, dp, config, exec);
    ++stats.finisher_epochs;
    record(epoch);
    if (epoch.moved == 0) {
      break;
    }
  }

  stats.overload_after = dp.total_overload();
  stats.balanced = dp.is_balanced();
  return stats;
}
} // namespace djet
