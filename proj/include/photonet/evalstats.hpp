#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "photonet/corpus.hpp"
#include "photonet/netbuild.hpp"
#include "photonet/recognition.hpp"

namespace photonet {

/// Membership confusion counts of one predicted network (or a micro-sum).
///
/// A ratio whose denominator is zero is reported as 1: no positive claims
/// means no wrong ones, and an empty truth set has nothing left to find.
struct EvalReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const;
  double recall() const;

  EvalReport& operator+=(const EvalReport& other);
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Compares member sets, root excluded. Throws Error(comparison) when the
/// roots differ.
EvalReport evaluate_network(const CommunityGraph& predicted,
                            const CommunityGraph& truth);

struct TargetEval {
  IdentityId target;
  EvalReport report;
};

struct AggregateEval {
  std::vector<TargetEval> per_target;
  EvalReport micro;  // summed counts
  double macro_precision = 1.0;
  double macro_recall = 1.0;
};

/// Truth networks use true labels on `truth`; predicted networks use
/// predicted labels on `recognized`, both at params' threshold. A target
/// that never appears under predicted labels yields a root-only prediction.
AggregateEval evaluate_targets(const Corpus& truth, const Corpus& recognized,
                               std::span<const IdentityId> targets,
                               const BuildParams& params);

struct SweepPoint {
  std::size_t threshold = 0;
  double precision = 1.0;
  double recall = 1.0;
  EvalReport micro;
  double macro_precision = 1.0;
  double macro_recall = 1.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // thresholds strictly increasing
};

SweepResult threshold_sweep(const Corpus& corpus,
                            const RecognizerConfig& recognizer,
                            std::span<const std::size_t> thresholds,
                            std::span<const IdentityId> targets,
                            std::optional<std::size_t> max_layers = {});

/// Same sweep over an already recognized corpus.
SweepResult threshold_sweep(const Corpus& corpus, const Corpus& recognized,
                            std::span<const std::size_t> thresholds,
                            std::span<const IdentityId> targets,
                            std::optional<std::size_t> max_layers = {});

/// One network per target, de-duplicated by member set, ordered by size
/// (largest first) then by smallest member id.
std::vector<CommunityGraph> enumerate_communities(
    const Corpus& corpus, const BuildParams& params,
    std::span<const IdentityId> targets);

/// m / (n(n-1)/2). Throws Error(undefined_density) when n < 2.
double density(std::size_t nodes, std::size_t edges);
double density(const CommunityGraph& graph);

struct CommunityRecord {
  std::set<IdentityId> members;
  std::size_t size = 0;
  std::size_t edges = 0;
  std::optional<double> density;  // absent for single-node communities
};

struct CommunityStats {
  std::map<std::size_t, std::size_t> size_histogram;
  std::map<std::size_t, double> density_by_size;  // mean per size, n >= 2
  std::vector<CommunityRecord> communities;
};

CommunityStats community_stats(std::span<const CommunityGraph> communities);

struct Summary {
  double min = 0;
  double max = 0;
  double mean = 0;
  std::size_t count = 0;
};

/// min/max/mean of any real-valued table; nullopt when empty.
std::optional<Summary> summarize(std::span<const double> values);

// CSV artifacts.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);
SweepResult read_sweep_csv(std::istream& in);
/// Rows: one "target" row per target, then "micro" and "macro".
void write_eval_csv(std::ostream& out, const AggregateEval& eval);
AggregateEval read_eval_csv(std::istream& in);
void write_histogram_csv(std::ostream& out, const CommunityStats& stats);
void write_density_csv(std::ostream& out, const CommunityStats& stats);
/// Members follow the fixed columns, one field each.
void write_communities_csv(std::ostream& out, const CommunityStats& stats);
std::vector<CommunityRecord> read_communities_csv(std::istream& in);
void write_summary_csv(std::ostream& out,
                       const std::vector<std::pair<std::string, Summary>>& tables);
std::vector<std::pair<std::string, Summary>> read_summary_csv(std::istream& in);
std::map<std::size_t, std::size_t> read_histogram_csv(std::istream& in);
std::map<std::size_t, double> read_density_csv(std::istream& in);

}  // namespace photonet
