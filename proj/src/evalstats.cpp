#include "photonet/evalstats.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "photonet/errors.hpp"
#include "text_util.hpp"

namespace photonet {

namespace {

double ratio_or_one(std::size_t num, std::size_t den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double EvalReport::precision() const { return ratio_or_one(tp, tp + fp); }
double EvalReport::recall() const { return ratio_or_one(tp, tp + fn); }

EvalReport& EvalReport::operator+=(const EvalReport& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  return *this;
}

EvalReport evaluate_network(const CommunityGraph& predicted,
                            const CommunityGraph& truth) {
  if (!(predicted.root == truth.root)) {
    throw Error(ErrorKind::comparison, "cannot compare networks rooted at " +
                                           predicted.root.str() + " and " +
                                           truth.root.str());
  }
  EvalReport r;
  for (const auto& [id, layer] : predicted.layers) {
    if (id == predicted.root) continue;
    (truth.contains(id) ? r.tp : r.fp) += 1;
  }
  for (const auto& [id, layer] : truth.layers) {
    if (!(id == truth.root) && !predicted.contains(id)) ++r.fn;
  }
  return r;
}

AggregateEval evaluate_targets(const Corpus& truth, const Corpus& recognized,
                               std::span<const IdentityId> targets,
                               const BuildParams& params) {
  BuildParams true_params = params;
  true_params.label_source = LabelSource::true_labels;
  BuildParams pred_params = params;
  pred_params.label_source = LabelSource::predicted_labels;

  AggregateEval agg;
  double sum_p = 0;
  double sum_r = 0;
  for (const IdentityId& target : targets) {
    const CommunityGraph t = build_network(truth, target, true_params);
    const CommunityGraph p =
        recognized.knows(target, LabelSource::predicted_labels)
            ? build_network(recognized, target, pred_params)
            : CommunityGraph{target, {{target, 0}}, {}};
    EvalReport r = evaluate_network(p, t);
    agg.micro += r;
    sum_p += r.precision();
    sum_r += r.recall();
    agg.per_target.push_back({target, r});
  }
  if (!targets.empty()) {
    agg.macro_precision = sum_p / static_cast<double>(targets.size());
    agg.macro_recall = sum_r / static_cast<double>(targets.size());
  }
  return agg;
}

SweepResult threshold_sweep(const Corpus& corpus, const Corpus& recognized,
                            std::span<const std::size_t> thresholds,
                            std::span<const IdentityId> targets,
                            std::optional<std::size_t> max_layers) {
  if (targets.empty()) {
    throw Error(ErrorKind::precondition, "threshold sweep needs a target");
  }
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (thresholds[i] <= thresholds[i - 1]) {
      throw Error(ErrorKind::precondition,
                  "sweep thresholds must be strictly increasing");
    }
  }
  SweepResult sweep;
  for (std::size_t t : thresholds) {
    const BuildParams params{t, max_layers, LabelSource::true_labels};
    const AggregateEval agg = evaluate_targets(corpus, recognized, targets, params);
    sweep.points.push_back({t, agg.micro.precision(), agg.micro.recall(),
                            agg.micro, agg.macro_precision, agg.macro_recall});
  }
  return sweep;
}

SweepResult threshold_sweep(const Corpus& corpus,
                            const RecognizerConfig& recognizer,
                            std::span<const std::size_t> thresholds,
                            std::span<const IdentityId> targets,
                            std::optional<std::size_t> max_layers) {
  return threshold_sweep(corpus, recognize(corpus, recognizer), thresholds,
                         targets, max_layers);
}

std::vector<CommunityGraph> enumerate_communities(
    const Corpus& corpus, const BuildParams& params,
    std::span<const IdentityId> targets) {
  std::map<std::set<IdentityId>, CommunityGraph> distinct;
  for (const IdentityId& target : targets) {
    CommunityGraph g = build_network(corpus, target, params);
    auto key = g.members();
    distinct.try_emplace(std::move(key), std::move(g));
  }
  std::vector<CommunityGraph> out;
  out.reserve(distinct.size());
  for (auto& [members, g] : distinct) out.push_back(std::move(g));
  // Map order already sorts equal sizes by smallest member id.
  std::stable_sort(out.begin(), out.end(),
                   [](const CommunityGraph& a, const CommunityGraph& b) {
                     return a.size() > b.size();
                   });
  return out;
}

double density(std::size_t nodes, std::size_t edges) {
  if (nodes < 2) {
    throw Error(ErrorKind::undefined_density,
                "density is undefined for fewer than 2 nodes");
  }
  const double n = static_cast<double>(nodes);
  return static_cast<double>(edges) / (n * (n - 1.0) / 2.0);
}

double density(const CommunityGraph& graph) {
  return density(graph.size(), graph.edges.size());
}

CommunityStats community_stats(std::span<const CommunityGraph> communities) {
  CommunityStats stats;
  std::map<std::size_t, std::pair<double, std::size_t>> sums;
  for (const CommunityGraph& g : communities) {
    CommunityRecord rec{g.members(), g.size(), g.edges.size(), std::nullopt};
    ++stats.size_histogram[rec.size];
    if (rec.size >= 2) {
      rec.density = density(g);
      auto& [sum, count] = sums[rec.size];
      sum += *rec.density;
      ++count;
    }
    stats.communities.push_back(std::move(rec));
  }
  for (const auto& [size, acc] : sums) {
    stats.density_by_size[size] = acc.first / static_cast<double>(acc.second);
  }
  return stats;
}

std::optional<Summary> summarize(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  Summary s{values[0], values[0], 0, values.size()};
  double sum = 0;
  for (double v : values) {
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
    sum += v;
  }
  // Clamp so rounding can never push the mean outside [min, max].
  s.mean = std::clamp(sum / static_cast<double>(values.size()), s.min, s.max);
  return s;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "threshold,precision,recall\n";
  for (const SweepPoint& p : sweep.points) {
    out << p.threshold << ',' << text::format_fixed(p.precision, 4) << ','
        << text::format_fixed(p.recall, 4) << '\n';
  }
}

namespace {

template <typename T>
T field_as(std::string_view s) {
  if constexpr (std::is_same_v<T, double>) {
    auto v = text::parse_double(s);
    if (!v) throw Error(ErrorKind::parse, "bad number '" + std::string(s) + "'");
    return *v;
  } else {
    auto v = text::parse_uint(s);
    if (!v) throw Error(ErrorKind::parse, "bad integer '" + std::string(s) + "'");
    return static_cast<T>(*v);
  }
}

}  // namespace

SweepResult read_sweep_csv(std::istream& in) {
  SweepResult sweep;
  for (const auto& row : text::csv_rows(in, 3)) {
    SweepPoint p;
    p.threshold = field_as<std::size_t>(row[0]);
    p.precision = field_as<double>(row[1]);
    p.recall = field_as<double>(row[2]);
    sweep.points.push_back(p);
  }
  return sweep;
}

void write_eval_csv(std::ostream& out, const AggregateEval& eval) {
  out << "scope,target,tp,fp,fn,precision,recall\n";
  auto row = [&](const char* scope, const std::string& target, const EvalReport& r) {
    out << scope << ',' << text::csv_field(target) << ',' << r.tp << ',' << r.fp << ','
        << r.fn << ',' << text::format_fixed(r.precision(), 4) << ','
        << text::format_fixed(r.recall(), 4) << '\n';
  };
  for (const TargetEval& t : eval.per_target) row("target", t.target.str(), t.report);
  row("micro", "", eval.micro);
  out << "macro,,,,," << text::format_fixed(eval.macro_precision, 4) << ','
      << text::format_fixed(eval.macro_recall, 4) << '\n';
}

AggregateEval read_eval_csv(std::istream& in) {
  AggregateEval eval;
  bool micro = false, macro = false;
  for (const auto& row : text::csv_rows(in, 7)) {
    auto report = [&] {
      return EvalReport{field_as<std::size_t>(row[2]), field_as<std::size_t>(row[3]),
                        field_as<std::size_t>(row[4])};
    };
    if (row[0] == "target") {
      eval.per_target.push_back({IdentityId(row[1]), report()});
    } else if (row[0] == "micro") {
      eval.micro = report();
      micro = true;
    } else if (row[0] == "macro") {
      eval.macro_precision = field_as<double>(row[5]);
      eval.macro_recall = field_as<double>(row[6]);
      macro = true;
    } else {
      throw Error(ErrorKind::parse, "unknown eval scope '" + row[0] + "'");
    }
  }
  if (!micro || !macro) throw Error(ErrorKind::parse, "eval CSV lacks micro or macro row");
  return eval;
}

void write_histogram_csv(std::ostream& out, const CommunityStats& stats) {
  out << "size,count\n";
  for (const auto& [size, count] : stats.size_histogram) {
    out << size << ',' << count << '\n';
  }
}

void write_density_csv(std::ostream& out, const CommunityStats& stats) {
  out << "size,average_density\n";
  for (const auto& [size, d] : stats.density_by_size) {
    out << size << ',' << text::format_fixed(d, 4) << '\n';
  }
}

void write_communities_csv(std::ostream& out, const CommunityStats& stats) {
  out << "size,edges,density,members\n";
  for (const CommunityRecord& c : stats.communities) {
    out << c.size << ',' << c.edges << ','
        << (c.density ? text::format_fixed(*c.density, 4) : "");
    for (const IdentityId& id : c.members) out << ',' << text::csv_field(id.str());
    out << '\n';
  }
}

std::vector<CommunityRecord> read_communities_csv(std::istream& in) {
  std::vector<CommunityRecord> out;
  for (const auto& row : text::csv_rows(in, 4, true)) {
    CommunityRecord c;
    c.size = field_as<std::size_t>(row[0]);
    c.edges = field_as<std::size_t>(row[1]);
    if (!row[2].empty()) c.density = field_as<double>(row[2]);
    for (std::size_t i = 3; i < row.size(); ++i) c.members.insert(IdentityId(row[i]));
    if (c.members.size() != c.size) {
      throw Error(ErrorKind::parse, "community size does not match its member list");
    }
    out.push_back(std::move(c));
  }
  return out;
}

void write_summary_csv(std::ostream& out,
                       const std::vector<std::pair<std::string, Summary>>& tables) {
  out << "table,min,max,mean,count\n";
  for (const auto& [name, s] : tables) {
    out << text::csv_field(name) << ',' << text::format_fixed(s.min, 6) << ','
        << text::format_fixed(s.max, 6) << ',' << text::format_fixed(s.mean, 6) << ','
        << s.count << '\n';
  }
}

std::vector<std::pair<std::string, Summary>> read_summary_csv(std::istream& in) {
  std::vector<std::pair<std::string, Summary>> out;
  for (const auto& row : text::csv_rows(in, 5)) {
    out.emplace_back(row[0], Summary{field_as<double>(row[1]), field_as<double>(row[2]),
                                     field_as<double>(row[3]), field_as<std::size_t>(row[4])});
  }
  return out;
}

std::map<std::size_t, std::size_t> read_histogram_csv(std::istream& in) {
  std::map<std::size_t, std::size_t> hist;
  for (const auto& row : text::csv_rows(in, 2)) {
    hist[field_as<std::size_t>(row[0])] = field_as<std::size_t>(row[1]);
  }
  return hist;
}

std::map<std::size_t, double> read_density_csv(std::istream& in) {
  std::map<std::size_t, double> dens;
  for (const auto& row : text::csv_rows(in, 2)) {
    dens[field_as<std::size_t>(row[0])] = field_as<double>(row[1]);
  }
  return dens;
}

}  // namespace photonet
