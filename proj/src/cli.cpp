#include "photonet/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "photonet/corpus.hpp"
#include "photonet/errors.hpp"
#include "photonet/evalstats.hpp"
#include "photonet/netbuild.hpp"
#include "photonet/ranking.hpp"
#include "photonet/recognition.hpp"
#include "photonet/synthgen.hpp"
#include "text_util.hpp"

namespace fs = std::filesystem;

namespace photonet {

namespace {

enum class ExportFormat { json, dot, csv };

struct RunConfig {
  fs::path corpus_path;
  AnnotationFormat format = AnnotationFormat::generic_tsv;
  RecognizerConfig recognizer;
  BuildParams build;
  double log_base = kDefaultLogBase;
  fs::path out_dir = ".";
  std::set<ExportFormat> exports{ExportFormat::json};
};

[[noreturn]] void usage(const std::string& what) {
  throw Error(ErrorKind::usage, what);
}

/// Option values of one invocation: command-line flags first, then any keys
/// of the --config file that the flags did not set.
class Options {
 public:
  void bind(CLI::App* cmd, const std::string& name, const std::string& help) {
    accepted_.insert(name);
    opts_[name] = cmd->add_option("--" + name, values_[name], help);
  }
  void bind_flag(CLI::App* cmd, const std::string& name, const std::string& help) {
    accepted_.insert(name);
    flags_.insert(name);
    opts_[name] = cmd->add_flag("--" + name, help);
  }

  void finalize(const std::optional<fs::path>& config_file) {
    for (const auto& [name, opt] : opts_) {
      if (opt->count() == 0) continue;
      given_[name] = flags_.contains(name) ? "true" : values_[name];
    }
    if (!config_file) return;
    std::ifstream in(*config_file);
    if (!in) throw Error(ErrorKind::io, "cannot open config file " + config_file->string());
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
      ++line;
      auto text = text::trim(text::strip_cr(raw));
      if (text.empty() || text.front() == '#') continue;
      auto eq = text.find('=');
      if (eq == std::string_view::npos) {
        usage(config_file->string() + ":" + std::to_string(line) +
              ": expected key=value");
      }
      std::string key(text::trim(text.substr(0, eq)));
      std::string value(text::trim(text.substr(eq + 1)));
      if (!known_keys().contains(key)) {
        usage(config_file->string() + ":" + std::to_string(line) +
              ": unknown key '" + key + "'");
      }
      // Keys for other subcommands are allowed so one file can serve a run.
      if (accepted_.contains(key)) given_.try_emplace(key, value);
    }
  }

  bool has(const std::string& name) const { return given_.contains(name); }

  std::optional<std::string> str(const std::string& name) const {
    auto it = given_.find(name);
    if (it == given_.end()) return std::nullopt;
    return it->second;
  }

  bool flag(const std::string& name) const {
    auto v = str(name);
    if (!v) return false;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    usage("--" + name + " expects true or false");
  }

  std::optional<std::uint64_t> uint(const std::string& name) const {
    auto v = str(name);
    if (!v) return std::nullopt;
    auto n = text::parse_uint(*v);
    if (!n) usage("--" + name + " expects a non-negative integer, got '" + *v + "'");
    return n;
  }

  std::optional<double> real(const std::string& name) const {
    auto v = str(name);
    if (!v) return std::nullopt;
    auto d = text::parse_double(*v);
    if (!d) usage("--" + name + " expects a number, got '" + *v + "'");
    return d;
  }

  static const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "corpus", "format", "recognizer", "predictions", "noise-accuracy",
        "seed", "threshold", "max-layers", "log-base", "export", "out",
        "target", "target-face", "targets", "thresholds", "clean",
        "split-frac", "min-per-class", "communities", "min-size", "max-size",
        "min-photos", "max-photos", "min-persons", "max-persons", "solo-rate"};
    return keys;
  }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, CLI::Option*> opts_;
  std::set<std::string> accepted_;
  std::set<std::string> flags_;
  std::map<std::string, std::string> given_;
};

void bind_corpus(Options& o, CLI::App* cmd) {
  o.bind(cmd, "corpus", "Annotation file");
  o.bind(cmd, "format", "generic_tsv (default) or pipa_index");
}

void bind_recognizer(Options& o, CLI::App* cmd) {
  o.bind(cmd, "recognizer", "oracle (default), file or noise");
  o.bind(cmd, "predictions", "Predictions TSV for --recognizer file");
  o.bind(cmd, "noise-accuracy", "Per-face accuracy for --recognizer noise");
  o.bind(cmd, "seed", "Random seed (default 0)");
}

void bind_build(Options& o, CLI::App* cmd) {
  o.bind(cmd, "threshold", "Minimum face frequency; edges need more than this");
  o.bind(cmd, "max-layers", "Stop expanding after this many layers");
}

RunConfig run_config(const Options& o) {
  RunConfig cfg;
  auto corpus = o.str("corpus");
  if (!corpus) usage("--corpus is required");
  cfg.corpus_path = *corpus;
  if (auto f = o.str("format")) cfg.format = parse_annotation_format(*f);

  cfg.recognizer.mode = parse_recognizer_mode(o.str("recognizer").value_or("oracle"));
  if (auto p = o.str("predictions")) cfg.recognizer.predictions_path = *p;
  cfg.recognizer.noise_accuracy = o.real("noise-accuracy");
  cfg.recognizer.seed = o.uint("seed").value_or(0);
  if (cfg.recognizer.mode != RecognizerMode::predictions_file &&
      cfg.recognizer.predictions_path) {
    usage("--predictions only applies to --recognizer file");
  }
  if (cfg.recognizer.mode != RecognizerMode::noise && cfg.recognizer.noise_accuracy) {
    usage("--noise-accuracy only applies to --recognizer noise");
  }
  try {
    cfg.recognizer.validate();
  } catch (const Error& e) {
    usage(e.what());
  }

  cfg.build.threshold = o.uint("threshold").value_or(0);
  if (auto m = o.uint("max-layers")) {
    if (*m == 0) usage("--max-layers must be positive");
    cfg.build.max_layers = *m;
  }
  cfg.build.label_source = LabelSource::predicted_labels;
  if (auto b = o.real("log-base")) {
    try {
      validate_log_base(*b);
    } catch (const Error& e) {
      usage(e.what());
    }
    cfg.log_base = *b;
  }
  if (auto out = o.str("out")) cfg.out_dir = *out;
  if (auto ex = o.str("export")) {
    cfg.exports.clear();
    for (auto name : text::split(*ex, ',')) {
      name = text::trim(name);
      if (name == "json") cfg.exports.insert(ExportFormat::json);
      else if (name == "dot") cfg.exports.insert(ExportFormat::dot);
      else if (name == "csv") cfg.exports.insert(ExportFormat::csv);
      else usage("unknown export format '" + std::string(name) + "'");
    }
  }
  return cfg;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ostringstream buf;
  body(buf);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << buf.str();
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

Corpus load_corpus(const RunConfig& cfg) {
  if (!fs::exists(cfg.corpus_path)) {
    throw Error(ErrorKind::io, "corpus file not found: " + cfg.corpus_path.string());
  }
  return read_annotations(cfg.corpus_path, cfg.format).corpus;
}

std::vector<IdentityId> parse_targets(const Options& o, const Corpus& corpus) {
  std::vector<IdentityId> targets;
  if (auto list = o.str("targets")) {
    for (auto t : text::split(*list, ',')) {
      t = text::trim(t);
      if (t.empty()) usage("--targets contains an empty entry");
      targets.emplace_back(std::string(t));
    }
  } else {
    const auto& ids = corpus.identities(LabelSource::true_labels);
    targets.assign(ids.begin(), ids.end());
  }
  if (targets.empty()) throw Error(ErrorKind::precondition, "no targets to evaluate");
  return targets;
}

std::vector<std::size_t> parse_thresholds(const std::string& arg) {
  std::vector<std::size_t> out;
  if (auto dots = arg.find(".."); dots != std::string::npos) {
    auto lo = text::parse_uint(std::string_view(arg).substr(0, dots));
    auto hi = text::parse_uint(std::string_view(arg).substr(dots + 2));
    if (!lo || !hi || *lo > *hi) usage("bad threshold range '" + arg + "'");
    for (auto t = *lo; t <= *hi; ++t) out.push_back(t);
    return out;
  }
  for (auto part : text::split(arg, ',')) {
    auto t = text::parse_uint(part);
    if (!t) usage("bad threshold '" + std::string(part) + "'");
    if (!out.empty() && *t <= out.back()) usage("thresholds must be strictly increasing");
    out.push_back(*t);
  }
  return out;
}

// ---------------------------------------------------------------- commands

int cmd_ingest(const Options& o, std::ostream& out) {
  auto corpus_path = o.str("corpus");
  if (!corpus_path) usage("--corpus is required");
  const AnnotationFormat format =
      parse_annotation_format(o.str("format").value_or("generic_tsv"));
  const fs::path out_dir = o.str("out").value_or(".");
  if (!fs::exists(*corpus_path)) {
    throw Error(ErrorKind::io, "corpus file not found: " + *corpus_path);
  }
  IngestResult ingest = read_annotations(*corpus_path, format);
  Corpus corpus = o.flag("clean") ? clean(ingest.corpus) : ingest.corpus;
  ensure_dir(out_dir);
  write_file(out_dir / "corpus.tsv", [&](std::ostream& os) { write_corpus(os, corpus); });

  out << "instances\t" << corpus.size() << "\n"
      << "photos\t" << corpus.photos().size() << "\n"
      << "identities\t" << corpus.identities(LabelSource::true_labels).size() << "\n"
      << "collapsed_duplicates\t" << ingest.collapsed_duplicates << "\n";

  const Corpus* plan_source = &corpus;
  std::optional<Corpus> train;
  if (auto frac = o.real("split-frac")) {
    auto [tr, te] = stratified_split(corpus, *frac, o.uint("seed").value_or(0));
    write_file(out_dir / "train.tsv", [&](std::ostream& os) { write_corpus(os, tr); });
    write_file(out_dir / "test.tsv", [&](std::ostream& os) { write_corpus(os, te); });
    out << "train\t" << tr.size() << "\n" << "test\t" << te.size() << "\n";
    train = std::move(tr);
    plan_source = &*train;
  }
  if (auto min = o.uint("min-per-class")) {
    if (*min == 0) usage("--min-per-class must be positive");
    AugPlan plan = augmentation_plan(*plan_source, *min);
    write_file(out_dir / "augmentation.tsv",
               [&](std::ostream& os) { write_augmentation_plan(os, plan); });
    out << "augmented\t" << plan.total_augmented << "\n";
  }
  return 0;
}

int cmd_build(const Options& o, std::ostream& out) {
  const RunConfig cfg = run_config(o);
  if (o.has("target") == o.has("target-face")) {
    usage("give exactly one of --target or --target-face");
  }
  const Corpus recognized = recognize(load_corpus(cfg), cfg.recognizer);

  std::optional<IdentityId> target;
  if (auto t = o.str("target")) {
    target = IdentityId(*t);
  } else {
    // photo_key:face_index, resolved through the recognizer.
    const std::string ref = *o.str("target-face");
    auto colon = ref.rfind(':');
    auto index = colon == std::string::npos
                     ? std::nullopt
                     : text::parse_uint(std::string_view(ref).substr(colon + 1));
    if (!index) usage("--target-face expects photo_id:face_index");
    auto photo = recognized.photo_by_key(ref.substr(0, colon));
    const FaceInstance* face =
        photo ? recognized.find(*photo, static_cast<std::uint32_t>(*index)) : nullptr;
    if (!face || !face->predicted_identity) {
      throw Error(ErrorKind::unknown_target, "no recognized face " + ref);
    }
    target = *face->predicted_identity;
  }

  CommunityGraph graph = build_network(recognized, *target, cfg.build);
  const GroupPhotoSet groups = group_photos(recognized, cfg.build.label_source);
  if (!groups.empty()) {
    const PhotoScoreTable scores =
        photo_scores(groups, idf_table(groups, cfg.log_base));
    graph = relationship_strengths(std::move(graph), scores);
  }

  ensure_dir(cfg.out_dir);
  if (cfg.exports.contains(ExportFormat::json)) {
    write_graph_json(cfg.out_dir / "network.json", graph);
  }
  if (cfg.exports.contains(ExportFormat::dot)) {
    write_file(cfg.out_dir / "network.dot", [&](std::ostream& os) { write_dot(os, graph); });
  }
  if (cfg.exports.contains(ExportFormat::csv)) {
    write_file(cfg.out_dir / "network_edges.csv",
               [&](std::ostream& os) { write_edges_csv(os, graph); });
  }
  out << "root\t" << graph.root << "\n"
      << "members\t" << graph.size() << "\n"
      << "edges\t" << graph.edges.size() << "\n"
      << "layers\t" << graph.depth() + 1 << "\n";
  return 0;
}

int cmd_rank(const Options& o, std::ostream& out) {
  const RunConfig cfg = run_config(o);
  const Corpus recognized = recognize(load_corpus(cfg), cfg.recognizer);
  const GroupPhotoSet groups = group_photos(recognized, cfg.build.label_source);
  const IdfTable idf = idf_table(groups, cfg.log_base);
  const PhotoScoreTable scores = photo_scores(groups, idf);

  ensure_dir(cfg.out_dir);
  write_file(cfg.out_dir / "idf.tsv", [&](std::ostream& os) { write_idf_table(os, idf); });
  write_file(cfg.out_dir / "photo_scores.tsv",
             [&](std::ostream& os) { write_photo_scores(os, scores); });

  std::vector<double> idf_values;
  for (const auto& [id, v] : idf.idf) idf_values.push_back(v);
  std::vector<double> score_values;
  for (const auto& [p, v] : scores.score) score_values.push_back(v);
  write_file(cfg.out_dir / "rank_summary.csv", [&](std::ostream& os) {
    write_summary_csv(os, {{"idf", *summarize(idf_values)},
                           {"photo_score", *summarize(score_values)}});
  });
  out << "group_photos\t" << groups.size() << "\n"
      << "identities\t" << idf.idf.size() << "\n";
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const RunConfig cfg = run_config(o);
  const Corpus corpus = load_corpus(cfg);
  const Corpus recognized = recognize(corpus, cfg.recognizer);
  const auto targets = parse_targets(o, corpus);
  const AggregateEval eval = evaluate_targets(corpus, recognized, targets, cfg.build);

  ensure_dir(cfg.out_dir);
  write_file(cfg.out_dir / "eval.csv", [&](std::ostream& os) { write_eval_csv(os, eval); });

  const auto preds = predictions_of(recognized);
  out << "precision,recall\n"
      << text::format_fixed(eval.micro.precision(), 4) << ','
      << text::format_fixed(eval.micro.recall(), 4) << "\n";
  if (!preds.empty()) {
    out << "top1_error\t" << text::format_fixed(top1_error(preds, corpus), 4) << "\n";
  }
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const RunConfig cfg = run_config(o);
  if (o.has("threshold")) usage("sweep takes --thresholds, not --threshold");
  const Corpus corpus = load_corpus(cfg);
  const auto targets = parse_targets(o, corpus);
  const auto thresholds = parse_thresholds(o.str("thresholds").value_or("0..5"));
  const SweepResult sweep = threshold_sweep(corpus, cfg.recognizer, thresholds,
                                            targets, cfg.build.max_layers);
  ensure_dir(cfg.out_dir);
  write_file(cfg.out_dir / "sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, sweep); });
  write_sweep_csv(out, sweep);
  return 0;
}

int cmd_stats(const Options& o, std::ostream& out) {
  const RunConfig cfg = run_config(o);
  const Corpus corpus = load_corpus(cfg);
  const Corpus recognized = recognize(corpus, cfg.recognizer);
  std::vector<IdentityId> targets;
  if (o.has("targets")) {
    targets = parse_targets(o, corpus);
  } else {
    const auto& ids = recognized.identities(cfg.build.label_source);
    targets.assign(ids.begin(), ids.end());
  }
  const auto communities = enumerate_communities(recognized, cfg.build, targets);
  const CommunityStats stats = community_stats(communities);

  ensure_dir(cfg.out_dir);
  write_file(cfg.out_dir / "size_histogram.csv",
             [&](std::ostream& os) { write_histogram_csv(os, stats); });
  write_file(cfg.out_dir / "density_by_size.csv",
             [&](std::ostream& os) { write_density_csv(os, stats); });
  write_file(cfg.out_dir / "communities.csv",
             [&](std::ostream& os) { write_communities_csv(os, stats); });
  out << "communities\t" << communities.size() << "\n";
  write_histogram_csv(out, stats);
  return 0;
}

int cmd_synth(const Options& o, std::ostream& out) {
  SynthParams p;
  p.n_communities = o.uint("communities").value_or(p.n_communities);
  p.sizes.min = o.uint("min-size").value_or(p.sizes.min);
  p.sizes.max = o.uint("max-size").value_or(p.sizes.max);
  p.photos_per_community.min = o.uint("min-photos").value_or(p.photos_per_community.min);
  p.photos_per_community.max = o.uint("max-photos").value_or(p.photos_per_community.max);
  p.persons_per_photo.min = o.uint("min-persons").value_or(p.persons_per_photo.min);
  p.persons_per_photo.max = o.uint("max-persons").value_or(p.persons_per_photo.max);
  p.solo_photo_rate = o.real("solo-rate").value_or(p.solo_photo_rate);
  p.seed = o.uint("seed").value_or(0);
  try {
    p.validate();
  } catch (const Error& e) {
    usage(e.what());
  }
  const SynthCorpus synth = generate(p);
  const fs::path out_dir = o.str("out").value_or(".");
  ensure_dir(out_dir);
  write_file(out_dir / "corpus.tsv", [&](std::ostream& os) { write_corpus(os, synth.corpus); });
  write_file(out_dir / "planted.tsv",
             [&](std::ostream& os) { write_planted(os, synth.planted); });
  out << "instances\t" << synth.corpus.size() << "\n"
      << "photos\t" << synth.corpus.photos().size() << "\n"
      << "identities\t" << synth.planted.size() << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Target-centred community networks from photo co-occurrence",
               "photonet"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_file;
  app.add_option("--config", config_file,
                 "Flat key=value file; command-line flags take precedence");

  struct Command {
    Options options;
    std::function<int(const Options&, std::ostream&)> handler;
  };
  // Node-based so bound option storage never moves.
  std::map<CLI::App*, Command> commands;
  auto add = [&](const char* name, const char* help, auto handler) -> std::pair<CLI::App*, Options&> {
    auto* cmd = app.add_subcommand(name, help);
    auto& c = commands[cmd];
    c.handler = handler;
    return {cmd, c.options};
  };

  {
    auto [cmd, o] = add("ingest", "Parse, clean, split and plan augmentation", cmd_ingest);
    bind_corpus(o, cmd);
    o.bind(cmd, "out", "Output directory");
    o.bind(cmd, "seed", "Split seed");
    o.bind_flag(cmd, "clean", "Drop rejected instances");
    o.bind(cmd, "split-frac", "Stratified train fraction, e.g. 0.8");
    o.bind(cmd, "min-per-class", "Plan augmentation up to this many instances");
  }
  {
    auto [cmd, o] = add("build", "Build one target's community network", cmd_build);
    bind_corpus(o, cmd);
    bind_recognizer(o, cmd);
    bind_build(o, cmd);
    o.bind(cmd, "target", "Target identity");
    o.bind(cmd, "target-face", "Target face as photo_id:face_index");
    o.bind(cmd, "log-base", "Logarithm base for IDF (default 10)");
    o.bind(cmd, "export", "Comma list of json, dot, csv (default json)");
    o.bind(cmd, "out", "Output directory");
  }
  {
    auto [cmd, o] = add("rank", "Export IDF and photo score tables", cmd_rank);
    bind_corpus(o, cmd);
    bind_recognizer(o, cmd);
    o.bind(cmd, "log-base", "Logarithm base for IDF (default 10)");
    o.bind(cmd, "out", "Output directory");
  }
  {
    auto [cmd, o] = add("eval", "Precision/recall of predicted networks", cmd_eval);
    bind_corpus(o, cmd);
    bind_recognizer(o, cmd);
    bind_build(o, cmd);
    o.bind(cmd, "targets", "Comma list of targets (default: every identity)");
    o.bind(cmd, "out", "Output directory");
  }
  {
    auto [cmd, o] = add("sweep", "Precision/recall across thresholds", cmd_sweep);
    bind_corpus(o, cmd);
    bind_recognizer(o, cmd);
    bind_build(o, cmd);
    o.bind(cmd, "thresholds", "lo..hi or comma list (default 0..5)");
    o.bind(cmd, "targets", "Comma list of targets (default: every identity)");
    o.bind(cmd, "out", "Output directory");
  }
  {
    auto [cmd, o] = add("stats", "Community size and density statistics", cmd_stats);
    bind_corpus(o, cmd);
    bind_recognizer(o, cmd);
    bind_build(o, cmd);
    o.bind(cmd, "targets", "Comma list of roots (default: every identity)");
    o.bind(cmd, "out", "Output directory");
  }
  {
    auto [cmd, o] = add("synth", "Generate a corpus with planted communities", cmd_synth);
    o.bind(cmd, "communities", "Number of planted communities");
    o.bind(cmd, "min-size", "Smallest community");
    o.bind(cmd, "max-size", "Largest community");
    o.bind(cmd, "min-photos", "Fewest group photos per community");
    o.bind(cmd, "max-photos", "Most group photos per community");
    o.bind(cmd, "min-persons", "Fewest persons per group photo");
    o.bind(cmd, "max-persons", "Most persons per group photo");
    o.bind(cmd, "solo-rate", "Chance of a solo photo after each group photo");
    o.bind(cmd, "seed", "Generator seed");
    o.bind(cmd, "out", "Output directory");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code_for(ErrorKind::usage);
  }

  try {
    std::optional<fs::path> config;
    if (!config_file.empty()) config = config_file;
    for (auto& [cmd, c] : commands) {
      if (!cmd->parsed()) continue;
      c.options.finalize(config);
      return c.handler(c.options, out);
    }
    return exit_code_for(ErrorKind::usage);
  } catch (const Error& e) {
    err << "photonet: " << to_string(e.kind()) << " error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

}  // namespace photonet
