#include <doctest.h>

#include <sstream>

#include "photonet/errors.hpp"
#include "photonet/evalstats.hpp"
#include "photonet/rng.hpp"
#include "support/fixtures.hpp"

using namespace photonet;
using photonet::testing::id;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::io;
}

CommunityGraph star(const std::string& root, std::initializer_list<const char*> others) {
  CommunityGraph g{id(root), {{id(root), 0}}, {}};
  for (const char* o : others) g.layers[id(o)] = 1;
  return g;
}

std::vector<IdentityId> all_ids(const Corpus& c) {
  const auto& s = c.identities(LabelSource::true_labels);
  return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("evaluate_network set arithmetic") {
  const EvalReport r = evaluate_network(star("A", {"B", "C", "X"}), star("A", {"B", "C", "D"}));
  CHECK(r.tp == 2);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.precision() == doctest::Approx(2.0 / 3.0));
  CHECK(r.recall() == doctest::Approx(2.0 / 3.0));

  const EvalReport same = evaluate_network(star("A", {"B"}), star("A", {"B"}));
  CHECK(same.precision() == 1.0);
  CHECK(same.recall() == 1.0);

  const EvalReport empty = evaluate_network(star("A", {}), star("A", {}));
  CHECK(empty.precision() == 1.0);
  CHECK(empty.recall() == 1.0);

  const EvalReport lost = evaluate_network(star("A", {}), star("A", {"B"}));
  CHECK(lost.precision() == 1.0);
  CHECK(lost.recall() == 0.0);

  CHECK(kind_of([] { evaluate_network(star("A", {}), star("B", {})); }) ==
        ErrorKind::comparison);
}

TEST_CASE("oracle sweep is perfect at every threshold") {
  const Corpus c = photonet::testing::c0();
  const std::vector<std::size_t> ts{0, 1, 2, 3};
  const auto targets = all_ids(c);
  const SweepResult s = threshold_sweep(c, RecognizerConfig{}, ts, targets);
  REQUIRE(s.points.size() == 4);
  for (const auto& p : s.points) {
    CHECK(p.precision == 1.0);
    CHECK(p.recall == 1.0);
    CHECK(p.macro_precision == 1.0);
    CHECK(p.macro_recall == 1.0);
  }

  const std::vector<std::size_t> bad{1, 1};
  CHECK_THROWS_AS(threshold_sweep(c, RecognizerConfig{}, bad, targets), Error);
  CHECK_THROWS_AS(threshold_sweep(c, RecognizerConfig{}, ts, std::vector<IdentityId>{}), Error);
}

TEST_CASE("micro and macro aggregation") {
  // A's B face is misread as X in the predicted labels.
  std::vector<FaceInstance> faces;
  auto add = [&](const char* photo, std::uint32_t i, const char* t, const char* p) {
    faces.emplace_back(PhotoId(photo), i);
    faces.back().true_identity = id(t);
    faces.back().predicted_identity = id(p);
  };
  add("p1", 0, "A", "A");
  add("p1", 1, "B", "X");
  add("p2", 0, "A", "A");
  add("p2", 1, "C", "C");
  add("p3", 0, "D", "D");
  add("p3", 1, "E", "E");
  const Corpus c(std::move(faces));
  const std::vector<IdentityId> targets{id("A"), id("B"), id("D")};
  const AggregateEval e = evaluate_targets(c, c, targets, BuildParams{});
  REQUIRE(e.per_target.size() == 3);
  // A: P = {X, C}, T = {B, C}
  CHECK(e.per_target[0].report == EvalReport{1, 1, 1});
  // B never appears in predicted labels: root-only prediction, T = {A, C}.
  CHECK(e.per_target[1].report == EvalReport{0, 0, 2});
  CHECK(e.per_target[2].report == EvalReport{1, 0, 0});
  CHECK(e.micro == EvalReport{2, 1, 3});
  CHECK(e.micro.precision() == doctest::Approx(2.0 / 3.0));
  CHECK(e.micro.recall() == doctest::Approx(2.0 / 5.0));
  CHECK(e.macro_precision == doctest::Approx((0.5 + 1.0 + 1.0) / 3));
  CHECK(e.macro_recall == doctest::Approx((0.5 + 0.0 + 1.0) / 3));

  std::ostringstream out;
  write_eval_csv(out, e);
  CHECK(out.str().rfind("scope,target,tp,fp,fn,precision,recall\n", 0) == 0);
  CHECK(out.str().find("micro,,2,1,3,0.6667,0.4000") != std::string::npos);
  std::istringstream in(out.str());
  const AggregateEval back = read_eval_csv(in);
  REQUIRE(back.per_target.size() == 3);
  CHECK(back.per_target[1].target == id("B"));
  CHECK(back.per_target[1].report == e.per_target[1].report);
  CHECK(back.micro == e.micro);
  CHECK(back.macro_precision == doctest::Approx(e.macro_precision).epsilon(1e-4));
}

TEST_CASE("recall is non-increasing when truth is fixed") {
  // With predicted labels held fixed and the truth network held fixed,
  // raising the threshold only shrinks predicted sets.
  Rng rng(5);
  for (int round = 0; round < 60; ++round) {
    const Corpus base = photonet::testing::make_corpus(
        photonet::testing::random_photos(rng, 12, 40));
    RecognizerConfig cfg;
    cfg.mode = RecognizerMode::noise;
    cfg.noise_accuracy = 0.8;
    cfg.seed = static_cast<std::uint64_t>(round);
    const Corpus rec = recognize(base, cfg);
    for (const auto& target : base.identities(LabelSource::true_labels)) {
      const CommunityGraph truth = build_network(base, target, BuildParams{});
      double prev = 2.0;
      for (std::size_t t = 0; t <= 3; ++t) {
        BuildParams p;
        p.threshold = t;
        p.label_source = LabelSource::predicted_labels;
        CommunityGraph pred = star(target.str(), {});
        if (rec.knows(target, LabelSource::predicted_labels)) {
          pred = build_network(rec, target, p);
        }
        const double r = evaluate_network(pred, truth).recall();
        CHECK(r <= prev);
        prev = r;
      }
    }
  }
}

TEST_CASE("enumerate communities of the micro corpus") {
  const Corpus c = photonet::testing::c0();
  const auto targets = all_ids(c);
  const auto comms = enumerate_communities(c, BuildParams{}, targets);
  REQUIRE(comms.size() == 2);
  CHECK(comms[0].members() == std::set<IdentityId>{id("A"), id("B"), id("C")});
  CHECK(comms[1].members() == std::set<IdentityId>{id("D"), id("E")});

  const CommunityStats st = community_stats(comms);
  CHECK(st.size_histogram == std::map<std::size_t, std::size_t>{{3, 1}, {2, 1}});
  CHECK(st.density_by_size == std::map<std::size_t, double>{{3, 1.0}, {2, 1.0}});

  const Corpus one = photonet::testing::make_corpus({{"p", {"A", "B"}}});
  CHECK(enumerate_communities(one, BuildParams{}, all_ids(one)).size() == 1);

  CHECK(community_stats(std::span<const CommunityGraph>{}).size_histogram.empty());
}

TEST_CASE("raising the threshold splits but never merges communities") {
  Rng rng(31);
  for (int round = 0; round < 80; ++round) {
    const auto photos = photonet::testing::random_photos(rng, 15, 50);
    const Corpus c = photonet::testing::make_corpus(photos);
    const auto targets = all_ids(c);
    for (std::size_t t = 0; t < 3; ++t) {
      BuildParams lo, hi;
      lo.threshold = t;
      hi.threshold = t + 1;
      const auto a = enumerate_communities(c, lo, targets);
      const auto b = enumerate_communities(c, hi, targets);
      for (const auto& fine : b) {
        std::size_t parents = 0;
        const auto fm = fine.members();
        for (const auto& coarse : a) {
          const auto cm = coarse.members();
          if (std::includes(cm.begin(), cm.end(), fm.begin(), fm.end())) ++parents;
        }
        CHECK(parents == 1);
      }
      // Partition of all identities.
      std::size_t total = 0;
      for (const auto& g : a) total += g.size();
      CHECK(total == targets.size());
    }
  }
}

TEST_CASE("community densities") {
  CHECK(density(3, 3) == 1.0);
  CHECK(density(3, 2) == doctest::Approx(2.0 / 3.0));
  CHECK(density(2, 1) == 1.0);
  CHECK(kind_of([] { density(1, 0); }) == ErrorKind::undefined_density);
  CHECK(kind_of([] { density(0, 0); }) == ErrorKind::undefined_density);

  Rng rng(13);
  for (int round = 0; round < 100; ++round) {
    const auto photos = photonet::testing::random_photos(rng, 10, 25);
    const Corpus c = photonet::testing::make_corpus(photos);
    for (const auto& g : enumerate_communities(c, BuildParams{}, all_ids(c))) {
      if (g.size() < 2) continue;
      const double d = density(g);
      CHECK(d > 0.0);
      CHECK(d <= 1.0);
      bool complete = true;
      for (const auto& x : g.members()) {
        for (const auto& y : g.members()) {
          if (x < y && photonet::testing::pair_frequency(photos, x.str(), y.str()) == 0) {
            complete = false;
          }
        }
      }
      CHECK((d == 1.0) == complete);
    }
  }
}

TEST_CASE("summaries") {
  CHECK_FALSE(summarize(std::span<const double>{}).has_value());
  const std::vector<double> v{2.0, 4.0, 9.0};
  const auto s = summarize(v);
  REQUIRE(s.has_value());
  CHECK(s->min == 2.0);
  CHECK(s->max == 9.0);
  CHECK(s->mean == doctest::Approx(5.0));
  CHECK(s->count == 3);
}

TEST_CASE("CSV artifacts round trip") {
  SweepResult sweep;
  sweep.points.push_back({0, 0.75, 0.8, {}, 0, 0});
  sweep.points.push_back({2, 0.7, 0.5, {}, 0, 0});
  std::ostringstream out;
  write_sweep_csv(out, sweep);
  CHECK(out.str() == "threshold,precision,recall\n0,0.7500,0.8000\n2,0.7000,0.5000\n");
  std::istringstream in(out.str());
  const SweepResult back = read_sweep_csv(in);
  REQUIRE(back.points.size() == 2);
  CHECK(back.points[1].threshold == 2);
  CHECK(back.points[1].recall == doctest::Approx(0.5));

  const Corpus c = photonet::testing::c0();
  const auto comms = enumerate_communities(c, BuildParams{}, all_ids(c));
  const CommunityStats st = community_stats(comms);
  std::ostringstream h, d, m;
  write_histogram_csv(h, st);
  write_density_csv(d, st);
  write_communities_csv(m, st);
  std::istringstream hin(h.str()), din(d.str());
  CHECK(read_histogram_csv(hin) == st.size_histogram);
  CHECK(read_density_csv(din) == st.density_by_size);
  CHECK(m.str().find(",A,B,C\n") != std::string::npos);
}

TEST_CASE("CSV fields with separators and quotes survive a round trip") {
  AggregateEval e;
  e.per_target.push_back({id("micro"), EvalReport{1, 2, 3}});
  e.per_target.push_back({id("Smith, \"J\""), EvalReport{4, 0, 1}});
  e.micro = EvalReport{5, 2, 4};
  std::ostringstream out;
  write_eval_csv(out, e);
  std::istringstream in(out.str());
  const AggregateEval back = read_eval_csv(in);
  REQUIRE(back.per_target.size() == 2);
  CHECK(back.per_target[0].target == id("micro"));
  CHECK(back.per_target[1].target == id("Smith, \"J\""));
  CHECK(back.micro == e.micro);

  CommunityStats st;
  st.communities.push_back({{id("a,b"), id("c;d"), id("e")}, 3, 2, 2.0 / 3.0});
  st.communities.push_back({{id("solo")}, 1, 0, std::nullopt});
  std::ostringstream cout_;
  write_communities_csv(cout_, st);
  std::istringstream cin_(cout_.str());
  const auto recs = read_communities_csv(cin_);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].members == st.communities[0].members);
  CHECK(recs[0].edges == 2);
  CHECK(*recs[0].density == doctest::Approx(0.6667));
  CHECK_FALSE(recs[1].density.has_value());

  const std::vector<std::pair<std::string, Summary>> tables{{"idf", {0.1, 0.9, 0.4, 7}}};
  std::ostringstream sout;
  write_summary_csv(sout, tables);
  std::istringstream sin(sout.str());
  const auto sback = read_summary_csv(sin);
  REQUIRE(sback.size() == 1);
  CHECK(sback[0].first == "idf");
  CHECK(sback[0].second.mean == doctest::Approx(0.4));
  CHECK(sback[0].second.count == 7);

  std::istringstream broken("scope,target,tp,fp,fn,precision,recall\ntarget,\"open,1,0,0,1,1\n");
  CHECK(kind_of([&] { read_eval_csv(broken); }) == ErrorKind::parse);
}
