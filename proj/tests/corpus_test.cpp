#include <doctest.h>

#include <sstream>

#include "photonet/corpus.hpp"
#include "photonet/errors.hpp"
#include "photonet/rng.hpp"
#include "support/fixtures.hpp"

using namespace photonet;
using photonet::testing::id;

namespace {

IngestResult parse_tsv(const std::string& text) {
  std::istringstream in(text);
  return parse_annotations(in, AnnotationFormat::generic_tsv);
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("two-row TSV yields one photo and two instances") {
  auto r = parse_tsv("photo_id\tidentity\np1\tA\np1\tB\n");
  const Corpus& c = r.corpus;
  CHECK(c.size() == 2);
  CHECK(c.photos().size() == 1);
  CHECK(c.photos_of(id("A"), LabelSource::true_labels) ==
        std::set<PhotoId>{PhotoId("p1")});
  CHECK(c.photos_of(id("B"), LabelSource::true_labels) ==
        std::set<PhotoId>{PhotoId("p1")});
  CHECK(c.instances()[0].face_index == 0);
  CHECK(c.instances()[1].face_index == 1);
  CHECK(r.collapsed_duplicates == 0);
}

TEST_CASE("empty stream gives an empty corpus") {
  auto r = parse_tsv("");
  CHECK(r.corpus.empty());
  CHECK(parse_tsv("# only a comment\n\n").corpus.empty());
}

TEST_CASE("optional columns default to usable and unassigned") {
  auto r = parse_tsv("photo_id\tidentity\talbum\tx\ty\tw\th\tquality\tsplit\n"
                     "p1\tA\talb\t1\t2\t30\t40\trejected\ttest\n"
                     "p2\tB\t\t\t\t\t\t\t\n");
  const auto& f = r.corpus.instances();
  REQUIRE(f.size() == 2);
  // Canonical order sorts by photo name first.
  CHECK(f[0].photo == PhotoId("p1", "alb"));
  CHECK(f[0].bbox == BoundingBox{1, 2, 30, 40});
  CHECK(f[0].quality == Quality::rejected);
  CHECK(f[0].split == Split::test);
  CHECK(f[1].quality == Quality::usable);
  CHECK(f[1].split == Split::unassigned);
  CHECK_FALSE(f[1].bbox.has_value());
}

TEST_CASE("duplicate (photo, identity) rows collapse with a count") {
  auto r = parse_tsv("photo_id\tidentity\np1\tA\np1\tA\np1\tB\np1\tA\n");
  CHECK(r.corpus.size() == 2);
  CHECK(r.collapsed_duplicates == 2);
}

TEST_CASE("malformed rows report their line number") {
  try {
    parse_tsv("photo_id\tidentity\tquality\np1\tA\tusable\n# c\np2\tB\tshiny\n");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parse);
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  CHECK(kind_of([] { parse_tsv("photo_id\tidentity\np1\tA\textra\n"); }) ==
        ErrorKind::parse);
  CHECK(kind_of([] { parse_tsv("photo\tidentity\n"); }) == ErrorKind::parse);
  CHECK(kind_of([] { parse_tsv("photo_id\tidentity\tx\np1\tA\t3\n"); }) ==
        ErrorKind::parse);
  CHECK(kind_of([] {
          parse_tsv("photo_id\tidentity\tx\ty\tw\th\np1\tA\t0\t0\t0\t5\n");
        }) == ErrorKind::parse);
}

TEST_CASE("duplicate face_index within a photo is a structural error") {
  CHECK(kind_of([] {
          parse_tsv("photo_id\tidentity\tface_index\np1\tA\t0\np1\tB\t0\n");
        }) == ErrorKind::structural);
}

TEST_CASE("PIPA index rows map subsets onto splits") {
  std::istringstream in(
      "12 345 10 20 30 40 7 1\n"
      "12 345 50 20 30 40 8 2\n"
      "12 346 10 20 30 40 7 3\n"
      "13 999 10 20 30 40 9 0\n");
  auto r = parse_annotations(in, AnnotationFormat::pipa_index);
  const auto& f = r.corpus.instances();
  REQUIRE(f.size() == 4);
  CHECK(f[0].photo == PhotoId("345", "12"));
  CHECK(f[0].face_index == 0);
  CHECK(f[1].face_index == 1);
  CHECK(f[0].split == Split::train);
  CHECK(f[1].split == Split::train);  // val folds into train
  CHECK(f[2].split == Split::test);
  CHECK(f[3].split == Split::unassigned);
  CHECK(r.corpus.identities(LabelSource::true_labels).size() == 3);

  std::istringstream bad("12 345 10 20 30 40 7\n");
  CHECK(kind_of([&] { parse_annotations(bad, AnnotationFormat::pipa_index); }) ==
        ErrorKind::parse);
}

TEST_CASE("serialize then parse reproduces the corpus") {
  Rng rng(7);
  for (int round = 0; round < 50; ++round) {
    std::vector<FaceInstance> faces;
    const auto photos = photonet::testing::random_photos(rng, 12, 20);
    for (const auto& [photo, ids] : photos) {
      std::optional<std::string> album;
      if (rng.bernoulli(0.3)) album = "alb" + std::to_string(rng.below(3));
      for (std::size_t i = 0; i < ids.size(); ++i) {
        FaceInstance f{PhotoId(photo, album), static_cast<std::uint32_t>(i * 2 + 1)};
        f.true_identity = IdentityId(ids[i]);
        if (rng.bernoulli(0.5)) f.predicted_identity = IdentityId("q" + ids[i]);
        if (rng.bernoulli(0.4)) {
          f.bbox = BoundingBox{rng.uniform() * 100, 0.1, 1.0 / 3.0, 7.25};
        }
        if (rng.bernoulli(0.2)) f.quality = Quality::rejected;
        f.split = static_cast<Split>(rng.below(3));
        faces.push_back(std::move(f));
      }
    }
    const Corpus original(std::move(faces));
    std::ostringstream out;
    write_corpus(out, original);
    const auto back = parse_tsv(out.str());
    CHECK(back.corpus == original);
    CHECK(back.collapsed_duplicates == 0);
    std::ostringstream again;
    write_corpus(again, back.corpus);
    CHECK(again.str() == out.str());
  }
}

TEST_CASE("corpus rejects structural violations") {
  std::vector<FaceInstance> faces;
  faces.emplace_back(PhotoId("p"), 0);
  faces.back().true_identity = id("A");
  faces.emplace_back(PhotoId("p"), 1);
  faces.back().true_identity = id("A");
  CHECK(kind_of([&] { Corpus c(faces); }) == ErrorKind::structural);

  std::vector<FaceInstance> clash;
  clash.emplace_back(PhotoId("x", "a"), 0);
  clash.emplace_back(PhotoId("x", "b"), 0);
  CHECK_NOTHROW(Corpus(clash));  // distinct keys a/x and b/x

  CHECK(kind_of([] { PhotoId("a/b"); }) == ErrorKind::precondition);
  CHECK(kind_of([] { IdentityId(""); }) == ErrorKind::precondition);
}

TEST_CASE("predicted labels may repeat within a photo") {
  std::vector<FaceInstance> faces;
  faces.emplace_back(PhotoId("p"), 0);
  faces.back().true_identity = id("A");
  faces.back().predicted_identity = id("B");
  faces.emplace_back(PhotoId("p"), 1);
  faces.back().true_identity = id("B");
  faces.back().predicted_identity = id("B");
  Corpus c(faces);
  CHECK(c.identities_in(PhotoId("p"), LabelSource::predicted_labels).size() == 1);
  CHECK(c.identities_in(PhotoId("p"), LabelSource::true_labels).size() == 2);
}

TEST_CASE("clean filters rejected instances and is idempotent") {
  auto r = parse_tsv("photo_id\tidentity\tquality\n"
                     "p1\tA\tusable\np1\tB\trejected\np2\tC\tusable\n"
                     "p3\tD\trejected\np4\tA\tusable\n");
  const Corpus cleaned = clean(r.corpus);
  CHECK(cleaned.size() == 3);
  CHECK(cleaned.photos().size() == 3);  // p3 dropped entirely
  CHECK_FALSE(cleaned.knows(id("D"), LabelSource::true_labels));
  CHECK(clean(cleaned) == cleaned);

  auto all_rejected = parse_tsv("photo_id\tidentity\tquality\np1\tA\trejected\n");
  CHECK(clean(all_rejected.corpus).empty());

  const Corpus untouched = photonet::testing::c0();
  CHECK(clean(untouched) == untouched);
}

TEST_CASE("rejected faces never enter the indices") {
  auto r = parse_tsv("photo_id\tidentity\tquality\np1\tA\tusable\np1\tB\trejected\n");
  CHECK_FALSE(r.corpus.knows(id("B"), LabelSource::true_labels));
  CHECK(r.corpus.identities_in(PhotoId("p1"), LabelSource::true_labels).size() == 1);
}

namespace {

Corpus class_corpus(const std::vector<std::size_t>& sizes) {
  std::vector<FaceInstance> faces;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    for (std::size_t i = 0; i < sizes[c]; ++i) {
      FaceInstance f{PhotoId("c" + std::to_string(c) + "_" + std::to_string(i))};
      f.true_identity = IdentityId("k" + std::to_string(c));
      faces.push_back(std::move(f));
    }
  }
  return Corpus(std::move(faces));
}

std::map<IdentityId, std::size_t> class_counts(const Corpus& c) {
  std::map<IdentityId, std::size_t> out;
  for (const auto& f : c.instances()) ++out[*f.true_identity];
  return out;
}

}  // namespace

TEST_CASE("stratified split per-class counts") {
  auto [train, test] = stratified_split(class_corpus({10, 1, 2, 3}), 0.8, 42);
  auto tr = class_counts(train);
  auto te = class_counts(test);
  CHECK(tr[id("k0")] == 8);
  CHECK(te[id("k0")] == 2);
  CHECK(tr[id("k1")] == 1);
  CHECK(te.count(id("k1")) == 0);
  CHECK(tr[id("k2")] == 2);  // round(1.6)
  CHECK(tr[id("k3")] == 2);  // round(2.4)
  for (const auto& f : train.instances()) CHECK(f.split == Split::train);
  for (const auto& f : test.instances()) CHECK(f.split == Split::test);

  CHECK(stratified_train_count(2, 0.2) == 1);  // floor of one
  CHECK(stratified_train_count(1, 0.2) == 0);
  CHECK(stratified_train_count(0, 0.8) == 0);
}

TEST_CASE("stratified split is deterministic and partitions the input") {
  const Corpus c = class_corpus({9, 4, 7, 1, 13});
  auto a = stratified_split(c, 0.8, 1);
  auto b = stratified_split(c, 0.8, 1);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);

  auto d = stratified_split(c, 0.8, 2);
  CHECK(class_counts(d.first) == class_counts(a.first));
  CHECK_FALSE(d.first == a.first);  // with these sizes some class reshuffles

  std::set<PhotoId> seen;
  for (const auto* part : {&a.first, &a.second}) {
    for (const auto& f : part->instances()) CHECK(seen.insert(f.photo).second);
  }
  CHECK(seen.size() == c.size());
}

TEST_CASE("stratified split preconditions") {
  auto unlabeled = parse_tsv("photo_id\tidentity\np1\t\n").corpus;
  CHECK(kind_of([&] { stratified_split(unlabeled, 0.8, 0); }) == ErrorKind::precondition);
  CHECK(kind_of([] { stratified_split(Corpus{}, 1.0, 0); }) == ErrorKind::precondition);
  CHECK(kind_of([] { stratified_split(Corpus{}, 0.0, 0); }) == ErrorKind::precondition);
}

TEST_CASE("augmentation plan fills classes up to the minimum") {
  const AugPlan plan = augmentation_plan(class_corpus({5, 8, 12, 1}), 8);
  CHECK(plan.counts.at(id("k0")) == 3);
  CHECK(plan.counts.at(id("k1")) == 0);
  CHECK(plan.counts.at(id("k2")) == 0);
  CHECK(plan.counts.at(id("k3")) == 7);
  CHECK(plan.total_augmented == 10);
  const auto& tags = plan.transforms.at(id("k0"));
  REQUIRE(tags.size() == 3);
  CHECK(tags[0] == AugTransform::rotate);
  CHECK(tags[1] == AugTransform::flip);
  CHECK(tags[2] == AugTransform::scale);

  std::ostringstream out;
  write_augmentation_plan(out, plan);
  std::istringstream in(out.str());
  const AugPlan back = read_augmentation_plan(in);
  CHECK(back.counts == plan.counts);
  CHECK(back.transforms == plan.transforms);
  CHECK(back.total_augmented == plan.total_augmented);

  CHECK(kind_of([] { augmentation_plan(Corpus{}, 0); }) == ErrorKind::precondition);
}
