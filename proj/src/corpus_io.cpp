#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "photonet/corpus.hpp"
#include "photonet/errors.hpp"
#include "text_util.hpp"

namespace photonet {

namespace {

enum class Column {
  photo_id, identity, album, face_index, x, y, w, h, quality, split, predicted
};

std::optional<Column> column_named(std::string_view name) {
  static const std::pair<std::string_view, Column> kColumns[] = {
      {"photo_id", Column::photo_id}, {"identity", Column::identity},
      {"album", Column::album},       {"face_index", Column::face_index},
      {"x", Column::x},               {"y", Column::y},
      {"w", Column::w},               {"h", Column::h},
      {"quality", Column::quality},   {"split", Column::split},
      {"predicted", Column::predicted}};
  for (const auto& [n, c] : kColumns) {
    if (n == name) return c;
  }
  return std::nullopt;
}

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what);
}

Quality parse_quality(std::string_view s, std::size_t line) {
  if (s.empty() || s == "usable") return Quality::usable;
  if (s == "rejected") return Quality::rejected;
  fail_at(line, "unknown quality '" + std::string(s) + "'");
}

Split parse_split(std::string_view s, std::size_t line) {
  if (s.empty() || s == "unassigned") return Split::unassigned;
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  fail_at(line, "unknown split '" + std::string(s) + "'");
}

Split pipa_subset(std::string_view s, std::size_t line) {
  if (s == "1" || s == "train" || s == "2" || s == "val") return Split::train;
  if (s == "3" || s == "test") return Split::test;
  if (s == "0" || s == "leftover") return Split::unassigned;
  fail_at(line, "unknown PIPA subset '" + std::string(s) + "'");
}

double number_at(std::string_view s, std::size_t line, const char* what) {
  auto v = text::parse_double(s);
  if (!v) fail_at(line, std::string("bad ") + what + " '" + std::string(s) + "'");
  return *v;
}

/// Accumulates rows, assigning face indices and collapsing repeated
/// (photo, identity) pairs.
class Collector {
 public:
  void add(FaceInstance f, bool explicit_index, std::size_t line) {
    auto& state = photos_[f.photo.key()];
    if (f.true_identity && !state.identities.insert(*f.true_identity).second) {
      ++collapsed_;
      return;
    }
    if (!explicit_index) f.face_index = state.next_index;
    if (!state.indices.insert(f.face_index).second) {
      throw Error(ErrorKind::structural,
                  "line " + std::to_string(line) + ": duplicate face_index " +
                      std::to_string(f.face_index) + " in photo " +
                      f.photo.key());
    }
    state.next_index = std::max(state.next_index, f.face_index + 1);
    rows_.push_back(std::move(f));
  }

  IngestResult finish() {
    return IngestResult{Corpus(std::move(rows_)), collapsed_};
  }

 private:
  struct PhotoState {
    std::set<IdentityId> identities;
    std::set<std::uint32_t> indices;
    std::uint32_t next_index = 0;
  };
  std::map<std::string, PhotoState> photos_;
  std::vector<FaceInstance> rows_;
  std::size_t collapsed_ = 0;
};

IngestResult parse_generic_tsv(std::istream& in) {
  Collector rows;
  std::vector<Column> header;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = text::strip_cr(raw);
    if (text.empty() || text.front() == '#') continue;
    auto fields = text::split(text, '\t');
    if (header.empty()) {
      for (auto name : fields) {
        auto c = column_named(text::trim(name));
        if (!c) fail_at(line, "unknown column '" + std::string(name) + "'");
        header.push_back(*c);
      }
      auto has = [&](Column c) {
        return std::find(header.begin(), header.end(), c) != header.end();
      };
      if (!has(Column::photo_id) || !has(Column::identity)) {
        fail_at(line, "header must name photo_id and identity columns");
      }
      continue;
    }
    if (fields.size() > header.size()) {
      fail_at(line, "expected at most " + std::to_string(header.size()) +
                        " fields, found " + std::to_string(fields.size()));
    }
    std::map<Column, std::string_view> row;
    for (std::size_t i = 0; i < fields.size(); ++i) row[header[i]] = fields[i];
    auto get = [&](Column c) -> std::string_view {
      auto it = row.find(c);
      return it == row.end() ? std::string_view{} : it->second;
    };

    auto photo = get(Column::photo_id);
    if (photo.empty()) fail_at(line, "empty photo_id");
    std::optional<std::string> album;
    if (!get(Column::album).empty()) album = std::string(get(Column::album));

    try {
      FaceInstance f{PhotoId(std::string(photo), album)};
      if (auto id = get(Column::identity); !id.empty()) {
        f.true_identity = IdentityId(std::string(id));
      }
      if (auto id = get(Column::predicted); !id.empty()) {
        f.predicted_identity = IdentityId(std::string(id));
      }
      const std::string_view box[] = {get(Column::x), get(Column::y),
                                      get(Column::w), get(Column::h)};
      const auto given = std::count_if(std::begin(box), std::end(box),
                                        [](auto s) { return !s.empty(); });
      if (given == 4) {
        f.bbox = BoundingBox{number_at(box[0], line, "x"),
                             number_at(box[1], line, "y"),
                             number_at(box[2], line, "w"),
                             number_at(box[3], line, "h")};
        if (!(f.bbox->w > 0 && f.bbox->h > 0)) {
          fail_at(line, "bounding box width and height must be positive");
        }
      } else if (given != 0) {
        fail_at(line, "bounding box needs all of x, y, w, h");
      }
      f.quality = parse_quality(get(Column::quality), line);
      f.split = parse_split(get(Column::split), line);
      bool explicit_index = false;
      if (auto idx = get(Column::face_index); !idx.empty()) {
        auto v = text::parse_uint(idx);
        if (!v || *v > UINT32_MAX) {
          fail_at(line, "bad face_index '" + std::string(idx) + "'");
        }
        f.face_index = static_cast<std::uint32_t>(*v);
        explicit_index = true;
      }
      rows.add(std::move(f), explicit_index, line);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::precondition) throw;
      fail_at(line, e.what());
    }
  }
  return rows.finish();
}

IngestResult parse_pipa_index(std::istream& in) {
  Collector rows;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = text::trim(text::strip_cr(raw));
    if (text.empty() || text.front() == '#') continue;
    auto cols = text::split_ws(text);
    if (cols.size() != 8) {
      fail_at(line, "expected 8 columns (photoset_id photo_id xmin ymin "
                    "width height identity_id subset_id), found " +
                        std::to_string(cols.size()));
    }
    try {
      FaceInstance f{PhotoId(std::string(cols[1]), std::string(cols[0]))};
      f.bbox = BoundingBox{number_at(cols[2], line, "xmin"),
                           number_at(cols[3], line, "ymin"),
                           number_at(cols[4], line, "width"),
                           number_at(cols[5], line, "height")};
      if (!(f.bbox->w > 0 && f.bbox->h > 0)) {
        fail_at(line, "bounding box width and height must be positive");
      }
      f.true_identity = IdentityId(std::string(cols[6]));
      f.split = pipa_subset(cols[7], line);
      rows.add(std::move(f), false, line);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::precondition) throw;
      fail_at(line, e.what());
    }
  }
  return rows.finish();
}

}  // namespace

AnnotationFormat parse_annotation_format(const std::string& name) {
  if (name == "generic_tsv" || name == "tsv") return AnnotationFormat::generic_tsv;
  if (name == "pipa_index" || name == "pipa") return AnnotationFormat::pipa_index;
  throw Error(ErrorKind::usage, "unknown corpus format '" + name +
                                    "' (expected generic_tsv or pipa_index)");
}

IngestResult parse_annotations(std::istream& in, AnnotationFormat format) {
  return format == AnnotationFormat::generic_tsv ? parse_generic_tsv(in)
                                                 : parse_pipa_index(in);
}

IngestResult read_annotations(const std::filesystem::path& path,
                              AnnotationFormat format) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::io, "cannot open corpus file " + path.string());
  }
  try {
    return parse_annotations(in, format);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  out << "photo_id\tidentity\talbum\tface_index\tx\ty\tw\th\tquality\tsplit"
         "\tpredicted\n";
  for (const FaceInstance& f : corpus.instances()) {
    out << f.photo.photo() << '\t'
        << (f.true_identity ? f.true_identity->str() : "") << '\t'
        << f.photo.album().value_or("") << '\t' << f.face_index << '\t';
    if (f.bbox) {
      out << text::format_double(f.bbox->x) << '\t'
          << text::format_double(f.bbox->y) << '\t'
          << text::format_double(f.bbox->w) << '\t'
          << text::format_double(f.bbox->h) << '\t';
    } else {
      out << "\t\t\t\t";
    }
    out << to_string(f.quality) << '\t' << to_string(f.split) << '\t'
        << (f.predicted_identity ? f.predicted_identity->str() : "") << '\n';
  }
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  write_corpus(out, corpus);
}

void write_augmentation_plan(std::ostream& out, const AugPlan& plan) {
  out << "identity\tcount\ttransforms\n";
  for (const auto& [id, count] : plan.counts) {
    out << id << '\t' << count << '\t';
    const auto& tags = plan.transforms.at(id);
    for (std::size_t i = 0; i < tags.size(); ++i) {
      out << (i ? "," : "") << to_string(tags[i]);
    }
    out << '\n';
  }
}

AugPlan read_augmentation_plan(std::istream& in) {
  AugPlan plan;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = text::strip_cr(raw);
    if (text.empty() || text.front() == '#' || line == 1) continue;
    auto fields = text::split(text, '\t');
    if (fields.size() != 3) fail_at(line, "expected identity, count, transforms");
    auto count = text::parse_uint(fields[1]);
    if (!count) fail_at(line, "bad count");
    IdentityId id{std::string(fields[0])};
    std::vector<AugTransform> tags;
    if (!fields[2].empty()) {
      for (auto tag : text::split(fields[2], ',')) {
        if (tag == "rotate") tags.push_back(AugTransform::rotate);
        else if (tag == "flip") tags.push_back(AugTransform::flip);
        else if (tag == "scale") tags.push_back(AugTransform::scale);
        else fail_at(line, "unknown transform '" + std::string(tag) + "'");
      }
    }
    plan.counts[id] = *count;
    plan.transforms[id] = std::move(tags);
    plan.total_augmented += *count;
  }
  return plan;
}

}  // namespace photonet
