#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "photonet/errors.hpp"
#include "photonet/netbuild.hpp"
#include "text_util.hpp"

namespace photonet {

using nlohmann::ordered_json;

namespace {

std::vector<std::pair<IdentityId, std::size_t>> members_by_layer(
    const CommunityGraph& graph) {
  std::vector<std::pair<IdentityId, std::size_t>> out(graph.layers.begin(),
                                                      graph.layers.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.second < y.second;
  });
  return out;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string graph_to_json(const CommunityGraph& graph) {
  ordered_json j;
  j["root"] = graph.root.str();
  j["members"] = ordered_json::array();
  for (const auto& [id, layer] : members_by_layer(graph)) {
    j["members"].push_back({{"id", id.str()}, {"layer", layer}});
  }
  j["edges"] = ordered_json::array();
  for (const Edge& e : graph.edges) {
    ordered_json photos = ordered_json::array();
    for (const PhotoId& p : e.shared_photos) photos.push_back(p.key());
    ordered_json edge{{"a", e.a.str()},
                      {"b", e.b.str()},
                      {"frequency", e.frequency},
                      {"shared_photos", std::move(photos)}};
    edge["strength"] = e.strength ? ordered_json(*e.strength) : ordered_json();
    j["edges"].push_back(std::move(edge));
  }
  return j.dump(2) + "\n";
}

CommunityGraph graph_from_json(const std::string& json) {
  try {
    const auto j = ordered_json::parse(json);
    CommunityGraph graph{IdentityId(j.at("root").get<std::string>()), {}, {}};
    for (const auto& m : j.at("members")) {
      IdentityId id(m.at("id").get<std::string>());
      if (!graph.layers.emplace(id, m.at("layer").get<std::size_t>()).second) {
        throw Error(ErrorKind::parse, "duplicate member " + id.str());
      }
    }
    if (!graph.contains(graph.root) || graph.layers.at(graph.root) != 0) {
      throw Error(ErrorKind::parse, "root must be a member on layer 0");
    }
    for (const auto& e : j.at("edges")) {
      Edge edge{IdentityId(e.at("a").get<std::string>()),
                IdentityId(e.at("b").get<std::string>()),
                e.at("frequency").get<std::size_t>(),
                {},
                std::nullopt};
      for (const auto& p : e.at("shared_photos")) {
        edge.shared_photos.push_back(PhotoId::from_key(p.get<std::string>()));
      }
      if (e.contains("strength") && !e.at("strength").is_null()) {
        edge.strength = e.at("strength").get<double>();
      }
      if (!(edge.a < edge.b) || !graph.contains(edge.a) ||
          !graph.contains(edge.b)) {
        throw Error(ErrorKind::parse, "edge " + edge.a.str() + "-" +
                                          edge.b.str() +
                                          " must join two members with a < b");
      }
      graph.edges.push_back(std::move(edge));
    }
    std::sort(graph.edges.begin(), graph.edges.end(),
              [](const Edge& x, const Edge& y) {
                return std::tie(x.a, x.b) < std::tie(y.a, y.b);
              });
    return graph;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("graph JSON: ") + e.what());
  }
}

void write_graph_json(const std::filesystem::path& path,
                      const CommunityGraph& graph) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << graph_to_json(graph);
}

CommunityGraph read_graph_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return graph_from_json(buf.str());
}

void write_dot(std::ostream& out, const CommunityGraph& graph) {
  constexpr double kMaxPen = 6.0;
  constexpr double kMinPen = 0.25;
  double max_strength = 0;
  for (const Edge& e : graph.edges) {
    max_strength = std::max(max_strength, e.strength.value_or(0.0));
  }

  out << "graph community {\n";
  out << "  root=" << quoted(graph.root.str()) << ";\n";
  for (const auto& [id, layer] : members_by_layer(graph)) {
    out << "  " << quoted(id.str()) << " [layer=" << layer
        << (id == graph.root ? ", shape=doublecircle" : "") << "];\n";
  }
  for (const Edge& e : graph.edges) {
    out << "  " << quoted(e.a.str()) << " -- " << quoted(e.b.str());
    if (e.strength) {
      const double pen =
          max_strength > 0 ? kMaxPen * *e.strength / max_strength : kMinPen;
      out << " [label=" << quoted(text::format_fixed(*e.strength, 2))
          << ", penwidth=" << text::format_fixed(std::max(pen, kMinPen), 3)
          << "]";
    } else {
      out << " [label=" << quoted(std::to_string(e.frequency)) << "]";
    }
    out << ";\n";
  }
  out << "}\n";
}

void write_edges_csv(std::ostream& out, const CommunityGraph& graph) {
  out << "a,b,frequency,strength,shared_photos\n";
  for (const Edge& e : graph.edges) {
    out << text::csv_field(e.a.str()) << ',' << text::csv_field(e.b.str()) << ','
        << e.frequency << ',' << (e.strength ? text::format_fixed(*e.strength, 6) : "");
    for (const PhotoId& p : e.shared_photos) out << ',' << text::csv_field(p.key());
    out << '\n';
  }
}

std::vector<Edge> read_edges_csv(std::istream& in) {
  std::vector<Edge> edges;
  for (const auto& row : text::csv_rows(in, 4, true)) {
    Edge e{IdentityId(row[0]), IdentityId(row[1]), 0, {}, std::nullopt};
    const auto freq = text::parse_uint(row[2]);
    if (!freq) throw Error(ErrorKind::parse, "bad frequency '" + row[2] + "'");
    e.frequency = *freq;
    if (!row[3].empty()) {
      e.strength = text::parse_double(row[3]);
      if (!e.strength) throw Error(ErrorKind::parse, "bad strength '" + row[3] + "'");
    }
    for (std::size_t i = 4; i < row.size(); ++i) e.shared_photos.push_back(PhotoId::from_key(row[i]));
    if (e.shared_photos.size() != e.frequency) {
      throw Error(ErrorKind::parse, "edge frequency does not match its photo list");
    }
    edges.push_back(std::move(e));
  }
  return edges;
}

}  // namespace photonet
