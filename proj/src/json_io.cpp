#include "ucantor/json_io.hpp"

#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace ucantor {

using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error::io("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error::io("read failure on " + path);
  return std::move(ss).str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error::io("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw Error::io("write failure on " + path);
}

WeightedTree tree_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error::parse(std::string("tree document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("root") || !doc.contains("vertices") ||
      !doc["vertices"].is_array())
    throw Error::parse("tree document: expected object with root and vertices");

  const auto& verts = doc["vertices"];
  if (verts.empty()) throw Error::parse("tree document: vertices array is empty");

  std::unordered_map<std::int64_t, VertexId> index;
  index.reserve(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const auto& jv = verts[i];
    if (!jv.is_object() || !jv.contains("id") || !jv["id"].is_number_integer())
      throw Error::parse("tree document: vertex " + std::to_string(i) + " lacks an integer id");
    const std::int64_t id = jv["id"].get<std::int64_t>();
    if (!index.emplace(id, static_cast<VertexId>(i)).second)
      throw Error::parse("tree document: duplicate vertex id " + std::to_string(id));
  }

  WeightedTree t;
  auto& vv = t.vertices();
  vv.resize(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const auto& jv = verts[i];
    Vertex& v = vv[i];
    v.ext_id = jv["id"].get<std::int64_t>();
    if (!jv.contains("weight") || !jv["weight"].is_number())
      throw Error::parse("tree document: vertex " + std::to_string(v.ext_id) + " lacks a numeric weight");
    v.weight = jv["weight"].get<double>();
    if (!jv.contains("parent"))
      throw Error::parse("tree document: vertex " + std::to_string(v.ext_id) + " lacks a parent field");
    if (jv["parent"].is_null()) {
      v.parent = kNoVertex;
    } else if (jv["parent"].is_number_integer()) {
      const auto it = index.find(jv["parent"].get<std::int64_t>());
      if (it == index.end())
        throw Error::parse("tree document: vertex " + std::to_string(v.ext_id) +
                           " references unknown parent id " + jv["parent"].dump());
      v.parent = it->second;
    } else {
      throw Error::parse("tree document: parent must be an integer or null");
    }
    if (jv.contains("children")) {
      if (!jv["children"].is_array())
        throw Error::parse("tree document: children must be an array");
      for (const auto& jc : jv["children"]) {
        if (!jc.is_number_integer())
          throw Error::parse("tree document: child ids must be integers");
        const auto it = index.find(jc.get<std::int64_t>());
        if (it == index.end())
          throw Error::parse("tree document: vertex " + std::to_string(v.ext_id) +
                             " references unknown child id " + jc.dump());
        v.children.push_back(it->second);
      }
    }
  }

  if (!doc["root"].is_number_integer())
    throw Error::parse("tree document: root must be an integer id");
  const auto rit = index.find(doc["root"].get<std::int64_t>());
  if (rit == index.end()) throw Error::parse("tree document: root references an unknown id");
  t.set_root(rit->second);

  // depths for reachable vertices; validate() flags the rest
  std::deque<VertexId> queue{t.root()};
  std::vector<bool> seen(vv.size(), false);
  seen[t.root()] = true;
  vv[t.root()].depth = 0;
  std::uint32_t computed_max = 0;
  while (!queue.empty()) {
    const VertexId x = queue.front();
    queue.pop_front();
    computed_max = std::max(computed_max, vv[x].depth);
    for (VertexId c : vv[x].children) {
      if (!seen[c]) {
        seen[c] = true;
        vv[c].depth = vv[x].depth + 1;
        queue.push_back(c);
      }
    }
  }
  std::uint32_t stored_max = computed_max;
  if (doc.contains("max_depth")) {
    if (!doc["max_depth"].is_number_integer())
      throw Error::parse("tree document: max_depth must be an integer");
    stored_max = doc["max_depth"].get<std::uint32_t>();
  }
  t.set_max_depth(stored_max);

  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (!vv[i].children.empty()) continue;
    const auto& jv = verts[i];
    if (jv.contains("leaf")) {
      const std::string kind = jv["leaf"].get<std::string>();
      if (kind == "frontier") {
        t.set_leaf_kind(static_cast<VertexId>(i), LeafKind::frontier);
      } else if (kind == "dangling") {
        t.set_leaf_kind(static_cast<VertexId>(i), LeafKind::dangling);
      } else {
        throw Error::parse("tree document: leaf must be \"frontier\" or \"dangling\"");
      }
    } else {
      vv[i].leaf = (vv[i].depth == stored_max && seen[i]) ? LeafKind::frontier : LeafKind::dangling;
    }
  }
  return t;
}

std::string tree_to_json_text(const WeightedTree& t) {
  if (t.empty() || t.root() == kNoVertex) throw Error::invalid("save: empty tree");
  std::ostringstream out;
  out << "{\n";
  out << "  \"root\": " << t.at(t.root()).ext_id << ",\n";
  out << "  \"max_depth\": " << t.max_depth() << ",\n";
  out << "  \"vertices\": [\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Vertex& v = t.at(static_cast<VertexId>(i));
    out << "    {\"id\": " << v.ext_id << ", \"parent\": ";
    if (v.parent == kNoVertex) {
      out << "null";
    } else {
      out << t.at(v.parent).ext_id;
    }
    out << ", \"weight\": " << format_double(v.weight) << ", \"children\": [";
    for (std::size_t k = 0; k < v.children.size(); ++k) {
      if (k) out << ", ";
      out << t.at(v.children[k]).ext_id;
    }
    out << "]";
    if (v.children.empty()) {
      const LeafKind inferred =
          (v.depth == t.max_depth()) ? LeafKind::frontier : LeafKind::dangling;
      if (v.leaf != inferred)
        out << ", \"leaf\": \"" << (v.leaf == LeafKind::frontier ? "frontier" : "dangling") << "\"";
    }
    out << "}";
    if (i + 1 < t.size()) out << ",";
    out << "\n";
  }
  out << "  ]\n";
  out << "}\n";
  return std::move(out).str();
}

WeightedTree load_tree(const std::string& path) { return tree_from_json_text(read_file(path)); }

void save_tree(const WeightedTree& t, const std::string& path) {
  write_file(path, tree_to_json_text(t));
}

}  // namespace ucantor
