#include "naesat/io.hpp"

#include <fstream>
#include <sstream>

namespace naesat {

namespace {

Json edges_to_json(const std::vector<Edge>& edges) {
  Json a = Json::array();
  for (const Edge& e : edges) a.push_back({e.var, e.clause, e.lit});
  return a;
}

std::vector<Edge> edges_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidInput("edges must be an array");
  std::vector<Edge> out;
  out.reserve(j.size());
  for (const Json& e : j) {
    if (!e.is_array() || e.size() != 3) throw InvalidInput("each edge must be [var, clause, lit]");
    out.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>()});
  }
  return out;
}

template <class T>
T field(const Json& j, const char* name) {
  if (!j.contains(name)) throw InvalidInput(std::string("missing field \"") + name + "\"");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidInput(std::string("bad field \"") + name + "\": " + ex.what());
  }
}

}  // namespace

Json instance_to_json(const Instance& inst) {
  Json j;
  j["k"] = inst.params.k;
  j["d"] = inst.params.d;
  j["n"] = inst.params.n;
  j["m"] = inst.params.m;
  j["edges"] = edges_to_json(inst.edges);
  return j;
}

Instance instance_from_json(const Json& j) {
  const ModelParams p = make_params(field<int>(j, "k"), field<long long>(j, "d"), field<long long>(j, "n"));
  if (j.contains("m") && field<long long>(j, "m") != p.m) throw InvalidInput("field \"m\" disagrees with n*d/k");
  try {
    return make_instance(p, edges_from_json(j.at("edges")));
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidInput(std::string("bad edges: ") + ex.what());
  }
}

Json tree_to_json(const BoundaryTree& tree) {
  Json j;
  j["n_vars"] = tree.n_vars;
  j["n_clauses"] = tree.n_clauses;
  j["edges"] = edges_to_json(tree.edges);
  Json b = Json::array();
  for (const auto& [edge, w] : tree.boundary) b.push_back({edge, std::string(1, warning_char(w))});
  j["boundary"] = b;
  return j;
}

BoundaryTree tree_from_json(const Json& j) {
  BoundaryTree t;
  t.n_vars = field<int>(j, "n_vars");
  t.n_clauses = field<int>(j, "n_clauses");
  try {
    t.edges = edges_from_json(j.at("edges"));
    for (const Json& b : j.at("boundary")) {
      const std::string w = b.at(1).get<std::string>();
      if (w != "0" && w != "1") throw InvalidInput("boundary warning must be \"0\" or \"1\"");
      t.boundary.push_back({b.at(0).get<int>(), w == "1" ? Warning::one : Warning::zero});
    }
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidInput(std::string("bad tree JSON: ") + ex.what());
  }
  check_tree(t);
  return t;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
  if (!out) throw InvalidInput("write failed for " + path);
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& ex) {
    throw InvalidInput(path + ": " + ex.what());
  }
}

}  // namespace naesat
