#include "maxqap/instances.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace maxqap {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument(path + ": " + what);
}

}  // namespace

WeightedGraph WeightedGraph::make(std::vector<std::vector<double>> w, const std::string& path) {
  const int n = static_cast<int>(w.size());
  if (n == 0) fail(path, "empty weight matrix");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(w[i].size()) != n)
      fail(path + "[" + std::to_string(i) + "]", "row length differs from matrix size");
    for (int j = 0; j < n; ++j) {
      const std::string cell = path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      if (!std::isfinite(w[i][j])) fail(cell, "weight is not finite");
      if (w[i][j] < 0.0) fail(cell, "negative weight");
    }
    if (w[i][i] != 0.0) fail(path + "[" + std::to_string(i) + "][" + std::to_string(i) + "]", "nonzero diagonal");
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (w[i][j] != w[j][i])
        fail(path, "asymmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
  return WeightedGraph{n, std::move(w)};
}

int ListInstance::k() const {
  int k = 0;
  for (const auto& l : lists) k = std::max(k, n() - static_cast<int>(l.size()));
  return k;
}

bool ListInstance::admits(int u, int p) const {
  return std::binary_search(lists[u].begin(), lists[u].end(), p);
}

ListInstance ListInstance::make(WeightedGraph g, WeightedGraph h, std::vector<std::vector<int>> lists) {
  if (g.n != h.n) fail("wH", "graph sizes differ");
  const int n = g.n;
  if (static_cast<int>(lists.size()) != n) fail("lists", "need one list per node");
  for (int u = 0; u < n; ++u) {
    const std::string path = "lists[" + std::to_string(u) + "]";
    if (lists[u].empty()) fail(path, "empty list");
    std::sort(lists[u].begin(), lists[u].end());
    for (std::size_t i = 0; i < lists[u].size(); ++i) {
      if (lists[u][i] < 0 || lists[u][i] >= n) fail(path, "node id out of range");
      if (i > 0 && lists[u][i] == lists[u][i - 1]) fail(path, "duplicate entry");
    }
  }
  return ListInstance{std::move(g), std::move(h), std::move(lists)};
}

ListInstance ListInstance::full(WeightedGraph g, WeightedGraph h) {
  const int n = g.n;
  std::vector<int> all(n);
  for (int p = 0; p < n; ++p) all[p] = p;
  return make(std::move(g), std::move(h), std::vector<std::vector<int>>(n, all));
}

BInstance BInstance::make(WeightedGraph g, WeightedGraph h, int b) {
  if (g.n != h.n) fail("wH", "graph sizes differ");
  if (b < 1 || b > g.n) fail("b", "out of range (need 1 <= b <= n)");
  return BInstance{std::move(g), std::move(h), b};
}

bool degree_valid(const std::vector<Edge>& edges, int b) {
  std::set<Edge> seen;
  std::vector<int> degl, degr;
  for (const Edge& e : edges) {
    if (e.first < 0 || e.second < 0) return false;
    if (!seen.insert(e).second) return false;
    if (e.first >= static_cast<int>(degl.size())) degl.resize(e.first + 1, 0);
    if (e.second >= static_cast<int>(degr.size())) degr.resize(e.second + 1, 0);
    if (++degl[e.first] > b || ++degr[e.second] > b) return false;
  }
  return true;
}

namespace {

void check_edges(const WeightedGraph& g, const WeightedGraph& h, const std::vector<Edge>& edges) {
  for (const Edge& e : edges)
    if (e.first < 0 || e.first >= g.n || e.second < 0 || e.second >= h.n)
      throw std::invalid_argument("edge (" + std::to_string(e.first) + "," +
                                  std::to_string(e.second) + ") out of range");
}

}  // namespace

double obj_pairs(const WeightedGraph& g, const WeightedGraph& h, const std::vector<Edge>& edges) {
  check_edges(g, h, edges);
  double total = 0.0;
  for (std::size_t i = 0; i < edges.size(); ++i)
    for (std::size_t j = 0; j < edges.size(); ++j) {
      if (i == j) continue;  // an edge never pairs with itself
      total += g.weight(edges[i].first, edges[j].first) * h.weight(edges[i].second, edges[j].second);
    }
  return total;
}

double obj_indicator(const WeightedGraph& g, const WeightedGraph& h, const BMatching& bm) {
  check_edges(g, h, bm.edges);
  const std::set<Edge> in(bm.edges.begin(), bm.edges.end());
  const auto has = [&](int u, int p) { return in.count({u, p}) != 0; };
  double total = 0.0;
  for (int u = 0; u < g.n; ++u)
    for (int v = u + 1; v < g.n; ++v)
      for (int p = 0; p < h.n; ++p)
        for (int q = p + 1; q < h.n; ++q) {
          const bool straight = has(u, p) && has(v, q);
          const bool crossed = has(u, q) && has(v, p);
          if (straight || crossed) total += 2.0 * g.weight(u, v) * h.weight(p, q);
        }
  return total;
}

double obj_cross(const WeightedGraph& g, const WeightedGraph& h,
                 const std::vector<Edge>& left, const std::vector<Edge>& right) {
  check_edges(g, h, left);
  check_edges(g, h, right);
  double total = 0.0;
  for (const Edge& a : left)
    for (const Edge& b : right)
      total += g.weight(a.first, b.first) * h.weight(a.second, b.second);
  return total;
}

namespace {

using nlohmann::ordered_json;

std::vector<std::vector<double>> parse_matrix(const ordered_json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  std::vector<std::vector<double>> m;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& row = j[i];
    if (!row.is_array()) fail(path + "[" + std::to_string(i) + "]", "expected an array");
    std::vector<double> r;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!row[c].is_number())
        fail(path + "[" + std::to_string(i) + "][" + std::to_string(c) + "]", "expected a number");
      r.push_back(row[c].get<double>());
    }
    m.push_back(std::move(r));
  }
  return m;
}

}  // namespace

Instance load_instance(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("instance: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("instance: expected a JSON object");
  if (!j.contains("n") || !j["n"].is_number_integer()) fail("n", "expected an integer");
  const int n = j["n"].get<int>();
  if (n < 1) fail("n", "must be at least 1");
  if (!j.contains("wG")) fail("wG", "missing");
  if (!j.contains("wH")) fail("wH", "missing");

  auto g = WeightedGraph::make(parse_matrix(j["wG"], "wG"), "wG");
  auto h = WeightedGraph::make(parse_matrix(j["wH"], "wH"), "wH");
  if (g.n != n) fail("wG", "size differs from n");
  if (h.n != n) fail("wH", "size differs from n");

  const bool has_lists = j.contains("lists");
  const bool has_b = j.contains("b");
  if (has_lists && has_b) throw std::invalid_argument("instance: give either lists or b, not both");

  if (has_b) {
    if (!j["b"].is_number_integer()) fail("b", "expected an integer");
    return BInstance::make(std::move(g), std::move(h), j["b"].get<int>());
  }
  if (has_lists) {
    if (!j["lists"].is_array() || static_cast<int>(j["lists"].size()) != n)
      fail("lists", "expected one array per node");
    std::vector<std::vector<int>> lists;
    for (int u = 0; u < n; ++u) {
      const auto& lu = j["lists"][u];
      const std::string path = "lists[" + std::to_string(u) + "]";
      if (!lu.is_array()) fail(path, "expected an array");
      std::vector<int> l;
      for (const auto& e : lu) {
        if (!e.is_number_integer()) fail(path, "expected integers");
        l.push_back(e.get<int>());
      }
      lists.push_back(std::move(l));
    }
    return ListInstance::make(std::move(g), std::move(h), std::move(lists));
  }
  // Neither restriction given: a plain instance, i.e. full lists.
  return ListInstance::full(std::move(g), std::move(h));
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_instance(ss.str());
}

std::string save_instance(const Instance& inst) {
  ordered_json j;
  const auto put_graphs = [&](const WeightedGraph& g, const WeightedGraph& h) {
    j["n"] = g.n;
    j["wG"] = g.w;
    j["wH"] = h.w;
  };
  if (const auto* li = std::get_if<ListInstance>(&inst)) {
    put_graphs(li->g, li->h);
    j["lists"] = li->lists;
  } else {
    const auto& bi = std::get<BInstance>(inst);
    put_graphs(bi.g, bi.h);
    j["b"] = bi.b;
  }
  return j.dump(2) + "\n";
}

void save_instance_file(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write instance file: " + path);
  out << save_instance(inst);
}

}  // namespace maxqap
