#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace maxqap {

// An assignment edge (left node, right node).
using Edge = std::pair<int, int>;

// Complete weighted graph on n nodes: symmetric nonnegative weight matrix
// with zero diagonal. Node ids are 0-based.
struct WeightedGraph {
  int n = 0;
  std::vector<std::vector<double>> w;

  double weight(int i, int j) const { return w[i][j]; }

  // Validates and wraps a weight matrix. Error messages are prefixed with
  // `path` (e.g. "wG") so callers can point at the offending input field.
  static WeightedGraph make(std::vector<std::vector<double>> w, const std::string& path);
};

// Quadratic assignment instance where every left node u may only be assigned
// to a right node in its list L(u).
struct ListInstance {
  WeightedGraph g, h;
  std::vector<std::vector<int>> lists;  // per u: sorted, nonempty, unique

  int n() const { return g.n; }
  int k() const;  // deficiency: max_u (n - |L(u)|)
  bool admits(int u, int p) const;

  static ListInstance make(WeightedGraph g, WeightedGraph h, std::vector<std::vector<int>> lists);
  static ListInstance full(WeightedGraph g, WeightedGraph h);  // L(u) = everything, k = 0
};

// Quadratic b-matching instance: every node on either side may carry up to b
// assignment edges.
struct BInstance {
  WeightedGraph g, h;
  int b = 1;

  int n() const { return g.n; }
  static BInstance make(WeightedGraph g, WeightedGraph h, int b);
};

using Instance = std::variant<ListInstance, BInstance>;

struct Matching {
  std::vector<Edge> edges;  // sorted, degree <= 1 on both sides
};

struct BMatching {
  std::vector<Edge> edges;  // sorted, no duplicates, degree <= b on both sides
  int b = 1;
};

// True iff `edges` has no duplicates and every node appears at most b times
// on its side.
bool degree_valid(const std::vector<Edge>& edges, int b);

// Pair-sum objective: sum of w_G(u,v) * w_H(p,q) over ordered pairs of
// distinct edges (u,p), (v,q). Each unordered pair contributes twice, which
// matches the LP objective convention used throughout.
double obj_pairs(const WeightedGraph& g, const WeightedGraph& h, const std::vector<Edge>& edges);

// Indicator objective: 2 * sum over unordered {u,v}, u != v, and unordered
// {p,q}, p != q, of w_G(u,v) * w_H(p,q) * [the edge set realizes the
// configuration in either orientation]. A configuration realized by both
// orientations still counts once.
double obj_indicator(const WeightedGraph& g, const WeightedGraph& h, const BMatching& bm);

// Cross objective between two edge sets: sum over e1 in left, e2 in right of
// w_G(u1,u2) * w_H(p1,p2).
double obj_cross(const WeightedGraph& g, const WeightedGraph& h,
                 const std::vector<Edge>& left, const std::vector<Edge>& right);

// JSON instance I/O; see README for the schema. Parse and validation errors
// throw std::invalid_argument with the offending field path in the message.
Instance load_instance(const std::string& text);
Instance load_instance_file(const std::string& path);
std::string save_instance(const Instance& inst);
void save_instance_file(const Instance& inst, const std::string& path);

}  // namespace maxqap
