#include "maxqap/lp.hpp"

#include "maxqap/simplex.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace maxqap::lp {

namespace {

std::string num(double v) {
  // Integers print without a decimal point; everything else at full
  // round-trip precision. Keeps text dumps stable and diffable.
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::ostringstream os;
    os << static_cast<long long>(v);
    return os.str();
  }
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Shared constraint generator. LP1 passes degree_rhs = 1, couple = 1 and the
// instance lists; LP2 passes b for both and full lists, so the b = 1 model
// coincides with LP1 on full lists line for line.
LPModel build_core(const WeightedGraph& g, const WeightedGraph& h,
                   const std::vector<std::vector<int>>& lists, double degree_rhs, double couple) {
  const int n = g.n;
  LPModel m;
  m.n = n;

  for (int u = 0; u < n; ++u)
    for (int p : lists[u]) {
      m.x_cols[{u, p}] = m.num_cols();
      m.col_names.push_back("x_" + std::to_string(u) + "_" + std::to_string(p));
      m.objective.push_back(0.0);
    }

  // One merged column per unordered pair of distinct admissible assignments.
  // The coefficient sums both ordered orientations; it vanishes when the
  // pair repeats a node (zero diagonal), but those columns still take part
  // in the consistency rows.
  std::vector<std::pair<int, int>> assigns;
  for (const auto& [key, col] : m.x_cols) assigns.push_back(key);
  for (std::size_t i = 0; i < assigns.size(); ++i)
    for (std::size_t j = i + 1; j < assigns.size(); ++j) {
      const auto [u, p] = assigns[i];
      const auto [v, q] = assigns[j];
      m.y_cols[{u, p, v, q}] = m.num_cols();
      m.col_names.push_back("y_" + std::to_string(u) + "_" + std::to_string(p) + "_" +
                            std::to_string(v) + "_" + std::to_string(q));
      m.objective.push_back(2.0 * g.weight(u, v) * h.weight(p, q));
    }

  for (int u = 0; u < n; ++u) {
    LPModel::Row row;
    row.name = "deg_g" + std::to_string(u);
    for (int p : lists[u]) row.terms.push_back({m.x_col(u, p), 1.0});
    row.rel = 'L';
    row.rhs = degree_rhs;
    m.rows.push_back(std::move(row));
  }
  for (int p = 0; p < n; ++p) {
    LPModel::Row row;
    row.name = "deg_h" + std::to_string(p);
    for (int u = 0; u < n; ++u)
      if (m.x_col(u, p) >= 0) row.terms.push_back({m.x_col(u, p), 1.0});
    if (row.terms.empty()) continue;  // no list admits p
    row.rel = 'L';
    row.rhs = degree_rhs;
    m.rows.push_back(std::move(row));
  }

  // Pair-consistency rows, both summation directions. Empty sums are not
  // emitted; rows whose x column was eliminated never arise because the y
  // columns referencing it were eliminated with it.
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      for (int q : lists[v]) {
        LPModel::Row row;
        row.name = "cap_p_u" + std::to_string(u) + "_v" + std::to_string(v) + "_q" +
                   std::to_string(q);
        for (int p : lists[u]) {
          const int col = m.y_col(u, p, v, q);
          if (col >= 0) row.terms.push_back({col, 1.0});
        }
        if (row.terms.empty()) continue;
        row.terms.push_back({m.x_col(v, q), -couple});
        row.rel = 'L';
        row.rhs = 0.0;
        m.rows.push_back(std::move(row));
      }
  for (int p = 0; p < n; ++p)
    for (int v = 0; v < n; ++v)
      for (int q : lists[v]) {
        LPModel::Row row;
        row.name = "cap_u_p" + std::to_string(p) + "_v" + std::to_string(v) + "_q" +
                   std::to_string(q);
        for (int u = 0; u < n; ++u) {
          const int col = m.y_col(u, p, v, q);
          if (col >= 0) row.terms.push_back({col, 1.0});
        }
        if (row.terms.empty()) continue;
        row.terms.push_back({m.x_col(v, q), -couple});
        row.rel = 'L';
        row.rhs = 0.0;
        m.rows.push_back(std::move(row));
      }

  return m;
}

}  // namespace

int LPModel::x_col(int u, int p) const {
  auto it = x_cols.find({u, p});
  return it == x_cols.end() ? -1 : it->second;
}

int LPModel::y_col(int u, int p, int v, int q) const {
  if (std::tie(v, q) < std::tie(u, p)) {
    std::swap(u, v);
    std::swap(p, q);
  }
  auto it = y_cols.find({u, p, v, q});
  return it == y_cols.end() ? -1 : it->second;
}

FractionalSolution::FractionalSolution(int n)
    : n(n),
      x(n, std::vector<double>(n, 0.0)),
      y_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

std::size_t FractionalSolution::idx(int u, int p, int v, int q) const {
  return ((static_cast<std::size_t>(u) * n + p) * n + v) * n + q;
}

void FractionalSolution::set_y(int u, int p, int v, int q, double value) {
  y_[idx(u, p, v, q)] = value;
  y_[idx(v, q, u, p)] = value;
}

LPModel build_lp1(const ListInstance& inst) {
  return build_core(inst.g, inst.h, inst.lists, 1.0, 1.0);
}

LPModel build_lp2(const BInstance& inst) {
  std::vector<std::vector<int>> full(inst.n());
  for (int u = 0; u < inst.n(); ++u)
    for (int p = 0; p < inst.n(); ++p) full[u].push_back(p);
  const double b = inst.b;
  return build_core(inst.g, inst.h, full, b, b);
}

FractionalSolution solve(const LPModel& model, double tol) {
  SimplexProblem prob;
  prob.num_vars = model.num_cols();
  prob.objective = model.objective;
  prob.upper.assign(prob.num_vars, 1.0);
  for (const auto& row : model.rows) {
    if (row.rel != 'L') throw std::invalid_argument("lp: unsupported row relation");
    prob.rows.push_back({row.terms, row.rhs});
  }
  const SimplexResult res = simplex_maximize(prob, tol);

  FractionalSolution sol(model.n);
  for (const auto& [key, col] : model.x_cols) sol.x[key.first][key.second] = res.values[col];
  for (const auto& [key, col] : model.y_cols) {
    const auto [u, p, v, q] = key;
    sol.set_y(u, p, v, q, res.values[col]);
  }
  sol.objective_value = res.objective;
  return sol;
}

std::vector<std::string> check_feasible(const LPModel& model, const FractionalSolution& sol,
                                        double tol) {
  if (sol.n != model.n) throw std::invalid_argument("check_feasible: dimension mismatch");

  std::vector<double> val(model.num_cols(), 0.0);
  for (const auto& [key, col] : model.x_cols) val[col] = sol.x[key.first][key.second];
  for (const auto& [key, col] : model.y_cols) {
    const auto [u, p, v, q] = key;
    val[col] = sol.y(u, p, v, q);
  }

  std::vector<std::string> bad;
  for (int j = 0; j < model.num_cols(); ++j) {
    if (val[j] < -tol)
      bad.push_back("bound " + model.col_names[j] + ": " + num(val[j]) + " < 0");
    else if (val[j] > 1.0 + tol)
      bad.push_back("bound " + model.col_names[j] + ": " + num(val[j]) + " > 1");
  }
  for (const auto& row : model.rows) {
    double lhs = 0.0;
    for (const auto& [col, coef] : row.terms) lhs += coef * val[col];
    const bool ok = row.rel == 'L' ? lhs <= row.rhs + tol : std::abs(lhs - row.rhs) <= tol;
    if (!ok)
      bad.push_back("row " + row.name + ": lhs " + num(lhs) + " vs rhs " + num(row.rhs));
  }
  return bad;
}

std::string to_text(const LPModel& model) {
  std::ostringstream os;
  os << "max:";
  bool any = false;
  for (int j = 0; j < model.num_cols(); ++j) {
    if (model.objective[j] == 0.0) continue;
    os << " " << (any ? "+ " : "") << num(model.objective[j]) << "*" << model.col_names[j];
    any = true;
  }
  if (!any) os << " 0";
  os << "\n";
  for (const auto& row : model.rows) {
    os << row.name << ":";
    bool first = true;
    for (const auto& [col, coef] : row.terms) {
      os << " " << (first ? "" : "+ ") << num(coef) << "*" << model.col_names[col];
      first = false;
    }
    os << " " << (row.rel == 'L' ? "<=" : "=") << " " << num(row.rhs) << "\n";
  }
  os << "bounds: 0 <= v <= 1 for every column\n";
  return os.str();
}

}  // namespace maxqap::lp
