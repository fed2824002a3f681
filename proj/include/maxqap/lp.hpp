#pragma once

#include "maxqap/instances.hpp"

#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace maxqap::lp {

// Assignment LP over variables x_u_p (node u of G assigned to node p of H)
// and pair variables y_u_p_v_q. The two orientations y_u_p_v_q and y_v_q_u_p
// are one merged column keyed by the lexicographically smaller orientation;
// its objective coefficient covers both. Columns for inadmissible
// assignments are never created. Every column is box-constrained to [0, 1].
struct LPModel {
  struct Row {
    std::string name;
    std::vector<std::pair<int, double>> terms;  // (column, coefficient)
    char rel = 'L';                             // 'L': <= rhs, 'E': == rhs
    double rhs = 0.0;
  };

  int n = 0;
  std::vector<std::string> col_names;
  std::vector<double> objective;
  std::vector<Row> rows;
  std::map<std::pair<int, int>, int> x_cols;
  std::map<std::tuple<int, int, int, int>, int> y_cols;  // canonical keys

  int num_cols() const { return static_cast<int>(col_names.size()); }
  int x_col(int u, int p) const;                 // -1 when eliminated
  int y_col(int u, int p, int v, int q) const;   // orientation-free; -1 when absent
};

// Fractional assignment: the x matrix plus the symmetric pair values. The
// writer keeps both orientations of y in sync, so reads are exactly
// symmetric by construction.
struct FractionalSolution {
  int n = 0;
  std::vector<std::vector<double>> x;  // n by n, zero at eliminated columns
  double objective_value = 0.0;

  FractionalSolution() = default;
  explicit FractionalSolution(int n);

  double y(int u, int p, int v, int q) const { return y_[idx(u, p, v, q)]; }
  void set_y(int u, int p, int v, int q, double value);

 private:
  std::size_t idx(int u, int p, int v, int q) const;
  std::vector<double> y_;  // dense n^4 store
};

// Assignment relaxation for a list instance: per-node degree rows capped at
// 1 and pair-consistency rows tying y to x.
LPModel build_lp1(const ListInstance& inst);

// Capacity-b variant on full lists: degree rows capped at b and the x side
// of each pair-consistency row scaled by b. With b = 1 the model is
// identical to build_lp1 on full lists.
LPModel build_lp2(const BInstance& inst);

// Solves the model with the built-in simplex. The result satisfies every row
// within tol and is optimal for the model up to tol.
FractionalSolution solve(const LPModel& model, double tol = 1e-9);

// Returns one human-readable line per violated row or bound; empty means
// feasible within tol. Throws on dimension mismatch.
std::vector<std::string> check_feasible(const LPModel& model, const FractionalSolution& sol,
                                        double tol);

// Deterministic text form: objective line, one line per row, bounds line.
std::string to_text(const LPModel& model);

}  // namespace maxqap::lp
