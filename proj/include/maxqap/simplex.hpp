#pragma once

#include <utility>
#include <vector>

namespace maxqap::lp {

// Generic box-constrained LP in the form
//   maximize c.x  subject to  A x <= b (b >= 0),  0 <= x <= u.
// Rows are sparse; upper bounds may be +infinity.
struct SimplexProblem {
  int num_vars = 0;
  std::vector<double> objective;  // size num_vars
  std::vector<double> upper;      // size num_vars
  struct Row {
    std::vector<std::pair<int, double>> terms;  // (column, coefficient)
    double rhs = 0.0;
  };
  std::vector<Row> rows;
};

struct SimplexResult {
  std::vector<double> values;  // structural variables only
  double objective = 0.0;
  long iterations = 0;
};

// Dense revised simplex over the slack basis (feasible from the start since
// all right-hand sides are nonnegative). Nonbasic variables may sit at either
// bound. Pricing is most-negative-reduced-cost until progress stalls, then
// permanently Bland's rule, which guarantees termination on degenerate
// models. Throws std::runtime_error when max_iter is exceeded.
SimplexResult simplex_maximize(const SimplexProblem& prob, double tol = 1e-9,
                               long max_iter = 1000000);

}  // namespace maxqap::lp
