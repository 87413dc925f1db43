#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "svo/plant.hpp"

namespace svo {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status{LpStatus::Infeasible};
    double value{0.0};
    Vec x;                    // primal solution (original variables)
    Vec dual;                 // equality-row multipliers, A_B^T dual = c_B
    std::vector<int> basis;   // final basic column indices
    std::string note;         // diagnostics: iterations, degenerate optimum flag
};

// Dense two-phase simplex with Bland's rule for min c.x s.t. A x = b, x >= 0.
// Deterministic pivoting, so identical instances produce identical bases.
LpResult solve_lp(const Mat& A, const Vec& b, const Vec& c, double feas_tol = 1e-8,
                  double opt_tol = 1e-9);

void dump_tableau(std::ostream& os, const Mat& A, const Vec& b, const Vec& c);

// Incremental builder for problems with bounded variables and mixed rows;
// shifts every variable by its lower bound and adds slacks to reach the
// equality standard form solve_lp expects.
class LpBuilder {
  public:
    int add_variable(double lb, double ub, double cost);
    void add_eq(const std::vector<std::pair<int, double>>& coeffs, double rhs);
    void add_le(const std::vector<std::pair<int, double>>& coeffs, double rhs);

    // Minimizes the declared costs; result.x holds unshifted variable values.
    LpResult solve(double feas_tol = 1e-8, double opt_tol = 1e-9) const;

  private:
    struct Row {
        std::vector<std::pair<int, double>> coeffs;
        double rhs;
        bool is_eq;
    };
    std::vector<double> lb_, ub_, cost_;
    std::vector<Row> rows_;
};

}  // namespace svo
