#pragma once

#include <optional>
#include <vector>

#include "svo/geometry.hpp"
#include "svo/plant.hpp"
#include "svo/simplex.hpp"

namespace svo {

struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Infeasible : OracleError {  // estimator program has no feasible point: S_k empty
    using OracleError::OracleError;
};
struct Unbounded : OracleError {  // regulator program unbounded: S_k empty by duality
    using OracleError::OracleError;
};
struct NotFeasible : OracleError {
    using OracleError::OracleError;
};
struct EmptySetAtStep : OracleError {
    int step;
    explicit EmptySetAtStep(int s)
        : OracleError("uncertainty set empty at step " + std::to_string(s)), step(s) {}
};

struct LPSolution {
    double value{0.0};
    Vec primal;
    LpStatus status{LpStatus::Infeasible};
    std::string basis_note;
};

struct ProblemHistory {
    PlantSpec p;
    Vec x0;
    std::vector<double> z;

    int k() const { return static_cast<int>(z.size()); }
};

struct EstimatorSolve {
    LPSolution sol;
    Vec y, v;        // optimal estimator signals, length k
    Vec x_terminal;  // x_k(y, v) from the optimal basis
};

struct RegulatorSolve {
    LPSolution sol;
    Vec y_star, v_star;  // recovered from the split variables
    Vec lambda;          // equality-row multipliers, length k
};

// Estimator program E': maximize <x_star, x_k(y,v)> over box-bounded (y, v)
// subject to the banded convolution equalities with the first m rows pinned
// to B_T x0. Requires k >= m.
EstimatorSolve solve_estimator(const PlantModel& model, const ProblemHistory& h,
                               const Vec& x_star);

// Regulator program R as the split-variable linear program with cost row
// 1_{4k} + delta + gamma and constraint matrix [N_k^T -N_k^T D_k^T -D_k^T].
RegulatorSolve solve_regulator(const PlantModel& model, const ProblemHistory& h,
                               const Vec& x_star);

// True iff both pairs are feasible for their programs and componentwise
// aligned, which by duality is equivalent to joint optimality.
bool check_alignment_optimality(const PlantModel& model, const ProblemHistory& h,
                                const Vec& x_star, const Vec& y, const Vec& v,
                                const Vec& y_star, const Vec& v_star, double tol = 1e-7);

// Vertices of the one-step feasible lift
// {(x, v) : x in S_prev, |v| <= 1, |C x + D1 v - z| <= 1}.
std::vector<std::pair<Vec, double>> lifted_vertices(const Polytope& S_prev,
                                                    const PlantModel& model, double z);

// One step of the set recursion: map the lifted vertices through
// (x, v) -> A x + B v and hull the images.
Polytope oracle_step(const Polytope& S_prev, const PlantModel& model, double z, int step);

// S_1 .. S_k by exact geometry (m <= 2), starting from the point S_0 = {x0}.
std::vector<Polytope> exact_set_recursion(const PlantModel& model, const ProblemHistory& h);

// Dynamic-programming truncation: the head of a k-horizon optimum is optimal
// for the (k-1)-horizon programs with the recursed target state.
bool dp_truncation_check(const PlantModel& model, const ProblemHistory& h, const Vec& x_star,
                         double tol = 1e-7);

}  // namespace svo
