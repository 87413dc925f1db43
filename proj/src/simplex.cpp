#include "svo/simplex.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace svo {

namespace {

struct PivotSettings {
    bool bland_always{false};
    int refactor_every{48};
    double pivot_tol{1e-9};
};

// Dense tableau over [A | I] with the current basis reconstructed from the
// original data on demand; refactorization bounds the error accumulated by
// rank-one pivot updates.
struct Tableau {
    Mat AF;  // m x (n + m): original columns then artificial identity
    Vec b;   // sign-normalized rhs
    int m, n, cols;
    PivotSettings settings;

    Mat T;  // m x (cols + 1)
    Vec cost;
    double cost_rhs{0.0};
    std::vector<int> basis;

    Tableau(const Mat& A, const Vec& b0, const PivotSettings& s) : settings(s) {
        m = static_cast<int>(A.rows());
        n = static_cast<int>(A.cols());
        cols = n + m;
        AF.resize(m, cols);
        AF.leftCols(n) = A;
        AF.rightCols(m).setZero();
        b = b0;
        for (int i = 0; i < m; ++i) {
            if (b(i) < 0.0) {
                AF.row(i).head(n) = -AF.row(i).head(n);
                b(i) = -b(i);
            }
            AF(i, n + i) = 1.0;  // artificial installed after the sign flip
            basis.push_back(n + i);
        }
        T.resize(m, cols + 1);
    }

    void refactorize(const Vec& c_phase) {
        Mat B(m, m);
        for (int i = 0; i < m; ++i)
            B.col(i) = AF.col(basis[i]);
        Eigen::PartialPivLU<Mat> lu(B);
        T.leftCols(cols) = lu.solve(AF);
        T.col(cols) = lu.solve(b);
        Vec cB(m);
        for (int i = 0; i < m; ++i)
            cB(i) = c_phase(basis[i]);
        cost = c_phase - T.leftCols(cols).transpose() * cB;
        cost_rhs = -cB.dot(T.col(cols));
    }

    void pivot(int r, int j) {
        T.row(r) /= T(r, j);
        for (int i = 0; i < m; ++i) {
            if (i == r)
                continue;
            const double f = T(i, j);
            if (f != 0.0)
                T.row(i) -= f * T.row(r);
        }
        const double cf = cost(j);
        if (cf != 0.0) {
            cost -= cf * T.row(r).head(cols).transpose();
            cost_rhs -= cf * T(r, cols);
        }
        basis[r] = j;
    }

    int entering(const std::vector<bool>& allowed, double opt_tol, bool bland) const {
        int best = -1;
        double best_c = -opt_tol;
        for (int j = 0; j < cols; ++j) {
            if (!allowed[j] || cost(j) >= -opt_tol)
                continue;
            if (bland)
                return j;
            if (cost(j) < best_c) {
                best_c = cost(j);
                best = j;
            }
        }
        return best;
    }

    int leaving(int enter) const {
        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            if (T(i, enter) > settings.pivot_tol) {
                const double ratio = std::max(T(i, cols), 0.0) / T(i, enter);
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
                    best_ratio = std::min(ratio, best_ratio);
                    leave = i;
                }
            }
        }
        return leave;
    }

    enum class PhaseEnd { Optimal, Unbounded, Stalled, LostFeasibility };

    bool primal_feasible() const {
        const double tol = 1e-7 * (1.0 + b.cwiseAbs().maxCoeff());
        return T.col(cols).minCoeff() >= -tol;
    }

    PhaseEnd run(const Vec& c_phase, const std::vector<bool>& allowed, double opt_tol) {
        refactorize(c_phase);
        if (!primal_feasible())
            return PhaseEnd::LostFeasibility;
        bool bland = settings.bland_always;
        int degen_streak = 0;
        for (int iter = 0; iter < 20000; ++iter) {
            if (iter > 0 && iter % settings.refactor_every == 0) {
                refactorize(c_phase);
                if (!primal_feasible())
                    return PhaseEnd::LostFeasibility;
            }
            int enter = entering(allowed, opt_tol, bland);
            if (enter < 0) {
                // confirm against a fresh factorization before declaring
                refactorize(c_phase);
                if (!primal_feasible())
                    return PhaseEnd::LostFeasibility;
                enter = entering(allowed, opt_tol, bland);
                if (enter < 0)
                    return PhaseEnd::Optimal;
            }
            int leave = leaving(enter);
            if (leave < 0) {
                refactorize(c_phase);
                leave = leaving(enter);
                if (leave < 0)
                    return PhaseEnd::Unbounded;
            }
            const bool degenerate = T(leave, cols) <= 1e-11;
            pivot(leave, enter);
            degen_streak = degenerate ? degen_streak + 1 : 0;
            if (degen_streak > m + 8)
                bland = true;  // Bland's rule breaks any cycle
            else if (degen_streak == 0)
                bland = settings.bland_always;
        }
        return PhaseEnd::Stalled;
    }
};

// One two-phase pass under the given pivot settings; nullopt when the pass
// lost primal feasibility and deserves a retry under stricter settings.
std::optional<LpResult> solve_attempt(const Mat& A, const Vec& b, const Vec& c,
                                      double feas_tol, double opt_tol,
                                      const PivotSettings& settings) {
    Tableau tab(A, b, settings);
    const int m = tab.m, n = tab.n;

    Vec c1 = Vec::Zero(tab.cols);
    c1.tail(m).setOnes();
    std::vector<bool> allowed(tab.cols, true);

    LpResult res;
    auto end1 = tab.run(c1, allowed, opt_tol);
    if (end1 == Tableau::PhaseEnd::LostFeasibility || end1 == Tableau::PhaseEnd::Stalled)
        return std::nullopt;
    tab.refactorize(c1);
    if (-tab.cost_rhs > feas_tol) {
        res.status = LpStatus::Infeasible;
        res.note = "phase-1 residual " + std::to_string(-tab.cost_rhs);
        return res;
    }

    // Drive leftover artificials out of the basis where the row allows it.
    for (int i = 0; i < m; ++i) {
        if (tab.basis[i] >= n) {
            for (int j = 0; j < n; ++j) {
                if (std::abs(tab.T(i, j)) > 1e-7) {
                    tab.pivot(i, j);
                    break;
                }
            }
        }
    }

    Vec c2 = Vec::Zero(tab.cols);
    c2.head(n) = c;
    for (int j = n; j < tab.cols; ++j)
        allowed[j] = false;
    auto end2 = tab.run(c2, allowed, opt_tol);
    if (end2 == Tableau::PhaseEnd::LostFeasibility || end2 == Tableau::PhaseEnd::Stalled)
        return std::nullopt;
    if (end2 == Tableau::PhaseEnd::Unbounded) {
        res.status = LpStatus::Unbounded;
        res.note = "unbounded";
        return res;
    }

    tab.refactorize(c2);
    if (!tab.primal_feasible())
        return std::nullopt;
    res.status = LpStatus::Optimal;
    res.x = Vec::Zero(n);
    for (int i = 0; i < m; ++i)
        if (tab.basis[i] < n)
            res.x(tab.basis[i]) = std::max(tab.T(i, tab.cols), 0.0);
    res.value = c.dot(res.x);
    res.basis = tab.basis;

    // Multipliers from the final basis: A_B^T dual = c_B. Rows still carrying
    // an artificial column are redundant and contribute a unit column.
    Mat AB(m, m);
    Vec cb(m);
    for (int i = 0; i < m; ++i) {
        const int bj = tab.basis[i];
        AB.col(i) = tab.AF.col(bj);
        cb(i) = bj < n ? c(bj) : 0.0;
    }
    res.dual = AB.transpose().fullPivLu().solve(cb);
    // Undo the sign normalization applied to negative-rhs rows.
    for (int i = 0; i < m; ++i)
        if (b(i) < 0.0)
            res.dual(i) = -res.dual(i);

    int zero_rc = 0;
    for (int j = 0; j < n; ++j)
        if (std::abs(tab.cost(j)) <= opt_tol && res.x(j) == 0.0)
            ++zero_rc;
    res.note = zero_rc > 0 ? "degenerate optimum (" + std::to_string(zero_rc) +
                                 " zero reduced costs off basis)"
                           : "unique basis signature";
    return res;
}

}  // namespace

LpResult solve_lp(const Mat& A, const Vec& b, const Vec& c, double feas_tol, double opt_tol) {
    // Escalating pivot discipline: fast Dantzig first, then pure Bland with
    // tight refactorization when a pass wanders off the feasible basis path.
    const PivotSettings ladder[] = {
        {false, 48, 1e-9},
        {true, 8, 1e-7},
    };
    for (const auto& settings : ladder) {
        if (auto res = solve_attempt(A, b, c, feas_tol, opt_tol, settings))
            return *res;
    }
    LpResult res;
    res.status = LpStatus::Infeasible;
    res.note = "simplex lost primal feasibility under all pivot settings";
    return res;
}

void dump_tableau(std::ostream& os, const Mat& A, const Vec& b, const Vec& c) {
    os << "min c.x s.t. A x = b, x >= 0\n";
    os << "c:";
    for (int j = 0; j < c.size(); ++j)
        os << ' ' << c(j);
    os << "\n";
    for (int i = 0; i < A.rows(); ++i) {
        for (int j = 0; j < A.cols(); ++j)
            os << A(i, j) << ' ';
        os << "| " << b(i) << "\n";
    }
}

int LpBuilder::add_variable(double lb, double ub, double cost) {
    lb_.push_back(lb);
    ub_.push_back(ub);
    cost_.push_back(cost);
    return static_cast<int>(lb_.size()) - 1;
}

void LpBuilder::add_eq(const std::vector<std::pair<int, double>>& coeffs, double rhs) {
    rows_.push_back({coeffs, rhs, true});
}

void LpBuilder::add_le(const std::vector<std::pair<int, double>>& coeffs, double rhs) {
    rows_.push_back({coeffs, rhs, false});
}

LpResult LpBuilder::solve(double feas_tol, double opt_tol) const {
    const int nv = static_cast<int>(lb_.size());
    int nslack = 0;
    for (const auto& r : rows_)
        if (!r.is_eq)
            ++nslack;
    int nbound = 0;
    for (int j = 0; j < nv; ++j)
        if (std::isfinite(ub_[j]))
            ++nbound;

    const int ncols = nv + nslack + nbound;
    const int nrows = static_cast<int>(rows_.size()) + nbound;
    Mat A = Mat::Zero(nrows, ncols);
    Vec b = Vec::Zero(nrows);
    Vec c = Vec::Zero(ncols);
    for (int j = 0; j < nv; ++j)
        c(j) = cost_[j];

    int row = 0, slack = nv;
    for (const auto& r : rows_) {
        double rhs = r.rhs;
        for (const auto& [j, a] : r.coeffs) {
            A(row, j) += a;
            rhs -= a * lb_[j];
        }
        if (!r.is_eq)
            A(row, slack++) = 1.0;
        b(row++) = rhs;
    }
    for (int j = 0; j < nv; ++j) {
        if (std::isfinite(ub_[j])) {
            A(row, j) = 1.0;
            A(row, slack++) = 1.0;
            b(row++) = ub_[j] - lb_[j];
        }
    }

    LpResult res = solve_lp(A, b, c, feas_tol, opt_tol);
    if (res.status == LpStatus::Optimal) {
        Vec x(nv);
        double shift = 0.0;
        for (int j = 0; j < nv; ++j) {
            x(j) = res.x(j) + lb_[j];
            shift += cost_[j] * lb_[j];
        }
        res.x = std::move(x);
        res.value += shift;
    }
    return res;
}

}  // namespace svo
