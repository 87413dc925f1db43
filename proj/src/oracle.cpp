#include "svo/oracle.hpp"

#include <cmath>

#include "svo/propagation.hpp"

namespace svo {

namespace {

Vec estimator_rhs(const PlantModel& model, const ProblemHistory& h) {
    const int k = h.k();
    Vec rhs = Vec::Zero(k);
    rhs.head(model.m()) = model.bez.B * h.x0;
    return rhs;
}

}  // namespace

EstimatorSolve solve_estimator(const PlantModel& model, const ProblemHistory& h,
                               const Vec& x_star) {
    const int m = model.m();
    const int k = h.k();
    if (k < m)
        throw OracleError("solve_estimator: horizon shorter than plant order");

    const Mat Dk = toeplitz_banded(model.spec.d, k);
    const Mat Nk = toeplitz_banded(model.spec.n, k);
    const Vec rhs = estimator_rhs(model, h);

    // Objective through the backward window: x_k = B_inv(-D_U y_win + N_U v_win).
    const Vec g = model.bez.B_inv.transpose() * x_star;
    const Vec wy = -toeplitz_upper_window(model.spec.d, m).transpose() * g;
    const Vec wv = toeplitz_upper_window(model.spec.n, m).transpose() * g;

    LpBuilder lp;
    std::vector<int> yv(k), vv(k);
    for (int j = 0; j < k; ++j) {
        const double cy = (j >= k - m) ? -wy(j - (k - m)) : 0.0;
        yv[j] = lp.add_variable(h.z[j] - 1.0, h.z[j] + 1.0, cy);
    }
    for (int j = 0; j < k; ++j) {
        const double cv = (j >= k - m) ? -wv(j - (k - m)) : 0.0;
        vv[j] = lp.add_variable(-1.0, 1.0, cv);
    }
    for (int i = 0; i < k; ++i) {
        std::vector<std::pair<int, double>> row;
        for (int j = std::max(0, i - m); j <= i; ++j) {
            if (Dk(i, j) != 0.0)
                row.push_back({yv[j], Dk(i, j)});
            if (Nk(i, j) != 0.0)
                row.push_back({vv[j], -Nk(i, j)});
        }
        lp.add_eq(row, rhs(i));
    }

    LpResult r = lp.solve();
    if (r.status == LpStatus::Infeasible)
        throw Infeasible("solve_estimator: no feasible signals, S_k is empty");
    if (r.status != LpStatus::Optimal)
        throw OracleError("solve_estimator: unexpected LP status");

    EstimatorSolve out;
    out.y = r.x.head(k);
    out.v = r.x.tail(k);
    out.x_terminal = state_from_window(model.spec, model.bez, out.y.tail(m), out.v.tail(m),
                                       WindowSide::Backward);
    out.sol.value = x_star.dot(out.x_terminal);
    out.sol.primal.resize(2 * k);
    out.sol.primal << out.y, out.v;
    out.sol.status = LpStatus::Optimal;
    out.sol.basis_note = r.note;
    return out;
}

RegulatorSolve solve_regulator(const PlantModel& model, const ProblemHistory& h,
                               const Vec& x_star) {
    const int m = model.m();
    const int k = h.k();
    if (k < m)
        throw OracleError("solve_regulator: horizon shorter than plant order");

    const Mat NkT = toeplitz_banded(model.spec.n, k).transpose();
    const Mat DkT = toeplitz_banded(model.spec.d, k).transpose();
    const Mat NU = toeplitz_upper_window(model.spec.n, m);
    const Mat DU = toeplitz_upper_window(model.spec.d, m);

    Mat A(k, 4 * k);
    A << NkT, -NkT, DkT, -DkT;
    Vec b = Vec::Zero(k);
    b.tail(m) = x_star;

    // Cost row 1_{4k} + delta + gamma, with delta built from
    // <x*_0, x0> = -(N_U x0).y*_{1:m} - (D_U x0).v*_{1:m}.
    Vec c = Vec::Ones(4 * k);
    const Vec xn = NU * h.x0;
    const Vec xd = DU * h.x0;
    for (int i = 0; i < m; ++i) {
        c(i) += -xn(i);
        c(k + i) += xn(i);
        c(2 * k + i) += -xd(i);
        c(3 * k + i) += xd(i);
    }
    for (int j = 0; j < k; ++j) {
        c(j) += h.z[j];
        c(k + j) += -h.z[j];
    }

    LpResult r = solve_lp(A, b, c);
    if (r.status == LpStatus::Unbounded)
        throw Unbounded("solve_regulator: unbounded, S_k is empty");
    if (r.status != LpStatus::Optimal)
        throw OracleError("solve_regulator: unexpected LP status");

    RegulatorSolve out;
    out.y_star = r.x.head(k) - r.x.segment(k, k);
    out.v_star = r.x.segment(2 * k, k) - r.x.tail(k);
    out.lambda = r.dual;
    out.sol.value = r.value;
    out.sol.primal.resize(2 * k);
    out.sol.primal << out.y_star, out.v_star;
    out.sol.status = LpStatus::Optimal;
    out.sol.basis_note = r.note;
    return out;
}

bool check_alignment_optimality(const PlantModel& model, const ProblemHistory& h,
                                const Vec& x_star, const Vec& y, const Vec& v,
                                const Vec& y_star, const Vec& v_star, double tol) {
    const int m = model.m();
    const int k = h.k();
    const double ftol = 1e-7;

    for (int j = 0; j < k; ++j) {
        if (std::abs(v(j)) > 1.0 + ftol || std::abs(y(j) - h.z[j]) > 1.0 + ftol)
            throw NotFeasible("check_alignment_optimality: estimator bounds violated");
    }
    const Mat Dk = toeplitz_banded(model.spec.d, k);
    const Mat Nk = toeplitz_banded(model.spec.n, k);
    const Vec res_e = Dk * y - Nk * v - estimator_rhs(model, h);
    const double scale_e = 1.0 + estimator_rhs(model, h).cwiseAbs().maxCoeff();
    if (res_e.cwiseAbs().maxCoeff() > ftol * scale_e)
        throw NotFeasible("check_alignment_optimality: estimator equalities violated");

    Vec rhs_r = Vec::Zero(k);
    rhs_r.tail(m) = x_star;
    const Vec res_r = Nk.transpose() * y_star + Dk.transpose() * v_star - rhs_r;
    if (res_r.cwiseAbs().maxCoeff() > ftol * (1.0 + x_star.cwiseAbs().maxCoeff()))
        throw NotFeasible("check_alignment_optimality: regulator equalities violated");

    for (int j = 0; j < k; ++j) {
        if (!aligned(y(j), v(j), y_star(j), v_star(j), h.z[j], tol))
            return false;
    }
    return true;
}

std::vector<std::pair<Vec, double>> lifted_vertices(const Polytope& S_prev,
                                                    const PlantModel& model, double z) {
    const int m = model.m();
    const Vec& C = model.est.C_row;
    const double D1 = model.est.D1;
    std::vector<std::pair<Vec, double>> out;

    auto v_interval_at = [&](const Vec& x) -> std::optional<std::pair<double, double>> {
        double lo = -1.0, hi = 1.0;
        const double r = z - C.dot(x);
        if (D1 != 0.0) {
            double a = (r - 1.0) / D1, b = (r + 1.0) / D1;
            if (a > b)
                std::swap(a, b);
            lo = std::max(lo, a);
            hi = std::min(hi, b);
        } else if (std::abs(r) > 1.0) {
            return std::nullopt;
        }
        if (lo > hi)
            return std::nullopt;
        return std::make_pair(lo, hi);
    };

    if (S_prev.is_empty())
        return out;

    if (S_prev.vertices().size() == 1) {  // point
        const Vec& p = S_prev.vertices()[0];
        if (auto iv = v_interval_at(p)) {
            out.push_back({p, iv->first});
            if (iv->second > iv->first)
                out.push_back({p, iv->second});
        }
        return out;
    }

    if (m == 1 || S_prev.degenerate()) {
        // One free coordinate along the set, one for v: clip the parameter
        // square by the measurement slab in 2-D.
        Vec p0 = S_prev.vertices().front();
        Vec p1 = S_prev.vertices().back();
        const double cdir = C.dot(p1 - p0);
        std::vector<Vec> corners;
        for (double u : {0.0, 1.0})
            for (double vv : {-1.0, 1.0}) {
                Vec q(2);
                q << u, vv;
                corners.push_back(q);
            }
        Polytope square = convex_hull(2, corners);
        Vec a1(2), a2(2);
        a1 << cdir, D1;
        a2 << -cdir, -D1;
        Polytope clipped = intersect_halfspaces(
            square, {{a1, z + 1.0 - C.dot(p0)}, {a2, -(z - 1.0 - C.dot(p0))}});
        for (const auto& q : clipped.vertices())
            out.push_back({p0 + q(0) * (p1 - p0), q(1)});
        return out;
    }

    // Full-dimensional polygon: enumerate facet-plane triples in (x1, x2, v).
    struct Plane {
        Eigen::Vector3d a;
        double c;
    };
    std::vector<Plane> planes;
    for (const auto& hsp : S_prev.halfspaces())
        planes.push_back({{hsp.normal(0), hsp.normal(1), 0.0}, hsp.offset});
    planes.push_back({{0.0, 0.0, 1.0}, 1.0});
    planes.push_back({{0.0, 0.0, -1.0}, 1.0});
    Eigen::Vector3d slab(C(0), C(1), D1);
    const double sn = slab.norm();
    planes.push_back({slab / sn, (z + 1.0) / sn});
    planes.push_back({-slab / sn, -(z - 1.0) / sn});

    const int np = static_cast<int>(planes.size());
    const double scale = std::max(1.0, S_prev.diameter());
    std::vector<Eigen::Vector3d> raw;
    for (int i = 0; i < np; ++i)
        for (int j = i + 1; j < np; ++j)
            for (int l = j + 1; l < np; ++l) {
                Eigen::Matrix3d M;
                M.row(0) = planes[i].a;
                M.row(1) = planes[j].a;
                M.row(2) = planes[l].a;
                if (std::abs(M.determinant()) < 1e-10)
                    continue;
                Eigen::Vector3d rhs(planes[i].c, planes[j].c, planes[l].c);
                Eigen::Vector3d p = M.fullPivLu().solve(rhs);
                bool ok = true;
                for (const auto& pl : planes) {
                    if (pl.a.dot(p) > pl.c + 1e-9 * scale) {
                        ok = false;
                        break;
                    }
                }
                if (ok)
                    raw.push_back(p);
            }

    for (const auto& p : raw) {
        bool dup = false;
        for (const auto& q : out) {
            if (std::abs(q.second - p(2)) <= 1e-9 * scale &&
                (q.first - p.head(2)).norm() <= 1e-9 * scale) {
                dup = true;
                break;
            }
        }
        if (!dup)
            out.push_back({p.head(2), p(2)});
    }
    return out;
}

Polytope oracle_step(const Polytope& S_prev, const PlantModel& model, double z, int step) {
    if (model.m() > 2)
        throw OracleError("oracle_step: exact geometry implemented for m <= 2");
    auto lifted = lifted_vertices(S_prev, model, z);
    if (lifted.empty())
        throw EmptySetAtStep(step);
    std::vector<Vec> images;
    images.reserve(lifted.size());
    for (const auto& [x, v] : lifted)
        images.push_back(model.est.A * x + model.est.B_col * v);
    return convex_hull(model.m(), images);
}

std::vector<Polytope> exact_set_recursion(const PlantModel& model, const ProblemHistory& h) {
    if (h.k() < 1)
        throw OracleError("exact_set_recursion: empty measurement history");
    std::vector<Polytope> sets;
    Polytope S = convex_hull(model.m(), {h.x0});
    for (int j = 0; j < h.k(); ++j) {
        S = oracle_step(S, model, h.z[j], j + 1);
        sets.push_back(S);
    }
    return sets;
}

bool dp_truncation_check(const PlantModel& model, const ProblemHistory& h, const Vec& x_star,
                         double tol) {
    const int m = model.m();
    const int k = h.k();
    if (k < 2 || k - 1 < m)
        throw OracleError("dp_truncation_check: needs k >= 2 with k-1 >= m");

    RegulatorSolve full = solve_regulator(model, h, x_star);
    EstimatorSolve est = solve_estimator(model, h, x_star);

    const Vec xs_prev =
        regulator_state_from_window(model.spec, full.y_star.segment(k - 1 - m, m),
                                    full.v_star.segment(k - 1 - m, m), WindowSide::Backward);

    ProblemHistory head{h.p, h.x0, std::vector<double>(h.z.begin(), h.z.end() - 1)};

    // (i) value of the truncated solution equals the fresh (k-1)-horizon value.
    double truncated_cost = 0.0;
    for (int j = 0; j < k - 1; ++j)
        truncated_cost += std::abs(full.y_star(j)) + std::abs(full.v_star(j)) +
                          full.y_star(j) * h.z[j];
    const Vec xs0 = regulator_state_from_window(model.spec, full.y_star.head(m),
                                                full.v_star.head(m), WindowSide::Forward);
    truncated_cost += xs0.dot(h.x0);

    RegulatorSolve head_reg = solve_regulator(model, head, xs_prev);
    const double sc = 1.0 + std::abs(head_reg.sol.value);
    if (std::abs(truncated_cost - head_reg.sol.value) > tol * sc)
        return false;

    // (ii)-(iii) truncated estimator optimum attains the (k-1)-horizon support.
    const Vec x_prev = state_from_window(model.spec, model.bez,
                                         est.y.segment(k - 1 - m, m),
                                         est.v.segment(k - 1 - m, m), WindowSide::Backward);
    EstimatorSolve head_est = solve_estimator(model, head, xs_prev);
    const double sc2 = 1.0 + std::abs(head_est.sol.value);
    return std::abs(xs_prev.dot(x_prev) - head_est.sol.value) <= tol * sc2;
}

}  // namespace svo
