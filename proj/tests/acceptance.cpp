// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion enforces its own tolerance and runtime budget.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "svo/oracle.hpp"
#include "svo/propagation.hpp"
#include "svo/runner.hpp"
#include "svo/trajectory.hpp"
#include "test_support.hpp"

using namespace svo;
using svo::testing::make_vec;
using svo::testing::random_plant;

namespace {

struct Outcome {
    bool pass{true};
    std::string detail;
    void fail(const std::string& why) {
        if (pass)
            detail = why;
        pass = false;
    }
};

ProblemHistory random_feasible_history(SplitMix64& rng, const PlantModel& model, int k) {
    auto [v, w] = sample_disturbances(rng.next(), k, DisturbanceLaw::Uniform);
    Vec x0(model.m());
    for (int i = 0; i < model.m(); ++i)
        x0(i) = 2.0 * rng.next_unit() - 1.0;
    Trajectory t = simulate(model, x0, v, w);
    return ProblemHistory{model.spec, x0, t.z};
}

Vec random_unit(SplitMix64& rng, int m) {
    Vec d(m);
    double nrm = 0.0;
    while (nrm < 1e-3) {
        for (int i = 0; i < m; ++i)
            d(i) = 2.0 * rng.next_unit() - 1.0;
        nrm = d.norm();
    }
    return d / nrm;
}

// ---------------------------------------------------------------------------
// 1. Gohberg-Semencul consistency across 200 random plants, m in {1,2,3}.
Outcome criterion1() {
    Outcome out;
    SplitMix64 rng(1001);
    for (int i = 0; i < 200; ++i) {
        const int m = 1 + i % 3;
        PlantModel mod = random_plant(rng, m);
        const Mat DL = toeplitz_lower_window(mod.spec.d, m);
        const Mat DU = toeplitz_upper_window(mod.spec.d, m);
        const Mat NL = toeplitz_lower_window(mod.spec.n, m);
        const Mat NU = toeplitz_upper_window(mod.spec.n, m);
        const Mat B1 = DL * NU - NL * DU;
        const Mat B2 = NU * DL - DU * NL;
        const Mat B3 = bezoutian_from_generating(mod.spec);
        const double scale = std::max(1.0, B1.cwiseAbs().maxCoeff());
        if ((B1 - B2).cwiseAbs().maxCoeff() > 1e-10 * scale)
            out.fail("products disagree at plant " + std::to_string(i));
        if ((B1 - B3).cwiseAbs().maxCoeff() > 1e-10 * scale)
            out.fail("generating polynomial disagrees at plant " + std::to_string(i));
    }
    return out;
}

// ---------------------------------------------------------------------------
// 2. Strong duality and alignment on 100 random feasible instances.
Outcome criterion2() {
    Outcome out;
    SplitMix64 rng(2002);
    for (int i = 0; i < 100; ++i) {
        const int m = 1 + i % 2;
        PlantModel mod = random_plant(rng, m);
        const int k = 2 * m + static_cast<int>(rng.next() % (13 - 2 * m));
        ProblemHistory h = random_feasible_history(rng, mod, k);
        const Vec xs = random_unit(rng, m);
        EstimatorSolve est = solve_estimator(mod, h, xs);
        RegulatorSolve reg = solve_regulator(mod, h, xs);
        const double gap = std::abs(est.sol.value - reg.sol.value);
        if (gap > 1e-7 * (1.0 + std::abs(est.sol.value)))
            out.fail("duality gap " + std::to_string(gap) + " at instance " +
                     std::to_string(i));
        if (!check_alignment_optimality(mod, h, xs, est.y, est.v, reg.y_star, reg.v_star,
                                        1e-6))
            out.fail("optimal pair misaligned at instance " + std::to_string(i));
    }
    return out;
}

struct RunChecks {
    bool soundness{true};
    bool cardinality{true};
    std::string detail;
};

// Shared driver for criteria 3 and 7: random m=2 runs with each step seeded
// from the exact predecessor set, so the emitted pairs are judged against the
// boundary statement they implement rather than against accumulated hull
// round-off. Criterion 4 separately covers the self-evolved front.
RunChecks propagation_runs(int runs, int steps, int density, bool check_lp) {
    RunChecks rc;
    SplitMix64 rng(3003);
    for (int r = 0; r < runs; ++r) {
        PlantModel mod = random_plant(rng, 2);
        const int horizon = 2 + steps;
        auto [v, w] = sample_disturbances(rng.next(), horizon, DisturbanceLaw::Uniform);
        Vec x0 = Vec::Zero(2);
        Trajectory t = simulate(mod, x0, v, w);
        ProblemHistory full{mod.spec, x0, t.z};

        std::vector<Polytope> sets;
        try {
            sets = exact_set_recursion(mod, full);
        } catch (const EmptySetAtStep&) {
            continue;
        }
        int start = 0;
        while (start < horizon && !sets[start].full_dimensional())
            ++start;
        if (start >= horizon)
            continue;

        StepOptions opts;
        opts.sample_density = density;
        for (int j = start + 1; j < horizon; ++j) {
            if (!sets[j - 1].full_dimensional())
                break;
            Front f = make_front(sets[j - 1], j,
                                 std::vector<double>(t.z.begin(), t.z.begin() + j));
            StepReport rep;
            try {
                propagate_front(f, t.z[j], mod, opts, nullptr, &rep);
            } catch (const DegenerateFront&) {
                break;
            }
            for (const auto& oc : rep.outcomes) {
                if (oc.tag != RTag::R1 && (oc.segment || oc.emitted > 2)) {
                    rc.cardinality = false;
                    rc.detail = "cardinality violated at run " + std::to_string(r);
                }
                if (oc.segment && oc.tag != RTag::R1) {
                    rc.cardinality = false;
                    rc.detail = "segment outside R1 at run " + std::to_string(r);
                }
            }
            if (!check_lp)
                continue;
            ProblemHistory h{mod.spec, x0,
                             std::vector<double>(t.z.begin(), t.z.begin() + j + 1)};
            for (const auto& pair : rep.pairs) {
                const Vec xs = pair.x_star_next / pair.x_star_next.norm();
                EstimatorSolve est = solve_estimator(mod, h, xs);
                const double lhs = xs.dot(pair.x_next);
                if (std::abs(lhs - est.sol.value) > 1e-7 * (1.0 + std::abs(est.sol.value))) {
                    rc.soundness = false;
                    rc.detail = "support equality violated at run " + std::to_string(r) +
                                " step " + std::to_string(j + 1) + " err " +
                                std::to_string(std::abs(lhs - est.sol.value));
                }
            }
        }
    }
    return rc;
}

RunChecks g_runs_3;  // criterion 3 results reused by criterion 7

Outcome criterion3() {
    Outcome out;
    g_runs_3 = propagation_runs(50, 10, 6, true);
    if (!g_runs_3.soundness)
        out.fail(g_runs_3.detail);
    return out;
}

// ---------------------------------------------------------------------------
// 4. Vertex completeness: propagated hull vs oracle, density 64.
Outcome criterion4() {
    Outcome out;
    SplitMix64 rng(4004);
    for (int r = 0; r < 50; ++r) {
        PlantModel mod = random_plant(rng, 2);
        const int horizon = 12;
        auto [v, w] = sample_disturbances(rng.next(), horizon, DisturbanceLaw::Uniform);
        Trajectory t = simulate(mod, Vec::Zero(2), v, w);
        ProblemHistory full{mod.spec, Vec::Zero(2), t.z};
        auto sets = exact_set_recursion(mod, full);
        int start = 0;
        while (start < horizon && !sets[start].full_dimensional())
            ++start;
        if (start >= horizon)
            continue;
        Front f = make_front(sets[start], start + 1,
                             std::vector<double>(t.z.begin(), t.z.begin() + start + 1));
        StepOptions opts;
        opts.sample_density = 64;
        for (int j = start + 1; j < horizon; ++j) {
            StepReport rep;
            try {
                f = propagate_front(f, t.z[j], mod, opts, &sets[j], &rep);
            } catch (const DegenerateFront&) {
                break;
            }
            const double haus = hausdorff_distance(f.polytope, sets[j]);
            if (haus > 1e-6 * sets[j].diameter())
                out.fail("Hausdorff " + std::to_string(haus) + " at run " +
                         std::to_string(r) + " step " + std::to_string(j + 1));
            if (!rep.defects.empty())
                out.fail("defect reported at run " + std::to_string(r) + " step " +
                         std::to_string(j + 1));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// 5. Interior points propagate only into relint F+- on the boundary.
Outcome criterion5() {
    Outcome out;
    SplitMix64 rng(5005);
    int landed = 0;
    for (int r = 0; r < 20; ++r) {
        PlantModel mod = random_plant(rng, 2);
        const int horizon = 12;
        auto [v, w] = sample_disturbances(rng.next(), horizon, DisturbanceLaw::Uniform);
        Trajectory t = simulate(mod, Vec::Zero(2), v, w);
        ProblemHistory full{mod.spec, Vec::Zero(2), t.z};
        auto sets = exact_set_recursion(mod, full);
        int start = 0;
        while (start < horizon && !sets[start].full_dimensional())
            ++start;
        if (start >= horizon)
            continue;

        for (int j = start + 1; j < horizon; ++j) {
            const Polytope& prev = sets[j - 1];
            const Polytope& next = sets[j];
            if (!prev.full_dimensional() || !next.full_dimensional())
                break;
            FacePair faces = faces_F(next, mod.reg.B_star);
            Vec lb = prev.vertices().front(), ub = prev.vertices().front();
            for (const auto& vx : prev.vertices()) {
                lb = lb.cwiseMin(vx);
                ub = ub.cwiseMax(vx);
            }
            const double margin = 1e-6 * std::max(1.0, prev.diameter());
            auto check_precursor = [&](const Vec& x) {
                auto iv = successor_interval(x, t.z[j], mod);
                if (!iv)
                    return;
                for (double vv : {iv->first, iv->second}) {
                    const Vec succ = mod.est.A * x + mod.est.B_col * vv;
                    if (next.boundary_distance(succ) > 1e-9)
                        continue;
                    ++landed;
                    if (!faces.relint_contains_either(succ))
                        out.fail("interior successor off relint F at run " +
                                 std::to_string(r) + " step " + std::to_string(j + 1));
                }
            };

            int sampled = 0;
            while (sampled < 500) {
                Vec x(2);
                x << lb(0) + (ub(0) - lb(0)) * rng.next_unit(),
                    lb(1) + (ub(1) - lb(1)) * rng.next_unit();
                if (!prev.contains(x, 0.0) || prev.boundary_distance(x) <= margin)
                    continue;
                ++sampled;
                check_precursor(x);
            }

            // The precursors of F+- sit on the preimage fibers of the faces;
            // walking a fiber through the interior makes the claim non-vacuous.
            const Mat A_inv = mod.est.A.inverse();
            for (const Face* face : {&faces.plus, &faces.minus}) {
                if (face->is_point())
                    continue;
                const Vec mid = 0.5 * (face->vertices[0] + face->vertices[1]);
                for (int g = 0; g <= 100; ++g) {
                    const double vv = -1.0 + g / 50.0;
                    const Vec x = A_inv * (mid - mod.est.B_col * vv);
                    if (std::abs(mod.est.C_row.dot(x) + mod.est.D1 * vv - t.z[j]) > 1.0)
                        continue;
                    if (!prev.contains(x, 0.0) || prev.boundary_distance(x) <= margin)
                        continue;
                    check_precursor(x);
                }
            }
        }
    }
    if (landed == 0)
        out.fail("no interior successor reached the boundary; vacuous run");
    return out;
}

// ---------------------------------------------------------------------------
// 6. Grid brute force for successor existence against the closed criterion.
Outcome criterion6() {
    Outcome out;
    SplitMix64 rng(6006);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        const int m = 1 + i % 2;
        PlantModel mod = random_plant(rng, m);
        Vec x(m);
        for (int c = 0; c < m; ++c)
            x(c) = 8.0 * rng.next_unit() - 4.0;
        const double z = 2.0 * rng.next_unit() - 1.0;
        const double s = mod.est.C_row.dot(x);
        const double n1 = mod.spec.n1();
        const double margin = std::abs(s - z) - (std::abs(n1) + 1.0);
        if (std::abs(margin) <= 1e-9)
            continue;  // exactness not claimed on the boundary
        ++checked;

        // 201x201 grid over Q; the line meets Q iff y - n1 v - s changes sign
        // (or vanishes) over the grid, since the function is linear and the
        // extreme grid points are the square's corners.
        double lo = 1e300, hi = -1e300;
        for (int a = 0; a <= 200; ++a) {
            const double vv = -1.0 + a / 100.0;
            for (int b = 0; b <= 200; ++b) {
                const double yy = z - 1.0 + b / 100.0;
                const double f = yy - n1 * vv - s;
                lo = std::min(lo, f);
                hi = std::max(hi, f);
            }
        }
        const bool brute = lo <= 0.0 && hi >= 0.0;
        if (brute != (margin <= 0.0))
            out.fail("mismatch at case " + std::to_string(i));
    }
    if (checked < 300)
        out.fail("too many margin cases excluded");
    return out;
}

Outcome criterion7() {
    Outcome out;
    if (!g_runs_3.cardinality)
        out.fail(g_runs_3.detail);
    return out;
}

// ---------------------------------------------------------------------------
// 8. m=1 closed forms through both the oracle and the propagation path.
Outcome criterion8() {
    Outcome out;
    PlantModel mod = make_plant_model(make_vec({0, 1}), make_vec({1, -0.5}));
    auto expect = [&out](double got, double want, const std::string& what) {
        if (std::abs(got - want) > 1e-12)
            out.fail(what + ": got " + std::to_string(got));
    };

    for (double z2 : {0.0, 1.5}) {
        ProblemHistory h{mod.spec, make_vec({0}), {0.0, z2}};
        auto sets = exact_set_recursion(mod, h);
        expect(sets[0].vertices().front()(0), -1.0, "oracle S_1 lower");
        expect(sets[0].vertices().back()(0), 1.0, "oracle S_1 upper");
        const double lo = z2 == 0.0 ? -1.5 : -0.75;
        expect(sets[1].vertices().front()(0), lo, "oracle S_2 lower");
        expect(sets[1].vertices().back()(0), 1.5, "oracle S_2 upper");

        Front f = make_front(sets[0], 1, {0.0});
        Front f2 = propagate_front(f, z2, mod);
        expect(f2.polytope.vertices().front()(0), lo, "front S_2 lower");
        expect(f2.polytope.vertices().back()(0), 1.5, "front S_2 upper");
    }
    return out;
}

// ---------------------------------------------------------------------------
// 9. Dynamic-programming truncation across 100 random seeds.
Outcome criterion9() {
    Outcome out;
    SplitMix64 rng(9009);
    for (int i = 0; i < 100; ++i) {
        const int m = 1 + i % 2;
        PlantModel mod = random_plant(rng, m);
        const int kmin = std::max(2, m + 1);
        const int k = kmin + static_cast<int>(rng.next() % (9 - kmin));
        ProblemHistory h = random_feasible_history(rng, mod, k);
        if (!dp_truncation_check(mod, h, random_unit(rng, m)))
            out.fail("truncation failed at seed " + std::to_string(i));
    }
    return out;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        Outcome (*fn)();
        double budget_s;
    };
    const Entry entries[] = {
        {1, "gohberg-semencul consistency", criterion1, 5.0},
        {2, "strong duality + alignment", criterion2, 30.0},
        {3, "propagation soundness", criterion3, 60.0},
        {4, "vertex completeness vs oracle", criterion4, 120.0},
        {5, "interior propagation into relint F+-", criterion5, 60.0},
        {6, "successor criterion brute force", criterion6, 10.0},
        {7, "propagation cardinality", criterion7, 60.0},
        {8, "m=1 closed forms", criterion8, 10.0},
        {9, "dp truncation", criterion9, 60.0},
    };

    int failures = 0;
    for (const auto& e : entries) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out.fail(std::string("exception: ") + ex.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > e.budget_s)
            out.fail("runtime " + std::to_string(secs) + " s over budget");
        std::printf("%s  %d  %-40s (%.2f s)%s%s\n", out.pass ? "PASS" : "FAIL", e.id,
                    e.name, secs, out.detail.empty() ? "" : "  -- ",
                    out.detail.c_str());
        if (!out.pass)
            ++failures;
    }
    return failures == 0 ? 0 : 1;
}
