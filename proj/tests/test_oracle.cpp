#include <doctest.h>

#include "svo/oracle.hpp"
#include "svo/trajectory.hpp"
#include "test_support.hpp"

using namespace svo;
using svo::testing::make_vec;
using svo::testing::random_plant;

namespace {

PlantModel demo_plant() { return make_plant_model(make_vec({0, 1}), make_vec({1, -0.5})); }

ProblemHistory random_feasible_history(SplitMix64& rng, const PlantModel& model, int k) {
    auto [v, w] = sample_disturbances(rng.next(), k, DisturbanceLaw::Uniform);
    Vec x0(model.m());
    for (int i = 0; i < model.m(); ++i)
        x0(i) = 2.0 * rng.next_unit() - 1.0;
    Trajectory t = simulate(model, x0, v, w);
    return ProblemHistory{model.spec, x0, t.z};
}

Vec random_direction(SplitMix64& rng, int m) {
    Vec d(m);
    double nrm = 0.0;
    while (nrm < 1e-3) {
        for (int i = 0; i < m; ++i)
            d(i) = 2.0 * rng.next_unit() - 1.0;
        nrm = d.norm();
    }
    return d / nrm;
}

}  // namespace

TEST_CASE("solve_estimator") {
    PlantModel mod = demo_plant();
    ProblemHistory h{mod.spec, make_vec({0}), {0.0}};
    SUBCASE("k=1 support values") {
        auto r = solve_estimator(mod, h, make_vec({1}));
        CHECK(r.sol.value == doctest::Approx(1.0));
        CHECK(r.x_terminal(0) == doctest::Approx(1.0));
        auto l = solve_estimator(mod, h, make_vec({-1}));
        CHECK(l.sol.value == doctest::Approx(1.0));
        CHECK(l.x_terminal(0) == doctest::Approx(-1.0));
    }
    SUBCASE("zero objective accepts any feasible point") {
        auto r = solve_estimator(mod, h, make_vec({0}));
        CHECK(r.sol.value == doctest::Approx(0.0));
        CHECK(std::abs(r.x_terminal(0)) <= 1.0 + 1e-9);
    }
    SUBCASE("infeasible measurement stream throws") {
        ProblemHistory bad{mod.spec, make_vec({0}), {10.0, 0.0}};
        CHECK_THROWS_AS(solve_estimator(mod, bad, make_vec({1})), Infeasible);
    }
}

TEST_CASE("solve_regulator") {
    PlantModel mod = demo_plant();
    ProblemHistory h{mod.spec, make_vec({0}), {0.0}};
    SUBCASE("k=1 duality against the estimator") {
        auto r = solve_regulator(mod, h, make_vec({1}));
        CHECK(r.sol.value == doctest::Approx(1.0));
    }
    SUBCASE("zero target costs nothing") {
        auto r = solve_regulator(mod, h, make_vec({0}));
        CHECK(r.sol.value == doctest::Approx(0.0));
        CHECK(r.y_star.cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(r.v_star.cwiseAbs().maxCoeff() <= 1e-9);
    }
    SUBCASE("random m=2 instance matches the estimator value") {
        SplitMix64 rng(7);
        PlantModel m2 = random_plant(rng, 2);
        ProblemHistory h8 = random_feasible_history(rng, m2, 8);
        const Vec xs = random_direction(rng, 2);
        auto est = solve_estimator(m2, h8, xs);
        auto reg = solve_regulator(m2, h8, xs);
        CHECK(std::abs(est.sol.value - reg.sol.value) <=
              1e-7 * (1.0 + std::abs(est.sol.value)));
    }
}

TEST_CASE("check_alignment_optimality") {
    PlantModel mod = demo_plant();
    ProblemHistory h{mod.spec, make_vec({0}), {0.0}};
    const Vec xs = make_vec({1});
    auto est = solve_estimator(mod, h, xs);
    auto reg = solve_regulator(mod, h, xs);
    SUBCASE("optimal pairs are aligned") {
        CHECK(check_alignment_optimality(mod, h, xs, est.y, est.v, reg.y_star, reg.v_star));
    }
    SUBCASE("breaking a saturated primal breaks alignment") {
        // moving v off its bound while keeping the equality feasible requires
        // adjusting y; the perturbed pair stays feasible but is not aligned
        Vec y2 = est.y, v2 = est.v;
        v2(0) = 0.5;
        y2(0) = mod.spec.n1() * v2(0);  // keep D y - N v = B_T x0 for this plant
        if (std::abs(reg.v_star(0)) > 1e-9)
            CHECK_FALSE(check_alignment_optimality(mod, h, xs, y2, v2, reg.y_star, reg.v_star));
    }
    SUBCASE("all-zero duals with an interior primal are vacuously aligned") {
        ProblemHistory h2{mod.spec, make_vec({0}), {0.0}};
        auto est0 = solve_estimator(mod, h2, make_vec({0}));
        Vec zero = Vec::Zero(1);
        CHECK(check_alignment_optimality(mod, h2, make_vec({0}), est0.y, est0.v, zero, zero));
    }
    SUBCASE("infeasible candidate pair throws") {
        Vec y2 = est.y, v2 = est.v;
        v2(0) = 5.0;
        CHECK_THROWS_AS(
            check_alignment_optimality(mod, h, xs, y2, v2, reg.y_star, reg.v_star),
            NotFeasible);
    }
}

TEST_CASE("exact_set_recursion") {
    PlantModel mod = demo_plant();
    SUBCASE("m=1 hand fixtures") {
        ProblemHistory h1{mod.spec, make_vec({0}), {0.0}};
        auto s1 = exact_set_recursion(mod, h1);
        CHECK(s1[0].vertices().front()(0) == doctest::Approx(-1.0));
        CHECK(s1[0].vertices().back()(0) == doctest::Approx(1.0));

        ProblemHistory h2{mod.spec, make_vec({0}), {0.0, 0.0}};
        auto s2 = exact_set_recursion(mod, h2);
        CHECK(s2[1].vertices().front()(0) == doctest::Approx(-1.5));
        CHECK(s2[1].vertices().back()(0) == doctest::Approx(1.5));

        ProblemHistory h3{mod.spec, make_vec({0}), {0.0, 1.5}};
        auto s3 = exact_set_recursion(mod, h3);
        CHECK(s3[1].vertices().front()(0) == doctest::Approx(-0.75));
        CHECK(s3[1].vertices().back()(0) == doctest::Approx(1.5));
    }
    SUBCASE("inconsistent measurement reports the failing step") {
        ProblemHistory h{mod.spec, make_vec({0}), {0.0, 10.0}};
        CHECK_THROWS_AS(exact_set_recursion(mod, h), EmptySetAtStep);
        try {
            exact_set_recursion(mod, h);
        } catch (const EmptySetAtStep& e) {
            CHECK(e.step == 2);
        }
    }
    SUBCASE("support function consistency with the estimator program") {
        SplitMix64 rng(13);
        for (int m : {1, 2}) {
            PlantModel loc = random_plant(rng, m);
            ProblemHistory h = random_feasible_history(rng, loc, 2 * m + 4);
            auto sets = exact_set_recursion(loc, h);
            for (int trial = 0; trial < 5; ++trial) {
                const Vec xs = random_direction(rng, m);
                auto est = solve_estimator(loc, h, xs);
                auto sup = support(sets.back(), xs);
                CHECK(std::abs(est.sol.value - sup.value) <=
                      1e-7 * (1.0 + std::abs(sup.value)));
                // optimal terminal state sits on the boundary
                CHECK(sets.back().boundary_distance(est.x_terminal) <=
                      1e-7 * (1.0 + sets.back().diameter()));
            }
        }
    }
}

TEST_CASE("regulator multipliers equal the estimator terminal state") {
    SplitMix64 rng(19);
    for (int m : {1, 2}) {
        PlantModel loc = random_plant(rng, m);
        ProblemHistory h = random_feasible_history(rng, loc, 2 * m + 3);
        for (int trial = 0; trial < 5; ++trial) {
            const Vec xs = random_direction(rng, m);
            auto est = solve_estimator(loc, h, xs);
            auto reg = solve_regulator(loc, h, xs);
            const Vec lam_tail = reg.lambda.tail(m);
            CHECK((lam_tail - est.x_terminal).cwiseAbs().maxCoeff() <=
                  1e-7 * (1.0 + est.x_terminal.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("dp_truncation_check") {
    SUBCASE("m=1 fixture") {
        PlantModel mod = demo_plant();
        ProblemHistory h{mod.spec, make_vec({0}), {0.0, 0.0}};
        CHECK(dp_truncation_check(mod, h, make_vec({1})));
    }
    SUBCASE("zero target is vacuously consistent") {
        PlantModel mod = demo_plant();
        ProblemHistory h{mod.spec, make_vec({0}), {0.0, 0.0}};
        CHECK(dp_truncation_check(mod, h, make_vec({0})));
    }
    SUBCASE("random m=2 instances") {
        SplitMix64 rng(43);
        for (int trial = 0; trial < 20; ++trial) {
            PlantModel loc = random_plant(rng, 2);
            ProblemHistory h = random_feasible_history(rng, loc, 6);
            CHECK(dp_truncation_check(loc, h, random_direction(rng, 2)));
        }
    }
}
