#include <doctest.h>

#include <cmath>
#include <random>

#include "effbudget/ellipsoid.hpp"
#include "effbudget/error.hpp"
#include "ellipsoid_oracle.hpp"

using namespace effbudget;
using namespace oracle;

TEST_CASE("bounding box of an axis-aligned ellipsoid") {
    BudgetedEllipsoid ell{{5, 5, 2}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {3, 2, 1}, 1.5, 2.0};
    auto [lo, up] = bounding_box(ell);
    CHECK(up == Vec{9.5, 8, 3.5});
    CHECK(lo == Vec{0.5, 2, 0.5});
    CHECK(axis_intercepts(ell) == up);
    ell.gamma = 0;
    auto [lo0, up0] = bounding_box(ell);
    CHECK(lo0 == ell.center);
    CHECK(up0 == ell.center);
}

TEST_CASE("bounding box of a rotated ellipsoid matches boundary samples") {
    const double pi = std::acos(-1.0);
    BudgetedEllipsoid ell{{0, 0}, rotation2(pi / 4), {2, 1}, 1.0, 3.0};
    auto [lo, up] = bounding_box(ell);
    Vec mx{-kInf, -kInf}, mn{kInf, kInf};
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        double th = 2 * pi * k / n, a = 2 * std::cos(th), b = std::sin(th);
        for (int i = 0; i < 2; ++i) {
            double y = a * ell.axes[0][i] + b * ell.axes[1][i];
            mx[i] = std::max(mx[i], y);
            mn[i] = std::min(mn[i], y);
        }
    }
    for (int i = 0; i < 2; ++i) {
        CHECK(up[i] == doctest::Approx(mx[i]).epsilon(1e-3));
        CHECK(lo[i] == doctest::Approx(mn[i]).epsilon(1e-3));
    }
}

TEST_CASE("bounding box contains sampled points of random ellipsoids") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.2, 3.0);
    for (int e = 0; e < 20; ++e) {
        int n = 2 + e % 3;
        BudgetedEllipsoid ell;
        for (int i = 0; i < n; ++i) ell.center.push_back(10 * U(rng));
        ell.axes = e % 4 == 0 ? std::vector<Vec>{} : random_axes(rng, n);
        if (ell.axes.empty()) {
            ell.axes.assign(n, Vec(n, 0.0));
            for (int i = 0; i < n; ++i) ell.axes[i][i] = 1.0;
        }
        for (int i = 0; i < n; ++i) ell.lengths.push_back(U(rng));
        ell.gamma = U(rng);
        auto [lo, up] = bounding_box(ell);
        int outside = 0;
        Vec mx(n, -kInf);
        for (int s = 0; s < 100000; ++s) {
            Vec y = sample_point(rng, ell);
            for (int i = 0; i < n; ++i) {
                if (y[i] > up[i] + 1e-12 || y[i] < lo[i] - 1e-12) ++outside;
                mx[i] = std::max(mx[i], y[i]);
            }
        }
        CAPTURE(e);
        CHECK(outside == 0);
        // The box is tight: samples come close to every face.
        for (int i = 0; i < n; ++i) CHECK(up[i] - mx[i] <= 0.2 * (up[i] - ell.center[i]) + 1e-12);
    }
}

TEST_CASE("ellipsoid validation") {
    BudgetedEllipsoid ell{{0, 0}, {{1, 0}, {1, 0}}, {1, 1}, 1.0, 1.0};
    CHECK_THROWS_WITH_AS(ell.validate(), doctest::Contains("orthonormal"), Error);
    ell.axes = {{1, 0}, {0, 1}};
    ell.lengths = {1, 0};
    CHECK_THROWS_AS(ell.validate(), Error);
    ell.lengths = {1, 1};
    ell.budget = 3;
    CHECK_THROWS_AS(ell.validate(), Error);
}

TEST_CASE("ellipsoidal classification") {
    BudgetedEllipsoid ell{{5, 5, 5}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {4, 4, 4}, 1.0, 6.0};
    AdmissibleInterval iv;
    iv.s_low = {1, 1, 1};
    iv.s_up = {9, 7, 1};
    CHECK(classify_ellipsoid(ell, iv, {1, 1, 1}) == std::vector<int>{1, 2, 4});
    iv.s_up = {9, 3, 5};
    CHECK(classify_ellipsoid(ell, iv, {1, 1, 1}) == std::vector<int>{1, 3, 3});
    iv.s_low = {0.5, 1, 1};
    CHECK_THROWS_AS(classify_ellipsoid(ell, iv, {1, 1, 1}), Error);

    // Uncoupled resources: everything reachable, case 1 throughout.
    NominalInstance inst;
    inst.A = Matrix(1, 1, -1.0);
    inst.B = Matrix(1, 2, 0.0);
    inst.g = {0};
    inst.c1 = {1};
    inst.c2 = {2, 2};
    inst.x_upper = {1};
    inst.y_low = {0, 0};
    inst.y_nom = {0, 0};
    inst.y_up = {0, 0};
    const double pi = std::acos(-1.0);
    BudgetedEllipsoid rot{{5, 5}, rotation2(pi / 6), {2, 1}, 1.0, 2.0};
    auto p = solve_ellipsoid(inst, rot);
    CHECK(p.cases == std::vector<int>{1, 1});
    CHECK(p.effective.I == std::vector<int>{0, 1});
}

TEST_CASE("a binding capacity row gives case 2") {
    // Row y0 - x <= 7 with x <= 1 caps y0 at 8, below the intercept 9.
    NominalInstance inst;
    inst.A = Matrix(1, 1, -1.0);
    inst.B = Matrix(1, 2, 0.0);
    inst.B(0, 0) = 1.0;
    inst.g = {7};
    inst.c1 = {1};
    inst.c2 = {2, 2};
    inst.x_upper = {1};
    inst.y_low = inst.y_nom = inst.y_up = {0, 0};
    BudgetedEllipsoid ell{{5, 5}, {{1, 0}, {0, 1}}, {4, 4}, 1.0, 4.0};
    auto p = solve_ellipsoid(inst, ell);
    CHECK(p.interval.s_up[0] == doctest::Approx(8));
    CHECK(p.cases == std::vector<int>{2, 1});
    CHECK(p.effective.lengths[0] == doctest::Approx(3));
    CHECK(p.effective.lengths[1] == doctest::Approx(4));
}

TEST_CASE("effective ellipsoid index sets") {
    BudgetedEllipsoid ell{{5, 5, 5}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {4, 4, 4}, 1.0, 6.0};
    AdmissibleInterval iv;
    iv.s_low = {1, 1, 1};
    iv.s_up = {9, 3, 6};
    auto e = effective_ellipsoid(ell, iv);
    CHECK(e.I == std::vector<int>{0, 2});
    CHECK(e.Ic == std::vector<int>{1});
    CHECK(e.lengths == Vec{4, 0, 1});
    CHECK_FALSE(e.degenerate);
    iv.s_up = {5, 3, 1};
    CHECK(effective_ellipsoid(ell, iv).degenerate);
}

TEST_CASE("stage 2 with zero radius is the capped deterministic model") {
    auto inst = shared_capacity(9, 2, {2, 3});
    BudgetedEllipsoid ell{{5, 5}, rotation2(0.4), {2, 1.5}, 0.0, 2.0};
    AdmissibleInterval iv;
    iv.s_low = {0, 0};
    iv.s_up = {6, 4};
    auto e = effective_ellipsoid(ell, iv);
    auto sol = solve_ellipsoid_stage2(inst, e);
    REQUIRE(sol.solution.status == Status::optimal);
    auto ref = solve_built(build_with_caps(inst, {5, 4}));
    CHECK(sol.solution.objective == doctest::Approx(ref.objective));
    CHECK(sol.cuts == 0);
}

TEST_CASE("single effective axis reduces to the box full-budget model") {
    auto inst = shared_capacity(9, 2, {2, 3});
    BudgetedEllipsoid ell{{5, 5}, {{1, 0}, {0, 1}}, {3, 3}, 1.0, 6.0};
    AdmissibleInterval iv;
    iv.s_low = {0, 0};
    iv.s_up = {7, 4};
    auto e = effective_ellipsoid(ell, iv);
    REQUIRE(e.I == std::vector<int>{0});
    auto sol = solve_ellipsoid_stage2(inst, e);
    auto ref = solve_built(build_with_caps(inst, iv.s_up));
    CHECK(sol.solution.objective == doctest::Approx(ref.objective).epsilon(1e-6));
}

TEST_CASE("cutting-plane stage 2 matches a boundary grid search") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        CAPTURE(trial);
        auto inst = shared_capacity(8 + 4 * U(rng), 1 + 2 * U(rng), {1.5 + 2 * U(rng), 1.5 + 2 * U(rng)});
        BudgetedEllipsoid ell{{5, 5}, rotation2(3.0 * U(rng)), {1 + U(rng), 1 + U(rng)}, 0.5 + U(rng), 0.0};
        ell.budget = 0.3 + 1.5 * U(rng);
        AdmissibleInterval iv;
        iv.s_low = {0, 0};
        iv.s_up = {6 + 2 * U(rng), 5.5 + 2 * U(rng)};
        auto e = effective_ellipsoid(ell, iv);
        REQUIRE(e.I.size() == 2);
        auto sol = solve_ellipsoid_stage2(inst, e);
        REQUIRE(sol.solution.status == Status::optimal);
        double oracle = grid_stage2(inst, e, 10000);
        CHECK(sol.solution.objective == doctest::Approx(oracle).epsilon(1e-4));
        // Returned deviations satisfy both constraints.
        for (const Vec* mu : {&sol.worst_mu, &sol.plan_mu}) {
            double q = 0, l1 = 0;
            for (int j : e.I) {
                q += std::pow((*mu)[j] / e.lengths[j], 2);
                l1 += std::fabs((*mu)[j]);
            }
            CHECK(q <= e.gamma * e.gamma * (1 + 1e-6));
            CHECK(l1 <= e.budget + 1e-6);
        }
    }
}

TEST_CASE("cut cap reports a stalled solver") {
    auto inst = shared_capacity(9, 2, {2, 3});
    BudgetedEllipsoid ell{{5, 5}, rotation2(0.3), {2, 1.5}, 1.0, 3.0};
    AdmissibleInterval iv;
    iv.s_low = {0, 0};
    iv.s_up = {7, 7};
    auto e = effective_ellipsoid(ell, iv);
    EllipsoidOptions opt;
    opt.max_cuts = 1;
    try {
        solve_ellipsoid_stage2(inst, e, opt);
        FAIL("expected stall");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::solver_stalled);
        CHECK(std::string(err.what()).find("best bound") != std::string::npos);
    }
}

TEST_CASE("plan stays put once the capacity row binds") {
    // Sum of resources limited to 11 by the row; any deviation budget that
    // already lets the caps reach 11 leaves the plan unchanged.
    auto inst = shared_capacity(10, 1, {2, 3});
    BudgetedEllipsoid ell{{5, 5}, {{1, 0}, {0, 1}}, {3, 3}, 1.0, 1.0};
    AdmissibleInterval iv;
    iv.s_low = {0, 0};
    iv.s_up = {8, 8};
    auto a = solve_ellipsoid_stage2(inst, effective_ellipsoid(ell, iv));
    ell.gamma = 1.5;
    ell.budget = 2.5;
    auto b = solve_ellipsoid_stage2(inst, effective_ellipsoid(ell, iv));
    REQUIRE(a.solution.status == Status::optimal);
    REQUIRE(b.solution.status == Status::optimal);
    CHECK(a.solution.x[0] == doctest::Approx(1));
    CHECK(b.solution.x[0] == doctest::Approx(a.solution.x[0]));
    CHECK(a.solution.y[0] + a.solution.y[1] == doctest::Approx(11));
    CHECK(b.solution.y[0] + b.solution.y[1] == doctest::Approx(11));
    CHECK(b.solution.worst_case_term > a.solution.worst_case_term);
}
