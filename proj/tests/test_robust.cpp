#include <doctest.h>

#include <random>

#include "effbudget/error.hpp"
#include "oracle.hpp"

using namespace effbudget;

namespace {

NominalInstance one_by_one(double g) {
    NominalInstance inst;
    inst.A = Matrix(1, 1, 1.0);
    inst.B = Matrix(1, 1, 1.0);
    inst.c1 = {1.0};
    inst.c2 = {2.0};
    inst.g = {g};
    inst.y_low = {3.0};
    inst.y_nom = {5.0};
    inst.y_up = {7.0};
    return inst;
}

// Conventional model in primal form: the inner max is a constant, so the
// robust objective is greedy value + min over (x, y, z) of the remaining LP.
double primal_conventional(const NominalInstance& inst, double gamma) {
    LinearProgram lp;
    const int p = inst.p(), m = inst.m();
    for (int k = 0; k < p; ++k) lp.add_var(0, inst.x_upper.empty() ? kInf : inst.x_upper[k], inst.c1[k]);
    for (int j = 0; j < m; ++j) lp.add_var(0, kInf, -inst.c2[j]);
    for (int j = 0; j < 2 * m; ++j) lp.add_var(0, 1, 0);
    for (int i = 0; i < inst.n(); ++i) {
        std::vector<std::pair<int, double>> row;
        for (int k = 0; k < p; ++k) row.push_back({k, inst.A(i, k)});
        for (int j = 0; j < m; ++j) row.push_back({p + j, inst.B(i, j)});
        lp.add_row(row, Rel::le, inst.g[i]);
    }
    std::vector<std::pair<int, double>> budget;
    for (int j = 0; j < m; ++j) {
        lp.add_row({{p + j, 1.0}, {p + m + j, -(inst.y_up[j] - inst.y_nom[j])}, {p + 2 * m + j, -(inst.y_low[j] - inst.y_nom[j])}},
                   Rel::le, inst.y_nom[j]);
        budget.push_back({p + m + j, 1.0});
        budget.push_back({p + 2 * m + j, 1.0});
    }
    lp.add_row(budget, Rel::le, gamma);
    std::vector<double> w(m);
    for (int j = 0; j < m; ++j) w[j] = inst.c2[j] * (inst.y_up[j] - inst.y_nom[j]);
    auto s = solve_lp(lp);
    REQUIRE(s.status == Status::optimal);
    return s.objective + dot(inst.c2, inst.y_nom) + oracle::greedy_knapsack(w, gamma);
}

}  // namespace

TEST_CASE("nominal 1x1 examples") {
    auto a = solve_nominal(one_by_one(10));
    CHECK(a.y[0] == doctest::Approx(5));
    CHECK(a.x[0] == doctest::Approx(0));
    CHECK(a.objective == doctest::Approx(0));
    auto b = solve_nominal(one_by_one(3));
    CHECK(b.y[0] == doctest::Approx(3));
    CHECK(b.objective == doctest::Approx(4));
    auto f = solve_full_budget(one_by_one(3));
    CHECK(f.y[0] == doctest::Approx(3));
    CHECK(f.objective == doctest::Approx(8));
}

TEST_CASE("instance validation names the violated assumption") {
    auto inst = one_by_one(3);
    inst.B(0, 0) = -1;
    try {
        inst.validate();
        FAIL("expected instance error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::instance);
        CHECK(std::string(e.what()).find("assumption 2") != std::string::npos);
    }
    inst = one_by_one(3);
    inst.c2 = {0.5};
    CHECK_THROWS_WITH_AS(inst.validate(), doctest::Contains("assumption 1"), Error);
    inst = one_by_one(3);
    inst.c1 = {-1};
    CHECK_THROWS_WITH_AS(inst.validate(), doctest::Contains("assumption 3"), Error);
    inst = one_by_one(3);
    inst.y_nom = {4};
    CHECK_THROWS_WITH_AS(inst.validate(), doctest::Contains("centering"), Error);
    inst.non_centered = true;
    CHECK_NOTHROW(inst.validate());
}

TEST_CASE("budget validation") {
    auto inst = one_by_one(3);
    BudgetSpec b;
    b.gamma = 1.5;
    CHECK_THROWS_AS(b.validate(inst), Error);
    b.gamma = -0.1;
    CHECK_THROWS_AS(b.validate(inst), Error);
    b.gamma = 1.0;
    CHECK_NOTHROW(b.validate(inst));
}

TEST_CASE("worst-case inner greedy") {
    NominalInstance inst;
    inst.A = Matrix(0, 0);
    inst.B = Matrix(0, 3);
    inst.c2 = {4, 4, 4};
    inst.y_nom = {5, 5, 2};
    inst.y_low = {0, 2, 0};
    inst.y_up = {10, 8, 4};
    BudgetSpec b;
    b.gamma = 2;
    auto wc = worst_case_inner(inst, b);
    CHECK(wc.value == doctest::Approx(32));
    CHECK(wc.z_plus == std::vector<double>{1, 1, 0});
    b.gamma = 0;
    CHECK(worst_case_inner(inst, b).value == 0);
    b.gamma = 3;
    CHECK(worst_case_inner(inst, b).value == doctest::Approx(4 * (5 + 3 + 2)));
    // Ties go to the lowest index.
    inst.y_nom = {5, 5, 5};
    inst.y_low = {0, 0, 0};
    inst.y_up = {10, 10, 10};
    b.gamma = 1.5;
    wc = worst_case_inner(inst, b);
    CHECK(wc.z_plus == std::vector<double>{1, 0.5, 0});
}

TEST_CASE("dualized conventional model matches the primal formulation and greedy") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 60; ++trial) {
        auto inst = oracle::random_instance(rng, 2 + trial % 3, 1 + trial % 3, 1 + trial % 4);
        CAPTURE(trial);
        for (double frac : {0.0, 0.3, 0.5, 1.0}) {
            BudgetSpec b;
            b.gamma = frac * inst.m();
            auto sol = solve_conventional(inst, b);
            REQUIRE(sol.status == Status::optimal);
            CHECK(sol.objective == doctest::Approx(primal_conventional(inst, b.gamma)).epsilon(1e-7));
            CHECK(sol.worst_case_term == doctest::Approx(worst_case_inner(inst, b).value).epsilon(1e-7));
        }
    }
}

TEST_CASE("conventional endpoints and monotonicity") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        auto inst = oracle::random_instance(rng, 3, 2, 3);
        CAPTURE(trial);
        BudgetSpec b0;
        auto c0 = solve_conventional(inst, b0);
        auto nom = solve_nominal(inst);
        CHECK(c0.objective == doctest::Approx(nom.objective).epsilon(1e-7));
        BudgetSpec bm;
        bm.gamma = inst.m();
        CHECK(solve_conventional(inst, bm).objective ==
              doctest::Approx(solve_full_budget(inst).objective).epsilon(1e-7));
        double prev = -kInf;
        for (int k = 0; k <= 6; ++k) {
            BudgetSpec b;
            b.gamma = inst.m() * k / 6.0;
            auto s = solve_conventional(inst, b);
            CHECK(s.objective >= prev - 1e-7);
            prev = s.objective;
            // Removing the downward deviations leaves the optimum unchanged.
            BuiltModel no_down = build_conventional(inst, b);
            for (int j = 0; j < inst.m(); ++j) no_down.mp.base.upper[no_down.lay.zm + j] = 0.0;
            CHECK(solve_built(no_down).objective == doctest::Approx(s.objective).epsilon(1e-7));
        }
    }
}

TEST_CASE("per-group budgets") {
    NominalInstance inst;
    inst.A = Matrix(0, 1);
    inst.B = Matrix(0, 4);
    inst.c1 = {0};
    inst.c2 = {1, 2, 3, 4};
    inst.y_low = {0, 0, 0, 0};
    inst.y_nom = {1, 1, 1, 1};
    inst.y_up = {2, 2, 2, 2};
    inst.budget_groups = {{0, 1}, {2, 3}};
    BudgetSpec b;
    b.per_group = {1.0, 0.5};
    CHECK(worst_case_inner(inst, b).value == doctest::Approx(2 + 2));
    auto s = solve_conventional(inst, b);
    CHECK(s.worst_case_term == doctest::Approx(4));
    b.per_group = {1.0};
    CHECK_THROWS_AS(b.validate(inst), Error);
}

TEST_CASE("insensitivity") {
    auto inst = one_by_one(3);
    BudgetSpec b;
    b.gamma = 0.5;
    auto s1 = solve_conventional(inst, b);
    CHECK(insensitivity_holds(s1, inst));
    b.gamma = 1.0;
    auto s2 = solve_conventional(inst, b);
    CHECK(s2.x[0] == doctest::Approx(s1.x[0]));
    CHECK(s2.y[0] == doctest::Approx(s1.y[0]));

    auto loose = one_by_one(100);
    auto s3 = solve_conventional(loose, b);
    CHECK_FALSE(insensitivity_holds(s3, loose));
}
