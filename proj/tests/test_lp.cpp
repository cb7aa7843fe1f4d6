#include <doctest.h>

#include <random>
#include <sstream>

#include "effbudget/error.hpp"
#include "oracle.hpp"

using namespace effbudget;

namespace {

LinearProgram random_bounded_lp(std::mt19937_64& rng, int n, int rows, bool with_eq) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    LinearProgram lp;
    for (int j = 0; j < n; ++j) {
        double lo = std::round(U(rng) * 3), up = lo + 1 + std::round((U(rng) + 1) * 3);
        lp.add_var(lo, up, std::round(U(rng) * 8) / 2);
    }
    for (int i = 0; i < rows; ++i) {
        std::vector<std::pair<int, double>> c;
        for (int j = 0; j < n; ++j)
            if (U(rng) > -0.3) c.push_back({j, std::round(U(rng) * 6) / 2});
        double u = U(rng);
        Rel rel = (with_eq && i == 0) ? Rel::eq : (u < 0 ? Rel::le : Rel::ge);
        lp.add_row(std::move(c), rel, std::round(U(rng) * 8) / 2);
    }
    return lp;
}

}  // namespace

TEST_CASE("simplex matches vertex enumeration on random bounded LPs") {
    std::mt19937_64 rng(7);
    int feasible = 0, infeasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        int n = 2 + trial % 4, rows = 1 + trial % 5;
        LinearProgram lp = random_bounded_lp(rng, n, rows, trial % 3 == 0);
        auto ref = oracle::vertex_min(lp);
        auto sol = solve_lp(lp);
        CAPTURE(trial);
        if (!ref) {
            CHECK(sol.status == Status::infeasible);
            ++infeasible;
            continue;
        }
        ++feasible;
        REQUIRE(sol.status == Status::optimal);
        CHECK(sol.objective == doctest::Approx(*ref).epsilon(1e-7));
        CHECK(check_feasible(lp, sol.primal).feasible);
        CHECK(dual_objective(lp, sol) == doctest::Approx(sol.objective).epsilon(1e-7));
    }
    CHECK(feasible > 100);
    CHECK(infeasible > 5);
}

TEST_CASE("row duals follow the minimization sign convention") {
    LinearProgram lp;
    int x = lp.add_var(0, kInf, 1.0), y = lp.add_var(0, kInf, 2.0);
    lp.add_row({{x, 1}, {y, 1}}, Rel::ge, 3.0);
    lp.add_row({{x, 1}}, Rel::le, 2.0);
    auto s = solve_lp(lp);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.objective == doctest::Approx(4.0));
    CHECK(s.duals[0] == doctest::Approx(2.0));
    CHECK(s.duals[1] == doctest::Approx(-1.0));
}

TEST_CASE("infeasible LP returns a Farkas certificate") {
    LinearProgram lp;
    int x = lp.add_var(0, kInf, 1.0);
    lp.add_row({{x, 1}}, Rel::ge, 5.0);
    lp.add_row({{x, 1}}, Rel::le, 3.0);
    auto s = solve_lp(lp);
    REQUIRE(s.status == Status::infeasible);
    REQUIRE(s.certificate.size() == 2);
    // y >= 0 on the >= row, <= 0 on the <= row, y'A = 0 on a column free to grow, y'b > 0.
    double yA = s.certificate[0] + s.certificate[1];
    double yb = 5.0 * s.certificate[0] + 3.0 * s.certificate[1];
    CHECK(s.certificate[0] >= -1e-12);
    CHECK(s.certificate[1] <= 1e-12);
    CHECK(yA <= 1e-9);
    CHECK(yb > 1e-9);
}

TEST_CASE("unbounded LP returns an improving ray") {
    LinearProgram lp;
    int x = lp.add_var(0, kInf, -1.0), y = lp.add_var(0, kInf, 0.0);
    lp.add_row({{x, 1}, {y, -1}}, Rel::le, 1.0);
    auto s = solve_lp(lp);
    REQUIRE(s.status == Status::unbounded);
    REQUIRE(s.certificate.size() == 2);
    CHECK(-s.certificate[0] < 0.0);
    CHECK(s.certificate[0] - s.certificate[1] <= 1e-9);
}

TEST_CASE("degenerate cycling example terminates") {
    // Beale's example cycles under pure Dantzig pricing with naive ties.
    LinearProgram lp;
    int x1 = lp.add_var(0, kInf, -0.75), x2 = lp.add_var(0, kInf, 150), x3 = lp.add_var(0, kInf, -0.02),
        x4 = lp.add_var(0, kInf, 6);
    lp.add_row({{x1, 0.25}, {x2, -60}, {x3, -0.04}, {x4, 9}}, Rel::le, 0);
    lp.add_row({{x1, 0.5}, {x2, -90}, {x3, -0.02}, {x4, 3}}, Rel::le, 0);
    lp.add_row({{x3, 1}}, Rel::le, 1);
    auto s = solve_lp(lp);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.objective == doctest::Approx(-0.05));
}

TEST_CASE("iteration cap raises solver stall") {
    std::mt19937_64 rng(3);
    LinearProgram lp = random_bounded_lp(rng, 6, 6, false);
    SolverOptions opt;
    opt.iteration_cap = 0;
    bool trivially_optimal = false;
    try {
        auto s = solve_lp(lp, opt);
        trivially_optimal = s.iterations == 0;
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::solver_stalled);
        return;
    }
    CHECK(trivially_optimal);
}

TEST_CASE("malformed LP data raises model error") {
    LinearProgram lp;
    lp.add_var(0, 1, std::nan(""));
    CHECK_THROWS_AS(solve_lp(lp), Error);
    LinearProgram crossed;
    crossed.add_var(2, 1, 0);
    try {
        solve_lp(crossed);
        FAIL("expected model error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::model);
    }
}

TEST_CASE("branch and bound matches enumeration") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        MixedProgram mp;
        int n = 3 + trial % 6;
        for (int j = 0; j < n; ++j) {
            mp.base.add_var(0, j % 2 ? 1 : 3, -std::round(U(rng) * 10));
            if (j % 3 != 2) mp.mark_integer(j);
        }
        for (int i = 0; i < 3; ++i) {
            std::vector<std::pair<int, double>> c;
            for (int j = 0; j < n; ++j) c.push_back({j, std::round(U(rng) * 6) + 1});
            mp.base.add_row(std::move(c), Rel::le, std::round(U(rng) * 10) + 3);
        }
        auto ref = oracle::milp_enumerate(mp);
        auto s = solve_milp(mp);
        CAPTURE(trial);
        REQUIRE(ref.has_value());
        REQUIRE(s.status == Status::optimal);
        CHECK(s.objective == doctest::Approx(*ref).epsilon(1e-7));
        for (int k : mp.integral_vars) CHECK(s.primal[k] == std::round(s.primal[k]));
        ++checked;
    }
    CHECK(checked == 60);
}

TEST_CASE("fixed-format MPS export") {
    MixedProgram mp;
    int x = mp.base.add_var(0, 4, 1.0), b = mp.base.add_var(0, 1, -2.0), f = mp.base.add_var(-kInf, kInf, 0.5);
    mp.mark_binary(b);
    mp.base.add_row({{x, 1}, {b, 3}, {f, 1}}, Rel::le, 5);
    mp.base.add_row({{x, 1}, {f, -1}}, Rel::eq, 1);
    mp.base.add_row({{x, 2}}, Rel::ge, -1);
    mp.base.offset = 3.0;
    std::ostringstream os;
    write_mps(os, mp, "TEST");
    std::string s = os.str();
    CHECK(s.find("NAME          TEST") == 0);
    CHECK(s.find("ROWS") != std::string::npos);
    CHECK(s.find(" N  OBJ") != std::string::npos);
    CHECK(s.find(" L  R0000001") != std::string::npos);
    CHECK(s.find(" E  R0000002") != std::string::npos);
    CHECK(s.find(" G  R0000003") != std::string::npos);
    CHECK(s.find("'INTORG'") != std::string::npos);
    CHECK(s.find("'INTEND'") != std::string::npos);
    CHECK(s.find(" BV BND       C0000002") != std::string::npos);
    CHECK(s.find(" FR BND       C0000003") != std::string::npos);
    CHECK(s.find(" UP BND       C0000001") != std::string::npos);
    CHECK(s.find("ENDATA") != std::string::npos);
}
