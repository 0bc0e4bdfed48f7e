#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ddetc/lmi.hpp"

#include <cmath>
#include <random>

using namespace ddetc;
using namespace ddetc::lmi;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix M(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) M(i, j) = g(rng);
    return M;
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace

TEST_CASE("affine expressions evaluate and assemble blocks") {
    Problem p;
    auto y = p.add_scalar("y");
    auto X = p.add_symmetric("X", 2);
    auto Z = p.add_matrix("Z", 2, 1);
    CHECK(p.num_variables() == 1 + 3 + 2);

    Vector x(6);
    x << 3.0, 1.0, 2.0, 4.0, -1.0, 5.0;
    Matrix Xv = X.evaluate(x);
    CHECK(Xv(0, 0) == 1.0);
    CHECK(Xv(1, 0) == 2.0);
    CHECK(Xv(0, 1) == 2.0);
    CHECK(Xv(1, 1) == 4.0);
    CHECK(Z.evaluate(x)(1, 0) == 5.0);

    auto blk = Expr::block({{X, Z}, {Z.transpose(), Expr::scalar_times(y, scalar(2.0))}});
    Matrix B = blk.evaluate(x);
    CHECK(B.rows() == 3);
    CHECK(B(2, 2) == 6.0);
    CHECK(B(0, 2) == -1.0);
    CHECK(B(2, 1) == 5.0);

    Matrix L = Matrix::Identity(2, 2) * 2.0;
    CHECK((L * X * L).evaluate(x) == 4.0 * Xv);
    CHECK((X - X).evaluate(x).norm() == 0.0);
    CHECK_THROWS_AS(X + Z, Error);
}

TEST_CASE("scalar strict inequality") {
    Problem p;
    auto y = p.add_scalar("y");
    p.add_nsd("2y<0", 2.0 * y);
    auto sol = solve(p);
    REQUIRE(sol.feasible());
    CHECK(sol.scalar(y) < 0.0);
    CHECK(2.0 * sol.scalar(y) <= -p.constraints()[0].shift);
}

TEST_CASE("scalar-plant stabilization program") {
    // X1 = [2 1], X0 = [1 2]; the hand check gives 2y1 + y2 < 0 and y1 + 2y2 > 0.
    Matrix X1(1, 2), X0(1, 2);
    X1 << 2, 1;
    X0 << 1, 2;
    Problem p;
    auto Y = p.add_matrix("Y", 2, 1);
    auto X1Y = X1 * Y;
    p.add_nsd("lyap", X1Y + X1Y.transpose());
    p.add_psd("pos", X0 * Y);
    auto sol = solve(p);
    REQUIRE(sol.feasible());
    Matrix Yv = sol.value(Y);
    CHECK(2 * Yv(0, 0) + Yv(1, 0) < 0.0);
    CHECK(Yv(0, 0) + 2 * Yv(1, 0) > 0.0);
    // The suggested point (-1, 1) satisfies the same program.
    Vector y0(2);
    y0 << -1.0, 1.0;
    for (const auto& r : verify(p, y0)) CHECK(r.satisfied);
}

TEST_CASE("I <= -I is infeasible") {
    Problem p;
    auto y = p.add_scalar("y");
    p.add_nsd("I+I", Expr(Matrix::Identity(2, 2) * 2.0) + 0.0 * Expr::scalar_times(y, Matrix::Identity(2, 2)), false);
    auto sol = solve(p);
    CHECK(sol.status == Status::Infeasible);
}

TEST_CASE("maximize the smallest eigenvalue") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix R = random_matrix(rng, 4, 4);
        Matrix A = R * R.transpose() + 0.1 * Matrix::Identity(4, 4);
        double oracle = linalg::lambda_min_sym(A);
        Problem p;
        auto t = p.add_scalar("t");
        p.add_psd("A-tI", Expr(A) - Expr::scalar_times(t, Matrix::Identity(4, 4)), false);
        p.maximize(t);
        auto sol = solve(p);
        REQUIRE(sol.feasible());
        CHECK(sol.objective == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("maximize with a strict constraint approaches the supremum from inside") {
    // [1 t; t 1] > 0 has supremum t = 1.
    Problem p;
    auto t = p.add_scalar("t");
    Expr one(Matrix::Ones(1, 1));
    p.add_psd("pd", Expr::block({{one, t}, {t, one}}));
    p.maximize(t);
    auto sol = solve(p);
    REQUIRE(sol.feasible());
    CHECK(sol.objective < 1.0);
    CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("equalities are eliminated exactly") {
    // Find a 2x2 P with P v = w, P > 0, maximizing -P22.
    Problem p;
    auto P = p.add_symmetric("P", 2);
    Matrix v(2, 1), w(2, 1);
    v << 1.0, 0.0;
    w << 2.0, 0.5;
    p.add_equality("Pv=w", P * v - Expr(w));
    p.add_psd("P>0", P);
    Matrix e2(2, 1);
    e2 << 0.0, 1.0;
    p.maximize(-1.0 * (e2.transpose() * P * e2));
    auto sol = solve(p);
    REQUIRE(sol.feasible());
    Matrix Pv = sol.value(P);
    CHECK((Pv * v - w).norm() < 1e-9);
    // P11 = 2, P12 = 0.5, P22 > 0.125, so the supremum is approached at 0.125
    CHECK(Pv(1, 1) == doctest::Approx(0.125).epsilon(1e-4));
}

TEST_CASE("inconsistent equalities are infeasible") {
    Problem p;
    auto y = p.add_scalar("y");
    p.add_equality("y=1", y - Expr(scalar(1.0)));
    p.add_equality("y=2", y - Expr(scalar(2.0)));
    CHECK(solve(p).status == Status::Infeasible);
}

TEST_CASE("solver residuals agree with independent recomputation") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix A = random_matrix(rng, 3, 3);
        // Lyapunov-type program A P + P A^T < 0 with P > 0 for a shifted-stable A.
        A -= (linalg::max_real_eig(A) + 0.5) * Matrix::Identity(3, 3);
        Problem p;
        auto P = p.add_symmetric("P", 3);
        auto AP = A * P;
        p.add_nsd("lyap", AP + AP.transpose());
        p.add_psd("P", P - Matrix::Identity(3, 3), false);
        auto sol = solve(p);
        REQUIRE(sol.feasible());
        auto res = verify(p, sol.x);
        for (std::size_t i = 0; i < res.size(); ++i) {
            CHECK(res[i].max_eig <= kVerifyTol);
            CHECK(res[i].max_eig == doctest::Approx(sol.residuals[i].max_eig));
        }
        Matrix Pv = sol.value(P);
        CHECK(linalg::lambda_max_sym(A * Pv + Pv * A.transpose()) < 0.0);
    }
}

TEST_CASE("problem dump lists variables and constraints") {
    Problem p;
    auto y = p.add_scalar("y");
    p.add_nsd("c", y);
    p.maximize(y);
    auto s = p.dump();
    CHECK(s.find("var y scalar") != std::string::npos);
    CHECK(s.find("nsd c strict") != std::string::npos);
    CHECK(s.find("maximize") != std::string::npos);
}

TEST_CASE("Schur complement predicate") {
    CHECK(schur_nsd_equivalent(scalar(-1), scalar(0), scalar(-1)));
    CHECK_FALSE(schur_nsd_equivalent(scalar(1), scalar(0), scalar(-1)));
    CHECK_FALSE(schur_nsd_equivalent(scalar(-1), scalar(2), scalar(-1)));
    CHECK_THROWS_WITH_AS(schur_nsd_equivalent(scalar(-1), scalar(0), scalar(0)), "Schur pivot singular", Error);
}

TEST_CASE("Schur predicate agrees with the full eigenvalue test") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> dim(1, 4);
    int agree = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        int p = dim(rng), q = dim(rng);
        Matrix R = random_matrix(rng, q, q);
        Matrix A22 = -(R * R.transpose()) - 1e-3 * Matrix::Identity(q, q) - 0.1 * Matrix::Identity(q, q);
        Matrix A12 = random_matrix(rng, p, q, 0.5);
        Matrix R1 = random_matrix(rng, p, p);
        Matrix A11 = linalg::sym(R1) - 1.5 * Matrix::Identity(p, p);
        Matrix full(p + q, p + q);
        full << A11, A12, A12.transpose(), A22;
        bool direct = linalg::lambda_max_sym(full) <= 0.0;
        agree += schur_nsd_equivalent(A11, A12, A22) == direct;
    }
    CHECK(agree == 1000);
}

TEST_CASE("Petersen bound") {
    Matrix I1 = Matrix::Identity(1, 1);
    Matrix R = petersen_upper_bound(I1, I1, I1, 1.0);
    CHECK(R(0, 0) == 2.0);
    // B D^T C + C^T D B^T at D = 1
    CHECK(R(0, 0) - 2.0 == 0.0);
    CHECK_THROWS_WITH_AS(petersen_upper_bound(I1, I1, I1, 0.0), "invalid multiplier", Error);

    Matrix Rz = petersen_upper_bound(Matrix::Ones(2, 3), Matrix::Ones(2, 2), Matrix::Identity(2, 2), 0.3);
    CHECK(linalg::lambda_min_sym(Rz) >= -1e-12);
}

TEST_CASE("Petersen dominance on random draws") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> dim(1, 4);
    std::uniform_real_distribution<double> logeps(-3.0, 3.0);
    double worst = 1e300;
    for (int trial = 0; trial < 1000; ++trial) {
        int n = dim(rng), p = dim(rng), q = dim(rng), s = dim(rng);
        Matrix B = random_matrix(rng, n, p);
        Matrix C = random_matrix(rng, q, n);
        Matrix Delta = random_matrix(rng, q, s);
        Matrix D = sample_disturbance_matrix(Delta, p, static_cast<std::uint64_t>(trial));
        double eps = std::pow(10.0, logeps(rng));
        Matrix lhs = B * D.transpose() * C + C.transpose() * D * B.transpose();
        Matrix R = petersen_upper_bound(B, C, Delta, eps);
        double slack = linalg::lambda_min_sym(R - lhs) / (1.0 + R.norm());
        worst = std::min(worst, slack);
    }
    CHECK(worst >= -1e-8);
}

TEST_CASE("sampled disturbance matrices belong to the set") {
    Matrix Z = Matrix::Zero(2, 2);
    CHECK(sample_disturbance_matrix(Z, 5, 1).norm() == 0.0);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Matrix D = sample_disturbance_matrix(Matrix::Identity(1, 1), 1, seed);
        CHECK(std::abs(D(0, 0)) <= 1.0);
    }
    std::mt19937_64 rng(2);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Matrix Delta = random_matrix(rng, 3, 2);
        Matrix D = sample_disturbance_matrix(Delta, 7, seed);
        CHECK(D.rows() == 3);
        CHECK(D.cols() == 7);
        CHECK(linalg::lambda_min_sym(Delta * Delta.transpose() - D * D.transpose()) >= -1e-9);
    }
}
