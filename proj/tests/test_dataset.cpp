#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ddetc/dataset.hpp"

#include <algorithm>
#include <cmath>

using namespace ddetc;

namespace {

PlantModel example_plant() {
    PlantModel p;
    p.A.resize(2, 2);
    p.A << 0.0, 0.0, -1.0, -2.0;
    p.B.resize(2, 1);
    p.B << 1.0, 0.0;
    return p;
}

PlantModel scalar_plant(double a, double b) {
    PlantModel p;
    p.A = Matrix::Constant(1, 1, a);
    p.B = Matrix::Constant(1, 1, b);
    return p;
}

}  // namespace

TEST_CASE("experiment on the two-state benchmark plant is rich") {
    ExperimentConfig cfg;
    cfg.Ts = 0.1;
    cfg.T = 10;
    cfg.seed = 7;
    auto dm = run_experiment(example_plant(), cfg);
    CHECK(dm.T() == 10);
    CHECK(dm.n() == 2);
    CHECK(dm.m() == 1);
    auto rep = check_richness(dm);
    CHECK(rep.pass);
    CHECK(rep.rank == 3);
    CHECK(rep.required_rank == 3);
    CHECK(rep.smallest_singular_value > 0.0);
}

TEST_CASE("zero dynamics keep the state frozen") {
    ExperimentConfig cfg;
    cfg.T = 5;
    cfg.x0_lo = cfg.x0_hi = 1.0;
    cfg.input_lo = cfg.input_hi = 0.0;
    auto dm = run_experiment(scalar_plant(0.0, 0.0), cfg);
    CHECK((dm.X0.array() == 1.0).all());
    CHECK((dm.X1.array() == 0.0).all());
}

TEST_CASE("derivative samples evaluate the vector field") {
    // dx/dt = x + u at (x,u) = (1,1) and (2,-1).
    std::vector<Sample> s{{Vector::Constant(1, 1.0), Vector::Constant(1, 1.0), Vector::Constant(1, 1.0 + 1.0)},
                          {Vector::Constant(1, -1.0), Vector::Constant(1, 2.0), Vector::Constant(1, 2.0 - 1.0)}};
    auto dm = assemble_matrices(s, 0.1);
    CHECK(dm.X1(0, 0) == 2.0);
    CHECK(dm.X1(0, 1) == 1.0);
    auto p = scalar_plant(1.0, 1.0);
    Matrix resid = dm.X1 - p.A * dm.X0 - p.B * dm.U0;
    CHECK(resid.norm() == 0.0);
}

TEST_CASE("assemble_matrices stacks columns in order") {
    std::vector<Sample> s{{Vector::Constant(1, 1.0), Vector::Constant(1, 1.0), Vector::Constant(1, 2.0)},
                          {Vector::Constant(1, -1.0), Vector::Constant(1, 2.0), Vector::Constant(1, 1.0)}};
    auto dm = assemble_matrices(s, 0.1);
    CHECK(dm.U0(0, 0) == 1.0);
    CHECK(dm.U0(0, 1) == -1.0);
    CHECK(dm.X0(0, 0) == 1.0);
    CHECK(dm.X0(0, 1) == 2.0);
    CHECK(dm.T() == 2);

    CHECK_THROWS_WITH_AS(assemble_matrices({}, 0.1), "empty sample list", Error);

    Sample one{Vector::Ones(2), Vector::Ones(1), Vector::Ones(1)};
    auto dm2 = assemble_matrices({one}, 0.1);
    CHECK(dm2.U0.rows() == 2);
    CHECK(dm2.U0.cols() == 1);

    Sample ragged{Vector::Ones(1), Vector::Ones(2), Vector::Ones(2)};
    CHECK_THROWS_WITH_AS(assemble_matrices({one, ragged}, 0.1), "inconsistent sample shapes", Error);
}

TEST_CASE("richness verdicts") {
    DataMatrices a;
    a.U0 = Matrix(1, 2);
    a.U0 << 1, 0;
    a.X0 = Matrix(1, 2);
    a.X0 << 0, 1;
    a.X1 = Matrix::Zero(1, 2);
    CHECK(check_richness(a).pass);

    DataMatrices b;
    b.U0 = Matrix(1, 2);
    b.U0 << 1, 2;
    b.X0 = Matrix(1, 2);
    b.X0 << 2, 4;
    b.X1 = Matrix::Zero(1, 2);
    auto rep = check_richness(b);
    CHECK(rep.rank == 1);
    CHECK_FALSE(rep.pass);
}

TEST_CASE("richness is invariant under column permutation") {
    ExperimentConfig cfg;
    cfg.T = 8;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        cfg.seed = seed;
        auto dm = run_experiment(example_plant(), cfg);
        auto ref = check_richness(dm);
        DataMatrices perm = dm;
        std::vector<int> idx(static_cast<std::size_t>(dm.T()));
        for (int i = 0; i < dm.T(); ++i) idx[static_cast<std::size_t>(i)] = i;
        std::reverse(idx.begin(), idx.end());
        std::rotate(idx.begin(), idx.begin() + 3, idx.end());
        for (int i = 0; i < dm.T(); ++i) {
            perm.U0.col(i) = dm.U0.col(idx[static_cast<std::size_t>(i)]);
            perm.X0.col(i) = dm.X0.col(idx[static_cast<std::size_t>(i)]);
            perm.X1.col(i) = dm.X1.col(idx[static_cast<std::size_t>(i)]);
        }
        auto rep = check_richness(perm);
        CHECK(rep.pass == ref.pass);
        CHECK(rep.rank == ref.rank);
        CHECK(rep.smallest_singular_value == doctest::Approx(ref.smallest_singular_value).epsilon(1e-12));
    }
}

TEST_CASE("insufficient samples and divergence are reported") {
    ExperimentConfig cfg;
    cfg.T = 2;
    CHECK_THROWS_WITH_AS(run_experiment(example_plant(), cfg), "insufficient samples", Error);

    ExperimentConfig wild;
    wild.T = 5;
    wild.Ts = 50.0;
    CHECK_THROWS_WITH_AS(run_experiment(scalar_plant(40.0, 1.0), wild), "experiment diverged", Error);
}

TEST_CASE("disturbance bound from amplitude") {
    auto z = disturbance_bound_from_amplitude(0.0, 10, 2);
    CHECK(z.Delta.norm() == 0.0);
    CHECK(z.contains(Matrix::Zero(2, 10)));
    Matrix D = Matrix::Zero(2, 10);
    D(0, 3) = 1e-3;
    CHECK_FALSE(z.contains(D));

    auto a = disturbance_bound_from_amplitude(0.1, 10, 2);
    CHECK(a.Delta(0, 0) == doctest::Approx(0.3162).epsilon(1e-4));
    CHECK(a.Delta(1, 1) == doctest::Approx(0.1 * std::sqrt(10.0)).epsilon(1e-15));
    CHECK(a.Delta(0, 1) == 0.0);

    auto b = disturbance_bound_from_amplitude(0.5, 10, 2);
    CHECK(b.Delta(0, 0) == doctest::Approx(1.5811).epsilon(1e-4));

    CHECK_THROWS_WITH_AS(disturbance_bound_from_amplitude(-0.1, 10, 2), "invalid amplitude", Error);
}

TEST_CASE("noise-free derivative data satisfy the plant relation exactly") {
    ExperimentConfig cfg;
    cfg.T = 12;
    cfg.seed = 3;
    auto p = example_plant();
    auto dm = run_experiment(p, cfg);
    Matrix r = dm.X1 - p.A * dm.X0 - p.B * dm.U0;
    CHECK(r.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("bounded disturbance samples lie in the disturbance set") {
    const double delta = 0.2;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ExperimentConfig cfg;
        cfg.T = 15;
        cfg.seed = seed;
        cfg.disturbance = DisturbanceSignal::uniform(delta, seed + 100, cfg.Ts / cfg.substeps);
        auto p = example_plant();
        auto dm = run_experiment(p, cfg);
        Matrix D0 = dm.X1 - p.A * dm.X0 - p.B * dm.U0;
        for (Eigen::Index k = 0; k < D0.cols(); ++k) CHECK(D0.col(k).norm() <= delta * (1.0 + 1e-12));
        auto model = disturbance_bound_from_amplitude(delta, cfg.T, p.n());
        CHECK(model.contains(D0, 1e-9));
    }
}

TEST_CASE("integral data: quadrature error is second order in the fine step") {
    auto p = example_plant();
    auto residual = [&](int substeps) {
        ExperimentConfig cfg;
        cfg.T = 6;
        cfg.Ts = 0.2;
        cfg.seed = 11;
        cfg.mode = AcquisitionMode::Integral;
        cfg.substeps = substeps;
        cfg.disturbance = DisturbanceSignal::sinusoid(0.3, 5, 2.0);
        auto dm = run_experiment(p, cfg);
        Matrix W(2, cfg.T);
        for (int k = 0; k < cfg.T; ++k) W.col(k) = cfg.disturbance.integral(k * cfg.Ts, (k + 1) * cfg.Ts, 2);
        Matrix r = dm.X1 - p.A * dm.X0 - p.B * dm.U0 - W;
        return r.cwiseAbs().maxCoeff();
    };
    double e1 = residual(4);
    double e2 = residual(8);
    double e3 = residual(16);
    CHECK(e1 / e2 >= 3.5);
    CHECK(e2 / e3 >= 3.5);
    CHECK(residual(64) < 1e-4);
}

TEST_CASE("integral data without disturbance") {
    ExperimentConfig cfg;
    cfg.T = 6;
    cfg.mode = AcquisitionMode::Integral;
    auto p = example_plant();
    auto dm = run_experiment(p, cfg);
    CHECK(dm.mode == AcquisitionMode::Integral);
    // v(k) = Ts * u(k) for held inputs
    CHECK(dm.U0.cwiseAbs().maxCoeff() <= cfg.Ts * cfg.input_hi + 1e-15);
    Matrix r = dm.X1 - p.A * dm.X0 - p.B * dm.U0;
    CHECK(r.cwiseAbs().maxCoeff() < 1e-5);
    CHECK(check_richness(dm).pass);
}

TEST_CASE("experiments are reproducible from the seed") {
    ExperimentConfig cfg;
    cfg.seed = 42;
    auto a = run_experiment(example_plant(), cfg);
    auto b = run_experiment(example_plant(), cfg);
    CHECK(a.X1 == b.X1);
    CHECK(a.U0 == b.U0);
    cfg.seed = 43;
    auto c = run_experiment(example_plant(), cfg);
    CHECK(a.U0 != c.U0);
}

TEST_CASE("disturbance signals respect their bound") {
    auto u = DisturbanceSignal::uniform(0.5, 9);
    auto s = DisturbanceSignal::sinusoid(0.5, 9, 3.0);
    for (int i = 0; i < 2000; ++i) {
        double t = 0.00137 * i;
        CHECK(u.value(t, 3).norm() <= 0.5 + 1e-15);
        CHECK(s.value(t, 3).norm() <= 0.5 + 1e-15);
    }
    CHECK(u.value(0.00012, 2) == u.value(0.000199, 2));
    CHECK(u.value(0.00012, 2) != u.value(0.00021, 2));
    CHECK_THROWS_WITH_AS(DisturbanceSignal::uniform(-1.0, 1), "invalid amplitude", Error);
    CHECK(DisturbanceSignal::uniform(0.0, 1).kind == DisturbanceKind::Zero);
}
