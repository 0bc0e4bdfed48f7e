#include "ddetc/dataset.hpp"

#include <cmath>
#include <random>

namespace ddetc {

void PlantModel::validate() const {
    if (A.rows() == 0 || A.rows() != A.cols()) throw Error("plant A must be square and non-empty");
    if (B.rows() != A.rows() || B.cols() == 0) throw Error("plant B dimensions inconsistent with A");
}

std::string to_string(AcquisitionMode mode) {
    return mode == AcquisitionMode::Derivative ? "derivative" : "integral";
}

AcquisitionMode acquisition_mode_from_string(const std::string& name) {
    if (name == "derivative") return AcquisitionMode::Derivative;
    if (name == "integral") return AcquisitionMode::Integral;
    throw Error("unknown acquisition mode '" + name + "'");
}

void ExperimentConfig::validate() const {
    if (!(Ts > 0.0)) throw Error("sampling period must be positive");
    if (T <= 0) throw Error("insufficient samples");
    if (substeps < 1) throw Error("substeps must be >= 1");
    if (!(input_hi >= input_lo) || !(x0_hi >= x0_lo)) throw Error("invalid sampling range");
}

Matrix DataMatrices::stacked() const {
    Matrix W(m() + n(), T());
    W << U0, X0;
    return W;
}

void DataMatrices::validate() const {
    if (X0.cols() == 0) throw Error("empty dataset");
    if (U0.cols() != X0.cols() || X1.cols() != X0.cols()) throw Error("inconsistent sample shapes");
    if (X1.rows() != X0.rows()) throw Error("inconsistent sample shapes");
}

bool DisturbanceModel::contains(const Matrix& D, double tol) const {
    if (D.rows() != Delta.rows()) throw Error("disturbance matrix dimension mismatch");
    Matrix gap = Delta * Delta.transpose() - D * D.transpose();
    return linalg::lambda_min_sym(gap) >= -tol;
}

Vector rk4_plant_step(const PlantModel& plant, const Vector& x, const Vector& u,
                      const DisturbanceSignal& d, double t, double h) {
    const Vector Bu = plant.B * u;
    const auto n = plant.n();
    auto f = [&](double s, const Vector& y, const Vector& dd) -> Vector {
        (void)s;
        return plant.A * y + Bu + dd;
    };
    Vector d0, dm, d1;
    if (d.piecewise_constant()) {
        d0 = dm = d1 = d.value(t + 0.5 * h, n);
    } else {
        d0 = d.value(t, n);
        dm = d.value(t + 0.5 * h, n);
        d1 = d.value(t + h, n);
    }
    Vector k1 = f(t, x, d0);
    Vector k2 = f(t + 0.5 * h, x + 0.5 * h * k1, dm);
    Vector k3 = f(t + 0.5 * h, x + 0.5 * h * k2, dm);
    Vector k4 = f(t + h, x + h * k3, d1);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

DataMatrices run_experiment(const PlantModel& plant, const ExperimentConfig& cfg) {
    plant.validate();
    cfg.validate();
    const auto n = plant.n();
    const auto m = plant.m();
    if (cfg.T < n + m) throw Error("insufficient samples");

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> x0_dist(cfg.x0_lo, cfg.x0_hi);
    std::uniform_real_distribution<double> u_dist(cfg.input_lo, cfg.input_hi);

    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = x0_dist(rng);

    DataMatrices dm;
    dm.Ts = cfg.Ts;
    dm.mode = cfg.mode;
    dm.U0.resize(m, cfg.T);
    dm.X0.resize(n, cfg.T);
    dm.X1.resize(n, cfg.T);

    const double h = cfg.Ts / cfg.substeps;
    for (int k = 0; k < cfg.T; ++k) {
        Vector u(m);
        for (Eigen::Index j = 0; j < m; ++j) u(j) = u_dist(rng);
        const double tk = k * cfg.Ts;

        if (cfg.mode == AcquisitionMode::Derivative) {
            dm.U0.col(k) = u;
            dm.X0.col(k) = x;
            dm.X1.col(k) = plant.A * x + plant.B * u + cfg.disturbance.value(tk, n);
        }

        Vector r = 0.5 * x;
        Vector x_start = x;
        for (int s = 0; s < cfg.substeps; ++s) {
            x = rk4_plant_step(plant, x, u, cfg.disturbance, tk + s * h, h);
            if (!x.allFinite()) throw Error("experiment diverged");
            r += (s + 1 == cfg.substeps ? 0.5 : 1.0) * x;
        }

        if (cfg.mode == AcquisitionMode::Integral) {
            dm.U0.col(k) = cfg.Ts * u;
            dm.X0.col(k) = h * r;
            dm.X1.col(k) = x - x_start;
        }
    }
    if (!dm.X0.allFinite() || !dm.X1.allFinite()) throw Error("experiment diverged");
    return dm;
}

DataMatrices assemble_matrices(const std::vector<Sample>& samples, double Ts) {
    if (samples.empty()) throw Error("empty sample list");
    const auto m = samples.front().u.size();
    const auto n = samples.front().x.size();
    if (n == 0 || m == 0) throw Error("inconsistent sample shapes");
    const auto T = static_cast<Eigen::Index>(samples.size());
    DataMatrices dm;
    dm.Ts = Ts;
    dm.U0.resize(m, T);
    dm.X0.resize(n, T);
    dm.X1.resize(n, T);
    for (Eigen::Index k = 0; k < T; ++k) {
        const Sample& s = samples[static_cast<std::size_t>(k)];
        if (s.u.size() != m || s.x.size() != n || s.xdot.size() != n)
            throw Error("inconsistent sample shapes");
        dm.U0.col(k) = s.u;
        dm.X0.col(k) = s.x;
        dm.X1.col(k) = s.xdot;
    }
    return dm;
}

RichnessReport check_richness(const DataMatrices& dm) {
    RichnessReport rep;
    rep.required_rank = static_cast<int>(dm.n() + dm.m());
    Matrix W = dm.stacked();
    Eigen::JacobiSVD<Matrix> svd(W);
    const Vector& s = svd.singularValues();
    if (s.size() == 0) return rep;
    rep.largest_singular_value = s(0);
    const double cutoff = kRichnessRtol * s(0);
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff) ++rep.rank;
    // Singular values beyond min(rows, cols) are zero.
    rep.smallest_singular_value = W.rows() <= W.cols() ? s(W.rows() - 1) : 0.0;
    rep.pass = rep.rank == rep.required_rank;
    return rep;
}

DisturbanceModel disturbance_bound_from_amplitude(double delta, int T, Eigen::Index n) {
    if (!(delta >= 0.0)) throw Error("invalid amplitude");
    if (T <= 0 || n <= 0) throw Error("invalid dimensions for disturbance bound");
    DisturbanceModel model;
    model.delta = delta;
    model.T = T;
    model.Delta = delta * std::sqrt(static_cast<double>(T)) * Matrix::Identity(n, n);
    return model;
}

}  // namespace ddetc
