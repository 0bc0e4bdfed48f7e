#pragma once

#include "ddetc/disturbance.hpp"
#include "ddetc/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ddetc {

/// Ground-truth plant dx/dt = A x + B u + d. Only experiment generation and
/// simulation see it; synthesis works from DataMatrices alone.
struct PlantModel {
    Matrix A;
    Matrix B;

    Eigen::Index n() const { return A.rows(); }
    Eigen::Index m() const { return B.cols(); }
    void validate() const;
};

enum class AcquisitionMode { Derivative, Integral };

std::string to_string(AcquisitionMode mode);
AcquisitionMode acquisition_mode_from_string(const std::string& name);

struct ExperimentConfig {
    double Ts = 0.1;
    int T = 10;
    // Piecewise-constant excitation, i.i.d. uniform per sampling interval.
    double input_lo = -1.0;
    double input_hi = 1.0;
    double x0_lo = -1.0;
    double x0_hi = 1.0;
    std::uint64_t seed = 1;
    AcquisitionMode mode = AcquisitionMode::Derivative;
    // Fine-grid sub-steps per sampling interval (RK4 and trapezoid quadrature).
    int substeps = 64;
    DisturbanceSignal disturbance;

    void validate() const;
};

/// Experiment matrices. Derivative mode: columns are u(kTs), x(kTs), dx/dt(kTs).
/// Integral mode: U0 holds v(k) = int u, X0 holds r(k) = int x, X1 holds
/// xi(k) = x((k+1)Ts) - x(kTs), all over [kTs, (k+1)Ts].
struct DataMatrices {
    Matrix U0;
    Matrix X0;
    Matrix X1;
    double Ts = 0.0;
    AcquisitionMode mode = AcquisitionMode::Derivative;

    Eigen::Index n() const { return X0.rows(); }
    Eigen::Index m() const { return U0.rows(); }
    Eigen::Index T() const { return X0.cols(); }

    // [U0; X0]
    Matrix stacked() const;
    void validate() const;
};

struct Sample {
    Vector u;
    Vector x;
    Vector xdot;
};

struct RichnessReport {
    int rank = 0;
    int required_rank = 0;
    double smallest_singular_value = 0.0;
    double largest_singular_value = 0.0;
    bool pass = false;
};

/// The set {D : D D^T <= Delta Delta^T} of admissible off-line disturbance
/// matrices.
struct DisturbanceModel {
    Matrix Delta;
    double delta = 0.0;
    int T = 0;

    double delta_norm() const { return linalg::spectral_norm(Delta); }
    bool contains(const Matrix& D, double tol = 1e-9) const;
};

DataMatrices run_experiment(const PlantModel& plant, const ExperimentConfig& cfg);

DataMatrices assemble_matrices(const std::vector<Sample>& samples, double Ts);

inline constexpr double kRichnessRtol = 1e-10;

RichnessReport check_richness(const DataMatrices& dm);

DisturbanceModel disturbance_bound_from_amplitude(double delta, int T, Eigen::Index n);

// One classical RK4 step of dx/dt = A x + B u + d(t). Piecewise-constant
// disturbances are sampled once at the step midpoint.
Vector rk4_plant_step(const PlantModel& plant, const Vector& x, const Vector& u,
                      const DisturbanceSignal& d, double t, double h);

}  // namespace ddetc
