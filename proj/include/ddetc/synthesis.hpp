#pragma once

#include "ddetc/dataset.hpp"
#include "ddetc/linalg.hpp"
#include "ddetc/triggers.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace ddetc {

enum class Regime { NoiseFree, Robust };

std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);

/// Data-based norm constants used by the inter-event bounds.
struct DesignNorms {
    double X1G = 0.0;   // ||X1 G||
    double X1L = 0.0;   // ||X1 L||
    double X1V0 = 0.0;  // ||X1 V0||
    double G = 0.0;
    double L = 0.0;
    double V0 = 0.0;
    double Delta = 0.0;
    double alpha = 0.0;  // max(||X1 G||, ||X1 L||)
    double c_A = 0.0;    // ||X1 V0|| + ||Delta|| ||V0||
    double c_Phi = 0.0;  // ||X1 G|| + ||Delta|| ||G||
    double c_e = 0.0;    // ||X1 L|| + ||Delta|| ||L||
    double omega1 = 0.0;
    double omega2 = 0.0;
    double omega3 = 0.0;
};

struct ControllerDesign {
    Regime regime = Regime::NoiseFree;
    Matrix Y;      // T x n
    Matrix S;      // (X0 Y)^{-1}
    Matrix K;      // U0 Y S
    Matrix G;      // minimum-norm solution of [U0; X0] G = [K; I]
    Matrix L;      // minimum-norm solution of [U0; X0] L = [K; 0]
    Matrix J0;     // left m columns of the right inverse of [U0; X0]
    Matrix V0;     // right n columns
    Matrix Q;      // -(S X1 G)^T - S X1 G
    Matrix Omega;  // zero for noise-free designs
    Matrix Delta;  // zero for noise-free designs
    double delta = 0.0;
    double epsilon = 0.0;  // robust multiplier
    DesignNorms norms;
    double lmi_residual = 0.0;  // largest eigenvalue over the design LMIs

    Eigen::Index n() const { return S.rows(); }
    Eigen::Index m() const { return K.rows(); }
};

// Stabilizing gain from noise-free data: X1 Y + (X1 Y)^T < 0, X0 Y > 0.
ControllerDesign design_controller_noisefree(const DataMatrices& dm);

// Robust gain: the Petersen-robustified LMI in (Y, eps) for a given Omega > 0.
ControllerDesign design_controller_robust(const DataMatrices& dm, const DisturbanceModel& model, const Matrix& Omega);

// Default Omega = 10 I.
ControllerDesign design_controller_robust(const DataMatrices& dm, const DisturbanceModel& model);

Matrix solve_L(const DataMatrices& dm, const Matrix& K);
Matrix solve_G(const DataMatrices& dm, const Matrix& K);

struct RightInverse {
    Matrix J0;
    Matrix V0;
};
RightInverse compute_V0(const DataMatrices& dm);

// Recomputes the norm cache from the stored matrices and data.
DesignNorms compute_norms(const ControllerDesign& cd, const DataMatrices& dm);

// Largest eigenvalue of (X1 - D) Y + Y^T (X1 - D)^T + Omega over `draws`
// sampled D in the disturbance set.
double sampled_robust_margin(const ControllerDesign& cd, const DataMatrices& dm, const DisturbanceModel& model,
                             int draws, std::uint64_t seed);

// M = [-Q, S X1 L; *, 0] with optional scaling of Q and a shift of the
// (1,1) block: [-(1-gamma) Q + shift, S X1 L; *, 0].
Matrix trigger_matrix_M(const ControllerDesign& cd, const DataMatrices& dm, double gamma = 0.0,
                        const Matrix& shift11 = Matrix());

struct TauBounds {
    double tau = 0.0;
    double tau_bar = 0.0;
    double tau_d = 0.0;
    std::optional<double> tau_m;
};

struct TriggerDesignResult {
    double sigma = 0.0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double mu = 0.0;
    double eps = 0.0;
    Matrix PsiTilde;
    double gamma = 0.0;
    double rho1 = 0.0;
    double varsigma = 0.0;
    double varsigma_d = 0.0;
    double nu = 0.0;
    TauBounds tau;
    double residual = 0.0;  // largest eigenvalue of the defining LMI(s)
};

inline constexpr double kDefaultNu = 0.01;

TriggerDesignResult design_sigma_noisefree(const ControllerDesign& cd, const DataMatrices& dm,
                                           std::optional<double> gamma = std::nullopt, bool maximize = true);

TriggerDesignResult design_sigma_mixed(const ControllerDesign& cd, const DataMatrices& dm,
                                       const DisturbanceModel& model, double nu = kDefaultNu);

// Largest eigenvalue of mu * Mbar(D) - Psibar(sigma) over sampled D.
double sampled_mixed_margin(const ControllerDesign& cd, const DataMatrices& dm, const DisturbanceModel& model,
                            double mu, double sigma, int draws, std::uint64_t seed);

struct TimeRegBound {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double omega3 = 0.0;
    double sigma_max = 0.0;
    double sigma = 0.0;  // 0.9 * sigma_max
};

TimeRegBound sigma_bound_timereg(const ControllerDesign& cd, const DataMatrices& dm, const DisturbanceModel& model);

// Noise-free when `model` is absent, robust otherwise.
TriggerDesignResult design_quadratic_psi(const ControllerDesign& cd, const DataMatrices& dm,
                                         const std::optional<DisturbanceModel>& model = std::nullopt,
                                         double nu = kDefaultNu);

// mu Mbar + eps (...) - diag(PsiTilde, 0): the first robust quadratic-trigger
// inequality, negative semidefinite for a valid design.
Matrix quadratic_noisy_lmi(const ControllerDesign& cd, const DataMatrices& dm, const DisturbanceModel& model,
                           double mu, double eps, const Matrix& PsiTilde);

double compute_rho1(const ControllerDesign& cd);
TriggerDesignResult design_sigma_decay_v(const ControllerDesign& cd, const DataMatrices& dm, double varsigma);

double select_varsigma_d(const ControllerDesign& cd, double margin = 0.01);

// Inter-event bounds. The plain-constant forms are what the design-based
// overloads evaluate.
double tau_from_alpha(double alpha, double sigma);
double tau_d_from_constants(double c_A, double c_Phi, double sigma);

double miet_tau(const ControllerDesign& cd, double sigma);
double miet_bar_tau(const ControllerDesign& cd, const DisturbanceModel& model, double sigma, double nu);
double miet_tau_d(const ControllerDesign& cd, double sigma);
double miet_tau_m(const PlantModel& plant, const Matrix& K, double sigma);
double miet_absolute_semiglobal(double c_phi, double c_e, double nu, double cbar_x, double d_sup);

double ultimate_bound_radius(const ControllerDesign& cd, double mu, double nu);

}  // namespace ddetc
