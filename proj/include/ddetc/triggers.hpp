#pragma once

#include "ddetc/linalg.hpp"

#include <optional>
#include <string>
#include <variant>

namespace ddetc {

// Psi(sigma) = diag(-sigma^2 I, I) and Psibar(sigma) = diag(-2 sigma^2 I, I).
Matrix psi_matrix(double sigma, Eigen::Index n);
Matrix psi_bar_matrix(double sigma, Eigen::Index n);

// z' Psi z for z = (x, e).
double quadratic_form(const Matrix& Psi, const Vector& x, const Vector& e);

namespace rules {

// |e|^2 - sigma^2 |x|^2 >= 0.
struct StaticRelative {
    double sigma = 0.0;
};

// |e| >= sigma |x| + nu.
struct Mixed {
    double sigma = 0.0;
    double nu = 0.0;
};

// |e|^2 >= 2 sigma^2 |x|^2 + 2 nu^2.
struct MixedSquared {
    double sigma = 0.0;
    double nu = 0.0;
};

// z' Psi(sigma) z >= 0 once tau_d has elapsed.
struct TimeRegularized {
    double sigma = 0.0;
    double tau_d = 0.0;
};

// z' Psibar(sigma2) z >= nu once tau_d(sigma1) has elapsed.
struct Combined {
    double sigma1 = 0.0;
    double tau_d = 0.0;
    double sigma2 = 0.0;
    double nu = 0.0;
};

struct QuadraticNoiseFree {
    Matrix PsiTilde;
};

struct QuadraticNoisy {
    Matrix PsiTilde;
    double tau_bar_d = 0.0;  // 0 or tau_d(sigma1)
    double nu = 0.0;
};

// eta' = -lambda eta - z' PsiTilde z; fires when eta - theta z' PsiTilde z <= 0.
struct DynamicNoiseFree {
    Matrix PsiTilde;
    double lambda = 1.0;
    double theta = 1.0;
    double eta0 = 0.0;
};

// eta' = -lambda eta - psi(elapsed) (z' PsiTilde z - nu), psi gated by tau_bar_d.
struct DynamicNoisy {
    Matrix PsiTilde;
    double lambda = 1.0;
    double theta = 1.0;
    double nu = 0.0;
    double tau_bar_d = 0.0;
    double eta0 = 0.0;
};

// eta' = -varsigma rho1 eta; fires when x' S x reaches eta.
struct LyapThresholdNoiseFree {
    double varsigma = 0.5;
    double rho1 = 0.0;
    Matrix S;
    std::optional<double> eta0;  // defaults to V(x0)
};

// eta' = -varsigma_d eta + nu; fires when x' S x >= eta after tau_d.
struct LyapThresholdNoisy {
    double varsigma_d = 0.0;
    double nu = 0.0;
    double tau_d = 0.0;
    Matrix S;
    std::optional<double> eta0;
};

}  // namespace rules

using TriggerSpec = std::variant<rules::StaticRelative, rules::Mixed, rules::MixedSquared, rules::TimeRegularized,
                                 rules::Combined, rules::QuadraticNoiseFree, rules::QuadraticNoisy,
                                 rules::DynamicNoiseFree, rules::DynamicNoisy, rules::LyapThresholdNoiseFree,
                                 rules::LyapThresholdNoisy>;

struct TriggerState {
    Vector x;
    Vector e;  // x(t_k) - x(t)
    std::optional<double> eta;
    double elapsed = 0.0;
};

// Stable identifiers used in config files and reports.
std::string rule_name(const TriggerSpec& spec);
bool is_noise_free_rule(const TriggerSpec& spec);

// Throws on negative rates, nonpositive sigma where required and similar.
void validate(const TriggerSpec& spec, Eigen::Index n);

double dwell_time(const TriggerSpec& spec);
bool has_eta(const TriggerSpec& spec);

// eta(0) for rules with an auxiliary state.
double initial_eta(const TriggerSpec& spec, const Vector& x0);

// Guard value; an event is due when g >= 0 and the dwell time has elapsed.
double event_value(const TriggerSpec& spec, const TriggerState& state);

// Value the simulator locates. Equal to event_value except for the dynamic
// noise-free rule with theta = 0, where firing also needs eta' <= 0 and the
// value is min(-eta, -eta').
double fire_value(const TriggerSpec& spec, const TriggerState& state);

double eta_derivative(const TriggerSpec& spec, const TriggerState& state);

// Noise-free rules stop transmitting once the anchor (x(t_k), and eta(t_k)
// for rules with eta) is zero.
bool freezes_at_zero(const TriggerSpec& spec);
bool anchor_is_zero(const TriggerSpec& spec, const Vector& x_anchor, double eta_anchor, double x0_norm);

}  // namespace ddetc
