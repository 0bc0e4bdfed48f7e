#include "ddetc/triggers.hpp"

#include <algorithm>
#include <cmath>

namespace ddetc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double vsx(const Matrix& S, const Vector& x) { return x.dot(S * x); }

void require(bool ok, const char* what) {
    if (!ok) throw Error(what);
}

void check_psi(const Matrix& P, Eigen::Index n) {
    require(P.rows() == 2 * n && P.cols() == 2 * n, "PsiTilde must be 2n x 2n");
    require(linalg::is_symmetric(P, 1e-10 * (1.0 + P.cwiseAbs().maxCoeff())), "PsiTilde must be symmetric");
}

void check_S(const Matrix& S, Eigen::Index n) {
    require(S.rows() == n && S.cols() == n, "S dimension mismatch");
    require(linalg::lambda_min_sym(S) > 0.0, "S must be positive definite");
}

double eta_of(const TriggerState& s) {
    if (!s.eta) throw Error("rule requires auxiliary state");
    return *s.eta;
}

}  // namespace

Matrix psi_matrix(double sigma, Eigen::Index n) {
    if (sigma < 0.0) throw Error("sigma must be nonnegative");
    Matrix P = Matrix::Zero(2 * n, 2 * n);
    P.topLeftCorner(n, n) = -sigma * sigma * Matrix::Identity(n, n);
    P.bottomRightCorner(n, n).setIdentity();
    return P;
}

Matrix psi_bar_matrix(double sigma, Eigen::Index n) {
    if (sigma < 0.0) throw Error("sigma must be nonnegative");
    Matrix P = Matrix::Zero(2 * n, 2 * n);
    P.topLeftCorner(n, n) = -2.0 * sigma * sigma * Matrix::Identity(n, n);
    P.bottomRightCorner(n, n).setIdentity();
    return P;
}

double quadratic_form(const Matrix& Psi, const Vector& x, const Vector& e) {
    const auto n = x.size();
    return x.dot(Psi.topLeftCorner(n, n) * x) + 2.0 * x.dot(Psi.topRightCorner(n, n) * e) +
           e.dot(Psi.bottomRightCorner(n, n) * e);
}

std::string rule_name(const TriggerSpec& spec) {
    return std::visit(overloaded{
                          [](const rules::StaticRelative&) { return "static-relative"; },
                          [](const rules::Mixed&) { return "mixed"; },
                          [](const rules::MixedSquared&) { return "mixed-squared"; },
                          [](const rules::TimeRegularized&) { return "time-regularized"; },
                          [](const rules::Combined&) { return "combined"; },
                          [](const rules::QuadraticNoiseFree&) { return "quadratic"; },
                          [](const rules::QuadraticNoisy&) { return "quadratic-noisy"; },
                          [](const rules::DynamicNoiseFree&) { return "dynamic"; },
                          [](const rules::DynamicNoisy&) { return "dynamic-noisy"; },
                          [](const rules::LyapThresholdNoiseFree&) { return "lyap-threshold"; },
                          [](const rules::LyapThresholdNoisy&) { return "lyap-threshold-noisy"; },
                      },
                      spec);
}

bool is_noise_free_rule(const TriggerSpec& spec) {
    return std::holds_alternative<rules::StaticRelative>(spec) ||
           std::holds_alternative<rules::QuadraticNoiseFree>(spec) ||
           std::holds_alternative<rules::DynamicNoiseFree>(spec) ||
           std::holds_alternative<rules::LyapThresholdNoiseFree>(spec);
}

void validate(const TriggerSpec& spec, Eigen::Index n) {
    std::visit(overloaded{
                   [](const rules::StaticRelative& r) { require(r.sigma > 0.0, "sigma must be positive"); },
                   [](const rules::Mixed& r) {
                       require(r.sigma > 0.0, "sigma must be positive");
                       require(r.nu >= 0.0, "nu must be nonnegative");
                   },
                   [](const rules::MixedSquared& r) {
                       require(r.sigma > 0.0, "sigma must be positive");
                       require(r.nu >= 0.0, "nu must be nonnegative");
                   },
                   [](const rules::TimeRegularized& r) {
                       require(r.sigma > 0.0, "sigma must be positive");
                       require(r.tau_d > 0.0, "tau_d must be positive");
                   },
                   [](const rules::Combined& r) {
                       require(r.sigma2 > 0.0, "sigma must be positive");
                       require(r.tau_d > 0.0, "tau_d must be positive");
                       require(r.nu >= 0.0, "nu must be nonnegative");
                   },
                   [n](const rules::QuadraticNoiseFree& r) { check_psi(r.PsiTilde, n); },
                   [n](const rules::QuadraticNoisy& r) {
                       check_psi(r.PsiTilde, n);
                       require(r.tau_bar_d >= 0.0, "tau_bar_d must be nonnegative");
                       require(r.nu >= 0.0, "nu must be nonnegative");
                   },
                   [n](const rules::DynamicNoiseFree& r) {
                       check_psi(r.PsiTilde, n);
                       require(r.lambda > 0.0, "lambda must be positive");
                       require(r.theta >= 0.0, "theta must be nonnegative");
                       require(r.eta0 >= 0.0, "eta0 must be nonnegative");
                   },
                   [n](const rules::DynamicNoisy& r) {
                       check_psi(r.PsiTilde, n);
                       require(r.lambda > 0.0, "lambda must be positive");
                       require(r.theta >= 0.0, "theta must be nonnegative");
                       require(r.nu >= 0.0, "nu must be nonnegative");
                       require(r.tau_bar_d >= 0.0, "tau_bar_d must be nonnegative");
                       require(r.eta0 >= 0.0, "eta0 must be nonnegative");
                   },
                   [n](const rules::LyapThresholdNoiseFree& r) {
                       require(r.varsigma > 0.0 && r.varsigma < 1.0, "varsigma must lie in (0,1)");
                       require(r.rho1 > 0.0, "rho1 must be positive");
                       check_S(r.S, n);
                   },
                   [n](const rules::LyapThresholdNoisy& r) {
                       require(r.varsigma_d > 0.0, "varsigma_d must be positive");
                       require(r.nu >= 0.0, "nu must be nonnegative");
                       require(r.tau_d > 0.0, "tau_d must be positive");
                       check_S(r.S, n);
                   },
               },
               spec);
}

double dwell_time(const TriggerSpec& spec) {
    return std::visit(overloaded{
                          [](const rules::TimeRegularized& r) { return r.tau_d; },
                          [](const rules::Combined& r) { return r.tau_d; },
                          [](const rules::QuadraticNoisy& r) { return r.tau_bar_d; },
                          [](const rules::DynamicNoisy& r) { return r.tau_bar_d; },
                          [](const rules::LyapThresholdNoisy& r) { return r.tau_d; },
                          [](const auto&) { return 0.0; },
                      },
                      spec);
}

bool has_eta(const TriggerSpec& spec) {
    return std::holds_alternative<rules::DynamicNoiseFree>(spec) || std::holds_alternative<rules::DynamicNoisy>(spec) ||
           std::holds_alternative<rules::LyapThresholdNoiseFree>(spec) ||
           std::holds_alternative<rules::LyapThresholdNoisy>(spec);
}

double initial_eta(const TriggerSpec& spec, const Vector& x0) {
    auto lyap = [&](const Matrix& S, const std::optional<double>& eta0) {
        const double v = vsx(S, x0);
        if (!eta0) return v;
        if (*eta0 < v) throw Error("eta0 must be at least V(x0)");
        return *eta0;
    };
    return std::visit(overloaded{
                          [](const rules::DynamicNoiseFree& r) { return r.eta0; },
                          [](const rules::DynamicNoisy& r) { return r.eta0; },
                          [&](const rules::LyapThresholdNoiseFree& r) { return lyap(r.S, r.eta0); },
                          [&](const rules::LyapThresholdNoisy& r) { return lyap(r.S, r.eta0); },
                          [](const auto&) -> double { throw Error("rule has no auxiliary state"); },
                      },
                      spec);
}

double event_value(const TriggerSpec& spec, const TriggerState& s) {
    return std::visit(
        overloaded{
            [&](const rules::StaticRelative& r) { return s.e.squaredNorm() - r.sigma * r.sigma * s.x.squaredNorm(); },
            [&](const rules::Mixed& r) { return s.e.norm() - r.sigma * s.x.norm() - r.nu; },
            [&](const rules::MixedSquared& r) {
                return s.e.squaredNorm() - 2.0 * r.sigma * r.sigma * s.x.squaredNorm() - 2.0 * r.nu * r.nu;
            },
            [&](const rules::TimeRegularized& r) {
                return s.e.squaredNorm() - r.sigma * r.sigma * s.x.squaredNorm();
            },
            [&](const rules::Combined& r) {
                return s.e.squaredNorm() - 2.0 * r.sigma2 * r.sigma2 * s.x.squaredNorm() - r.nu;
            },
            [&](const rules::QuadraticNoiseFree& r) { return quadratic_form(r.PsiTilde, s.x, s.e); },
            [&](const rules::QuadraticNoisy& r) { return quadratic_form(r.PsiTilde, s.x, s.e) - r.nu; },
            [&](const rules::DynamicNoiseFree& r) {
                return r.theta * quadratic_form(r.PsiTilde, s.x, s.e) - eta_of(s);
            },
            [&](const rules::DynamicNoisy& r) {
                return r.theta * (quadratic_form(r.PsiTilde, s.x, s.e) - r.nu) - eta_of(s);
            },
            [&](const rules::LyapThresholdNoiseFree& r) { return vsx(r.S, s.x) - eta_of(s); },
            [&](const rules::LyapThresholdNoisy& r) { return vsx(r.S, s.x) - eta_of(s); },
        },
        spec);
}

double fire_value(const TriggerSpec& spec, const TriggerState& s) {
    const double g = event_value(spec, s);
    if (const auto* r = std::get_if<rules::DynamicNoiseFree>(&spec); r && r->theta == 0.0)
        return std::min(g, -eta_derivative(spec, s));
    return g;
}

double eta_derivative(const TriggerSpec& spec, const TriggerState& s) {
    return std::visit(
        overloaded{
            [&](const rules::DynamicNoiseFree& r) {
                return -r.lambda * eta_of(s) - quadratic_form(r.PsiTilde, s.x, s.e);
            },
            [&](const rules::DynamicNoisy& r) {
                // Right-continuous selection of the gate at elapsed = tau_bar_d.
                const double psi = (r.tau_bar_d > 0.0 && s.elapsed < r.tau_bar_d) ? 0.0 : 1.0;
                return -r.lambda * eta_of(s) - psi * (quadratic_form(r.PsiTilde, s.x, s.e) - r.nu);
            },
            [&](const rules::LyapThresholdNoiseFree& r) { return -r.varsigma * r.rho1 * eta_of(s); },
            [&](const rules::LyapThresholdNoisy& r) { return -r.varsigma_d * eta_of(s) + r.nu; },
            [](const auto&) -> double { throw Error("rule has no auxiliary state"); },
        },
        spec);
}

bool freezes_at_zero(const TriggerSpec& spec) { return is_noise_free_rule(spec); }

bool anchor_is_zero(const TriggerSpec& spec, const Vector& x_anchor, double eta_anchor, double x0_norm) {
    if (!freezes_at_zero(spec)) return false;
    const double tol = 1e-12 * (1.0 + x0_norm);
    if (x_anchor.norm() > tol) return false;
    return !has_eta(spec) || std::abs(eta_anchor) <= tol;
}

}  // namespace ddetc
