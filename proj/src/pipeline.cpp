#include "ddetc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace ddetc {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kNoiseFreeRules = {"static-relative", "quadratic", "dynamic", "lyap-threshold"};
const std::vector<std::string> kRobustRules = {"mixed",         "mixed-squared",  "time-regularized",
                                               "combined",      "quadratic-noisy", "dynamic-noisy",
                                               "lyap-threshold-noisy"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

// Bound for rules whose threshold is z' Psibar(sigma2) z >= nu: the
// equivalent mixed rule has offset sqrt(nu / 2).
double psibar_rule_bound(const ControllerDesign& cd, const DisturbanceModel& model, double sigma2, double nu) {
    if (!(nu > 0.0)) return 0.0;
    return miet_bar_tau(cd, model, sigma2, std::sqrt(nu / 2.0));
}

Vector random_unit_vector(Eigen::Index n, std::uint64_t seed) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        // Box-Muller on counter-based uniforms keeps the draw platform independent.
        const double u1 = 1.0 - unit_from_bits(mix64(seed * 2654435761ULL + 2 * i + 1));
        const double u2 = unit_from_bits(mix64(seed * 2654435761ULL + 2 * i + 2));
        v(i) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
    const double nv = v.norm();
    if (nv == 0.0) v(0) = 1.0;
    return v / v.norm();
}

void ensure_dir(const std::string& dir) {
    if (dir.empty()) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "'");
}

std::string join(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    fn(out);
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace

bool is_infeasibility(const std::string& message) {
    return message.find("infeasible") != std::string::npos || message.find("unsolvable") != std::string::npos;
}

StageSeeds split_seed(std::uint64_t root) {
    StageSeeds s;
    s.experiment = mix64(root * 8 + 1);
    s.offline_disturbance = mix64(root * 8 + 2);
    s.online_disturbance = mix64(root * 8 + 3);
    s.initial_state = mix64(root * 8 + 4);
    s.verification = mix64(root * 8 + 5);
    return s;
}

const std::vector<std::string>& all_rule_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v = kNoiseFreeRules;
        v.insert(v.end(), kRobustRules.begin(), kRobustRules.end());
        return v;
    }();
    return names;
}

Regime regime_of_rule(const std::string& rule) {
    if (contains(kNoiseFreeRules, rule)) return Regime::NoiseFree;
    if (contains(kRobustRules, rule)) return Regime::Robust;
    throw Error("unknown rule '" + rule + "'");
}

RuleDesign design_rule(const RuleParams& params, const ControllerDesign& cd, const DataMatrices& dm,
                       const std::optional<DisturbanceModel>& model) {
    const std::string& name = params.name;
    const Regime regime = regime_of_rule(name);
    if (regime != cd.regime) throw Error("rule '" + name + "' needs a " + to_string(regime) + " controller");
    if (regime == Regime::Robust && !model) throw Error("rule '" + name + "' needs a disturbance model");

    RuleDesign out;
    auto& r = out.result;
    if (name == "static-relative") {
        r = design_sigma_noisefree(cd, dm, params.gamma, params.maximize);
        r.gamma = params.gamma.value_or(0.0);
        out.spec = rules::StaticRelative{r.sigma};
        out.miet_bound = r.tau.tau;
        out.bound_name = "tau";
    } else if (name == "quadratic" || name == "dynamic") {
        r = design_quadratic_psi(cd, dm);
        if (name == "quadratic")
            out.spec = rules::QuadraticNoiseFree{r.PsiTilde};
        else
            out.spec = rules::DynamicNoiseFree{r.PsiTilde, params.lambda, params.theta, params.eta0};
        out.miet_bound = r.tau.tau;
        out.bound_name = "tau";
    } else if (name == "lyap-threshold") {
        r = design_sigma_decay_v(cd, dm, params.varsigma);
        out.spec = rules::LyapThresholdNoiseFree{params.varsigma, r.rho1, cd.S, params.lyap_eta0};
        out.miet_bound = r.tau.tau;
        out.bound_name = "tau";
    } else if (name == "mixed" || name == "mixed-squared") {
        r = design_sigma_mixed(cd, dm, *model, params.nu);
        if (name == "mixed")
            out.spec = rules::Mixed{r.sigma, params.nu};
        else
            out.spec = rules::MixedSquared{r.sigma, params.nu};
        out.miet_bound = r.tau.tau_bar;
        out.bound_name = "tau_bar";
    } else if (name == "time-regularized") {
        const TimeRegBound tb = sigma_bound_timereg(cd, dm, *model);
        r.sigma = r.sigma1 = tb.sigma;
        r.tau.tau_d = miet_tau_d(cd, tb.sigma);
        out.spec = rules::TimeRegularized{tb.sigma, r.tau.tau_d};
        out.miet_bound = r.tau.tau_d;
        out.bound_name = "tau_d";
    } else if (name == "combined") {
        const TimeRegBound tb = sigma_bound_timereg(cd, dm, *model);
        r = design_sigma_mixed(cd, dm, *model, params.nu);
        r.sigma1 = tb.sigma;
        r.sigma2 = r.sigma;
        r.tau.tau_d = miet_tau_d(cd, tb.sigma);
        out.spec = rules::Combined{tb.sigma, r.tau.tau_d, r.sigma2, params.nu};
        out.miet_bound = r.tau.tau_d;
        out.bound_name = "tau_d";
    } else if (name == "quadratic-noisy" || name == "dynamic-noisy") {
        r = design_quadratic_psi(cd, dm, model, params.nu);
        const double tau_bar_d = params.tau_bar_d_zero ? 0.0 : r.tau.tau_d;
        if (tau_bar_d == 0.0 && !(params.nu > 0.0)) throw Error("tau_bar_d = 0 requires nu > 0");
        if (name == "quadratic-noisy")
            out.spec = rules::QuadraticNoisy{r.PsiTilde, tau_bar_d, params.nu};
        else
            out.spec = rules::DynamicNoisy{r.PsiTilde, params.lambda, params.theta, params.nu, tau_bar_d, params.eta0};
        const double tilde = psibar_rule_bound(cd, *model, r.sigma2, params.nu);
        out.miet_bound = std::max(tau_bar_d, tilde);
        out.bound_name = tilde > tau_bar_d ? "tau_bar" : "tau_d";
    } else if (name == "lyap-threshold-noisy") {
        const TimeRegBound tb = sigma_bound_timereg(cd, dm, *model);
        r.sigma = r.sigma1 = tb.sigma;
        r.tau.tau_d = miet_tau_d(cd, tb.sigma);
        r.varsigma_d = select_varsigma_d(cd, params.varsigma_d_margin);
        r.nu = params.nu;
        out.spec = rules::LyapThresholdNoisy{r.varsigma_d, params.nu, r.tau.tau_d, cd.S, params.lyap_eta0};
        out.miet_bound = r.tau.tau_d;
        out.bound_name = "tau_d";
    }
    validate(out.spec, cd.n());
    return out;
}

std::optional<DisturbanceModel> PipelineConfig::model() const {
    if (regime != Regime::Robust) return std::nullopt;
    return disturbance_bound_from_amplitude(delta, experiment.T, plant.n());
}

Matrix PipelineConfig::omega() const {
    if (Omega) return *Omega;
    return omega_scale * Matrix::Identity(plant.n(), plant.n());
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "seed",
        "plant.A",
        "plant.B",
        "experiment.Ts",
        "experiment.T",
        "experiment.input_lo",
        "experiment.input_hi",
        "experiment.x0_lo",
        "experiment.x0_hi",
        "experiment.mode",
        "experiment.substeps",
        "disturbance.delta",
        "disturbance.kind",
        "disturbance.online",
        "disturbance.online_kind",
        "disturbance.frequency",
        "disturbance.hold",
        "design.regime",
        "design.Omega",
        "design.gamma",
        "design.maximize",
        "design.rule",
        "design.nu",
        "design.lambda",
        "design.theta",
        "design.eta0",
        "design.varsigma",
        "design.varsigma_d_margin",
        "design.tau_bar_d",
        "sim.x0",
        "sim.t_end",
        "sim.h",
        "sim.event_tol",
        "sim.record_stride",
        "sim.max_events",
        "output.dir",
        "verify.draws",
    };
    return keys;
}

PipelineConfig pipeline_from_config(const KeyValueConfig& kv, std::optional<std::uint64_t> seed_override) {
    kv.require_known(config_keys());
    PipelineConfig c;
    c.seed = seed_override ? *seed_override : static_cast<std::uint64_t>(kv.get_int("seed", 1));
    const StageSeeds seeds = split_seed(c.seed);

    if (kv.has("plant.A")) {
        c.plant.A = kv.get_matrix("plant.A");
        c.plant.B = kv.get_matrix("plant.B");
    } else {
        c.plant.A = Matrix{{0.0, 0.0}, {-1.0, -2.0}};
        c.plant.B = Matrix{{1.0}, {0.0}};
    }
    c.plant.validate();
    const Eigen::Index n = c.plant.n();

    auto& e = c.experiment;
    e.Ts = kv.get_double("experiment.Ts", 0.1);
    e.T = static_cast<int>(kv.get_int("experiment.T", 10));
    e.input_lo = kv.get_double("experiment.input_lo", -1.0);
    e.input_hi = kv.get_double("experiment.input_hi", 1.0);
    e.x0_lo = kv.get_double("experiment.x0_lo", -1.0);
    e.x0_hi = kv.get_double("experiment.x0_hi", 1.0);
    e.mode = acquisition_mode_from_string(kv.get_string("experiment.mode", "derivative"));
    e.substeps = static_cast<int>(kv.get_int("experiment.substeps", 64));
    e.seed = seeds.experiment;

    c.rule.name = kv.get_string("design.rule", "static-relative");
    const Regime rule_regime = regime_of_rule(c.rule.name);
    c.regime = kv.has("design.regime") ? regime_from_string(kv.get_string("design.regime", "")) : rule_regime;
    if (c.regime != rule_regime) throw Error("design.regime is inconsistent with design.rule");

    c.delta = kv.get_double("disturbance.delta", 0.0);
    if (c.delta < 0.0) throw Error("disturbance.delta must be nonnegative");
    if (c.regime == Regime::Robust && !(c.delta > 0.0)) throw Error("robust rules require disturbance.delta > 0");
    const auto offline_kind = disturbance_kind_from_string(kv.get_string("disturbance.kind", c.delta > 0 ? "uniform" : "zero"));
    const double frequency = kv.get_double("disturbance.frequency", 1.0);
    if (offline_kind == DisturbanceKind::UniformBounded)
        e.disturbance = DisturbanceSignal::uniform(c.delta, seeds.offline_disturbance, e.Ts / e.substeps);
    else if (offline_kind == DisturbanceKind::Sinusoidal)
        e.disturbance = DisturbanceSignal::sinusoid(c.delta, seeds.offline_disturbance, frequency);
    else if (offline_kind != DisturbanceKind::Zero)
        throw Error("disturbance.kind must be zero, uniform or sinusoidal");
    c.online_disturbance = kv.get_bool("disturbance.online", true);
    c.online_kind = disturbance_kind_from_string(kv.get_string("disturbance.online_kind", "uniform"));
    c.online_frequency = frequency;

    if (kv.has("design.Omega")) c.Omega = kv.get_matrix("design.Omega", n);
    c.rule.gamma = kv.double_opt("design.gamma");
    c.rule.maximize = kv.get_bool("design.maximize", true);
    c.rule.nu = kv.get_double("design.nu", kDefaultNu);
    c.rule.lambda = kv.get_double("design.lambda", 1.0);
    c.rule.theta = kv.get_double("design.theta", 1.0);
    if (kv.has("design.eta0")) {
        c.rule.eta0 = kv.get_double("design.eta0", 0.0);
        c.rule.lyap_eta0 = c.rule.eta0;
    }
    c.rule.varsigma = kv.get_double("design.varsigma", 0.5);
    c.rule.varsigma_d_margin = kv.get_double("design.varsigma_d_margin", 0.01);
    const std::string tbd = kv.get_string("design.tau_bar_d", "tau_d");
    if (tbd != "tau_d" && tbd != "0") throw Error("design.tau_bar_d must be tau_d or 0");
    c.rule.tau_bar_d_zero = tbd == "0";

    c.sim.x0 = kv.has("sim.x0") ? kv.get_vector("sim.x0") : random_unit_vector(n, seeds.initial_state);
    if (c.sim.x0.size() != n) throw Error("sim.x0 has the wrong dimension");
    c.sim.t_end = kv.get_double("sim.t_end", 10.0);
    const std::string h = kv.get_string("sim.h", "auto");
    c.auto_h = h == "auto";
    if (!c.auto_h) c.sim.h = kv.get_double("sim.h", 1e-4);
    c.sim.event_tol = kv.get_double("sim.event_tol", 1e-9);
    c.sim.record_stride = static_cast<int>(kv.get_int("sim.record_stride", 10));
    c.sim.max_events = kv.get_int("sim.max_events", 10'000'000);
    const double hold = kv.get_double("disturbance.hold", 1e-4);
    if (c.regime == Regime::Robust && c.online_disturbance) {
        if (c.online_kind == DisturbanceKind::UniformBounded)
            c.sim.disturbance = DisturbanceSignal::uniform(c.delta, seeds.online_disturbance, hold);
        else if (c.online_kind == DisturbanceKind::Sinusoidal)
            c.sim.disturbance = DisturbanceSignal::sinusoid(c.delta, seeds.online_disturbance, frequency);
    }
    c.out_dir = kv.get_string("output.dir", "out");
    c.verify_draws = static_cast<int>(kv.get_int("verify.draws", 200));
    return c;
}

PipelineConfig example_pipeline(int example, std::uint64_t seed) {
    KeyValueConfig kv;
    kv.set("seed", std::to_string(seed));
    kv.set("experiment.Ts", "0.1");
    kv.set("experiment.T", "10");
    kv.set("design.Omega", "10");
    kv.set("design.nu", "0.01");
    kv.set("sim.t_end", "10");
    switch (example) {
        case 1:
            kv.set("design.rule", "static-relative");
            break;
        case 2:
            kv.set("design.rule", "mixed");
            kv.set("disturbance.delta", "0.1");
            break;
        case 3:
            kv.set("design.rule", "time-regularized");
            kv.set("disturbance.delta", "0.5");
            break;
        default:
            throw Error("example must be 1, 2 or 3");
    }
    PipelineConfig c = pipeline_from_config(kv);
    c.out_dir.clear();
    return c;
}

DataMatrices cmd_acquire(const PipelineConfig& cfg) {
    DataMatrices dm = run_experiment(cfg.plant, cfg.experiment);
    if (!cfg.out_dir.empty()) {
        ensure_dir(cfg.out_dir);
        save_dataset(join(cfg.out_dir, "dataset.csv"), dm);
    }
    return dm;
}

DesignReport cmd_design(const PipelineConfig& cfg, const DataMatrices& dm) {
    DesignReport r;
    r.Ts = dm.Ts;
    r.params = cfg.rule;
    if (cfg.regime == Regime::Robust) {
        r.model = disturbance_bound_from_amplitude(cfg.delta, static_cast<int>(dm.T()), dm.n());
        r.cd = design_controller_robust(dm, *r.model, cfg.omega());
    } else {
        r.cd = design_controller_noisefree(dm);
    }
    r.rule = design_rule(cfg.rule, r.cd, dm, r.model);
    if (!cfg.out_dir.empty()) {
        ensure_dir(cfg.out_dir);
        save_design(join(cfg.out_dir, "design.json"), r);
    }
    return r;
}

SimConfig sim_config_for(const PipelineConfig& cfg, const DesignReport& design) {
    SimConfig s = cfg.sim;
    s.S = design.cd.S;
    const double dwell = dwell_time(design.rule.spec);
    if (cfg.auto_h) s.h = dwell > 0.0 ? std::min(1e-4, dwell / 10.0) : 1e-4;
    if (!design.model) s.disturbance = DisturbanceSignal{};
    return s;
}

SimResult cmd_simulate(const PipelineConfig& cfg, const DesignReport& design) {
    const SimConfig s = sim_config_for(cfg, design);
    SimResult res = simulate(cfg.plant, design.cd.K, design.rule.spec, s);
    if (!cfg.out_dir.empty()) {
        ensure_dir(cfg.out_dir);
        write_file(join(cfg.out_dir, "trajectory.csv"), [&](std::ostream& os) { write_trajectory_csv(os, res); });
        write_file(join(cfg.out_dir, "events.csv"), [&](std::ostream& os) { write_events_csv(os, res); });
    }
    return res;
}

bool VerifyReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.pass; });
}

void VerifyReport::print(std::ostream& os) const {
    for (const auto& c : checks) {
        os << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << std::setprecision(6) << c.value
           << " limit=" << c.limit;
        if (!c.detail.empty()) os << " (" << c.detail << ")";
        os << "\n";
    }
    os << (pass() ? "verification passed" : "verification failed") << "\n";
}

VerifyReport cmd_verify(const DesignReport& design, const DataMatrices& dm, const std::optional<DisturbanceModel>& model,
                        int draws, std::uint64_t seed) {
    VerifyReport rep;
    auto add = [&](std::string name, double value, double limit, bool pass, std::string detail = {}) {
        rep.checks.push_back({std::move(name), pass, value, limit, std::move(detail)});
    };
    auto below = [&](const std::string& name, double value, double limit, std::string detail = {}) {
        add(name, value, limit, value <= limit, std::move(detail));
    };
    const auto& cd = design.cd;
    const Eigen::Index n = dm.n();
    const Eigen::Index m = dm.m();
    if (cd.K.rows() != m || cd.K.cols() != n || cd.Y.rows() != dm.T() || cd.S.rows() != n)
        throw Error("design does not match the dataset dimensions");

    const RichnessReport rich = check_richness(dm);
    add("data.richness", rich.rank, static_cast<double>(rich.required_rank), rich.pass);

    const Matrix W = dm.stacked();
    Matrix KI(m + n, n), K0(m + n, n);
    KI << cd.K, Matrix::Identity(n, n);
    K0 << cd.K, Matrix::Zero(n, n);
    const double kscale = 1.0 + cd.K.cwiseAbs().maxCoeff();
    below("closure.G", (W * cd.G - KI).cwiseAbs().maxCoeff(), 1e-8 * kscale, "[U0;X0] G = [K;I]");
    below("closure.L", (W * cd.L - K0).cwiseAbs().maxCoeff(), 1e-8 * kscale, "[U0;X0] L = [K;0]");
    below("closure.K", (cd.K - dm.U0 * cd.Y * cd.S).cwiseAbs().maxCoeff(), 1e-8 * kscale, "K = U0 Y S");
    const Matrix X0Y = dm.X0 * cd.Y;
    below("closure.S", (cd.S * X0Y - Matrix::Identity(n, n)).cwiseAbs().maxCoeff(),
          1e-8 * (1.0 + linalg::spectral_norm(cd.S) * linalg::spectral_norm(X0Y)), "S X0 Y = I");
    add("S.positive", linalg::lambda_min_sym(cd.S), 0.0, linalg::lambda_min_sym(cd.S) > 0.0);

    const Matrix X1Y = dm.X1 * cd.Y;
    if (cd.regime == Regime::NoiseFree) {
        below("lmi.stabilization", linalg::lambda_max_sym(X1Y + X1Y.transpose()), 0.0, "X1Y + (X1Y)' < 0");
        const double re = (dm.X1 * cd.G).eigenvalues().real().maxCoeff();
        below("closed_loop.hurwitz", re, 0.0, "max Re eig(X1 G)");
    } else {
        if (!model) throw Error("robust design verification needs a disturbance model");
        const Eigen::Index T = dm.T();
        Matrix F = Matrix::Zero(n + T, n + T);
        F.topLeftCorner(n, n) = X1Y + X1Y.transpose() + cd.Omega + cd.epsilon * model->Delta * model->Delta.transpose();
        F.topRightCorner(n, T) = cd.Y.transpose();
        F.bottomLeftCorner(T, n) = cd.Y;
        F.bottomRightCorner(T, T) = -cd.epsilon * Matrix::Identity(T, T);
        below("lmi.robust", linalg::lambda_max_sym(F), 0.0, "robust stabilization LMI");
        below("robust.sampled", sampled_robust_margin(cd, dm, *model, draws, seed), -1e-8,
              std::to_string(draws) + " draws from the disturbance set");
    }

    const std::string& rule = design.params.name;
    const auto& r = design.rule.result;
    double bound = 0.0;
    if (rule == "static-relative" || rule == "lyap-threshold") {
        Matrix shift;
        if (rule == "lyap-threshold") shift = r.varsigma * r.rho1 * cd.S;
        const Matrix M = trigger_matrix_M(cd, dm, r.gamma, shift);
        below("lmi.trigger", linalg::lambda_max_sym(r.mu * M - psi_matrix(r.sigma, n)), 0.0, "mu M - Psi(sigma) < 0");
        bound = miet_tau(cd, r.sigma);
    } else if (rule == "quadratic" || rule == "dynamic") {
        const Matrix M = trigger_matrix_M(cd, dm);
        below("lmi.trigger", linalg::lambda_max_sym(r.mu * M - r.PsiTilde), 0.0, "mu M - PsiTilde < 0");
        below("lmi.psi_order", linalg::lambda_max_sym(r.PsiTilde - psi_matrix(r.sigma, n)), 1e-7,
              "PsiTilde <= Psi(sigma)");
        bound = miet_tau(cd, r.sigma);
    } else if (rule == "mixed" || rule == "mixed-squared" || rule == "combined") {
        below("mixed.sampled", sampled_mixed_margin(cd, dm, *model, r.mu, r.sigma2, draws, seed), 0.0,
              "mu Mbar(D) - Psibar(sigma) over sampled D");
        if (rule == "combined") {
            const TimeRegBound tb = sigma_bound_timereg(cd, dm, *model);
            below("timereg.sigma", r.sigma1, tb.sigma_max, "sigma1 < omega1 / omega2");
            bound = miet_tau_d(cd, r.sigma1);
        } else {
            bound = miet_bar_tau(cd, *model, r.sigma, r.nu);
        }
    } else if (rule == "time-regularized" || rule == "lyap-threshold-noisy") {
        const TimeRegBound tb = sigma_bound_timereg(cd, dm, *model);
        below("timereg.sigma", r.sigma1, tb.sigma_max, "sigma1 < omega1 / omega2");
        if (rule == "lyap-threshold-noisy") {
            const Matrix R = linalg::inv_sqrt_spd(cd.S);
            const double cap = linalg::lambda_min_sym(R * cd.S * cd.Omega * cd.S * R);
            below("varsigma_d", r.varsigma_d, cap, "below lambda_min(S^-1/2 S Omega S S^-1/2)");
        }
        bound = miet_tau_d(cd, r.sigma1);
    } else if (rule == "quadratic-noisy" || rule == "dynamic-noisy") {
        below("lmi.trigger", linalg::lambda_max_sym(quadratic_noisy_lmi(cd, dm, *model, r.mu, r.eps, r.PsiTilde)), 0.0,
              "robust quadratic-trigger LMI");
        below("lmi.psi_order", linalg::lambda_max_sym(r.PsiTilde - psi_bar_matrix(r.sigma2, n)), 1e-7,
              "PsiTilde <= Psibar(sigma2)");
        const double tbd = design.params.tau_bar_d_zero ? 0.0 : miet_tau_d(cd, r.sigma1);
        bound = std::max(tbd, psibar_rule_bound(cd, *model, r.sigma2, design.params.nu));
    }
    const double stored = design.rule.miet_bound;
    const double rel = std::abs(bound - stored) / std::max(std::abs(stored), 1e-300);
    add("miet." + design.rule.bound_name, bound, stored, rel <= 1e-9 && bound > 0.0,
        "recomputed from the data norms");
    return rep;
}

ReproduceResult cmd_reproduce(int example, std::uint64_t seed, const std::string& out_dir) {
    PipelineConfig cfg = example_pipeline(example, seed);
    cfg.out_dir = out_dir;
    ReproduceResult out;
    out.dm = cmd_acquire(cfg);
    out.design = cmd_design(cfg, out.dm);
    out.verify = cmd_verify(out.design, out.dm, out.design.model, cfg.verify_draws, split_seed(seed).verification);
    out.sim = cmd_simulate(cfg, out.design);
    out.min_inter_event = out.sim.event_times.size() >= 2 ? min_inter_event(out.sim) : cfg.sim.t_end;
    const double bound = out.design.rule.miet_bound;
    out.verify.checks.push_back({"sim.min_inter_event", out.min_inter_event >= bound - 1e-8, out.min_inter_event,
                                 bound, "observed minimum inter-event time against " + out.design.rule.bound_name});
    if (!out_dir.empty()) {
        write_file(join(out_dir, "verify.txt"), [&](std::ostream& os) { out.verify.print(os); });
    }
    return out;
}

}  // namespace ddetc
