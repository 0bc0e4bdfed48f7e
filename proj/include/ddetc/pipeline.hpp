#pragma once

#include "ddetc/config.hpp"
#include "ddetc/dataset.hpp"
#include "ddetc/sim.hpp"
#include "ddetc/synthesis.hpp"
#include "ddetc/triggers.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ddetc {

/// File-system failure; maps to exit code 4.
class IoError : public Error {
public:
    using Error::Error;
};

/// Exit codes of the command-line front end.
enum ExitCode { kExitOk = 0, kExitInfeasible = 2, kExitVerification = 3, kExitIo = 4 };

// Classifies an error message from the synthesis layer.
bool is_infeasibility(const std::string& message);

/// Per-stage seeds derived from one root seed.
struct StageSeeds {
    std::uint64_t experiment = 0;
    std::uint64_t offline_disturbance = 0;
    std::uint64_t online_disturbance = 0;
    std::uint64_t initial_state = 0;
    std::uint64_t verification = 0;
};
StageSeeds split_seed(std::uint64_t root);

struct RuleParams {
    std::string name = "static-relative";
    double nu = kDefaultNu;
    double lambda = 1.0;
    double theta = 1.0;
    double eta0 = 0.0;                      // dynamic rules
    std::optional<double> lyap_eta0;        // threshold rules; V(x0) when absent
    double varsigma = 0.5;
    double varsigma_d_margin = 0.01;
    bool tau_bar_d_zero = false;            // quadratic-noisy / dynamic-noisy: tau_bar_d = 0
    std::optional<double> gamma;
    bool maximize = true;
};

/// A designed rule together with the inter-event bound it is certified for.
struct RuleDesign {
    TriggerSpec spec;
    TriggerDesignResult result;
    double miet_bound = 0.0;
    std::string bound_name;  // tau, tau_bar, tau_d
};

Regime regime_of_rule(const std::string& rule);
const std::vector<std::string>& all_rule_names();

RuleDesign design_rule(const RuleParams& params, const ControllerDesign& cd, const DataMatrices& dm,
                       const std::optional<DisturbanceModel>& model);

struct PipelineConfig {
    PlantModel plant;
    ExperimentConfig experiment;
    double delta = 0.0;
    DisturbanceKind online_kind = DisturbanceKind::UniformBounded;
    double online_frequency = 1.0;
    bool online_disturbance = true;  // apply d(t) in closed loop for robust rules
    Regime regime = Regime::NoiseFree;
    double omega_scale = 10.0;
    std::optional<Matrix> Omega;
    RuleParams rule;
    SimConfig sim;
    bool auto_h = true;  // h = min(1e-4, dwell/10)
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int verify_draws = 200;

    std::optional<DisturbanceModel> model() const;
    Matrix omega() const;
};

// Keys accepted in configuration files.
const std::vector<std::string>& config_keys();

PipelineConfig pipeline_from_config(const KeyValueConfig& kv, std::optional<std::uint64_t> seed_override = {});

// Default root seed for the example runs; its data give designs of the same
// order of magnitude as the published ones for all three examples.
inline constexpr std::uint64_t kDefaultExampleSeed = 66;

// The published example settings: 1 noise-free static rule, 2 mixed rule with
// delta = 0.1, 3 time-regularized rule with delta = 0.5.
PipelineConfig example_pipeline(int example, std::uint64_t seed);

/// Persisted result of cmd_design.
struct DesignReport {
    ControllerDesign cd;
    std::optional<DisturbanceModel> model;
    RuleParams params;
    RuleDesign rule;
    double Ts = 0.0;
};

void write_dataset_csv(std::ostream& os, const DataMatrices& dm);
DataMatrices read_dataset_csv(std::istream& is);
void save_dataset(const std::string& path, const DataMatrices& dm);
DataMatrices load_dataset(const std::string& path);

std::string design_report_json(const DesignReport& report);
DesignReport parse_design_report(const std::string& json);
void save_design(const std::string& path, const DesignReport& report);
DesignReport load_design(const std::string& path);

struct CheckLine {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double limit = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckLine> checks;
    bool pass() const;
    void print(std::ostream& os) const;
};

DataMatrices cmd_acquire(const PipelineConfig& cfg);
DesignReport cmd_design(const PipelineConfig& cfg, const DataMatrices& dm);
SimResult cmd_simulate(const PipelineConfig& cfg, const DesignReport& design);
VerifyReport cmd_verify(const DesignReport& design, const DataMatrices& dm,
                        const std::optional<DisturbanceModel>& model, int draws = 200, std::uint64_t seed = 1);

struct ReproduceResult {
    DataMatrices dm;
    DesignReport design;
    SimResult sim;
    VerifyReport verify;
    double min_inter_event = 0.0;
};

// Full pipeline for one of the examples. Writes dataset.csv, design.json,
// trajectory.csv, events.csv and verify.txt under out_dir when it is nonempty.
ReproduceResult cmd_reproduce(int example, std::uint64_t seed, const std::string& out_dir);

// Simulation settings for a design: auto step size and the online disturbance.
SimConfig sim_config_for(const PipelineConfig& cfg, const DesignReport& design);

}  // namespace ddetc
