#pragma once

#include "ddetc/dataset.hpp"
#include "ddetc/disturbance.hpp"
#include "ddetc/triggers.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ddetc {

struct SimConfig {
    Vector x0;
    double t_end = 10.0;
    double h = 1e-4;           // RK4 step
    double event_tol = 1e-9;   // bisection width for event times
    DisturbanceSignal disturbance;
    int record_stride = 10;    // record every stride-th grid point (events always)
    long max_events = 10'000'000;
    double max_steps = 1e8;     // t_end / h above this is refused
    int stop_after_events = 0;  // stop once this many events after t = 0 fired; 0 runs to t_end
    Matrix S;                   // Lyapunov matrix for the V trace; identity when empty
    std::optional<double> eta0;
};

struct SimResult {
    std::string rule;
    double dwell = 0.0;
    bool has_eta = false;

    std::vector<double> t;
    std::vector<Vector> x;
    std::vector<Vector> u;  // held input on the interval starting at t
    std::vector<Vector> e;
    std::vector<Vector> d;
    std::vector<double> V;
    std::vector<double> eta;
    std::vector<double> guard;    // event_value at the sample
    std::vector<char> in_dwell;   // sample lies strictly inside a dwell window

    std::vector<double> event_times;
    int eta_clips = 0;
    bool frozen = false;
    long steps = 0;

    std::vector<double> inter_event_times() const;
};

/// Fixed-step RK4 on (x, eta) with u = K x(t_k) held between events. Steps
/// are split at dwell ends and disturbance switches; a guard crossing inside
/// a step is located by bisection on the cubic Hermite interpolant.
SimResult simulate(const PlantModel& plant, const Matrix& K, const TriggerSpec& spec, const SimConfig& cfg);

double min_inter_event(const SimResult& res);

std::vector<double> lyapunov_trace(const SimResult& res, const Matrix& S);

enum class DecayMode { StrictDecay, UltimateBound };

struct DecayReport {
    bool pass = false;
    int violations = 0;
    double first_violation_t = -1.0;
    double entry_time = -1.0;  // ultimate-bound mode
    std::string message;
};

// Which function of (V, eta) is checked: V alone, max{V, eta} for the
// Lyapunov-threshold rules, or V + w eta for the dynamic rules.
enum class EtaUse { None, Max, Sum };

// StrictDecay: the checked function strictly decreases between recorded
// samples until it drops below 1e-10 times its initial value.
// UltimateBound: V enters {V <= lambda_max(S) r^2} and stays there for at
// least the last 10% of the horizon.
DecayReport decay_check(const SimResult& res, const Matrix& S, DecayMode mode, double radius = 0.0,
                        EtaUse eta_use = EtaUse::None, double eta_weight = 1.0, double tol = 1e-9);

// |x(t)| <= c1 exp(-c2 t) |x(0)| + c3 sup_{s<=t} |d(s)| + c4 nu at every sample.
bool iss_envelope_check(const SimResult& res, double c1, double c2, double c3, double c4, double nu);

struct IssConstants {
    double c1 = 1.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
};

// Envelope constants read off one trace, inflated by `margin`.
IssConstants fit_iss_envelope(const SimResult& res, double nu, double margin = 2.0);

std::size_t transmission_count(const SimResult& res);

struct EventRow {
    std::size_t k = 0;
    double t = 0.0;
    double dt = 0.0;
};
std::vector<EventRow> event_series(const SimResult& res);

void write_events_csv(std::ostream& os, const SimResult& res);
void write_trajectory_csv(std::ostream& os, const SimResult& res);

// First inter-event times of two rules started from the same post-event
// state (e = 0) with the same disturbance realization. Infinity when a rule
// does not fire before cfg.t_end.
std::pair<double, double> per_state_dominance(const TriggerSpec& a, const TriggerSpec& b, const PlantModel& plant,
                                              const Matrix& K, const SimConfig& cfg,
                                              std::optional<double> eta_a = std::nullopt,
                                              std::optional<double> eta_b = std::nullopt);

}  // namespace ddetc
