#include "ddetc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace ddetc {

namespace {

constexpr double kDivergence = 1e12;

class Loop {
public:
    Loop(const PlantModel& plant, const Matrix& K, const TriggerSpec& spec, const SimConfig& cfg)
        : plant_(plant), K_(K), spec_(spec), cfg_(cfg), n_(plant.n()), eta_on_(has_eta(spec)),
          dwell_(dwell_time(spec)) {
        S_ = cfg.S.size() ? cfg.S : Matrix::Identity(n_, n_);
    }

    SimResult run();

private:
    // Elapsed time seen by the trigger at time t. Inside a step the dwell gate
    // is fixed by the step start so that eta' stays smooth within a step.
    double elapsed(double t, bool after_dwell) const {
        double el = t - tk_;
        if (dwell_ <= 0.0) return el;
        return after_dwell ? std::max(el, dwell_) : std::min(el, std::nextafter(dwell_, 0.0));
    }

    TriggerState state(const Vector& x, double eta, double t, bool after_dwell) const {
        TriggerState s;
        s.x = x;
        s.e = xk_ - x;
        if (eta_on_) s.eta = eta;
        s.elapsed = elapsed(t, after_dwell);
        return s;
    }

    void deriv(double t, const Vector& x, double eta, const Vector& d, bool after_dwell, Vector& dx,
               double& deta) const {
        dx = plant_.A * x + Bu_ + d;
        deta = eta_on_ ? eta_derivative(spec_, state(x, eta, t, after_dwell)) : 0.0;
    }

    void rk4(double t0, double t1, const Vector& x0, double eta0, bool after_dwell, Vector& x1, double& eta1,
             Vector* f0 = nullptr, double* fe0 = nullptr) const {
        const double h = t1 - t0;
        const double tm = 0.5 * (t0 + t1);
        const auto& dist = cfg_.disturbance;
        Vector d0, dm, d1;
        if (dist.piecewise_constant()) {
            d0 = dm = d1 = dist.value(tm, n_);
        } else {
            d0 = dist.value(t0, n_);
            dm = dist.value(tm, n_);
            d1 = dist.value(t1, n_);
        }
        Vector k1, k2, k3, k4;
        double e1, e2, e3, e4;
        deriv(t0, x0, eta0, d0, after_dwell, k1, e1);
        deriv(tm, x0 + 0.5 * h * k1, eta0 + 0.5 * h * e1, dm, after_dwell, k2, e2);
        deriv(tm, x0 + 0.5 * h * k2, eta0 + 0.5 * h * e2, dm, after_dwell, k3, e3);
        deriv(t1, x0 + h * k3, eta0 + h * e3, d1, after_dwell, k4, e4);
        x1 = x0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        eta1 = eta0 + (h / 6.0) * (e1 + 2.0 * e2 + 2.0 * e3 + e4);
        if (f0) *f0 = k1;
        if (fe0) *fe0 = e1;
    }

    Vector d_at(double t0, double t1, double t) const {
        const auto& dist = cfg_.disturbance;
        return dist.piecewise_constant() ? dist.value(0.5 * (t0 + t1), n_) : dist.value(t, n_);
    }

    // Locates the first time in (t0, t1] where the fire value turns nonnegative.
    double bisect(double t0, double t1, bool after_dwell) const {
        Vector f0, f1;
        double fe0, fe1, eta1;
        Vector x1;
        rk4(t0, t1, x_, eta_, after_dwell, x1, eta1, &f0, &fe0);
        deriv(t1, x1, eta1, d_at(t0, t1, t1), after_dwell, f1, fe1);
        const double h = t1 - t0;
        auto value_at = [&](double t) {
            const double s = (t - t0) / h;
            const double s2 = s * s, s3 = s2 * s;
            const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
            Vector x = h00 * x_ + h10 * h * f0 + h01 * x1 + h11 * h * f1;
            double eta = h00 * eta_ + h10 * h * fe0 + h01 * eta1 + h11 * h * fe1;
            return fire_value(spec_, state(x, std::max(eta, 0.0), t, after_dwell));
        };
        double lo = t0, hi = t1;
        while (hi - lo > cfg_.event_tol) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (value_at(mid) >= 0.0)
                hi = mid;
            else
                lo = mid;
        }
        // Secant polish inside the final bracket. Without it the bracket width
        // acts as a per-event error that accumulates over long event chains.
        const double g_lo = value_at(lo), g_hi = value_at(hi);
        if (g_lo < 0.0 && g_hi > g_lo) {
            const double ts = lo + (hi - lo) * (-g_lo / (g_hi - g_lo));
            if (ts > lo && ts < hi) return ts;
        }
        return hi;
    }

    void fire(double t) {
        xk_ = x_;
        u_ = K_ * x_;
        Bu_ = plant_.B * u_;
        tk_ = t;
        dwell_end_ = t + dwell_;
        res_.event_times.push_back(t);
        if (static_cast<long>(res_.event_times.size()) > cfg_.max_events)
            throw Error("event budget exceeded (possible Zeno-like accumulation)");
        frozen_ = anchor_is_zero(spec_, xk_, eta_, x0_norm_);
        armed_ = false;
        if (dwell_ <= 0.0 && !frozen_) armed_ = fire_value(spec_, state(x_, eta_, t, true)) < 0.0;
        record(t, true);
    }

    void record(double t, bool force) {
        if (!force && !res_.t.empty() && res_.t.back() == t) return;
        if (force && !res_.t.empty() && res_.t.back() == t) pop_record();
        const bool after = dwell_ <= 0.0 || t >= dwell_end_;
        TriggerState s = state(x_, eta_, t, after);
        res_.t.push_back(t);
        res_.x.push_back(x_);
        res_.u.push_back(u_);
        res_.e.push_back(s.e);
        res_.d.push_back(cfg_.disturbance.value(t, n_));
        res_.V.push_back(x_.dot(S_ * x_));
        res_.eta.push_back(eta_on_ ? eta_ : 0.0);
        res_.guard.push_back(event_value(spec_, s));
        res_.in_dwell.push_back(dwell_ > 0.0 && t < dwell_end_ && t > tk_ ? 1 : 0);
    }

    void pop_record() {
        res_.t.pop_back();
        res_.x.pop_back();
        res_.u.pop_back();
        res_.e.pop_back();
        res_.d.pop_back();
        res_.V.pop_back();
        res_.eta.pop_back();
        res_.guard.pop_back();
        res_.in_dwell.pop_back();
    }

    void clip_eta(double& eta) {
        if (eta_on_ && eta < 0.0) {
            eta = 0.0;
            ++res_.eta_clips;
        }
    }

    void check(const Vector& x) const {
        if (!x.allFinite() || x.norm() > kDivergence) throw Error("trajectory diverged");
    }

    const PlantModel& plant_;
    Matrix K_;
    const TriggerSpec& spec_;
    const SimConfig& cfg_;
    Eigen::Index n_;
    bool eta_on_;
    double dwell_;
    Matrix S_;

    Vector x_, xk_, u_, Bu_;
    double eta_ = 0.0;
    double tk_ = 0.0;
    double dwell_end_ = 0.0;
    double x0_norm_ = 0.0;
    bool frozen_ = false;
    bool armed_ = false;
    SimResult res_;
};

SimResult Loop::run() {
    plant_.validate();
    if (cfg_.x0.size() != n_) throw Error("initial state dimension mismatch");
    if (K_.rows() != plant_.m() || K_.cols() != n_) throw Error("gain dimension mismatch");
    if (!(cfg_.h > 0.0) || !(cfg_.t_end >= 0.0) || !(cfg_.event_tol > 0.0)) throw Error("invalid simulation settings");
    if (cfg_.record_stride < 1) throw Error("record stride must be >= 1");
    if (cfg_.t_end / cfg_.h > cfg_.max_steps) throw Error("step budget exceeded: t_end / h is too large");
    validate(spec_, n_);
    if (dwell_ > 0.0 && cfg_.h > dwell_ / 10.0 * (1.0 + 1e-12))
        throw Error("integrator step must not exceed a tenth of the dwell time");

    res_.rule = rule_name(spec_);
    res_.dwell = dwell_;
    res_.has_eta = eta_on_;

    x_ = cfg_.x0;
    x0_norm_ = x_.norm();
    if (eta_on_) {
        // An override goes through the rule so the Lyapunov-threshold check applies.
        TriggerSpec probe = spec_;
        if (cfg_.eta0)
            std::visit([&](auto& r) {
                if constexpr (requires { r.eta0; }) r.eta0 = *cfg_.eta0;
            }, probe);
        eta_ = initial_eta(probe, x_);
        if (eta_ < 0.0) throw Error("eta0 must be nonnegative");
    }
    fire(0.0);

    const double h = cfg_.h;
    const double t_end = cfg_.t_end;
    long idx = 1;
    double t = 0.0;
    while (t < t_end) {
        const double t_grid = static_cast<double>(idx) * h;
        if (t_grid <= t) {
            ++idx;
            continue;
        }
        double t1 = std::min(t_grid, t_end);
        const bool dwell_pending = dwell_ > 0.0 && !frozen_ && t < dwell_end_;
        if (dwell_pending && dwell_end_ < t1) t1 = dwell_end_;
        t1 = std::min(t1, cfg_.disturbance.next_switch(t));
        const bool at_dwell_end = dwell_pending && t1 == dwell_end_;
        const bool after_dwell = dwell_ <= 0.0 || t >= dwell_end_;

        Vector x1;
        double eta1 = 0.0;
        rk4(t, t1, x_, eta_, after_dwell, x1, eta1);
        ++res_.steps;
        check(x1);

        bool event = false;
        double t_event = t1;
        if (!frozen_) {
            if (at_dwell_end) {
                double eta_c = std::max(eta1, 0.0);
                event = fire_value(spec_, state(x1, eta_c, t1, true)) >= 0.0;
                armed_ = !event;
            } else if (after_dwell) {
                const double g1 = fire_value(spec_, state(x1, std::max(eta1, 0.0), t1, true));
                if (armed_ && g1 >= 0.0) {
                    event = true;
                    t_event = bisect(t, t1, true);
                    if (t_event < t1) rk4(t, t_event, x_, eta_, true, x1, eta1);
                } else if (!armed_ && g1 < 0.0) {
                    armed_ = true;
                }
            }
        }

        x_ = x1;
        eta_ = eta1;
        clip_eta(eta_);
        t = t_event;
        if (t == t_grid) ++idx;

        if (event) {
            fire(t);
            if (cfg_.stop_after_events > 0 &&
                static_cast<long>(res_.event_times.size()) - 1 >= cfg_.stop_after_events)
                break;
        } else if (t == t_grid && (idx - 1) % cfg_.record_stride == 0) {
            record(t, false);
        }
    }
    if (res_.t.empty() || res_.t.back() != t) record(t, false);
    res_.frozen = frozen_;
    return std::move(res_);
}

}  // namespace

std::vector<double> SimResult::inter_event_times() const {
    std::vector<double> out;
    for (std::size_t k = 1; k < event_times.size(); ++k) out.push_back(event_times[k] - event_times[k - 1]);
    return out;
}

SimResult simulate(const PlantModel& plant, const Matrix& K, const TriggerSpec& spec, const SimConfig& cfg) {
    Loop loop(plant, K, spec, cfg);
    return loop.run();
}

double min_inter_event(const SimResult& res) {
    if (res.event_times.size() < 2) throw Error("insufficient events");
    auto gaps = res.inter_event_times();
    return *std::min_element(gaps.begin(), gaps.end());
}

std::vector<double> lyapunov_trace(const SimResult& res, const Matrix& S) {
    std::vector<double> V;
    V.reserve(res.x.size());
    for (const auto& x : res.x) V.push_back(x.dot(S * x));
    return V;
}

DecayReport decay_check(const SimResult& res, const Matrix& S, DecayMode mode, double radius, EtaUse eta_use,
                        double eta_weight, double tol) {
    DecayReport rep;
    std::vector<double> V = lyapunov_trace(res, S);
    for (std::size_t i = 0; i < V.size(); ++i) {
        if (eta_use == EtaUse::Max) V[i] = std::max(V[i], res.eta[i]);
        if (eta_use == EtaUse::Sum) V[i] += eta_weight * res.eta[i];
    }
    if (V.empty()) {
        rep.pass = true;
        return rep;
    }
    if (mode == DecayMode::StrictDecay) {
        const double floor = 1e-10 * V.front();
        const double slack = tol * (1.0 + V.front());
        for (std::size_t i = 1; i < V.size(); ++i) {
            if (V[i - 1] < floor) break;
            if (res.t[i] == res.t[i - 1]) continue;
            if (!(V[i] < V[i - 1] + slack) || (V[i] >= V[i - 1] && V[i - 1] > slack)) {
                if (rep.violations++ == 0) rep.first_violation_t = res.t[i];
            }
        }
        rep.pass = rep.violations == 0;
        rep.message = rep.pass ? "strictly decreasing" : "V failed to decrease";
        return rep;
    }
    const double level = linalg::lambda_max_sym(S) * radius * radius;
    const double cap = level + tol * (1.0 + level);
    std::size_t entry = V.size();
    for (std::size_t i = V.size(); i-- > 0;) {
        if (V[i] > cap) break;
        entry = i;
    }
    if (entry == V.size()) {
        rep.message = "never entered the ball";
        return rep;
    }
    rep.entry_time = res.t[entry];
    const double horizon = res.t.back() - res.t.front();
    rep.pass = res.t.back() - rep.entry_time >= 0.1 * horizon;
    rep.message = rep.pass ? "entered and stayed in the ball" : "entered the ball too late";
    return rep;
}

bool iss_envelope_check(const SimResult& res, double c1, double c2, double c3, double c4, double nu) {
    if (res.x.empty()) return true;
    const double x0 = res.x.front().norm();
    double dsup = 0.0;
    for (std::size_t i = 0; i < res.x.size(); ++i) {
        dsup = std::max(dsup, res.d[i].norm());
        const double bound = c1 * std::exp(-c2 * res.t[i]) * x0 + c3 * dsup + c4 * nu;
        if (res.x[i].norm() > bound + 1e-12) return false;
    }
    return true;
}

IssConstants fit_iss_envelope(const SimResult& res, double nu, double margin) {
    IssConstants c;
    if (res.x.empty()) return c;
    const double x0 = res.x.front().norm();
    const double t_end = res.t.back();
    double dsup = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < res.x.size(); ++i) {
        dsup = std::max(dsup, res.d[i].norm());
        if (res.t[i] >= 0.5 * t_end) tail = std::max(tail, res.x[i].norm());
    }
    const double floor_level = std::max(tail, 1e-12 * (1.0 + x0));
    // Ultimate level attributed to d when present, otherwise to nu.
    if (dsup > 0.0)
        c.c3 = margin * tail / dsup;
    else if (nu > 0.0)
        c.c4 = margin * tail / nu;
    // Decay rate: half the average log-rate until the trace reaches twice its tail level.
    double t_hit = t_end;
    for (std::size_t i = 0; i < res.x.size(); ++i)
        if (res.x[i].norm() <= 2.0 * floor_level) {
            t_hit = res.t[i];
            break;
        }
    if (x0 > 2.0 * floor_level && t_hit > 0.0) c.c2 = 0.5 * std::log(x0 / (2.0 * floor_level)) / t_hit;
    double need = 1.0;
    if (x0 > 0.0) {
        double dsup_i = 0.0;
        for (std::size_t i = 0; i < res.x.size(); ++i) {
            dsup_i = std::max(dsup_i, res.d[i].norm());
            const double rest = res.x[i].norm() - c.c3 * dsup_i - c.c4 * nu;
            if (rest > 0.0) need = std::max(need, rest * std::exp(c.c2 * res.t[i]) / x0);
        }
    }
    c.c1 = margin * need;
    return c;
}

std::size_t transmission_count(const SimResult& res) { return std::max<std::size_t>(res.event_times.size(), 1); }

std::vector<EventRow> event_series(const SimResult& res) {
    std::vector<EventRow> rows;
    for (std::size_t k = 0; k < res.event_times.size(); ++k)
        rows.push_back({k, res.event_times[k], k == 0 ? 0.0 : res.event_times[k] - res.event_times[k - 1]});
    return rows;
}

namespace {

void put(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

}  // namespace

void write_events_csv(std::ostream& os, const SimResult& res) {
    os << "k,t_k,dt_k\n";
    for (const auto& r : event_series(res)) {
        os << r.k << ',';
        put(os, r.t);
        os << ',';
        put(os, r.dt);
        os << '\n';
    }
}

void write_trajectory_csv(std::ostream& os, const SimResult& res) {
    if (res.x.empty()) return;
    const auto n = res.x.front().size();
    const auto m = res.u.front().size();
    os << 't';
    for (Eigen::Index i = 1; i <= n; ++i) os << ",x_" << i;
    for (Eigen::Index i = 1; i <= m; ++i) os << ",u_" << i;
    os << ",V,eta";
    for (Eigen::Index i = 1; i <= n; ++i) os << ",d_" << i;
    os << '\n';
    for (std::size_t k = 0; k < res.t.size(); ++k) {
        put(os, res.t[k]);
        for (Eigen::Index i = 0; i < n; ++i) os << ',', put(os, res.x[k](i));
        for (Eigen::Index i = 0; i < m; ++i) os << ',', put(os, res.u[k](i));
        os << ',';
        put(os, res.V[k]);
        os << ',';
        put(os, res.eta[k]);
        for (Eigen::Index i = 0; i < n; ++i) os << ',', put(os, res.d[k](i));
        os << '\n';
    }
}

std::pair<double, double> per_state_dominance(const TriggerSpec& a, const TriggerSpec& b, const PlantModel& plant,
                                              const Matrix& K, const SimConfig& cfg, std::optional<double> eta_a,
                                              std::optional<double> eta_b) {
    auto first = [&](const TriggerSpec& spec, std::optional<double> eta) {
        SimConfig c = cfg;
        c.stop_after_events = 1;
        c.eta0 = eta;
        SimResult r = simulate(plant, K, spec, c);
        return r.event_times.size() >= 2 ? r.event_times[1] : std::numeric_limits<double>::infinity();
    };
    return {first(a, eta_a), first(b, eta_b)};
}

}  // namespace ddetc
