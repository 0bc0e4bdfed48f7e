#include "ddetc/disturbance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ddetc {

std::string to_string(DisturbanceKind kind) {
    switch (kind) {
    case DisturbanceKind::Zero: return "zero";
    case DisturbanceKind::UniformBounded: return "uniform";
    case DisturbanceKind::Sinusoidal: return "sinusoidal";
    case DisturbanceKind::CustomSamples: return "custom";
    }
    return "zero";
}

DisturbanceKind disturbance_kind_from_string(const std::string& name) {
    if (name == "zero" || name == "none") return DisturbanceKind::Zero;
    if (name == "uniform" || name == "uniform-bounded") return DisturbanceKind::UniformBounded;
    if (name == "sinusoidal" || name == "sine") return DisturbanceKind::Sinusoidal;
    if (name == "custom" || name == "custom-samples") return DisturbanceKind::CustomSamples;
    throw Error("unknown disturbance kind '" + name + "'");
}

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

DisturbanceSignal DisturbanceSignal::uniform(double amplitude, std::uint64_t seed, double hold) {
    if (amplitude < 0.0) throw Error("invalid amplitude");
    if (!(hold > 0.0)) throw Error("disturbance hold period must be positive");
    DisturbanceSignal d;
    d.kind = amplitude > 0.0 ? DisturbanceKind::UniformBounded : DisturbanceKind::Zero;
    d.amplitude = amplitude;
    d.seed = seed;
    d.hold = hold;
    return d;
}

DisturbanceSignal DisturbanceSignal::sinusoid(double amplitude, std::uint64_t seed, double frequency) {
    if (amplitude < 0.0) throw Error("invalid amplitude");
    DisturbanceSignal d;
    d.kind = DisturbanceKind::Sinusoidal;
    d.amplitude = amplitude;
    d.seed = seed;
    d.frequency = frequency;
    return d;
}

DisturbanceSignal DisturbanceSignal::custom(Matrix samples, double hold) {
    if (!(hold > 0.0)) throw Error("disturbance hold period must be positive");
    if (samples.cols() == 0) throw Error("custom disturbance needs at least one sample");
    DisturbanceSignal d;
    d.kind = DisturbanceKind::CustomSamples;
    d.hold = hold;
    d.amplitude = samples.colwise().norm().maxCoeff();
    d.samples = std::move(samples);
    return d;
}

namespace {

std::int64_t bucket(double t, double hold) {
    return static_cast<std::int64_t>(std::floor(t / hold));
}

double sine_rate(double frequency, Eigen::Index j) {
    return frequency * (1.0 + 0.37 * static_cast<double>(j));
}

double sine_phase(std::uint64_t seed, Eigen::Index j) {
    return 2.0 * std::numbers::pi * unit_from_bits(mix64(seed ^ (0xa5a5ULL + static_cast<std::uint64_t>(j))));
}

}  // namespace

Vector DisturbanceSignal::value(double t, Eigen::Index n) const {
    switch (kind) {
    case DisturbanceKind::Zero:
        return Vector::Zero(n);
    case DisturbanceKind::UniformBounded: {
        const auto k = static_cast<std::uint64_t>(std::max<std::int64_t>(0, bucket(t, hold)));
        Vector d(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            std::uint64_t key = mix64(seed) ^ (k * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(j));
            d(j) = amplitude * (2.0 * unit_from_bits(mix64(key)) - 1.0);
        }
        double nrm = d.norm();
        if (nrm > amplitude) d *= amplitude / nrm;
        return d;
    }
    case DisturbanceKind::Sinusoidal: {
        Vector d(n);
        double scale = amplitude / std::sqrt(static_cast<double>(n));
        for (Eigen::Index j = 0; j < n; ++j)
            d(j) = scale * std::sin(sine_rate(frequency, j) * t + sine_phase(seed, j));
        return d;
    }
    case DisturbanceKind::CustomSamples: {
        if (samples.rows() != n) throw Error("custom disturbance dimension mismatch");
        auto k = std::clamp<std::int64_t>(bucket(t, hold), 0, samples.cols() - 1);
        return samples.col(k);
    }
    }
    return Vector::Zero(n);
}

Vector DisturbanceSignal::integral(double a, double b, Eigen::Index n) const {
    if (kind == DisturbanceKind::Zero || b <= a) return Vector::Zero(n);
    if (kind == DisturbanceKind::Sinusoidal) {
        Vector w(n);
        double scale = amplitude / std::sqrt(static_cast<double>(n));
        for (Eigen::Index j = 0; j < n; ++j) {
            double r = sine_rate(frequency, j);
            double ph = sine_phase(seed, j);
            w(j) = scale * (std::cos(r * a + ph) - std::cos(r * b + ph)) / r;
        }
        return w;
    }
    Vector w = Vector::Zero(n);
    double t = a;
    while (t < b) {
        double t_next = std::min(b, next_switch(t));
        w += (t_next - t) * value(0.5 * (t + t_next), n);
        t = t_next;
    }
    return w;
}

double DisturbanceSignal::next_switch(double t) const {
    if (!piecewise_constant()) return std::numeric_limits<double>::infinity();
    if (kind == DisturbanceKind::CustomSamples && bucket(t, hold) >= samples.cols() - 1)
        return std::numeric_limits<double>::infinity();
    std::int64_t k = bucket(t, hold) + 1;
    double ts = static_cast<double>(k) * hold;
    // Skip slivers created by rounding of t near a grid point.
    while (ts <= t + 1e-12 * hold) ts = static_cast<double>(++k) * hold;
    return ts;
}

double DisturbanceSignal::bound() const {
    return kind == DisturbanceKind::Zero ? 0.0 : amplitude;
}

}  // namespace ddetc
