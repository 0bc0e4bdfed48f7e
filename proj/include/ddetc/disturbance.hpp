#pragma once

#include "ddetc/linalg.hpp"

#include <cstdint>
#include <limits>
#include <string>

namespace ddetc {

enum class DisturbanceKind { Zero, UniformBounded, Sinusoidal, CustomSamples };

std::string to_string(DisturbanceKind kind);
DisturbanceKind disturbance_kind_from_string(const std::string& name);

/// A bounded, measurable disturbance signal d(t) in R^n, evaluated as a pure
/// function of time so that a realization does not depend on the integrator
/// step.
///
/// UniformBounded draws an independent value on each hold interval
/// [k*hold, (k+1)*hold): components uniform in [-amplitude, amplitude], then
/// projected radially onto the Euclidean ball of radius amplitude.
/// Sinusoidal uses components amplitude/sqrt(n) * sin(freq_j t + phase_j).
/// CustomSamples holds column k of `samples` on [k*hold, (k+1)*hold) and the
/// last column afterwards.
struct DisturbanceSignal {
    DisturbanceKind kind = DisturbanceKind::Zero;
    double amplitude = 0.0;
    std::uint64_t seed = 0;
    double hold = 1e-4;
    double frequency = 1.0;
    Matrix samples;

    static DisturbanceSignal zero() { return {}; }
    static DisturbanceSignal uniform(double amplitude, std::uint64_t seed, double hold = 1e-4);
    static DisturbanceSignal sinusoid(double amplitude, std::uint64_t seed, double frequency = 1.0);
    static DisturbanceSignal custom(Matrix samples, double hold);

    Vector value(double t, Eigen::Index n) const;

    // Antiderivative from a to b; exact for every kind.
    Vector integral(double a, double b, Eigen::Index n) const;

    bool piecewise_constant() const {
        return kind == DisturbanceKind::UniformBounded || kind == DisturbanceKind::CustomSamples;
    }

    // First discontinuity strictly after t (infinity for smooth kinds).
    double next_switch(double t) const;

    // Declared sup-norm bound.
    double bound() const;
};

// splitmix64 finalizer; used for counter-based reproducible draws.
std::uint64_t mix64(std::uint64_t z);

// Uniform double in [0,1) from a 64-bit word.
inline double unit_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace ddetc
