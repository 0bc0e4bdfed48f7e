#pragma once

#include "ddetc/dataset.hpp"
#include "ddetc/disturbance.hpp"

#include <random>

namespace fixtures {

using ddetc::Matrix;

inline ddetc::PlantModel example_plant() {
    ddetc::PlantModel p;
    p.A.resize(2, 2);
    p.A << 0.0, 0.0, -1.0, -2.0;
    p.B.resize(2, 1);
    p.B << 1.0, 0.0;
    return p;
}

inline ddetc::ExperimentConfig example_config(std::uint64_t seed, double delta = 0.0) {
    ddetc::ExperimentConfig c;
    c.seed = seed;
    if (delta > 0.0) c.disturbance = ddetc::DisturbanceSignal::uniform(delta, seed + 100, c.Ts / c.substeps);
    return c;
}

inline ddetc::DataMatrices example_data(std::uint64_t seed, double delta = 0.0) {
    return ddetc::run_experiment(example_plant(), example_config(seed, delta));
}

inline ddetc::DataMatrices scalar_data() {
    ddetc::DataMatrices dm;
    dm.Ts = 0.1;
    dm.U0 = Matrix{{1.0, -1.0}};
    dm.X0 = Matrix{{1.0, 2.0}};
    dm.X1 = Matrix{{2.0, 1.0}};
    return dm;
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix M(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) M(i, j) = g(rng);
    return M;
}

}  // namespace fixtures
