#pragma once

#include "smoco/model.hpp"
#include "smoco/sim.hpp"

namespace smoco::testing {

// Bundled example plant (same values as configs/example.json).
inline PlantModel example_plant() {
    PlantModel plant;
    plant.A.resize(4, 4);
    plant.A << 0, 0, 1, 0,
               0, 0, 0, 1,
               0, 0.8, -1.5, 0,
               -3.7, 0.7, 0, -4.9;
    plant.B.resize(4, 2);
    plant.B << 0, 0,
               0, 0,
               -2, 0,
               0, 2.5;
    plant.C.resize(2, 4);
    plant.C << 1, 0, 0, 0,
               0, 1, 0, 0;
    plant.Lambda = Matrix::Zero(2, 2);
    plant.Lambda.diagonal() << 2, 0.5;
    plant.C_omega = Matrix::Zero(2, 2);
    plant.C_omega.diagonal() << 2, 1;
    return plant;
}

inline Matrix example_phi() {
    Matrix phi = Matrix::Zero(2, 2);
    phi.diagonal() << 0.1, 0.01;
    return phi;
}

inline AugmentedModel example_aug() {
    return build_augmented(example_plant(), example_phi());
}

inline DisturbanceSpec example_disturbance() {
    DisturbanceSpec spec;
    spec.channels = {{DisturbanceComponent::sine(5.0, 1.0, 0.0)},
                     {DisturbanceComponent::step(5.0, 10.0)}};
    return spec;
}

inline Vector example_x0() {
    Vector x0(4);
    x0 << -200, -100, 80, 60;
    return x0;
}

}  // namespace smoco::testing
