#pragma once

#include "smoco/linalg.hpp"

namespace smoco {

enum class EstimateSource { SMO, SMO_CO, TRUE_STATE };

struct ControlLaw {
    Matrix K_bar;  // m x (n+m)
    EstimateSource source = EstimateSource::SMO;
};

// u = K_bar * estimate, estimate = [state estimate; disturbance estimate].
Vector control_input(const ControlLaw& law, const Vector& estimate);

}  // namespace smoco
