#include "smoco/control.hpp"

#include <stdexcept>

namespace smoco {

Vector control_input(const ControlLaw& law, const Vector& estimate) {
    if (estimate.size() != law.K_bar.cols()) {
        throw std::invalid_argument("control_input: estimate dimension must be n+m");
    }
    return law.K_bar * estimate;
}

}  // namespace smoco
