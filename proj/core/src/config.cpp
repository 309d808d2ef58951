#include "embadapt/config.hpp"

#include <cmath>
#include <stdexcept>

namespace embadapt {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw std::invalid_argument("learning rate must be positive");
    if (!(temperature > 0.0) || !std::isfinite(temperature)) throw std::invalid_argument("temperature must be positive");
    if (batch_size < 2) throw std::invalid_argument("batch size must be at least 2");
    if (projection_size < 1) throw std::invalid_argument("projection size must be positive");
    if (hidden_width && *hidden_width < 1) throw std::invalid_argument("hidden width must be positive");
}

}  // namespace embadapt
