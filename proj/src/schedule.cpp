#include "rfedit/schedule.hpp"

#include <cmath>

#include "rfedit/errors.hpp"

namespace rfedit {

CosineSchedule::CosineSchedule(double alpha_bar_min) {
    if (!(alpha_bar_min > 0.0 && alpha_bar_min < 1.0))
        throw ConfigError("cosine schedule needs alpha_bar_min in (0, 1)");
    m_theta_max = std::acos(std::sqrt(alpha_bar_min));
}

double CosineSchedule::signal(double t) const {
    return std::cos(m_theta_max * t);
}

double CosineSchedule::noise(double t) const {
    return std::sin(m_theta_max * t);
}

double CosineSchedule::signal_rate(double t) const {
    return -m_theta_max * std::sin(m_theta_max * t);
}

double CosineSchedule::noise_rate(double t) const {
    return m_theta_max * std::cos(m_theta_max * t);
}

std::shared_ptr<const NoiseSchedule> make_schedule(const std::string& name) {
    if (name == "linear")
        return std::make_shared<LinearSchedule>();
    if (name == "cosine")
        return std::make_shared<CosineSchedule>();
    throw ConfigError("unknown schedule '" + name + "' (expected linear or cosine)");
}

}  // namespace rfedit
