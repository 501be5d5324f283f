#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rfedit {

/// Invalid or inconsistent configuration (grids, schedules, config files).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Step index or record depth out of range.
class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A field produced a non-finite value. Carries the step index and time of the failure.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::size_t step, double time, const std::string& what);

    std::size_t step() const noexcept { return m_step; }
    double time() const noexcept { return m_time; }

private:
    std::size_t m_step;
    double m_time;
};

}  // namespace rfedit
