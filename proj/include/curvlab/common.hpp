#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace curvlab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrtPi = 1.77245385090551602730;
inline constexpr double kEulerGamma = 0.57721566490153286061;

inline double sq(double x) { return x * x; }

/// Side of the interface: Plus is the inside of Omega (sigma_plus),
/// Minus is the outside.
enum class Side { Plus, Minus };

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x))
        throw std::domain_error(std::string(what) + " must be finite");
}

}  // namespace curvlab
