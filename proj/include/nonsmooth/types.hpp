#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nonsmooth {

using State = std::vector<double>;

/// First-order right-hand side: writes dx/dt at (t, x) into dxdt.
using Rhs = std::function<void(double t, std::span<const double> x,
                               std::span<double> dxdt)>;

/// Event surface g(t, x); the integrator never steps across a sign change.
using Surface = std::function<double(double t, std::span<const double> x)>;

struct TimeSpan {
    double start = 0.0;
    double end = 0.0;

    double length() const { return end - start; }
};

/// Base class for failures raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nonsmooth
