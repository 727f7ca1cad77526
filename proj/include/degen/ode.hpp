#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace degen {

using State = std::array<double, 3>;
using Rhs = std::function<void(double t, const State& y, State& dy)>;

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;
    int max_steps = 500000;
    double overflow = 1e250;  // stop when any component exceeds this
    /// Optional cap on |h| as a function of the current t.
    std::function<double(double)> max_step;
};

struct OdeTrace {
    std::vector<double> t;
    std::vector<State> y;
    bool truncated = false;
    std::string reason;
};

/// Adaptive Dormand–Prince 5(4) from t0 to t1 (either direction). Every
/// accepted step is recorded; steps land exactly on each requested stop.
OdeTrace dormand_prince(const Rhs& f, double t0, const State& y0, double t1, std::vector<double> stops,
                        const OdeOptions& opt = {});

}  // namespace degen
