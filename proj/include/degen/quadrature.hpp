#pragma once

#include <functional>

namespace degen {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss–Kronrod (7/15) on [a, b].
/// Throws Error(quadrature) if the integrand returns a non-finite value.
QuadResult gauss_kronrod(const Integrand& f, double a, double b, double rel_tol, double abs_tol = 0.0,
                         int max_subdivisions = 4000);

/// Same rule applied on panels whose widths grow geometrically away from
/// `pole` (which must lie outside the open interval). Suited to integrands
/// that vary on the scale |x − pole|.
QuadResult integrate_graded(const Integrand& f, double a, double b, double pole, double rel_tol,
                            double abs_tol = 0.0);

}  // namespace degen
