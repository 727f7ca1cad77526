#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "degen/grid_op.hpp"
#include "degen/tridiag.hpp"

namespace degen {

/// (γ + H)^{-1} for a fixed operator, factorised once.
class Resolvent {
public:
    /// Throws Error(resolvent_pole) when γ + H is not positive definite.
    Resolvent(const DiscreteOperator& op, double gamma);

    double gamma() const { return gamma_; }
    std::size_t size() const { return w_.size(); }
    std::vector<double> apply(const std::vector<double>& f) const;

private:
    double gamma_;
    std::vector<double> w_;
    ShiftedFactor factor_;
};

struct KreinOptions {
    int probes = 32;
    std::uint64_t seed = 1;
    AssemblyOptions assembly;
    double eta_x_min = 1e-12;
};

struct KreinDiagnostics {
    double gamma = 0.0;
    double kappa = 0.0;              // signed dominant eigenvalue of the resolvent difference
    double second = 0.0;             // runner-up, signed
    double rank_ratio = 0.0;         // |second| / |kappa|
    double range_alignment = 0.0;    // W-cosine against η_γ; NaN when not defined
    std::string baseline;
    std::string extension;
    std::size_t dofs = 0;
};

/// Compares the extension with boundary pair (α, β) against the Friedrichs
/// operator on the same mesh. Half-lines take a Robin condition, lines a jump
/// condition at the origin.
KreinDiagnostics krein_check(const Coefficient& c, double alpha, double beta, double gamma, const Mesh& mesh,
                             const KreinOptions& opt = {});

}  // namespace degen
