#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "degen/classify.hpp"
#include "degen/coeff.hpp"

namespace degen {

/// Sampled solution of (cψ′)′ = γψ carried as (ψ, cψ′).
struct ShootingSolution {
    std::vector<double> grid;        // increasing
    std::vector<double> psi;
    std::vector<double> flux;        // cψ′
    std::vector<double> l2_partial;  // ∫ ψ² from grid.front()
    double gamma = 0.0;
    double lp_tail_exponent = 0.0;   // local slope d ln|ψ| / d ln t at the end nearest a zero of c
    bool monotone_square = false;    // ψ² non-decreasing in x
    bool truncated = false;
    std::string truncation_reason;

    void write_csv(std::ostream& os) const;
};

struct ShootOptions {
    double rel_tol = 1e-10;
};

/// Integrates ψ′ = F/c, F′ = γψ from x_start with seed (ψ, F) to x_end.
ShootingSolution integrate_deficiency(const Coefficient& c, double gamma, double x_start,
                                      std::pair<double, double> seed, double x_end, const ShootOptions& opt = {},
                                      const std::vector<double>& stops = {});

struct DeficiencyResult {
    int index = 0;
    std::array<double, 3> eps{1e-4, 1e-6, 1e-8};
    // Partial masses ∫_ε^1 ψ² for the seeds (1, 0) and (0, 1).
    std::array<std::array<double, 3>, 2> mass{};
    std::array<double, 2> ratio{};       // second two-decade increment over the first
    std::array<bool, 2> divergent{};
};

/// 1 when every solution near the origin has finite L2 mass, 0 when some do not.
/// Throws Error(indeterminate) carrying the partial masses if a seed is undecided.
DeficiencyResult deficiency_index(const Coefficient& c, Side side, double gamma, const ShootOptions& opt = {});

/// The decaying solution on (x_min, L) with ψ(L) = 0, normalised to unit L2 mass there.
ShootingSolution deficiency_solution(const Coefficient& c, Side side, double gamma, double length,
                                     double x_min = 1e-12, const ShootOptions& opt = {},
                                     const std::vector<double>& stops = {});

struct EtaProperties {
    bool positive = false;
    bool non_increasing = false;
    double tail_exponent = 0.0;  // e with ψ ~ t^{-e}, e ≥ 0
    bool snapped = false;        // tail exponent taken from the harmonic profile
    bool bounded = true;

    bool lp_member(double p) const;
};

/// Sign and shape flags on the sample grid; the harmonic profile, when given,
/// supplies the exact tail exponent if the measured one agrees within 0.05.
EtaProperties eta_properties(const ShootingSolution& sol, const HarmonicProfile* nu_profile = nullptr);

struct BlowupResult {
    bool monotone_square = false;
    double growth_factor = 0.0;
    double start = 0.0;
    double x0 = 0.0;
    double x_end = 0.0;
    ShootingSolution solution;
};

/// Integrates (cψ′)′ = ψ on (ε, X) with ψ′ = γ_b ψ at ε, or ψ(ε) = 0 when
/// `dirichlet` is set. Refuses when ∫₁^∞ s/c is finite.
BlowupResult blowup_check(const Coefficient& c, double gamma_boundary, double x_end, bool dirichlet = false,
                          const ShootOptions& opt = {});

}  // namespace degen
