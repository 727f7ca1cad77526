#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "degen/coeff.hpp"

namespace degen {

/// One-sided neighbourhood of a degeneracy, in the local coordinate
/// t = side·(x − origin) ∈ (0, reach].
struct Endpoint {
    double origin = 0.0;
    Side side = Side::right;
    double reach = 1.0;

    double to_x(double t) const { return origin + sign_of(side) * t; }
};

struct ClassifyOptions {
    double reach = 1.0;          // upper limit of the ν integrals
    double x_max = 1e6;          // right end of the μ sample grid
    double eps = 1e-12;          // inner end of the ν sample grid, relative to reach
    int points_per_decade = 25;
    double rel_tol = 1e-10;
    double borderline = 0.05;    // |δ̂ − boundary| below this is flagged
    double slope_spread = 0.25;  // interquartile range above this is indeterminate
};

enum class Basis { exact, estimated };

const char* to_string(Basis b);

struct HarmonicProfile {
    Endpoint endpoint;

    double exponent = 0.0;   // δ̂, local power of c at the degeneracy
    double amplitude = 0.0;  // leading coefficient of c ≈ amplitude·t^δ̂
    Basis basis = Basis::exact;
    bool borderline = false;
    std::vector<double> slopes;  // raw log–log slopes when estimated

    std::vector<double> nu_t;       // increasing
    std::vector<double> nu_values;  // non-increasing
    bool nu_in_l2 = false;
    bool nu_in_linf = false;
    double nu_l2_norm_sq = 0.0;      // +inf when ν ∉ L2
    double nu_l2_quadrature = 0.0;   // part on (eps, reach)
    double nu_l2_tail = 0.0;         // estimated part on (0, eps)
    double nu_sup = 0.0;             // +inf when ν ∉ L∞

    bool mu_available = false;  // the side reaches infinity
    double mu_exponent = 0.0;
    std::vector<double> mu_x;
    std::vector<double> mu_values;
    bool mu_in_linf = false;
    double mu_sup = 0.0;

    /// ν at t by interpolation-free evaluation (closed form or panel quadrature).
    double nu_at(const Coefficient& c, double t, double rel_tol = 1e-10) const;
};

enum class Case { I = 1, II = 2, III = 3 };

const char* to_string(Case k);

struct ExtensionFamily {
    std::string name;
    std::string condition;
    std::string submarkovian;  // "always", "never" or the parameter constraint
    bool realized = true;
};

struct ClassificationReport {
    Case kase = Case::I;
    bool half_line = false;
    bool essentially_self_adjoint = false;
    std::pair<int, int> deficiency_indices{0, 0};
    bool unique_submarkovian = false;
    std::vector<ExtensionFamily> extension_menu;
    bool growth_known = false;
    bool growth_inaccessible_at_infinity = false;
    std::optional<HarmonicProfile> left;
    std::optional<HarmonicProfile> right;
};

/// ν(x) = ∫_x^reach 1/c on the chosen side of the origin.
double nu(const Coefficient& c, Side side, double x, const ClassifyOptions& opt = {});
double nu(const Coefficient& c, const Endpoint& ep, double t, double rel_tol = 1e-10);

/// μ(x) = ∫_1^x s/c on the chosen side of the origin.
double mu(const Coefficient& c, Side side, double x, const ClassifyOptions& opt = {});

HarmonicProfile membership(const Coefficient& c, Side side, const ClassifyOptions& opt = {});
HarmonicProfile membership(const Coefficient& c, const Endpoint& ep, const ClassifyOptions& opt = {});

/// Combines the sides of a line or half-line coefficient degenerate at 0.
ClassificationReport classify(const Coefficient& c, const ClassifyOptions& opt = {});

/// Case decided from per-endpoint integrability verdicts.
Case case_from(bool nu_in_l2, bool nu_in_linf);

/// Energy of the truncated harmonic cutoff χ_n = ν/ν(1/n) on (1/n, reach).
double cutoff_energy(const Coefficient& c, Side side, double n, const ClassifyOptions& opt = {});

struct SmoothCutoff {
    std::vector<double> x;
    std::vector<double> phi;
    double nu_n = 0.0;
    double flux_divergence_l1 = 0.0;     // ‖(c φ_n′)′‖₁
    double xi_flux_divergence_l1 = 0.0;  // ‖(c ξ_n′)′‖₁ with ξ_n = (1 − χ_n)²
    double leading_term = 0.0;           // 1/ν_n
    double ratio = 0.0;                  // flux_divergence_l1 / leading_term
};

SmoothCutoff smooth_cutoff_l1(const Coefficient& c, Side side, double n, const ClassifyOptions& opt = {});

}  // namespace degen
