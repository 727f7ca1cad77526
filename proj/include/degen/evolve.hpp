#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "degen/grid_op.hpp"

namespace degen {

enum class Scheme { backward_euler, crank_nicolson };

const char* to_string(Scheme s);

/// Initial data sampled at the unknowns.
struct Datum {
    enum class Kind { gaussian, indicator, constant };

    Kind kind = Kind::constant;
    double p1 = 1.0;  // centre, left end or value
    double p2 = 0.0;  // width or right end

    static Datum gaussian(double centre, double width) { return {Kind::gaussian, centre, width}; }
    static Datum indicator(double a, double b) { return {Kind::indicator, a, b}; }
    static Datum constant(double v) { return {Kind::constant, v, 0.0}; }

    double operator()(double x) const;
    std::string describe() const;
};

struct SnapshotMetrics {
    double min_value = 0.0;
    double sup_norm = 0.0;
    double l1_mass = 0.0;     // Σ w|φ|
    double integral = 0.0;    // Σ wφ
    double l2_norm = 0.0;
    double mass_left = 0.0;   // Σ w|φ| over x < 0, half of a shared origin node
    double mass_right = 0.0;
};

SnapshotMetrics measure(const DiscreteOperator& op, const std::vector<double>& phi);

struct SemigroupTrace {
    Scheme scheme = Scheme::backward_euler;
    std::vector<double> x;
    std::vector<double> times;
    std::vector<std::vector<double>> snapshots;
    std::vector<SnapshotMetrics> metrics;
    std::vector<double> far_outflow;   // cumulative flux through truncation boundaries
    std::vector<double> sink_outflow;  // cumulative flux through every absorbing term

    bool positivity_reliable() const { return scheme == Scheme::backward_euler; }
    void write_csv(std::ostream& os) const;
    /// Little-endian float64 layout: n_nodes and n_times (as float64), then
    /// x[n_nodes], times[n_times], snapshots row by row.
    void write_binary(std::ostream& os) const;
};

/// One step of e^{−dt·H}: (I + dt·H)^{-1}φ, or the trapezoidal update.
std::vector<double> step(const DiscreteOperator& op, const std::vector<double>& phi, double dt,
                         Scheme scheme = Scheme::backward_euler);

SemigroupTrace evolve(const DiscreteOperator& op, const std::vector<double>& phi0, double horizon, int n_steps,
                      Scheme scheme = Scheme::backward_euler);

struct Conservation {
    double max_mass_drift = 0.0;     // max_t |∫φ(t) − ∫φ(0)| / |∫φ(0)|
    double far_outflow = 0.0;        // relative to |∫φ(0)|
    double absorbed = 0.0;           // relative outflow through all sinks
};

/// Throws Error(indeterminate, "truncation too small ...") when the far
/// boundaries carried more than `far_tol` of the initial mass.
Conservation conservativeness(const SemigroupTrace& trace, double far_tol = 1e-8);

struct SubmarkovViolation {
    int positivity_failures = 0;  // snapshots with min < −tol·sup(0)
    double sup_expansion = 0.0;   // max_t sup(t)/sup(0)
    double lambda1 = 0.0;
    double dt = 0.0;
    int snapshots = 0;
};

/// Evolves `trials` random non-negative data and the constant function on
/// [0, horizon]; the step is kept below 0.5/|λ₁| when λ₁ < 0.
SubmarkovViolation submarkov_violation(const DiscreteOperator& op, int trials, std::uint64_t seed,
                                       double horizon = 1.0, int n_steps = 200, double tol = 1e-12);

}  // namespace degen
