#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "degen/coeff.hpp"
#include "degen/evolve.hpp"
#include "degen/grid_op.hpp"
#include "degen/mesh.hpp"

namespace degen {

struct CoefficientSpec {
    std::string model = "power_law";  // power_law | piecewise | table
    double exponent_left = 0.0;
    double exponent_right = 0.0;
    double amplitude_left = 1.0;
    double amplitude_right = 1.0;
    double origin = 0.0;
    std::string table;                // resolved path to an x,c CSV
    std::vector<Piece> pieces;
    Domain domain = Domain::line();

    Coefficient build() const;
};

struct GeometrySpec {
    Geometry::Kind kind = Geometry::Kind::line;
    Side side = Side::right;
    double a = 0.0, b = 1.0;
    std::optional<double> truncation;  // absent: chosen from the horizon
};

struct BoundarySpec {
    std::string kind = "friedrichs";  // friedrichs | dirichlet | neumann | robin | line_jump
    std::vector<double> alpha{0.0};
    std::vector<double> beta{1.0};

    /// The pair (α_i, β_i) as a condition; parameter-free kinds ignore i.
    BoundaryCondition condition(std::size_t i = 0) const;
    std::size_t pairs() const { return std::max(alpha.size(), beta.size()); }
};

struct MeshSpec {
    int n_cells = 1000;
    double grading = 0.9;
    FluxRule flux = FluxRule::midpoint;
};

struct EvolveSpec {
    double horizon = 1.0;
    int steps = 100;
    Scheme scheme = Scheme::backward_euler;
    Datum datum = Datum::constant(1.0);
    bool dump_snapshots = false;
};

struct BlowupSpec {
    std::vector<double> gamma_boundary;
    bool dirichlet = false;
    double x_max = 10.0;
};

struct SweepSpec {
    std::vector<double> exponents;        // symmetric grid
    std::vector<double> exponents_left;   // used with exponents_right when `exponents` is empty
    std::vector<double> exponents_right;
    std::vector<double> alpha;
    std::vector<double> beta;
    bool present = false;
};

struct Scenario {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    CoefficientSpec coefficient;
    GeometrySpec geometry;
    std::set<std::string> analyses{"classify"};
    BoundarySpec bc;
    MeshSpec mesh;
    EvolveSpec evolve;
    std::vector<double> deficiency_gamma;
    std::vector<double> krein_gamma;
    BlowupSpec blowup;
    std::vector<double> cutoffs_n;
    SweepSpec sweep;

    std::map<std::string, std::string> echo;  // flattened keys as written

    bool wants(const std::string& analysis) const { return analyses.count(analysis) > 0; }
    /// Mesh for the scenario geometry; the truncation defaults to the evolution horizon rule.
    Mesh build_mesh(const Coefficient& c) const;
};

/// Parses a scenario file; throws Error(config) naming the key and line on
/// unknown keys, bad values or missing parameters of a requested analysis.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = ".");

/// "gaussian(c, w)", "indicator(a, b)" or "constant(v)".
Datum parse_datum(const std::string& s);

/// Assertion tolerances with their defaults; overrides must name known entries.
struct Tolerances {
    std::map<std::string, double> values{
        {"positivity", 1e-12},     {"markov", 1e-10},          {"conservation_drift", 1e-6},
        {"far_outflow", 1e-8},     {"invariance_leak", 1e-8},  {"krein_rank_ratio", 1e-6},
        {"krein_kappa_floor", -1e-10}, {"krein_alignment", 0.999}, {"cutoff_identity", 1e-8},
    };

    double operator[](const std::string& k) const { return values.at(k); }
    void override_from(const std::filesystem::path& path);
};

}  // namespace degen
