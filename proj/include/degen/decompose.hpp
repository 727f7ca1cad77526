#pragma once

#include <optional>
#include <string>
#include <vector>

#include "degen/classify.hpp"
#include "degen/coeff.hpp"
#include "degen/grid_op.hpp"

namespace degen {

/// What bounds a component on one side.
struct ComponentEnd {
    enum class Kind { infinite, regular, degenerate };

    Kind kind = Kind::infinite;
    double x = 0.0;
    bool plateau_edge = false;
    std::optional<HarmonicProfile> profile;  // degenerate ends only
};

const char* to_string(ComponentEnd::Kind k);

struct Component {
    double lo = 0.0;  // may be −∞
    double hi = 0.0;  // may be +∞
    ComponentEnd lo_end;
    ComponentEnd hi_end;
    ClassificationReport report;
};

struct DecomposeOptions {
    ClassifyOptions classify;
    double zero_tol = 1e-12;
    double lipschitz_quotient = 1e3;  // tabulated models: max |Δc/Δx| near a zero
};

struct Decomposition {
    std::vector<Component> components;  // left to right
    std::vector<std::pair<double, double>> plateau_blocks;
    std::vector<double> zero_points;
    bool lipschitz = true;
    std::vector<std::string> flags;
};

/// Splits the domain along the zero set of c and classifies every component
/// from the harmonic profiles at its degenerate ends.
Decomposition decompose(const Coefficient& c, const DecomposeOptions& opt = {});

struct DirectSumOptions {
    int n_cells = 400;          // per component
    int plateau_cells = 32;
    double grading = 0.85;
    double far_length = 50.0;   // extent kept of an unbounded component
    AssemblyOptions assembly;
};

struct Block {
    bool plateau = false;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t offset = 0;  // first unknown in the global operator
    DiscreteOperator op;
};

struct DirectSum {
    std::vector<Block> blocks;
    DiscreteOperator global;  // blocks concatenated, zero coupling between them

    std::vector<double> restrict_to(std::size_t block, const std::vector<double>& v) const;
};

/// Friedrichs conditions at degenerate ends, Neumann at regular ends and at
/// truncation points, zero operators on plateaus.
DirectSum assemble_direct_sum(const Coefficient& c, const Decomposition& dec, const DirectSumOptions& opt = {});

}  // namespace degen
