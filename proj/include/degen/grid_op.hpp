#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "degen/classify.hpp"
#include "degen/coeff.hpp"
#include "degen/mesh.hpp"
#include "degen/tridiag.hpp"

namespace degen {

struct BoundaryCondition {
    enum class Kind { dirichlet, neumann, robin, line_jump, friedrichs };

    Kind kind = Kind::friedrichs;
    double alpha = 0.0;
    double beta = 1.0;

    static BoundaryCondition dirichlet() { return {Kind::dirichlet, 0.0, 0.0}; }
    static BoundaryCondition neumann() { return {Kind::neumann, 0.0, 1.0}; }
    static BoundaryCondition robin(double alpha, double beta);
    static BoundaryCondition line_jump(double alpha, double beta);
    static BoundaryCondition friedrichs() { return {}; }

    /// αβ ≥ 0 (always true for the parameter-free kinds).
    bool submarkovian_sign() const { return alpha * beta >= 0.0; }
    std::string describe() const;
};

enum class FluxRule { midpoint, harmonic };

struct AssemblyOptions {
    FluxRule flux = FluxRule::midpoint;
    ClassifyOptions classify;
};

/// How the degenerate point of a line mesh is represented.
enum class Interface {
    none,        // not a line geometry
    merged,      // one shared node, continuous values and fluxes
    split,       // duplicated node with coupling conductance
    removed,     // Dirichlet on both sides
};

struct DiscreteOperator {
    Mesh mesh;
    BoundaryCondition bc_lo;        // as requested
    BoundaryCondition bc_hi;
    BoundaryCondition resolved_lo;  // explicit kinds after resolving friedrichs
    BoundaryCondition resolved_hi;
    Interface interface = Interface::none;
    double interface_conductance = 0.0;
    double interface_flux_coefficient = 0.0;  // c at the midpoints next to the origin

    std::vector<double> x;        // positions of the unknowns
    std::vector<int> region;      // −1 left of the origin, +1 right, 0 shared origin node
    Conductances a;               // form matrix A and mass W; the operator is W^{-1}A
    std::vector<double> far_sink; // share of a.s from far-field truncation

    std::size_t size() const { return x.size(); }
    /// Hφ = W^{-1}Aφ
    std::vector<double> apply(const std::vector<double>& phi) const;
    /// Entry (i, j) of W^{-1}A.
    double entry(std::size_t i, std::size_t j) const;
    std::vector<double> sample(const std::function<double(double)>& f) const;
    /// True unless some boundary or interface term carries αβ < 0.
    bool submarkovian_sign() const;
};

/// Half-line and line meshes take the condition at the origin; interval meshes
/// apply it at both ends.
DiscreteOperator assemble(const Coefficient& c, const Mesh& mesh, const BoundaryCondition& bc,
                          const AssemblyOptions& opt = {});

/// Interval meshes with a separate condition at each end.
DiscreteOperator assemble(const Coefficient& c, const Mesh& mesh, const BoundaryCondition& lo,
                          const BoundaryCondition& hi, const AssemblyOptions& opt = {});

/// The zero operator on a mesh (plateau blocks): all nodes kept, no coupling.
DiscreteOperator zero_operator(const Mesh& mesh);

/// Σ k_i (φ_i − φ_{i+1})² + Σ s_i φ_i².
double form_value(const DiscreteOperator& op, const std::vector<double>& phi);

std::vector<Eigenpair> lowest_eigenpairs(const DiscreteOperator& op, int k);

/// Coordinate-format dump of W^{-1}A (1-based indices).
void write_matrix_market(const DiscreteOperator& op, std::ostream& os);

}  // namespace degen
