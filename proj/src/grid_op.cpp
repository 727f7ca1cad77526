#include "degen/grid_op.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "degen/error.hpp"
#include "degen/quadrature.hpp"

namespace degen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Conductance of the edge [x0, x1].
double edge_conductance(const Coefficient& c, double x0, double x1, FluxRule rule) {
    const double h = x1 - x0;
    if (rule == FluxRule::midpoint) {
        double v = c.eval(0.5 * (x0 + x1));
        if (v < 0) {
            std::ostringstream os;
            os << "negative coefficient " << v << " at flux point " << 0.5 * (x0 + x1);
            throw Error(ErrorKind::assembly, os.str());
        }
        return v / h;
    }
    // Exact two-point conductance 1/∫ c^{-1}.
    if (const PowerLaw* p = c.as_power_law(); p && (x0 >= p->origin || x1 <= p->origin)) {
        bool right = x0 >= p->origin;
        double a = right ? p->amplitude_right : p->amplitude_left;
        double d = right ? p->exponent_right : p->exponent_left;
        double t0 = right ? x0 - p->origin : p->origin - x1;
        double t1 = right ? x1 - p->origin : p->origin - x0;
        double integral;
        if (d == 1.0)
            integral = t0 > 0 ? std::log(t1 / t0) / a : kInf;
        else if (t0 == 0.0)
            integral = d < 1.0 ? std::pow(t1, 1 - d) / (a * (1 - d)) : kInf;
        else
            integral = (std::pow(t1, 1 - d) - std::pow(t0, 1 - d)) / (a * (1 - d));
        return std::isfinite(integral) ? 1.0 / integral : 0.0;
    }
    double c0 = c.eval(x0), c1 = c.eval(x1);
    try {
        QuadResult q;
        auto inv = [&](double x) { return 1.0 / c.eval(x); };
        if (c0 == 0.0 && c1 == 0.0) return 0.0;
        if (c0 == 0.0)
            q = integrate_graded(inv, x0 + h * 1e-12, x1, x0, 1e-8);
        else if (c1 == 0.0)
            q = integrate_graded(inv, x0, x1 - h * 1e-12, x1, 1e-8);
        else
            q = gauss_kronrod(inv, x0, x1, 1e-10);
        return q.value > 0 && std::isfinite(q.value) ? 1.0 / q.value : 0.0;
    } catch (const Error&) {
        return 0.0;
    }
}

// Lowers a condition at an interval or half-line end to an explicit kind.
BoundaryCondition lower_end(const Coefficient& c, double point, Side inward, double room,
                            const BoundaryCondition& bc, const AssemblyOptions& opt) {
    switch (bc.kind) {
    case BoundaryCondition::Kind::line_jump:
        throw Error(ErrorKind::config, "line_jump applies only to line geometries");
    case BoundaryCondition::Kind::robin:
        return bc.beta == 0.0 ? BoundaryCondition::dirichlet() : bc;
    case BoundaryCondition::Kind::friedrichs: {
        ClassifyOptions light = opt.classify;
        light.reach = std::min(opt.classify.reach, 0.5 * room);
        light.points_per_decade = 2;
        HarmonicProfile h = membership(c, Endpoint{point, inward, light.reach}, light);
        return h.nu_in_linf ? BoundaryCondition::dirichlet() : BoundaryCondition::neumann();
    }
    default:
        return bc;
    }
}

enum class NodeKind { keep, remove, split };

struct EndSpec {
    NodeKind kind = NodeKind::keep;
    double shift = 0.0;  // Robin term added to the kept node
};

EndSpec end_spec(const BoundaryCondition& resolved) {
    switch (resolved.kind) {
    case BoundaryCondition::Kind::dirichlet: return {NodeKind::remove, 0.0};
    case BoundaryCondition::Kind::robin: return {NodeKind::keep, resolved.alpha / resolved.beta};
    default: return {NodeKind::keep, 0.0};
    }
}

}  // namespace

BoundaryCondition BoundaryCondition::robin(double alpha, double beta) {
    if (alpha == 0.0 && beta == 0.0) throw Error(ErrorKind::config, "Robin condition rejects (alpha, beta) = (0, 0)");
    return {Kind::robin, alpha, beta};
}

BoundaryCondition BoundaryCondition::line_jump(double alpha, double beta) {
    if (alpha == 0.0 && beta == 0.0) throw Error(ErrorKind::config, "line jump rejects (alpha, beta) = (0, 0)");
    return {Kind::line_jump, alpha, beta};
}

std::string BoundaryCondition::describe() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::dirichlet: os << "dirichlet"; break;
    case Kind::neumann: os << "neumann"; break;
    case Kind::robin: os << "robin(" << alpha << ", " << beta << ")"; break;
    case Kind::line_jump: os << "line_jump(" << alpha << ", " << beta << ")"; break;
    case Kind::friedrichs: os << "friedrichs"; break;
    }
    return os.str();
}

std::vector<double> DiscreteOperator::apply(const std::vector<double>& phi) const {
    std::vector<double> y = a.apply(phi);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] /= a.w[i];
    return y;
}

double DiscreteOperator::entry(std::size_t i, std::size_t j) const {
    const std::size_t n = size();
    if (i >= n || j >= n) throw Error(ErrorKind::domain, "matrix index out of range");
    if (i == j) {
        double d = a.s[i] + (i > 0 ? a.k[i - 1] : 0.0) + (i + 1 < n ? a.k[i] : 0.0);
        return d / a.w[i];
    }
    if (j == i + 1) return -a.k[i] / a.w[i];
    if (i == j + 1) return -a.k[j] / a.w[i];
    return 0.0;
}

std::vector<double> DiscreteOperator::sample(const std::function<double(double)>& f) const {
    std::vector<double> v(size());
    for (std::size_t i = 0; i < size(); ++i) v[i] = f(x[i]);
    return v;
}

bool DiscreteOperator::submarkovian_sign() const {
    return resolved_lo.submarkovian_sign() && resolved_hi.submarkovian_sign();
}

DiscreteOperator assemble(const Coefficient& c, const Mesh& mesh, const BoundaryCondition& bc,
                          const AssemblyOptions& opt) {
    return assemble(c, mesh, bc, bc, opt);
}

DiscreteOperator assemble(const Coefficient& c, const Mesh& mesh, const BoundaryCondition& lo,
                          const BoundaryCondition& hi, const AssemblyOptions& opt) {
    const auto& g = mesh.geometry;
    const auto& xs = mesh.nodes;
    const std::size_t N = xs.size() - 1;  // cells
    DiscreteOperator op;
    op.mesh = mesh;
    op.bc_lo = lo;
    op.bc_hi = hi;

    // Per-node treatment.
    std::vector<NodeKind> kind(N + 1, NodeKind::keep);
    std::vector<double> shift(N + 1, 0.0);
    std::vector<bool> far(N + 1, false);
    std::size_t origin = N + 1;
    double split_k = 0.0;

    switch (g.kind) {
    case Geometry::Kind::half_line: {
        bool right = g.side == Side::right;
        std::size_t o = right ? 0 : N, f = right ? N : 0;
        BoundaryCondition r = lower_end(c, 0.0, g.side, g.length, lo, opt);
        op.resolved_lo = op.resolved_hi = r;
        EndSpec e = end_spec(r);
        kind[o] = e.kind;
        shift[o] = e.shift;
        kind[f] = NodeKind::remove;
        far[f] = true;
        origin = o;
        break;
    }
    case Geometry::Kind::line: {
        kind[0] = kind[N] = NodeKind::remove;
        far[0] = far[N] = true;
        auto it = std::find(xs.begin(), xs.end(), 0.0);
        if (it == xs.end()) throw Error(ErrorKind::assembly, "line mesh lacks a node at the origin");
        origin = static_cast<std::size_t>(it - xs.begin());
        BoundaryCondition r;
        switch (lo.kind) {
        case BoundaryCondition::Kind::friedrichs:
            r = BoundaryCondition::line_jump(0.0, 1.0);
            op.interface = Interface::merged;
            break;
        case BoundaryCondition::Kind::line_jump:
            r = lo;
            if (lo.alpha == 0.0 || lo.beta == 0.0) {
                op.interface = Interface::merged;
            } else {
                op.interface = Interface::split;
                split_k = lo.alpha / (4.0 * lo.beta);
            }
            break;
        case BoundaryCondition::Kind::neumann:
            r = lo;
            op.interface = Interface::split;
            split_k = 0.0;
            break;
        case BoundaryCondition::Kind::dirichlet:
            r = lo;
            op.interface = Interface::removed;
            break;
        case BoundaryCondition::Kind::robin:
            throw Error(ErrorKind::config, "robin applies to half-line and interval ends; use line_jump on the line");
        }
        op.resolved_lo = op.resolved_hi = r;
        op.interface_conductance = op.interface == Interface::split ? split_k : kInf;
        kind[origin] = op.interface == Interface::split     ? NodeKind::split
                       : op.interface == Interface::removed ? NodeKind::remove
                                                            : NodeKind::keep;
        break;
    }
    case Geometry::Kind::interval: {
        double room = g.b - g.a;
        op.resolved_lo = lower_end(c, g.a, Side::right, room, lo, opt);
        op.resolved_hi = lower_end(c, g.b, Side::left, room, hi, opt);
        EndSpec el = end_spec(op.resolved_lo), eh = end_spec(op.resolved_hi);
        kind[0] = el.kind;
        shift[0] = el.shift;
        kind[N] = eh.kind;
        shift[N] = eh.shift;
        break;
    }
    }

    // Edge conductances of the mesh.
    std::vector<double> k(N);
    for (std::size_t j = 0; j < N; ++j) k[j] = edge_conductance(c, xs[j], xs[j + 1], opt.flux);
    if (g.kind == Geometry::Kind::line && origin > 0 && origin < N)
        op.interface_flux_coefficient =
            std::max(c.eval(0.5 * (xs[origin - 1] + xs[origin])), c.eval(0.5 * (xs[origin] + xs[origin + 1])));

    // Unknowns: first and last dof index per mesh node (or none when removed).
    std::vector<long> first(N + 1, -1), last(N + 1, -1);
    auto& w = op.a.w;
    auto& s = op.a.s;
    auto& kk = op.a.k;
    for (std::size_t j = 0; j <= N; ++j) {
        double hl = j > 0 ? xs[j] - xs[j - 1] : 0.0;
        double hr = j < N ? xs[j + 1] - xs[j] : 0.0;
        int reg = xs[j] < 0 ? -1 : (xs[j] > 0 ? 1 : 0);
        if (kind[j] == NodeKind::remove) continue;
        if (kind[j] == NodeKind::split) {
            first[j] = static_cast<long>(op.x.size());
            op.x.push_back(xs[j]);
            op.region.push_back(-1);
            w.push_back(0.5 * hl);
            s.push_back(0.0);
            kk.push_back(split_k);
            last[j] = static_cast<long>(op.x.size());
            op.x.push_back(xs[j]);
            op.region.push_back(1);
            w.push_back(0.5 * hr);
            s.push_back(0.0);
        } else {
            first[j] = last[j] = static_cast<long>(op.x.size());
            op.x.push_back(xs[j]);
            op.region.push_back(reg);
            w.push_back(0.5 * (hl + hr));
            s.push_back(shift[j]);
        }
        if (j < N) kk.push_back(0.0);  // placeholder for the edge to the next kept node
    }
    if (op.x.empty()) throw Error(ErrorKind::assembly, "no unknowns left after boundary conditions");
    kk.resize(op.x.size() - 1);
    op.far_sink.assign(op.x.size(), 0.0);

    // Wire mesh edges: kept–kept edges become conductances, edges into removed nodes become sinks.
    // Slots between unknowns that no mesh edge joins (across a removed node) stay empty.
    std::vector<bool> wired(kk.size(), false);
    for (std::size_t j = 0; j <= N; ++j)
        if (kind[j] == NodeKind::split) wired[static_cast<std::size_t>(first[j])] = true;
    for (std::size_t j = 0; j < N; ++j) {
        bool a_keep = kind[j] != NodeKind::remove, b_keep = kind[j + 1] != NodeKind::remove;
        if (a_keep && b_keep) {
            auto i = static_cast<std::size_t>(last[j]);
            kk[i] = k[j];
            wired[i] = true;
        } else if (a_keep) {
            auto i = static_cast<std::size_t>(last[j]);
            s[i] += k[j];
            if (far[j + 1]) op.far_sink[i] += k[j];
        } else if (b_keep) {
            auto i = static_cast<std::size_t>(first[j + 1]);
            s[i] += k[j];
            if (far[j]) op.far_sink[i] += k[j];
        }
    }
    for (std::size_t i = 0; i < kk.size(); ++i)
        if (!wired[i]) kk[i] = 0.0;
    for (double wi : w)
        if (!(wi > 0)) throw Error(ErrorKind::assembly, "non-positive mass weight");
    return op;
}

DiscreteOperator zero_operator(const Mesh& mesh) {
    DiscreteOperator op;
    op.mesh = mesh;
    op.bc_lo = op.bc_hi = op.resolved_lo = op.resolved_hi = BoundaryCondition::neumann();
    const auto& xs = mesh.nodes;
    const std::size_t N = xs.size() - 1;
    for (std::size_t j = 0; j <= N; ++j) {
        double hl = j > 0 ? xs[j] - xs[j - 1] : 0.0;
        double hr = j < N ? xs[j + 1] - xs[j] : 0.0;
        op.x.push_back(xs[j]);
        op.region.push_back(xs[j] < 0 ? -1 : (xs[j] > 0 ? 1 : 0));
        op.a.w.push_back(0.5 * (hl + hr));
        op.a.s.push_back(0.0);
    }
    op.a.k.assign(N, 0.0);
    op.far_sink.assign(N + 1, 0.0);
    return op;
}

double form_value(const DiscreteOperator& op, const std::vector<double>& phi) {
    if (phi.size() != op.size()) throw Error(ErrorKind::domain, "vector size does not match the operator");
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
        double d = phi[i] - phi[i + 1];
        e += op.a.k[i] * d * d;
    }
    for (std::size_t i = 0; i < phi.size(); ++i) e += op.a.s[i] * phi[i] * phi[i];
    return e;
}

std::vector<Eigenpair> lowest_eigenpairs(const DiscreteOperator& op, int k) { return smallest_eigenpairs(op.a, k); }

void write_matrix_market(const DiscreteOperator& op, std::ostream& os) {
    const std::size_t n = op.size();
    std::size_t nnz = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i > 0 ? i - 1 : 0); j <= std::min(n - 1, i + 1); ++j)
            if (op.entry(i, j) != 0.0 || i == j) ++nnz;
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << "% operator W^-1 A; mesh " << op.mesh.geometry.describe() << ", boundary " << op.resolved_lo.describe();
    if (op.mesh.geometry.kind == Geometry::Kind::interval) os << " / " << op.resolved_hi.describe();
    os << "\n" << n << ' ' << n << ' ' << nnz << '\n';
    os.precision(17);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i > 0 ? i - 1 : 0); j <= std::min(n - 1, i + 1); ++j) {
            double v = op.entry(i, j);
            if (v != 0.0 || i == j) os << i + 1 << ' ' << j + 1 << ' ' << v << '\n';
        }
}

}  // namespace degen
