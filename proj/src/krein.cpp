#include "degen/krein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "degen/classify.hpp"
#include "degen/error.hpp"
#include "degen/shoot.hpp"

namespace degen {

Resolvent::Resolvent(const DiscreteOperator& op, double gamma)
    : gamma_(gamma), w_(op.a.w), factor_(op.a, gamma) {
    if (!(gamma > 0)) throw Error(ErrorKind::config, "resolvent parameter must be positive");
    if (!factor_.positive_definite()) {
        std::ostringstream os;
        os << "resolvent pole: γ = " << gamma << " is at or below the spectral threshold";
        throw Error(ErrorKind::resolvent_pole, os.str());
    }
}

std::vector<double> Resolvent::apply(const std::vector<double>& f) const {
    if (f.size() != w_.size()) throw Error(ErrorKind::domain, "vector size does not match the resolvent");
    std::vector<double> rhs(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) rhs[i] = w_[i] * f[i];
    return factor_.solve(rhs);
}

namespace {

/// Slots of a shared space where every mesh node split by either operator
/// carries one slot per side.
struct CommonSpace {
    std::vector<double> x;
    std::vector<double> w;
    // Per operator: the slots each dof covers.
    std::vector<std::vector<std::vector<std::size_t>>> maps;
};

CommonSpace common_space(const Mesh& mesh, const std::vector<const DiscreteOperator*>& ops) {
    const auto& xs = mesh.nodes;
    const std::size_t N = xs.size() - 1;
    auto node_of = [&xs](double x) {
        auto it = std::lower_bound(xs.begin(), xs.end(), x);
        if (it == xs.end() || *it != x) throw Error(ErrorKind::assembly, "operator dof is not a mesh node");
        return static_cast<std::size_t>(it - xs.begin());
    };
    std::vector<bool> split(N + 1, false);
    for (const auto* op : ops)
        for (std::size_t i = 0; i + 1 < op->size(); ++i)
            if (op->x[i] == op->x[i + 1]) split[node_of(op->x[i])] = true;

    CommonSpace cs;
    std::vector<std::size_t> slot_lo(N + 1), slot_hi(N + 1);
    for (std::size_t j = 0; j <= N; ++j) {
        double hl = j > 0 ? xs[j] - xs[j - 1] : 0.0;
        double hr = j < N ? xs[j + 1] - xs[j] : 0.0;
        slot_lo[j] = cs.x.size();
        if (split[j]) {
            cs.x.push_back(xs[j]);
            cs.w.push_back(0.5 * hl);
            cs.x.push_back(xs[j]);
            cs.w.push_back(0.5 * hr);
        } else {
            cs.x.push_back(xs[j]);
            cs.w.push_back(0.5 * (hl + hr));
        }
        slot_hi[j] = cs.x.size() - 1;
    }
    for (const auto* op : ops) {
        std::vector<std::vector<std::size_t>> m(op->size());
        for (std::size_t i = 0; i < op->size(); ++i) {
            std::size_t j = node_of(op->x[i]);
            bool dup_lo = i + 1 < op->size() && op->x[i + 1] == op->x[i];
            bool dup_hi = i > 0 && op->x[i - 1] == op->x[i];
            if (dup_lo)
                m[i] = {slot_lo[j]};
            else if (dup_hi)
                m[i] = {slot_hi[j]};
            else if (split[j])
                m[i] = {slot_lo[j], slot_hi[j]};
            else
                m[i] = {slot_lo[j]};
        }
        cs.maps.push_back(std::move(m));
    }
    return cs;
}

/// R f = E (A + γW)^{-1} Eᵀ W f on the common space.
std::vector<double> apply_lifted(const Resolvent& r, const std::vector<std::vector<std::size_t>>& map,
                                 const std::vector<double>& w, const std::vector<double>& f) {
    std::vector<double> g(map.size(), 0.0);
    for (std::size_t i = 0; i < map.size(); ++i) {
        double m = 0.0, acc = 0.0;
        for (std::size_t s : map[i]) {
            acc += w[s] * f[s];
            m += w[s];
        }
        g[i] = acc / m;  // Resolvent::apply multiplies by the operator's own weight
    }
    std::vector<double> u = r.apply(g);
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t i = 0; i < map.size(); ++i)
        for (std::size_t s : map[i]) out[s] = u[i];
    return out;
}

}  // namespace

KreinDiagnostics krein_check(const Coefficient& c, double alpha, double beta, double gamma, const Mesh& mesh,
                             const KreinOptions& opt) {
    const Geometry& g = mesh.geometry;
    if (g.kind == Geometry::Kind::interval)
        throw Error(ErrorKind::unsupported, "resolvent comparison needs a half-line or line geometry");
    if (!(gamma > 0)) throw Error(ErrorKind::config, "γ must be positive");

    ClassificationReport rep = classify(c, opt.assembly.classify);
    Case kase = rep.kase;
    const HarmonicProfile* prof = nullptr;
    if (g.kind == Geometry::Kind::half_line) {
        const auto& p = g.side == Side::right ? rep.right : rep.left;
        if (!p) throw Error(ErrorKind::config, "coefficient is not defined on the requested side");
        prof = &*p;
        kase = case_from(p->nu_in_l2, p->nu_in_linf);
    }
    if (kase == Case::I) throw Error(ErrorKind::unsupported, "case I has a unique extension; nothing to compare");
    if (kase == Case::II && alpha != 0.0)
        throw Error(ErrorKind::unsupported, "case II extensions with α ≠ 0 are not realized");

    BoundaryCondition ext_bc = g.kind == Geometry::Kind::half_line ? BoundaryCondition::robin(alpha, beta)
                                                                   : BoundaryCondition::line_jump(alpha, beta);
    DiscreteOperator base = assemble(c, mesh, BoundaryCondition::friedrichs(), opt.assembly);
    DiscreteOperator ext = assemble(c, mesh, ext_bc, opt.assembly);
    Resolvent rb(base, gamma), re(ext, gamma);
    CommonSpace cs = common_space(mesh, {&base, &ext});
    const std::size_t n = cs.x.size();
    const int k = std::min<int>(opt.probes, static_cast<int>(n));

    auto diff = [&](const std::vector<double>& f) {
        std::vector<double> a = apply_lifted(re, cs.maps[1], cs.w, f);
        std::vector<double> b = apply_lifted(rb, cs.maps[0], cs.w, f);
        for (std::size_t i = 0; i < n; ++i) a[i] -= b[i];
        return a;
    };

    Eigen::VectorXd sw(n), isw(n);
    for (std::size_t i = 0; i < n; ++i) {
        sw[i] = std::sqrt(cs.w[i]);
        isw[i] = 1.0 / sw[i];
    }

    // Probes orthonormal in the W inner product: random Gaussian columns, QR in W^{1/2} coordinates.
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd omega(n, k);
    for (int j = 0; j < k; ++j)
        for (std::size_t i = 0; i < n; ++i) omega(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr0(omega);
    Eigen::MatrixXd q0 = qr0.householderQ() * Eigen::MatrixXd::Identity(n, k);

    Eigen::MatrixXd b(n, k);
    std::vector<double> col(n);
    for (int j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = isw[i] * q0(i, j);
        std::vector<double> y = diff(col);
        for (std::size_t i = 0; i < n; ++i) b(i, j) = sw[i] * y[i];
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);

    Eigen::MatrixXd dq(n, k);
    for (int j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = isw[i] * q(i, j);
        std::vector<double> y = diff(col);
        for (std::size_t i = 0; i < n; ++i) dq(i, j) = sw[i] * y[i];
    }
    Eigen::MatrixXd t = q.transpose() * dq;
    t = 0.5 * (t + t.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    std::vector<int> order(k);
    for (int j = 0; j < k; ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](int a, int bb) { return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[bb]); });

    KreinDiagnostics d;
    d.gamma = gamma;
    d.baseline = base.resolved_lo.describe() + " / " + base.resolved_hi.describe();
    d.extension = ext_bc.describe();
    d.dofs = n;
    d.kappa = es.eigenvalues()[order[0]];
    d.second = k > 1 ? es.eigenvalues()[order[1]] : 0.0;
    double top = std::abs(d.kappa);
    d.rank_ratio = top > 0 ? std::abs(d.second) / top : 0.0;
    d.range_alignment = std::numeric_limits<double>::quiet_NaN();

    if (prof && top > 0) {
        Eigen::VectorXd u = q * es.eigenvectors().col(order[0]);  // W^{1/2} coordinates
        std::map<double, double> eta_at;
        const double s = sign_of(g.side);
        std::vector<double> stops;
        for (double x : cs.x) {
            double t_abs = std::abs(x);
            if (t_abs > opt.eta_x_min && t_abs < g.length) stops.push_back(s * t_abs);
        }
        ShootingSolution eta = deficiency_solution(c, g.side, gamma, g.length, opt.eta_x_min, {}, stops);
        for (std::size_t i = 0; i < eta.grid.size(); ++i) eta_at[std::abs(eta.grid[i])] = eta.psi[i];
        double inner = 0.0, nu2 = 0.0, ne2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double t_abs = std::abs(cs.x[i]);
            double e;
            if (t_abs <= opt.eta_x_min)
                e = eta.psi[s > 0 ? 0 : eta.psi.size() - 1];
            else if (t_abs >= g.length)
                e = 0.0;
            else
                e = eta_at.at(t_abs);
            double ew = sw[i] * e;
            inner += u[i] * ew;
            nu2 += u[i] * u[i];
            ne2 += ew * ew;
        }
        d.range_alignment = std::abs(inner) / std::sqrt(nu2 * ne2);
    }
    return d;
}

}  // namespace degen
