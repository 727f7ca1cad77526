#include "degen/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "degen/error.hpp"
#include "degen/mesh.hpp"

namespace degen {

namespace {

double max_quotient_near(const MonotoneCubic& t, double z, Side side, double reach) {
    const auto& x = t.x();
    const auto& y = t.y();
    double q = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        double a = x[i], b = x[i + 1];
        bool inside = side == Side::right ? (a >= z && a < z + reach) : (b <= z && b > z - reach);
        if (inside) q = std::max(q, std::abs(y[i + 1] - y[i]) / (b - a));
    }
    return q;
}

ComponentEnd classify_end(const Coefficient& c, double x, Side inward, double room, const DecomposeOptions& opt,
                          bool plateau_edge, Decomposition& dec) {
    ComponentEnd e;
    e.x = x;
    e.plateau_edge = plateau_edge;
    if (!std::isfinite(x)) return e;
    if (c.eval(x) > opt.zero_tol && !plateau_edge) {
        e.kind = ComponentEnd::Kind::regular;
        return e;
    }
    e.kind = ComponentEnd::Kind::degenerate;
    ClassifyOptions co = opt.classify;
    co.reach = std::min(co.reach, 0.5 * room);
    e.profile = membership(c, Endpoint{x, inward, co.reach}, co);
    std::ostringstream msg;
    if (e.profile->exponent < 1.0) {
        msg << "coefficient not W^{1,inf} at " << x << " (local exponent " << e.profile->exponent
            << "); Lipschitz hypothesis fails";
    } else if (const MonotoneCubic* t = c.as_table()) {
        double q = max_quotient_near(*t, x, inward, co.reach);
        if (q > opt.lipschitz_quotient)
            msg << "coefficient not W^{1,inf} at " << x << " (difference quotient " << q << "); Lipschitz hypothesis fails";
    }
    if (!msg.str().empty()) {
        dec.lipschitz = false;
        dec.flags.push_back(msg.str());
    }
    return e;
}

ClassificationReport component_report(const ComponentEnd& lo, const ComponentEnd& hi) {
    ClassificationReport r;
    bool all_not_l2 = true, all_not_linf = true, any_degenerate = false, any_regular = false;
    int in_l2 = 0;
    for (const ComponentEnd* e : {&lo, &hi}) {
        if (e->kind == ComponentEnd::Kind::regular) any_regular = true;
        if (e->kind != ComponentEnd::Kind::degenerate) continue;
        any_degenerate = true;
        if (e->profile->nu_in_l2) {
            all_not_l2 = false;
            ++in_l2;
        }
        if (e->profile->nu_in_linf) all_not_linf = false;
    }
    if (!any_degenerate || all_not_l2)
        r.kase = Case::I;
    else if (all_not_linf)
        r.kase = Case::II;
    else
        r.kase = Case::III;
    int regular = (lo.kind == ComponentEnd::Kind::regular) + (hi.kind == ComponentEnd::Kind::regular);
    r.deficiency_indices = {in_l2 + regular, in_l2 + regular};
    r.essentially_self_adjoint = r.kase == Case::I && !any_regular;
    r.unique_submarkovian = r.kase != Case::III && !any_regular;
    if (lo.profile) r.left = lo.profile;
    if (hi.profile) r.right = hi.profile;
    return r;
}

}  // namespace

const char* to_string(ComponentEnd::Kind k) {
    switch (k) {
    case ComponentEnd::Kind::infinite: return "infinite";
    case ComponentEnd::Kind::regular: return "regular";
    case ComponentEnd::Kind::degenerate: return "degenerate";
    }
    return "?";
}

Decomposition decompose(const Coefficient& c, const DecomposeOptions& opt) {
    Decomposition dec;
    const double lo = c.domain().lo(), hi = c.domain().hi();
    ZeroSet z = c.zero_set(opt.zero_tol);
    dec.plateau_blocks = z.plateaus;
    std::sort(dec.plateau_blocks.begin(), dec.plateau_blocks.end());
    for (double p : z.points) {
        bool in_plateau = false;
        for (const auto& pl : dec.plateau_blocks)
            if (p >= pl.first && p <= pl.second) in_plateau = true;
        if (!in_plateau && p > lo && p < hi) dec.zero_points.push_back(p);
    }
    std::sort(dec.zero_points.begin(), dec.zero_points.end());

    // Features left to right: (start, end, is_plateau).
    struct Feature {
        double a, b;
        bool plateau;
    };
    std::vector<Feature> feats;
    for (double p : dec.zero_points) feats.push_back({p, p, false});
    for (const auto& pl : dec.plateau_blocks) feats.push_back({pl.first, pl.second, true});
    std::sort(feats.begin(), feats.end(), [](const Feature& u, const Feature& v) { return u.a < v.a; });

    double cur = lo;
    bool cur_plateau = false;
    auto close = [&](double end, bool end_plateau) {
        if (!(end > cur)) return;
        Component comp;
        comp.lo = cur;
        comp.hi = end;
        double room = end - cur;
        comp.lo_end = classify_end(c, cur, Side::right, room, opt, cur_plateau, dec);
        comp.hi_end = classify_end(c, end, Side::left, room, opt, end_plateau, dec);
        comp.report = component_report(comp.lo_end, comp.hi_end);
        dec.components.push_back(std::move(comp));
    };
    for (const auto& f : feats) {
        if (f.b <= lo || f.a >= hi) continue;
        close(std::max(f.a, lo), f.plateau);
        cur = std::min(f.b, hi);
        cur_plateau = f.plateau;
    }
    close(hi, false);
    return dec;
}

std::vector<double> DirectSum::restrict_to(std::size_t block, const std::vector<double>& v) const {
    const Block& b = blocks.at(block);
    auto first = v.begin() + static_cast<long>(b.offset);
    return {first, first + static_cast<long>(b.op.size())};
}

DirectSum assemble_direct_sum(const Coefficient& c, const Decomposition& dec, const DirectSumOptions& opt) {
    DirectSum ds;
    for (const auto& comp : dec.components) {
        Block b;
        b.lo = std::isfinite(comp.lo) ? comp.lo : comp.hi - opt.far_length;
        b.hi = std::isfinite(comp.hi) ? comp.hi : comp.lo + opt.far_length;
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi)) {
            b.lo = -opt.far_length;
            b.hi = opt.far_length;
        }
        bool deg_lo = comp.lo_end.kind == ComponentEnd::Kind::degenerate;
        bool deg_hi = comp.hi_end.kind == ComponentEnd::Kind::degenerate;
        Mesh m = build_mesh(Geometry::interval(b.lo, b.hi, deg_lo, deg_hi), opt.n_cells, opt.grading);
        BoundaryCondition bl = deg_lo ? BoundaryCondition::friedrichs() : BoundaryCondition::neumann();
        BoundaryCondition bh = deg_hi ? BoundaryCondition::friedrichs() : BoundaryCondition::neumann();
        b.op = assemble(c, m, bl, bh, opt.assembly);
        ds.blocks.push_back(std::move(b));
    }
    for (const auto& pl : dec.plateau_blocks) {
        Block b;
        b.plateau = true;
        b.lo = pl.first;
        b.hi = pl.second;
        if (!(b.hi > b.lo)) continue;
        Mesh m = build_mesh(Geometry::interval(b.lo, b.hi, false, false), opt.plateau_cells, opt.grading);
        b.op = zero_operator(m);
        ds.blocks.push_back(std::move(b));
    }
    std::sort(ds.blocks.begin(), ds.blocks.end(), [](const Block& u, const Block& v) { return u.lo < v.lo; });
    if (ds.blocks.empty()) throw Error(ErrorKind::assembly, "decomposition has no blocks");

    DiscreteOperator& g = ds.global;
    g.mesh = ds.blocks.front().op.mesh;
    g.bc_lo = g.resolved_lo = ds.blocks.front().op.resolved_lo;
    g.bc_hi = g.resolved_hi = ds.blocks.back().op.resolved_hi;
    for (auto& b : ds.blocks) {
        b.offset = g.x.size();
        if (!g.x.empty()) g.a.k.push_back(0.0);
        const auto& o = b.op;
        g.x.insert(g.x.end(), o.x.begin(), o.x.end());
        g.region.insert(g.region.end(), o.region.begin(), o.region.end());
        g.a.w.insert(g.a.w.end(), o.a.w.begin(), o.a.w.end());
        g.a.s.insert(g.a.s.end(), o.a.s.begin(), o.a.s.end());
        g.a.k.insert(g.a.k.end(), o.a.k.begin(), o.a.k.end());
        g.far_sink.insert(g.far_sink.end(), o.far_sink.begin(), o.far_sink.end());
    }
    return ds;
}

}  // namespace degen
