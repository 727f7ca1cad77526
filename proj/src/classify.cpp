#include "degen/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "degen/error.hpp"
#include "degen/quadrature.hpp"

namespace degen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed forms for c = a·t^d on the local side.
double nu_power(double a, double d, double reach, double t) {
    if (d == 1.0) return std::log(reach / t) / a;
    return (std::pow(t, 1.0 - d) - std::pow(reach, 1.0 - d)) / (a * (d - 1.0));
}

double mu_power(double a, double d, double x) {
    if (d == 2.0) return std::log(x) / a;
    return (std::pow(x, 2.0 - d) - 1.0) / (a * (2.0 - d));
}

// The local side is an exact power law when the model is a power law centred there.
bool exact_power(const Coefficient& c, const Endpoint& ep, double& a, double& d) {
    const PowerLaw* p = c.as_power_law();
    if (!p || p->origin != ep.origin) return false;
    a = ep.side == Side::right ? p->amplitude_right : p->amplitude_left;
    d = ep.side == Side::right ? p->exponent_right : p->exponent_left;
    return true;
}

double c_local(const Coefficient& c, const Endpoint& ep, double t) { return c.eval_local(ep.origin, ep.side, t); }

double inverse_c(const Coefficient& c, const Endpoint& ep, double t) {
    double v = c_local(c, ep, t);
    return v > 0 ? 1.0 / v : kInf;
}

QuadResult guarded(const Integrand& f, double a, double b, double rel_tol) {
    try {
        return integrate_graded(f, a, b, 0.0, rel_tol);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::quadrature)
            throw Error(ErrorKind::quadrature, "coefficient vanishes inside integration range");
        throw;
    }
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
    int n = static_cast<int>(std::lround(std::log10(hi / lo) * per_decade));
    std::vector<double> g(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) g[static_cast<std::size_t>(k)] = lo * std::pow(10.0, static_cast<double>(k) / per_decade);
    g.front() = lo;
    g.back() = hi;
    return g;
}

struct Estimate {
    double exponent;
    double amplitude;
    std::vector<double> slopes;
};

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    double pos = q * static_cast<double>(v.size() - 1);
    auto i = static_cast<std::size_t>(pos);
    double f = pos - static_cast<double>(i);
    return i + 1 < v.size() ? v[i] * (1 - f) + v[i + 1] * f : v[i];
}

// Median log–log slope of c over the three decades nearest the degeneracy.
Estimate estimate_exponent(const Coefficient& c, const Endpoint& ep, const ClassifyOptions& opt) {
    std::vector<double> ts, cs;
    if (const MonotoneCubic* tab = c.as_table()) {
        for (std::size_t i = 0; i < tab->x().size(); ++i) {
            double t = sign_of(ep.side) * (tab->x()[i] - ep.origin);
            if (t > 0 && tab->y()[i] > 0) {
                ts.push_back(t);
                cs.push_back(tab->y()[i]);
            }
        }
        if (ep.side == Side::left) {
            std::reverse(ts.begin(), ts.end());
            std::reverse(cs.begin(), cs.end());
        }
        if (!ts.empty()) {
            double cap = 1000.0 * ts.front();
            std::size_t keep = 0;
            while (keep < ts.size() && ts[keep] <= cap) ++keep;
            ts.resize(keep);
            cs.resize(keep);
        }
    } else {
        double t0 = 1e-9 * ep.reach;
        for (int k = 0; k <= 30; ++k) {
            double t = t0 * std::pow(10.0, k / 10.0);
            ts.push_back(t);
            cs.push_back(c_local(c, ep, t));
        }
    }
    Estimate e{0, 0, {}};
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
        if (cs[i] > 0 && cs[i + 1] > 0)
            e.slopes.push_back(std::log(cs[i + 1] / cs[i]) / std::log(ts[i + 1] / ts[i]));
    std::ostringstream diag;
    diag << "exponent indeterminate at x = " << ep.origin << " (" << to_string(ep.side) << "): ";
    if (e.slopes.size() < 3) {
        diag << e.slopes.size() << " usable slopes within three decades of the zero";
        throw Error(ErrorKind::indeterminate, diag.str());
    }
    double iqr = quantile(e.slopes, 0.75) - quantile(e.slopes, 0.25);
    if (!(iqr <= opt.slope_spread)) {
        diag << "slope interquartile range " << iqr << " exceeds " << opt.slope_spread << "; slopes:";
        for (double s : e.slopes) diag << ' ' << s;
        throw Error(ErrorKind::indeterminate, diag.str());
    }
    e.exponent = quantile(e.slopes, 0.5);
    e.amplitude = cs.front() / std::pow(ts.front(), e.exponent);
    return e;
}

}  // namespace

const char* to_string(Basis b) { return b == Basis::exact ? "exact" : "estimated"; }

const char* to_string(Case k) {
    switch (k) {
    case Case::I: return "I";
    case Case::II: return "II";
    case Case::III: return "III";
    }
    return "?";
}

double nu(const Coefficient& c, const Endpoint& ep, double t, double rel_tol) {
    if (!(t > 0)) throw Error(ErrorKind::domain, "nu needs a point strictly inside the side interval");
    if (t == ep.reach) return 0.0;
    double a, d;
    if (exact_power(c, ep, a, d)) return nu_power(a, d, ep.reach, t);
    c_local(c, ep, ep.reach);  // domain check on the far end
    auto q = guarded([&](double s) { return inverse_c(c, ep, s); }, t, ep.reach, rel_tol);
    return q.value;
}

double nu(const Coefficient& c, Side side, double x, const ClassifyOptions& opt) {
    return nu(c, Endpoint{0.0, side, opt.reach}, x, opt.rel_tol);
}

double mu(const Coefficient& c, Side side, double x, const ClassifyOptions& opt) {
    if (!(x >= 1)) throw Error(ErrorKind::domain, "mu is defined for x >= 1");
    if (x == 1.0) return 0.0;
    Endpoint ep{0.0, side, 1.0};
    double a, d;
    if (exact_power(c, ep, a, d)) return mu_power(a, d, x);
    c_local(c, ep, x);
    auto q = guarded([&](double s) { return s * inverse_c(c, ep, s); }, 1.0, x, opt.rel_tol);
    return q.value;
}

double HarmonicProfile::nu_at(const Coefficient& c, double t, double rel_tol) const {
    double a, d;
    if (exact_power(c, endpoint, a, d) || nu_t.empty()) return nu(c, endpoint, t, rel_tol);
    if (t >= endpoint.reach) return 0.0;
    auto it = std::upper_bound(nu_t.begin(), nu_t.end(), t);
    if (it == nu_t.begin()) {
        auto q = guarded([&](double s) { return inverse_c(c, endpoint, s); }, t, nu_t.front(), rel_tol);
        return nu_values.front() + q.value;
    }
    auto k = static_cast<std::size_t>(it - nu_t.begin());  // nu_t[k-1] <= t < nu_t[k]
    if (k >= nu_t.size()) return 0.0;
    auto q = gauss_kronrod([&](double s) { return inverse_c(c, endpoint, s); }, t, nu_t[k], rel_tol);
    return nu_values[k] + q.value;
}

HarmonicProfile membership(const Coefficient& c, const Endpoint& ep, const ClassifyOptions& opt) {
    HarmonicProfile h;
    h.endpoint = ep;
    double a_exact = 0.0, d_exact = 0.0;
    const bool closed = exact_power(c, ep, a_exact, d_exact);
    if (auto lp = c.local_power(ep.origin, ep.side)) {
        h.exponent = lp->exponent;
        h.amplitude = lp->amplitude;
        h.basis = Basis::exact;
    } else {
        Estimate e = estimate_exponent(c, ep, opt);
        h.exponent = e.exponent;
        h.amplitude = e.amplitude;
        h.slopes = e.slopes;
        h.basis = Basis::estimated;
        for (double b : {1.0, 1.5})
            if (std::abs(h.exponent - b) < opt.borderline) h.borderline = true;
    }
    h.nu_in_linf = h.exponent < 1.0;
    h.nu_in_l2 = h.exponent < 1.5;

    // ν on a log grid, accumulated from the outer end so monotonicity is exact.
    h.nu_t = log_grid(opt.eps * ep.reach, ep.reach, opt.points_per_decade);
    const std::size_t n = h.nu_t.size();
    h.nu_values.assign(n, 0.0);
    if (closed) {
        for (std::size_t k = 0; k < n; ++k) h.nu_values[k] = nu_power(a_exact, d_exact, ep.reach, h.nu_t[k]);
        h.nu_values.back() = 0.0;
    } else {
        c_local(c, ep, ep.reach);
        for (std::size_t k = n - 1; k-- > 0;) {
            QuadResult q;
            try {
                q = gauss_kronrod([&](double s) { return inverse_c(c, ep, s); }, h.nu_t[k], h.nu_t[k + 1],
                                  opt.rel_tol);
            } catch (const Error&) {
                throw Error(ErrorKind::quadrature, "coefficient vanishes inside integration range");
            }
            h.nu_values[k] = h.nu_values[k + 1] + q.value;
        }
    }

    // ‖ν‖² on (eps, reach) by panel quadrature, plus a power-law tail on (0, eps).
    double quad = 0.0;
    for (std::size_t k = 0; h.nu_in_l2 && k + 1 < n; ++k) {
        auto q = gauss_kronrod(
            [&](double t) {
                double v = h.nu_at(c, t, opt.rel_tol);
                return v * v;
            },
            h.nu_t[k], h.nu_t[k + 1], opt.rel_tol);
        quad += q.value;
    }
    h.nu_l2_quadrature = quad;
    const double eps = h.nu_t.front();
    const double V = h.nu_values.front();
    const double a = h.amplitude;
    if (h.nu_in_l2) {
        double e = h.exponent - 1.0;
        if (std::abs(e) < 1e-12) {
            double L = 1.0 / a;
            h.nu_l2_tail = eps * (V * V + 2 * V * L + 2 * L * L);
        } else {
            double A = 1.0 / (a * e);
            double B = V - A * std::pow(eps, -e);
            h.nu_l2_tail = B * B * eps + 2 * A * B * std::pow(eps, 1 - e) / (1 - e) +
                           A * A * std::pow(eps, 1 - 2 * e) / (1 - 2 * e);
        }
        h.nu_l2_norm_sq = quad + h.nu_l2_tail;
    } else {
        h.nu_l2_tail = kInf;
        h.nu_l2_norm_sq = kInf;
    }
    if (h.nu_in_linf) {
        if (closed)
            h.nu_sup = std::pow(ep.reach, 1.0 - d_exact) / (a_exact * (1.0 - d_exact));
        else
            h.nu_sup = V + std::pow(eps, 1.0 - h.exponent) / (a * (1.0 - h.exponent));
    } else {
        h.nu_sup = kInf;
    }

    // μ on [1, x_max] when the side reaches infinity.
    double edge = ep.side == Side::right ? c.domain().hi() : c.domain().lo();
    auto far = c.far_exponent(ep.side);
    if (!std::isfinite(edge) && far) {
        h.mu_available = true;
        h.mu_exponent = *far;
        h.mu_in_linf = *far > 2.0;
        h.mu_x = log_grid(1.0, opt.x_max, opt.points_per_decade);
        h.mu_values.assign(h.mu_x.size(), 0.0);
        Endpoint far_ep{ep.origin, ep.side, 1.0};
        for (std::size_t k = 1; k < h.mu_x.size(); ++k) {
            if (closed) {
                h.mu_values[k] = mu_power(a_exact, d_exact, h.mu_x[k]);
            } else {
                auto q = gauss_kronrod([&](double s) { return s * inverse_c(c, far_ep, s); }, h.mu_x[k - 1],
                                       h.mu_x[k], opt.rel_tol);
                h.mu_values[k] = h.mu_values[k - 1] + q.value;
            }
        }
        if (!h.mu_in_linf) {
            h.mu_sup = kInf;
        } else if (closed) {
            h.mu_sup = 1.0 / (a_exact * (d_exact - 2.0));
        } else {
            double X = opt.x_max;
            double a_far = c_local(c, far_ep, X) / std::pow(X, *far);
            h.mu_sup = h.mu_values.back() + std::pow(X, 2.0 - *far) / (a_far * (*far - 2.0));
        }
    }
    return h;
}

HarmonicProfile membership(const Coefficient& c, Side side, const ClassifyOptions& opt) {
    return membership(c, Endpoint{0.0, side, opt.reach}, opt);
}

Case case_from(bool nu_in_l2, bool nu_in_linf) {
    if (!nu_in_l2) return Case::I;
    if (!nu_in_linf) return Case::II;
    return Case::III;
}

ClassificationReport classify(const Coefficient& c, const ClassifyOptions& opt) {
    const Domain& dom = c.domain();
    if (dom.kind == Domain::Kind::interval)
        throw Error(ErrorKind::unsupported, "classify handles line and half-line domains; use decompose for intervals");
    if (const PowerLaw* p = c.as_power_law(); p && p->origin != 0.0)
        throw Error(ErrorKind::config, "power law must be centred at the origin for classify");
    ZeroSet z = c.zero_set(1e-12);
    for (double x : z.points)
        if (std::abs(x) <= opt.reach && std::abs(x) > 1e-9)
            throw Error(ErrorKind::hypothesis, "zero set is not exactly the origin; decompose the coefficient first");
    for (const auto& pl : z.plateaus)
        if (pl.first <= opt.reach && pl.second >= -opt.reach)
            throw Error(ErrorKind::hypothesis, "coefficient has a plateau near the origin; decompose it first");

    ClassificationReport r;
    r.half_line = dom.kind == Domain::Kind::half_line;
    if (!r.half_line || dom.side == Side::left) r.left = membership(c, Side::left, opt);
    if (!r.half_line || dom.side == Side::right) r.right = membership(c, Side::right, opt);

    bool in_l2 = true, in_linf = true;
    for (const auto* h : {r.left ? &*r.left : nullptr, r.right ? &*r.right : nullptr}) {
        if (!h) continue;
        in_l2 = in_l2 && h->nu_in_l2;
        in_linf = in_linf && h->nu_in_linf;
    }
    r.kase = case_from(in_l2, in_linf);
    r.essentially_self_adjoint = r.kase == Case::I;
    r.deficiency_indices = r.kase == Case::I ? std::pair{0, 0} : std::pair{1, 1};
    r.unique_submarkovian = r.kase != Case::III;

    switch (r.kase) {
    case Case::I:
        r.extension_menu.push_back({"closure", "none needed (essentially self-adjoint)", "always", true});
        break;
    case Case::II:
        if (r.half_line) {
            r.extension_menu.push_back({"friedrichs", "(c phi')(0) = 0", "always", true});
            r.extension_menu.push_back(
                {"robin_family", "beta (c phi')(0) = alpha phi(0), alpha != 0", "never", false});
        } else {
            r.extension_menu.push_back({"friedrichs", "(c phi')(0+) = (c phi')(0-) = 0", "always", true});
            r.extension_menu.push_back(
                {"jump_family", "beta [c phi'] = alpha [phi], alpha != 0", "never", false});
        }
        break;
    case Case::III:
        if (r.half_line) {
            r.extension_menu.push_back({"friedrichs", "phi(0) = 0", "always", true});
            r.extension_menu.push_back({"robin_family", "beta (c phi')(0) = alpha phi(0)", "alpha*beta >= 0", true});
        } else {
            r.extension_menu.push_back({"jump_family", "beta [c phi'] = alpha [phi] at 0", "alpha*beta >= 0", true});
        }
        break;
    }

    bool inaccessible = true;
    for (const auto* h : {r.left ? &*r.left : nullptr, r.right ? &*r.right : nullptr}) {
        if (!h || !h->mu_available) continue;
        r.growth_known = true;
        inaccessible = inaccessible && !h->mu_in_linf;
    }
    r.growth_inaccessible_at_infinity = r.growth_known && inaccessible;
    return r;
}

namespace {

HarmonicProfile require_unbounded(const Coefficient& c, Side side, double n, const ClassifyOptions& opt) {
    if (!(n >= 2)) throw Error(ErrorKind::config, "cutoff index n must be at least 2");
    if (!(1.0 / n < opt.reach)) throw Error(ErrorKind::config, "1/n must lie inside the side interval");
    ClassifyOptions light = opt;
    light.points_per_decade = 2;
    HarmonicProfile h = membership(c, Endpoint{0.0, side, opt.reach}, light);
    if (h.nu_in_linf)
        throw Error(ErrorKind::hypothesis, "cutoff energy does not vanish; origin has positive capacity");
    return h;
}

}  // namespace

double cutoff_energy(const Coefficient& c, Side side, double n, const ClassifyOptions& opt) {
    require_unbounded(c, side, n, opt);
    Endpoint ep{0.0, side, opt.reach};
    const double tn = 1.0 / n;
    const double nu_n = nu(c, ep, tn, opt.rel_tol);
    auto chi_prime = [&](double t) { return -inverse_c(c, ep, t) / nu_n; };
    auto q = integrate_graded(
        [&](double t) {
            double g = chi_prime(t);
            return c_local(c, ep, t) * g * g;
        },
        tn, opt.reach, 0.0, opt.rel_tol * 1e-2);
    return q.value;
}

SmoothCutoff smooth_cutoff_l1(const Coefficient& c, Side side, double n, const ClassifyOptions& opt) {
    require_unbounded(c, side, n, opt);
    Endpoint ep{0.0, side, opt.reach};
    const double R = opt.reach;
    const double tn = 1.0 / n;
    SmoothCutoff out;
    out.nu_n = nu(c, ep, tn, opt.rel_tol);
    const double nn = out.nu_n;
    auto nu_t = [&](double t) { return nu(c, ep, t, opt.rel_tol); };
    auto xi = [&](double t) {
        double s = 1.0 - nu_t(t) / nn;
        return s * s;
    };
    const double xi_p_R = 2.0 / (c_local(c, ep, R) * nn);
    const double zeta_R = 1.0 - xi_p_R * (R - tn) / 2.0;
    const double span = R - tn;

    // Local derivative of c along t.
    auto c_prime = [&](double t) { return sign_of(side) * c.derivative(ep.to_x(t)); };
    auto flux_div = [&](double t) {
        double cl = c_local(c, ep, t);
        double core = 2.0 / (cl * nn * nn);
        double corr = xi_p_R * (c_prime(t) * (t - tn) + cl) / span;
        return (core - corr) / zeta_R;
    };
    out.flux_divergence_l1 =
        integrate_graded([&](double t) { return std::abs(flux_div(t)); }, tn, R, 0.0, opt.rel_tol).value;
    out.xi_flux_divergence_l1 =
        integrate_graded([&](double t) { return 2.0 / (c_local(c, ep, t) * nn * nn); }, tn, R, 0.0, opt.rel_tol)
            .value;
    out.leading_term = 1.0 / nn;
    out.ratio = out.flux_divergence_l1 / out.leading_term;

    auto phi = [&](double t) {
        if (t <= tn) return 0.0;
        if (t >= R) return 1.0;
        return (xi(t) - xi_p_R * (t - tn) * (t - tn) / (2.0 * span)) / zeta_R;
    };
    for (int k = 0; k < 8; ++k) {
        double t = tn * k / 8.0;
        out.x.push_back(ep.to_x(t));
        out.phi.push_back(0.0);
    }
    std::vector<double> g = log_grid(tn, R, 40);
    for (double t : g) {
        out.x.push_back(ep.to_x(t));
        out.phi.push_back(phi(t));
    }
    for (int k = 1; k <= 8; ++k) {
        double t = R * (1.0 + 0.0625 * k);
        out.x.push_back(ep.to_x(t));
        out.phi.push_back(1.0);
    }
    if (side == Side::left) {
        std::reverse(out.x.begin(), out.x.end());
        std::reverse(out.phi.begin(), out.phi.end());
    }
    return out;
}

}  // namespace degen
