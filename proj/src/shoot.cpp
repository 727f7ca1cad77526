#include "degen/shoot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "degen/error.hpp"
#include "degen/ode.hpp"

namespace degen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> zero_points(const Coefficient& c) {
    ZeroSet z = c.zero_set(1e-12);
    std::vector<double> pts = z.points;
    for (const auto& pl : z.plateaus) {
        pts.push_back(pl.first);
        pts.push_back(pl.second);
    }
    return pts;
}

double distance_to(const std::vector<double>& pts, double x) {
    double d = kInf;
    for (double p : pts) d = std::min(d, std::abs(x - p));
    return d;
}

OdeTrace shoot_raw(const Coefficient& c, double gamma, double x0, State y0, double x1, const std::vector<double>& stops,
                   const ShootOptions& opt) {
    std::vector<double> zeros = zero_points(c);
    Rhs f = [&c, gamma](double x, const State& y, State& dy) {
        double cx = c.eval(x);
        dy[0] = cx > 0 ? y[1] / cx : kInf;
        dy[1] = gamma * y[0];
        dy[2] = y[0] * y[0];
    };
    OdeOptions o;
    o.rel_tol = opt.rel_tol;
    if (!zeros.empty())
        o.max_step = [zeros](double x) {
            double d = distance_to(zeros, x);
            return d > 0 ? 0.25 * d : kInf;
        };
    return dormand_prince(f, x0, y0, x1, stops, o);
}

ShootingSolution to_solution(const Coefficient& c, double gamma, const OdeTrace& tr) {
    ShootingSolution s;
    s.gamma = gamma;
    s.truncated = tr.truncated;
    s.truncation_reason = tr.reason;
    std::vector<std::size_t> order(tr.t.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (tr.t.size() > 1 && tr.t.back() < tr.t.front()) std::reverse(order.begin(), order.end());
    for (std::size_t i : order) {
        s.grid.push_back(tr.t[i]);
        s.psi.push_back(tr.y[i][0]);
        s.flux.push_back(tr.y[i][1]);
        s.l2_partial.push_back(tr.y[i][2]);
    }
    double m0 = s.l2_partial.front();
    for (double& m : s.l2_partial) m -= m0;

    s.monotone_square = true;
    for (std::size_t i = 0; i + 1 < s.psi.size(); ++i) {
        double a = s.psi[i] * s.psi[i], b = s.psi[i + 1] * s.psi[i + 1];
        if (b < a * (1.0 - 1e-12)) s.monotone_square = false;
    }

    std::vector<double> zeros = zero_points(c);
    if (!zeros.empty() && s.grid.size() > 1) {
        double dl = distance_to(zeros, s.grid.front()), dr = distance_to(zeros, s.grid.back());
        std::size_t i = dl <= dr ? 0 : s.grid.size() - 1;
        double z = s.grid[i];
        double best = kInf;
        for (double p : zeros)
            if (std::abs(p - s.grid[i]) < best) {
                best = std::abs(p - s.grid[i]);
                z = p;
            }
        double cx = c.eval(s.grid[i]);
        if (s.psi[i] != 0.0 && cx > 0) s.lp_tail_exponent = (s.grid[i] - z) * s.flux[i] / (cx * s.psi[i]);
    }
    return s;
}

}  // namespace

void ShootingSolution::write_csv(std::ostream& os) const {
    os.precision(17);
    os << "x,psi,flux,l2_partial\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        os << grid[i] << ',' << psi[i] << ',' << flux[i] << ',' << l2_partial[i] << '\n';
}

ShootingSolution integrate_deficiency(const Coefficient& c, double gamma, double x_start,
                                      std::pair<double, double> seed, double x_end, const ShootOptions& opt,
                                      const std::vector<double>& stops) {
    if (seed.first == 0.0 && seed.second == 0.0) throw Error(ErrorKind::config, "shooting seed must be non-zero");
    if (!(gamma >= 0)) throw Error(ErrorKind::config, "gamma must be non-negative");
    OdeTrace tr = shoot_raw(c, gamma, x_start, {seed.first, seed.second, 0.0}, x_end, stops, opt);
    return to_solution(c, gamma, tr);
}

DeficiencyResult deficiency_index(const Coefficient& c, Side side, double gamma, const ShootOptions& opt) {
    if (!(gamma > 0)) throw Error(ErrorKind::config, "gamma must be positive");
    DeficiencyResult r;
    const double s = sign_of(side);
    const std::array<State, 2> seeds{State{1.0, 0.0, 0.0}, State{0.0, 1.0, 0.0}};
    std::ostringstream diag;
    bool undecided = false;
    for (std::size_t k = 0; k < 2; ++k) {
        std::vector<double> stops{s * r.eps[0], s * r.eps[1]};
        OdeTrace tr = shoot_raw(c, gamma, s * 1.0, seeds[k], s * r.eps[2], stops, opt);
        bool overflow = tr.truncated && tr.reason == "solution overflow";
        if (tr.truncated && !overflow) {
            diag << "seed " << k << " stopped early: " << tr.reason << "; ";
            undecided = true;
            continue;
        }
        std::array<double, 3> m{kInf, kInf, kInf};
        for (std::size_t i = 0; i < tr.t.size(); ++i)
            for (std::size_t e = 0; e < 3; ++e)
                if (tr.t[i] == s * r.eps[e]) m[e] = std::abs(tr.y[i][2]);
        r.mass[k] = m;
        if (overflow) {
            r.divergent[k] = true;
            r.ratio[k] = kInf;
            continue;
        }
        double d1 = m[1] - m[0], d2 = m[2] - m[1];
        r.ratio[k] = d2 / d1;
        if (r.ratio[k] >= 0.9) {
            r.divergent[k] = true;
        } else if (r.ratio[k] <= 0.8) {
            r.divergent[k] = false;
        } else {
            undecided = true;
            diag << "seed " << k << " increment ratio " << r.ratio[k] << "; ";
        }
    }
    if (undecided) {
        diag << "partial masses";
        for (const auto& m : r.mass) diag << " [" << m[0] << ", " << m[1] << ", " << m[2] << "]";
        throw Error(ErrorKind::indeterminate, "deficiency index indeterminate: " + diag.str());
    }
    r.index = (r.divergent[0] || r.divergent[1]) ? 0 : 1;
    return r;
}

ShootingSolution deficiency_solution(const Coefficient& c, Side side, double gamma, double length, double x_min,
                                     const ShootOptions& opt, const std::vector<double>& stops) {
    if (!(gamma > 0)) throw Error(ErrorKind::config, "gamma must be positive");
    if (!(length > x_min && x_min > 0)) throw Error(ErrorKind::config, "need 0 < x_min < length");
    const double s = sign_of(side);
    OdeTrace tr = shoot_raw(c, gamma, s * length, {0.0, -s, 0.0}, s * x_min, stops, opt);
    ShootingSolution sol = to_solution(c, gamma, tr);
    double total = sol.l2_partial.back();
    if (!(total > 0) || !std::isfinite(total)) throw Error(ErrorKind::quadrature, "deficiency solution has no finite mass");
    double scale = 1.0 / std::sqrt(total);
    for (double& v : sol.psi) v *= scale;
    for (double& v : sol.flux) v *= scale;
    for (double& v : sol.l2_partial) v /= total;
    return sol;
}

bool EtaProperties::lp_member(double p) const {
    if (std::isinf(p)) return bounded;
    return p * tail_exponent < 1.0;
}

EtaProperties eta_properties(const ShootingSolution& sol, const HarmonicProfile* nu_profile) {
    EtaProperties e;
    const std::size_t n = sol.psi.size();
    e.positive = n > 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool end = i == 0 || i + 1 == n;
        if (sol.psi[i] < 0 || (!end && sol.psi[i] == 0)) e.positive = false;
    }
    // Monotone in distance from the origin.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::abs(sol.grid[a]) < std::abs(sol.grid[b]); });
    e.non_increasing = true;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double a = sol.psi[order[k]], b = sol.psi[order[k + 1]];
        if (b > a * (1.0 + 1e-12) + 1e-300) e.non_increasing = false;
    }
    e.tail_exponent = std::max(0.0, -sol.lp_tail_exponent);
    e.bounded = e.tail_exponent < 1e-3;
    if (nu_profile) {
        double nu_e = std::max(0.0, nu_profile->exponent - 1.0);
        if (std::abs(nu_e - e.tail_exponent) < 0.05) {
            e.tail_exponent = nu_e;
            e.snapped = true;
            e.bounded = nu_profile->nu_in_linf;
        }
    }
    return e;
}

BlowupResult blowup_check(const Coefficient& c, double gamma_boundary, double x_end, bool dirichlet,
                          const ShootOptions& opt) {
    if (!(gamma_boundary >= 0)) throw Error(ErrorKind::config, "boundary ratio must be non-negative");
    ClassifyOptions light;
    light.points_per_decade = 2;
    light.x_max = 1e3;
    HarmonicProfile h = membership(c, Side::right, light);
    if (!h.mu_available || h.mu_in_linf)
        throw Error(ErrorKind::hypothesis, "growth hypothesis violated; the growth estimate does not apply");
    BlowupResult r;
    r.start = c.eval(0.0) > 0 ? 0.0 : 1e-6;
    if (!(x_end > r.start)) throw Error(ErrorKind::config, "blow-up horizon must exceed the start point");
    std::pair<double, double> seed = dirichlet ? std::pair{0.0, 1.0} : std::pair{1.0, c.eval(r.start) * gamma_boundary};
    r.solution = integrate_deficiency(c, 1.0, r.start, seed, x_end, opt);
    const auto& psi = r.solution.psi;
    std::size_t i0 = 0;
    while (i0 < psi.size() && psi[i0] == 0.0) ++i0;
    if (i0 >= psi.size()) throw Error(ErrorKind::quadrature, "blow-up solution vanished identically");
    r.x0 = r.solution.grid[i0];
    r.x_end = r.solution.grid.back();
    r.monotone_square = true;
    for (std::size_t i = i0; i + 1 < psi.size(); ++i)
        if (psi[i + 1] * psi[i + 1] < psi[i] * psi[i] * (1.0 - 1e-12)) r.monotone_square = false;
    r.growth_factor = psi.back() * psi.back() / (psi[i0] * psi[i0]);
    return r;
}

}  // namespace degen
