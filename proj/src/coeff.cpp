#include "degen/coeff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "degen/error.hpp"

namespace degen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pow_eval(const PowerLaw& p, double x) {
    double t = x - p.origin;
    if (t > 0) return p.amplitude_right * std::pow(t, p.exponent_right);
    if (t < 0) return p.amplitude_left * std::pow(-t, p.exponent_left);
    double lim_l = p.exponent_left == 0.0 ? p.amplitude_left : 0.0;
    double lim_r = p.exponent_right == 0.0 ? p.amplitude_right : 0.0;
    return std::min(lim_l, lim_r);
}

// Slope of amplitude·|t|^exponent as t → 0 from one side (t = side·s, s ↓ 0).
double origin_slope(double amplitude, double exponent, Side side) {
    double sgn = sign_of(side);
    if (exponent > 1.0 || exponent == 0.0) return 0.0;
    if (exponent == 1.0) return sgn * amplitude;
    return sgn * kInf;
}

double pow_derivative(const PowerLaw& p, double x) {
    double t = x - p.origin;
    if (t > 0) {
        if (p.exponent_right == 0.0) return 0.0;
        return p.amplitude_right * p.exponent_right * std::pow(t, p.exponent_right - 1.0);
    }
    if (t < 0) {
        if (p.exponent_left == 0.0) return 0.0;
        return -p.amplitude_left * p.exponent_left * std::pow(-t, p.exponent_left - 1.0);
    }
    double l = origin_slope(p.amplitude_left, p.exponent_left, Side::left);
    double r = origin_slope(p.amplitude_right, p.exponent_right, Side::right);
    if (l != r) throw DerivativeJump(x, l, r);
    return r;
}

double poly_eval(const Polynomial& p, double x) {
    double v = 0.0;
    for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) v = v * x + *it;
    return v;
}

double poly_derivative(const Polynomial& p, double x) {
    double v = 0.0;
    for (std::size_t k = p.coeffs.size(); k-- > 1;) v = v * x + static_cast<double>(k) * p.coeffs[k];
    return v;
}

bool poly_is_zero(const Polynomial& p) {
    return std::all_of(p.coeffs.begin(), p.coeffs.end(), [](double a) { return a == 0.0; });
}

double piece_eval(const Piece& pc, double x) {
    return std::visit(
        [x](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Polynomial>)
                return poly_eval(m, x);
            else
                return pow_eval(m, x);
        },
        pc.model);
}

double piece_derivative(const Piece& pc, double x) {
    return std::visit(
        [x](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Polynomial>)
                return poly_derivative(m, x);
            else
                return pow_derivative(m, x);
        },
        pc.model);
}

// One-sided slope of a piece at one of its ends.
double piece_end_slope(const Piece& pc, double x, Side from) {
    if (const auto* pw = std::get_if<PowerLaw>(&pc.model); pw && x == pw->origin) {
        return from == Side::left ? origin_slope(pw->amplitude_left, pw->exponent_left, Side::left)
                                  : origin_slope(pw->amplitude_right, pw->exponent_right, Side::right);
    }
    return piece_derivative(pc, x);
}

// Taylor coefficients of p around x0.
std::vector<double> taylor_shift(const Polynomial& p, double x0) {
    std::vector<double> b = p.coeffs;
    const std::size_t n = b.size();
    // Repeated synthetic division.
    for (std::size_t k = 0; k + 1 < n; ++k)
        for (std::size_t j = n - 1; j > k; --j) b[j - 1] += x0 * b[j];
    return b;
}

// Bisection on the sign of p′ inside [lo, hi]; locates an even-order root to
// machine precision where value-based minimisation stalls near sqrt(eps).
double polish_even_root(const Polynomial& p, double lo, double hi, double guess) {
    double dl = poly_derivative(p, lo), dh = poly_derivative(p, hi);
    if (!(dl < 0 && dh > 0)) return guess;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (poly_derivative(p, mid) < 0 ? lo : hi) = mid;
    }
    return std::abs(poly_eval(p, lo)) <= std::abs(poly_eval(p, hi)) ? lo : hi;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
    return v[v.size() / 2];
}

}  // namespace

const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }

double Domain::lo() const {
    switch (kind) {
    case Kind::line: return -kInf;
    case Kind::half_line: return side == Side::right ? 0.0 : -kInf;
    case Kind::interval: return a;
    }
    return -kInf;
}

double Domain::hi() const {
    switch (kind) {
    case Kind::line: return kInf;
    case Kind::half_line: return side == Side::right ? kInf : 0.0;
    case Kind::interval: return b;
    }
    return kInf;
}

std::string Domain::describe() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::line: os << "line"; break;
    case Kind::half_line: os << "half_line(" << to_string(side) << ")"; break;
    case Kind::interval: os << "interval(" << a << ", " << b << ")"; break;
    }
    return os.str();
}

Coefficient Coefficient::power_law(const PowerLaw& p, Domain domain) {
    if (!(p.amplitude_left > 0) || !(p.amplitude_right > 0))
        throw Error(ErrorKind::config, "power-law amplitudes must be positive");
    if (!(p.exponent_left >= 0) || !(p.exponent_right >= 0))
        throw Error(ErrorKind::config, "power-law exponents must be non-negative");
    if (domain.kind == Domain::Kind::interval && !(domain.a < domain.b))
        throw Error(ErrorKind::config, "interval domain needs a < b");
    return Coefficient(p, domain);
}

Coefficient Coefficient::piecewise(std::vector<Piece> pieces, Domain domain) {
    if (pieces.empty()) throw Error(ErrorKind::config, "piecewise coefficient needs at least one piece");
    std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    for (const auto& pc : pieces) {
        if (!(pc.lo < pc.hi)) throw Error(ErrorKind::config, "piece with empty interval");
        if (const auto* pw = std::get_if<PowerLaw>(&pc.model)) power_law(*pw);  // validates
    }
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
        double a = pieces[i].hi, b = pieces[i + 1].lo;
        if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
            throw Error(ErrorKind::config, "pieces are not contiguous at x = " + std::to_string(a));
        pieces[i + 1].lo = a;
    }
    if (domain.lo() < pieces.front().lo || domain.hi() > pieces.back().hi)
        throw Error(ErrorKind::config, "pieces do not cover the domain " + domain.describe());

    Coefficient c(std::move(pieces), domain);
    const auto& ps = std::get<std::vector<Piece>>(c.model_);
    for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
        double x = ps[i].hi;
        double vl = piece_eval(ps[i], x), vr = piece_eval(ps[i + 1], x);
        if (std::abs(vl - vr) > 1e-12 * std::max({1.0, std::abs(vl), std::abs(vr)})) {
            std::ostringstream os;
            os << "pieces disagree at joint x = " << x << " (" << vl << " vs " << vr << ")";
            throw Error(ErrorKind::config, os.str());
        }
        double sl = piece_end_slope(ps[i], x, Side::left);
        double sr = piece_end_slope(ps[i + 1], x, Side::right);
        if (sl != sr && std::abs(sl - sr) > 1e-12 * std::max({1.0, std::abs(sl), std::abs(sr)}))
            c.joints_.push_back({x, sl, sr});
    }

    // Non-negativity spot check on a sampling window.
    double span = 1.0;
    for (const auto& pc : ps) {
        if (std::isfinite(pc.lo)) span = std::max(span, std::abs(pc.lo));
        if (std::isfinite(pc.hi)) span = std::max(span, std::abs(pc.hi));
    }
    for (const auto& pc : ps) {
        double a = std::max(pc.lo, domain.lo()), b = std::min(pc.hi, domain.hi());
        if (!std::isfinite(a)) a = -10.0 * span;
        if (!std::isfinite(b)) b = 10.0 * span;
        if (!(a < b)) continue;
        double scale = 0.0;
        std::vector<double> v(257);
        for (std::size_t k = 0; k < v.size(); ++k) {
            v[k] = piece_eval(pc, a + (b - a) * static_cast<double>(k) / 256.0);
            scale = std::max(scale, std::abs(v[k]));
        }
        for (double vk : v)
            if (vk < -1e-12 * scale)
                throw Error(ErrorKind::config, "coefficient piece takes negative values");
    }

    // Near each zero of a polynomial piece, evaluate the Taylor expansion about the
    // zero with the sub-leading terms (pure rounding residue) dropped.
    ZeroSet zs = c.zero_set(1e-12);
    std::vector<double> anchors = zs.points;
    for (const auto& pl : zs.plateaus) {
        anchors.push_back(pl.first);
        anchors.push_back(pl.second);
    }
    for (double z : anchors) {
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const auto* poly = std::get_if<Polynomial>(&ps[i].model);
            if (!poly || z < ps[i].lo || z > ps[i].hi) continue;
            std::vector<double> b = taylor_shift(*poly, z);
            double scale = 0.0, r = std::max(1.0, std::abs(z));
            for (std::size_t j = 0; j < poly->coeffs.size(); ++j)
                scale += std::abs(poly->coeffs[j]) * std::pow(r, static_cast<double>(j));
            std::size_t m = 0;
            while (m < b.size() && std::abs(b[m]) <= 1e-12 * scale) b[m++] = 0.0;
            if (m == 0 || m == b.size()) continue;
            c.roots_.push_back({i, z, std::move(b)});
        }
    }
    return c;
}

Coefficient Coefficient::tabulated(std::vector<double> x, std::vector<double> c) {
    if (x.size() < 2 || x.size() != c.size())
        throw Error(ErrorKind::config, "table needs at least two (x, c) rows");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(c[i] >= 0)) throw Error(ErrorKind::config, "table values must be non-negative");
        if (i > 0 && !(x[i] > x[i - 1]))
            throw Error(ErrorKind::config, "table abscissae must be strictly increasing");
    }
    Domain d = Domain::interval(x.front(), x.back());
    return Coefficient(MonotoneCubic(std::move(x), std::move(c)), d);
}

Coefficient::Model Coefficient::model() const {
    switch (model_.index()) {
    case 0: return Model::power_law;
    case 1: return Model::piecewise;
    default: return Model::tabulated;
    }
}

void Coefficient::check_domain(double x) const {
    if (!domain_.contains(x)) {
        std::ostringstream os;
        os << "x = " << x << " outside domain " << domain_.describe();
        throw Error(ErrorKind::domain, os.str());
    }
}

double Coefficient::eval(double x) const {
    check_domain(x);
    if (const auto* p = as_power_law()) return pow_eval(*p, x);
    if (const auto* t = as_table()) return std::max(0.0, (*t)(x));
    const auto& ps = std::get<std::vector<Piece>>(model_);
    std::size_t i = 0;
    while (i + 1 < ps.size() && x > ps[i].hi) ++i;
    if (const RootModel* r = nearest_root(i, x)) {
        const double t = x - r->z;
        double v = 0.0;
        for (auto it = r->taylor.rbegin(); it != r->taylor.rend(); ++it) v = v * t + *it;
        return std::max(0.0, v);
    }
    return piece_eval(ps[i], x);
}

double Coefficient::eval_local(double x0, Side side, double t) const {
    const double x = x0 + sign_of(side) * t;
    if (const auto* ps = as_pieces()) {
        for (const auto& r : roots_) {
            const Piece& pc = (*ps)[r.piece];
            bool toward = side == Side::right ? x0 < pc.hi : x0 > pc.lo;
            if (r.z != x0 || !toward || x < pc.lo || x > pc.hi) continue;
            check_domain(x);
            const double u = sign_of(side) * t;
            double v = 0.0;
            for (auto it = r.taylor.rbegin(); it != r.taylor.rend(); ++it) v = v * u + *it;
            return std::max(0.0, v);
        }
    }
    return eval(x);
}

const Coefficient::RootModel* Coefficient::nearest_root(std::size_t piece, double x) const {
    const RootModel* best = nullptr;
    for (const auto& r : roots_)
        if (r.piece == piece && (!best || std::abs(x - r.z) < std::abs(x - best->z))) best = &r;
    return best;
}

double Coefficient::derivative(double x) const {
    check_domain(x);
    if (const auto* p = as_power_law()) return pow_derivative(*p, x);
    if (const auto* t = as_table()) return t->derivative(x);
    const auto& ps = std::get<std::vector<Piece>>(model_);
    for (const auto& j : joints_)
        if (j.x == x) throw DerivativeJump(x, j.slope_left, j.slope_right);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (x < ps[i].hi || i + 1 == ps.size()) {
            if (const RootModel* r = nearest_root(i, x)) return poly_derivative(Polynomial{r->taylor}, x - r->z);
            return piece_derivative(ps[i], x);
        }
        if (x == ps[i].hi) return piece_end_slope(ps[i], x, Side::left);
    }
    return piece_derivative(ps.back(), x);
}

std::optional<LocalPower> Coefficient::local_power(double x0, Side side) const {
    auto from_power = [&](const PowerLaw& p) -> std::optional<LocalPower> {
        if (x0 == p.origin) {
            if (side == Side::right) return LocalPower{p.exponent_right, p.amplitude_right};
            return LocalPower{p.exponent_left, p.amplitude_left};
        }
        return LocalPower{0.0, pow_eval(p, x0)};
    };
    if (const auto* p = as_power_law()) return from_power(*p);
    if (as_table()) return std::nullopt;

    const auto& ps = std::get<std::vector<Piece>>(model_);
    const Piece* hit = nullptr;
    for (const auto& pc : ps) {
        bool inside = side == Side::right ? (pc.lo <= x0 && x0 < pc.hi) : (pc.lo < x0 && x0 <= pc.hi);
        if (inside) {
            hit = &pc;
            break;
        }
    }
    if (!hit) return std::nullopt;
    if (const auto* pw = std::get_if<PowerLaw>(&hit->model)) return from_power(*pw);
    const auto& poly = std::get<Polynomial>(hit->model);
    if (poly_is_zero(poly)) return std::nullopt;
    std::vector<double> b = taylor_shift(poly, x0);
    double scale = 0.0, r = std::max(1.0, std::abs(x0));
    for (std::size_t j = 0; j < poly.coeffs.size(); ++j)
        scale += std::abs(poly.coeffs[j]) * std::pow(r, static_cast<double>(j));
    for (std::size_t k = 0; k < b.size(); ++k) {
        if (std::abs(b[k]) > 1e-12 * scale) {
            double amp = side == Side::left && (k % 2 == 1) ? -b[k] : b[k];
            return LocalPower{static_cast<double>(k), amp};
        }
    }
    return std::nullopt;
}

std::optional<double> Coefficient::far_exponent(Side side) const {
    double edge = side == Side::right ? domain_.hi() : domain_.lo();
    if (std::isfinite(edge)) return std::nullopt;
    if (const auto* p = as_power_law()) return side == Side::right ? p->exponent_right : p->exponent_left;
    if (as_table()) return std::nullopt;
    const auto& ps = std::get<std::vector<Piece>>(model_);
    const Piece& pc = side == Side::right ? ps.back() : ps.front();
    if (const auto* pw = std::get_if<PowerLaw>(&pc.model))
        return side == Side::right ? pw->exponent_right : pw->exponent_left;
    const auto& poly = std::get<Polynomial>(pc.model);
    for (std::size_t k = poly.coeffs.size(); k-- > 0;)
        if (poly.coeffs[k] != 0.0) return static_cast<double>(k);
    return std::nullopt;
}

ZeroSet Coefficient::zero_set(double tol) const {
    if (!(tol > 0)) throw Error(ErrorKind::config, "zero_set tolerance must be positive");
    ZeroSet z;
    if (const auto* p = as_power_law()) {
        if ((p->exponent_left > 0 || p->exponent_right > 0) && domain_.contains(p->origin))
            z.points.push_back(p->origin);
        return z;
    }
    if (const auto* t = as_table()) {
        const auto& xs = t->x();
        const auto& cs = t->y();
        double scale = median(cs);
        if (scale <= 0) scale = *std::max_element(cs.begin(), cs.end());
        double thr = tol * scale;
        std::size_t i = 0;
        while (i < xs.size()) {
            if (cs[i] > thr) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j + 1 < xs.size() && cs[j + 1] <= thr) ++j;
            if (j > i)
                z.plateaus.emplace_back(xs[i], xs[j]);
            else
                z.points.push_back(xs[i]);
            i = j + 1;
        }
        return z;
    }

    const auto& ps = std::get<std::vector<Piece>>(model_);
    double span = 1.0;
    for (const auto& pc : ps) {
        if (std::isfinite(pc.lo)) span = std::max(span, std::abs(pc.lo));
        if (std::isfinite(pc.hi)) span = std::max(span, std::abs(pc.hi));
    }
    struct Window {
        const Piece* pc;
        double a, b;
        std::vector<double> x, v;
    };
    std::vector<Window> windows;
    std::vector<double> all_values;
    for (const auto& pc : ps) {
        double a = std::max(pc.lo, domain_.lo()), b = std::min(pc.hi, domain_.hi());
        if (a > b) continue;
        if (const auto* poly = std::get_if<Polynomial>(&pc.model); poly && poly_is_zero(*poly)) {
            z.plateaus.emplace_back(a, b);
            continue;
        }
        if (!std::isfinite(a)) a = -10.0 * span;
        if (!std::isfinite(b)) b = 10.0 * span;
        Window w{&pc, a, b, {}, {}};
        const int n = 1024;
        for (int k = 0; k <= n; ++k) {
            double x = a + (b - a) * k / n;
            w.x.push_back(x);
            w.v.push_back(piece_eval(pc, x));
            all_values.push_back(std::abs(w.v.back()));
        }
        windows.push_back(std::move(w));
    }
    double scale = median(all_values);
    if (scale <= 0 && !all_values.empty()) scale = *std::max_element(all_values.begin(), all_values.end());
    double thr = tol * scale;

    for (const auto& w : windows) {
        if (const auto* pw = std::get_if<PowerLaw>(&w.pc->model)) {
            if ((pw->exponent_left > 0 || pw->exponent_right > 0) && pw->origin >= w.a && pw->origin <= w.b)
                z.points.push_back(pw->origin);
            continue;
        }
        const std::size_t n = w.x.size();
        for (std::size_t k = 0; k < n; ++k) {
            bool local_min = (k == 0 || w.v[k] <= w.v[k - 1]) && (k + 1 == n || w.v[k] <= w.v[k + 1]);
            if (!local_min) continue;
            if (w.v[k] <= thr && (k == 0 || k + 1 == n || w.v[k] == 0.0)) {
                z.points.push_back(w.x[k]);
                continue;
            }
            double lo = w.x[k == 0 ? 0 : k - 1], hi = w.x[k + 1 == n ? k : k + 1];
            auto [xm, vm] = boost::math::tools::brent_find_minima(
                [&](double x) { return piece_eval(*w.pc, x); }, lo, hi, 52);
            if (vm <= thr) {
                if (const auto* poly = std::get_if<Polynomial>(&w.pc->model)) xm = polish_even_root(*poly, lo, hi, xm);
                z.points.push_back(xm);
            }
        }
    }

    // Merge plateaus sharing an end, drop points absorbed by plateaus, dedupe.
    std::sort(z.plateaus.begin(), z.plateaus.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& pl : z.plateaus) {
        if (!merged.empty() && pl.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, pl.second);
        else
            merged.push_back(pl);
    }
    z.plateaus = merged;
    std::sort(z.points.begin(), z.points.end());
    std::vector<double> pts;
    for (double x : z.points) {
        double eps = 1e-9 * std::max(1.0, std::abs(x));
        bool absorbed = std::any_of(z.plateaus.begin(), z.plateaus.end(), [&](const auto& pl) {
            return x >= pl.first - eps && x <= pl.second + eps;
        });
        if (absorbed) continue;
        if (!pts.empty() && std::abs(x - pts.back()) <= eps) continue;
        pts.push_back(x);
    }
    z.points = pts;
    return z;
}

Coefficient Coefficient::scaled(double lambda) const {
    if (!(lambda > 0)) throw Error(ErrorKind::config, "scale factor must be positive");
    if (const auto* p = as_power_law()) {
        PowerLaw q = *p;
        q.amplitude_left *= lambda;
        q.amplitude_right *= lambda;
        return power_law(q, domain_);
    }
    if (const auto* t = as_table()) {
        std::vector<double> c = t->y();
        for (double& v : c) v *= lambda;
        return tabulated(t->x(), c);
    }
    std::vector<Piece> ps = std::get<std::vector<Piece>>(model_);
    for (auto& pc : ps) {
        if (auto* poly = std::get_if<Polynomial>(&pc.model))
            for (double& a : poly->coeffs) a *= lambda;
        else {
            auto& pw = std::get<PowerLaw>(pc.model);
            pw.amplitude_left *= lambda;
            pw.amplitude_right *= lambda;
        }
    }
    return piecewise(ps, domain_);
}

std::string Coefficient::describe() const {
    std::ostringstream os;
    if (const auto* p = as_power_law()) {
        os << "power_law(amplitudes=[" << p->amplitude_left << ", " << p->amplitude_right << "], exponents=["
           << p->exponent_left << ", " << p->exponent_right << "])";
    } else if (const auto* t = as_table()) {
        os << "tabulated(" << t->x().size() << " samples)";
    } else {
        os << "piecewise(" << std::get<std::vector<Piece>>(model_).size() << " pieces)";
    }
    os << " on " << domain_.describe();
    return os.str();
}

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::quadrature: return "quadrature";
    case ErrorKind::indeterminate: return "indeterminate";
    case ErrorKind::derivative_jump: return "derivative_jump";
    case ErrorKind::assembly: return "assembly";
    case ErrorKind::resolvent_pole: return "resolvent_pole";
    case ErrorKind::hypothesis: return "hypothesis";
    case ErrorKind::eigensolver: return "eigensolver";
    case ErrorKind::config: return "config";
    case ErrorKind::unsupported: return "unsupported";
    }
    return "unknown";
}

DerivativeJump::DerivativeJump(double x_, double l, double r)
    : Error(ErrorKind::derivative_jump,
            "derivative undefined at x = " + std::to_string(x_) + ": one-sided values differ (left " +
                std::to_string(l) + ", right " + std::to_string(r) + ")"),
      x(x_), left(l), right(r) {}

}  // namespace degen
