#include "degen/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace degen {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b − b̂ (fifth minus embedded fourth order)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
    State r = y;
    for (auto [c, k] : terms)
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += h * c * (*k)[i];
    return r;
}

}  // namespace

OdeTrace dormand_prince(const Rhs& f, double t0, const State& y0, double t1, std::vector<double> stops,
                        const OdeOptions& opt) {
    OdeTrace out;
    out.t.push_back(t0);
    out.y.push_back(y0);
    if (t0 == t1) return out;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    stops.push_back(t1);
    stops.erase(std::remove_if(stops.begin(), stops.end(), [&](double s) { return dir * (s - t0) <= 0 || dir * (s - t1) > 0; }),
                stops.end());
    std::sort(stops.begin(), stops.end(), [&](double a, double b) { return dir * a < dir * b; });
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

    double t = t0;
    State y = y0, k1, k2, k3, k4, k5, k6, k7;
    f(t, y, k1);
    double h = 1e-3 * std::abs(t1 - t0);
    if (opt.max_step) h = std::min(h, opt.max_step(t));
    std::size_t next = 0;
    int steps = 0;
    while (next < stops.size()) {
        if (++steps > opt.max_steps) {
            out.truncated = true;
            out.reason = "step budget exhausted";
            break;
        }
        double target = stops[next];
        double cap = opt.max_step ? opt.max_step(t) : std::numeric_limits<double>::infinity();
        h = std::min(h, cap);
        bool landing = false;
        if (h >= std::abs(target - t)) {
            h = std::abs(target - t);
            landing = true;
        }
        if (h <= 16 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1e-300)) {
            out.truncated = true;
            out.reason = "step underflow";
            break;
        }
        double hs = dir * h;
        State y2 = axpy(y, hs, {{a21, &k1}});
        f(t + c2 * hs, y2, k2);
        State y3 = axpy(y, hs, {{a31, &k1}, {a32, &k2}});
        f(t + c3 * hs, y3, k3);
        State y4 = axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
        f(t + c4 * hs, y4, k4);
        State y5 = axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
        f(t + c5 * hs, y5, k5);
        State y6 = axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
        double tn = landing ? target : t + hs;
        f(tn, y6, k6);
        State yn = axpy(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        f(tn, yn, k7);
        double err = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < y.size(); ++i) {
            double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(yn[i]));
            err = std::max(err, std::abs(ei) / sc);
            finite = finite && std::isfinite(yn[i]);
        }
        if (!finite) err = std::numeric_limits<double>::infinity();
        if (err <= 1.0) {
            t = tn;
            y = yn;
            k1 = k7;
            out.t.push_back(t);
            out.y.push_back(y);
            if (landing) ++next;
            bool overflow = false;
            for (double v : y) overflow = overflow || std::abs(v) > opt.overflow;
            if (overflow) {
                out.truncated = true;
                out.reason = "solution overflow";
                break;
            }
            double fac = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
            h *= fac;
        } else {
            h *= std::isfinite(err) ? std::max(0.1, 0.9 * std::pow(err, -0.2)) : 0.1;
        }
    }
    return out;
}

}  // namespace degen
