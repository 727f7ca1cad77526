#include "degen/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "degen/error.hpp"

namespace degen {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment rule15(const Integrand& f, double a, double b, int& evals) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    auto at = [&](double x) {
        double v = f(x);
        ++evals;
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "non-finite integrand at x = " << x;
            throw Error(ErrorKind::quadrature, os.str());
        }
        return v;
    };
    double fc = at(c);
    double gauss = fc * kWg[3];
    double kron = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        double dx = h * kXgk[j];
        double s = at(c - dx) + at(c + dx);
        kron += kWgk[j] * s;
        if (j % 2 == 1) gauss += kWg[j / 2] * s;
    }
    return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace

QuadResult gauss_kronrod(const Integrand& f, double a, double b, double rel_tol, double abs_tol,
                         int max_subdivisions) {
    QuadResult r;
    if (a == b) return r;
    std::priority_queue<Segment> heap;
    Segment s = rule15(f, a, b, r.evaluations);
    heap.push(s);
    double total = s.value, err = s.error;
    int splits = 0;
    while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (splits >= max_subdivisions) {
            r.converged = false;
            break;
        }
        Segment top = heap.top();
        heap.pop();
        double m = 0.5 * (top.a + top.b);
        if (m == top.a || m == top.b) {  // cannot split further
            r.converged = false;
            heap.push(top);
            break;
        }
        Segment l = rule15(f, top.a, m, r.evaluations);
        Segment u = rule15(f, m, top.b, r.evaluations);
        total += l.value + u.value - top.value;
        err += l.error + u.error - top.error;
        heap.push(l);
        heap.push(u);
        ++splits;
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    double v = 0.0, e = 0.0;
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    r.value = v;
    r.error = e;
    return r;
}

QuadResult integrate_graded(const Integrand& f, double a, double b, double pole, double rel_tol,
                            double abs_tol) {
    QuadResult out;
    if (a == b) return out;
    double sgn = 1.0;
    if (a > b) {
        std::swap(a, b);
        sgn = -1.0;
    }
    if (pole > a && pole < b) throw Error(ErrorKind::quadrature, "graded quadrature pole inside interval");
    const bool below = pole <= a;
    double tn = below ? a - pole : pole - b;
    double tf = below ? b - pole : pole - a;
    // Panels [tn·2^k, tn·2^(k+1)] in distance from the pole.
    std::vector<double> cuts{tn};
    if (tn > 0) {
        while (cuts.back() * 2.0 < tf) cuts.push_back(cuts.back() * 2.0);
    }
    cuts.push_back(tf);
    auto to_x = [&](double t) { return below ? pole + t : pole - t; };
    // Panel tolerances are shared so the total meets rel_tol.
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double x0 = to_x(cuts[i]), x1 = to_x(cuts[i + 1]);
        if (x0 > x1) std::swap(x0, x1);
        QuadResult p = gauss_kronrod(f, x0, x1, rel_tol * 0.1, abs_tol / static_cast<double>(cuts.size()));
        out.value += p.value;
        out.error += p.error;
        out.evaluations += p.evaluations;
        out.converged = out.converged && p.converged;
    }
    out.value *= sgn;
    return out;
}

}  // namespace degen
