#include "degen/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "degen/error.hpp"

namespace degen {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

double w_dot(const std::vector<double>& w, const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * a[i] * b[i];
    return s;
}

}  // namespace

std::vector<double> Conductances::apply(const std::vector<double>& x) const {
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = s[i] * x[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double f = k[i] * (x[i] - x[i + 1]);
        y[i] += f;
        y[i + 1] -= f;
    }
    return y;
}

ShiftedFactor::ShiftedFactor(const Conductances& a, double gamma) : k_(a.k), d_(a.size()) {
    const std::size_t n = a.size();
    double g = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double gi = a.s[i] + gamma * a.w[i];
        if (i > 0) {
            double kl = k_[i - 1];
            double dl = d_[i - 1];
            gi += kl * g / dl;
        }
        g = gi;
        double di = (i + 1 < n ? k_[i] : 0.0) + g;
        if (di == 0.0) {
            singular_ = true;
            di = -kTiny;
        }
        if (di < 0.0) ++negative_;
        d_[i] = di;
    }
}

std::vector<double> ShiftedFactor::solve(const std::vector<double>& rhs) const {
    const std::size_t n = d_.size();
    std::vector<double> y(rhs);
    for (std::size_t i = 1; i < n; ++i) y[i] += (k_[i - 1] / d_[i - 1]) * y[i - 1];
    for (std::size_t i = 0; i < n; ++i) y[i] /= d_[i];
    for (std::size_t i = n - 1; i-- > 0;) y[i] += (k_[i] / d_[i]) * y[i + 1];
    return y;
}

int count_below(const Conductances& a, double lambda) { return ShiftedFactor(a, -lambda).negative_pivots(); }

std::vector<Eigenpair> smallest_eigenpairs(const Conductances& a, int k) {
    const std::size_t n = a.size();
    if (k < 1 || static_cast<std::size_t>(k) > n) throw Error(ErrorKind::eigensolver, "requested eigenpair count out of range");

    // Gershgorin bounds for W^{-1/2} A W^{-1/2}.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double kl = i > 0 ? a.k[i - 1] : 0.0, kr = i + 1 < n ? a.k[i] : 0.0;
        double center = (kl + kr + a.s[i]) / a.w[i];
        double radius = (i > 0 ? std::abs(kl) / std::sqrt(a.w[i - 1] * a.w[i]) : 0.0) +
                        (i + 1 < n ? std::abs(kr) / std::sqrt(a.w[i] * a.w[i + 1]) : 0.0);
        lo = std::min(lo, center - radius);
        hi = std::max(hi, center + radius);
    }
    double span = std::max(std::abs(lo), std::abs(hi));
    lo -= 1e-12 * span + 1.0;
    hi += 1e-12 * span + 1.0;

    std::vector<Eigenpair> out;
    for (int j = 0; j < k; ++j) {
        // Bisection for the (j+1)-th smallest eigenvalue: count_below(x) > j.
        double l = lo, h = hi;
        for (int it = 0; it < 4000; ++it) {
            double mid;
            if (l > 0 && h / l > 4.0)
                mid = std::sqrt(l * h);
            else if (h < 0 && l / h > 4.0)
                mid = -std::sqrt(l * h);
            else
                mid = 0.5 * (l + h);
            if (mid <= l || mid >= h) break;
            if (count_below(a, mid) > j)
                h = mid;
            else
                l = mid;
            if (h - l <= 4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(l), std::abs(h))) break;
        }
        double lambda = 0.5 * (l + h);

        // Inverse iteration, orthogonal to earlier vectors with nearby eigenvalues.
        // A shift sitting on the eigenvalue can make a pivot vanish; nudge it upward
        // without crossing the next eigenvalue.
        double shift = lambda;
        ShiftedFactor f(a, -shift);
        double nudge = std::max(1e-13 * std::abs(lambda), 1e-280);
        for (int tries = 0; tries < 80; ++tries) {
            bool ok = !f.singular() && std::all_of(f.pivots().begin(), f.pivots().end(), [](double d) {
                return std::isfinite(d) && std::abs(d) > 1e-250;
            });
            if (ok) break;
            shift = lambda + nudge;
            if (count_below(a, shift) > j + 1) break;
            f = ShiftedFactor(a, -shift);
            nudge *= 1e4;
        }
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.37 * std::sin(1.7 * static_cast<double>(i + 1) * (j + 1));
        double gap_tol = 1e-9 * std::max(1.0, std::abs(lambda));
        for (int it = 0; it < 6; ++it) {
            std::vector<double> rhs(n);
            for (std::size_t i = 0; i < n; ++i) rhs[i] = a.w[i] * v[i];
            v = f.solve(rhs);
            for (const auto& prev : out) {
                if (std::abs(prev.value - lambda) > gap_tol) continue;
                double c = w_dot(a.w, prev.vector, v);
                for (std::size_t i = 0; i < n; ++i) v[i] -= c * prev.vector[i];
            }
            double big = 0.0;
            for (double x : v) big = std::max(big, std::abs(x));
            if (big > 0 && std::isfinite(big))
                for (double& x : v) x /= big;
            double nrm = std::sqrt(w_dot(a.w, v, v));
            if (!(nrm > 0) || !std::isfinite(nrm)) throw Error(ErrorKind::eigensolver, "inverse iteration broke down");
            for (double& x : v) x /= nrm;
        }
        // Residual check in the W^{-1} norm.
        std::vector<double> av = a.apply(v);
        // `noise` bounds the rounding error of A·v, which dominates on strongly graded meshes.
        double res = 0.0, ref = 0.0, noise = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = av[i] - lambda * a.w[i] * v[i];
            double row = std::abs(a.s[i] * v[i]);
            if (i > 0) row += std::abs(a.k[i - 1]) * (std::abs(v[i]) + std::abs(v[i - 1]));
            if (i + 1 < n) row += std::abs(a.k[i]) * (std::abs(v[i]) + std::abs(v[i + 1]));
            res += r * r / a.w[i];
            ref += av[i] * av[i] / a.w[i];
            noise += row * row / a.w[i];
        }
        res = std::sqrt(res);
        ref = std::sqrt(ref) + std::abs(lambda);
        noise = 64 * std::numeric_limits<double>::epsilon() * std::sqrt(noise);
        if (res > 1e-6 * ref + noise + 1e-300) {
            std::ostringstream os;
            os << "eigenpair " << j + 1 << " did not converge (relative residual " << res / ref << ")";
            throw Error(ErrorKind::eigensolver, os.str());
        }
        // Fix the sign so the largest-magnitude component is positive.
        auto big = std::max_element(v.begin(), v.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
        if (*big < 0)
            for (double& x : v) x = -x;
        out.push_back({lambda, std::move(v)});
    }
    return out;
}

}  // namespace degen
