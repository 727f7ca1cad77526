#include "degen/pchip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace degen {

namespace {

// One-sided three-point end slope, clipped so the end cell stays monotone.
double end_slope(double h0, double h1, double m0, double m1) {
    double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (d * m0 <= 0.0) return 0.0;
    if (m0 * m1 <= 0.0 && std::abs(d) > std::abs(3.0 * m0)) return 3.0 * m0;
    return d;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw std::invalid_argument("monotone cubic needs at least two matching samples");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw std::invalid_argument("sample abscissae must be strictly increasing");

    std::vector<double> h(n - 1), m(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        m[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = m[0];
        return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (m[i - 1] * m[i] <= 0.0) {
            d_[i] = 0.0;
            continue;
        }
        double w1 = 2.0 * h[i] + h[i - 1];
        double w2 = h[i] + 2.0 * h[i - 1];
        d_[i] = (w1 + w2) / (w1 / m[i - 1] + w2 / m[i]);
    }
    d_[0] = end_slope(h[0], h[1], m[0], m[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
}

std::size_t MonotoneCubic::cell(double t) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
}

// The cubic is expanded about the nearer node, so values next to a zero node
// keep their relative accuracy.
double MonotoneCubic::operator()(double t) const {
    std::size_t i = cell(t);
    double h = x_[i + 1] - x_[i];
    double slope = (y_[i + 1] - y_[i]) / h;
    double u = t - x_[i], w = x_[i + 1] - t;
    if (u <= w) {
        double c2 = (3 * slope - 2 * d_[i] - d_[i + 1]) / h;
        double c3 = (d_[i] + d_[i + 1] - 2 * slope) / (h * h);
        return y_[i] + u * (d_[i] + u * (c2 + u * c3));
    }
    double c2 = (-3 * slope + 2 * d_[i + 1] + d_[i]) / h;
    double c3 = (2 * slope - d_[i] - d_[i + 1]) / (h * h);
    return y_[i + 1] + w * (-d_[i + 1] + w * (c2 + w * c3));
}

double MonotoneCubic::derivative(double t) const {
    std::size_t i = cell(t);
    double h = x_[i + 1] - x_[i];
    double slope = (y_[i + 1] - y_[i]) / h;
    double u = t - x_[i], w = x_[i + 1] - t;
    if (u <= w) {
        double c2 = (3 * slope - 2 * d_[i] - d_[i + 1]) / h;
        double c3 = (d_[i] + d_[i + 1] - 2 * slope) / (h * h);
        return d_[i] + u * (2 * c2 + 3 * c3 * u);
    }
    double c2 = (-3 * slope + 2 * d_[i + 1] + d_[i]) / h;
    double c3 = (2 * slope - d_[i] - d_[i + 1]) / (h * h);
    return d_[i + 1] - w * (2 * c2 + 3 * c3 * w);
}

}  // namespace degen
