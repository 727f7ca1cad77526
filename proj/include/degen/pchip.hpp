#pragma once

#include <vector>

namespace degen {

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch–Butland slopes).
/// Works from two nodes upward; each cell stays within its endpoint values
/// when the data are monotone there, so non-negative data stay non-negative.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double t) const;
    double derivative(double t) const;

    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }

private:
    std::size_t cell(double t) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> d_;  // node slopes
};

}  // namespace degen
