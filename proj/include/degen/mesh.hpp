#pragma once

#include <string>
#include <vector>

#include "degen/coeff.hpp"

namespace degen {

struct Geometry {
    enum class Kind { half_line, line, interval };

    Kind kind = Kind::line;
    Side side = Side::right;  // half-line only
    double length = 0.0;      // truncation length for half-line and line
    double a = 0.0;           // interval ends
    double b = 0.0;
    bool grade_lo = true;     // interval: refine toward a
    bool grade_hi = true;     // interval: refine toward b

    static Geometry half_line(Side s, double L);
    static Geometry line(double L);
    static Geometry interval(double a, double b, bool grade_lo = true, bool grade_hi = true);

    double lo() const;
    double hi() const;
    std::string describe() const;
};

struct Mesh {
    Geometry geometry;
    std::vector<double> nodes;  // strictly increasing, including both ends
    int n_cells = 0;
    double grading_ratio = 0.0;
    double h_min = 0.0;
    double h_max = 0.0;

    std::vector<double> widths() const;
    double cell_ratio() const { return h_max / h_min; }
};

/// Geometric refinement toward the origin (half-line, line) or the flagged
/// interval ends: half of the cells on each side are graded with ratio r,
/// the remainder uniform.
Mesh build_mesh(const Geometry& g, int n_cells, double grading_ratio);

struct Truncation {
    double length = 0.0;
    double c_max = 0.0;
    bool capped = false;
};

/// Smallest L with L ≥ 6·sqrt(T·max_{|x|≤L} c), found by fixed-point iteration
/// and clamped to [min_length, max_length].
Truncation truncation_length(const Coefficient& c, double horizon, double min_length = 4.0,
                             double max_length = 1e4);

}  // namespace degen
