#include "degen/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "degen/error.hpp"

namespace degen {

namespace {

// Cell widths for a segment of length len, graded toward the flagged ends.
// `floor` keeps widths resolvable next to a non-zero end point.
std::vector<double> segment(double len, int n, double r, bool grade_start, bool grade_end, double floor_start,
                            double floor_end) {
    int ends = static_cast<int>(grade_start) + static_cast<int>(grade_end);
    int n_g = ends == 0 ? 0 : n / (2 * ends);
    int n_u = n - ends * n_g;
    std::vector<double> rel_start(static_cast<std::size_t>(grade_start ? n_g : 0));
    std::vector<double> rel_end(static_cast<std::size_t>(grade_end ? n_g : 0));
    for (std::size_t j = 0; j < rel_start.size(); ++j) rel_start[j] = std::pow(r, static_cast<double>(j + 1));
    for (std::size_t j = 0; j < rel_end.size(); ++j) rel_end[j] = std::pow(r, static_cast<double>(j + 1));

    double h = len / (n_u + 0.0);
    for (int it = 0; it < 100; ++it) {
        double total = n_u;
        for (double q : rel_start) total += std::max(q, floor_start / h);
        for (double q : rel_end) total += std::max(q, floor_end / h);
        double next = len / total;
        if (std::abs(next - h) <= 1e-15 * h) {
            h = next;
            break;
        }
        h = next;
    }
    double smallest = h * std::pow(r, static_cast<double>(n_g));
    if (n_g > 0 && smallest < 1e-300) throw Error(ErrorKind::config, "grading underflow");

    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(n));
    for (auto it = rel_start.rbegin(); it != rel_start.rend(); ++it) w.push_back(std::max(h * *it, floor_start));
    for (int k = 0; k < n_u; ++k) w.push_back(h);
    for (double q : rel_end) w.push_back(std::max(h * q, floor_end));
    return w;
}

void append_nodes(std::vector<double>& nodes, double start, double end, const std::vector<double>& w) {
    // Accumulate from whichever end sits closer to zero so tiny cells keep their precision.
    const std::size_t n = w.size();
    std::vector<double> x(n + 1);
    if (std::abs(start) <= std::abs(end)) {
        x[0] = start;
        for (std::size_t i = 0; i < n; ++i) x[i + 1] = x[i] + w[i];
        x[n] = end;
    } else {
        x[n] = end;
        for (std::size_t i = n; i-- > 0;) x[i] = x[i + 1] - w[i];
        x[0] = start;
    }
    std::size_t from = nodes.empty() ? 0 : 1;
    for (std::size_t i = from; i <= n; ++i) nodes.push_back(x[i]);
}

}  // namespace

Geometry Geometry::half_line(Side s, double L) {
    Geometry g;
    g.kind = Kind::half_line;
    g.side = s;
    g.length = L;
    return g;
}

Geometry Geometry::line(double L) {
    Geometry g;
    g.kind = Kind::line;
    g.length = L;
    return g;
}

Geometry Geometry::interval(double a, double b, bool grade_lo, bool grade_hi) {
    Geometry g;
    g.kind = Kind::interval;
    g.a = a;
    g.b = b;
    g.grade_lo = grade_lo;
    g.grade_hi = grade_hi;
    return g;
}

double Geometry::lo() const {
    switch (kind) {
    case Kind::half_line: return side == Side::right ? 0.0 : -length;
    case Kind::line: return -length;
    case Kind::interval: return a;
    }
    return 0.0;
}

double Geometry::hi() const {
    switch (kind) {
    case Kind::half_line: return side == Side::right ? length : 0.0;
    case Kind::line: return length;
    case Kind::interval: return b;
    }
    return 0.0;
}

std::string Geometry::describe() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::half_line: os << "half_line(" << to_string(side) << ", L=" << length << ")"; break;
    case Kind::line: os << "line(L=" << length << ")"; break;
    case Kind::interval: os << "interval(" << a << ", " << b << ")"; break;
    }
    return os.str();
}

std::vector<double> Mesh::widths() const {
    std::vector<double> w(nodes.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) w[i] = nodes[i + 1] - nodes[i];
    return w;
}

Mesh build_mesh(const Geometry& g, int n_cells, double ratio) {
    if (n_cells < 8) throw Error(ErrorKind::config, "mesh needs at least 8 cells");
    if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorKind::config, "grading ratio must lie in (0, 1)");
    if (!(g.hi() > g.lo())) throw Error(ErrorKind::config, "geometry has empty extent; set the truncation length");
    const double eps = std::numeric_limits<double>::epsilon();
    Mesh m;
    m.geometry = g;
    m.n_cells = n_cells;
    m.grading_ratio = ratio;
    switch (g.kind) {
    case Geometry::Kind::half_line: {
        bool right = g.side == Side::right;
        auto w = segment(g.length, n_cells, ratio, right, !right, 0.0, 0.0);
        append_nodes(m.nodes, g.lo(), g.hi(), w);
        break;
    }
    case Geometry::Kind::line: {
        int half = n_cells / 2;
        auto wl = segment(g.length, n_cells - half, ratio, false, true, 0.0, 0.0);
        auto wr = segment(g.length, half, ratio, true, false, 0.0, 0.0);
        // Mirror the right side so the node set is symmetric about 0 when the halves match.
        if (n_cells % 2 == 0) {
            wl.assign(wr.rbegin(), wr.rend());
        }
        append_nodes(m.nodes, -g.length, 0.0, wl);
        append_nodes(m.nodes, 0.0, g.length, wr);
        break;
    }
    case Geometry::Kind::interval: {
        double fa = 1e3 * eps * std::abs(g.a), fb = 1e3 * eps * std::abs(g.b);
        auto w = segment(g.b - g.a, n_cells, ratio, g.grade_lo, g.grade_hi, fa, fb);
        append_nodes(m.nodes, g.a, g.b, w);
        break;
    }
    }
    auto w = m.widths();
    m.h_min = *std::min_element(w.begin(), w.end());
    m.h_max = *std::max_element(w.begin(), w.end());
    for (std::size_t i = 0; i + 1 < m.nodes.size(); ++i)
        if (!(m.nodes[i + 1] > m.nodes[i])) throw Error(ErrorKind::config, "mesh nodes not strictly increasing");
    return m;
}

Truncation truncation_length(const Coefficient& c, double horizon, double min_length, double max_length) {
    Truncation t;
    auto c_max = [&](double L) {
        double m = 0.0;
        for (int k = 0; k <= 400; ++k) {
            double s = L * k / 400.0;
            for (double x : {s, -s})
                if (c.domain().contains(x)) m = std::max(m, c.eval(x));
        }
        return m;
    };
    double L = min_length;
    for (int it = 0; it < 200; ++it) {
        double need = 6.0 * std::sqrt(horizon * c_max(L));
        if (need <= L * (1.0 + 1e-12)) break;
        L = need;
        if (L >= max_length) {
            L = max_length;
            t.capped = true;
            break;
        }
    }
    t.length = L;
    t.c_max = c_max(L);
    return t;
}

}  // namespace degen
