#include "degen/evolve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "degen/error.hpp"

namespace degen {

const char* to_string(Scheme s) { return s == Scheme::backward_euler ? "backward_euler" : "crank_nicolson"; }

double Datum::operator()(double x) const {
    switch (kind) {
    case Kind::gaussian: return std::exp(-0.5 * (x - p1) * (x - p1) / (p2 * p2));
    case Kind::indicator: return (x >= p1 && x <= p2) ? 1.0 : 0.0;
    case Kind::constant: return p1;
    }
    return 0.0;
}

std::string Datum::describe() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::gaussian: os << "gaussian(" << p1 << ", " << p2 << ")"; break;
    case Kind::indicator: os << "indicator(" << p1 << ", " << p2 << ")"; break;
    case Kind::constant: os << "constant(" << p1 << ")"; break;
    }
    return os.str();
}

SnapshotMetrics measure(const DiscreteOperator& op, const std::vector<double>& phi) {
    SnapshotMetrics m;
    if (phi.empty()) return m;
    m.min_value = phi[0];
    double l2 = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        double w = op.a.w[i], v = phi[i], av = std::abs(v);
        m.min_value = std::min(m.min_value, v);
        m.sup_norm = std::max(m.sup_norm, av);
        m.l1_mass += w * av;
        m.integral += w * v;
        l2 += w * v * v;
        switch (op.region[i]) {
        case -1: m.mass_left += w * av; break;
        case 1: m.mass_right += w * av; break;
        default:
            m.mass_left += 0.5 * w * av;
            m.mass_right += 0.5 * w * av;
        }
    }
    m.l2_norm = std::sqrt(l2);
    return m;
}

void SemigroupTrace::write_csv(std::ostream& os) const {
    os.precision(17);
    os << "t,min,sup,l1,l2,mass_left,mass_right\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto& m = metrics[i];
        os << times[i] << ',' << m.min_value << ',' << m.sup_norm << ',' << m.l1_mass << ',' << m.l2_norm << ','
           << m.mass_left << ',' << m.mass_right << '\n';
    }
}

void SemigroupTrace::write_binary(std::ostream& os) const {
    static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");
    auto put = [&os](double v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); };
    put(static_cast<double>(x.size()));
    put(static_cast<double>(times.size()));
    for (double v : x) put(v);
    for (double v : times) put(v);
    for (const auto& s : snapshots)
        for (double v : s) put(v);
}

namespace {

double shift_for(double dt, Scheme scheme) { return scheme == Scheme::backward_euler ? 1.0 / dt : 2.0 / dt; }

ShiftedFactor factor_for(const DiscreteOperator& op, double dt, Scheme scheme) {
    ShiftedFactor f(op.a, shift_for(dt, scheme));
    if (!f.positive_definite()) {
        std::ostringstream os;
        os << "resolvent pole crossed: I + dt·H is not positive definite at dt = " << dt;
        throw Error(ErrorKind::resolvent_pole, os.str());
    }
    return f;
}

std::vector<double> advance(const DiscreteOperator& op, const ShiftedFactor& f, const std::vector<double>& phi,
                            double dt, Scheme scheme) {
    const double g = shift_for(dt, scheme);
    std::vector<double> rhs(phi.size());
    if (scheme == Scheme::backward_euler) {
        for (std::size_t i = 0; i < phi.size(); ++i) rhs[i] = g * op.a.w[i] * phi[i];
    } else {
        std::vector<double> ap = op.a.apply(phi);
        for (std::size_t i = 0; i < phi.size(); ++i) rhs[i] = g * op.a.w[i] * phi[i] - ap[i];
    }
    return f.solve(rhs);
}

double weighted(const std::vector<double>& coef, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += coef[i] * v[i];
    return s;
}

}  // namespace

std::vector<double> step(const DiscreteOperator& op, const std::vector<double>& phi, double dt, Scheme scheme) {
    if (!(dt > 0)) throw Error(ErrorKind::config, "time step must be positive");
    if (phi.size() != op.size()) throw Error(ErrorKind::domain, "vector size does not match the operator");
    return advance(op, factor_for(op, dt, scheme), phi, dt, scheme);
}

SemigroupTrace evolve(const DiscreteOperator& op, const std::vector<double>& phi0, double horizon, int n_steps,
                      Scheme scheme) {
    if (n_steps < 1) throw Error(ErrorKind::config, "need at least one time step");
    if (!(horizon > 0)) throw Error(ErrorKind::config, "horizon must be positive");
    if (phi0.size() != op.size()) throw Error(ErrorKind::domain, "vector size does not match the operator");
    const double dt = horizon / n_steps;
    ShiftedFactor f = factor_for(op, dt, scheme);

    SemigroupTrace tr;
    tr.scheme = scheme;
    tr.x = op.x;
    tr.times.push_back(0.0);
    tr.snapshots.push_back(phi0);
    tr.metrics.push_back(measure(op, phi0));
    tr.far_outflow.push_back(0.0);
    tr.sink_outflow.push_back(0.0);

    std::vector<double> phi = phi0;
    for (int n = 1; n <= n_steps; ++n) {
        std::vector<double> next = advance(op, f, phi, dt, scheme);
        double far, sink;
        if (scheme == Scheme::backward_euler) {
            far = dt * weighted(op.far_sink, next);
            sink = dt * weighted(op.a.s, next);
        } else {
            far = 0.5 * dt * (weighted(op.far_sink, next) + weighted(op.far_sink, phi));
            sink = 0.5 * dt * (weighted(op.a.s, next) + weighted(op.a.s, phi));
        }
        phi = std::move(next);
        tr.times.push_back(n == n_steps ? horizon : n * dt);
        tr.snapshots.push_back(phi);
        tr.metrics.push_back(measure(op, phi));
        tr.far_outflow.push_back(tr.far_outflow.back() + far);
        tr.sink_outflow.push_back(tr.sink_outflow.back() + sink);
    }
    return tr;
}

Conservation conservativeness(const SemigroupTrace& trace, double far_tol) {
    Conservation c;
    if (trace.metrics.empty()) return c;
    const double i0 = trace.metrics.front().integral;
    if (i0 == 0.0) throw Error(ErrorKind::domain, "initial datum has zero integral");
    for (const auto& m : trace.metrics) c.max_mass_drift = std::max(c.max_mass_drift, std::abs(m.integral - i0) / std::abs(i0));
    c.far_outflow = std::abs(trace.far_outflow.back()) / std::abs(i0);
    c.absorbed = std::abs(trace.sink_outflow.back()) / std::abs(i0);
    if (c.far_outflow > far_tol) {
        std::ostringstream os;
        os << "truncation too small: far boundaries carried " << c.far_outflow << " of the initial mass";
        throw Error(ErrorKind::indeterminate, os.str());
    }
    return c;
}

SubmarkovViolation submarkov_violation(const DiscreteOperator& op, int trials, std::uint64_t seed, double horizon,
                                       int n_steps, double tol) {
    SubmarkovViolation r;
    auto pairs = lowest_eigenpairs(op, 1);
    r.lambda1 = pairs.front().value;
    double dt = horizon / n_steps;
    if (r.lambda1 < 0) {
        double cap = 0.5 / std::abs(r.lambda1);
        if (dt > cap) n_steps = static_cast<int>(std::ceil(horizon / cap));
        dt = horizon / n_steps;
    }
    r.dt = dt;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> data;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> v(op.size());
        for (double& e : v) e = unit(rng);
        data.push_back(std::move(v));
    }
    data.emplace_back(op.size(), 1.0);

    for (const auto& d : data) {
        SemigroupTrace tr = evolve(op, d, horizon, n_steps, Scheme::backward_euler);
        const double sup0 = tr.metrics.front().sup_norm;
        for (const auto& m : tr.metrics) {
            ++r.snapshots;
            if (m.min_value < -tol * sup0) ++r.positivity_failures;
            r.sup_expansion = std::max(r.sup_expansion, m.sup_norm / sup0);
        }
    }
    return r;
}

}  // namespace degen
