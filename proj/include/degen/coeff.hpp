#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "degen/pchip.hpp"

namespace degen {

enum class Side { left = -1, right = 1 };

inline double sign_of(Side s) { return s == Side::left ? -1.0 : 1.0; }
const char* to_string(Side s);

/// c(x) = amplitude_right·(x−origin)^exponent_right right of the origin,
/// amplitude_left·|x−origin|^exponent_left left of it.
struct PowerLaw {
    double amplitude_left = 1.0;
    double exponent_left = 0.0;
    double amplitude_right = 1.0;
    double exponent_right = 0.0;
    double origin = 0.0;
};

/// Sum of coeffs[k]·x^k.
struct Polynomial {
    std::vector<double> coeffs;
};

struct Piece {
    double lo;
    double hi;
    std::variant<Polynomial, PowerLaw> model;
};

struct Domain {
    enum class Kind { line, half_line, interval };

    Kind kind = Kind::line;
    Side side = Side::right;  // half-line only
    double a = 0.0;           // interval only
    double b = 0.0;

    static Domain line() { return {}; }
    static Domain half_line(Side s) { return {Kind::half_line, s, 0.0, 0.0}; }
    static Domain interval(double a, double b) { return {Kind::interval, Side::right, a, b}; }

    double lo() const;
    double hi() const;
    bool contains(double x) const { return x >= lo() && x <= hi(); }
    std::string describe() const;
};

struct ZeroSet {
    std::vector<double> points;
    std::vector<std::pair<double, double>> plateaus;

    bool empty() const { return points.empty() && plateaus.empty(); }
};

/// Recorded derivative jump at a continuous joint between pieces.
struct Joint {
    double x;
    double slope_left;
    double slope_right;
};

/// Leading behaviour c(x0 ± t) ≈ amplitude·t^exponent as t ↓ 0.
struct LocalPower {
    double exponent;
    double amplitude;
};

/// Immutable coefficient model; all queries are pure.
class Coefficient {
public:
    enum class Model { power_law, piecewise, tabulated };

    static Coefficient power_law(const PowerLaw& p, Domain domain = Domain::line());
    static Coefficient piecewise(std::vector<Piece> pieces, Domain domain);
    /// Domain is the table's span.
    static Coefficient tabulated(std::vector<double> x, std::vector<double> c);

    double eval(double x) const;
    /// c(x0 + side·t), with t resolved exactly when x0 is a zero of a polynomial piece.
    double eval_local(double x0, Side side, double t) const;
    double derivative(double x) const;
    ZeroSet zero_set(double tol) const;

    /// Exact leading power at x0 from one side when the model exposes it
    /// (power laws, polynomial pieces). Tabulated models return nothing.
    std::optional<LocalPower> local_power(double x0, Side side) const;

    /// Exact growth exponent as x → ±∞, when the model reaches infinity.
    std::optional<double> far_exponent(Side side) const;

    Coefficient scaled(double lambda) const;

    Model model() const;
    const Domain& domain() const { return domain_; }
    const std::vector<Joint>& joints() const { return joints_; }
    const PowerLaw* as_power_law() const { return std::get_if<PowerLaw>(&model_); }
    const MonotoneCubic* as_table() const { return std::get_if<MonotoneCubic>(&model_); }
    const std::vector<Piece>* as_pieces() const { return std::get_if<std::vector<Piece>>(&model_); }
    std::string describe() const;

private:
    using ModelData = std::variant<PowerLaw, std::vector<Piece>, MonotoneCubic>;
    Coefficient(ModelData m, Domain d) : model_(std::move(m)), domain_(d) {}

    /// Taylor coefficients of a polynomial piece about one of its zeros.
    struct RootModel {
        std::size_t piece;
        double z;
        std::vector<double> taylor;
    };

    void check_domain(double x) const;
    const RootModel* nearest_root(std::size_t piece, double x) const;

    ModelData model_;
    Domain domain_;
    std::vector<Joint> joints_;
    std::vector<RootModel> roots_;
};

inline double eval(const Coefficient& c, double x) { return c.eval(x); }
inline double eval_derivative(const Coefficient& c, double x) { return c.derivative(x); }
inline ZeroSet zero_set(const Coefficient& c, double tol) { return c.zero_set(tol); }

}  // namespace degen
