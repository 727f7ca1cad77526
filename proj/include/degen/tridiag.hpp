#pragma once

#include <vector>

namespace degen {

/// Symmetric tridiagonal matrix in conductance form:
///   (Aφ)_i = k_{i−1}(φ_i − φ_{i−1}) + k_i(φ_i − φ_{i+1}) + s_i·φ_i,
/// paired with a diagonal mass W = diag(w).
struct Conductances {
    std::vector<double> k;  // n − 1 edge conductances
    std::vector<double> s;  // n diagonal shifts (absorption, Robin terms)
    std::vector<double> w;  // n mass weights, positive

    std::size_t size() const { return w.size(); }
    /// y = A·x
    std::vector<double> apply(const std::vector<double>& x) const;
};

/// LDLᵀ factorisation of A + γW.
///
/// Pivots are formed as d_i = k_i + g_i with the excess g_i obtained from
/// g_i = s_i + γw_i + k_{i−1}·g_{i−1}/(k_{i−1} + g_{i−1}); no large diagonal
/// entry is ever cancelled against an off-diagonal, so small eigenvalues of
/// strongly graded operators keep their relative accuracy.
class ShiftedFactor {
public:
    ShiftedFactor(const Conductances& a, double gamma);

    int negative_pivots() const { return negative_; }
    bool positive_definite() const { return negative_ == 0 && !singular_; }
    bool singular() const { return singular_; }
    const std::vector<double>& pivots() const { return d_; }

    /// Solves (A + γW)·x = rhs.
    std::vector<double> solve(const std::vector<double>& rhs) const;

private:
    std::vector<double> k_;
    std::vector<double> d_;
    int negative_ = 0;
    bool singular_ = false;
};

/// Number of generalized eigenvalues of (A, W) strictly below λ.
int count_below(const Conductances& a, double lambda);

struct Eigenpair {
    double value;
    std::vector<double> vector;  // normalised so that vᵀWv = 1
};

/// k smallest generalized eigenpairs by Sturm bisection and inverse iteration.
std::vector<Eigenpair> smallest_eigenpairs(const Conductances& a, int k);

}  // namespace degen
