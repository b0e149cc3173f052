#pragma once

#include "riemann/geometry.hpp"

#include <array>
#include <complex>
#include <map>
#include <set>
#include <string>

namespace riemann {

using cdouble = std::complex<double>;
using Exponents = std::array<int, 8>;
using ResonanceVec = std::array<int, 4>;

/// Raised by the homological solver (and the diagonalization stage) when
/// a frequency combination Omega.nu vanishes within tolerance.  Carries
/// the offending integer vector and its order |nu|.
class ResonanceError : public std::runtime_error {
public:
    ResonanceError(const ResonanceVec& nu_, int order_, double value_)
        : std::runtime_error("resonance of order " + std::to_string(order_)),
          nu(nu_), order(order_), value(value_) {}
    ResonanceVec nu;
    int order;
    double value;
};

/// Sparse multivariate polynomial in 8 variables with complex
/// coefficients, truncated at a total degree (default 4).  In the
/// complexified setting the variables are (W1..W4, Z1..Z4) in slots
/// 0..3 and 4..7; the same container holds real-coordinate expansions.
/// Exponents are packed 4 bits per variable into a single integer key,
/// which gives a canonical term order for deterministic output.
class TruncatedSeries {
public:
    explicit TruncatedSeries(int max_degree = 4);

    static uint32_t pack(const Exponents& e);
    static Exponents unpack(uint32_t key);
    static int degree_of(uint32_t key);

    int max_degree() const { return max_degree_; }
    size_t term_count() const { return coeffs_.size(); }
    bool empty() const { return coeffs_.empty(); }

    /// Adds v to the coefficient of the monomial with the given
    /// exponents; terms beyond the cutoff are discarded.
    void add_term(const Exponents& e, cdouble v);
    void set_term(const Exponents& e, cdouble v);
    cdouble coeff(const Exponents& e) const;

    const std::map<uint32_t, cdouble>& terms() const { return coeffs_; }

    /// Removes coefficients below 1e-14 * max|coeff|.
    void prune();

    double max_abs_coeff() const;

    TruncatedSeries operator+(const TruncatedSeries& o) const;
    TruncatedSeries operator-(const TruncatedSeries& o) const;
    TruncatedSeries operator*(const TruncatedSeries& o) const;
    TruncatedSeries operator*(cdouble s) const;
    TruncatedSeries operator*(double s) const { return *this * cdouble(s); }

    /// Homogeneous part of the given total degree.
    TruncatedSeries degree_part(int degree) const;

    /// Drops all terms of total degree below `min_degree`.
    TruncatedSeries truncate_below(int min_degree) const;

    TruncatedSeries derivative(int var) const;

    cdouble evaluate(const std::array<cdouble, 8>& point) const;

    /// Deterministic text form: sorted exponents, %.17g coefficients.
    std::string to_text() const;

private:
    int max_degree_;
    std::map<uint32_t, cdouble> coeffs_;
};

TruncatedSeries make_constant(cdouble v, int max_degree = 4);
TruncatedSeries make_variable(int var, int max_degree = 4);

/// Binomial square root of a series with positive real constant term;
/// (sqrt_series(f))^2 - f vanishes within the truncation order.
TruncatedSeries sqrt_series(const TruncatedSeries& f);

/// Poisson bracket in the convention {f,g} = df/dZ dg/dW - dg/dZ df/dW,
/// summed over the four canonical pairs (W_j, Z_j).
TruncatedSeries poisson_bracket(const TruncatedSeries& f,
                                const TruncatedSeries& g);

/// Terms with j - k = nu, where j and k are the W and Z exponents.
TruncatedSeries harmonic(const TruncatedSeries& f, const ResonanceVec& nu);
TruncatedSeries average(const TruncatedSeries& f);
std::set<ResonanceVec> spectrum(const TruncatedSeries& f);

int order_of(const ResonanceVec& nu);

/// Solves {H2, chi} = f - <f>_0 for H2 = sum_j i Omega_j Z_j W_j:
/// chi = sum_{nu != 0} <f>_nu / (i Omega.nu).  Throws ResonanceError when
/// |Omega.nu| <= res_tol for some nu in the spectrum.
TruncatedSeries homological_solve(const Vec4& Omega, const TruncatedSeries& f,
                                  double res_tol);

/// Substitutes var_i <- sum_j L(i,j) u_j.
TruncatedSeries compose_linear(const TruncatedSeries& f,
                               const Eigen::Matrix<cdouble, 8, 8>& L);

/// Max violation of the reality condition f_{kj} = conj(f_{jk}) i^(|j|+|k|)
/// satisfied by series representing real-valued functions.
double hermitian_residual(const TruncatedSeries& f);

} // namespace riemann
