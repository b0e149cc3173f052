#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace riemann {

/// Truncated bivariate Taylor polynomial of total degree <= 4 in the
/// offsets (db1, db2).  Arithmetic on jets turns every rational formula
/// in b into its Taylor expansion at the base point, which is how the
/// mass-matrix entries and the volume constraint b3 = 1/(b1*b2) are
/// differentiated exactly.
class Jet2 {
public:
    static constexpr int kDegree = 4;

    Jet2() { c_.fill(0); }

    static Jet2 constant(double v)
    {
        Jet2 j;
        j.at(0, 0) = v;
        return j;
    }

    /// var = base + db_i as a jet (i = 0 or 1).
    static Jet2 variable(double base, int i)
    {
        Jet2 j;
        j.at(0, 0) = base;
        if (i == 0)
            j.at(1, 0) = 1;
        else
            j.at(0, 1) = 1;
        return j;
    }

    double& at(int i, int j) { return c_[i * (kDegree + 1) + j]; }
    double at(int i, int j) const { return c_[i * (kDegree + 1) + j]; }

    /// Taylor coefficient of db1^i db2^j.
    double coeff(int i, int j) const { return at(i, j); }

    /// Partial derivative d^(i+j) f / db1^i db2^j at the base point.
    double derivative(int i, int j) const
    {
        static const double fact[5] = {1, 1, 2, 6, 24};
        return at(i, j) * fact[i] * fact[j];
    }

    double value() const { return at(0, 0); }

    Jet2 operator+(const Jet2& o) const
    {
        Jet2 r;
        for (size_t k = 0; k < c_.size(); ++k)
            r.c_[k] = c_[k] + o.c_[k];
        return r;
    }

    Jet2 operator-(const Jet2& o) const
    {
        Jet2 r;
        for (size_t k = 0; k < c_.size(); ++k)
            r.c_[k] = c_[k] - o.c_[k];
        return r;
    }

    Jet2 operator-() const
    {
        Jet2 r;
        for (size_t k = 0; k < c_.size(); ++k)
            r.c_[k] = -c_[k];
        return r;
    }

    Jet2 operator*(const Jet2& o) const
    {
        Jet2 r;
        for (int i = 0; i <= kDegree; ++i)
            for (int j = 0; i + j <= kDegree; ++j) {
                if (at(i, j) == 0)
                    continue;
                for (int k = 0; i + j + k <= kDegree; ++k)
                    for (int l = 0; i + j + k + l <= kDegree; ++l)
                        r.at(i + k, j + l) += at(i, j) * o.at(k, l);
            }
        return r;
    }

    Jet2 operator*(double s) const
    {
        Jet2 r;
        for (size_t k = 0; k < c_.size(); ++k)
            r.c_[k] = c_[k] * s;
        return r;
    }

    friend Jet2 operator*(double s, const Jet2& j) { return j * s; }

    Jet2 operator+(double s) const
    {
        Jet2 r = *this;
        r.at(0, 0) += s;
        return r;
    }

    Jet2 operator-(double s) const { return *this + (-s); }

    /// 1/f as a geometric series around the constant term.
    Jet2 reciprocal() const
    {
        const double c0 = value();
        if (c0 == 0)
            throw std::domain_error("Jet2::reciprocal of zero constant term");
        Jet2 u = *this * (1.0 / c0);
        u.at(0, 0) = 0;
        Jet2 r = constant(1.0);
        Jet2 upow = constant(1.0);
        double sign = -1;
        for (int k = 1; k <= kDegree; ++k, sign = -sign) {
            upow = upow * u;
            r = r + upow * sign;
        }
        return r * (1.0 / c0);
    }

    Jet2 operator/(const Jet2& o) const { return *this * o.reciprocal(); }

private:
    std::array<double, (kDegree + 1) * (kDegree + 1)> c_;
};

inline Jet2 square(const Jet2& j) { return j * j; }

} // namespace riemann
