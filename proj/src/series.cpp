#include "riemann/series.hpp"

#include <cmath>
#include <cstdio>

namespace riemann {

namespace {

constexpr double kPruneRel = 1e-14;

void require_compatible(const TruncatedSeries& a, const TruncatedSeries& b)
{
    if (a.max_degree() != b.max_degree())
        throw DomainError("series max_degree mismatch");
}

} // namespace

TruncatedSeries::TruncatedSeries(int max_degree) : max_degree_(max_degree)
{
    if (max_degree < 0 || max_degree > 8)
        throw DomainError("series max_degree must be in 0..8");
}

uint32_t TruncatedSeries::pack(const Exponents& e)
{
    uint32_t key = 0;
    for (int i = 0; i < 8; ++i) {
        if (e[i] < 0 || e[i] > 15)
            throw DomainError("series exponent out of range");
        key |= static_cast<uint32_t>(e[i]) << (4 * i);
    }
    return key;
}

Exponents TruncatedSeries::unpack(uint32_t key)
{
    Exponents e;
    for (int i = 0; i < 8; ++i)
        e[i] = (key >> (4 * i)) & 0xF;
    return e;
}

int TruncatedSeries::degree_of(uint32_t key)
{
    int d = 0;
    for (int i = 0; i < 8; ++i)
        d += (key >> (4 * i)) & 0xF;
    return d;
}

void TruncatedSeries::add_term(const Exponents& e, cdouble v)
{
    const uint32_t key = pack(e);
    if (degree_of(key) > max_degree_)
        return;
    auto [it, inserted] = coeffs_.emplace(key, v);
    if (!inserted)
        it->second += v;
    if (it->second == cdouble(0))
        coeffs_.erase(it);
}

void TruncatedSeries::set_term(const Exponents& e, cdouble v)
{
    const uint32_t key = pack(e);
    if (degree_of(key) > max_degree_)
        return;
    if (v == cdouble(0))
        coeffs_.erase(key);
    else
        coeffs_[key] = v;
}

cdouble TruncatedSeries::coeff(const Exponents& e) const
{
    auto it = coeffs_.find(pack(e));
    return it == coeffs_.end() ? cdouble(0) : it->second;
}

double TruncatedSeries::max_abs_coeff() const
{
    double m = 0;
    for (const auto& [k, v] : coeffs_)
        m = std::max(m, std::abs(v));
    return m;
}

void TruncatedSeries::prune()
{
    const double thr = kPruneRel * max_abs_coeff();
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        if (std::abs(it->second) <= thr)
            it = coeffs_.erase(it);
        else
            ++it;
    }
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& o) const
{
    require_compatible(*this, o);
    TruncatedSeries r = *this;
    for (const auto& [k, v] : o.coeffs_) {
        auto [it, inserted] = r.coeffs_.emplace(k, v);
        if (!inserted)
            it->second += v;
    }
    r.prune();
    return r;
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& o) const
{
    return *this + o * cdouble(-1);
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& o) const
{
    require_compatible(*this, o);
    TruncatedSeries r(max_degree_);
    for (const auto& [ka, va] : coeffs_) {
        const int da = degree_of(ka);
        for (const auto& [kb, vb] : o.coeffs_) {
            if (da + degree_of(kb) > max_degree_)
                continue;
            // Exponents in every slot stay <= 15 because degrees are
            // capped at 8, so plain key addition is carry-free.
            const uint32_t key = ka + kb;
            auto [it, inserted] = r.coeffs_.emplace(key, va * vb);
            if (!inserted)
                it->second += va * vb;
        }
    }
    r.prune();
    return r;
}

TruncatedSeries TruncatedSeries::operator*(cdouble s) const
{
    TruncatedSeries r(max_degree_);
    if (s == cdouble(0))
        return r;
    for (const auto& [k, v] : coeffs_)
        r.coeffs_[k] = v * s;
    return r;
}

TruncatedSeries TruncatedSeries::degree_part(int degree) const
{
    TruncatedSeries r(max_degree_);
    for (const auto& [k, v] : coeffs_)
        if (degree_of(k) == degree)
            r.coeffs_[k] = v;
    return r;
}

TruncatedSeries TruncatedSeries::truncate_below(int min_degree) const
{
    TruncatedSeries r(max_degree_);
    for (const auto& [k, v] : coeffs_)
        if (degree_of(k) >= min_degree)
            r.coeffs_[k] = v;
    return r;
}

TruncatedSeries TruncatedSeries::derivative(int var) const
{
    if (var < 0 || var > 7)
        throw DomainError("series derivative: variable index out of range");
    TruncatedSeries r(max_degree_);
    for (const auto& [k, v] : coeffs_) {
        const int e = (k >> (4 * var)) & 0xF;
        if (e == 0)
            continue;
        const uint32_t key = k - (1u << (4 * var));
        r.coeffs_[key] += v * double(e);
    }
    return r;
}

cdouble TruncatedSeries::evaluate(const std::array<cdouble, 8>& point) const
{
    cdouble sum = 0;
    for (const auto& [k, v] : coeffs_) {
        cdouble mono = v;
        for (int i = 0; i < 8; ++i) {
            const int e = (k >> (4 * i)) & 0xF;
            for (int q = 0; q < e; ++q)
                mono *= point[i];
        }
        sum += mono;
    }
    return sum;
}

std::string TruncatedSeries::to_text() const
{
    std::string out = "max_degree=" + std::to_string(max_degree_) +
                      " terms=" + std::to_string(coeffs_.size()) + "\n";
    char buf[128];
    for (const auto& [k, v] : coeffs_) {
        const Exponents e = unpack(k);
        for (int i = 0; i < 8; ++i) {
            std::snprintf(buf, sizeof buf, "%d ", e[i]);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.real(), v.imag());
        out += buf;
    }
    return out;
}

TruncatedSeries make_constant(cdouble v, int max_degree)
{
    TruncatedSeries s(max_degree);
    s.add_term(Exponents{0, 0, 0, 0, 0, 0, 0, 0}, v);
    return s;
}

TruncatedSeries make_variable(int var, int max_degree)
{
    TruncatedSeries s(max_degree);
    Exponents e{0, 0, 0, 0, 0, 0, 0, 0};
    e[var] = 1;
    s.add_term(e, 1.0);
    return s;
}

TruncatedSeries sqrt_series(const TruncatedSeries& f)
{
    const cdouble c0 = f.coeff(Exponents{0, 0, 0, 0, 0, 0, 0, 0});
    if (!(c0.real() > 0) || std::abs(c0.imag()) > 1e-13 * std::abs(c0))
        throw DomainError("sqrt_series requires a positive real constant term");
    // f = c0 (1 + u); sqrt(f) = sqrt(c0) sum binom(1/2,k) u^k.
    TruncatedSeries u = f * (1.0 / c0);
    Exponents zero{0, 0, 0, 0, 0, 0, 0, 0};
    u.add_term(zero, -1.0);
    TruncatedSeries r = make_constant(1.0, f.max_degree());
    TruncatedSeries upow = make_constant(1.0, f.max_degree());
    double binom = 1.0;
    for (int k = 1; k <= f.max_degree(); ++k) {
        binom *= (0.5 - (k - 1)) / k;
        upow = upow * u;
        r = r + upow * binom;
    }
    return r * std::sqrt(c0);
}

TruncatedSeries poisson_bracket(const TruncatedSeries& f,
                                const TruncatedSeries& g)
{
    require_compatible(f, g);
    TruncatedSeries r(f.max_degree());
    for (int j = 0; j < 4; ++j) {
        const int w = j, z = 4 + j;
        r = r + f.derivative(z) * g.derivative(w) -
            g.derivative(z) * f.derivative(w);
    }
    r.prune();
    return r;
}

namespace {

ResonanceVec nu_of_key(uint32_t k)
{
    ResonanceVec nu;
    for (int j = 0; j < 4; ++j) {
        const int ew = (k >> (4 * j)) & 0xF;
        const int ez = (k >> (4 * (4 + j))) & 0xF;
        nu[j] = ew - ez;
    }
    return nu;
}

} // namespace

TruncatedSeries harmonic(const TruncatedSeries& f, const ResonanceVec& nu)
{
    TruncatedSeries r(f.max_degree());
    for (const auto& [k, v] : f.terms())
        if (nu_of_key(k) == nu)
            r.add_term(TruncatedSeries::unpack(k), v);
    return r;
}

TruncatedSeries average(const TruncatedSeries& f)
{
    return harmonic(f, ResonanceVec{0, 0, 0, 0});
}

std::set<ResonanceVec> spectrum(const TruncatedSeries& f)
{
    std::set<ResonanceVec> sp;
    for (const auto& [k, v] : f.terms()) {
        (void)v;
        sp.insert(nu_of_key(k));
    }
    return sp;
}

int order_of(const ResonanceVec& nu)
{
    return std::abs(nu[0]) + std::abs(nu[1]) + std::abs(nu[2]) +
           std::abs(nu[3]);
}

TruncatedSeries homological_solve(const Vec4& Omega, const TruncatedSeries& f,
                                  double res_tol)
{
    TruncatedSeries chi(f.max_degree());
    for (const auto& [k, v] : f.terms()) {
        const ResonanceVec nu = nu_of_key(k);
        if (nu == ResonanceVec{0, 0, 0, 0})
            continue;
        const double dot =
            Omega[0] * nu[0] + Omega[1] * nu[1] + Omega[2] * nu[2] +
            Omega[3] * nu[3];
        if (std::abs(dot) <= res_tol)
            throw ResonanceError(nu, order_of(nu), std::abs(dot));
        chi.add_term(TruncatedSeries::unpack(k), v / cdouble(0, dot));
    }
    chi.prune();
    return chi;
}

TruncatedSeries compose_linear(const TruncatedSeries& f,
                               const Eigen::Matrix<cdouble, 8, 8>& L)
{
    const int deg = f.max_degree();
    // Substituted images of the variables and their powers.
    TruncatedSeries pow[8][9];
    for (int i = 0; i < 8; ++i) {
        TruncatedSeries lin(deg);
        for (int j = 0; j < 8; ++j) {
            if (L(i, j) == cdouble(0))
                continue;
            Exponents e{0, 0, 0, 0, 0, 0, 0, 0};
            e[j] = 1;
            lin.add_term(e, L(i, j));
        }
        pow[i][0] = make_constant(1.0, deg);
        for (int k = 1; k <= deg; ++k)
            pow[i][k] = pow[i][k - 1] * lin;
    }
    TruncatedSeries r(deg);
    for (const auto& [k, v] : f.terms()) {
        const Exponents e = TruncatedSeries::unpack(k);
        TruncatedSeries term = make_constant(v, deg);
        for (int i = 0; i < 8; ++i)
            if (e[i] > 0)
                term = term * pow[i][e[i]];
        r = r + term;
    }
    r.prune();
    return r;
}

double hermitian_residual(const TruncatedSeries& f)
{
    const cdouble ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    double res = 0;
    for (const auto& [k, v] : f.terms()) {
        const Exponents e = TruncatedSeries::unpack(k);
        Exponents swapped;
        for (int j = 0; j < 4; ++j) {
            swapped[j] = e[4 + j];
            swapped[4 + j] = e[j];
        }
        const int d = TruncatedSeries::degree_of(k);
        const cdouble expected = std::conj(v) * ipow[d % 4];
        res = std::max(res, std::abs(f.coeff(swapped) - expected));
    }
    return res;
}

} // namespace riemann
