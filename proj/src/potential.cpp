#include "riemann/potential.hpp"
#include "riemann/quadrature.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace riemann {

namespace {

constexpr double kAbsTol = 1e-13;
constexpr double kRelTol = 1e-12;
// Cache is cleared when it grows beyond this; grid scans reuse thousands
// of identical integrals per point but never need unbounded history.
constexpr size_t kMaxCacheEntries = 1u << 21;

struct CacheKey {
    uint64_t a[3];
    int32_t p[3];
    int32_t n;
    bool operator==(const CacheKey& o) const
    {
        return std::memcmp(this, &o, sizeof(CacheKey)) == 0;
    }
};

struct CacheKeyHash {
    size_t operator()(const CacheKey& k) const
    {
        uint64_t h = 1469598103934665603ull;
        auto mix = [&h](uint64_t v) {
            h ^= v;
            h *= 1099511628211ull;
        };
        for (int i = 0; i < 3; ++i) {
            mix(k.a[i]);
            mix(static_cast<uint64_t>(k.p[i]));
        }
        mix(static_cast<uint64_t>(k.n));
        return static_cast<size_t>(h);
    }
};

std::mutex g_cache_mutex;
std::unordered_map<CacheKey, double, CacheKeyHash> g_cache;

uint64_t double_bits(double x)
{
    uint64_t u;
    std::memcpy(&u, &x, sizeof(u));
    return u;
}

/// Raw value of int_0^inf s^n prod (s+a_k^2)^(-p_k-1/2) ds, no 2*pi*g.
double raw_index_integral(const Vec3& a, const IntegralIndex& idx)
{
    const double a2[3] = {a[0] * a[0], a[1] * a[1], a[2] * a[2]};
    const auto integrand = [&](double t) {
        const double r = t / (1 - t);
        const double s = r * r;
        double f = 1;
        for (int k = 0; k < 3; ++k) {
            const double base = s + a2[k];
            double w = 1.0 / std::sqrt(base);
            for (int q = 0; q < idx.p[k]; ++q)
                w /= base;
            f *= w;
        }
        for (int q = 0; q < idx.n; ++q)
            f *= s;
        const double omt = 1 - t;
        return f * 2 * t / (omt * omt * omt);
    };
    return integrate_adaptive(integrand, 0.0, 1.0, kAbsTol, kRelTol);
}

double cached_raw_integral(const Vec3& a, const IntegralIndex& idx)
{
    CacheKey key;
    for (int i = 0; i < 3; ++i) {
        key.a[i] = double_bits(a[i]);
        key.p[i] = idx.p[i];
    }
    key.n = idx.n;
    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        auto it = g_cache.find(key);
        if (it != g_cache.end())
            return it->second;
    }
    const double value = raw_index_integral(a, idx);
    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        if (g_cache.size() >= kMaxCacheEntries)
            g_cache.clear();
        g_cache.emplace(key, value);
    }
    return value;
}

/// One term c * a^apow * F_{p,0}(a) of a derivative of V/(2*pi*g).
struct VTerm {
    double coef;
    std::array<int, 3> apow;
    std::array<int, 3> p;
};

using TermList = std::vector<VTerm>;

TermList differentiate(const TermList& terms, int i)
{
    std::map<std::pair<std::array<int, 3>, std::array<int, 3>>, double> acc;
    for (const VTerm& t : terms) {
        if (t.apow[i] > 0) {
            auto apow = t.apow;
            apow[i] -= 1;
            acc[{apow, t.p}] += t.coef * t.apow[i];
        }
        auto apow = t.apow;
        apow[i] += 1;
        auto p = t.p;
        p[i] += 1;
        acc[{apow, p}] -= t.coef * (2 * t.p[i] + 1);
    }
    TermList out;
    for (const auto& [key, coef] : acc)
        if (coef != 0)
            out.push_back(VTerm{coef, key.first, key.second});
    return out;
}

/// Term list of d^alpha [V/(2*pi*g)] for |alpha| <= 4, built once.
const TermList& derivative_terms(const std::array<int, 3>& alpha)
{
    static std::mutex mtx;
    static std::map<std::array<int, 3>, TermList> table;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = table.find(alpha);
    if (it != table.end())
        return it->second;
    TermList terms{VTerm{-1.0, {0, 0, 0}, {0, 0, 0}}};
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < alpha[i]; ++k)
            terms = differentiate(terms, i);
    return table.emplace(alpha, std::move(terms)).first->second;
}

double evaluate_terms(const TermList& terms, const Vec3& a, double g)
{
    double sum = 0;
    for (const VTerm& t : terms) {
        double mono = 1;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < t.apow[i]; ++k)
                mono *= a[i];
        sum += t.coef * mono * cached_raw_integral(a, IntegralIndex{t.p, 0});
    }
    return 2 * M_PI * g * sum;
}

} // namespace

double index_integral(const Vec3& a, const IntegralIndex& idx, double g)
{
    if (!(a[0] > 0) || !(a[1] > 0) || !(a[2] > 0))
        throw DomainError("index_integral: semiaxes must be positive");
    if (idx.p[0] < 0 || idx.p[1] < 0 || idx.p[2] < 0 || idx.n < 0)
        throw DomainError("index_integral: negative index");
    if (idx.n > idx.p[0] + idx.p[1] + idx.p[2])
        throw DomainError("index_integral: divergent member (n > p1+p2+p3)");
    return 2 * M_PI * g * cached_raw_integral(a, idx);
}

double cn(const Vec3& a, int n, double g)
{
    if (n < 0 || n > 2)
        throw DomainError("cn: n must be 0, 1 or 2");
    return index_integral(a, IntegralIndex{{1, 1, 1}, n}, g);
}

double potential_v_axes(const Vec3& a, double g)
{
    return -index_integral(a, IntegralIndex{{0, 0, 0}, 0}, g);
}

double potential_v(const SemiAxes& b, double g)
{
    require_shape_domain(b);
    return potential_v_axes(b.axes(), g);
}

double carlson_rf(double x, double y, double z)
{
    if (x < 0 || y < 0 || z < 0 || x + y == 0 || y + z == 0 || z + x == 0)
        throw DomainError("carlson_rf: arguments outside domain");
    for (int iter = 0; iter < 200; ++iter) {
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lam = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        const double mu = (x + y + z) / 3;
        const double e = std::max({std::abs(x - mu), std::abs(y - mu),
                                   std::abs(z - mu)}) /
                         mu;
        if (e < 1e-6) {
            const double X = 1 - x / mu, Y = 1 - y / mu, Z = -X - Y;
            const double e2 = X * Y - Z * Z, e3 = X * Y * Z;
            return (1 - e2 / 10 + e3 / 14) / std::sqrt(mu);
        }
    }
    throw DomainError("carlson_rf: no convergence");
}

double potential_v_elliptic(const SemiAxes& b, double g)
{
    require_shape_domain(b);
    const double b1 = b.b1, b2 = b.b2, b3 = b.b3();
    const double phi = std::acos(b3 / b1);
    const double k2 = (b1 * b1 - b2 * b2) / (b1 * b1 - b3 * b3);
    const double s = std::sin(phi), c = std::cos(phi);
    const double F = s * carlson_rf(c * c, 1 - k2 * s * s, 1.0);
    return -4 * M_PI * g / std::sqrt(b1 * b1 - b3 * b3) * F;
}

double PotentialDerivatives::d(int k1, int k2) const
{
    if (k1 < 0 || k2 < 0 || k1 + k2 > max_order_)
        throw DomainError("PotentialDerivatives: order out of range");
    return taylor_.derivative(k1, k2);
}

PotentialDerivatives potential_derivatives(const SemiAxes& b, int max_order,
                                           double g)
{
    require_shape_domain(b);
    if (max_order < 0 || max_order > 4)
        throw DomainError("potential_derivatives: max_order must be <= 4");
    const Vec3 a = b.axes();
    static const double fact[5] = {1, 1, 2, 6, 24};

    // Offsets of a as jets in (db1, db2); da3 carries the volume constraint.
    const Jet2 da1 = Jet2::variable(0.0, 0);
    const Jet2 da2 = Jet2::variable(0.0, 1);
    const Jet2 da3 =
        (Jet2::variable(b.b1, 0) * Jet2::variable(b.b2, 1)).reciprocal() -
        Jet2::constant(a[2]);

    Jet2 pow1[5], pow2[5], pow3[5];
    pow1[0] = pow2[0] = pow3[0] = Jet2::constant(1.0);
    for (int k = 1; k <= max_order; ++k) {
        pow1[k] = pow1[k - 1] * da1;
        pow2[k] = pow2[k - 1] * da2;
        pow3[k] = pow3[k - 1] * da3;
    }

    Jet2 result;
    for (int a1 = 0; a1 <= max_order; ++a1)
        for (int a2 = 0; a1 + a2 <= max_order; ++a2)
            for (int a3 = 0; a1 + a2 + a3 <= max_order; ++a3) {
                const std::array<int, 3> alpha{a1, a2, a3};
                const double dv = evaluate_terms(derivative_terms(alpha), a, g);
                const double c = dv / (fact[a1] * fact[a2] * fact[a3]);
                result = result + pow1[a1] * pow2[a2] * pow3[a3] * c;
            }
    return PotentialDerivatives(result, max_order);
}

void clear_integral_cache()
{
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    g_cache.clear();
}

} // namespace riemann
