#include "riemann/families.hpp"
#include "riemann/potential.hpp"
#include "riemann/reduced.hpp"

#include <cmath>

namespace riemann {

namespace {

constexpr double kRadicandSlack = 1e-12;

double clip_radicand(double v)
{
    if (v >= 0)
        return v;
    if (v >= -kRadicandSlack)
        return 0;
    throw DomainError("negative radicand in momentum formula: " +
                      std::to_string(v));
}

} // namespace

const char* to_string(EllipsoidType t)
{
    switch (t) {
    case EllipsoidType::S2: return "S2";
    case EllipsoidType::S3: return "S3";
    case EllipsoidType::I: return "I";
    case EllipsoidType::II: return "II";
    case EllipsoidType::III: return "III";
    }
    return "?";
}

EllipsoidType ellipsoid_type_from_string(const std::string& s)
{
    if (s == "S2") return EllipsoidType::S2;
    if (s == "S3") return EllipsoidType::S3;
    if (s == "I") return EllipsoidType::I;
    if (s == "II") return EllipsoidType::II;
    if (s == "III") return EllipsoidType::III;
    throw DomainError("unknown ellipsoid type: " + s);
}

double gs_plus(double x, double y, double z, double g)
{
    const Vec3 a(x, y, z);
    const double c1 = cn(a, 1, g), c2 = cn(a, 2, g);
    const double d = x - z;
    const double pre = d * d * d * d / (x * z);
    return pre * ((x * y * y * z + (x * x * y * y - x * x * z * z + y * y * z * z)) * c1 +
                  (x * z + y * y) * c2);
}

double gs_minus(double x, double y, double z, double g)
{
    const Vec3 a(x, y, z);
    const double c1 = cn(a, 1, g), c2 = cn(a, 2, g);
    const double d = x + z;
    const double pre = d * d * d * d / (x * z);
    return pre * ((x * y * y * z - (x * x * y * y - x * x * z * z + y * y * z * z)) * c1 +
                  (x * z - y * y) * c2);
}

double gtilde(double x, double y, double z, double g)
{
    const Vec3 a(x, y, z);
    const double c1 = cn(a, 1, g), c2 = cn(a, 2, g);
    return x * x * (y * y - z * z) * c1 +
           (y * y - 4 * z * z) * (z * z * c1 + c2);
}

double dfun(double x, double y, double z)
{
    return x * x * (y * y - z * z) + z * z * (4 * z * z - y * y);
}

double gr_plus(double x, double y, double z, double g)
{
    const double d = y - z;
    const double quart = d * d * d * d;
    return quart * (x * x - (y + 2 * z) * (y + 2 * z)) *
           (x * x - z * z) / (x * x - y * y) *
           gtilde(x, y, z, g) / dfun(x, y, z);
}

double gr_minus(double x, double y, double z, double g)
{
    const double d = y + z;
    const double quart = d * d * d * d;
    return quart * (x * x - (y - 2 * z) * (y - 2 * z)) *
           (x * x - z * z) / (x * x - y * y) *
           gtilde(x, y, z, g) / dfun(x, y, z);
}

double ns_pm(double x, double y, double z, int sign, double g)
{
    const double gp = clip_radicand(gs_plus(x, y, z, g));
    const double gm = clip_radicand(gs_minus(x, y, z, g));
    return 0.5 * (std::sqrt(gp) + sign * std::sqrt(gm));
}

double nr_pm(double x, double y, double z, int sign, double g)
{
    const double gp = clip_radicand(gr_plus(x, y, z, g));
    const double gm = clip_radicand(gr_minus(x, y, z, g));
    return 0.5 * (std::sqrt(gp) + sign * std::sqrt(gm));
}

bool region_contains(EllipsoidType type, const SemiAxes& b, double g)
{
    if (!shape_domain_contains(b))
        return false;
    const double b1 = b.b1, b2 = b.b2, b3 = b.b3();
    switch (type) {
    case EllipsoidType::S2:
        return gs_minus(b1, b2, b3, g) >= 0;
    case EllipsoidType::S3:
        return gs_plus(b1, b3, b2, g) >= 0;
    case EllipsoidType::I:
        return b1 <= 2 * b2 - b3;
    case EllipsoidType::II:
        return b1 >= 2 * b2 + b3 && dfun(b1, b3, b2) < 0;
    case EllipsoidType::III:
        return b1 >= b2 + 2 * b3 && gtilde(b1, b2, b3, g) > 0;
    }
    return false;
}

MomentumPair momenta(EllipsoidType type, const SemiAxes& b, Branch branch,
                     double g)
{
    if (!region_contains(type, b, g))
        throw DomainError("semiaxes outside the existence region of type " +
                          std::string(to_string(type)));
    const double b1 = b.b1, b2 = b.b2, b3 = b.b3();
    Vec3 mp = Vec3::Zero(), mm = Vec3::Zero();
    switch (type) {
    case EllipsoidType::S2:
        mp[1] = ns_pm(b1, b2, b3, +1, g);
        mm[1] = ns_pm(b1, b2, b3, -1, g);
        break;
    case EllipsoidType::S3:
        mp[2] = ns_pm(b1, b3, b2, +1, g);
        mm[2] = ns_pm(b1, b3, b2, -1, g);
        break;
    case EllipsoidType::I:
        mp[0] = nr_pm(b1, b3, b2, +1, g);
        mp[2] = nr_pm(b3, b1, b2, +1, g);
        mm[0] = nr_pm(b1, b3, b2, -1, g);
        mm[2] = nr_pm(b3, b1, b2, -1, g);
        break;
    case EllipsoidType::II:
        mp[0] = nr_pm(b1, b3, b2, +1, g);
        mp[2] = nr_pm(b3, b1, b2, -1, g);
        mm[0] = nr_pm(b1, b3, b2, -1, g);
        mm[2] = nr_pm(b3, b1, b2, +1, g);
        break;
    case EllipsoidType::III:
        mp[0] = nr_pm(b1, b2, b3, +1, g);
        mp[1] = nr_pm(b2, b1, b3, -1, g);
        mm[0] = nr_pm(b1, b2, b3, -1, g);
        mm[1] = nr_pm(b2, b1, b3, +1, g);
        break;
    }
    if (branch == Branch::PlusMinus)
        return MomentumPair{mp, mm};
    return MomentumPair{mm, mp};
}

EquilibriumPoint make_equilibrium(EllipsoidType type, const SemiAxes& b,
                                  Branch branch, double g)
{
    EquilibriumPoint e;
    e.b = b;
    e.type = type;
    e.branch = branch;
    e.M = momenta(type, b, branch, g);
    e.c = Vec2::Zero();
    e.g = g;
    return e;
}

CriticalPointResidual critical_point_residual(const EquilibriumPoint& e,
                                              double fd_step)
{
    CriticalPointResidual r;

    const double h = fd_step;
    Vec2 grad;
    for (int i = 0; i < 2; ++i) {
        SemiAxes bp = e.b, bm = e.b;
        (i == 0 ? bp.b1 : bp.b2) += h;
        (i == 0 ? bm.b1 : bm.b2) -= h;
        grad[i] = (hamiltonian_tilde(bp, e.M, e.g) -
                   hamiltonian_tilde(bm, e.M, e.g)) /
                  (2 * h);
    }
    r.grad_b_norm = grad.norm();

    const MassMatrices mm = mass_matrices(e.b);
    const Vec3 gl = mm.J1.asDiagonal() * e.M.m_l + mm.J2.asDiagonal() * e.M.m_r;
    const Vec3 gr = mm.J2.asDiagonal() * e.M.m_l + mm.J1.asDiagonal() * e.M.m_r;
    Vec6 torque;
    torque << e.M.m_l.cross(gl), e.M.m_r.cross(gr);
    r.torque_norm = torque.norm();
    return r;
}

double zero_pressure(const SemiAxes& b, double g)
{
    const Vec3 a = b.axes();
    return dfun(b.b1, b.b3(), b.b2) * cn(a, 0, g) +
           6 * b.b2 * b.b2 * cn(a, 1, g) + 3 * cn(a, 2, g);
}

Parallelism classify_parallelism(const EquilibriumPoint& e)
{
    if (e.type != EllipsoidType::S2 && e.type != EllipsoidType::S3)
        return Parallelism::Planar;
    const double nl = e.M.m_l.norm(), nr = e.M.m_r.norm();
    const double scale = std::max(nl, nr);
    if (std::min(nl, nr) <= 1e-10 * std::max(1.0, scale))
        return Parallelism::Irrotational;
    const double dot = e.M.m_l.dot(e.M.m_r);
    return dot > 0 ? Parallelism::Coparallel : Parallelism::Counterparallel;
}

} // namespace riemann
