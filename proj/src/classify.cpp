#include "riemann/classify.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace riemann {

const char* to_string(StabilityTag tag)
{
    switch (tag) {
    case StabilityTag::NotElliptic: return "NotElliptic";
    case StabilityTag::Resonant: return "Resonant";
    case StabilityTag::Convex: return "Convex";
    case StabilityTag::QuasiConvex: return "QuasiConvex";
    case StabilityTag::DirectionallyQuasiConvex:
        return "DirectionallyQuasiConvex";
    case StabilityTag::Indeterminate: return "Indeterminate";
    }
    return "?";
}

std::vector<std::pair<double, double>> nekhoroshev_exponents(StabilityTag tag)
{
    switch (tag) {
    case StabilityTag::Convex:
    case StabilityTag::QuasiConvex:
        return {{0.25, 0.25}, {1.0, 1.0 / 16.0}};
    case StabilityTag::DirectionallyQuasiConvex:
        return {{0.25, 0.25}};
    default:
        return {};
    }
}

Vec3 asymptotic_cone_vector(double a1, double a2abs, double a3abs,
                            double theta, int sign)
{
    const double c = std::cos(theta), s = std::sin(theta);
    const double x1 = std::sqrt(a2abs / (a1 + a2abs) * c * c +
                                a3abs / (a1 + a3abs) * s * s);
    return Vec3(sign * x1, std::sqrt(a1 / (a1 + a2abs)) * c,
                std::sqrt(a1 / (a1 + a3abs)) * s);
}

namespace {

/// Orthogonal 4x4 matrix whose first row is Omega/|Omega| (Householder
/// reflection; the determinant sign is irrelevant for the subspace).
Mat4 omega_frame(const Vec4& Omega)
{
    const Vec4 n = Omega / Omega.norm();
    Vec4 v = n - Vec4::Unit(0);
    const double vv = v.squaredNorm();
    if (vv < 1e-24)
        return Mat4::Identity();
    return Mat4::Identity() - (2.0 / vv) * (v * v.transpose());
}

} // namespace

bool kam_check(const NormalFormReport& nf, double tol)
{
    if (!nf.constructed)
        throw DomainError("kam_check requires a constructed normal form");
    Eigen::SelfAdjointEigenSolver<Mat4> es(nf.A);
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    if (scale == 0)
        return false;
    return std::abs(nf.A.determinant()) > tol * std::pow(scale, 4);
}

StabilityClass classify_with_frequencies(const Mat4& A, const Vec4& freq,
                                         double tol, int n_theta)
{
    StabilityClass out;
    Eigen::SelfAdjointEigenSolver<Mat4> esA(A);
    const Vec4 alpha = esA.eigenvalues();
    const double scaleA = alpha.cwiseAbs().maxCoeff();
    if (scaleA == 0) {
        out.diagnostic = "A vanishes";
        return out;
    }
    const bool all_pos = (alpha.array() > tol * scaleA).all();
    const bool all_neg = (alpha.array() < -tol * scaleA).all();
    if (all_pos || all_neg) {
        out.tag = StabilityTag::Convex;
        out.nekhoroshev_exponents = nekhoroshev_exponents(out.tag);
        return out;
    }

    const Mat4 R = omega_frame(freq);
    const Mat4 rotated = R * A * R.transpose();
    const Mat3 At = rotated.bottomRightCorner<3, 3>();
    Eigen::SelfAdjointEigenSolver<Mat3> esT(At);
    Vec3 beta = esT.eigenvalues();
    Mat3 vecs = esT.eigenvectors();
    const double scaleT = beta.cwiseAbs().maxCoeff();
    if (scaleT == 0 || (beta.cwiseAbs().array() <= tol * scaleT).any()) {
        out.diagnostic = "degenerate restriction to the Omega-orthogonal "
                         "subspace";
        return out;
    }
    if ((beta.array() > 0).all() || (beta.array() < 0).all()) {
        out.tag = StabilityTag::QuasiConvex;
        out.nekhoroshev_exponents = nekhoroshev_exponents(out.tag);
        return out;
    }

    // Directional test on the asymptotic cone.  Orient the restriction
    // so that exactly one eigenvalue is positive.
    int npos = (beta.array() > 0).count();
    Vec3 b = beta;
    if (npos == 2)
        b = -beta;
    // Order: positive eigenvalue first.
    int ipos = 0;
    for (int i = 0; i < 3; ++i)
        if (b[i] > 0)
            ipos = i;
    const int in1 = ipos == 0 ? 1 : 0;
    const int in2 = ipos == 2 ? 1 : 2;
    const double a1 = b[ipos], a2 = std::abs(b[in1]), a3 = std::abs(b[in2]);
    Mat3 S;
    S.col(0) = vecs.col(ipos);
    S.col(1) = vecs.col(in1);
    S.col(2) = vecs.col(in2);

    for (int k = 0; k < n_theta; ++k) {
        const double theta = 2 * M_PI * k / (n_theta - 1);
        const Vec3 xhat = asymptotic_cone_vector(a1, a2, a3, theta, +1);
        const Vec3 ihat = S * xhat;
        Vec4 I4;
        I4 << 0, ihat;
        I4 = R.transpose() * I4;
        const double thr = 1e-10 * I4.cwiseAbs().maxCoeff();
        const bool has_pos = (I4.array() > thr).any();
        const bool has_neg = (I4.array() < -thr).any();
        if (!(has_pos && has_neg)) {
            out.tag = StabilityTag::Indeterminate;
            out.diagnostic =
                "asymptotic vector inside the first 16-ant at theta=" +
                std::to_string(theta);
            return out;
        }
    }
    out.tag = StabilityTag::DirectionallyQuasiConvex;
    out.nekhoroshev_exponents = nekhoroshev_exponents(out.tag);
    return out;
}

StabilityClass classify_normal_form(const NormalFormReport& nf, double tol,
                                    int n_theta)
{
    if (!nf.constructed) {
        StabilityClass out;
        out.tag = StabilityTag::Resonant;
        out.resonance_order = 5;
        for (const auto& hit : nf.resonances_hit)
            out.resonance_order = std::min(out.resonance_order, hit.order);
        out.diagnostic = "normal form not constructed";
        return out;
    }
    StabilityClass out = classify_with_frequencies(nf.A, nf.freq.omega, tol,
                                                   n_theta);
    out.kam_nondegenerate = kam_check(nf);
    return out;
}

} // namespace riemann
