#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace riemann {

/// Thrown when adaptive refinement cannot reach the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1,1],
/// generated by Newton iteration on the Legendre recurrence.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

namespace detail {

template <typename F>
double gauss_segment(const F& f, double a, double b, const GaussRule& rule)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double sum = 0;
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(c + h * rule.nodes[i]);
    return h * sum;
}

} // namespace detail

/// Globally adaptive quadrature of f over [a,b].  Each segment's error is
/// estimated by comparing the 10-point Gauss value against the sum over
/// its halves; the worst segment is bisected until
/// sum(err) <= max(abs_tol, rel_tol*|value|).
template <typename F>
double integrate_adaptive(const F& f, double a, double b,
                          double abs_tol = 1e-13, double rel_tol = 1e-12,
                          int max_segments = 4000)
{
    const GaussRule& rule = gauss_legendre(10);

    struct Segment {
        double a, b;
        double value;  // sum over the two halves
        double error;
    };

    auto make_segment = [&](double lo, double hi) {
        const double whole = detail::gauss_segment(f, lo, hi, rule);
        const double mid = 0.5 * (lo + hi);
        const double halves = detail::gauss_segment(f, lo, mid, rule) +
                              detail::gauss_segment(f, mid, hi, rule);
        return Segment{lo, hi, halves, std::abs(whole - halves)};
    };

    std::vector<Segment> segs{make_segment(a, b)};
    while (true) {
        double total = 0, err = 0;
        size_t worst = 0;
        for (size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].value;
            err += segs[i].error;
            if (segs[i].error > segs[worst].error)
                worst = i;
        }
        const double goal = std::max(abs_tol, rel_tol * std::abs(total));
        if (err <= goal)
            return total;
        if ((int)segs.size() >= max_segments)
            throw QuadratureError(
                "adaptive quadrature stalled at error " + std::to_string(err) +
                    " (requested " + std::to_string(goal) + ")",
                err);
        const Segment s = segs[worst];
        const double mid = 0.5 * (s.a + s.b);
        segs[worst] = make_segment(s.a, mid);
        segs.push_back(make_segment(mid, s.b));
    }
}

} // namespace riemann
