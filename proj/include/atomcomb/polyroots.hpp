#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "atomcomb/constants.hpp"
#include "atomcomb/errors.hpp"

namespace atomcomb {

using Complex = std::complex<double>;

namespace poly_detail {

/// Horner evaluation of p and p' together with Adams' running error bound
/// for the value (Comm. ACM 10, 1967, Eq. 8).
struct HornerEval {
    Complex p;
    Complex dp;
    double err;
};

inline HornerEval horner(std::span<const double> a, Complex z) {
    const std::size_t deg = a.size() - 1;
    Complex p(a[deg], 0.0);
    Complex dp(0.0, 0.0);
    const double az = std::abs(z);
    double err = std::abs(a[deg]);
    for (std::size_t i = deg; i-- > 0;) {
        dp = dp * z + p;
        p = p * z + a[i];
        err = az * err + std::abs(p);
    }
    return {p, dp, err};
}

/// Initial guesses from the upper convex hull of (j, log|a_j|): one radius
/// per hull segment, angles fanned out per segment. Handles coefficient
/// magnitudes spanning hundreds of decades, where a single mean radius
/// starts the iteration hopelessly far from the root clusters.
inline std::vector<Complex> initial_guesses(std::span<const double> a) {
    const std::size_t deg = a.size() - 1;
    struct Pt {
        double j;
        double l;
    };
    std::vector<Pt> pts;
    pts.reserve(a.size());
    for (std::size_t j = 0; j < a.size(); ++j)
        if (a[j] != 0.0) pts.push_back({static_cast<double>(j), std::log(std::abs(a[j]))});

    // Upper hull, left to right.
    std::vector<Pt> hull;
    for (const Pt& p : pts) {
        while (hull.size() >= 2) {
            const Pt& q = hull[hull.size() - 2];
            const Pt& r = hull[hull.size() - 1];
            if ((r.l - q.l) * (p.j - q.j) <= (p.l - q.l) * (r.j - q.j))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }

    std::vector<Complex> z;
    z.reserve(deg);
    for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
        const int n_seg = static_cast<int>(std::llround(hull[s + 1].j - hull[s].j));
        const double radius = std::exp((hull[s].l - hull[s + 1].l) / (hull[s + 1].j - hull[s].j));
        for (int i = 0; i < n_seg; ++i) {
            const double theta = kTwoPi * (i + 0.5) / n_seg + 0.539 * (s + 1);
            z.push_back(std::polar(radius, theta));
        }
    }
    while (z.size() < deg) z.push_back(std::polar(1.0, 0.539 * static_cast<double>(z.size())));
    z.resize(deg);
    return z;
}

}  // namespace poly_detail

struct PolyRootResult {
    std::vector<Complex> roots;
    std::vector<double> residuals;   // |P(z_k)| on the scaled polynomial
    int iterations = 0;
    bool converged = true;
    double max_residual = 0.0;
};

/// All complex roots of a real-coefficient polynomial (coefficients in
/// ascending order of degree) by the Ehrlich-Aberth simultaneous iteration.
/// Coefficients are normalized by max|a_j| first; exact zero roots and
/// trailing zero coefficients are factored out beforehand by the caller.
inline PolyRootResult find_polynomial_roots(std::span<const double> coeffs_ascending, int max_iterations = 600) {
    std::vector<double> a(coeffs_ascending.begin(), coeffs_ascending.end());
    while (!a.empty() && a.back() == 0.0) a.pop_back();
    if (a.size() < 2) throw DomainError("polynomial degree must be >= 1");

    PolyRootResult out;

    // Factor out roots at the origin.
    std::size_t zero_roots = 0;
    while (zero_roots + 1 < a.size() && a[zero_roots] == 0.0) ++zero_roots;
    if (zero_roots > 0) a.erase(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(zero_roots));
    for (std::size_t i = 0; i < zero_roots; ++i) out.roots.push_back(Complex(0.0, 0.0));

    const std::size_t deg = a.size() - 1;
    double amax = 0.0;
    for (double c : a) amax = std::max(amax, std::abs(c));
    for (double& c : a) c /= amax;

    if (deg == 1) {
        out.roots.push_back(Complex(-a[0] / a[1], 0.0));
    } else if (deg == 2) {
        const Complex disc = std::sqrt(Complex(a[1] * a[1] - 4.0 * a[2] * a[0], 0.0));
        const Complex q = (a[1] >= 0.0) ? -0.5 * (a[1] + disc) : -0.5 * (a[1] - disc);
        out.roots.push_back(q / a[2]);
        out.roots.push_back(q == 0.0 ? Complex(0.0, 0.0) : Complex(a[0], 0.0) / q);
    } else {
        std::vector<Complex> z = poly_detail::initial_guesses(a);
        std::vector<bool> locked(deg, false);
        const double eps = std::numeric_limits<double>::epsilon();
        int it = 0;
        for (; it < max_iterations; ++it) {
            bool all_locked = true;
            for (std::size_t k = 0; k < deg; ++k) {
                if (locked[k]) continue;
                const auto [p, dp, err] = poly_detail::horner(a, z[k]);
                if (std::abs(p) <= 4.0 * eps * err) {
                    locked[k] = true;
                    continue;
                }
                all_locked = false;
                Complex w;
                if (dp == Complex(0.0, 0.0)) {
                    // Stationary point: nudge off it.
                    z[k] += (std::abs(z[k]) + 1.0) * Complex(1e-4, 2e-4);
                    continue;
                }
                w = p / dp;
                Complex repulsion(0.0, 0.0);
                for (std::size_t j = 0; j < deg; ++j) {
                    if (j == k) continue;
                    Complex d = z[k] - z[j];
                    if (d == Complex(0.0, 0.0)) d = Complex(eps, eps);
                    repulsion += 1.0 / d;
                }
                const Complex denom = 1.0 - w * repulsion;
                const Complex delta = (denom == Complex(0.0, 0.0)) ? w : w / denom;
                z[k] -= delta;
                if (std::abs(delta) <= 4.0 * eps * (1.0 + std::abs(z[k]))) locked[k] = true;
            }
            if (all_locked) break;
        }
        out.iterations = it;
        out.converged = true;
        for (std::size_t k = 0; k < deg; ++k) {
            const auto [p, dp, err] = poly_detail::horner(a, z[k]);
            if (!(std::abs(p) <= 1e5 * eps * err)) out.converged = false;
        }
        out.roots.insert(out.roots.end(), z.begin(), z.end());
    }

    out.residuals.reserve(out.roots.size());
    for (const Complex& r : out.roots) {
        const double res = std::abs(poly_detail::horner(a, r).p) * amax;
        out.residuals.push_back(res);
        out.max_residual = std::max(out.max_residual, res);
    }
    return out;
}

/// Pairs near-conjugate roots of a real-coefficient polynomial and replaces
/// each pair by its exact conjugate average; isolated near-real roots get
/// their imaginary part cleared. Pairing tolerance is relative to 1 + |z|.
inline void symmetrize_conjugate_pairs(std::vector<Complex>& roots, double rel_tol = 1e-7) {
    const std::size_t n = roots.size();
    std::vector<bool> done(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        const double scale = 1.0 + std::abs(roots[i]);
        std::size_t best = n;
        double best_d = rel_tol * scale;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || done[j]) continue;
            const double d = std::abs(std::conj(roots[i]) - roots[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        if (best < n && std::abs(roots[i].imag()) > 0.25 * rel_tol * scale) {
            const Complex u = 0.5 * (roots[i] + std::conj(roots[best]));
            roots[i] = u;
            roots[best] = std::conj(u);
            done[i] = done[best] = true;
        } else if (std::abs(roots[i].imag()) <= rel_tol * scale) {
            roots[i] = Complex(roots[i].real(), 0.0);
            done[i] = true;
        }
    }
}

}  // namespace atomcomb
