#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "dper/core.hpp"

namespace dper {

/// Inputs of the one-dimensional covariance problem for a feature pair.
/// sigma11 and sigma22 must be positive; zero-variance pairs never get here.
template <std::floating_point Scalar>
struct CubicProblem {
    std::int64_t A = 0;
    Scalar s11 = 0;
    Scalar s12 = 0;
    Scalar s22 = 0;
    Scalar sigma11 = 1;
    Scalar sigma22 = 1;

    static CubicProblem from(const PairStats<Scalar>& st) {
        return {st.A, st.s11, st.s12, st.s22, st.sigma11, st.sigma22};
    }

    /// sqrt(sigma11 sigma22): sigma12 must lie strictly inside (-bound, bound).
    [[nodiscard]] Scalar bound() const { return std::sqrt(sigma11 * sigma22); }
};

template <std::floating_point Scalar>
struct RootSelection {
    Scalar chosen = 0;
    std::vector<RootCandidate<Scalar>> candidates;  ///< interior roots, ascending
    int real_roots = 0;
    Fallback fallback = Fallback::none;
    bool degenerate = false;
};

/// Profile log-likelihood of sigma12 with the additive constant dropped:
///   -(A/2) log(v) - (s22 - 2 (sigma12/sigma11) s12 + (sigma12/sigma11)^2 s11) / (2 v),
///   v = sigma22 - sigma12^2 / sigma11.
template <std::floating_point Scalar>
[[nodiscard]] Scalar eta(const CubicProblem<Scalar>& p, Scalar sigma12) {
    if (!(sigma12 * sigma12 < p.sigma11 * p.sigma22)) throw DomainError("sigma12 outside the open interval");
    const Scalar v = p.sigma22 - sigma12 * sigma12 / p.sigma11;
    if (!(v > 0)) throw DomainError("conditional variance is not positive");
    const Scalar beta = sigma12 / p.sigma11;
    const Scalar q = p.s22 - 2 * beta * p.s12 + beta * beta * p.s11;
    return -(static_cast<Scalar>(p.A) / 2) * std::log(v) - q / (2 * v);
}

/// Coefficients c0..c3 of the stationarity polynomial
///   c0 + c1 s + c2 s^2 + c3 s^3
/// whose real roots contain every stationary point of eta.
template <std::floating_point Scalar>
[[nodiscard]] std::array<Scalar, 4> stationarity_coefficients(const CubicProblem<Scalar>& p) {
    const Scalar a = static_cast<Scalar>(p.A);
    const Scalar v12 = p.sigma11 * p.sigma22;
    return {p.s12 * v12, v12 * a - p.s22 * p.sigma11 - p.s11 * p.sigma22, p.s12, -a};
}

template <std::floating_point Scalar>
[[nodiscard]] Scalar evaluate_polynomial(const std::array<Scalar, 4>& c, Scalar x) {
    return ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
}

namespace detail {

template <std::floating_point Scalar>
void newton_polish(const std::array<Scalar, 4>& c, Scalar& x, int iterations) {
    for (int it = 0; it < iterations; ++it) {
        const Scalar f = evaluate_polynomial(c, x);
        const Scalar df = (3 * c[3] * x + 2 * c[2]) * x + c[1];
        if (f == 0 || df == 0 || !std::isfinite(df)) return;
        const Scalar next = x - f / df;
        if (!std::isfinite(next)) return;
        if (std::abs(evaluate_polynomial(c, next)) <= std::abs(f)) x = next;
        else return;
    }
}

/// Real roots of c0 + c1 x + c2 x^2 (c2 != 0), via the cancellation-free form.
template <std::floating_point Scalar>
void quadratic_roots(Scalar c0, Scalar c1, Scalar c2, std::vector<Scalar>& out) {
    Scalar disc = c1 * c1 - 4 * c2 * c0;
    const Scalar scale = c1 * c1 + std::abs(4 * c2 * c0);
    if (disc < 0) {
        if (disc < -Scalar(64) * std::numeric_limits<Scalar>::epsilon() * scale) return;
        disc = 0;
    }
    const Scalar q = -(c1 + std::copysign(std::sqrt(disc), c1)) / 2;
    if (q == 0) {
        out.push_back(0);
        return;
    }
    out.push_back(q / c2);
    out.push_back(c0 / q);
}

/// Real roots of x^3 + b x^2 + c x + d.
template <std::floating_point Scalar>
void monic_cubic_roots(Scalar b, Scalar c, Scalar d, std::vector<Scalar>& out) {
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar Q = (b * b - 3 * c) / 9;
    const Scalar R = (2 * b * b * b - 9 * b * c + 27 * d) / 54;
    const Scalar Q3 = Q * Q * Q;
    const Scalar R2 = R * R;
    const Scalar shift = b / 3;
    const Scalar tol = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * std::max(R2, std::abs(Q3));
    if (Q > 0 && R2 <= Q3 + tol) {
        const Scalar sq = std::sqrt(Q);
        const Scalar theta = std::acos(std::clamp(R / (sq * sq * sq), Scalar(-1), Scalar(1)));
        out.push_back(-2 * sq * std::cos(theta / 3) - shift);
        out.push_back(-2 * sq * std::cos((theta + 2 * pi) / 3) - shift);
        out.push_back(-2 * sq * std::cos((theta - 2 * pi) / 3) - shift);
        return;
    }
    const Scalar big = -std::copysign(std::cbrt(std::abs(R) + std::sqrt(std::max(Scalar(0), R2 - Q3))), R);
    const Scalar small = big == 0 ? Scalar(0) : Q / big;
    out.push_back(big + small - shift);
}

}  // namespace detail

/// All real roots of c0 + c1 x + c2 x^2 + c3 x^3, ascending. Leading zero
/// coefficients lower the degree; a cubic or quadratic is solved in closed
/// form on coefficients scaled by max|c|, then each root gets two Newton steps.
/// Throws DegenerateObjective when every coefficient is zero.
template <std::floating_point Scalar>
[[nodiscard]] std::vector<Scalar> polynomial_roots(const std::array<Scalar, 4>& coeffs) {
    Scalar scale = 0;
    for (Scalar c : coeffs) scale = std::max(scale, std::abs(c));
    if (scale == 0) throw DegenerateObjective();
    std::array<Scalar, 4> c{};
    for (std::size_t k = 0; k < 4; ++k) c[k] = coeffs[k] / scale;

    std::vector<Scalar> roots;
    if (c[3] != 0) {
        detail::monic_cubic_roots(c[2] / c[3], c[1] / c[3], c[0] / c[3], roots);
    } else if (c[2] != 0) {
        detail::quadratic_roots(c[0], c[1], c[2], roots);
    } else if (c[1] != 0) {
        roots.push_back(-c[0] / c[1]);
    }
    for (Scalar& r : roots) detail::newton_polish(c, r, 2);
    std::sort(roots.begin(), roots.end());
    return roots;
}

/// Real roots of the stationarity polynomial of `p`, ascending. With A = 0
/// the cubic term vanishes and the quadratic branch applies.
template <std::floating_point Scalar>
[[nodiscard]] std::vector<Scalar> cubic_roots(const CubicProblem<Scalar>& p) {
    return polynomial_roots(stationarity_coefficients(p));
}

/// Picks sigma12: the eta-maximising interior root. Roots whose eta agrees
/// within 1e-9 relative are broken towards `case_deletion`. With no interior
/// root, or a flat objective, falls back to `case_deletion` (pulled to
/// 0.999 * bound when it lies beyond the bound), or to 0 when there is no
/// case-deletion value.
template <std::floating_point Scalar>
[[nodiscard]] RootSelection<Scalar> select_sigma12(const CubicProblem<Scalar>& p,
                                                   std::optional<Scalar> case_deletion) {
    constexpr Scalar kTieTolerance = Scalar(1e-9);
    RootSelection<Scalar> sel;
    std::vector<Scalar> roots;
    try {
        roots = cubic_roots(p);
    } catch (const DegenerateObjective&) {
        sel.degenerate = true;
    }
    sel.real_roots = static_cast<int>(roots.size());

    const Scalar limit = p.sigma11 * p.sigma22;
    for (Scalar r : roots) {
        if (!(r * r < limit)) continue;
        if (!(p.sigma22 - r * r / p.sigma11 > 0)) continue;
        sel.candidates.push_back({r, eta(p, r)});
    }

    if (sel.candidates.empty()) {
        if (case_deletion && std::isfinite(*case_deletion)) {
            // A perfectly collinear pair puts the estimate exactly on the
            // bound; only values beyond it are pulled inside.
            const Scalar bound = p.bound();
            const Scalar cap = Scalar(0.999) * bound;
            const Scalar slack = bound * 64 * std::numeric_limits<Scalar>::epsilon();
            if (std::abs(*case_deletion) <= bound + slack)
                sel.chosen = std::clamp(*case_deletion, -bound, bound);
            else
                sel.chosen = std::clamp(*case_deletion, -cap, cap);
            sel.fallback = Fallback::case_deletion;
        } else {
            sel.chosen = 0;
            sel.fallback = Fallback::zero;
        }
        return sel;
    }

    const RootCandidate<Scalar>* best = &sel.candidates.front();
    for (const auto& cand : sel.candidates) {
        const Scalar tol = kTieTolerance * std::max(std::abs(cand.eta), std::abs(best->eta));
        if (std::abs(cand.eta - best->eta) <= tol) {
            if (case_deletion &&
                std::abs(cand.sigma12 - *case_deletion) < std::abs(best->sigma12 - *case_deletion))
                best = &cand;
        } else if (cand.eta > best->eta) {
            best = &cand;
        }
    }
    sel.chosen = best->sigma12;
    return sel;
}

}  // namespace dper
