#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ganlab/divergence.hpp"
#include "ganlab/losses.hpp"

// Convexity-region predicates for the saturating and non-saturating dual
// objective generators, together with analytic second derivatives and a
// numeric convexity scan used as their oracle.

namespace ganlab {

enum class RegionTag { r1, r2, r_ns, outside };

inline const char* to_string(RegionTag t) {
    switch (t) {
        case RegionTag::r1: return "R1";
        case RegionTag::r2: return "R2";
        case RegionTag::r_ns: return "R_NS";
        case RegionTag::outside: return "outside";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// predicates (strict inequalities; boundary points classify as outside)

inline bool in_region_sat(double alpha_d, double alpha_g) {
    if (!(alpha_d > 0.0) || !(alpha_g > 0.0))
        throw std::domain_error("in_region_sat: alphas must be positive");
    if (std::isinf(alpha_d)) return false;
    if (alpha_d <= 1.0) return alpha_g > alpha_d / (alpha_d + 1.0);
    return alpha_g > alpha_d / 2.0 && alpha_g <= alpha_d;
}

inline bool in_region_ns(double alpha_d, double alpha_g) {
    if (!(alpha_d > 0.0) || !(alpha_g > 0.0))
        throw std::domain_error("in_region_ns: alphas must be positive");
    if (std::isinf(alpha_d) && std::isinf(alpha_g)) return false;
    if (std::isinf(alpha_d)) return alpha_g < 1.0;
    if (std::isinf(alpha_g)) return alpha_d < 1.0;
    return alpha_d + alpha_g > alpha_d * alpha_g;
}

// Distance of (alpha_d, alpha_g) from the nearest predicate boundary, used to
// exclude near-boundary samples from predicate/oracle agreement scans.
inline double region_margin_sat(double alpha_d, double alpha_g) {
    if (std::isinf(alpha_d)) return 1.0;
    double m = kInf;
    const auto acc = [&m](double v) { m = std::min(m, std::abs(v)); };
    if (alpha_d <= 1.0) {
        acc(alpha_g - alpha_d / (alpha_d + 1.0));
        if (alpha_g > 1.0) acc(1.0 - alpha_d);
    } else {
        acc(alpha_g - alpha_d / 2.0);
        acc(alpha_d - alpha_g);
        if (alpha_g > 1.0) acc(alpha_d - 1.0);
    }
    return m;
}

inline double region_margin_ns(double alpha_d, double alpha_g) {
    if (std::isinf(alpha_d) && std::isinf(alpha_g)) return 1.0;
    if (std::isinf(alpha_d)) return std::abs(1.0 - alpha_g);
    if (std::isinf(alpha_g)) return std::abs(1.0 - alpha_d);
    return std::abs(alpha_d + alpha_g - alpha_d * alpha_g);
}

// ---------------------------------------------------------------------------
// analytic second derivatives

namespace detail {

// Signed sum of coeff_i * u^{expo_i}, scaled by exp(log_pre), evaluated fully
// in log space so large exponents cannot overflow intermediates.
inline double signed_power_sum(double log_pre, double log_u, const double* coeff,
                               const double* expo, int n) {
    double lmag[8];
    double sgn[8];
    int kept = 0;
    for (int i = 0; i < n; ++i) {
        if (coeff[i] == 0.0) continue;
        lmag[kept] = std::log(std::abs(coeff[i])) + expo[i] * log_u;
        sgn[kept] = coeff[i] > 0.0 ? 1.0 : -1.0;
        ++kept;
    }
    if (kept == 0) return 0.0;
    double mx = -kInf;
    for (int i = 0; i < kept; ++i) mx = std::max(mx, lmag[i]);
    double s = 0.0;
    for (int i = 0; i < kept; ++i) s += sgn[i] * std::exp(lmag[i] - mx);
    if (s == 0.0) return 0.0;
    const double mag = log_pre + mx + std::log(std::abs(s));
    const double v = std::exp(mag);
    return s > 0.0 ? v : -v;
}

}  // namespace detail

inline double second_deriv_sat(double u, double alpha_d, double alpha_g) {
    if (!(u > 0.0)) throw std::domain_error("second_deriv_sat: u must be positive");
    if (!(alpha_d > 0.0) || !(alpha_g > 0.0) || std::isinf(alpha_d) || std::isinf(alpha_g))
        throw std::domain_error("second_deriv_sat: alphas must be positive and finite");
    const double ad = alpha_d;
    const double ag = alpha_g;
    const double lu = std::log(u);
    const double log_pre = std::log(ad / ag) + (1.0 / ag - 3.0) * detail::softplus(ad * lu);
    const double c1 = ag + ad * ag - ad;
    const double c2 = ag * (1.0 - ad);
    const double coeff[4] = {c1, c1, c2, c2};
    const double expo[4] = {ad - ad / ag - 1.0, 2.0 * ad - 2.0, ad - 2.0,
                            2.0 * ad - ad / ag - 1.0};
    return detail::signed_power_sum(log_pre, lu, coeff, expo, 4);
}

inline double second_deriv_ns(double u, double alpha_d, double alpha_g) {
    if (!(u > 0.0)) throw std::domain_error("second_deriv_ns: u must be positive");
    if (!(alpha_d > 0.0) || !(alpha_g > 0.0) || std::isinf(alpha_d) || std::isinf(alpha_g))
        throw std::domain_error("second_deriv_ns: alphas must be positive and finite");
    const double ad = alpha_d;
    const double ag = alpha_g;
    const double lu = std::log(u);
    const double log_pre = std::log(ad / ag) + (ad - ad / ag - 2.0) * lu +
                           (1.0 / ag - 3.0) * detail::softplus(ad * lu);
    const double coeff[2] = {ag + ad - ad * ag, ag * (1.0 + ad)};
    const double expo[2] = {0.0, ad};
    return detail::signed_power_sum(log_pre, lu, coeff, expo, 2);
}

// Central second difference with a relative step, the numeric oracle for the
// analytic formulas above.
inline double numeric_second_diff(const std::function<double(double)>& f, double u,
                                  double rel_h = 5e-3) {
    const double h = rel_h * u;
    return (f(u + h) - 2.0 * f(u) + f(u - h)) / (h * h);
}

// ---------------------------------------------------------------------------
// convexity scan and verdicts

struct ConvexityScan {
    double min_f2 = kInf;
    double argmin_u = 1.0;
    bool convex = false;
};

// Minimizes f2 over a log grid on [u_lo, u_hi], then refines the winning
// bracket by golden-section in log space.
inline ConvexityScan convexity_scan(const std::function<double(double)>& f2, double u_lo,
                                    double u_hi, int grid_points = 401) {
    if (!(u_lo > 0.0) || !(u_hi > u_lo)) throw std::domain_error("convexity_scan: bad interval");
    if (grid_points < 3) throw std::domain_error("convexity_scan: need at least 3 grid points");
    const double llo = std::log(u_lo);
    const double lhi = std::log(u_hi);
    double best = kInf;
    int besti = 0;
    for (int i = 0; i < grid_points; ++i) {
        const double lu = llo + (lhi - llo) * i / (grid_points - 1);
        const double v = f2(std::exp(lu));
        if (v < best) {
            best = v;
            besti = i;
        }
    }
    const double step = (lhi - llo) / (grid_points - 1);
    double lo = llo + step * std::max(0, besti - 1);
    double hi = llo + step * std::min(grid_points - 1, besti + 1);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo);
    double d = lo + gr * (hi - lo);
    double fc = f2(std::exp(c));
    double fd = f2(std::exp(d));
    for (int it = 0; it < 120 && hi - lo > 1e-12; ++it) {
        if (fc > fd) {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = f2(std::exp(d));
        } else {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = f2(std::exp(c));
        }
    }
    ConvexityScan out;
    const double refined_u = std::exp(0.5 * (lo + hi));
    const double refined_v = f2(refined_u);
    if (refined_v < best) {
        out.argmin_u = refined_u;
        out.min_f2 = refined_v;
    } else {
        out.argmin_u = std::exp(llo + step * besti);
        out.min_f2 = best;
    }
    out.convex = out.min_f2 > 0.0;
    return out;
}

struct RegionWitness {
    double u = 0.0;
    double f2 = 0.0;
};

struct RegionVerdict {
    bool in_region = false;
    RegionTag tag = RegionTag::outside;
    std::optional<RegionWitness> witness;
};

namespace detail {

// Two-stage witness search. The moderate window catches interior dips; for
// parameters just outside the region the negative dip migrates toward u -> 0
// (or u -> inf) exponentially fast in the reciprocal boundary distance, so a
// second pass sweeps the whole representable range. Pairs whose dip lies
// beyond double range yield no witness.
inline std::optional<RegionWitness> witness_search(const std::function<double(double)>& f2) {
    const auto near = convexity_scan(f2, 1e-4, 1e4, 401);
    if (near.min_f2 < 0.0) return RegionWitness{near.argmin_u, near.min_f2};
    const auto wide = convexity_scan(f2, 1e-300, 1e300, 1201);
    if (wide.min_f2 < 0.0) return RegionWitness{wide.argmin_u, wide.min_f2};
    return std::nullopt;
}

}  // namespace detail

inline RegionVerdict verify_region_sat(double alpha_d, double alpha_g) {
    RegionVerdict v;
    v.in_region = in_region_sat(alpha_d, alpha_g);
    v.tag = v.in_region ? (alpha_d <= 1.0 ? RegionTag::r1 : RegionTag::r2) : RegionTag::outside;
    if (!v.in_region && std::isfinite(alpha_d) && std::isfinite(alpha_g)) {
        v.witness = detail::witness_search(
            [&](double u) { return second_deriv_sat(u, alpha_d, alpha_g); });
    }
    return v;
}

inline RegionVerdict verify_region_ns(double alpha_d, double alpha_g) {
    RegionVerdict v;
    v.in_region = in_region_ns(alpha_d, alpha_g);
    v.tag = v.in_region ? RegionTag::r_ns : RegionTag::outside;
    if (!v.in_region && std::isfinite(alpha_d) && std::isfinite(alpha_g)) {
        v.witness = detail::witness_search(
            [&](double u) { return second_deriv_ns(u, alpha_d, alpha_g); });
    }
    return v;
}

}  // namespace ganlab
