// f-generators and numerical f-divergences.
//
// Families: f_alpha (and its pointwise-symmetric representative), f_tilde and
// its convex conjugate with the link s(t) and output activation g, the
// dual-objective saturating and non-saturating generators f_sat / f_ns, and the
// general dual-CPE construction. Divergences are adaptive-quadrature integrals
// of q(x) f(p(x)/q(x)) with explicit limit handling where either density
// vanishes.
//
// Every generator is evaluated through log-space forms (softplus / log1p /
// expm1) so density ratios up to ~1e280 neither overflow nor lose the leading
// digits; beyond that the integrand switches to the exact singular-part limit
// p * lim f(u)/u.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "density.hpp"
#include "losses.hpp"
#include "quadrature.hpp"

namespace ganlab {

namespace detail {

inline double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline constexpr double kLog2 = 0.693147180559945309417232121458176568;

}  // namespace detail

// ---------------------------------------------------------------------------
// single-alpha generators

// f_alpha(u) = (a/(a-1)) ((1+u^a)^(1/a) - (1+u) - 2^(1/a) + 2), branches at 1, inf
inline double f_alpha(double u, double alpha) {
    if (!(u >= 0.0)) throw std::domain_error("f_alpha: u must be >= 0");
    if (!(alpha > 0.0)) throw std::domain_error("f_alpha: alpha must be in (0,inf]");
    if (u == 1.0) return 0.0;
    if (alpha == kInf) return u > 1.0 ? 0.0 : 1.0 - u;
    if (alpha == 1.0) {
        if (u == 0.0) return 2.0 * detail::kLog2;
        return u * std::log(u) - (1.0 + u) * std::log1p(u) + 2.0 * detail::kLog2;
    }
    const double k = alpha / (alpha - 1.0);
    const double two_pow = std::exp2(1.0 / alpha);
    if (u == 0.0) return k * (2.0 - two_pow);
    if (u <= 1.0)
        return k * (std::expm1(std::log1p(std::pow(u, alpha)) / alpha) - u + 2.0 - two_pow);
    return k * (u * std::expm1(std::log1p(std::pow(u, -alpha)) / alpha) + 1.0 - two_pow);
}

// pointwise-symmetric representative of the same divergence:
//   (a/(a-1)) ((1+u^a)^(1/a) - 2^(1/a-1) (1+u));  u f(1/u) = f(u) exactly
inline double f_alpha_symmetric(double u, double alpha) {
    if (!(u >= 0.0)) throw std::domain_error("f_alpha_symmetric: u must be >= 0");
    if (!(alpha > 0.0)) throw std::domain_error("f_alpha_symmetric: alpha must be in (0,inf]");
    if (u == 1.0) return 0.0;
    if (alpha == kInf) return 0.5 * std::abs(1.0 - u);
    if (alpha == 1.0) {
        if (u == 0.0) return detail::kLog2;
        return u * std::log(u) - (1.0 + u) * std::log1p(u) + (1.0 + u) * detail::kLog2;
    }
    const double k = alpha / (alpha - 1.0);
    const double half_two_pow = std::exp2(1.0 / alpha - 1.0);
    if (u == 0.0) return k * (1.0 - half_two_pow);
    const double root = u <= 1.0 ? std::exp(std::log1p(std::pow(u, alpha)) / alpha)
                                 : u * std::exp(std::log1p(std::pow(u, -alpha)) / alpha);
    return k * (root - half_two_pow * (1.0 + u));
}

// f_tilde_alpha(u) = (a/(a-1)) ((1+u^a)^(1/a) - (1+u)); not normalized at u=1
inline double f_tilde_alpha(double u, double alpha) {
    if (!(u >= 0.0)) throw std::domain_error("f_tilde_alpha: u must be >= 0");
    if (!(alpha > 0.0)) throw std::domain_error("f_tilde_alpha: alpha must be in (0,inf]");
    if (alpha == kInf) return u > 1.0 ? -1.0 : -u;
    if (alpha == 1.0) {
        if (u == 0.0) return 0.0;
        return u * std::log(u) - (1.0 + u) * std::log1p(u);
    }
    const double k = alpha / (alpha - 1.0);
    if (u == 0.0) return 0.0;
    if (u <= 1.0) return k * (std::expm1(std::log1p(std::pow(u, alpha)) / alpha) - u);
    return k * (u * std::expm1(std::log1p(std::pow(u, -alpha)) / alpha) - 1.0);
}

// s(t) = (1 + ((a-1)/a) t)^(a/(a-1)); the link of the conjugate pair.
// Domain: t in [-a/(a-1), 0] for a > 1, t <= 0 for a <= 1 (a=1: s = e^t).
inline double s_link(double t, double alpha) {
    if (!(alpha > 0.0)) throw std::domain_error("s_link: alpha must be in (0,inf]");
    constexpr double slack = 1e-10;
    if (t > slack) throw std::domain_error("s_link: t outside domain (t > 0)");
    t = std::min(t, 0.0);
    if (alpha == 1.0) return std::exp(t);
    if (alpha == kInf) {
        if (t < -1.0 - slack) throw std::domain_error("s_link: t outside domain");
        return std::max(0.0, 1.0 + t);
    }
    const double c = (alpha - 1.0) / alpha;
    double base = 1.0 + c * t;
    if (alpha > 1.0) {
        if (base < -slack) throw std::domain_error("s_link: t outside domain (t < -a/(a-1))");
        base = std::max(base, 0.0);
    }
    return std::pow(base, alpha / (alpha - 1.0));
}

// conjugate of f_tilde: (a/(a-1)) (1 - (1-s(t))^((a-1)/a)), same domain as s_link
inline double f_tilde_conjugate(double t, double alpha) {
    if (!(alpha > 0.0)) throw std::domain_error("f_tilde_conjugate: alpha must be in (0,inf]");
    if (alpha == 1.0) {
        if (t > 1e-10) throw std::domain_error("f_tilde_conjugate: t outside domain");
        t = std::min(t, 0.0);
        if (t == 0.0) return kInf;
        return -std::log(-std::expm1(t));
    }
    if (alpha == kInf) {
        if (t > 1e-10 || t < -1.0 - 1e-10)
            throw std::domain_error("f_tilde_conjugate: t outside domain");
        return 1.0 + std::clamp(t, -1.0, 0.0);
    }
    const double k = alpha / (alpha - 1.0);
    (void)s_link(t, alpha);  // domain vetting, throws outside dom
    t = std::min(t, 0.0);
    if (alpha > 1.0) t = std::max(t, -k);
    // 1 - s(t) through expm1 so precision survives t near 0
    const double one_minus_s = std::max(0.0, -std::expm1(k * std::log1p(t / k)));
    if (one_minus_s == 0.0) return alpha > 1.0 ? k : kInf;
    return -k * std::expm1((1.0 - 1.0 / alpha) * std::log(one_minus_s));
}

// output activation g(v) = (a/(a-1)) ((1+e^-v)^(-(a-1)/a) - 1) on extended reals;
// a = 1 branch is -log(1+e^-v). Saturates to 0 as v -> +inf.
inline double g_f_alpha(double v, double alpha) {
    if (!(alpha > 0.0)) throw std::domain_error("g_f_alpha: alpha must be in (0,inf]");
    if (alpha == 1.0) {
        if (v >= 0.0) return -std::log1p(std::exp(-v));
        return v - std::log1p(std::exp(v));
    }
    const double e = (alpha == kInf) ? 1.0 : (alpha - 1.0) / alpha;
    const double k = (alpha == kInf) ? 1.0 : alpha / (alpha - 1.0);
    const double sp = detail::softplus(-v);  // = -log sigmoid(v)
    return k * std::expm1(-e * sp);
}

// k(v) = s(g(v)); strictly increasing from 0 to 1 (and equal to sigmoid(v))
inline double k_map(double v, double alpha) {
    return s_link(g_f_alpha(v, alpha), alpha);
}

// ---------------------------------------------------------------------------
// dual-objective generators

// f_sat(u) = (aG/(aG-1)) ((u^(aD(1-1/aG)+1) + 1) / (u^aD+1)^(1-1/aG) - 2^(1/aG))
// evaluated as K (u P^b + (1-P)^b - 2^(1/aG)) with P = sigmoid(aD log u),
// b = 1 - 1/aG. aG = 1 is the divergence-equivalent log form
//   aD u log u - (u+1) log(u^aD + 1) + 2 log 2
// (the (u-1)-affine part that diverges in the limit integrates to zero).
inline double f_sat(double u, double alpha_d, double alpha_g) {
    if (!(u >= 0.0)) throw std::domain_error("f_sat: u must be >= 0");
    if (!(alpha_d > 0.0) || !(alpha_g > 0.0))
        throw std::domain_error("f_sat: alphas must be in (0,inf]");
    if (u == 1.0) return 0.0;

    if (alpha_g == 1.0) {
        if (u == 0.0) return 2.0 * detail::kLog2;
        if (alpha_d == kInf) return -kInf;  // u log P with P in {0,1}
        const double au = alpha_d * std::log(u);
        return alpha_d * u * std::log(u) - (u + 1.0) * detail::softplus(au) +
               2.0 * detail::kLog2;
    }

    const double b = alpha_g == kInf ? 1.0 : 1.0 - 1.0 / alpha_g;
    const double kg = alpha_g == kInf ? 1.0 : alpha_g / (alpha_g - 1.0);
    const double two_pow = std::exp2(alpha_g == kInf ? 0.0 : 1.0 / alpha_g);

    if (u == 0.0) {
        const double expnt = 1.0 + alpha_d * b;  // sign decides lim u^(1+aD b)
        const double t1 = expnt > 0.0 ? 0.0 : (expnt == 0.0 ? 1.0 : kInf);
        return kg * (t1 + 1.0 - two_pow);
    }
    const double au = alpha_d == kInf ? (u > 1.0 ? kInf : -kInf) : alpha_d * std::log(u);
    const double log_p = -detail::softplus(-au);    // log P
    const double log_1mp = -detail::softplus(au);   // log (1-P)
    const double t1 = std::exp(std::log(u) + b * log_p);
    const double t2 = std::exp(b * log_1mp);
    return kg * (t1 + t2 - two_pow);
}

// f_ns(u) = (aG/(aG-1)) (2^(1/aG-1) - P^(1-1/aG)), P as above; aG = 1 gives
// log((u^aD + 1)/(2 u^aD)) exactly (finite limit, no affine adjustment).
inline double f_ns(double u, double alpha_d, double alpha_g) {
    if (!(u >= 0.0)) throw std::domain_error("f_ns: u must be >= 0");
    if (!(alpha_d > 0.0) || !(alpha_g > 0.0))
        throw std::domain_error("f_ns: alphas must be in (0,inf]");
    if (u == 1.0) return 0.0;

    const double au = alpha_d == kInf ? (u > 1.0 ? kInf : -kInf)
                                      : (u == 0.0 ? -kInf : alpha_d * std::log(u));
    const double log_p = -detail::softplus(-au);

    if (alpha_g == 1.0) return -detail::kLog2 - log_p;

    const double b = alpha_g == kInf ? 1.0 : 1.0 - 1.0 / alpha_g;
    const double kg = alpha_g == kInf ? 1.0 : alpha_g / (alpha_g - 1.0);
    const double half_two_pow = std::exp2((alpha_g == kInf ? 0.0 : 1.0 / alpha_g) - 1.0);
    return kg * (half_two_pow - std::exp(b * log_p));
}

// f(u) = -u l_G(1,A(u)) - l_G(1,1-A(u)) + 2 l_G(1,1/2) written through phi = -l_G(1,.)
inline double dual_cpe_f(double u, const LossSpec& loss_g,
                         const std::function<double(double)>& a_of_u) {
    if (!(u >= 0.0)) throw std::domain_error("dual_cpe_f: u must be >= 0");
    const double a = a_of_u(u);
    if (!(a >= 0.0 && a <= 1.0)) throw std::domain_error("dual_cpe_f: A(u) outside [0,1]");
    const double lead = u == 0.0 ? 0.0 : u * loss_g.phi(a);
    return lead + loss_g.phi(1.0 - a) - 2.0 * loss_g.phi(0.5);
}

// ---------------------------------------------------------------------------
// FGen: a generator packaged for divergence quadrature

struct FGen {
    std::function<double(double)> f;  // finite-u evaluations, u in [0, ~1e280]
    std::string name;
    double f_at_1 = 0.0;   // 0 for every generator used as a divergence
    double f_at_0 = 0.0;   // limit u -> 0+, may be +inf
    double slope_at_inf = 0.0;  // lim f(u)/u, weights regions where q = 0 < p
};

inline FGen make_f_alpha(double alpha) {
    FGen g;
    g.f = [alpha](double u) { return f_alpha(u, alpha); };
    g.name = "f_alpha(" + std::to_string(alpha) + ")";
    g.f_at_0 = f_alpha(0.0, alpha);
    g.slope_at_inf = 0.0;
    return g;
}

inline FGen make_f_alpha_symmetric(double alpha) {
    FGen g;
    g.f = [alpha](double u) { return f_alpha_symmetric(u, alpha); };
    g.name = "f_alpha_sym(" + std::to_string(alpha) + ")";
    g.f_at_0 = f_alpha_symmetric(0.0, alpha);
    g.slope_at_inf = g.f_at_0;  // pointwise symmetry forces f'(inf) = f(0)
    return g;
}

inline FGen make_f_tilde(double alpha) {
    FGen g;
    g.f = [alpha](double u) { return f_tilde_alpha(u, alpha); };
    g.name = "f_tilde(" + std::to_string(alpha) + ")";
    g.f_at_1 = f_tilde_alpha(1.0, alpha);  // nonzero: not a divergence normalization
    g.f_at_0 = 0.0;
    g.slope_at_inf = 0.0;
    return g;
}

inline FGen make_f_sat(double alpha_d, double alpha_g) {
    FGen g;
    g.f = [alpha_d, alpha_g](double u) { return f_sat(u, alpha_d, alpha_g); };
    g.name = "f_sat(" + std::to_string(alpha_d) + "," + std::to_string(alpha_g) + ")";
    g.f_at_0 = f_sat(0.0, alpha_d, alpha_g);
    g.slope_at_inf = alpha_g == 1.0 ? 0.0 : (alpha_g == kInf ? 1.0 : alpha_g / (alpha_g - 1.0));
    return g;
}

inline FGen make_f_ns(double alpha_d, double alpha_g) {
    FGen g;
    g.f = [alpha_d, alpha_g](double u) { return f_ns(u, alpha_d, alpha_g); };
    g.name = "f_ns(" + std::to_string(alpha_d) + "," + std::to_string(alpha_g) + ")";
    g.f_at_0 = f_ns(0.0, alpha_d, alpha_g);
    g.slope_at_inf = 0.0;
    return g;
}

inline FGen make_dual_cpe(const LossSpec& loss_g, std::function<double(double)> a_of_u) {
    FGen g;
    g.f = [loss_g, a_of_u](double u) { return dual_cpe_f(u, loss_g, a_of_u); };
    g.name = "dual_cpe";
    g.f_at_0 = dual_cpe_f(0.0, loss_g, a_of_u);
    g.slope_at_inf = loss_g.phi(a_of_u(1e15));  // lim f(u)/u = phi(A(inf))
    return g;
}

// ---------------------------------------------------------------------------
// divergences

struct DivergenceResult {
    double value = 0.0;
    double error_est = 0.0;
    bool converged = false;
    int subdivisions = 0;
};

namespace detail {

inline DivergenceResult as_divergence(const QuadResult& q) {
    return {q.value, q.error_est, q.converged, q.subdivisions};
}

}  // namespace detail

// integral of q(x) f(p(x)/q(x)) over the union support; regions with q = 0 < p
// contribute p * slope_at_inf, ratios beyond 1e280 are treated the same way
inline DivergenceResult f_divergence(const FGen& fg, const Density1D& p, const Density1D& q,
                                     double abs_tol = 1e-7, int max_subdivisions = 1 << 14) {
    const double lo = std::min(p.lo, q.lo);
    const double hi = std::max(p.hi, q.hi);
    auto integrand = [&fg, &p, &q](double x) -> double {
        const double pv = p.pdf(x);
        const double qv = q.pdf(x);
        if (qv > 0.0) {
            const double u = pv / qv;
            if (u > 1e280) return pv * fg.slope_at_inf;
            return qv * fg.f(u);
        }
        if (pv > 0.0) return pv * fg.slope_at_inf;
        return 0.0;
    };
    return detail::as_divergence(integrate(integrand, lo, hi, abs_tol, max_subdivisions));
}

// Jensen-Shannon divergence, natural log: (1/2)[ p log(2p/(p+q)) + q log(2q/(p+q)) ]
inline DivergenceResult jsd(const Density1D& p, const Density1D& q, double abs_tol = 1e-7) {
    auto integrand = [&p, &q](double x) -> double {
        const double pv = p.pdf(x);
        const double qv = q.pdf(x);
        double acc = 0.0;
        if (pv > 0.0) acc += pv * (detail::kLog2 + std::log(pv) - std::log(pv + qv));
        if (qv > 0.0) acc += qv * (detail::kLog2 + std::log(qv) - std::log(pv + qv));
        return 0.5 * acc;
    };
    return detail::as_divergence(
        integrate(integrand, std::min(p.lo, q.lo), std::max(p.hi, q.hi), abs_tol));
}

// total variation distance (1/2) int |p - q|
inline DivergenceResult tvd(const Density1D& p, const Density1D& q, double abs_tol = 1e-7) {
    auto integrand = [&p, &q](double x) { return 0.5 * std::abs(p.pdf(x) - q.pdf(x)); };
    return detail::as_divergence(
        integrate(integrand, std::min(p.lo, q.lo), std::max(p.hi, q.hi), abs_tol));
}

// squared Hellinger distance (1/2) int (sqrt p - sqrt q)^2 = 1 - int sqrt(pq)
inline DivergenceResult hellinger2(const Density1D& p, const Density1D& q,
                                   double abs_tol = 1e-7) {
    auto integrand = [&p, &q](double x) {
        const double d = std::sqrt(p.pdf(x)) - std::sqrt(q.pdf(x));
        return 0.5 * d * d;
    };
    return detail::as_divergence(
        integrate(integrand, std::min(p.lo, q.lo), std::max(p.hi, q.hi), abs_tol));
}

// ---------------------------------------------------------------------------
// the TVD sandwich for pointwise-symmetric generators with finite f(0)

// gamma_f(x) = (1+x) f((1-x)/(1+x)) on [0,1]; gamma_f(1) = 2 f(0)
inline double gamma_f(double x, const FGen& fg) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("gamma_f: x outside [0,1]");
    if (x == 1.0) return 2.0 * fg.f_at_0;
    return (1.0 + x) * fg.f((1.0 - x) / (1.0 + x));
}

struct SandwichReport {
    double lower = 0.0;       // gamma_f(TVD)
    double divergence = 0.0;  // D_f
    double upper = 0.0;       // gamma_f(1) * TVD
    double tv = 0.0;
    bool holds = false;
};

// requires u f(1/u) = f(u) on a log grid and f(0) < inf; slack absorbs quadrature noise
inline SandwichReport sandwich_check(const FGen& fg, const Density1D& p, const Density1D& q,
                                     double slack = 1e-6) {
    if (!std::isfinite(fg.f_at_0))
        throw std::invalid_argument("sandwich_check: f(0) must be finite");
    for (int i = 0; i <= 60; ++i) {
        const double u = std::pow(10.0, -3.0 + 6.0 * i / 60.0);
        const double lhs = u * fg.f(1.0 / u);
        const double rhs = fg.f(u);
        if (std::abs(lhs - rhs) > 1e-9 * std::max(1.0, std::abs(rhs)))
            throw std::invalid_argument("sandwich_check: generator is not pointwise symmetric");
    }
    SandwichReport r;
    r.tv = tvd(p, q).value;
    r.divergence = f_divergence(fg, p, q).value;
    r.lower = gamma_f(std::min(r.tv, 1.0), fg);
    r.upper = 2.0 * fg.f_at_0 * r.tv;
    r.holds = r.lower <= r.divergence + slack && r.divergence <= r.upper + slack;
    return r;
}

}  // namespace ganlab
