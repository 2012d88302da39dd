#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "ganlab/density.hpp"
#include "ganlab/divergence.hpp"
#include "ganlab/losses.hpp"
#include "ganlab/quadrature.hpp"

// Closed-form optimal play: the optimal discriminator and its tilted-posterior
// form, the generator objective it induces (divergence + constant), a brute
// force pointwise maximizer used as an oracle, and the implicit-equation
// solver covering general symmetric strictly-convex discriminator losses.

namespace ganlab {

// ---------------------------------------------------------------------------
// optimal discriminator

// p, q are density values at a single point.
inline double optimal_disc_value(double p, double q, double alpha_d) {
    if (!(p >= 0.0) || !(q >= 0.0)) throw std::domain_error("optimal_disc: negative density");
    if (!(alpha_d > 0.0)) throw std::domain_error("optimal_disc: alpha_d must be positive");
    if (p == 0.0 && q == 0.0) return 0.5;  // uniformly random discriminator off-support
    if (alpha_d == kInf) return p > q ? 1.0 : (p < q ? 0.0 : 0.5);
    if (p == 0.0) return 0.0;
    if (q == 0.0) return 1.0;
    return detail::sigmoid(alpha_d * (std::log(p) - std::log(q)));
}

inline double optimal_disc(const Density1D& p, const Density1D& q, double alpha_d, double x) {
    return optimal_disc_value(p.pdf(x), q.pdf(x), alpha_d);
}

// Tilts the plain posterior P(y=1|x) by alpha_d; the optimal discriminator
// output equals the tilted posterior.
inline double tilt_posterior(double posterior, double alpha_d) {
    if (!(posterior >= 0.0 && posterior <= 1.0))
        throw std::domain_error("tilt_posterior: posterior outside [0,1]");
    if (!(alpha_d > 0.0)) throw std::domain_error("tilt_posterior: alpha_d must be positive");
    if (posterior == 0.0 || posterior == 1.0) return posterior;
    if (alpha_d == kInf) return posterior > 0.5 ? 1.0 : (posterior < 0.5 ? 0.0 : 0.5);
    const double logit = std::log(posterior) - std::log1p(-posterior);
    return detail::sigmoid(alpha_d * logit);
}

struct OptDiscProfile {
    std::function<double(double)> d_star;
    double alpha_d = 1.0;
    Density1D p;
    Density1D q;
};

inline OptDiscProfile make_opt_disc_profile(Density1D p, Density1D q, double alpha_d) {
    OptDiscProfile prof;
    prof.alpha_d = alpha_d;
    prof.p = std::move(p);
    prof.q = std::move(q);
    prof.d_star = [pd = prof.p, qd = prof.q, alpha_d](double x) {
        return optimal_disc(pd, qd, alpha_d, x);
    };
    return prof;
}

// ---------------------------------------------------------------------------
// brute-force pointwise maximizer (oracle for the closed forms)

struct PointwiseOpt {
    double t_star = 0.0;
    double value = 0.0;
};

// Maximizes a*phi(t) + b*psi(t) over t in [0,1]: coarse 2001-point grid, then
// golden-section refinement of the winning bracket.
inline PointwiseOpt brute_force_pointwise_opt(const LossSpec& loss, double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0) || (a == 0.0 && b == 0.0))
        throw std::domain_error("brute_force_pointwise_opt: need a,b >= 0 and not both zero");
    const auto h = [&](double t) {
        double v = 0.0;
        if (a > 0.0) v += a * loss.phi(t);
        if (b > 0.0) v += b * loss.psi(t);
        return std::isnan(v) ? -kInf : v;
    };
    const int n = 2000;
    double best = -kInf;
    int besti = 0;
    for (int i = 0; i <= n; ++i) {
        const double v = h(static_cast<double>(i) / n);
        if (v > best) {
            best = v;
            besti = i;
        }
    }
    double lo = besti == 0 ? 0.0 : static_cast<double>(besti - 1) / n;
    double hi = besti == n ? 1.0 : static_cast<double>(besti + 1) / n;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo);
    double d = lo + gr * (hi - lo);
    double fc = h(c);
    double fd = h(d);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        if (fc < fd) {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = h(d);
        } else {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = h(c);
        }
    }
    const double t = 0.5 * (lo + hi);
    return {t, h(t)};
}

// ---------------------------------------------------------------------------
// generator objective at the optimal discriminator

// Additive constant linking the induced divergence to the generator value.
inline double gen_obj_constant(double alpha_g, bool saturating) {
    if (!(alpha_g > 0.0)) throw std::domain_error("gen_obj_constant: alpha_g must be positive");
    if (saturating) {
        if (alpha_g == 1.0) return -2.0 * detail::kLog2;
        if (alpha_g == kInf) return -1.0;
        return alpha_g / (alpha_g - 1.0) * (std::exp2(1.0 / alpha_g) - 2.0);
    }
    if (alpha_g == 1.0) return detail::kLog2;
    if (alpha_g == kInf) return 0.5;
    return alpha_g / (alpha_g - 1.0) * (1.0 - std::exp2(1.0 / alpha_g - 1.0));
}

struct GenObjParts {
    DivergenceResult divergence;
    double constant = 0.0;
    double total = 0.0;
};

inline GenObjParts generator_obj_parts(double alpha_d, double alpha_g, const Density1D& p,
                                       const Density1D& q, bool saturating,
                                       double abs_tol = 1e-7) {
    const FGen fg = saturating ? make_f_sat(alpha_d, alpha_g) : make_f_ns(alpha_d, alpha_g);
    GenObjParts parts;
    parts.divergence = f_divergence(fg, p, q, abs_tol);
    parts.constant = gen_obj_constant(alpha_g, saturating);
    parts.total = parts.divergence.value + parts.constant;
    return parts;
}

inline double generator_obj_at_opt_disc(double alpha_d, double alpha_g, const Density1D& p,
                                        const Density1D& q, bool saturating) {
    return generator_obj_parts(alpha_d, alpha_g, p, q, saturating).total;
}

// Direct quadrature of the generator value with the discriminator pinned at
// its optimum; the log-space discriminator keeps the integrand finite where
// the density ratio under- or overflows.
inline DivergenceResult generator_value_direct(double alpha_d, double alpha_g,
                                               const Density1D& p, const Density1D& q,
                                               bool saturating, double abs_tol = 1e-7) {
    if (!(alpha_d > 0.0) || !(alpha_g > 0.0))
        throw std::domain_error("generator_value_direct: alphas must be positive");
    const double lo = std::min(p.lo, q.lo);
    const double hi = std::max(p.hi, q.hi);
    const double ag = alpha_g;
    const double beta = ag == kInf ? 1.0 : (ag - 1.0) / ag;
    const double kg = ag == kInf ? 1.0 : ag / (ag - 1.0);
    const auto integrand = [&, beta, kg, ag, alpha_d, saturating](double x) -> double {
        const double pv = std::max(0.0, p.pdf(x));
        const double qv = std::max(0.0, q.pdf(x));
        if (pv == 0.0 && qv == 0.0) return 0.0;
        double log_d;    // log D*(x)
        double log_omd;  // log (1 - D*(x))
        if (pv == 0.0) {
            log_d = -kInf;
            log_omd = 0.0;
        } else if (qv == 0.0) {
            log_d = 0.0;
            log_omd = -kInf;
        } else if (alpha_d == kInf) {
            if (pv > qv) {
                log_d = 0.0;
                log_omd = -kInf;
            } else if (pv < qv) {
                log_d = -kInf;
                log_omd = 0.0;
            } else {
                log_d = log_omd = -detail::kLog2;
            }
        } else {
            const double t = alpha_d * (std::log(pv) - std::log(qv));
            log_d = -detail::softplus(-t);
            log_omd = -detail::softplus(t);
        }
        if (saturating) {
            double v = 0.0;
            if (ag == 1.0) {
                if (pv > 0.0) v += pv * log_d;
                if (qv > 0.0) v += qv * log_omd;
            } else if (ag == kInf) {
                if (pv > 0.0) v -= pv * std::exp(log_omd);  // phi(d) = d - 1
                if (qv > 0.0) v -= qv * std::exp(log_d);    // psi(d) = -d
            } else {
                if (pv > 0.0) v += kg * (std::exp(std::log(pv) + beta * log_d) - pv);
                if (qv > 0.0) v += kg * (std::exp(std::log(qv) + beta * log_omd) - qv);
            }
            return v;
        }
        if (qv == 0.0) return 0.0;
        if (ag == 1.0) return -qv * log_d;
        if (ag == kInf) return qv * std::exp(log_omd);
        return kg * (qv - std::exp(std::log(qv) + beta * log_d));
    };
    const QuadResult r = integrate(integrand, lo, hi, abs_tol);
    return {r.value, r.error_est, r.converged, r.subdivisions};
}

// ---------------------------------------------------------------------------
// implicit-equation solver for general symmetric discriminator losses

namespace detail {

// Grid check of the solver's admissibility preconditions: the loss must be
// symmetric (phi(t) = psi(1-t)) and l(1,.) = -phi must be convex.
inline void check_implicit_disc_loss(const LossSpec& loss) {
    const int n = 41;
    for (int i = 1; i < n; ++i) {
        const double t = static_cast<double>(i) / n;
        const double sym = loss.phi(t) - loss.psi(1.0 - t);
        if (!(std::abs(sym) <= 1e-9 * (1.0 + std::abs(loss.phi(t)))))
            throw std::invalid_argument("solve_implicit_disc: loss is not symmetric");
    }
    const double h = 1e-3;
    for (int i = 1; i < n; ++i) {
        const double t = static_cast<double>(i) / n;
        if (t - h <= 0.0 || t + h >= 1.0) continue;
        const double d2 = -loss.phi(t - h) + 2.0 * loss.phi(t) - loss.phi(t + h);
        if (!(d2 >= -1e-9))
            throw std::invalid_argument("solve_implicit_disc: loss l(1,.) is not convex");
    }
}

inline double solve_implicit_disc_unchecked(const LossSpec& loss_d, double u) {
    if (u == 0.0) return 0.0;
    if (u == kInf) return 1.0;
    // stationarity residual; strictly decreasing for admissible losses
    const auto r = [&](double t) { return -loss_d.dphi(1.0 - t) + u * loss_d.dphi(t); };
    double lo = 1e-12;
    double hi = 1.0 - 1e-12;
    if (!(r(lo) > 0.0)) return 0.0;
    if (!(r(hi) < 0.0)) return 1.0;
    for (int it = 0; it < 200 && hi - lo > 4e-17 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double rm = r(mid);
        if (rm == 0.0) return mid;
        if (rm > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

inline double solve_implicit_disc(const LossSpec& loss_d, double u) {
    if (!(u >= 0.0)) throw std::domain_error("solve_implicit_disc: u must be >= 0");
    detail::check_implicit_disc_loss(loss_d);
    return detail::solve_implicit_disc_unchecked(loss_d, u);
}

// Generator for the divergence induced by a (loss_d, loss_g) pair, with the
// inner discriminator optimum obtained from the implicit equation.
inline FGen make_dual_cpe_for(const LossSpec& loss_d, const LossSpec& loss_g) {
    detail::check_implicit_disc_loss(loss_d);
    return make_dual_cpe(loss_g, [loss_d](double u) {
        return detail::solve_implicit_disc_unchecked(loss_d, u);
    });
}

}  // namespace ganlab
