#pragma once

#include <cmath>
#include <stdexcept>

#include "ganlab/closed_form.hpp"
#include "ganlab/density.hpp"
#include "ganlab/losses.hpp"

// Spatial-gradient decomposition of the generator loss under the optimal
// discriminator: the loss gradient at a point factors into a nonnegative
// scalar (depending only on the tilted posterior) times the score difference
// of the two densities.

namespace ganlab {

struct GradientSample {
    double x = 0.0;
    double grad = 0.0;        // d/dx of the generator loss at x
    double scalar = 0.0;      // nonnegative coefficient
    double score_diff = 0.0;  // (1/q) q' - (1/p) p'
};

// Coefficient for the saturating generator loss; `posterior` is the tilted
// posterior, i.e. the optimal discriminator output.
inline double c_sat(double alpha_d, double alpha_g, double posterior) {
    if (!(posterior >= 0.0 && posterior <= 1.0))
        throw std::domain_error("c_sat: posterior outside [0,1]");
    if (!(alpha_d > 0.0) || !(alpha_g > 0.0))
        throw std::domain_error("c_sat: alphas must be positive");
    const double expo = alpha_g == kInf ? 1.0 : 1.0 - 1.0 / alpha_g;
    if (posterior == 0.0) return 0.0;
    if (posterior == 1.0 && expo > 0.0) return 0.0;
    return alpha_d * posterior * std::pow(1.0 - posterior, expo);
}

// Coefficient for the non-saturating generator loss.
inline double c_ns(double alpha_d, double alpha_g, double posterior) {
    if (!(posterior >= 0.0 && posterior <= 1.0))
        throw std::domain_error("c_ns: posterior outside [0,1]");
    if (!(alpha_d > 0.0) || !(alpha_g > 0.0))
        throw std::domain_error("c_ns: alphas must be positive");
    const double expo = alpha_g == kInf ? 1.0 : 1.0 - 1.0 / alpha_g;
    if (posterior == 1.0) return 0.0;
    if (posterior == 0.0 && expo > 0.0) return 0.0;
    return alpha_d * (1.0 - posterior) * std::pow(posterior, expo);
}

// Pointwise generator loss with the discriminator pinned at its optimum:
// -l(0, D*) for the saturating game, l(1, D*) for the non-saturating one.
inline double gen_loss_at(const Density1D& p, const Density1D& q, double alpha_d,
                          double alpha_g, double x, bool saturating) {
    const double pv = p.pdf(x);
    const double qv = q.pdf(x);
    if (alpha_d != kInf && pv > 0.0 && qv > 0.0) {
        const double t = alpha_d * (std::log(pv) - std::log(qv));
        return saturating ? -alpha_loss_logit(alpha_g, 0, t) : alpha_loss_logit(alpha_g, 1, t);
    }
    const double d = optimal_disc(p, q, alpha_d, x);
    return saturating ? -alpha_loss(alpha_g, 0, d) : alpha_loss(alpha_g, 1, d);
}

inline GradientSample gen_loss_spatial_grad(const Density1D& p, const Density1D& q,
                                            double alpha_d, double alpha_g, double x,
                                            bool saturating) {
    const double pv = p.pdf(x);
    const double qv = q.pdf(x);
    if (!(pv > 0.0) || !(qv > 0.0))
        throw std::domain_error("gen_loss_spatial_grad: zero density at x");
    const double tilted = alpha_d == kInf
                              ? optimal_disc_value(pv, qv, alpha_d)
                              : detail::sigmoid(alpha_d * (std::log(pv) - std::log(qv)));
    GradientSample s;
    s.x = x;
    s.score_diff = q.log_pdf_deriv(x) - p.log_pdf_deriv(x);
    s.scalar = saturating ? c_sat(alpha_d, alpha_g, tilted) : c_ns(alpha_d, alpha_g, tilted);
    s.grad = s.scalar * s.score_diff;
    return s;
}

}  // namespace ganlab
