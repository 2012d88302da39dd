// CPE losses: the alpha family, square losses, and the LSGAN 0-1 scheme,
// together with the empirical value functions built from them.
//
// A loss is carried as the pair of partial losses
//   phi(t) = -loss(y=1, t),  psi(t) = -loss(y=0, t)
// so a discriminator maximizes  mean phi(D(real)) + mean psi(D(gen)).
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ganlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// loss(y, yhat) for the alpha family, alpha in (0, inf].
// alpha = 1 and alpha = inf are dedicated closed forms; elsewhere
//   (alpha/(alpha-1)) * (1 - phat^((alpha-1)/alpha)),  phat = yhat if y=1 else 1-yhat.
// May return +inf (e.g. alpha <= 1 at phat = 0); that is a value, not an error.
inline double alpha_loss(double alpha, int y, double yhat) {
    if (!(alpha > 0.0)) throw std::domain_error("alpha_loss: alpha must be in (0,inf]");
    if (!(yhat >= 0.0 && yhat <= 1.0)) throw std::domain_error("alpha_loss: yhat outside [0,1]");
    const double phat = y == 1 ? yhat : 1.0 - yhat;
    if (alpha == kInf) return 1.0 - phat;
    if (alpha == 1.0) return -std::log(phat);
    // expm1 keeps full precision when alpha is close to 1
    return -alpha / (alpha - 1.0) * std::expm1((alpha - 1.0) / alpha * std::log(phat));
}

// alpha_loss(alpha, y, sigmoid(t)) evaluated straight from the logit. Going
// through the probability loses the tail to the 1 - yhat subtraction once
// sigmoid(t) rounds to within an ulp of 1; this form never forms 1 - yhat.
inline double alpha_loss_logit(double alpha, int y, double t) {
    if (!(alpha > 0.0)) throw std::domain_error("alpha_loss_logit: alpha must be in (0,inf]");
    const double s = y == 1 ? t : -t;  // logit of the probability the label earns
    const double nlp = s > 0.0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
    if (alpha == kInf) return -std::expm1(-nlp);
    if (alpha == 1.0) return nlp;
    return -alpha / (alpha - 1.0) * std::expm1(-(alpha - 1.0) / alpha * nlp);
}

// d/dyhat of alpha_loss(alpha, y, .) on the open interval:
//   y=1: -yhat^(-1/alpha)     y=0: (1-yhat)^(-1/alpha)
// The single formula covers alpha = 1 (gives -1/yhat) and alpha = inf (exponent -0 gives -1).
inline double alpha_loss_deriv(double alpha, int y, double yhat) {
    if (!(alpha > 0.0)) throw std::domain_error("alpha_loss_deriv: alpha must be in (0,inf]");
    if (!(yhat > 0.0 && yhat < 1.0))
        throw std::domain_error("alpha_loss_deriv: yhat must be in (0,1)");
    if (y == 1) return -std::pow(yhat, -1.0 / alpha);
    return std::pow(1.0 - yhat, -1.0 / alpha);
}

enum class LossKind { alpha, square_disc, square_gen, lsgan, custom };

inline std::string to_string(LossKind k) {
    switch (k) {
        case LossKind::alpha: return "alpha";
        case LossKind::square_disc: return "square-disc";
        case LossKind::square_gen: return "square-gen";
        case LossKind::lsgan: return "lsgan";
        case LossKind::custom: return "custom";
    }
    return "custom";
}

struct LossSpec {
    std::function<double(double)> phi;    // -(loss at y=1)
    std::function<double(double)> psi;    // -(loss at y=0)
    std::function<double(double)> dphi;   // derivative of phi on (0,1)
    std::function<double(double)> dpsi;
    LossKind kind = LossKind::custom;
    double alpha = 0.0;                   // meaningful only for kind == alpha
};

// kind = alpha requires alpha; square-disc is the 0-1 LSGAN discriminator pair
// phi(t) = -(t-1)^2/2, psi(t) = -t^2/2; square-gen is the generator-side square
// loss of the dual-objective worked example (not admissible as a discriminator
// loss: phi+psi is not maximized at 1/2); lsgan aliases square-disc with its own
// tag so the trainer can pick the 0-1 generator target.
inline LossSpec make_loss(LossKind kind, double alpha = 0.0) {
    LossSpec s;
    s.kind = kind;
    switch (kind) {
        case LossKind::alpha: {
            if (!(alpha > 0.0)) throw std::domain_error("make_loss: alpha required for kind=alpha");
            s.alpha = alpha;
            s.phi = [alpha](double t) { return -alpha_loss(alpha, 1, t); };
            s.psi = [alpha](double t) { return -alpha_loss(alpha, 0, t); };
            s.dphi = [alpha](double t) { return -alpha_loss_deriv(alpha, 1, t); };
            s.dpsi = [alpha](double t) { return -alpha_loss_deriv(alpha, 0, t); };
            break;
        }
        case LossKind::square_disc:
        case LossKind::lsgan: {
            s.phi = [](double t) { return -0.5 * (t - 1.0) * (t - 1.0); };
            s.psi = [](double t) { return -0.5 * t * t; };
            s.dphi = [](double t) { return 1.0 - t; };
            s.dpsi = [](double t) { return -t; };
            break;
        }
        case LossKind::square_gen: {
            s.phi = [](double t) { return 0.5 * (t * t - 1.0); };
            s.psi = [](double t) { return 0.5 * ((1.0 - t) * (1.0 - t) - 1.0); };
            s.dphi = [](double t) { return t; };
            s.dpsi = [](double t) { return t - 1.0; };
            break;
        }
        case LossKind::custom:
            throw std::domain_error("make_loss: custom losses are constructed directly");
    }
    return s;
}

enum class EstimateMethod { monte_carlo, quadrature };

struct ValueEstimate {
    double value = 0.0;
    std::size_t n_real = 0;
    std::size_t n_gen = 0;
    EstimateMethod method = EstimateMethod::monte_carlo;
};

// mean phi over real outputs plus mean psi over generated outputs.
// For kind = alpha this IS the V_alpha normalization: the -2 additive constant
// is already inside phi + psi because phi = -loss(1,.), psi = -loss(0,.).
// Infinities propagate.
inline ValueEstimate empirical_value(const LossSpec& loss, const std::vector<double>& d_real,
                                     const std::vector<double>& d_gen) {
    if (d_real.empty() || d_gen.empty())
        throw std::invalid_argument("empirical_value: empty sample list");
    double acc_r = 0.0;
    for (double t : d_real) acc_r += loss.phi(t);
    double acc_g = 0.0;
    for (double t : d_gen) acc_g += loss.psi(t);
    ValueEstimate est;
    est.value = acc_r / static_cast<double>(d_real.size()) +
                acc_g / static_cast<double>(d_gen.size());
    est.n_real = d_real.size();
    est.n_gen = d_gen.size();
    est.method = EstimateMethod::monte_carlo;
    return est;
}

// mean of loss(y=1, D(x)) over generated outputs: the non-saturating generator objective
inline double ns_generator_value(double alpha_g, const std::vector<double>& d_gen) {
    if (d_gen.empty()) throw std::invalid_argument("ns_generator_value: empty sample list");
    double acc = 0.0;
    for (double t : d_gen) acc += alpha_loss(alpha_g, 1, t);
    return acc / static_cast<double>(d_gen.size());
}

}  // namespace ganlab
