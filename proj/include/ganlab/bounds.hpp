#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ganlab/activations.hpp"
#include "ganlab/divergence.hpp"
#include "ganlab/losses.hpp"

// Estimation/generalization error calculators: the clipped-loss Lipschitz
// constant C_h(alpha), network norm products, the two-sample upper bound (the
// single-objective bound is the same formula with one alpha), the sample
// threshold calculator, and the lower-bound constant from the two-point
// packing argument.

namespace ganlab {

struct NetSpec {
    std::vector<double> layer_norms;           // one per layer
    std::vector<double> activation_lipschitz;  // one per hidden transition
    int depth = 0;
    double input_bound = 1.0;
    // Activation tags are only consulted by fano_constant; empty means ReLU
    // throughout.
    std::vector<Act> activation_kinds;
};

inline void validate(const NetSpec& s) {
    if (s.depth < 1) throw std::invalid_argument("NetSpec: depth must be >= 1");
    if (static_cast<int>(s.layer_norms.size()) != s.depth)
        throw std::invalid_argument("NetSpec: need one norm bound per layer");
    if (static_cast<int>(s.activation_lipschitz.size()) != s.depth - 1)
        throw std::invalid_argument("NetSpec: need depth-1 activation Lipschitz bounds");
    for (double m : s.layer_norms)
        if (!(m > 0.0)) throw std::invalid_argument("NetSpec: norms must be positive");
    for (double r : s.activation_lipschitz)
        if (!(r > 0.0)) throw std::invalid_argument("NetSpec: Lipschitz bounds must be positive");
    if (!(s.input_bound > 0.0)) throw std::invalid_argument("NetSpec: input bound must be positive");
    if (!s.activation_kinds.empty() &&
        static_cast<int>(s.activation_kinds.size()) != s.depth - 1)
        throw std::invalid_argument("NetSpec: need depth-1 activation tags");
}

// ---------------------------------------------------------------------------
// Lipschitz constant of the clipped loss

inline double c_h(double h, double alpha) {
    if (!(h > 0.0)) throw std::domain_error("c_h: h must be positive");
    if (!(alpha > 0.0)) throw std::domain_error("c_h: alpha must be positive");
    if (alpha == kInf) return 0.25;
    if (alpha <= 1.0)
        return detail::sigmoid(h) * std::pow(detail::sigmoid(-h), (alpha - 1.0) / alpha);
    return std::pow((alpha - 1.0) / (2.0 * alpha - 1.0), (alpha - 1.0) / alpha) * alpha /
           (2.0 * alpha - 1.0);
}

// ---------------------------------------------------------------------------
// norm products

struct NormProducts {
    double u_omega = 0.0;
    double u_theta = 0.0;
    double q_x = 0.0;
    double q_z = 0.0;
};

inline NormProducts norm_products(const NetSpec& d_spec, const NetSpec& g_spec) {
    validate(d_spec);
    validate(g_spec);
    const auto chain = [](const NetSpec& s) {
        double prod = s.layer_norms[s.depth - 1];
        for (int i = 0; i + 1 < s.depth; ++i) prod *= s.layer_norms[i] * s.activation_lipschitz[i];
        return prod;
    };
    NormProducts np;
    np.u_omega = chain(d_spec);
    np.u_theta = chain(g_spec);
    np.q_x = np.u_omega * d_spec.input_bound;
    np.q_z = np.u_omega * np.u_theta * g_spec.input_bound;
    return np;
}

// ---------------------------------------------------------------------------
// two-sample upper bound

struct BoundTerms {
    double real_sample = 0.0;
    double gen_sample = 0.0;
    double confidence = 0.0;
};

struct BoundConstants {
    double u_omega = 0.0;
    double u_theta = 0.0;
    double q_x = 0.0;
    double q_z = 0.0;
    double l_phi = 0.0;
    double l_psi = 0.0;
};

struct BoundReport {
    double bound = 0.0;
    BoundTerms terms;
    BoundConstants constants;
};

namespace detail {

inline BoundReport bound_from_lipschitz(const NetSpec& d_spec, const NetSpec& g_spec,
                                        long long n, long long m, double delta, double l_phi,
                                        double l_psi, const NormProducts& np) {
    if (n < 1 || m < 1)
        throw std::invalid_argument("estimation_upper_bound: sample counts must be >= 1");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("estimation_upper_bound: delta must lie in (0,1)");
    const double bx = d_spec.input_bound;
    const double bz = g_spec.input_bound;
    const double k = d_spec.depth;
    const double l = g_spec.depth;
    BoundReport rep;
    rep.constants = {np.u_omega, np.u_theta, np.q_x, np.q_z, l_phi, l_psi};
    rep.terms.real_sample = l_phi * bx * np.u_omega * std::sqrt(3.0 * k) / std::sqrt(double(n));
    rep.terms.gen_sample =
        l_psi * np.u_omega * np.u_theta * bz * std::sqrt(3.0 * (k + l - 1.0)) / std::sqrt(double(m));
    rep.terms.confidence =
        np.u_omega * std::sqrt(std::log(1.0 / delta)) *
        (l_phi * bx / std::sqrt(2.0 * double(n)) + l_psi * bz * np.u_theta / std::sqrt(2.0 * double(m)));
    rep.bound = rep.terms.real_sample + rep.terms.gen_sample + rep.terms.confidence;
    return rep;
}

}  // namespace detail

inline BoundReport estimation_upper_bound(const NetSpec& d_spec, const NetSpec& g_spec,
                                          long long n, long long m, double delta, double l_phi,
                                          double l_psi) {
    const NormProducts np = norm_products(d_spec, g_spec);
    if (!(l_phi > 0.0) || !(l_psi > 0.0))
        throw std::invalid_argument("estimation_upper_bound: Lipschitz constants must be positive");
    return detail::bound_from_lipschitz(d_spec, g_spec, n, m, delta, l_phi, l_psi, np);
}

// alpha_g variant: the loss Lipschitz constants are 4*C_h(alpha_g) evaluated
// at the clip levels Q_x and Q_z.
inline BoundReport estimation_upper_bound(const NetSpec& d_spec, const NetSpec& g_spec,
                                          long long n, long long m, double delta,
                                          double alpha_g) {
    const NormProducts np = norm_products(d_spec, g_spec);
    const double l_phi = 4.0 * c_h(np.q_x, alpha_g);
    const double l_psi = 4.0 * c_h(np.q_z, alpha_g);
    return detail::bound_from_lipschitz(d_spec, g_spec, n, m, delta, l_phi, l_psi, np);
}

// Single-objective bound: identical formula with one alpha for both sides.
inline BoundReport estimation_upper_bound_single(const NetSpec& d_spec, const NetSpec& g_spec,
                                                 long long n, long long m, double delta,
                                                 double alpha) {
    return estimation_upper_bound(d_spec, g_spec, n, m, delta, alpha);
}

// ---------------------------------------------------------------------------
// sample-count threshold

struct ThresholdReport {
    std::uint64_t threshold = 0;
    double raw = 0.0;
    double log_arg = 0.0;
    bool degenerate = false;  // log argument <= 1, threshold not meaningful
};

// The universal constant c is a caller input; it has no published value.
inline ThresholdReport generalization_threshold(double c, long long p, double delta_cap,
                                                double big_l, double l_phi, double l_psi,
                                                double eps) {
    if (!(c > 0.0) || p < 1 || !(delta_cap > 0.0) || !(big_l > 0.0) || !(l_phi > 0.0) ||
        !(l_psi > 0.0) || !(eps > 0.0))
        throw std::invalid_argument("generalization_threshold: all inputs must be positive");
    ThresholdReport rep;
    rep.log_arg = big_l * std::max(l_phi, l_psi) * double(p) / eps;
    rep.degenerate = !(rep.log_arg > 1.0);
    rep.raw = c * double(p) * delta_cap * delta_cap * std::log(rep.log_arg) / (eps * eps);
    rep.threshold = rep.raw > 0.0 ? static_cast<std::uint64_t>(std::ceil(rep.raw)) : 0;
    return rep;
}

// ---------------------------------------------------------------------------
// lower-bound constant

// Propagates +/- input_bound through the positive-homogeneous activation
// chain and takes the sigmoid gap, scaled by log(2)/20.
inline double fano_constant(const NetSpec& d_spec, double b_x) {
    if (d_spec.depth < 1) throw std::invalid_argument("fano_constant: depth must be >= 1");
    if (static_cast<int>(d_spec.layer_norms.size()) != d_spec.depth)
        throw std::invalid_argument("fano_constant: need one norm per layer");
    for (double m : d_spec.layer_norms)
        if (!(m > 0.0)) throw std::invalid_argument("fano_constant: norms must be positive");
    if (!(b_x >= 0.0)) throw std::invalid_argument("fano_constant: input bound must be >= 0");
    std::vector<Act> kinds = d_spec.activation_kinds;
    if (kinds.empty()) kinds.assign(static_cast<std::size_t>(d_spec.depth - 1), Act::relu);
    if (static_cast<int>(kinds.size()) != d_spec.depth - 1)
        throw std::invalid_argument("fano_constant: need depth-1 activation tags");
    for (Act a : kinds)
        if (a != Act::relu && a != Act::leaky_relu && a != Act::identity)
            throw std::invalid_argument(
                "fano_constant: unsupported activation (need a positive-homogeneous chain)");
    const auto chain = [&](double v0) {
        double v = d_spec.layer_norms[0] * v0;
        for (int i = 0; i + 1 < d_spec.depth; ++i) {
            v = act_apply(kinds[static_cast<std::size_t>(i)], v);
            v *= d_spec.layer_norms[static_cast<std::size_t>(i) + 1];
        }
        return detail::sigmoid(v);
    };
    return detail::kLog2 / 20.0 * (chain(b_x) - chain(-b_x));
}

inline double fano_constant(const NetSpec& d_spec) { return fano_constant(d_spec, d_spec.input_bound); }

}  // namespace ganlab
