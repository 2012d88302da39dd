// Evaluable 1-d probability densities: Gaussians, Gaussian mixtures, and
// tabulated (piecewise-linear) densities, with support bounds and the
// log-density spatial derivative d/dx log p(x) used by the gradient analysis.
//
// Support convention: [mu - 8 sigma, mu + 8 sigma], extended over the outermost
// mixture component. Two-sided 8-sigma tail mass is ~1.2e-15, well inside the
// 1e-6 normalization tolerance.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "quadrature.hpp"

namespace ganlab {

struct GaussComponent {
    double weight;
    double mu;
    double sigma;
};

enum class DensityTag { gaussian, mixture, tabulated };

struct Density1D {
    std::function<double(double)> pdf;
    std::function<double(double)> log_pdf_deriv;  // d/dx log p(x)
    double lo = 0.0;
    double hi = 0.0;
    DensityTag tag = DensityTag::gaussian;
    std::vector<GaussComponent> components;       // empty for tabulated
};

namespace detail {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;

inline double gauss_logpdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return -0.5 * z * z - std::log(sigma) + std::log(kInvSqrt2Pi);
}

}  // namespace detail

inline Density1D make_mixture(std::vector<GaussComponent> comps) {
    if (comps.empty()) throw std::invalid_argument("make_mixture: no components");
    double wsum = 0.0;
    for (const auto& c : comps) {
        if (!(c.weight > 0.0) || !(c.sigma > 0.0))
            throw std::invalid_argument("make_mixture: weights and sigmas must be positive");
        wsum += c.weight;
    }
    for (auto& c : comps) c.weight /= wsum;

    Density1D d;
    d.tag = comps.size() == 1 ? DensityTag::gaussian : DensityTag::mixture;
    d.components = comps;
    d.lo = comps[0].mu - 8.0 * comps[0].sigma;
    d.hi = comps[0].mu + 8.0 * comps[0].sigma;
    for (const auto& c : comps) {
        d.lo = std::min(d.lo, c.mu - 8.0 * c.sigma);
        d.hi = std::max(d.hi, c.mu + 8.0 * c.sigma);
    }

    d.pdf = [comps](double x) {
        double acc = 0.0;
        for (const auto& c : comps)
            acc += c.weight / c.sigma * detail::kInvSqrt2Pi *
                   std::exp(-0.5 * ((x - c.mu) / c.sigma) * ((x - c.mu) / c.sigma));
        return acc;
    };

    // p'/p = sum w_i N_i (-(x-mu_i)/sigma_i^2) / sum w_i N_i, stabilized by the
    // max log-term so far tails of distant components cannot underflow the ratio
    d.log_pdf_deriv = [comps](double x) {
        double lmax = -std::numeric_limits<double>::infinity();
        for (const auto& c : comps)
            lmax = std::max(lmax, std::log(c.weight) + detail::gauss_logpdf(x, c.mu, c.sigma));
        double num = 0.0, den = 0.0;
        for (const auto& c : comps) {
            const double w = std::exp(std::log(c.weight) +
                                      detail::gauss_logpdf(x, c.mu, c.sigma) - lmax);
            num += w * (-(x - c.mu) / (c.sigma * c.sigma));
            den += w;
        }
        return num / den;
    };
    return d;
}

inline Density1D make_gaussian(double mu, double sigma) {
    return make_mixture({{1.0, mu, sigma}});
}

// piecewise-linear density on a strictly increasing grid; renormalized to mass 1
inline Density1D make_tabulated(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() < 2 || xs.size() != ys.size())
        throw std::invalid_argument("make_tabulated: need matching grids of size >= 2");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (!(xs[i] < xs[i + 1])) throw std::invalid_argument("make_tabulated: grid not increasing");
    for (double y : ys)
        if (!(y >= 0.0)) throw std::invalid_argument("make_tabulated: negative density value");

    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        mass += 0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i]);
    if (!(mass > 0.0)) throw std::invalid_argument("make_tabulated: zero mass");
    for (auto& y : ys) y /= mass;

    auto eval = [xs, ys](double x) -> double {
        if (x <= xs.front() || x >= xs.back()) {
            if (x == xs.front()) return ys.front();
            if (x == xs.back()) return ys.back();
            return 0.0;
        }
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
        const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return ys[i] + t * (ys[i + 1] - ys[i]);
    };
    auto slope = [xs, ys](double x) -> double {
        if (x <= xs.front() || x >= xs.back()) return 0.0;
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
        return (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    };

    Density1D d;
    d.tag = DensityTag::tabulated;
    d.lo = xs.front();
    d.hi = xs.back();
    d.pdf = eval;
    d.log_pdf_deriv = [eval, slope](double x) {
        const double p = eval(x);
        return p > 0.0 ? slope(x) / p : 0.0;
    };
    return d;
}

// quadrature of pdf over the support; density invariant wants this in 1 +- 1e-6
inline QuadResult density_mass(const Density1D& d, double abs_tol = 1e-9) {
    return integrate(d.pdf, d.lo, d.hi, abs_tol);
}

}  // namespace ganlab
