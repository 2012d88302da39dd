#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ganlab/activations.hpp"
#include "ganlab/data_metrics.hpp"
#include "ganlab/losses.hpp"
#include "ganlab/regions.hpp"
#include "ganlab/rng.hpp"
#include "ganlab/tensor_nn.hpp"

// Alternating-update GAN trainer for the tunable-loss variants plus LSGAN,
// with mode-coverage evaluation, divergence-abort handling, and a seed sweep
// driver.
//
// Reported quantities: d_loss is the value the discriminator ascends
// (mean phi(D(real)) + mean psi(D(gen)) for the tunable losses, the squared
// -error objective for LSGAN where lower is better); g_loss is the generator
// objective being descended.

namespace ganlab {

enum class VariantKind { sat, ns, lsgan };

namespace detail {

inline std::string fmt_alpha(double a) {
    if (a == kInf) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", a);
    return buf;
}

}  // namespace detail

struct Variant {
    VariantKind kind = VariantKind::sat;
    double alpha_d = 1.0;
    double alpha_g = 1.0;  // ignored by lsgan (fixed 0-1 targets)

    std::string label() const {
        switch (kind) {
            case VariantKind::sat:
                return "sat(" + detail::fmt_alpha(alpha_d) + "," + detail::fmt_alpha(alpha_g) + ")";
            case VariantKind::ns:
                return "ns(" + detail::fmt_alpha(alpha_d) + "," + detail::fmt_alpha(alpha_g) + ")";
            case VariantKind::lsgan: return "lsgan";
        }
        return "?";
    }
};

struct TrainConfig {
    Variant variant;
    int epochs = 100;
    int batch_size = 128;
    double lr = 1e-4;
    std::vector<int> d_layers = {100, 100, 100};  // hidden sizes; in=2, out=1 implied
    std::vector<int> g_layers = {200, 200, 200};  // hidden sizes; in=latent_dim, out=2 implied
    int latent_dim = 2;
    int n_train = 2500;
    std::uint64_t seed = 0;
    int d_steps_per_g_step = 1;
    int eval_every = 5;
    int eval_samples = 2500;
    Act d_hidden_act = Act::leaky_relu;
    Act d_output_act = Act::sigmoid;
    Act g_hidden_act = Act::leaky_relu;
    Act g_output_act = Act::identity;
};

inline void validate(const TrainConfig& c) {
    if (c.epochs < 0) throw std::invalid_argument("TrainConfig: epochs must be >= 0");
    if (c.batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (!(c.lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be positive");
    if (c.latent_dim < 1) throw std::invalid_argument("TrainConfig: latent_dim must be >= 1");
    if (c.n_train < 0) throw std::invalid_argument("TrainConfig: n_train must be >= 0");
    if (c.epochs > 0 && c.n_train < c.batch_size)
        throw std::invalid_argument("TrainConfig: n_train must cover at least one batch");
    if (c.d_steps_per_g_step < 1)
        throw std::invalid_argument("TrainConfig: d_steps_per_g_step must be >= 1");
    if (c.eval_every < 1) throw std::invalid_argument("TrainConfig: eval_every must be >= 1");
    if (c.eval_samples < 1) throw std::invalid_argument("TrainConfig: eval_samples must be >= 1");
    if (c.d_layers.empty() || c.g_layers.empty())
        throw std::invalid_argument("TrainConfig: need at least one hidden layer");
    for (int s : c.d_layers)
        if (s < 1) throw std::invalid_argument("TrainConfig: d_layers entries must be >= 1");
    for (int s : c.g_layers)
        if (s < 1) throw std::invalid_argument("TrainConfig: g_layers entries must be >= 1");
    if (c.variant.kind != VariantKind::lsgan) {
        if (!(c.variant.alpha_d > 0.0))
            throw std::invalid_argument("TrainConfig: alpha_d must be in (0,inf]");
        if (!(c.variant.alpha_g > 0.0))
            throw std::invalid_argument("TrainConfig: alpha_g must be in (0,inf]");
    }
}

// Outside-region settings are allowed (that is the experiment); callers can
// surface this string as a warning.
inline bool variant_in_region(const Variant& v) {
    switch (v.kind) {
        case VariantKind::sat: return in_region_sat(v.alpha_d, v.alpha_g);
        case VariantKind::ns: return in_region_ns(v.alpha_d, v.alpha_g);
        case VariantKind::lsgan: return true;
    }
    return true;
}

struct RunReport {
    std::uint64_t seed = 0;
    std::vector<int> eval_epochs;     // epochs at which coverage was measured (0 = init)
    std::vector<int> coverage_trace;  // same length as eval_epochs
    int final_coverage = 0;
    std::string classification;       // "success" | "failure" | "partial"
    std::vector<double> d_loss_trace;  // per-epoch batch means
    std::vector<double> g_loss_trace;
    double wall_time_sec = 0.0;
    bool in_region = true;
    bool aborted = false;
    std::string diagnostic;
};

// ---------------------------------------------------------------------------
// seed streams

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent per-purpose streams from one user seed:
// 0 data, 1 D init, 2 G init, 3 training noise, 4 shuffling, 5 eval noise.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) + stream);
}

}  // namespace detail

// Training set for one run: the ring resampled at n_train points on the
// run's data stream.
inline Mat make_train_data(const RingSpec& ring, const TrainConfig& cfg) {
    RingSpec s = ring;
    s.n_samples = cfg.n_train;
    return sample_ring(s, detail::split_seed(cfg.seed, 0));
}

// ---------------------------------------------------------------------------
// one training step

struct GanState {
    Mlp d;
    Mlp g;
    AdamState opt_d;
    AdamState opt_g;
    Rng noise_rng{0};
    Rng shuffle_rng{0};
    Rng eval_rng{0};
    int latent_dim = 2;
    int bad_streak = 0;
};

inline GanState init_gan(const TrainConfig& cfg) {
    validate(cfg);
    std::vector<int> d_sizes{2};
    d_sizes.insert(d_sizes.end(), cfg.d_layers.begin(), cfg.d_layers.end());
    d_sizes.push_back(1);
    std::vector<int> g_sizes{cfg.latent_dim};
    g_sizes.insert(g_sizes.end(), cfg.g_layers.begin(), cfg.g_layers.end());
    g_sizes.push_back(2);
    std::vector<Act> d_acts(cfg.d_layers.size(), cfg.d_hidden_act);
    d_acts.push_back(cfg.d_output_act);
    std::vector<Act> g_acts(cfg.g_layers.size(), cfg.g_hidden_act);
    g_acts.push_back(cfg.g_output_act);

    GanState st;
    Rng rd(detail::split_seed(cfg.seed, 1));
    Rng rg(detail::split_seed(cfg.seed, 2));
    st.d = make_mlp(d_sizes, d_acts, rd);
    st.g = make_mlp(g_sizes, g_acts, rg);
    st.opt_d = make_adam(st.d);
    st.opt_g = make_adam(st.g);
    st.noise_rng = Rng(detail::split_seed(cfg.seed, 3));
    st.shuffle_rng = Rng(detail::split_seed(cfg.seed, 4));
    st.eval_rng = Rng(detail::split_seed(cfg.seed, 5));
    st.latent_dim = cfg.latent_dim;
    return st;
}

namespace detail {

inline Mat draw_noise(Rng& rng, int n, int dim) {
    Mat z(n, dim);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j) z(i, j) = rng.normal();
    return z;
}

inline constexpr double kClampLo = 1e-7;
inline constexpr double kClampHi = 1.0 - 1e-7;

inline Mat clamp_unit(const Mat& y) {
    return y.unaryExpr([](double v) {
        if (std::isnan(v)) return v;
        return std::min(std::max(v, kClampLo), kClampHi);
    });
}

inline void add_grads(Gradients& acc, const Gradients& g) {
    for (std::size_t i = 0; i < acc.d_weights.size(); ++i) {
        acc.d_weights[i] += g.d_weights[i];
        acc.d_biases[i] += g.d_biases[i];
    }
}

inline bool grads_finite(const Gradients& g) {
    for (const Mat& w : g.d_weights)
        if (!w.allFinite()) return false;
    for (const Vec& b : g.d_biases)
        if (!b.allFinite()) return false;
    return true;
}

}  // namespace detail

// Clamped discriminator outputs from the step, one column each, for
// invariant checks against directly evaluated value functions.
struct StepTrace {
    Mat y_real;       // D(real) in the D step
    Mat y_fake_d;     // D(G(z)) in the D step
    Mat y_fake_g;     // D(G(z)) in the G step (post-D-update)
    Mat y_real_post;  // D(real) after the D update (saturating g_loss real term)
};

struct StepLosses {
    double d_loss = 0.0;
    double g_loss = std::numeric_limits<double>::quiet_NaN();  // NaN when no G step taken
    bool finite = true;
};

// One D update on real_batch (+ a fresh generated batch), then optionally one
// G update on another fresh generated batch. Non-finite losses or gradients
// skip the corresponding parameter update and mark the step not finite.
inline StepLosses gan_step(const TrainConfig& cfg, GanState& st, const Mat& real_batch,
                           bool do_g_step, StepTrace* trace = nullptr) {
    const int b = static_cast<int>(real_batch.rows());
    if (b < 1) throw std::invalid_argument("gan_step: empty batch");
    const bool cpe = cfg.variant.kind != VariantKind::lsgan;
    const double ad = cfg.variant.alpha_d;
    const double ag = cfg.variant.alpha_g;
    StepLosses out;

    // --- discriminator step ---
    const Mat z_d = detail::draw_noise(st.noise_rng, b, st.latent_dim);
    const Mat x_fake = forward(st.g, z_d);
    ForwardCache cache_r, cache_f;
    const Mat y_r_raw = forward(st.d, real_batch, &cache_r);
    const Mat y_f_raw = forward(st.d, x_fake, &cache_f);
    const Mat y_r = cpe ? detail::clamp_unit(y_r_raw) : y_r_raw;
    const Mat y_f = cpe ? detail::clamp_unit(y_f_raw) : y_f_raw;
    if (trace) {
        trace->y_real = y_r;
        trace->y_fake_d = y_f;
    }

    Mat grad_r(b, 1), grad_f(b, 1);
    double v_real = 0.0, v_fake = 0.0;
    if (cpe) {
        for (int i = 0; i < b; ++i) {
            v_real += -alpha_loss(ad, 1, y_r(i, 0));
            v_fake += -alpha_loss(ad, 0, y_f(i, 0));
            grad_r(i, 0) = alpha_loss_deriv(ad, 1, y_r(i, 0)) / b;   // descend -V
            grad_f(i, 0) = alpha_loss_deriv(ad, 0, y_f(i, 0)) / b;
        }
        out.d_loss = (v_real + v_fake) / b;
    } else {
        for (int i = 0; i < b; ++i) {
            v_real += 0.5 * (y_r(i, 0) - 1.0) * (y_r(i, 0) - 1.0);
            v_fake += 0.5 * y_f(i, 0) * y_f(i, 0);
            grad_r(i, 0) = (y_r(i, 0) - 1.0) / b;
            grad_f(i, 0) = y_f(i, 0) / b;
        }
        out.d_loss = (v_real + v_fake) / b;
    }

    bool step_finite = std::isfinite(out.d_loss) && grad_r.allFinite() && grad_f.allFinite();
    if (step_finite) {
        Gradients gd = backward(st.d, cache_r, grad_r);
        detail::add_grads(gd, backward(st.d, cache_f, grad_f));
        if (detail::grads_finite(gd)) {
            adam_step(st.d, st.opt_d, gd, cfg.lr);
        } else {
            step_finite = false;
        }
    }

    // --- generator step ---
    if (do_g_step) {
        const Mat z_g = detail::draw_noise(st.noise_rng, b, st.latent_dim);
        ForwardCache cache_g, cache_dg;
        const Mat x_g = forward(st.g, z_g, &cache_g);
        const Mat y_g_raw = forward(st.d, x_g, &cache_dg);
        const Mat y_g = cpe ? detail::clamp_unit(y_g_raw) : y_g_raw;
        if (trace) trace->y_fake_g = y_g;

        Mat grad_y(b, 1);
        double g_obj = 0.0;
        switch (cfg.variant.kind) {
            case VariantKind::sat:
                for (int i = 0; i < b; ++i) {
                    g_obj += -alpha_loss(ag, 0, y_g(i, 0));
                    grad_y(i, 0) = -alpha_loss_deriv(ag, 0, y_g(i, 0)) / b;
                }
                break;
            case VariantKind::ns:
                for (int i = 0; i < b; ++i) {
                    g_obj += alpha_loss(ag, 1, y_g(i, 0));
                    grad_y(i, 0) = alpha_loss_deriv(ag, 1, y_g(i, 0)) / b;
                }
                break;
            case VariantKind::lsgan:
                for (int i = 0; i < b; ++i) {
                    g_obj += 0.5 * (y_g(i, 0) - 1.0) * (y_g(i, 0) - 1.0);
                    grad_y(i, 0) = (y_g(i, 0) - 1.0) / b;
                }
                break;
        }
        out.g_loss = g_obj / b;

        if (cfg.variant.kind == VariantKind::sat) {
            // real term of V_{alpha_G}: constant in the generator, reported only
            const Mat y_rp = detail::clamp_unit(forward(st.d, real_batch));
            if (trace) trace->y_real_post = y_rp;
            double v_rp = 0.0;
            for (int i = 0; i < b; ++i) v_rp += -alpha_loss(ag, 1, y_rp(i, 0));
            out.g_loss += v_rp / b;
        } else if (trace) {
            trace->y_real_post = Mat(0, 1);
        }

        bool g_finite = grad_y.allFinite();
        if (g_finite) {
            const Gradients thru_d = backward(st.d, cache_dg, grad_y);
            const Gradients gg = backward(st.g, cache_g, thru_d.d_input);
            if (detail::grads_finite(gg)) {
                adam_step(st.g, st.opt_g, gg, cfg.lr);
            } else {
                g_finite = false;
            }
        }
        step_finite = step_finite && g_finite && std::isfinite(out.g_loss);
    }

    out.finite = step_finite;
    st.bad_streak = step_finite ? 0 : st.bad_streak + 1;
    return out;
}

// ---------------------------------------------------------------------------
// full run

namespace detail {

inline int eval_coverage(const TrainConfig& cfg, GanState& st, const RingSpec& ring) {
    const Mat z = draw_noise(st.eval_rng, cfg.eval_samples, st.latent_dim);
    const Mat x = forward(st.g, z);
    return mode_coverage(x, ring);
}

inline std::string classify(int coverage, int n_modes, bool aborted) {
    if (aborted) return "failure";
    if (coverage == n_modes) return "success";
    if (coverage == 0) return "failure";
    return "partial";
}

inline constexpr int kAbortStreak = 50;

}  // namespace detail

inline RunReport train(const TrainConfig& cfg, const Mat& data, const RingSpec& ring) {
    validate(cfg);
    if (data.cols() != 2) throw std::invalid_argument("train: data must be n x 2");
    if (cfg.epochs > 0 && data.rows() < cfg.batch_size)
        throw std::invalid_argument("train: dataset smaller than one batch");
    const auto t0 = std::chrono::steady_clock::now();

    GanState st = init_gan(cfg);
    RunReport rep;
    rep.seed = cfg.seed;
    rep.in_region = variant_in_region(cfg.variant);

    rep.eval_epochs.push_back(0);
    rep.coverage_trace.push_back(detail::eval_coverage(cfg, st, ring));

    const int n = static_cast<int>(data.rows());
    const int n_batches = n / cfg.batch_size;
    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    int g_counter = 0;

    for (int epoch = 1; epoch <= cfg.epochs && !rep.aborted; ++epoch) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        st.shuffle_rng.shuffle(order);

        double d_acc = 0.0, g_acc = 0.0;
        int g_steps = 0;
        Mat batch(cfg.batch_size, 2);
        for (int bi = 0; bi < n_batches; ++bi) {
            for (int r = 0; r < cfg.batch_size; ++r) {
                const std::size_t src = order[static_cast<std::size_t>(bi * cfg.batch_size + r)];
                batch(r, 0) = data(static_cast<Eigen::Index>(src), 0);
                batch(r, 1) = data(static_cast<Eigen::Index>(src), 1);
            }
            const bool do_g = ++g_counter % cfg.d_steps_per_g_step == 0;
            const StepLosses sl = gan_step(cfg, st, batch, do_g);
            d_acc += sl.d_loss;
            if (do_g) {
                g_acc += sl.g_loss;
                ++g_steps;
            }
            if (!sl.finite && rep.diagnostic.empty())
                rep.diagnostic = "non-finite loss or gradient first hit at epoch " +
                                 std::to_string(epoch) + ", batch " + std::to_string(bi);
            if (st.bad_streak >= detail::kAbortStreak) {
                rep.aborted = true;
                rep.diagnostic += "; aborted after " + std::to_string(detail::kAbortStreak) +
                                  " consecutive non-finite minibatches";
                break;
            }
        }
        rep.d_loss_trace.push_back(n_batches > 0 ? d_acc / n_batches : 0.0);
        rep.g_loss_trace.push_back(g_steps > 0 ? g_acc / g_steps
                                               : std::numeric_limits<double>::quiet_NaN());

        if (epoch % cfg.eval_every == 0 || epoch == cfg.epochs || rep.aborted) {
            rep.eval_epochs.push_back(epoch);
            rep.coverage_trace.push_back(detail::eval_coverage(cfg, st, ring));
        }
    }

    rep.final_coverage = rep.coverage_trace.back();
    rep.classification = detail::classify(rep.final_coverage, ring.n_modes, rep.aborted);
    rep.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---------------------------------------------------------------------------
// sweeps

struct SweepRow {
    std::string variant;
    int seeds = 0;
    double success_pct = 0.0;
    double failure_pct = 0.0;
    double mean_coverage = 0.0;
};

// Runs every variant x seed combination; each run gets its own training set
// derived from its seed. reports_out, when given, receives all reports in
// variant-major order, seed-sorted within a variant.
inline std::vector<SweepRow> sweep(const TrainConfig& base, const RingSpec& ring,
                                   const std::vector<Variant>& variants,
                                   const std::vector<std::uint64_t>& seeds, int workers = 1,
                                   std::vector<RunReport>* reports_out = nullptr) {
    if (variants.empty() || seeds.empty())
        throw std::invalid_argument("sweep: need at least one variant and one seed");
    validate(base);
    const std::size_t total = variants.size() * seeds.size();
    std::vector<RunReport> reports(total);

    const auto run_one = [&](std::size_t idx) {
        const std::size_t vi = idx / seeds.size();
        const std::size_t si = idx % seeds.size();
        TrainConfig cfg = base;
        cfg.variant = variants[vi];
        cfg.seed = seeds[si];
        const Mat data = make_train_data(ring, cfg);
        reports[idx] = train(cfg, data, ring);
    };

    if (workers <= 1 || total == 1) {
        for (std::size_t i = 0; i < total; ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        const auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) run_one(i);
        };
        std::vector<std::thread> pool;
        const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), total);
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<SweepRow> rows;
    rows.reserve(variants.size());
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
        auto begin = reports.begin() + static_cast<std::ptrdiff_t>(vi * seeds.size());
        std::sort(begin, begin + static_cast<std::ptrdiff_t>(seeds.size()),
                  [](const RunReport& a, const RunReport& b) { return a.seed < b.seed; });
        SweepRow row;
        row.variant = variants[vi].label();
        row.seeds = static_cast<int>(seeds.size());
        int succ = 0, fail = 0;
        double cov = 0.0;
        for (std::size_t si = 0; si < seeds.size(); ++si) {
            const RunReport& r = reports[vi * seeds.size() + si];
            succ += r.classification == "success";
            fail += r.classification == "failure";
            cov += r.final_coverage;
        }
        row.success_pct = 100.0 * succ / static_cast<double>(seeds.size());
        row.failure_pct = 100.0 * fail / static_cast<double>(seeds.size());
        row.mean_coverage = cov / static_cast<double>(seeds.size());
        rows.push_back(row);
    }
    if (reports_out) *reports_out = std::move(reports);
    return rows;
}

// ---------------------------------------------------------------------------
// CSV emitters

inline void write_trace_csv(std::ostream& os, const RunReport& rep) {
    os << "epoch,coverage,d_loss,g_loss\n";
    char buf[128];
    for (std::size_t i = 0; i < rep.eval_epochs.size(); ++i) {
        const int e = rep.eval_epochs[i];
        const double dl =
            e >= 1 && e <= static_cast<int>(rep.d_loss_trace.size())
                ? rep.d_loss_trace[static_cast<std::size_t>(e - 1)]
                : std::numeric_limits<double>::quiet_NaN();
        const double gl =
            e >= 1 && e <= static_cast<int>(rep.g_loss_trace.size())
                ? rep.g_loss_trace[static_cast<std::size_t>(e - 1)]
                : std::numeric_limits<double>::quiet_NaN();
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", e, rep.coverage_trace[i], dl, gl);
        os << buf;
    }
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "variant,seeds,success_pct,failure_pct,mean_coverage\n";
    char buf[192];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%.17g\n", r.variant.c_str(), r.seeds,
                      r.success_pct, r.failure_pct, r.mean_coverage);
        os << buf;
    }
}

}  // namespace ganlab
