// ganlab: command-line front end over the header library.
//
// Every subcommand writes its artifacts into --out (one directory per
// invocation, containing config.resolved plus CSV/JSON files) and prints a
// JSON summary to stdout. All diagnostics go to stderr as single-line JSON
// with a nonzero exit code. Outputs are byte-identical across reruns with
// the same settings, except for wall-time fields in training reports.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ganlab/ganlab.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using njson = nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_real(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "INF") return ganlab::kInf;
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad number '" + s + "'");
    }
    if (pos != s.size()) throw std::invalid_argument("bad number '" + s + "'");
    return v;
}

std::vector<double> parse_real_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const std::string& tok : split(s, ','))
        if (!tok.empty()) out.push_back(parse_real(tok));
    if (out.empty()) throw std::invalid_argument(what + " is empty");
    return out;
}

// axis spec lo:hi:count, inclusive endpoints
std::vector<double> parse_axis(const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3)
        throw std::invalid_argument("grid spec must be lo:hi:count, got '" + spec + "'");
    const double lo = parse_real(parts[0]);
    const double hi = parse_real(parts[1]);
    long n = 0;
    try {
        n = std::stol(parts[2]);
    } catch (const std::exception&) {
        throw std::invalid_argument("grid spec must be lo:hi:count, got '" + spec + "'");
    }
    if (n < 1) throw std::invalid_argument("grid spec needs count >= 1");
    if (!(hi >= lo)) throw std::invalid_argument("grid spec needs hi >= lo");
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        xs.push_back(lo);
    } else {
        for (long i = 0; i < n; ++i)
            xs.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return xs;
}

std::uint64_t parse_seed(const std::string& s) {
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad seed '" + s + "'");
    }
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
    std::vector<std::uint64_t> out;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        const std::uint64_t a = parse_seed(s.substr(0, dots));
        const std::uint64_t b = parse_seed(s.substr(dots + 2));
        if (b < a) throw std::invalid_argument("seed range must be a..b with b >= a");
        for (std::uint64_t v = a; v <= b; ++v) out.push_back(v);
    } else {
        for (const std::string& tok : split(s, ','))
            if (!tok.empty()) out.push_back(parse_seed(tok));
    }
    if (out.empty()) throw std::invalid_argument("seed list is empty");
    return out;
}

ganlab::Variant parse_variant(const std::string& s) {
    const auto parts = split(s, ':');
    ganlab::Variant v;
    if (parts[0] == "lsgan") {
        if (parts.size() != 1)
            throw std::invalid_argument("lsgan takes no alphas (got '" + s + "')");
        v.kind = ganlab::VariantKind::lsgan;
        return v;
    }
    if (parts[0] == "sat") {
        v.kind = ganlab::VariantKind::sat;
    } else if (parts[0] == "ns") {
        v.kind = ganlab::VariantKind::ns;
    } else {
        throw std::invalid_argument("unknown variant tag '" + parts[0] +
                                    "' (expected sat, ns, or lsgan)");
    }
    if (parts.size() != 3)
        throw std::invalid_argument("variant spec must be kind:alpha_d:alpha_g, got '" + s + "'");
    v.alpha_d = parse_real(parts[1]);
    v.alpha_g = parse_real(parts[2]);
    return v;
}

ganlab::Density1D parse_gaussian(const std::string& s, const std::string& what) {
    const auto parts = split(s, ',');
    if (parts.size() != 2)
        throw std::invalid_argument(what + " must be mu,sigma (got '" + s + "')");
    const double mu = parse_real(parts[0]);
    const double sigma = parse_real(parts[1]);
    if (!(sigma > 0.0)) throw std::invalid_argument(what + ": sigma must be positive");
    return ganlab::make_gaussian(mu, sigma);
}

// x-window covering the meat of both densities
std::pair<double, double> auto_window(const ganlab::Density1D& p, const ganlab::Density1D& q) {
    double lo = ganlab::kInf;
    double hi = -ganlab::kInf;
    for (const auto* d : {&p, &q}) {
        for (const auto& c : d->components) {
            lo = std::min(lo, c.mu - 4.0 * c.sigma);
            hi = std::max(hi, c.mu + 4.0 * c.sigma);
        }
    }
    if (!(lo < hi)) {
        lo = std::max(p.lo, q.lo);
        hi = std::min(p.hi, q.hi);
    }
    return {lo, hi};
}

njson load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    njson j;
    in >> j;
    return j;
}

void check_keys(const njson& j, const std::vector<std::string>& allowed,
                const std::string& scope) {
    if (!j.is_object()) throw std::invalid_argument(scope + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw std::invalid_argument(scope + ": unknown key '" + it.key() + "'");
    }
}

double real_from_json(const njson& v) {
    if (v.is_string()) return parse_real(v.get<std::string>());
    return v.get<double>();
}

ganlab::Variant variant_from_json(const njson& v) {
    if (v.is_string()) return parse_variant(v.get<std::string>());
    check_keys(v, {"kind", "alpha_d", "alpha_g"}, "variant");
    ganlab::Variant out = parse_variant(v.at("kind").get<std::string>() == "lsgan"
                                            ? std::string("lsgan")
                                            : v.at("kind").get<std::string>() + ":1:1");
    if (v.contains("alpha_d")) out.alpha_d = real_from_json(v["alpha_d"]);
    if (v.contains("alpha_g")) out.alpha_g = real_from_json(v["alpha_g"]);
    return out;
}

ojson real_to_json(double v) {
    if (v == ganlab::kInf) return ojson("inf");
    return ojson(v);
}

ojson variant_to_json(const ganlab::Variant& v) {
    ojson o;
    switch (v.kind) {
        case ganlab::VariantKind::sat: o["kind"] = "sat"; break;
        case ganlab::VariantKind::ns: o["kind"] = "ns"; break;
        case ganlab::VariantKind::lsgan: o["kind"] = "lsgan"; return o;
    }
    o["alpha_d"] = real_to_json(v.alpha_d);
    o["alpha_g"] = real_to_json(v.alpha_g);
    return o;
}

fs::path prep_out_dir(const std::string& dir) {
    const fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
    return p;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void echo_config(const fs::path& dir, const ojson& resolved) {
    write_file(dir / "config.resolved", resolved.dump(2) + "\n");
}

ojson files_summary(const fs::path& dir, std::vector<std::string> files) {
    ojson o;
    o["out_dir"] = dir.string();
    o["files"] = std::move(files);
    return o;
}

// ---------------------------------------------------------------------------
// training configuration (shared by train and sweep)

struct TrainSetup {
    ganlab::TrainConfig cfg;
    ganlab::RingSpec ring;
    bool d_output_act_set = false;
    std::vector<ganlab::Variant> variants;
    std::vector<std::uint64_t> seeds;
};

void apply_train_json(TrainSetup& ts, const njson& j, bool sweep_mode) {
    std::vector<std::string> allowed = {
        "variant",       "epochs",       "batch_size",   "lr",           "d_layers",
        "g_layers",      "latent_dim",   "n_train",      "seed",         "d_steps_per_g_step",
        "eval_every",    "eval_samples", "d_hidden_act", "d_output_act", "g_hidden_act",
        "g_output_act",  "ring"};
    if (sweep_mode) {
        allowed.push_back("variants");
        allowed.push_back("seeds");
    }
    check_keys(j, allowed, "config");

    ganlab::TrainConfig& c = ts.cfg;
    if (j.contains("variant")) c.variant = variant_from_json(j["variant"]);
    if (j.contains("epochs")) c.epochs = j["epochs"].get<int>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<int>();
    if (j.contains("lr")) c.lr = j["lr"].get<double>();
    if (j.contains("d_layers")) c.d_layers = j["d_layers"].get<std::vector<int>>();
    if (j.contains("g_layers")) c.g_layers = j["g_layers"].get<std::vector<int>>();
    if (j.contains("latent_dim")) c.latent_dim = j["latent_dim"].get<int>();
    if (j.contains("n_train")) c.n_train = j["n_train"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("d_steps_per_g_step"))
        c.d_steps_per_g_step = j["d_steps_per_g_step"].get<int>();
    if (j.contains("eval_every")) c.eval_every = j["eval_every"].get<int>();
    if (j.contains("eval_samples")) c.eval_samples = j["eval_samples"].get<int>();
    if (j.contains("d_hidden_act"))
        c.d_hidden_act = ganlab::act_from_string(j["d_hidden_act"].get<std::string>());
    if (j.contains("d_output_act")) {
        c.d_output_act = ganlab::act_from_string(j["d_output_act"].get<std::string>());
        ts.d_output_act_set = true;
    }
    if (j.contains("g_hidden_act"))
        c.g_hidden_act = ganlab::act_from_string(j["g_hidden_act"].get<std::string>());
    if (j.contains("g_output_act"))
        c.g_output_act = ganlab::act_from_string(j["g_output_act"].get<std::string>());
    if (j.contains("ring")) {
        const njson& r = j["ring"];
        check_keys(r, {"n_modes", "radius", "variance"}, "config.ring");
        if (r.contains("n_modes")) ts.ring.n_modes = r["n_modes"].get<int>();
        if (r.contains("radius")) ts.ring.radius = r["radius"].get<double>();
        if (r.contains("variance")) ts.ring.variance = r["variance"].get<double>();
    }
    if (sweep_mode && j.contains("variants")) {
        ts.variants.clear();
        for (const njson& v : j["variants"]) ts.variants.push_back(variant_from_json(v));
    }
    if (sweep_mode && j.contains("seeds")) {
        ts.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    }
}

ojson train_resolved(const TrainSetup& ts) {
    const ganlab::TrainConfig& c = ts.cfg;
    ojson o;
    o["variant"] = variant_to_json(c.variant);
    o["epochs"] = c.epochs;
    o["batch_size"] = c.batch_size;
    o["lr"] = c.lr;
    o["d_layers"] = c.d_layers;
    o["g_layers"] = c.g_layers;
    o["latent_dim"] = c.latent_dim;
    o["n_train"] = c.n_train;
    o["seed"] = c.seed;
    o["d_steps_per_g_step"] = c.d_steps_per_g_step;
    o["eval_every"] = c.eval_every;
    o["eval_samples"] = c.eval_samples;
    o["d_hidden_act"] = ganlab::to_string(c.d_hidden_act);
    o["d_output_act"] = ganlab::to_string(c.d_output_act);
    o["g_hidden_act"] = ganlab::to_string(c.g_hidden_act);
    o["g_output_act"] = ganlab::to_string(c.g_output_act);
    ojson ring;
    ring["n_modes"] = ts.ring.n_modes;
    ring["radius"] = ts.ring.radius;
    ring["variance"] = ts.ring.variance;
    o["ring"] = ring;
    return o;
}

ojson report_to_json(const ganlab::RunReport& r, const std::string& variant_label) {
    ojson o;
    o["seed"] = r.seed;
    o["variant"] = variant_label;
    o["in_region"] = r.in_region;
    o["classification"] = r.classification;
    o["final_coverage"] = r.final_coverage;
    o["aborted"] = r.aborted;
    o["diagnostic"] = r.diagnostic;
    o["eval_epochs"] = r.eval_epochs;
    o["coverage_trace"] = r.coverage_trace;
    o["d_loss_trace"] = r.d_loss_trace;
    o["g_loss_trace"] = r.g_loss_trace;
    o["wall_time_sec"] = r.wall_time_sec;
    return o;
}

// ---------------------------------------------------------------------------
// subcommand options

struct LossCurvesOpts {
    std::string scenario = "fig1";
    std::string alpha_list = "0.2,0.5,1,3";
    std::string alpha_g = "1";
    int grid_points = 201;
    std::string x_min, x_max;
    std::string out;
};

struct DivergenceOpts {
    std::string f = "f_alpha";
    std::string alpha = "1";
    std::string alpha_d = "1";
    std::string alpha_g = "1";
    std::string p = "0,1";
    std::string q = "1,1";
    double abs_tol = 1e-7;
    std::string out;
};

struct RegionOpts {
    std::string mode;
    std::string grid = "0.2:5:25";
    std::string grid_d, grid_g;
    std::string out;
};

struct GradientOpts {
    std::string scenario = "fig1";
    std::string alpha_d = "1";
    std::string alpha_g = "1";
    std::string mode = "sat";
    int grid_points = 201;
    std::string x_min, x_max;
    std::string out;
};

struct BoundsOpts {
    std::string config;
    std::string out;
};

struct EquivalenceOpts {
    std::string alpha_list = "0.5,1,2,5";
    int grid_points = 99;
    std::string out;
};

struct TrainOpts {
    std::string config;
    std::string out;
    std::string variant;
    std::string seeds;  // sweep only
    std::string variants;
    int workers = 0;
};

int cmd_loss_curves(const LossCurvesOpts& o) {
    const ganlab::Scenario sc = ganlab::figure_scenario(o.scenario);
    const std::vector<double> alphas = parse_real_list(o.alpha_list, "--alpha-list");
    const double ag = parse_real(o.alpha_g);
    if (o.grid_points < 2) throw std::invalid_argument("--grid-points must be >= 2");
    auto [lo, hi] = auto_window(sc.p_r, sc.p_g);
    if (!o.x_min.empty()) lo = parse_real(o.x_min);
    if (!o.x_max.empty()) hi = parse_real(o.x_max);
    if (!(lo < hi)) throw std::invalid_argument("need x_min < x_max");

    std::ostringstream csv;
    csv << "x,alpha_d,alpha_g,d_star,sat_loss,ns_loss,grad\n";
    for (double ad : alphas) {
        for (int i = 0; i < o.grid_points; ++i) {
            const double x = lo + (hi - lo) * i / (o.grid_points - 1);
            const double d = ganlab::optimal_disc(sc.p_r, sc.p_g, ad, x);
            const double sat = ganlab::gen_loss_at(sc.p_r, sc.p_g, ad, ag, x, true);
            const double ns = ganlab::gen_loss_at(sc.p_r, sc.p_g, ad, ag, x, false);
            double grad = std::nan("");
            if (sc.p_r.pdf(x) > 0.0 && sc.p_g.pdf(x) > 0.0)
                grad = ganlab::gen_loss_spatial_grad(sc.p_r, sc.p_g, ad, ag, x, true).grad;
            csv << fmt17(x) << ',' << fmt17(ad) << ',' << fmt17(ag) << ',' << fmt17(d) << ','
                << fmt17(sat) << ',' << fmt17(ns) << ',' << fmt17(grad) << '\n';
        }
    }

    const fs::path dir = prep_out_dir(o.out);
    write_file(dir / "loss_curves.csv", csv.str());
    ojson resolved;
    resolved["command"] = "loss-curves";
    resolved["scenario"] = o.scenario;
    resolved["alpha_list"] = alphas;
    resolved["alpha_g"] = real_to_json(ag);
    resolved["grid_points"] = o.grid_points;
    resolved["x_min"] = lo;
    resolved["x_max"] = hi;
    echo_config(dir, resolved);
    std::cout << files_summary(dir, {"loss_curves.csv", "config.resolved"}).dump() << "\n";
    return 0;
}

int cmd_divergence(const DivergenceOpts& o) {
    const ganlab::Density1D P = parse_gaussian(o.p, "--p");
    const ganlab::Density1D Q = parse_gaussian(o.q, "--q");
    const double alpha = parse_real(o.alpha);
    const double ad = parse_real(o.alpha_d);
    const double ag = parse_real(o.alpha_g);

    ganlab::FGen fg;
    double constant = 0.0;
    if (o.f == "f_alpha") {
        fg = ganlab::make_f_alpha(alpha);
    } else if (o.f == "f_alpha_sym") {
        fg = ganlab::make_f_alpha_symmetric(alpha);
    } else if (o.f == "f_tilde") {
        fg = ganlab::make_f_tilde(alpha);
    } else if (o.f == "f_sat") {
        fg = ganlab::make_f_sat(ad, ag);
        constant = ganlab::gen_obj_constant(ag, true);
    } else if (o.f == "f_ns") {
        fg = ganlab::make_f_ns(ad, ag);
        constant = ganlab::gen_obj_constant(ag, false);
    } else {
        throw std::invalid_argument(
            "unknown f tag '" + o.f +
            "' (expected f_alpha, f_alpha_sym, f_tilde, f_sat, or f_ns)");
    }

    const ganlab::DivergenceResult r = ganlab::f_divergence(fg, P, Q, o.abs_tol);
    ojson rep;
    rep["divergence"] = r.value;
    rep["constant"] = constant;
    rep["total_generator_objective"] = r.value + constant;
    std::cout << rep.dump(2) << "\n";

    if (!o.out.empty()) {
        const fs::path dir = prep_out_dir(o.out);
        write_file(dir / "divergence.json", rep.dump(2) + "\n");
        ojson resolved;
        resolved["command"] = "divergence";
        resolved["f"] = o.f;
        resolved["alpha"] = real_to_json(alpha);
        resolved["alpha_d"] = real_to_json(ad);
        resolved["alpha_g"] = real_to_json(ag);
        resolved["p"] = o.p;
        resolved["q"] = o.q;
        resolved["abs_tol"] = o.abs_tol;
        echo_config(dir, resolved);
    }
    return 0;
}

int cmd_region(const RegionOpts& o) {
    if (o.mode != "sat" && o.mode != "ns")
        throw std::invalid_argument("--mode must be sat or ns (got '" + o.mode + "')");
    const std::vector<double> ads = parse_axis(o.grid_d.empty() ? o.grid : o.grid_d);
    const std::vector<double> ags = parse_axis(o.grid_g.empty() ? o.grid : o.grid_g);

    std::ostringstream csv;
    csv << "alpha_d,alpha_g,in_region,tag,witness_u,witness_f2\n";
    for (double ad : ads) {
        for (double ag : ags) {
            const ganlab::RegionVerdict v = o.mode == "sat" ? ganlab::verify_region_sat(ad, ag)
                                                            : ganlab::verify_region_ns(ad, ag);
            csv << fmt17(ad) << ',' << fmt17(ag) << ',' << (v.in_region ? 1 : 0) << ','
                << ganlab::to_string(v.tag) << ',';
            if (v.witness) {
                csv << fmt17(v.witness->u) << ',' << fmt17(v.witness->f2);
            } else {
                csv << ',';
            }
            csv << '\n';
        }
    }

    const fs::path dir = prep_out_dir(o.out);
    write_file(dir / "region.csv", csv.str());
    ojson resolved;
    resolved["command"] = "region";
    resolved["mode"] = o.mode;
    resolved["alpha_d_grid"] = ads;
    resolved["alpha_g_grid"] = ags;
    echo_config(dir, resolved);
    std::cout << files_summary(dir, {"region.csv", "config.resolved"}).dump() << "\n";
    return 0;
}

int cmd_gradient(const GradientOpts& o) {
    const ganlab::Scenario sc = ganlab::figure_scenario(o.scenario);
    if (o.mode != "sat" && o.mode != "ns")
        throw std::invalid_argument("--mode must be sat or ns (got '" + o.mode + "')");
    const bool saturating = o.mode == "sat";
    const double ad = parse_real(o.alpha_d);
    const double ag = parse_real(o.alpha_g);
    if (o.grid_points < 2) throw std::invalid_argument("--grid-points must be >= 2");
    auto [lo, hi] = auto_window(sc.p_r, sc.p_g);
    if (!o.x_min.empty()) lo = parse_real(o.x_min);
    if (!o.x_max.empty()) hi = parse_real(o.x_max);
    if (!(lo < hi)) throw std::invalid_argument("need x_min < x_max");

    std::ostringstream csv;
    csv << "x,d_star,loss,grad,c\n";
    for (int i = 0; i < o.grid_points; ++i) {
        const double x = lo + (hi - lo) * i / (o.grid_points - 1);
        if (!(sc.p_r.pdf(x) > 0.0) || !(sc.p_g.pdf(x) > 0.0)) continue;
        const double d = ganlab::optimal_disc(sc.p_r, sc.p_g, ad, x);
        const double loss = ganlab::gen_loss_at(sc.p_r, sc.p_g, ad, ag, x, saturating);
        const ganlab::GradientSample g =
            ganlab::gen_loss_spatial_grad(sc.p_r, sc.p_g, ad, ag, x, saturating);
        csv << fmt17(x) << ',' << fmt17(d) << ',' << fmt17(loss) << ',' << fmt17(g.grad) << ','
            << fmt17(g.scalar) << '\n';
    }

    const fs::path dir = prep_out_dir(o.out);
    write_file(dir / "gradient.csv", csv.str());
    ojson resolved;
    resolved["command"] = "gradient";
    resolved["scenario"] = o.scenario;
    resolved["alpha_d"] = real_to_json(ad);
    resolved["alpha_g"] = real_to_json(ag);
    resolved["mode"] = o.mode;
    resolved["grid_points"] = o.grid_points;
    resolved["x_min"] = lo;
    resolved["x_max"] = hi;
    echo_config(dir, resolved);
    std::cout << files_summary(dir, {"gradient.csv", "config.resolved"}).dump() << "\n";
    return 0;
}

ganlab::NetSpec net_from_json(const njson& j, const std::string& scope) {
    check_keys(j, {"layer_norms", "activation_lipschitz", "depth", "input_bound",
                   "activation_kinds"},
               scope);
    ganlab::NetSpec s;
    s.layer_norms = j.at("layer_norms").get<std::vector<double>>();
    s.activation_lipschitz = j.at("activation_lipschitz").get<std::vector<double>>();
    s.depth = j.contains("depth") ? j["depth"].get<int>()
                                  : static_cast<int>(s.layer_norms.size());
    if (j.contains("input_bound")) s.input_bound = j["input_bound"].get<double>();
    if (j.contains("activation_kinds"))
        for (const njson& a : j["activation_kinds"])
            s.activation_kinds.push_back(ganlab::act_from_string(a.get<std::string>()));
    return s;
}

int cmd_bounds(const BoundsOpts& o, const std::optional<long long>& n_flag,
               const std::optional<long long>& m_flag, const std::optional<double>& delta_flag,
               const std::optional<std::string>& alpha_g_flag) {
    if (o.config.empty()) throw std::invalid_argument("bounds: --config is required");
    const njson j = load_json_file(o.config);
    check_keys(j, {"d", "g", "n", "m", "delta", "alpha_g", "l_phi", "l_psi", "threshold",
                   "fano"},
               "config");
    const ganlab::NetSpec d = net_from_json(j.at("d"), "config.d");
    const ganlab::NetSpec g = net_from_json(j.at("g"), "config.g");
    long long n = j.value("n", 1LL);
    long long m = j.value("m", 1LL);
    double delta = j.value("delta", 0.05);
    std::optional<double> alpha_g, l_phi, l_psi;
    if (j.contains("alpha_g")) alpha_g = real_from_json(j["alpha_g"]);
    if (j.contains("l_phi")) l_phi = j["l_phi"].get<double>();
    if (j.contains("l_psi")) l_psi = j["l_psi"].get<double>();
    if (n_flag) n = *n_flag;
    if (m_flag) m = *m_flag;
    if (delta_flag) delta = *delta_flag;
    if (alpha_g_flag) {
        alpha_g = parse_real(*alpha_g_flag);
        l_phi.reset();
        l_psi.reset();
    }

    ganlab::BoundReport rep;
    if (l_phi && l_psi) {
        rep = ganlab::estimation_upper_bound(d, g, n, m, delta, *l_phi, *l_psi);
    } else if (alpha_g) {
        rep = ganlab::estimation_upper_bound(d, g, n, m, delta, *alpha_g);
    } else {
        throw std::invalid_argument("bounds: need alpha_g, or both l_phi and l_psi");
    }

    ojson out;
    out["bound"] = rep.bound;
    ojson terms;
    terms["real_sample"] = rep.terms.real_sample;
    terms["gen_sample"] = rep.terms.gen_sample;
    terms["confidence"] = rep.terms.confidence;
    out["terms"] = terms;
    ojson consts;
    consts["u_omega"] = rep.constants.u_omega;
    consts["u_theta"] = rep.constants.u_theta;
    consts["q_x"] = rep.constants.q_x;
    consts["q_z"] = rep.constants.q_z;
    consts["l_phi"] = rep.constants.l_phi;
    consts["l_psi"] = rep.constants.l_psi;
    out["constants"] = consts;

    if (j.contains("threshold")) {
        const njson& t = j["threshold"];
        check_keys(t, {"c", "p", "delta_tv", "big_l", "epsilon"}, "config.threshold");
        const ganlab::ThresholdReport th = ganlab::generalization_threshold(
            t.at("c").get<double>(), t.at("p").get<long long>(), t.at("delta_tv").get<double>(),
            t.at("big_l").get<double>(), rep.constants.l_phi, rep.constants.l_psi,
            t.at("epsilon").get<double>());
        ojson tj;
        tj["threshold"] = th.threshold;
        tj["raw"] = th.raw;
        tj["log_arg"] = th.log_arg;
        tj["degenerate"] = th.degenerate;
        out["threshold"] = tj;
    }
    if (j.contains("fano")) {
        const njson& f = j["fano"];
        check_keys(f, {"input_bound"}, "config.fano");
        out["fano_constant"] = f.contains("input_bound")
                                   ? ganlab::fano_constant(d, f["input_bound"].get<double>())
                                   : ganlab::fano_constant(d);
    }

    std::cout << out.dump(2) << "\n";
    if (!o.out.empty()) {
        const fs::path dir = prep_out_dir(o.out);
        write_file(dir / "bounds.json", out.dump(2) + "\n");
        ojson resolved;
        resolved["command"] = "bounds";
        resolved["n"] = n;
        resolved["m"] = m;
        resolved["delta"] = delta;
        if (alpha_g) resolved["alpha_g"] = real_to_json(*alpha_g);
        if (l_phi) resolved["l_phi"] = *l_phi;
        if (l_psi) resolved["l_psi"] = *l_psi;
        echo_config(dir, resolved);
    }
    return 0;
}

int cmd_equivalence(const EquivalenceOpts& o) {
    const std::vector<double> alphas = parse_real_list(o.alpha_list, "--alpha");
    if (o.grid_points < 2) throw std::invalid_argument("--grid must be >= 2");
    const int n = o.grid_points;

    double max_link = 0.0;
    double max_conj = 0.0;
    bool monotone = true;
    for (double a : alphas) {
        double prev = -ganlab::kInf;
        for (int i = 1; i <= n; ++i) {
            const double d = static_cast<double>(i) / (n + 1.0);
            const double v = std::log(d) - std::log1p(-d);
            const double link = ganlab::g_f_alpha(v, a);
            max_link = std::max(max_link, std::abs(link + ganlab::alpha_loss(a, 1, d)));
            max_conj = std::max(
                max_conj,
                std::abs(ganlab::f_tilde_conjugate(link, a) - ganlab::alpha_loss(a, 0, d)));
            const double k = ganlab::k_map(v, a);
            monotone = monotone && k > prev;
            prev = k;
        }
    }

    ojson rep;
    rep["alphas"] = [&] {
        ojson arr = ojson::array();
        for (double a : alphas) arr.push_back(real_to_json(a));
        return arr;
    }();
    rep["grid_points"] = n;
    rep["max_residual_link"] = max_link;
    rep["max_residual_conjugate"] = max_conj;
    rep["max_residual"] = std::max(max_link, max_conj);
    rep["k_map_monotone"] = monotone;
    std::cout << rep.dump(2) << "\n";

    if (!o.out.empty()) {
        const fs::path dir = prep_out_dir(o.out);
        write_file(dir / "equivalence.json", rep.dump(2) + "\n");
        ojson resolved;
        resolved["command"] = "equivalence-check";
        resolved["alphas"] = rep["alphas"];
        resolved["grid_points"] = n;
        echo_config(dir, resolved);
    }
    return 0;
}

int cmd_train(const TrainSetup& base, const TrainOpts& o) {
    TrainSetup ts = base;
    if (ts.cfg.variant.kind == ganlab::VariantKind::lsgan && !ts.d_output_act_set)
        ts.cfg.d_output_act = ganlab::Act::identity;
    ganlab::validate(ts.cfg);
    ganlab::validate(ts.ring);

    const ganlab::Mat data = ganlab::make_train_data(ts.ring, ts.cfg);
    const ganlab::RunReport rep = ganlab::train(ts.cfg, data, ts.ring);
    const ojson rj = report_to_json(rep, ts.cfg.variant.label());

    const fs::path dir = prep_out_dir(o.out);
    write_file(dir / "report.json", rj.dump(2) + "\n");
    {
        std::ofstream trace(dir / "trace.csv", std::ios::binary);
        if (!trace) throw std::runtime_error("cannot open output file 'trace.csv'");
        ganlab::write_trace_csv(trace, rep);
    }
    echo_config(dir, train_resolved(ts));
    std::cout << rj.dump(2) << "\n";
    return 0;  // GAN failures are data, not process errors
}

int cmd_sweep(const TrainSetup& base, const TrainOpts& o) {
    TrainSetup ts = base;
    if (!o.variants.empty()) {
        ts.variants.clear();
        for (const std::string& v : split(o.variants, ','))
            if (!v.empty()) ts.variants.push_back(parse_variant(v));
    }
    if (ts.variants.empty()) ts.variants.push_back(ts.cfg.variant);
    if (!o.seeds.empty()) ts.seeds = parse_seeds(o.seeds);
    if (ts.seeds.empty())
        throw std::invalid_argument("sweep: no seeds given (use --seeds a..b or config seeds)");
    int workers = o.workers;
    if (workers <= 0) workers = std::max(1u, std::thread::hardware_concurrency());

    if (ts.cfg.variant.kind == ganlab::VariantKind::lsgan && !ts.d_output_act_set)
        ts.cfg.d_output_act = ganlab::Act::identity;
    ganlab::validate(ts.cfg);
    ganlab::validate(ts.ring);

    std::vector<ganlab::RunReport> reports;
    const std::vector<ganlab::SweepRow> rows =
        ganlab::sweep(ts.cfg, ts.ring, ts.variants, ts.seeds, workers, &reports);

    const fs::path dir = prep_out_dir(o.out);
    {
        std::ofstream csv(dir / "sweep.csv", std::ios::binary);
        if (!csv) throw std::runtime_error("cannot open output file 'sweep.csv'");
        ganlab::write_sweep_csv(csv, rows);
    }
    ojson all = ojson::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const std::size_t vi = i / ts.seeds.size();
        all.push_back(report_to_json(reports[i], ts.variants[vi].label()));
    }
    write_file(dir / "reports.json", all.dump(2) + "\n");

    ojson resolved = train_resolved(ts);
    ojson vars = ojson::array();
    for (const auto& v : ts.variants) vars.push_back(variant_to_json(v));
    resolved["variants"] = vars;
    resolved["seeds"] = ts.seeds;
    resolved["workers"] = workers;
    echo_config(dir, resolved);

    ojson table = ojson::array();
    for (const auto& r : rows) {
        ojson row;
        row["variant"] = r.variant;
        row["seeds"] = r.seeds;
        row["success_pct"] = r.success_pct;
        row["failure_pct"] = r.failure_pct;
        row["mean_coverage"] = r.mean_coverage;
        table.push_back(row);
    }
    std::cout << table.dump(2) << "\n";
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"ganlab: tunable-loss GAN analysis tools"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ganlab 1.0.0");

    LossCurvesOpts lc;
    CLI::App* lc_cmd = app.add_subcommand(
        "loss-curves", "Tabulate D*, generator losses, and spatial gradient over x");
    lc_cmd->add_option("--scenario", lc.scenario, "Scenario name (fig1, fig4, fig6, fig7)")
        ->capture_default_str();
    lc_cmd->add_option("--alpha-list", lc.alpha_list, "Comma-separated alpha_d values")
        ->capture_default_str();
    lc_cmd->add_option("--alpha-g", lc.alpha_g, "Generator alpha")->capture_default_str();
    lc_cmd->add_option("--grid-points", lc.grid_points, "Number of x samples")
        ->capture_default_str();
    lc_cmd->add_option("--x-min", lc.x_min, "Window start (default: auto)");
    lc_cmd->add_option("--x-max", lc.x_max, "Window end (default: auto)");
    lc_cmd->add_option("--out", lc.out, "Output directory")->required();

    DivergenceOpts dv;
    CLI::App* dv_cmd =
        app.add_subcommand("divergence", "Evaluate an f-divergence between two Gaussians");
    dv_cmd->add_option("--f", dv.f, "Generator tag: f_alpha, f_alpha_sym, f_tilde, f_sat, f_ns")
        ->capture_default_str();
    dv_cmd->add_option("--alpha", dv.alpha, "Alpha for the single-parameter families")
        ->capture_default_str();
    dv_cmd->add_option("--alpha-d", dv.alpha_d, "Discriminator alpha (f_sat/f_ns)")
        ->capture_default_str();
    dv_cmd->add_option("--alpha-g", dv.alpha_g, "Generator alpha (f_sat/f_ns)")
        ->capture_default_str();
    dv_cmd->add_option("--p", dv.p, "First Gaussian as mu,sigma")->capture_default_str();
    dv_cmd->add_option("--q", dv.q, "Second Gaussian as mu,sigma")->capture_default_str();
    dv_cmd->add_option("--abs-tol", dv.abs_tol, "Quadrature absolute tolerance")
        ->capture_default_str();
    dv_cmd->add_option("--out", dv.out, "Optional output directory");

    RegionOpts rg;
    CLI::App* rg_cmd =
        app.add_subcommand("region", "Raster the convergence region over an alpha grid");
    rg_cmd->add_option("--mode", rg.mode, "Family: sat or ns")->required();
    rg_cmd->add_option("--grid", rg.grid, "Axis spec lo:hi:count for both alphas")
        ->capture_default_str();
    rg_cmd->add_option("--alpha-d-grid", rg.grid_d, "Override alpha_d axis");
    rg_cmd->add_option("--alpha-g-grid", rg.grid_g, "Override alpha_g axis");
    rg_cmd->add_option("--out", rg.out, "Output directory")->required();

    GradientOpts gr;
    CLI::App* gr_cmd = app.add_subcommand(
        "gradient", "Tabulate the generator loss gradient decomposition over x");
    gr_cmd->add_option("--scenario", gr.scenario, "Scenario name")->capture_default_str();
    gr_cmd->add_option("--alpha-d", gr.alpha_d, "Discriminator alpha")->capture_default_str();
    gr_cmd->add_option("--alpha-g", gr.alpha_g, "Generator alpha")->capture_default_str();
    gr_cmd->add_option("--mode", gr.mode, "Loss family: sat or ns")->capture_default_str();
    gr_cmd->add_option("--grid-points", gr.grid_points, "Number of x samples")
        ->capture_default_str();
    gr_cmd->add_option("--x-min", gr.x_min, "Window start (default: auto)");
    gr_cmd->add_option("--x-max", gr.x_max, "Window end (default: auto)");
    gr_cmd->add_option("--out", gr.out, "Output directory")->required();

    BoundsOpts bd;
    long long bd_n = 0, bd_m = 0;
    double bd_delta = 0.0;
    std::string bd_alpha_g;
    CLI::App* bd_cmd =
        app.add_subcommand("bounds", "Estimation-error bound and threshold calculators");
    bd_cmd->add_option("--config", bd.config, "JSON config file")->required();
    CLI::Option* bd_n_opt = bd_cmd->add_option("--n", bd_n, "Real-sample count override");
    CLI::Option* bd_m_opt = bd_cmd->add_option("--m", bd_m, "Generated-sample count override");
    CLI::Option* bd_delta_opt =
        bd_cmd->add_option("--delta", bd_delta, "Confidence level override");
    CLI::Option* bd_ag_opt =
        bd_cmd->add_option("--alpha-g", bd_alpha_g, "Generator alpha override");
    bd_cmd->add_option("--out", bd.out, "Optional output directory");

    EquivalenceOpts eq;
    CLI::App* eq_cmd = app.add_subcommand(
        "equivalence-check", "Verify the link/conjugate identities over a d-grid");
    eq_cmd->add_option("--alpha,--alpha-list", eq.alpha_list, "Comma-separated alphas")
        ->capture_default_str();
    eq_cmd->add_option("--grid", eq.grid_points, "Number of interior d-grid points")
        ->capture_default_str();
    eq_cmd->add_option("--out", eq.out, "Optional output directory");

    TrainOpts tr;
    TrainSetup tr_setup;
    std::uint64_t tr_seed = 0;
    int tr_epochs = 0, tr_batch = 0, tr_ntrain = 0;
    double tr_lr = 0.0;
    CLI::App* tr_cmd = app.add_subcommand("train", "Train one GAN on the 2D Gaussian ring");
    tr_cmd->add_option("--config", tr.config, "JSON config file");
    CLI::Option* tr_variant_opt =
        tr_cmd->add_option("--variant", tr.variant, "Variant spec kind:alpha_d:alpha_g or lsgan");
    CLI::Option* tr_seed_opt = tr_cmd->add_option("--seed", tr_seed, "Seed override");
    CLI::Option* tr_epochs_opt = tr_cmd->add_option("--epochs", tr_epochs, "Epoch override");
    CLI::Option* tr_batch_opt =
        tr_cmd->add_option("--batch-size", tr_batch, "Batch size override");
    CLI::Option* tr_lr_opt = tr_cmd->add_option("--lr", tr_lr, "Learning rate override");
    CLI::Option* tr_ntrain_opt =
        tr_cmd->add_option("--n-train", tr_ntrain, "Training set size override");
    tr_cmd->add_option("--out", tr.out, "Output directory")->required();

    TrainOpts sw;
    TrainSetup sw_setup;
    std::uint64_t sw_seed = 0;
    int sw_epochs = 0, sw_batch = 0, sw_ntrain = 0;
    double sw_lr = 0.0;
    CLI::App* sw_cmd =
        app.add_subcommand("sweep", "Train a variant/seed grid and aggregate outcomes");
    sw_cmd->add_option("--config", sw.config, "JSON config file");
    sw_cmd->add_option("--variants", sw.variants,
                       "Comma-separated variant specs (kind:alpha_d:alpha_g or lsgan)");
    sw_cmd->add_option("--seeds", sw.seeds, "Seed range a..b or comma list");
    sw_cmd->add_option("--workers", sw.workers, "Parallel workers (default: hardware cores)");
    CLI::Option* sw_epochs_opt = sw_cmd->add_option("--epochs", sw_epochs, "Epoch override");
    CLI::Option* sw_batch_opt =
        sw_cmd->add_option("--batch-size", sw_batch, "Batch size override");
    CLI::Option* sw_lr_opt = sw_cmd->add_option("--lr", sw_lr, "Learning rate override");
    CLI::Option* sw_ntrain_opt =
        sw_cmd->add_option("--n-train", sw_ntrain, "Training set size override");
    sw_cmd->add_option("--out", sw.out, "Output directory")->required();
    (void)sw_seed;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        std::cout << (subs.empty() ? app.help() : subs.front()->help());
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        std::cout << app.version() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << ojson{{"error", std::string(e.what())}}.dump() << "\n";
        return e.get_exit_code() != 0 ? e.get_exit_code() : 1;
    }

    if (app.got_subcommand(lc_cmd)) return cmd_loss_curves(lc);
    if (app.got_subcommand(dv_cmd)) return cmd_divergence(dv);
    if (app.got_subcommand(rg_cmd)) return cmd_region(rg);
    if (app.got_subcommand(gr_cmd)) return cmd_gradient(gr);
    if (app.got_subcommand(bd_cmd)) {
        std::optional<long long> n, m;
        std::optional<double> delta;
        std::optional<std::string> ag;
        if (bd_n_opt->count() > 0) n = bd_n;
        if (bd_m_opt->count() > 0) m = bd_m;
        if (bd_delta_opt->count() > 0) delta = bd_delta;
        if (bd_ag_opt->count() > 0) ag = bd_alpha_g;
        return cmd_bounds(bd, n, m, delta, ag);
    }
    if (app.got_subcommand(eq_cmd)) return cmd_equivalence(eq);
    if (app.got_subcommand(tr_cmd)) {
        if (!tr.config.empty()) apply_train_json(tr_setup, load_json_file(tr.config), false);
        if (tr_variant_opt->count() > 0) tr_setup.cfg.variant = parse_variant(tr.variant);
        if (tr_seed_opt->count() > 0) tr_setup.cfg.seed = tr_seed;
        if (tr_epochs_opt->count() > 0) tr_setup.cfg.epochs = tr_epochs;
        if (tr_batch_opt->count() > 0) tr_setup.cfg.batch_size = tr_batch;
        if (tr_lr_opt->count() > 0) tr_setup.cfg.lr = tr_lr;
        if (tr_ntrain_opt->count() > 0) tr_setup.cfg.n_train = tr_ntrain;
        return cmd_train(tr_setup, tr);
    }
    if (app.got_subcommand(sw_cmd)) {
        if (!sw.config.empty()) apply_train_json(sw_setup, load_json_file(sw.config), true);
        if (sw_epochs_opt->count() > 0) sw_setup.cfg.epochs = sw_epochs;
        if (sw_batch_opt->count() > 0) sw_setup.cfg.batch_size = sw_batch;
        if (sw_lr_opt->count() > 0) sw_setup.cfg.lr = sw_lr;
        if (sw_ntrain_opt->count() > 0) sw_setup.cfg.n_train = sw_ntrain;
        return cmd_sweep(sw_setup, sw);
    }
    throw std::logic_error("no subcommand dispatched");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << ojson{{"error", std::string(e.what())}}.dump() << "\n";
        return 1;
    }
}
