// Acceptance run: one [PASS]/[FAIL] line per criterion with its tolerance and runtime limit.
// Usage: acceptance [CONFIG_DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gen.hpp"
#include "oracles.hpp"
#include "rfedit/editing.hpp"
#include "rfedit/harness/config.hpp"
#include "rfedit/harness/experiment.hpp"
#include "rfedit/harness/report.hpp"
#include "rfedit/metrics.hpp"
#include "rfedit/parametrization.hpp"
#include "rfedit/straighten.hpp"

#ifndef RFEDIT_CONFIG_DIR
#define RFEDIT_CONFIG_DIR "configs"
#endif

using namespace rfedit;
using gen::vec;

namespace {

std::string config_dir = RFEDIT_CONFIG_DIR;

struct Outcome {
    bool ok = false;
    std::string summary;
    std::vector<std::string> details;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double rel(const Vector& a, const Vector& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

std::shared_ptr<const GaussianModel> one_component(const Vector& m, double sigma) {
    return std::make_shared<const GaussianModel>(std::map<std::string, Vector>{{"src", m}}, sigma);
}

std::shared_ptr<const GaussianModel> two_component(const Vector& src, const Vector& tgt, double sigma) {
    return std::make_shared<const GaussianModel>(std::map<std::string, Vector>{{"src", src}, {"tgt", tgt}}, sigma);
}

GuidanceConfig guidance(GuidanceMode mode, double w, bool mask, double alpha = 0.4) {
    GuidanceConfig g;
    g.mode = mode;
    g.scale = w;
    g.mask_enabled = mask;
    g.threshold = alpha;
    return g;
}

harness::ExperimentConfig config(const std::string& name) {
    return harness::load_config(config_dir + "/" + name);
}

double mean(const std::vector<double>& x) {
    double s = 0;
    for (double v : x)
        s += v;
    return s / static_cast<double>(x.size());
}

// Mean and standard error of paired differences a_i - b_i.
std::pair<double, double> paired(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        d[i] = a[i] - b[i];
    const double m = mean(d);
    double ss = 0;
    for (double v : d)
        ss += (v - m) * (v - m);
    const double n = static_cast<double>(d.size());
    return {m, std::sqrt(ss / (n - 1) / n)};
}

Outcome identity_edits() {
    gen::Rng rng(101);
    double worst = 0;
    int draws = 0;
    const auto modes = std::array{GuidanceMode::none, GuidanceMode::pg, GuidanceMode::dpg};
    const auto scales = std::array{0.0, 2.5, 5.0};
    for (int i = 0; i < 100; ++i, ++draws) {
        const std::size_t dim = 1 + rng.index(6);
        auto model = rng.model(dim);
        auto rf = gaussian_rf_field(model);
        const StraightenedField field(*rf, make_uniform_grid(4, 0, 1, 4), model->conditions());
        const std::size_t n = 4 * (1 + rng.index(2));
        const TimeGrid grid = make_uniform_grid(n, 0, 1, 4);
        const GuidanceConfig g = guidance(modes[i % 3], scales[(i / 3) % 3], (i / 9) % 2 == 0, rng.uniform(0, 1));
        const Condition src = model->condition("src");
        const Latent z0 = model->mean(src) + model->sigma() * rng.normal_vector(dim);
        const EditResult r = edit(field, z0, src, src, RegenStrategy::ili, g, grid, 1 + rng.index(n));
        worst = std::max(worst, rel(r.output, z0));
    }
    return {worst <= 1e-9, fmt("%d draws, worst relative error %.3g <= 1e-9", draws, worst), {}};
}

Outcome zero_mask() {
    gen::Rng rng(102);
    int exact = 0;
    const int draws = 100;
    for (int i = 0; i < draws; ++i) {
        auto model = rng.model(1 + rng.index(6));
        auto rf = gaussian_rf_field(model);
        const StraightenedField field(*rf, make_uniform_grid(4, 0, 1, 4), model->conditions());
        const TimeGrid grid = make_uniform_grid(4, 0, 1, 4);
        const Condition src = model->condition("src"), tgt = model->condition("tgt");
        const Latent z0 = model->mean(src) + model->sigma() * rng.normal_vector(model->dim());
        const GuidanceMode mode = i % 2 ? GuidanceMode::pg : GuidanceMode::dpg;
        Latent out;
        if (i % 2 == 0) {
            // alpha = 1: no relevance value exceeds the threshold
            out = edit(field, z0, src, tgt, RegenStrategy::ili, guidance(mode, 5.0, true, 1.0), grid, 4).output;
        } else {
            NfeCounter nfe;
            const TrajectoryRecord rec = invert(field, z0, src, grid, 4, nfe);
            const Mask zeros = Mask::zeros(model->dim());
            GuidanceConfig g = guidance(mode, 5.0, true);
            g.mask_mode = MaskMode::fixed;
            out = rec.latents().back();
            for (std::size_t k = 4; k-- > 0;)
                out = regeneration_step(field, grid, AnchorView::of(rec), out, k, src, tgt, g, &zeros, nfe).latent;
        }
        exact += out == z0;
    }
    return {exact == draws, fmt("%d/%d outputs bitwise equal to z0", exact, draws), {}};
}

Outcome dpg_orthogonality() {
    gen::Rng rng(103);
    double worst = 0;  // |G.v_s| / (|G| |v_s|)
    auto audit = [&](const Vector& vt, const Vector& vs, double w) {
        const Vector G = dpg_guidance(vt, vs, w);
        const double denom = G.norm() * vs.norm();
        const double residual = std::abs(G.dot(vs));
        worst = std::max(worst, residual == 0.0 ? 0.0 : residual / denom);
    };
    for (int i = 0; i < 10000; ++i) {
        const std::size_t dim = 1 + rng.index(16);
        const Vector vt = rng.normal_vector(dim, std::pow(10.0, rng.uniform(-3, 3)));
        Vector vs = rng.normal_vector(dim, std::pow(10.0, rng.uniform(-3, 3)));
        if (i % 10 == 0)
            vs = rng.uniform(-2, 2) * vt + 1e-9 * rng.normal_vector(dim);
        audit(vt, vs, rng.uniform(0, 5));
    }

    std::size_t audited = 0;
    for (int i = 0; i < 100; ++i) {
        auto model = rng.model(2 + rng.index(5));
        auto rf = gaussian_rf_field(model);
        const StraightenedField field(*rf, make_uniform_grid(4, 0, 1, 4), model->conditions());
        const TimeGrid grid = make_uniform_grid(8, 0, 1, 4);
        const Condition src = model->condition("src"), tgt = model->condition("tgt");
        NfeCounter nfe;
        const TrajectoryRecord rec = invert(field, model->mean(src) + rng.normal_vector(model->dim()), src, grid, 8, nfe);
        const GuidanceConfig g = guidance(GuidanceMode::dpg, 2.5, i % 2 == 0);
        Latent z = rec.latents().back();
        for (std::size_t k = 8; k-- > 0;) {
            audit(field.velocity(z, grid.t(k + 1), tgt), field.velocity(z, grid.t(k + 1), src), g.scale);
            ++audited;
            z = regeneration_step(field, grid, AnchorView::of(rec), z, k, src, tgt, g, nullptr, nfe).latent;
        }
    }

    const Vector vt = vec({2.0, -1.0, 0.5});
    const bool degenerate = dpg_guidance(vt, Vector::Zero(3), 2.0) == 2.0 * vt &&
                            dpg_guidance(vt, vec({1e-13, 0, 0}), 2.0) == 2.0 * vt;
    return {worst <= 1e-10 && degenerate,
            fmt("10000 pairs + %zu pipeline steps, worst |G.v_s|/(|G||v_s|) %.3g <= 1e-10; |v_s| in {0, 1e-13} -> w v_t: %s",
                audited, worst, degenerate ? "yes" : "no"),
            {}};
}

Outcome field_oracle() {
    const Vector m = vec({1.5, -0.5});
    const double sigma = 0.8;
    auto model = one_component(m, sigma);
    auto lin = make_schedule("linear");
    auto cos = make_schedule("cosine");
    auto rf = gaussian_rf_field(model);
    auto vp = vp_flow_field(model, cos);
    const Condition c = model->condition("src");
    std::uint64_t seed = 104;
    double worst = 0;  // deviation in standard errors
    Outcome out;
    for (double t : {0.1, 0.5, 0.9}) {
        for (const char* which : {"rf", "vp", "eps"}) {
            const std::string w = which;
            const NoiseSchedule& s = w == "rf" ? *lin : *cos;
            const oracle::Coeffs co = w == "rf" ? oracle::linear(t) : oracle::cosine(t);
            auto target = [&](double x0, double e) { return w == "eps" ? e : -(co.da * x0 + co.db * e); };
            const auto est = oracle::regress(m, sigma, co, 1000000, seed++, target);
            auto eval = [&](const Vector& z) {
                if (w == "eps")
                    return extract_epsilon(*vp, s, z, t, c);
                return w == "rf" ? rf->velocity(z, t, c) : vp->velocity(z, t, c);
            };
            const Vector at0 = eval(Vector::Zero(2));
            double case_worst = 0;
            for (Eigen::Index i = 0; i < 2; ++i) {
                Vector ei = Vector::Zero(2);
                ei[i] = 1.0;
                const auto& fit = est.dims[static_cast<std::size_t>(i)];
                case_worst = std::max({case_worst, std::abs(eval(ei)[i] - at0[i] - fit.slope) / fit.se_slope,
                                       std::abs(at0[i] - fit.intercept) / fit.se_intercept});
            }
            out.details.push_back(fmt("%-3s t=%.1f: max deviation %.2f SE", which, t, case_worst));
            worst = std::max(worst, case_worst);
        }
    }
    out.ok = worst <= 3.0;
    out.summary = fmt("9 regressions of 1e6 samples, worst deviation %.2f SE <= 3 SE", worst);
    return out;
}

Outcome straightening_certificate() {
    gen::Rng rng(105);
    double worst_var = 0, worst_transport = 0;
    Outcome out;
    for (double sigma : {1.0, 0.5}) {
        const Vector m = vec({4.0, 0.0});
        auto model = one_component(m, sigma);
        auto vp = vp_flow_field(model, make_schedule("cosine"));
        const TimeGrid windows = make_uniform_grid(4, 0, 1, 4);
        const StraightenedField straight(*vp, windows, model->conditions());
        const Condition c = model->condition("src");
        const auto& bounds = windows.window_bounds();
        double var = 0, transport = 0;
        for (int i = 0; i < 1000; ++i) {
            Vector x = rng.normal_vector(2);
            for (std::size_t w = 4; w-- > 0;) {
                const double t_a = bounds[w], t_b = bounds[w + 1];
                const Vector v_b = straight.velocity(x, t_b, c);
                for (double u : {0.125, 0.25, 0.5, 0.75, 0.875}) {
                    const double t = t_b - u * (t_b - t_a);
                    var = std::max(var, (straight.velocity(x + (t_b - t) * v_b, t, c) - v_b).norm() / v_b.norm());
                }
                const Vector landed = x + (t_b - t_a) * v_b;
                const Vector phi = oracle::rk4_transport(
                    [&](const oracle::Vec& y, double s) { return vp->velocity(y, s, c); }, x, t_b, t_a, 2048);
                transport = std::max(transport, (landed - phi).norm() / std::max(1.0, phi.norm()));
                x = landed;
            }
        }
        out.details.push_back(fmt("sigma=%.1f: velocity variation %.3g, transport error %.3g", sigma, var, transport));
        worst_var = std::max(worst_var, var);
        worst_transport = std::max(worst_transport, transport);
    }
    out.ok = worst_var <= 1e-8 && worst_transport <= 1e-6;
    out.summary = fmt("1000 trajectories x 4 windows x 2 sigmas, velocity variation %.3g <= 1e-8, transport %.3g <= 1e-6",
                      worst_var, worst_transport);
    return out;
}

Outcome inversion_ordering() {
    const harness::ExperimentConfig c = config("reconstruct_vp.cfg");
    const auto rows = harness::run_reconstruct(c);
    std::map<std::size_t, double> perrfi, ddim;
    for (const auto& r : rows) {
        if (r.label == "perrfi_nli")
            perrfi[r.sample] = r.metrics.roundtrip;
        else if (r.label == "ddim")
            ddim[r.sample] = r.metrics.roundtrip;
    }
    std::vector<double> a, b;
    for (const auto& [s, v] : perrfi) {
        a.push_back(ddim.at(s));
        b.push_back(v);
    }
    const auto [gap, se] = paired(a, b);
    const bool ok = a.size() >= 100 && gap > 2 * se;
    return {ok,
            fmt("N=%zu, %zu paired samples: PerRFI %.4f vs DDIM %.4f, gap %.4f > 2 SE = %.4f", c.grid.n_steps,
                a.size(), mean(b), mean(a), gap, 2 * se),
            {}};
}

Outcome ablation_directions() {
    const harness::ExperimentConfig c = config("default.cfg");
    std::map<std::string, std::vector<double>> cons, align;
    for (const auto& r : harness::run_compare(c)) {
        cons[r.label].push_back(r.metrics.consistency);
        align[r.label].push_back(r.metrics.alignment);
    }
    const std::string ili = "ili_dpg_s0_maskon", nsli = "nsli_dpg_s0_maskon", pg = "ili_pg_s0_maskon",
                      hook = "ili_dpg_s0.4_maskon";
    Outcome out;
    const std::size_t n = cons.at(ili).size();
    const bool a = mean(cons.at(ili)) < mean(cons.at(nsli));
    const bool b_cons = mean(cons.at(ili)) < mean(cons.at(pg));
    const double a_dpg = mean(align.at(ili)), a_pg = mean(align.at(pg));
    const bool b_align = a_dpg >= a_pg - 0.05 * std::abs(a_pg);
    const bool cc = mean(cons.at(hook)) < mean(cons.at(ili));
    out.details.push_back(fmt("(a) consistency ILI %.4f < NSLI %.4f: %s", mean(cons.at(ili)), mean(cons.at(nsli)),
                              a ? "yes" : "no"));
    out.details.push_back(fmt("(b) consistency DPG %.4f < PG %.4f: %s; alignment DPG %.4f vs PG %.4f within 5%%: %s",
                              mean(cons.at(ili)), mean(cons.at(pg)), b_cons ? "yes" : "no", a_dpg, a_pg,
                              b_align ? "yes" : "no"));
    out.details.push_back(fmt("(c) consistency s=0.4 %.4f < s=0 %.4f: %s", mean(cons.at(hook)), mean(cons.at(ili)),
                              cc ? "yes" : "no"));
    out.ok = n >= 100 && a && b_cons && b_align && cc;
    out.summary = fmt("%zu paired samples per cell, directions (a) %s (b) %s (c) %s", n, a ? "hold" : "VIOLATED",
                      b_cons && b_align ? "hold" : "VIOLATED", cc ? "hold" : "VIOLATED");
    return out;
}

Outcome tradeoff_monotonicity() {
    const harness::ExperimentConfig c = config("graded.cfg");
    struct Sweep {
        harness::SweepParam param;
        std::vector<double> values;
    };
    const std::vector<Sweep> sweeps = {{harness::SweepParam::w, {2.0, 2.5, 3.0}},
                                       {harness::SweepParam::alpha, {0.2, 0.6, 0.8}},
                                       {harness::SweepParam::s, {0.0, 0.2, 0.4}},
                                       {harness::SweepParam::n_steps, {4, 8, 12, 16}}};
    Outcome out;
    out.ok = true;
    std::string verdicts;
    for (const Sweep& s : sweeps) {
        const harness::SweepResult r = harness::run_sweep(c, s.param, s.values);
        std::string series;
        for (const auto& p : r.points)
            series += fmt(" %g:(cons %.4f, align %.4f)", p.value, p.mean_consistency, p.mean_alignment);
        std::string checks;
        for (const auto& chk : r.checks)
            checks += fmt(" %s %s %s;", chk.metric.c_str(), chk.expected == harness::Trend::increasing ? "up" : "down",
                          chk.holds ? "holds" : "VIOLATED");
        out.details.push_back(harness::to_string(s.param) + ":" + series + " |" + checks);
        out.ok = out.ok && r.all_hold();
        verdicts += fmt(" %s %s", harness::to_string(s.param).c_str(), r.all_hold() ? "holds" : "VIOLATED");
    }
    out.summary = "graded config, 100 samples per point:" + verdicts;
    return out;
}

Outcome euler_order() {
    struct Case {
        std::string name;
        std::function<std::unique_ptr<VelocityField>(std::shared_ptr<const GaussianModel>)> make;
    };
    std::vector<std::shared_ptr<GaussianFlowField>> keep;
    const std::vector<Case> cases = {
        {"straightened rf",
         [&](auto model) {
             keep.push_back(gaussian_rf_field(model));
             return std::make_unique<StraightenedField>(*keep.back(), make_uniform_grid(4, 0, 1, 4),
                                                        model->conditions());
         }},
        {"curved rf",
         [&](auto model) {
             struct Wrap final : VelocityField {
                 std::shared_ptr<GaussianFlowField> f;
                 std::size_t dim() const override { return f->dim(); }
                 Vector velocity(const Latent& z, double t, const Condition& c) const override {
                     return f->velocity(z, t, c);
                 }
             };
             auto w = std::make_unique<Wrap>();
             w->f = gaussian_rf_field(model);
             return w;
         }},
    };
    gen::Rng rng(109);
    auto model = one_component(vec({2.0, -1.0}), 0.7);
    const Condition c = model->condition("src");
    std::vector<Latent> z0s;
    for (int i = 0; i < 20; ++i)
        z0s.push_back(model->mean(c) + model->sigma() * rng.normal_vector(2));

    Outcome out;
    out.ok = true;
    double lo = 1e300, hi = 0;
    for (const Case& k : cases) {
        auto field = k.make(model);
        std::string line = k.name + ":";
        double previous = 0;
        for (std::size_t n : {4, 8, 16, 32, 64}) {
            const TimeGrid g = make_uniform_grid(n, 0, 1, 4);
            double err = 0;
            for (const Latent& z0 : z0s) {
                NfeCounter nfe;
                const auto rec = invert(*field, z0, c, g, n, nfe);
                err += (sample(*field, rec.latents().back(), c, g, n, nfe).back() - z0).norm();
            }
            err /= static_cast<double>(z0s.size());
            if (previous > 0) {
                const double ratio = previous / err;
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
                line += fmt(" %zu->%zu x%.3f", n / 2, n, ratio);
            }
            previous = err;
        }
        out.details.push_back(line);
    }
    out.ok = lo >= 1.6 && hi <= 2.4;
    out.summary = fmt("round-trip ratio per doubling N=4..64 in [%.3f, %.3f], required within [1.6, 2.4]", lo, hi);
    return out;
}

Outcome determinism_and_nfe() {
    const harness::ExperimentConfig c = config("default.cfg");
    const auto e1 = harness::run_edit(c), e2 = harness::run_edit(c);
    const auto r1 = harness::run_reconstruct(c), r2 = harness::run_reconstruct(c);
    const auto c1 = harness::run_compare(c), c2 = harness::run_compare(c);
    const bool same = harness::rows_csv(e1.rows) == harness::rows_csv(e2.rows) &&
                      harness::rows_json(e1.rows) == harness::rows_json(e2.rows) &&
                      harness::render_edit_svg(c, e1) == harness::render_edit_svg(c, e2) &&
                      harness::rows_csv(r1) == harness::rows_csv(r2) && harness::rows_csv(c1) == harness::rows_csv(c2) &&
                      harness::render_flow_svg(harness::flow_trajectories(c)) ==
                          harness::render_flow_svg(harness::flow_trajectories(c));

    // Analytic counts, written out independently of the library formula.
    const std::uint64_t k = c.grid.k_start;
    std::map<std::string, std::uint64_t> analytic = {
        {"ili", 3 * k}, {"nsli", 3 * k - 1}, {"perrfi_nli", 2 * k}, {"euler_curved", 2 * k}, {"ddim", 2 * k},
        {"perrfi_ili", 3 * k}};
    std::size_t checked = 0, wrong = 0;
    auto check = [&](const harness::RunRow& r) {
        const std::string key = r.label.substr(0, r.label.find('_')) == "perrfi" || r.label == "euler_curved" ||
                                        r.label == "ddim"
                                    ? r.label
                                    : r.label.substr(0, r.label.find('_'));
        ++checked;
        wrong += r.metrics.nfe != analytic.at(key) || r.expected_nfe != analytic.at(key);
    };
    for (const auto& r : e1.rows)
        check(r);
    for (const auto& r : r1)
        check(r);
    for (const auto& r : c1)
        check(r);
    return {same && wrong == 0,
            fmt("edit/reconstruct/compare CSV, JSON and SVG byte-identical: %s; %zu rows, %zu with NFE off the analytic "
                "count",
                same ? "yes" : "no", checked, wrong),
            {}};
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1)
        config_dir = argv[1];

    const std::vector<Criterion> criteria = {
        {1, "identity-edit exactness", 5, identity_edits},
        {2, "zero-mask identity", 2, zero_mask},
        {3, "DPG orthogonality", 1, dpg_orthogonality},
        {4, "closed-form field oracle", 30, field_oracle},
        {5, "straightening certificate", 30, straightening_certificate},
        {6, "inversion-error ordering", 10, inversion_ordering},
        {7, "ablation directions", 60, ablation_directions},
        {8, "tradeoff monotonicity", 60, tradeoff_monotonicity},
        {9, "Euler convergence order", 10, euler_order},
        {10, "determinism and NFE", 5, determinism_and_nfe},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.summary = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.limit_s;
        const bool pass = o.ok && in_time;
        failed += !pass;
        std::printf("[%s] %d %s: %s (%.2f s, limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.summary.c_str(), secs, c.limit_s, in_time ? "" : ", EXCEEDED");
        for (const auto& d : o.details)
            std::printf("       %s\n", d.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
