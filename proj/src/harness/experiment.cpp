#include "rfedit/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "rfedit/errors.hpp"
#include "rfedit/harness/seeding.hpp"

namespace rfedit::harness {

namespace {

constexpr std::uint64_t z0_stream = 0;
constexpr std::uint64_t nsli_stream = 1;
constexpr std::uint64_t noise_stream = 2;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string format_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void check_nfe(const RunRow& row) {
    if (row.metrics.nfe != row.expected_nfe)
        throw AssertionFailure("row '" + row.label + "' sample " + std::to_string(row.sample) + " spent " +
                               std::to_string(row.metrics.nfe) + " evaluations, expected " +
                               std::to_string(row.expected_nfe));
}

std::uint64_t master_seed(const ExperimentConfig& config) {
    if (!config.run.seed)
        throw ConfigError("a seed is mandatory (run.seed or --seed)");
    return *config.run.seed;
}

Latent draw_source(const Setup& setup, std::uint64_t seed) {
    return draw_gaussian(setup.model->mean(setup.source), setup.model->sigma(), stream_seed(seed, z0_stream));
}

EditOptions edit_options(const ExperimentConfig& config, const Setup& setup, std::uint64_t seed) {
    EditOptions options;
    options.hook_scale = config.field.hook_scale;
    options.nsli_schedule = setup.interpolant;
    options.nsli_seed = stream_seed(seed, nsli_stream);
    return options;
}

Point2 xy(const Vector& v) { return {v[0], v[1]}; }

void require_2d(const GaussianModel& model) {
    if (model.dim() != 2)
        throw ConfigError("trajectory plots need a 2-dimensional field (got " + std::to_string(model.dim()) + ")");
}

void draw_components(SvgPlot& plot, const GaussianModel& model, const Condition& source, const Condition& target) {
    for (const auto& [id, m] : model.means()) {
        SvgStyle style;
        style.stroke = id == source.id ? "#1f77b4" : (id == target.id ? "#d62728" : "#999999");
        for (double r : {1.0, 2.0}) {
            style.width = r == 1.0 ? 1.5 : 0.75;
            plot.add_ellipse(xy(m), r * model.sigma(), r * model.sigma(), style);
        }
    }
}

}  // namespace

Mask mean_difference_region(const Vector& source_mean, const Vector& target_mean, double threshold) {
    if (source_mean.size() != target_mean.size())
        throw DomainError("component means differ in dimension");
    const Vector diff = (target_mean - source_mean).cwiseAbs();
    const double hi = diff.size() > 0 ? diff.maxCoeff() : 0.0;
    Vector values = Vector::Zero(diff.size());
    if (hi > 0.0) {
        for (Eigen::Index i = 0; i < diff.size(); ++i)
            values[i] = diff[i] > threshold * hi ? 1.0 : 0.0;
    }
    return Mask::from_values(std::move(values));
}

Setup build_setup(const ExperimentConfig& config) {
    config.validate();
    auto model = std::make_shared<const GaussianModel>(config.field.means, config.field.sigma);
    auto interpolant = make_schedule(config.field.base == "rf" ? "linear" : config.field.schedule);
    auto base = std::make_shared<const GaussianFlowField>(model, interpolant);
    const TimeGrid windows = make_uniform_grid(config.field.windows, 0.0, 1.0, config.field.windows);
    auto straight = std::make_shared<const StraightenedField>(*base, windows, model->conditions());

    const Condition source = model->condition(config.method.source);
    const Condition target = model->condition(config.method.target);
    Mask region = config.metrics.region == "mean_difference"
                      ? mean_difference_region(model->mean(source), model->mean(target),
                                               config.metrics.region_threshold)
                      : Mask::zeros(model->dim());
    const double peak = default_peak(*model);
    return Setup{model,
                 interpolant,
                 base,
                 straight,
                 make_uniform_grid(config.grid.n_steps, 0.0, 1.0, config.field.windows),
                 source,
                 target,
                 std::move(region),
                 peak};
}

void sort_rows(std::vector<RunRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const RunRow& a, const RunRow& b) {
        return std::tie(a.fingerprint, a.label, a.sample) < std::tie(b.fingerprint, b.label, b.sample);
    });
}

std::vector<RunRow> run_reconstruct(const ExperimentConfig& config) {
    const Setup setup = build_setup(config);
    const std::uint64_t master = master_seed(config);
    const std::string fp = fingerprint(config);
    const std::size_t k = config.grid.k_start;
    const Mask whole = Mask::zeros(setup.model->dim());
    const GaussianEpsilonField eps_field(setup.model, make_schedule(config.field.schedule));

    std::vector<RunRow> rows;
    for (std::size_t i = 0; i < config.run.samples; ++i) {
        const std::uint64_t seed = sample_seed(master, i);
        const Latent z0 = draw_source(setup, seed);

        auto add_row = [&](std::string label, const Latent& out, std::uint64_t nfe, std::uint64_t expected,
                           std::vector<double> norms, Clock::time_point start) {
            RunRow row;
            row.fingerprint = fp;
            row.label = std::move(label);
            row.sample = i;
            row.seed = seed;
            row.metrics = evaluate_report(out, z0, *setup.model, setup.source, whole, setup.peak, nfe);
            row.expected_nfe = expected;
            row.guidance_norms = std::move(norms);
            row.wall_ms = elapsed_ms(start);
            check_nfe(row);
            rows.push_back(std::move(row));
        };

        auto euler_round_trip = [&](const VelocityField& field, const char* label) {
            const auto start = Clock::now();
            NfeCounter nfe;
            const TrajectoryRecord record = invert(field, z0, setup.source, setup.grid, k, nfe);
            const auto path = sample(field, record.latents().back(), setup.source, setup.grid, k, nfe);
            add_row(label, path.back(), nfe.count(), 2 * k, {}, start);
        };
        euler_round_trip(*setup.straight, "perrfi_nli");
        euler_round_trip(*setup.base, "euler_curved");

        {
            const auto start = Clock::now();
            EditResult r = edit(*setup.straight, z0, setup.source, setup.source, RegenStrategy::ili,
                                config.method.guidance, setup.grid, k, edit_options(config, setup, seed));
            add_row("perrfi_ili", r.output, r.nfe, expected_edit_nfe(RegenStrategy::ili, config.method.guidance.mode, k),
                    std::move(r.guidance_norms), start);
        }
        {
            const auto start = Clock::now();
            NfeCounter nfe;
            const TrajectoryRecord record = ddim_invert(eps_field, z0, setup.source, setup.grid, k, nfe);
            const auto path = ddim_sample(eps_field, record.latents().back(), setup.source, setup.grid, k, nfe);
            add_row("ddim", path.back(), nfe.count(), 2 * k, {}, start);
        }
    }
    sort_rows(rows);
    return rows;
}

EditRun run_edit(const ExperimentConfig& config) {
    if (config.method.inversion != "perrfi")
        throw ConfigError("edits run on PerRFI inversion; method.inversion = ddim is for reconstruct only");
    const Setup setup = build_setup(config);
    const std::uint64_t master = master_seed(config);
    const std::string fp = fingerprint(config);
    const std::size_t k = config.grid.k_start;
    const auto& g = config.method.guidance;
    const std::string label = to_string(config.method.strategy) + "_" + to_string(g.mode);

    EditRun run;
    for (std::size_t i = 0; i < config.run.samples; ++i) {
        const std::uint64_t seed = sample_seed(master, i);
        const auto start = Clock::now();
        Latent z0 = draw_source(setup, seed);
        EditResult result = edit(*setup.straight, z0, setup.source, setup.target, config.method.strategy, g,
                                 setup.grid, k, edit_options(config, setup, seed));

        RunRow row;
        row.fingerprint = fp;
        row.label = label;
        row.sample = i;
        row.seed = seed;
        row.metrics = evaluate_report(result.output, z0, *setup.model, setup.target, setup.region, setup.peak,
                                      result.nfe);
        row.expected_nfe = expected_edit_nfe(config.method.strategy, g.mode, k);
        row.guidance_norms = result.guidance_norms;
        row.wall_ms = elapsed_ms(start);
        check_nfe(row);

        run.rows.push_back(std::move(row));
        run.sources.push_back(std::move(z0));
        run.results.push_back(std::move(result));
    }
    return run;
}

std::vector<std::pair<std::string, ExperimentConfig>> compare_cells(const ExperimentConfig& config) {
    const auto& c = config.compare;
    const std::vector<RegenStrategy> strategies =
        c.strategies.empty() ? std::vector<RegenStrategy>{config.method.strategy} : c.strategies;
    const std::vector<GuidanceMode> modes =
        c.guidance.empty() ? std::vector<GuidanceMode>{config.method.guidance.mode} : c.guidance;
    const std::vector<double> scales = c.hook_scales.empty() ? std::vector<double>{config.field.hook_scale} : c.hook_scales;
    const std::vector<bool> masks = c.masks.empty() ? std::vector<bool>{config.method.guidance.mask_enabled} : c.masks;

    std::vector<std::pair<std::string, ExperimentConfig>> cells;
    for (RegenStrategy strategy : strategies) {
        for (GuidanceMode mode : modes) {
            for (double s : scales) {
                for (bool mask : masks) {
                    ExperimentConfig cell = config;
                    cell.compare = CompareSpec{};
                    cell.method.strategy = strategy;
                    cell.method.guidance.mode = mode;
                    cell.field.hook_scale = s;
                    cell.method.guidance.mask_enabled = mask;
                    const std::string label = to_string(strategy) + "_" + to_string(mode) + "_s" + format_g(s) +
                                              "_mask" + (mask ? "on" : "off");
                    cells.emplace_back(label, std::move(cell));
                }
            }
        }
    }
    return cells;
}

std::vector<RunRow> run_compare(const ExperimentConfig& config) {
    config.validate();
    std::vector<RunRow> rows;
    for (auto& [label, cell] : compare_cells(config)) {
        EditRun run = run_edit(cell);
        for (auto& row : run.rows) {
            row.label = label;
            rows.push_back(std::move(row));
        }
    }
    sort_rows(rows);
    return rows;
}

SweepParam parse_sweep_param(const std::string& s) {
    if (s == "w")
        return SweepParam::w;
    if (s == "alpha")
        return SweepParam::alpha;
    if (s == "s")
        return SweepParam::s;
    if (s == "n_steps")
        return SweepParam::n_steps;
    throw ConfigError("unknown sweep parameter '" + s + "' (expected w, alpha, s or n_steps)");
}

std::string to_string(SweepParam p) {
    switch (p) {
    case SweepParam::w: return "w";
    case SweepParam::alpha: return "alpha";
    case SweepParam::s: return "s";
    case SweepParam::n_steps: return "n_steps";
    }
    return "?";
}

bool trend_holds(const std::vector<double>& series, Trend expected) {
    if (series.size() < 2)
        return false;
    const double sign = expected == Trend::increasing ? 1.0 : -1.0;
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        if (sign * (series[i + 1] - series[i]) < 0.0)
            return false;
    }
    return sign * (series.back() - series.front()) > 0.0;
}

bool SweepResult::all_hold() const {
    return std::all_of(checks.begin(), checks.end(), [](const DirectionCheck& c) { return c.holds; });
}

SweepResult run_sweep(const ExperimentConfig& config, SweepParam param, const std::vector<double>& values) {
    if (values.size() < 2)
        throw ConfigError("a sweep needs at least two values");
    if (!std::is_sorted(values.begin(), values.end()) ||
        std::adjacent_find(values.begin(), values.end()) != values.end())
        throw ConfigError("sweep values must be strictly ascending");

    SweepResult result;
    result.param = param;
    for (double v : values) {
        ExperimentConfig point = config;
        point.compare = CompareSpec{};
        switch (param) {
        case SweepParam::w: point.method.guidance.scale = v; break;
        case SweepParam::alpha: point.method.guidance.threshold = v; break;
        case SweepParam::s: point.field.hook_scale = v; break;
        case SweepParam::n_steps:
            if (!(v >= 1.0) || v != std::floor(v))
                throw ConfigError("n_steps sweep values must be positive integers");
            point.grid.n_steps = static_cast<std::size_t>(v);
            point.grid.k_start = point.grid.n_steps;
            break;
        }

        EditRun run = run_edit(point);
        SweepPoint sp;
        sp.value = v;
        sp.fingerprint = fingerprint(point);
        sp.samples = run.rows.size();
        for (auto& row : run.rows) {
            sp.mean_mse += row.metrics.mse;
            sp.mean_consistency += row.metrics.consistency;
            sp.mean_alignment += row.metrics.alignment;
            sp.mean_roundtrip += row.metrics.roundtrip;
            sp.nfe = row.metrics.nfe;
            row.label = to_string(param) + "=" + format_g(v);
            result.rows.push_back(std::move(row));
        }
        const double n = static_cast<double>(sp.samples);
        sp.mean_mse /= n;
        sp.mean_consistency /= n;
        sp.mean_alignment /= n;
        sp.mean_roundtrip /= n;
        result.points.push_back(std::move(sp));
    }

    std::vector<double> cons, align;
    for (const auto& p : result.points) {
        cons.push_back(p.mean_consistency);
        align.push_back(p.mean_alignment);
    }
    if (param == SweepParam::w) {
        result.checks.push_back({"consistency", Trend::increasing, trend_holds(cons, Trend::increasing)});
        result.checks.push_back({"alignment", Trend::increasing, trend_holds(align, Trend::increasing)});
    } else {
        result.checks.push_back({"consistency", Trend::decreasing, trend_holds(cons, Trend::decreasing)});
    }
    sort_rows(result.rows);
    return result;
}

FlowPlotData flow_trajectories(const ExperimentConfig& config, std::size_t max_samples, std::size_t steps_per_window) {
    const Setup setup = build_setup(config);
    require_2d(*setup.model);
    if (steps_per_window == 0)
        throw ConfigError("steps_per_window must be positive");
    const std::uint64_t master = master_seed(config);
    const std::size_t windows = config.field.windows;
    const TimeGrid fine = make_uniform_grid(windows * steps_per_window, 0.0, 1.0, windows);
    const std::size_t n = fine.steps();

    FlowPlotData data;
    data.sigma = setup.model->sigma();
    for (const auto& [id, m] : setup.model->means())
        data.means.push_back(xy(m));

    const std::size_t count = std::min(max_samples, config.run.samples);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t seed = sample_seed(master, i);
        const Latent noise = draw_gaussian(Vector::Zero(2), 1.0, stream_seed(seed, noise_stream));
        NfeCounter nfe;
        const auto curved = sample(*setup.base, noise, setup.source, fine, n, nfe);
        const auto straight = sample(*setup.straight, noise, setup.source, fine, n, nfe);

        std::vector<Point2> line;
        for (const auto& z : curved)
            line.push_back(xy(z));
        data.curved.push_back(std::move(line));

        // sample() lists levels from t = 1 down to t = 0; window bounds sit every
        // steps_per_window entries.
        for (std::size_t w = 0; w < windows; ++w) {
            std::vector<Point2> segment;
            for (std::size_t j = w * steps_per_window; j <= (w + 1) * steps_per_window; ++j)
                segment.push_back(xy(straight[j]));
            data.straight.push_back(std::move(segment));
        }
    }
    return data;
}

std::string render_flow_svg(const FlowPlotData& data) {
    SvgPlot plot;
    plot.set_title("curved (red) vs straightened (blue) noise-to-data trajectories");
    for (const auto& m : data.means) {
        SvgStyle style;
        style.stroke = "#999999";
        plot.add_ellipse(m, data.sigma, data.sigma, style);
    }
    SvgStyle curved;
    curved.stroke = "#d62728";
    for (const auto& line : data.curved)
        plot.add_polyline(line, curved);
    SvgStyle straight;
    straight.stroke = "#1f77b4";
    for (const auto& line : data.straight)
        plot.add_polyline(line, straight);
    return plot.render();
}

std::string render_edit_svg(const ExperimentConfig& config, const EditRun& run, std::size_t max_samples) {
    const Setup setup = build_setup(config);
    require_2d(*setup.model);
    SvgPlot plot;
    plot.set_title("inversion (dashed) and regeneration (solid) trajectories");
    draw_components(plot, *setup.model, setup.source, setup.target);

    const std::size_t count = std::min(max_samples, run.results.size());
    for (std::size_t i = 0; i < count; ++i) {
        const EditResult& r = run.results[i];
        std::vector<Point2> inversion, regeneration;
        for (const auto& z : r.anchors)
            inversion.push_back(xy(z));
        for (const auto& z : r.trajectory)
            regeneration.push_back(xy(z));

        SvgStyle dashed;
        dashed.stroke = "#7f7f7f";
        dashed.dashed = true;
        plot.add_polyline(std::move(inversion), dashed);
        SvgStyle solid;
        solid.stroke = "#2ca02c";
        solid.width = 1.5;
        plot.add_polyline(std::move(regeneration), solid);

        SvgStyle dot;
        dot.stroke = "#1f77b4";
        dot.fill = "#1f77b4";
        plot.add_marker(xy(run.sources[i]), dot);
        dot.stroke = dot.fill = "#d62728";
        plot.add_marker(xy(r.output), dot);
    }
    return plot.render();
}

}  // namespace rfedit::harness
