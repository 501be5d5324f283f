#include "rfedit/harness/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "rfedit/errors.hpp"

namespace rfedit::harness {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    if (out.empty() || (out.size() == 1 && out[0].empty()))
        throw ConfigError("empty list");
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": '" + value + "' is not a number");
    }
    if (used != value.size() || !std::isfinite(d))
        throw ConfigError(key + ": '" + value + "' is not a finite number");
    return d;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError(key + ": '" + value + "' is not a non-negative integer");
    try {
        return std::stoull(value);
    } catch (const std::exception&) {
        throw ConfigError(key + ": '" + value + "' is out of range");
    }
}

std::size_t parse_size(const std::string& key, const std::string& value) {
    return static_cast<std::size_t>(parse_u64(key, value));
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "1")
        return true;
    if (value == "off" || value == "false" || value == "0")
        return false;
    throw ConfigError(key + ": '" + value + "' is not on/off");
}

Vector parse_vector(const std::string& key, const std::string& value) {
    const auto items = split_list(value);
    Vector v(static_cast<Eigen::Index>(items.size()));
    for (std::size_t i = 0; i < items.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = parse_double(key, items[i]);
    return v;
}

template <typename T, typename F>
std::vector<T> parse_each(const std::string& key, const std::string& value, F parse) {
    std::vector<T> out;
    try {
        for (const auto& item : split_list(value))
            out.push_back(parse(item));
    } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
    }
    return out;
}

std::string format_double(double d) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

std::string format_vector(const Vector& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i > 0)
            out += ",";
        out += format_double(v[i]);
    }
    return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F format) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0)
            out += ",";
        out += format(items[i]);
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"field.base", [](ExperimentConfig& c, const std::string& v) { c.field.base = v; }},
        {"field.sigma", [](ExperimentConfig& c, const std::string& v) { c.field.sigma = parse_double("field.sigma", v); }},
        {"field.schedule", [](ExperimentConfig& c, const std::string& v) { c.field.schedule = v; }},
        {"field.windows", [](ExperimentConfig& c, const std::string& v) { c.field.windows = parse_size("field.windows", v); }},
        {"field.hook_scale",
         [](ExperimentConfig& c, const std::string& v) { c.field.hook_scale = parse_double("field.hook_scale", v); }},
        {"grid.n_steps", [](ExperimentConfig& c, const std::string& v) { c.grid.n_steps = parse_size("grid.n_steps", v); }},
        {"grid.k_start", [](ExperimentConfig& c, const std::string& v) { c.grid.k_start = parse_size("grid.k_start", v); }},
        {"method.inversion", [](ExperimentConfig& c, const std::string& v) { c.method.inversion = v; }},
        {"method.strategy", [](ExperimentConfig& c, const std::string& v) { c.method.strategy = parse_regen_strategy(v); }},
        {"method.guidance", [](ExperimentConfig& c, const std::string& v) { c.method.guidance.mode = parse_guidance_mode(v); }},
        {"method.w", [](ExperimentConfig& c, const std::string& v) { c.method.guidance.scale = parse_double("method.w", v); }},
        {"method.alpha",
         [](ExperimentConfig& c, const std::string& v) { c.method.guidance.threshold = parse_double("method.alpha", v); }},
        {"method.mask",
         [](ExperimentConfig& c, const std::string& v) { c.method.guidance.mask_enabled = parse_bool("method.mask", v); }},
        {"method.mask_mode", [](ExperimentConfig& c, const std::string& v) { c.method.guidance.mask_mode = parse_mask_mode(v); }},
        {"method.source", [](ExperimentConfig& c, const std::string& v) { c.method.source = v; }},
        {"method.target", [](ExperimentConfig& c, const std::string& v) { c.method.target = v; }},
        {"run.seed", [](ExperimentConfig& c, const std::string& v) { c.run.seed = parse_u64("run.seed", v); }},
        {"run.samples", [](ExperimentConfig& c, const std::string& v) { c.run.samples = parse_size("run.samples", v); }},
        {"metrics.region", [](ExperimentConfig& c, const std::string& v) { c.metrics.region = v; }},
        {"metrics.region_threshold",
         [](ExperimentConfig& c, const std::string& v) {
             c.metrics.region_threshold = parse_double("metrics.region_threshold", v);
         }},
        {"compare.strategies",
         [](ExperimentConfig& c, const std::string& v) {
             c.compare.strategies = parse_each<RegenStrategy>("compare.strategies", v, parse_regen_strategy);
         }},
        {"compare.guidance",
         [](ExperimentConfig& c, const std::string& v) {
             c.compare.guidance = parse_each<GuidanceMode>("compare.guidance", v, parse_guidance_mode);
         }},
        {"compare.hook_scales",
         [](ExperimentConfig& c, const std::string& v) {
             c.compare.hook_scales =
                 parse_each<double>("compare.hook_scales", v, [](const std::string& s) { return parse_double("compare.hook_scales", s); });
         }},
        {"compare.masks",
         [](ExperimentConfig& c, const std::string& v) {
             c.compare.masks =
                 parse_each<bool>("compare.masks", v, [](const std::string& s) { return parse_bool("compare.masks", s); });
         }},
        {"output.dir", [](ExperimentConfig& c, const std::string& v) { c.output.dir = v; }},
        {"output.format", [](ExperimentConfig& c, const std::string& v) { c.output.format = v; }},
        {"output.svg", [](ExperimentConfig& c, const std::string& v) { c.output.svg = parse_bool("output.svg", v); }},
    };
    return table;
}

}  // namespace

ExperimentConfig default_config() {
    ExperimentConfig c;
    c.field.means["src"] = (Vector(2) << -2.0, 0.0).finished();
    c.field.means["tgt"] = (Vector(2) << 2.0, 0.0).finished();
    return c;
}

void ExperimentConfig::validate() const {
    if (!run.seed)
        throw ConfigError("a seed is mandatory (run.seed or --seed)");
    if (field.base != "rf" && field.base != "vp")
        throw ConfigError("field.base must be rf or vp");
    if (field.schedule != "cosine" && field.schedule != "linear")
        throw ConfigError("field.schedule must be cosine or linear");
    if (!(field.sigma > 0.0))
        throw ConfigError("field.sigma must be > 0");
    if (field.windows == 0)
        throw ConfigError("field.windows must be >= 1");
    if (!(field.hook_scale >= 0.0))
        throw ConfigError("field.hook_scale must be >= 0");
    if (field.means.empty())
        throw ConfigError("no field.mean.* components defined");
    if (!field.means.count(method.source))
        throw ConfigError("method.source '" + method.source + "' has no field.mean entry");
    if (!field.means.count(method.target))
        throw ConfigError("method.target '" + method.target + "' has no field.mean entry");
    const auto dim = field.means.begin()->second.size();
    for (const auto& [id, m] : field.means) {
        if (m.size() != dim)
            throw ConfigError("field.mean." + id + " has a different dimension");
    }
    if (grid.n_steps == 0 || grid.n_steps % field.windows != 0)
        throw ConfigError("grid.n_steps must be a positive multiple of field.windows");
    if (grid.k_start == 0 || grid.k_start > grid.n_steps)
        throw ConfigError("grid.k_start must lie in [1, grid.n_steps]");
    if (method.inversion != "perrfi" && method.inversion != "ddim")
        throw ConfigError("method.inversion must be perrfi or ddim");
    method.guidance.validate();
    if (run.samples == 0)
        throw ConfigError("run.samples must be >= 1");
    if (metrics.region != "none" && metrics.region != "mean_difference")
        throw ConfigError("metrics.region must be none or mean_difference");
    if (!(metrics.region_threshold >= 0.0 && metrics.region_threshold <= 1.0))
        throw ConfigError("metrics.region_threshold must lie in [0, 1]");
    for (double s : compare.hook_scales) {
        if (!(s >= 0.0))
            throw ConfigError("compare.hook_scales must be >= 0");
    }
    if (output.format != "csv" && output.format != "json")
        throw ConfigError("output.format must be csv or json");
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig config = default_config();
    bool custom_means = false;
    std::set<std::string> seen;

    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second)
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");

        if (key.rfind("field.mean.", 0) == 0) {
            const std::string id = key.substr(std::string("field.mean.").size());
            if (id.empty())
                throw ConfigError("line " + std::to_string(line_no) + ": empty component id");
            if (!custom_means) {
                config.field.means.clear();
                custom_means = true;
            }
            config.field.means[id] = parse_vector(key, value);
            continue;
        }
        auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        it->second(config, value);
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string canonical_text(const ExperimentConfig& c) {
    std::map<std::string, std::string> kv;
    kv["field.base"] = c.field.base;
    kv["field.sigma"] = format_double(c.field.sigma);
    kv["field.schedule"] = c.field.schedule;
    kv["field.windows"] = std::to_string(c.field.windows);
    kv["field.hook_scale"] = format_double(c.field.hook_scale);
    for (const auto& [id, m] : c.field.means)
        kv["field.mean." + id] = format_vector(m);
    kv["grid.n_steps"] = std::to_string(c.grid.n_steps);
    kv["grid.k_start"] = std::to_string(c.grid.k_start);
    kv["method.inversion"] = c.method.inversion;
    kv["method.strategy"] = to_string(c.method.strategy);
    kv["method.guidance"] = to_string(c.method.guidance.mode);
    kv["method.w"] = format_double(c.method.guidance.scale);
    kv["method.alpha"] = format_double(c.method.guidance.threshold);
    kv["method.mask"] = c.method.guidance.mask_enabled ? "on" : "off";
    kv["method.mask_mode"] = to_string(c.method.guidance.mask_mode);
    kv["method.source"] = c.method.source;
    kv["method.target"] = c.method.target;
    kv["run.seed"] = c.run.seed ? std::to_string(*c.run.seed) : "unset";
    kv["run.samples"] = std::to_string(c.run.samples);
    kv["metrics.region"] = c.metrics.region;
    kv["metrics.region_threshold"] = format_double(c.metrics.region_threshold);
    if (!c.compare.strategies.empty())
        kv["compare.strategies"] = join(c.compare.strategies, [](RegenStrategy s) { return to_string(s); });
    if (!c.compare.guidance.empty())
        kv["compare.guidance"] = join(c.compare.guidance, [](GuidanceMode m) { return to_string(m); });
    if (!c.compare.hook_scales.empty())
        kv["compare.hook_scales"] = join(c.compare.hook_scales, format_double);
    if (!c.compare.masks.empty())
        kv["compare.masks"] = join(c.compare.masks, [](bool b) { return std::string(b ? "on" : "off"); });

    std::string out;
    for (const auto& [k, v] : kv)
        out += k + " = " + v + "\n";
    return out;
}

std::string fingerprint(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical_text(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace rfedit::harness
