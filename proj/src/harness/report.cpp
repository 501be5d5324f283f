#include "rfedit/harness/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "rfedit/errors.hpp"

namespace rfedit::harness {

namespace {

std::string real(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string norms_field(const std::vector<double>& norms) {
    std::string out;
    for (std::size_t i = 0; i < norms.size(); ++i) {
        if (i > 0)
            out += ";";
        out += real(norms[i]);
    }
    return out;
}

}  // namespace

std::string rows_csv(const std::vector<RunRow>& rows) {
    std::string out = std::string(runs_csv_header) + "\n";
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        out += r.fingerprint + "," + r.label + "," + std::to_string(r.sample) + "," + std::to_string(r.seed) + "," +
               real(m.mse) + "," + real(m.psnr) + "," + real(m.consistency) + "," + real(m.alignment) + "," +
               real(m.roundtrip) + "," + std::to_string(m.nfe) + "," + std::to_string(r.expected_nfe) + "," +
               norms_field(r.guidance_norms) + "\n";
    }
    return out;
}

std::string rows_json(const std::vector<RunRow>& rows) {
    nlohmann::ordered_json array = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        nlohmann::ordered_json o;
        o["fingerprint"] = r.fingerprint;
        o["label"] = r.label;
        o["sample"] = r.sample;
        o["seed"] = r.seed;
        o["mse"] = m.mse;
        if (std::isinf(m.psnr))
            o["psnr"] = real(m.psnr);
        else
            o["psnr"] = m.psnr;
        o["consistency"] = m.consistency;
        o["alignment"] = m.alignment;
        o["roundtrip"] = m.roundtrip;
        o["nfe"] = m.nfe;
        o["expected_nfe"] = r.expected_nfe;
        o["guidance_norms"] = r.guidance_norms;
        array.push_back(std::move(o));
    }
    return array.dump(2) + "\n";
}

std::string timing_csv(const std::vector<RunRow>& rows) {
    std::string out = "fingerprint,label,sample,wall_ms\n";
    for (const auto& r : rows) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
        out += r.fingerprint + "," + r.label + "," + std::to_string(r.sample) + "," + buf + "\n";
    }
    return out;
}

std::string sweep_csv(const SweepResult& sweep) {
    std::string out = "param,value,fingerprint,samples,mean_mse,mean_consistency,mean_alignment,mean_roundtrip,nfe\n";
    for (const auto& p : sweep.points) {
        out += to_string(sweep.param) + "," + real(p.value) + "," + p.fingerprint + "," + std::to_string(p.samples) +
               "," + real(p.mean_mse) + "," + real(p.mean_consistency) + "," + real(p.mean_alignment) + "," +
               real(p.mean_roundtrip) + "," + std::to_string(p.nfe) + "\n";
    }
    for (const auto& c : sweep.checks) {
        out += std::string("# check ") + c.metric + " " +
               (c.expected == Trend::increasing ? "increasing" : "decreasing") + " " +
               (c.holds ? "holds" : "VIOLATED") + "\n";
    }
    return out;
}

void write_text(const std::string& dir, const std::string& name, const std::string& content) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write '" + path.string() + "'");
    out << content;
}

}  // namespace rfedit::harness
