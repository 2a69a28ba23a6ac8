#include "lz/pulse_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lz {

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void append_array(std::string& out, const std::vector<double>& values) {
    out += '[';
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k > 0) out += ',';
        out += format_double(values[k]);
    }
    out += ']';
}

}  // namespace

std::string pulse_to_json(const ControlPulse& pulse) {
    std::string out = "{\"version\":1,\"T\":";
    out += format_double(pulse.horizon());
    out += ",\"boundaries\":";
    append_array(out, pulse.boundaries);
    out += ",\"amplitudes\":";
    append_array(out, pulse.amplitudes);
    out += "}";
    return out;
}

ControlPulse pulse_from_json(const std::string& text) {
    // Every failure mode below (bad JSON, wrong types, bad geometry)
    // is a schema violation of the same file; report them uniformly.
    try {
        const nlohmann::json doc = nlohmann::json::parse(text);
        if (!doc.is_object() || !doc.contains("version") ||
            !doc.contains("boundaries") || !doc.contains("amplitudes") ||
            !doc.contains("T")) {
            throw std::runtime_error(
                "pulse file: expected object with version, T, boundaries, "
                "amplitudes");
        }
        if (doc["version"].get<int>() != 1) {
            throw std::runtime_error("pulse file: unsupported version");
        }
        std::vector<double> boundaries =
            doc["boundaries"].get<std::vector<double>>();
        std::vector<double> amplitudes =
            doc["amplitudes"].get<std::vector<double>>();
        ControlPulse pulse(std::move(boundaries), std::move(amplitudes));
        const double T = doc["T"].get<double>();
        if (std::abs(pulse.horizon() - T) >
            1e-12 * std::max(1.0, std::abs(T))) {
            throw std::runtime_error("pulse file: T does not match last boundary");
        }
        return pulse;
    } catch (const std::runtime_error&) {
        throw;
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("pulse file: ") + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    out << content;
    out.flush();
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open for reading: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in && !in.eof()) {
        throw std::runtime_error("read failed: " + path);
    }
    return buf.str();
}

}  // namespace lz
