#include "thermoflow/lap_trace.hpp"

#include "thermoflow/errors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace thermoflow {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    // FNV-1a over the 8 bytes of v.
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffU;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& field, std::size_t line) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("trace line " + std::to_string(line) + ": cannot parse '" + field + "'");
    }
    return value;
}

}  // namespace

LapTrace::LapTrace(std::vector<EngineSample> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) {
        throw ConfigError("lap trace is empty");
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (!std::isfinite(s.t) || !std::isfinite(s.n) || s.n < 0.0) {
            throw ConfigError("lap trace sample " + std::to_string(i) + " has invalid time or speed");
        }
        if (i > 0 && !(s.t > samples_[i - 1].t)) {
            throw ConfigError("lap trace time must be strictly increasing (sample " + std::to_string(i) + ")");
        }
        h = mix(h, std::bit_cast<std::uint64_t>(s.t));
        h = mix(h, std::bit_cast<std::uint64_t>(s.n));
        h = mix(h, s.fired ? 1U : 0U);
    }
    fingerprint_ = h;
}

bool LapTrace::has_both_states() const {
    // The final sample only closes the last segment; its flag never acts.
    const auto acting = samples_.size() > 1 ? samples_.end() - 1 : samples_.end();
    const bool any_fired = std::any_of(samples_.begin(), acting, [](const auto& s) { return s.fired; });
    const bool any_coast = std::any_of(samples_.begin(), acting, [](const auto& s) { return !s.fired; });
    return any_fired && any_coast;
}

EngineSample LapTrace::at(double t) const {
    if (t <= samples_.front().t) {
        return {t, samples_.front().n, samples_.front().fired};
    }
    if (t >= samples_.back().t) {
        return {t, samples_.back().n, samples_.back().fired};
    }
    const auto upper = std::upper_bound(samples_.begin(), samples_.end(), t,
                                        [](double value, const EngineSample& s) { return value < s.t; });
    const auto& hi = *upper;
    const auto& lo = *(upper - 1);
    const double w = (t - lo.t) / (hi.t - lo.t);
    return {t, lo.n + w * (hi.n - lo.n), lo.fired};
}

LapTrace parse_trace_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<EngineSample> samples;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string content = trim(line);
        if (content.empty() || content.front() == '#') {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(content);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(trim(field));
        }
        if (!header_seen) {
            header_seen = true;
            if (fields.size() != 3 || fields[0] != "time_s" || fields[1] != "speed_rpm" || fields[2] != "fired") {
                throw ConfigError("trace header must be 'time_s,speed_rpm,fired'");
            }
            continue;
        }
        if (fields.size() != 3) {
            throw ConfigError("trace line " + std::to_string(line_no) + ": expected 3 columns");
        }
        const double t = parse_number(fields[0], line_no);
        const double n = parse_number(fields[1], line_no);
        const double fired = parse_number(fields[2], line_no);
        if (fired != 0.0 && fired != 1.0) {
            throw ConfigError("trace line " + std::to_string(line_no) + ": fired must be 0 or 1");
        }
        samples.push_back({t, n, fired == 1.0});
    }
    LapTrace trace(std::move(samples));
    if (!trace.has_both_states()) {
        throw ConfigError("lap trace needs at least one fired and one coasting segment");
    }
    return trace;
}

LapTrace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open trace file " + path.string());
    }
    return parse_trace_csv(in);
}

void write_trace_csv(const LapTrace& trace, std::ostream& out) {
    out << "time_s,speed_rpm,fired\n";
    out << std::setprecision(17);
    for (const auto& s : trace.samples()) {
        out << s.t << ',' << s.n << ',' << (s.fired ? 1 : 0) << '\n';
    }
}

LapTrace synthetic_lap() {
    struct Straight {
        double full_load_s;
        double peak_rpm;
        double braking_s;
        double corner_rpm;
    };
    // Starts and ends at 4200 rpm on full load out of the last corner.
    constexpr Straight kLap[] = {
        {15.0, 7600.0, 3.0, 3800.0},
        {4.0, 5600.0, 1.5, 4200.0},
        {6.0, 6600.0, 2.25, 3600.0},
        {3.5, 5400.0, 1.5, 4000.0},
        {9.0, 7200.0, 2.625, 3500.0},
        {5.0, 6000.0, 1.875, 4400.0},
        {4.0, 5800.0, 1.5, 3900.0},
        {7.0, 6900.0, 2.25, 3600.0},
        {3.5, 5300.0, 1.5, 4300.0},
        {6.5, 6800.0, 1.875, 4200.0},
    };
    std::vector<EngineSample> samples;
    double t = 0.0;
    double n = 4200.0;
    for (const auto& s : kLap) {
        samples.push_back({t, n, true});
        t += s.full_load_s;
        samples.push_back({t, s.peak_rpm, false});
        t += s.braking_s;
        n = s.corner_rpm;
    }
    samples.push_back({t, n, true});
    return LapTrace(std::move(samples));
}

LapTrace constant_trace(double n, bool fired, double duration) {
    return LapTrace({{0.0, n, fired}, {duration, n, fired}});
}

}  // namespace thermoflow
