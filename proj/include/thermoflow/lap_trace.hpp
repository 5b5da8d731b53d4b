#pragma once

#include "thermoflow/heat_input.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace thermoflow {

/// Engine speed and firing state over one lap. Speed is interpolated linearly
/// between samples; the firing flag holds its value until the next sample.
class LapTrace {
public:
    LapTrace() = default;
    /// Throws ConfigError unless the samples are non-empty, strictly increasing
    /// in time, finite, and n >= 0.
    explicit LapTrace(std::vector<EngineSample> samples);

    /// True when the trace alternates between firing and coasting at least once.
    [[nodiscard]] bool has_both_states() const;

    [[nodiscard]] const std::vector<EngineSample>& samples() const { return samples_; }
    [[nodiscard]] double start_time() const { return samples_.front().t; }
    [[nodiscard]] double end_time() const { return samples_.back().t; }
    [[nodiscard]] double duration() const { return end_time() - start_time(); }

    /// Sample at time t; t is clamped to [start_time, end_time].
    [[nodiscard]] EngineSample at(double t) const;

    /// Content hash; two traces with equal samples share a fingerprint.
    [[nodiscard]] std::uint64_t fingerprint() const { return fingerprint_; }

private:
    std::vector<EngineSample> samples_;
    std::uint64_t fingerprint_ = 0;
};

/// CSV with header `time_s,speed_rpm,fired`. Throws ConfigError on malformed
/// content or a trace without both fired and coasting samples, and
/// std::runtime_error if the file cannot be opened.
[[nodiscard]] LapTrace read_trace_csv(const std::filesystem::path& path);
[[nodiscard]] LapTrace parse_trace_csv(std::istream& in);
void write_trace_csv(const LapTrace& trace, std::ostream& out);

/// Built-in 83.375 s race lap: ten full-load straights separated by braking
/// (coasting) phases, speeds between 3500 and 7600 rpm.
[[nodiscard]] LapTrace synthetic_lap();

/// Single-state trace of the given length, for steady-state studies.
[[nodiscard]] LapTrace constant_trace(double n, bool fired, double duration);

}  // namespace thermoflow
