#pragma once

#include "params.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace lsa {

/// Analog prototype poles (rad/s) of a low-pass with its -3 dB point at
/// `cutoff_hz`. Bessel poles come from the reverse Bessel polynomial and are
/// rescaled so the magnitude response crosses 1/√2 at the cutoff.
std::vector<std::complex<double>> lowpass_poles(FilterKind kind, int order, double cutoff_hz);

/// Causal IIR low-pass, unity gain at DC, realised as a cascade of
/// bilinear-transformed (pre-warped) first- and second-order sections.
class LowPassFilter {
public:
    LowPassFilter() = default; // identity
    LowPassFilter(const FilterSpec& spec, double dt);

    /// Puts every section in the steady state for a constant input `level`.
    void reset(double level);
    double process(double x);

    bool is_identity() const { return sections_.empty(); }

private:
    struct Section {
        double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;
        double s1 = 0, s2 = 0;
    };
    std::vector<Section> sections_;
};

/// Sample grid implied by a drive period and an integration step.
struct PulseGrid {
    double dt = 0.0;
    std::int64_t samples_per_period = 0;
    std::int64_t on_samples = 0;

    static PulseGrid make(const DriveWaveform& wave, double dt);
    double period() const { return static_cast<double>(samples_per_period) * dt; }
};

/// Streams the filtered drive current one sample at a time. Sample i is the
/// current at t = i·dt; the ideal wave is high for the first `on_samples`
/// samples of every period.
class CurrentSource {
public:
    CurrentSource(const DriveWaveform& wave, double dt);

    double next();
    const PulseGrid& grid() const { return grid_; }

private:
    DriveWaveform wave_;
    PulseGrid grid_;
    LowPassFilter filter_;
    std::int64_t index_ = 0;
};

struct SampledCurrent {
    PulseGrid grid;
    std::vector<double> values; // A, length n_pulses · samples_per_period
};

/// Ideal pulse wave passed through the drive's low-pass filter and clipped at
/// zero. Rejects dt > period/100.
SampledCurrent synthesize_current(const DriveWaveform& wave, double dt);

} // namespace lsa
