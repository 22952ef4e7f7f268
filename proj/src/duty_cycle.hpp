#pragma once

#include "params.hpp"
#include "pulse_metrics.hpp"

namespace lsa {

struct DutyCycleResult {
    double on_fraction = 0.5;
    double turn_on_delay = 0.0;  // s, edge to 10% of the first-peak power
    double ro_half_period = 0.0; // s, half the spacing of the first two peaks
    bool overdamped = false;     ///< no second peak; fallback rule used
    bool clamped = false;        ///< raw value fell outside [0.05, 0.95]
};

inline constexpr double kMinOnFraction = 0.05;
inline constexpr double kMaxOnFraction = 0.95;
/// A second maximum counts as relaxation ringing only if it stands this
/// fraction of the first peak above the dip before it. Smaller bumps come
/// from drive-filter overshoot on an overdamped plateau.
inline constexpr double kRingingProminence = 0.01;

/// On-time long enough for the turn-on delay plus half a relaxation
/// oscillation. Measured on a noise-free, free-running run at 50% duty;
/// the last of a few periods is analysed so the filter and carrier
/// reservoir have settled. Requires I_on > I_th.
DutyCycleResult auto_duty_cycle(const LaserParams& p, const DriveWaveform& wave, double dt = kDefaultStep);

} // namespace lsa
