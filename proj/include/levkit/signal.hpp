#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "levkit/dynamics.hpp"

namespace levkit::signal {

struct InvalidBand : std::runtime_error {
    explicit InvalidBand(const std::string& what) : std::runtime_error(what) {}
};
struct RateMismatch : std::runtime_error {
    explicit RateMismatch(const std::string& what) : std::runtime_error(what) {}
};
struct TooShort : std::runtime_error {
    explicit TooShort(const std::string& what) : std::runtime_error(what) {}
};

/// Linear-phase FIR bandpass: odd length, exactly symmetric coefficients.
struct FirFilter {
    std::vector<double> coefficients;
    double sample_rate = 0.0;  ///< [Hz]
    double band_low = 0.0;     ///< [Hz]
    double band_high = 0.0;    ///< [Hz]
    std::string window = "hamming";

    std::size_t length() const { return coefficients.size(); }
};

/// Windowed-sinc bandpass (Hamming window). A window-shaped correction pins
/// the DC gain to zero, which the raw truncated design misses at the 1e-4
/// level; the passband response changes only below 1e-6.
FirFilter design_bandpass(int length, double sample_rate, double f_low, double f_high);

/// Complex frequency response at f [Hz].
std::complex<double> frequency_response(const FirFilter& filter, double f);

/// Group delay of the symmetric filter expressed in oscillation periods of
/// f0: ((N-1)/2) / fs * f0.
double group_delay_periods(const FirFilter& filter, double f0);

/// Direct-form convolution (zero-padded warm-up, output length = input
/// length, warmup marked on the result), then an optional extra delay in
/// samples (integer shift + linear interpolation for the fraction), then an
/// affine gain/offset.
dynamics::Trajectory apply_filter(const FirFilter& filter, const dynamics::Trajectory& traj,
                                  double extra_delay_samples = 0.0, double gain = 1.0,
                                  double dc_shift = 0.0);

/// Keep every factor-th sample after an anti-alias FIR lowpass.
/// factor == 1 returns the input unchanged.
dynamics::Trajectory decimate(const dynamics::Trajectory& traj, int factor);

/// One-sided power spectral density, density normalization: the trapezoid
/// integral over frequency equals the time-domain variance.
struct Spectrum {
    std::vector<double> frequency;  ///< [Hz], 0 .. fs/2
    std::vector<double> psd;        ///< [x^2/Hz]
    double sample_rate = 0.0;
    std::size_t nperseg = 0;
    double overlap = 0.0;
    std::string window;
};

/// Welch averaged periodogram. Segments are mean-subtracted, windowed
/// (hann | hamming | boxcar), zero-padded to the next power of two.
Spectrum welch_psd(const dynamics::Trajectory& traj, std::size_t nperseg,
                   double overlap_fraction = 0.5, const std::string& window = "hann");

/// Trapezoid integral of the PSD over [f_low, f_high] (band edges clamped
/// to the spectrum grid, partial bins interpolated).
double band_power(const Spectrum& spectrum, double f_low, double f_high);

/// In-place iterative radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data);

/// Delay of `output` relative to `input` in samples, from the cross-
/// correlation peak with parabolic refinement. Signals must be same length.
double estimate_delay_samples(const std::vector<double>& input,
                              const std::vector<double>& output);

}  // namespace levkit::signal
