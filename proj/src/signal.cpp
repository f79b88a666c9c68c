#include "levkit/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "levkit/constants.hpp"

namespace levkit::signal {

using constants::pi;
using constants::two_pi;

namespace {

std::vector<double> make_window(const std::string& name, std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (n < 2) return w;
    if (name == "hann") {
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = 0.5 - 0.5 * std::cos(two_pi * static_cast<double>(i) / (n - 1.0));
        }
    } else if (name == "hamming") {
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = 0.54 - 0.46 * std::cos(two_pi * static_cast<double>(i) / (n - 1.0));
        }
    } else if (name == "boxcar") {
        // all ones
    } else {
        throw std::invalid_argument("unknown window: " + name);
    }
    return w;
}

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

FirFilter design_bandpass(int length, double sample_rate, double f_low, double f_high) {
    if (length < 1 || length % 2 == 0) {
        throw InvalidBand("design_bandpass: length must be odd and positive");
    }
    if (!(sample_rate > 0.0) || !(f_low > 0.0) || !(f_high > f_low) ||
        !(f_high < 0.5 * sample_rate)) {
        throw InvalidBand("design_bandpass: need 0 < f_low < f_high < fs/2");
    }

    const auto n = static_cast<std::size_t>(length);
    const auto mid = static_cast<std::ptrdiff_t>((n - 1) / 2);
    const double w_lo = two_pi * f_low / sample_rate;
    const double w_hi = two_pi * f_high / sample_rate;

    FirFilter filter;
    filter.sample_rate = sample_rate;
    filter.band_low = f_low;
    filter.band_high = f_high;
    filter.coefficients.assign(n, 0.0);
    const std::vector<double> window = make_window("hamming", n);

    // Ideal bandpass impulse response, windowed. Computed for m >= 0 and
    // mirrored so the symmetry is exact to the last bit.
    auto& h = filter.coefficients;
    for (std::ptrdiff_t m = 0; m <= mid; ++m) {
        double ideal;
        if (m == 0) {
            ideal = (w_hi - w_lo) / pi;
        } else {
            ideal = (std::sin(w_hi * static_cast<double>(m)) -
                     std::sin(w_lo * static_cast<double>(m))) /
                    (pi * static_cast<double>(m));
        }
        const double value = ideal * window[static_cast<std::size_t>(mid + m)];
        h[static_cast<std::size_t>(mid + m)] = value;
        h[static_cast<std::size_t>(mid - m)] = value;
    }

    // Pin the DC gain to zero with a window-shaped projection.
    const double h_sum = std::accumulate(h.begin(), h.end(), 0.0);
    const double w_sum = std::accumulate(window.begin(), window.end(), 0.0);
    const double scale = h_sum / w_sum;
    for (std::ptrdiff_t m = 0; m <= mid; ++m) {
        const double corrected =
            h[static_cast<std::size_t>(mid + m)] - scale * window[static_cast<std::size_t>(mid + m)];
        h[static_cast<std::size_t>(mid + m)] = corrected;
        h[static_cast<std::size_t>(mid - m)] = corrected;
    }
    return filter;
}

std::complex<double> frequency_response(const FirFilter& filter, double f) {
    const double w = two_pi * f / filter.sample_rate;
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t k = 0; k < filter.coefficients.size(); ++k) {
        acc += filter.coefficients[k] *
               std::exp(std::complex<double>(0.0, -w * static_cast<double>(k)));
    }
    return acc;
}

double group_delay_periods(const FirFilter& filter, double f0) {
    if (filter.length() == 0 || !(filter.sample_rate > 0.0)) {
        throw std::invalid_argument("group_delay_periods: empty filter");
    }
    const double delay_s =
        (static_cast<double>(filter.length() - 1) / 2.0) / filter.sample_rate;
    return delay_s * f0;
}

dynamics::Trajectory apply_filter(const FirFilter& filter, const dynamics::Trajectory& traj,
                                  double extra_delay_samples, double gain, double dc_shift) {
    if (filter.length() == 0) throw std::invalid_argument("apply_filter: empty filter");
    if (!(traj.sample_rate > 0.0)) throw std::invalid_argument("apply_filter: bad sample rate");
    if (filter.sample_rate > 0.0 &&
        std::abs(filter.sample_rate - traj.sample_rate) >
            1e-9 * std::max(filter.sample_rate, traj.sample_rate)) {
        throw RateMismatch("apply_filter: trajectory rate differs from the filter design rate");
    }
    if (extra_delay_samples < 0.0) {
        throw std::invalid_argument("apply_filter: extra delay must be >= 0");
    }

    const auto& x = traj.x;
    const std::size_t n = x.size();
    const auto& h = filter.coefficients;
    const std::size_t nh = h.size();

    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        const std::size_t kmax = std::min(nh - 1, i);
        for (std::size_t k = 0; k <= kmax; ++k) {
            acc += h[k] * x[i - k];
        }
        y[i] = acc;
    }

    const auto shift = static_cast<std::size_t>(std::floor(extra_delay_samples));
    const double frac = extra_delay_samples - static_cast<double>(shift);

    dynamics::Trajectory out;
    out.sample_rate = traj.sample_rate;
    out.start_time = traj.start_time;
    out.seed = traj.seed;
    out.x.assign(n, dc_shift);
    for (std::size_t i = 0; i < n; ++i) {
        double delayed = 0.0;
        if (i >= shift) {
            const double y0 = y[i - shift];
            const double y1 = (i >= shift + 1) ? y[i - shift - 1] : 0.0;
            delayed = y0 + frac * (y1 - y0);
        }
        out.x[i] = gain * delayed + dc_shift;
    }
    out.warmup = std::min(n, nh - 1 + shift + (frac > 0.0 ? 1u : 0u));
    return out;
}

dynamics::Trajectory decimate(const dynamics::Trajectory& traj, int factor) {
    if (factor < 1) throw std::invalid_argument("decimate: factor must be >= 1");
    if (factor == 1) return traj;
    if (!(traj.sample_rate > 0.0)) throw std::invalid_argument("decimate: bad sample rate");

    // Anti-alias lowpass at 80% of the new Nyquist rate.
    const double new_nyquist = 0.5 * traj.sample_rate / factor;
    const int taps = 2 * (16 * factor) + 1;
    const double cutoff = 0.8 * new_nyquist;

    const auto n = static_cast<std::size_t>(taps);
    const std::size_t mid = (n - 1) / 2;
    std::vector<double> h(n, 0.0);
    const std::vector<double> window = make_window("hamming", n);
    const double wc = two_pi * cutoff / traj.sample_rate;
    for (std::size_t i = 0; i < n; ++i) {
        const auto m = static_cast<double>(i) - static_cast<double>(mid);
        h[i] = (m == 0.0 ? wc / pi : std::sin(wc * m) / (pi * m)) * window[i];
    }
    // unity DC gain
    const double h_sum = std::accumulate(h.begin(), h.end(), 0.0);
    for (auto& c : h) c /= h_sum;

    // Zero-phase pass: compensate the filter's integer group delay so
    // decimation does not shift the time axis.
    auto filter_at = [&](const std::vector<double>& s, std::size_t i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const std::ptrdiff_t j =
                static_cast<std::ptrdiff_t>(i + mid) - static_cast<std::ptrdiff_t>(k);
            if (j >= 0 && j < static_cast<std::ptrdiff_t>(s.size())) {
                acc += h[k] * s[static_cast<std::size_t>(j)];
            }
        }
        return acc;
    };

    dynamics::Trajectory out;
    out.sample_rate = traj.sample_rate / factor;
    out.start_time = traj.start_time;
    out.seed = traj.seed;
    const std::size_t n_out = (traj.x.size() + factor - 1) / factor;
    out.x.reserve(n_out);
    const bool with_v = traj.has_velocity();
    if (with_v) out.v.reserve(n_out);
    for (std::size_t i = 0; i < traj.x.size(); i += factor) {
        out.x.push_back(filter_at(traj.x, i));
        if (with_v) out.v.push_back(filter_at(traj.v, i));
    }
    out.warmup = (mid / factor) + 1;
    return out;
}

void fft_radix2(std::vector<std::complex<double>>& data) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0) {
        throw std::invalid_argument("fft_radix2: size must be a power of two");
    }
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -two_pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> t = data[i + k + len / 2] * w;
                data[i + k] = u + t;
                data[i + k + len / 2] = u - t;
                w *= wlen;
            }
        }
    }
}

Spectrum welch_psd(const dynamics::Trajectory& traj, std::size_t nperseg,
                   double overlap_fraction, const std::string& window_name) {
    if (!(traj.sample_rate > 0.0)) throw std::invalid_argument("welch_psd: bad sample rate");
    if (nperseg < 8) throw std::invalid_argument("welch_psd: nperseg must be >= 8");
    if (nperseg > traj.x.size()) {
        throw TooShort("welch_psd: nperseg exceeds the sample count");
    }
    if (overlap_fraction < 0.0 || overlap_fraction >= 1.0) {
        throw std::invalid_argument("welch_psd: overlap fraction must be in [0, 1)");
    }

    const double fs = traj.sample_rate;
    const std::vector<double> window = make_window(window_name, nperseg);
    double window_power = 0.0;
    for (double w : window) window_power += w * w;

    const auto noverlap = static_cast<std::size_t>(
        std::floor(overlap_fraction * static_cast<double>(nperseg)));
    const std::size_t hop = std::max<std::size_t>(1, nperseg - noverlap);
    const std::size_t nfft = next_power_of_two(nperseg);
    const std::size_t nfreq = nfft / 2 + 1;

    std::vector<double> acc(nfreq, 0.0);
    std::vector<std::complex<double>> buf(nfft);
    std::size_t segments = 0;
    for (std::size_t start = 0; start + nperseg <= traj.x.size(); start += hop) {
        double mean = 0.0;
        for (std::size_t i = 0; i < nperseg; ++i) mean += traj.x[start + i];
        mean /= static_cast<double>(nperseg);

        std::fill(buf.begin(), buf.end(), std::complex<double>{});
        for (std::size_t i = 0; i < nperseg; ++i) {
            buf[i] = (traj.x[start + i] - mean) * window[i];
        }
        fft_radix2(buf);
        for (std::size_t k = 0; k < nfreq; ++k) {
            acc[k] += std::norm(buf[k]);
        }
        ++segments;
    }

    Spectrum spec;
    spec.sample_rate = fs;
    spec.nperseg = nperseg;
    spec.overlap = overlap_fraction;
    spec.window = window_name;
    spec.frequency.resize(nfreq);
    spec.psd.resize(nfreq);
    const double scale = 1.0 / (fs * window_power * static_cast<double>(segments));
    for (std::size_t k = 0; k < nfreq; ++k) {
        spec.frequency[k] = fs * static_cast<double>(k) / static_cast<double>(nfft);
        const bool interior = (k != 0 && k != nfreq - 1);
        spec.psd[k] = acc[k] * scale * (interior ? 2.0 : 1.0);
    }
    return spec;
}

double band_power(const Spectrum& spectrum, double f_low, double f_high) {
    if (spectrum.frequency.size() < 2) throw std::invalid_argument("band_power: empty spectrum");
    if (!(f_high > f_low)) throw std::invalid_argument("band_power: need f_low < f_high");
    const auto& f = spectrum.frequency;
    const auto& p = spectrum.psd;
    const double lo = std::max(f_low, f.front());
    const double hi = std::min(f_high, f.back());
    if (!(hi > lo)) return 0.0;

    auto value_at = [&](double freq) {
        const auto it = std::upper_bound(f.begin(), f.end(), freq);
        const std::size_t j = std::min<std::size_t>(
            f.size() - 1, static_cast<std::size_t>(std::distance(f.begin(), it)));
        const std::size_t i = j == 0 ? 0 : j - 1;
        if (i == j) return p[i];
        const double t = (freq - f[i]) / (f[j] - f[i]);
        return p[i] + t * (p[j] - p[i]);
    };

    double total = 0.0;
    double prev_f = lo;
    double prev_p = value_at(lo);
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (f[k] <= lo) continue;
        if (f[k] >= hi) break;
        total += 0.5 * (prev_p + p[k]) * (f[k] - prev_f);
        prev_f = f[k];
        prev_p = p[k];
    }
    total += 0.5 * (prev_p + value_at(hi)) * (hi - prev_f);
    return total;
}

double estimate_delay_samples(const std::vector<double>& input,
                              const std::vector<double>& output) {
    if (input.size() != output.size() || input.size() < 8) {
        throw std::invalid_argument("estimate_delay_samples: need equal-length signals");
    }
    const std::size_t n = input.size();
    const std::size_t max_lag = n / 2;

    // normalized cross-correlation with the energies taken over the actual
    // overlap window; raw sums favor small lags (longer overlap), per-lag
    // 1/(n-lag) scaling favors large ones
    std::vector<double> in_energy(n + 1, 0.0), out_energy(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        in_energy[i + 1] = in_energy[i] + input[i] * input[i];
        out_energy[i + 1] = out_energy[i] + output[i] * output[i];
    }

    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_lag = 0;
    std::vector<double> corr(max_lag + 1, 0.0);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double c = 0.0;
        for (std::size_t i = lag; i < n; ++i) c += output[i] * input[i - lag];
        const double e_in = in_energy[n - lag] - in_energy[0];
        const double e_out = out_energy[n] - out_energy[lag];
        const double denom = std::sqrt(e_in * e_out);
        corr[lag] = denom > 0.0 ? c / denom : 0.0;
        if (corr[lag] > best) {
            best = corr[lag];
            best_lag = lag;
        }
    }
    double refined = static_cast<double>(best_lag);
    if (best_lag > 0 && best_lag < max_lag) {
        const double c0 = corr[best_lag - 1], c1 = corr[best_lag], c2 = corr[best_lag + 1];
        const double denom = c0 - 2.0 * c1 + c2;
        if (denom < 0.0) refined += 0.5 * (c0 - c2) / denom;
    }
    return refined;
}

}  // namespace levkit::signal
