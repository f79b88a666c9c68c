#include "levkit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levkit/constants.hpp"

namespace levkit::dynamics {

using constants::k_boltzmann;
using constants::pi;
using constants::two_pi;

void OscillatorParams::validate() const {
    if (!(f0 > 0.0)) throw std::invalid_argument("OscillatorParams: f0 must be > 0");
    if (!(mass > 0.0)) throw std::invalid_argument("OscillatorParams: mass must be > 0");
    if (gamma < 0.0) throw std::invalid_argument("OscillatorParams: gamma must be >= 0");
    if (temperature < 0.0) throw std::invalid_argument("OscillatorParams: temperature must be >= 0");
}

void FeedbackParams::validate() const {
    if (delay < 0.0) throw std::invalid_argument("FeedbackParams: delay must be >= 0");
}

double default_time_step(const OscillatorParams& params) { return 1.0 / (100.0 * params.f0); }

double GaussianRng::operator()() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller on (0,1] uniforms
    const double inv = 1.0 / 18446744073709551616.0;  // 2^-64
    const double u1 = (static_cast<double>(engine_()) + 1.0) * inv;
    const double u2 = static_cast<double>(engine_()) * inv;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = two_pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

SimOutcome simulate(const OscillatorParams& params, const FeedbackParams& feedback, double dt,
                    double duration, std::uint64_t seed, double x0, double v0,
                    const SimOptions& opt) {
    params.validate();
    feedback.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be > 0");
    if (dt > 1.0 / (50.0 * params.f0)) {
        throw std::invalid_argument("simulate: dt must be <= 1/(50 f0)");
    }
    if (!(duration > 0.0)) throw std::invalid_argument("simulate: duration must be > 0");
    if (duration < feedback.delay) {
        throw std::invalid_argument("simulate: duration must cover the feedback delay");
    }

    // Natural units: nu = f0, ell = sqrt(2 kB T / (m nu^2)). For T = 0 the
    // noise vanishes and any length scale works; fall back to the initial
    // condition so the state stays O(1).
    const double nu = params.f0;
    double ell = 0.0;
    if (params.temperature > 0.0) {
        ell = std::sqrt(2.0 * k_boltzmann * params.temperature / (params.mass * nu * nu));
    } else {
        ell = std::max(std::abs(x0), std::abs(v0) / (two_pi * nu));
        if (ell == 0.0) ell = 1.0;
    }

    const double gamma_nd = params.gamma / nu;
    const double gain_x_nd = feedback.gain_x / nu;
    const double gain_v_nd = feedback.gain_v / nu;
    const double tau_nd = feedback.delay * nu;
    const double dt_nd = dt * nu;
    const double k_spring = two_pi * two_pi;
    // dimensionless drive amplitude; equals sqrt(gamma_nd) for the thermal
    // length scale and vanishes at T = 0, where ell is arbitrary
    const double sigma_nd =
        std::sqrt(2.0 * params.gamma * k_boltzmann * params.temperature / params.mass) /
        (ell * nu * std::sqrt(nu));
    const double noise_scale = sigma_nd * std::sqrt(dt_nd);

    const std::size_t n_steps = static_cast<std::size_t>(std::llround(duration / dt));
    const std::size_t n_samples = n_steps + 1;

    // Delay in samples; integer delays take the direct-index path so they are
    // bit-identical with the interpolated path at fraction zero.
    const double delay_samples = tau_nd / dt_nd;
    const auto delay_floor = static_cast<std::size_t>(std::floor(delay_samples));
    double delay_frac = delay_samples - static_cast<double>(delay_floor);
    if (delay_frac < 1e-12) delay_frac = 0.0;
    const bool interpolate = opt.force_delay_interpolation || delay_frac != 0.0;

    // History ring buffer over the last delay_floor+2 states.
    const std::size_t hist_len = delay_floor + 2;
    std::vector<double> hist_x(hist_len, x0 / ell);
    std::vector<double> hist_v(hist_len, v0 / (ell * nu));

    SimOutcome out;
    out.trajectory.sample_rate = 1.0 / dt;
    out.trajectory.seed = seed;
    out.trajectory.x.reserve(n_samples);
    if (opt.record_velocity) out.trajectory.v.reserve(n_samples);

    GaussianRng rng(seed);
    double x = x0 / ell;
    double v = v0 / (ell * nu);
    double max_abs_x = std::abs(x);

    const std::size_t energy_stride =
        std::max<std::size_t>(1, n_samples / std::max<std::size_t>(opt.energy_trace_samples, 1));

    auto record = [&](std::size_t i) {
        out.trajectory.x.push_back(x * ell);
        if (opt.record_velocity) out.trajectory.v.push_back(v * ell * nu);
        if (i % energy_stride == 0) {
            out.energy_trace.push_back(0.5 * v * v + 0.5 * k_spring * x * x);
        }
    };

    record(0);
    for (std::size_t i = 0; i < n_steps; ++i) {
        // State at t - tau. Before t = 0 the buffer still holds the initial
        // condition, which implements the constant-hold pre-history.
        double x_d, v_d;
        const std::size_t base = i % hist_len;
        const std::size_t idx0 = (base + hist_len - (delay_floor % hist_len)) % hist_len;
        if (interpolate) {
            const std::size_t idx1 = (idx0 + hist_len - 1) % hist_len;
            x_d = hist_x[idx0] + delay_frac * (hist_x[idx1] - hist_x[idx0]);
            v_d = hist_v[idx0] + delay_frac * (hist_v[idx1] - hist_v[idx0]);
        } else {
            x_d = hist_x[idx0];
            v_d = hist_v[idx0];
        }

        const double accel = -gamma_nd * v - k_spring * x - gain_x_nd * x_d - gain_v_nd * v_d;
        v += dt_nd * accel + noise_scale * rng();
        x += dt_nd * v;

        const std::size_t slot = (i + 1) % hist_len;
        hist_x[slot] = x;
        hist_v[slot] = v;

        max_abs_x = std::max(max_abs_x, std::abs(x));
        if (!(std::abs(x) <= opt.blow_bound)) {
            out.status = SimStatus::blew_up;
            out.blow_time = static_cast<double>(i + 1) * dt;
            record(i + 1);
            break;
        }
        record(i + 1);
    }
    out.max_abs_x_nd = max_abs_x;

    if (gamma_nd > 0.0) {
        const double burn_time_nd = 20.0 / gamma_nd;
        const std::size_t burn_samples = static_cast<std::size_t>(burn_time_nd / dt_nd);
        out.suggested_burn_in = std::min(burn_samples, out.trajectory.x.size() / 4);
    }
    return out;
}

Trajectory ringdown(const OscillatorParams& params, double x0, double duration, double dt) {
    OscillatorParams cold = params;
    cold.temperature = 0.0;
    SimOptions opt;
    opt.record_velocity = true;
    return simulate(cold, FeedbackParams{}, dt, duration, /*seed=*/0, x0, 0.0, opt).trajectory;
}

RingdownFit fit_ringdown(const Trajectory& traj) {
    if (traj.x.size() < 3 || !(traj.sample_rate > 0.0)) {
        throw std::invalid_argument("fit_ringdown: trajectory too short");
    }
    const double dt = 1.0 / traj.sample_rate;

    // Local maxima of |x| with parabolic refinement of time and height.
    std::vector<double> peak_t, peak_a;
    const auto& x = traj.x;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const double a0 = std::abs(x[i - 1]), a1 = std::abs(x[i]), a2 = std::abs(x[i + 1]);
        if (a1 >= a0 && a1 > a2 && a1 > 0.0) {
            const double denom = a0 - 2.0 * a1 + a2;
            double shift = 0.0, height = a1;
            if (denom < 0.0) {
                shift = 0.5 * (a0 - a2) / denom;
                height = a1 - 0.25 * (a0 - a2) * shift;
            }
            peak_t.push_back((static_cast<double>(i) + shift) * dt);
            peak_a.push_back(height);
        }
    }
    if (peak_t.size() < 10) {
        throw InsufficientPeaks("fit_ringdown: fewer than 10 envelope extrema");
    }

    // |x| has two maxima per period.
    const std::size_t n = peak_t.size();
    double sum_k = 0.0, sum_t = 0.0, sum_kt = 0.0, sum_kk = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sum_k += static_cast<double>(k);
        sum_t += peak_t[k];
        sum_kt += static_cast<double>(k) * peak_t[k];
        sum_kk += static_cast<double>(k) * static_cast<double>(k);
    }
    const double dn = static_cast<double>(n);
    const double half_period = (dn * sum_kt - sum_k * sum_t) / (dn * sum_kk - sum_k * sum_k);
    const double frequency = 1.0 / (2.0 * half_period);

    // log-linear least squares on ln(peak) vs t
    double st = 0.0, sy = 0.0, sty = 0.0, stt = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double y = std::log(peak_a[k]);
        st += peak_t[k];
        sy += y;
        sty += peak_t[k] * y;
        stt += peak_t[k] * peak_t[k];
    }
    const double slope = (dn * sty - st * sy) / (dn * stt - st * st);
    const double intercept = (sy - slope * st) / dn;

    RingdownFit fit;
    fit.amplitude = std::exp(intercept);
    fit.decay_rate = -slope;
    fit.frequency = frequency;
    const double span = peak_t.back() - peak_t.front();
    if (fit.decay_rate <= 0.0 || fit.decay_rate * span < 1e-9) {
        fit.undamped = true;
        fit.decay_rate = std::max(fit.decay_rate, 0.0);
        fit.q_factor = std::numeric_limits<double>::infinity();
    } else {
        fit.q_factor = pi * frequency / fit.decay_rate;
    }
    return fit;
}

}  // namespace levkit::dynamics
