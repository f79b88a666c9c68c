#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace levkit::dynamics {

/// Damped harmonic oscillator with a thermal drive.
///
/// Damping convention: `gamma` is the coefficient of the velocity in the
/// equation of motion. The ringdown *amplitude* decay constant is gamma/2,
/// and Q = omega0/gamma = pi f0 / (gamma/2).
struct OscillatorParams {
    double f0 = 0.0;           ///< natural frequency [Hz]
    double gamma = 0.0;        ///< EOM damping rate [Hz]
    double mass = 0.0;         ///< [kg]
    double temperature = 0.0;  ///< bath temperature [K]
    void validate() const;
};

/// Delayed feedback: adds gain_x*f0*x(t-delay) + gain_v*xdot(t-delay) to the
/// left-hand side, so positive gain_v with zero delay damps the motion.
struct FeedbackParams {
    double gain_x = 0.0;  ///< position gain [Hz]
    double gain_v = 0.0;  ///< velocity gain [Hz]
    double delay = 0.0;   ///< [s]
    void validate() const;
};

struct Trajectory {
    double sample_rate = 0.0;  ///< [Hz]
    double start_time = 0.0;   ///< [s]
    std::vector<double> x;     ///< [m]
    std::vector<double> v;     ///< [m/s]; empty when not recorded
    std::uint64_t seed = 0;
    std::size_t warmup = 0;    ///< leading samples that are filter/transient warm-up

    bool has_velocity() const { return !v.empty(); }
    double duration() const {
        return x.empty() ? 0.0 : static_cast<double>(x.size() - 1) / sample_rate;
    }
};

enum class SimStatus { completed, blew_up };

struct SimOptions {
    double blow_bound = 1e6;  ///< |x| bound in natural units
    /// Route integer-sample delays through the interpolation path (testing).
    bool force_delay_interpolation = false;
    std::size_t energy_trace_samples = 256;
    bool record_velocity = true;
};

struct SimOutcome {
    Trajectory trajectory;
    SimStatus status = SimStatus::completed;
    double blow_time = 0.0;       ///< [s], valid when status == blew_up
    double max_abs_x_nd = 0.0;    ///< max |x| in natural units over the run
    std::vector<double> energy_trace;  ///< dimensionless energy, evenly subsampled
    std::size_t suggested_burn_in = 0; ///< samples; min(20/gamma_nd periods, 25% of run)
};

/// Integrates x'' + gamma x' + (2 pi f0)^2 x + gain_x f0 x_d + gain_v x'_d
///             = sqrt(2 gamma kB T / m) xi(t)
/// with the semi-implicit Euler-Maruyama step in natural units (nu = f0,
/// ell = sqrt(2 kB T / (m nu^2))). Delay terms read a ring buffer of past
/// states, linearly interpolated for fractional sample delays; the history
/// before t = 0 holds the initial condition. Identical inputs and seed give
/// bit-identical trajectories.
SimOutcome simulate(const OscillatorParams& params, const FeedbackParams& feedback, double dt,
                    double duration, std::uint64_t seed, double x0 = 0.0, double v0 = 0.0,
                    const SimOptions& opt = {});

/// Deterministic free decay: simulate with T = 0 and no feedback.
Trajectory ringdown(const OscillatorParams& params, double x0, double duration, double dt);

struct InsufficientPeaks : std::runtime_error {
    explicit InsufficientPeaks(const std::string& what) : std::runtime_error(what) {}
};

struct RingdownFit {
    double amplitude = 0.0;   ///< envelope at t = start_time
    double decay_rate = 0.0;  ///< amplitude decay constant kappa [Hz]
    double frequency = 0.0;   ///< [Hz]
    double q_factor = 0.0;    ///< pi f0 / kappa; +inf when undamped
    bool undamped = false;
};

/// Envelope from local |x| maxima (parabolic refinement), log-linear least
/// squares for the decay, peak spacing for the frequency.
RingdownFit fit_ringdown(const Trajectory& traj);

/// Spec default integration step, 1/(100 f0).
double default_time_step(const OscillatorParams& params);

/// Deterministic standard-normal stream: mt19937_64 + Box-Muller.
/// std::normal_distribution is implementation-defined, which would break
/// reproducibility of seeded runs across standard libraries.
class GaussianRng {
  public:
    explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}
    double operator()();

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace levkit::dynamics
