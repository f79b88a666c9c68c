#pragma once

#include <stdexcept>
#include <string>

#include "levkit/dynamics.hpp"

namespace levkit::spectra {

struct NoPeak : std::runtime_error {
    explicit NoPeak(const std::string& what) : std::runtime_error(what) {}
};

/// Thermal oscillator PSD, one-sided in omega [rad/s], units m^2 s:
///   S_xx = (2 gamma kB T / m) / ((w0^2 - w^2)^2 + (w gamma)^2).
double psd_thermal(double omega, const dynamics::OscillatorParams& params);

/// Same shape with a free overall scale S (the 2 kB T / m factor).
double psd_thermal_scaled(double omega, double scale, double gamma, double f0);

/// Delayed-feedback PSD, exact closed form with both gains:
///   S_xx = S*gamma / ([w0^2 - w^2 + w Gv sin(w tau) + Gx f0 cos(w tau)]^2
///                   + [w gamma + w Gv cos(w tau) - Gx f0 sin(w tau)]^2).
double psd_delayed(double omega, const dynamics::OscillatorParams& params,
                   const dynamics::FeedbackParams& feedback);
double psd_delayed_scaled(double omega, double scale, double gamma, double f0, double tau,
                          double gain_v, double gain_x = 0.0);

/// Dimensionless forms (frequencies in units of f0, PSD in natural units).
double psd_thermal_nd(double omega_nd, double gamma_nd);
double psd_delayed_nd(double omega_nd, double gamma_nd, double gain_v_nd, double tau_nd,
                      double gain_x_nd = 0.0);

/// The analytic PSD assumes a steady state, valid for delays within a
/// quarter period of an integer number of periods; outside, the physical
/// system heats without bound and the formula is plot-only.
bool delay_within_validity(double tau_periods);

/// Small-delay peak of the velocity-feedback PSD (dimensionless):
///   w_p = sqrt(8 pi^2 (1 - Gv tau)^2 - (gamma + Gv)^2) / (sqrt(2) (1 - Gv tau)^2).
/// Throws NoPeak when the radicand is not positive.
double peak_frequency_nd(double gamma_nd, double gain_v_nd, double tau_nd);

/// Same in rad/s for dimensionful parameters (velocity feedback only).
double peak_frequency(const dynamics::OscillatorParams& params,
                      const dynamics::FeedbackParams& feedback);

/// Delayed PSD rescaled by (2 pi)^2 (gamma + Gv) / gamma / (pi/2) so that the
/// full-line integral is exactly 1 at zero delay, for every (gamma, Gv).
double normalized_psd(double omega_nd, double gamma_nd, double gain_v_nd, double tau_nd);

/// Integration band in dimensionless omega.
struct Band {
    double lo = 0.0;
    double hi = 0.0;
};

/// f0 +- 5 Hz at the 18.9 Hz reference mode, scaled to omega_nd.
Band default_band_nd();

/// Band integral of the normalized PSD (adaptive trapezoid with a
/// Richardson check; lo = 0, hi = inf selects the full line).
double normalized_band_area(double gamma_nd, double gain_v_nd, double tau_nd, Band band,
                            double rel_tol = 1e-6);

/// log10 of the band area at delay tau_nd relative to zero delay. For the
/// full-line band this is exactly log10 of the normalized area, since the
/// zero-delay normalized area is 1.
double t_ratio(double gamma_nd, double gain_v_nd, double tau_nd, Band band = default_band_nd());

/// Area-ratio effective temperature: T_ref * area_fb / area_ref.
double effective_temperature(double area_fb, double area_ref, double t_ref);

/// Theory-only path: T_ref * gamma/(gamma+Gv) * 10^t_ratio. Agrees with the
/// area form at tau = 0 by construction.
double effective_temperature_theory(double gamma_nd, double gain_v_nd, double tau_nd,
                                    double t_ref, Band band = default_band_nd());

struct TemperatureReport {
    double f_min = 0.0;     ///< [Hz]
    double f_max = 0.0;     ///< [Hz]
    double area = 0.0;      ///< [m^2]
    double area_ref = 0.0;  ///< [m^2]
    double t_ratio = 0.0;   ///< log10(area / area_ref)
    double t_eff = 0.0;     ///< [K]
};

TemperatureReport temperature_report(double area_fb, double area_ref, double t_ref, double f_min,
                                     double f_max);

}  // namespace levkit::spectra
