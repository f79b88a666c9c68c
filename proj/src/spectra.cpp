#include "levkit/spectra.hpp"

#include <cmath>

#include "levkit/constants.hpp"
#include "levkit/quadrature.hpp"

namespace levkit::spectra {

using constants::k_boltzmann;
using constants::pi;
using constants::two_pi;

double psd_thermal_scaled(double omega, double scale, double gamma, double f0) {
    const double w0_sq = two_pi * f0 * two_pi * f0;
    const double a = w0_sq - omega * omega;
    const double b = omega * gamma;
    return scale * gamma / (a * a + b * b);
}

double psd_thermal(double omega, const dynamics::OscillatorParams& params) {
    params.validate();
    if (omega < 0.0) throw std::invalid_argument("psd_thermal: omega must be >= 0");
    const double scale = 2.0 * k_boltzmann * params.temperature / params.mass;
    return psd_thermal_scaled(omega, scale, params.gamma, params.f0);
}

double psd_delayed_scaled(double omega, double scale, double gamma, double f0, double tau,
                          double gain_v, double gain_x) {
    const double w0_sq = two_pi * f0 * two_pi * f0;
    const double s = std::sin(omega * tau);
    const double c = std::cos(omega * tau);
    const double a = w0_sq - omega * omega + omega * gain_v * s + gain_x * f0 * c;
    const double b = omega * gamma + omega * gain_v * c - gain_x * f0 * s;
    return scale * gamma / (a * a + b * b);
}

double psd_delayed(double omega, const dynamics::OscillatorParams& params,
                   const dynamics::FeedbackParams& feedback) {
    params.validate();
    feedback.validate();
    if (omega < 0.0) throw std::invalid_argument("psd_delayed: omega must be >= 0");
    const double scale = 2.0 * k_boltzmann * params.temperature / params.mass;
    return psd_delayed_scaled(omega, scale, params.gamma, params.f0, feedback.delay,
                              feedback.gain_v, feedback.gain_x);
}

double psd_thermal_nd(double omega_nd, double gamma_nd) {
    const double k = two_pi * two_pi;
    const double a = k - omega_nd * omega_nd;
    const double b = omega_nd * gamma_nd;
    return gamma_nd / (a * a + b * b);
}

double psd_delayed_nd(double omega_nd, double gamma_nd, double gain_v_nd, double tau_nd,
                      double gain_x_nd) {
    const double k = two_pi * two_pi;
    const double s = std::sin(omega_nd * tau_nd);
    const double c = std::cos(omega_nd * tau_nd);
    const double a = k - omega_nd * omega_nd + omega_nd * gain_v_nd * s + gain_x_nd * c;
    const double b = omega_nd * gamma_nd + omega_nd * gain_v_nd * c - gain_x_nd * s;
    return gamma_nd / (a * a + b * b);
}

bool delay_within_validity(double tau_periods) {
    const double dist = std::abs(tau_periods - std::round(tau_periods));
    return dist <= 0.25;
}

double peak_frequency_nd(double gamma_nd, double gain_v_nd, double tau_nd) {
    const double a = 1.0 - gain_v_nd * tau_nd;
    const double b = gamma_nd + gain_v_nd;
    const double radicand = 8.0 * pi * pi * a * a - b * b;
    if (!(radicand > 0.0)) {
        throw NoPeak("peak_frequency: overdamped, no spectral peak");
    }
    return std::sqrt(radicand) / (std::sqrt(2.0) * a * a);
}

double peak_frequency(const dynamics::OscillatorParams& params,
                      const dynamics::FeedbackParams& feedback) {
    params.validate();
    feedback.validate();
    if (feedback.gain_x != 0.0) {
        throw std::invalid_argument("peak_frequency: closed form covers velocity feedback only");
    }
    const double nu = params.f0;
    return nu * peak_frequency_nd(params.gamma / nu, feedback.gain_v / nu, feedback.delay * nu);
}

double normalized_psd(double omega_nd, double gamma_nd, double gain_v_nd, double tau_nd) {
    const double norm =
        (two_pi * two_pi) * (gamma_nd + gain_v_nd) / gamma_nd / (0.5 * pi);
    return norm * psd_delayed_nd(omega_nd, gamma_nd, gain_v_nd, tau_nd);
}

Band default_band_nd() {
    const double f0 = 18.9;
    return {two_pi * (1.0 - 5.0 / f0), two_pi * (1.0 + 5.0 / f0)};
}

double normalized_band_area(double gamma_nd, double gain_v_nd, double tau_nd, Band band,
                            double rel_tol) {
    auto f = [=](double w) { return normalized_psd(w, gamma_nd, gain_v_nd, tau_nd); };
    if (std::isinf(band.hi)) {
        return quadrature::integrate_to_infinity(f, band.lo, rel_tol);
    }
    if (!(band.hi > band.lo) || band.lo < 0.0) {
        throw std::invalid_argument("normalized_band_area: invalid band");
    }
    return quadrature::integrate_adaptive(f, band.lo, band.hi, rel_tol);
}

double t_ratio(double gamma_nd, double gain_v_nd, double tau_nd, Band band) {
    const double area = normalized_band_area(gamma_nd, gain_v_nd, tau_nd, band);
    const double area_ref = normalized_band_area(gamma_nd, gain_v_nd, 0.0, band);
    return std::log10(area / area_ref);
}

double effective_temperature(double area_fb, double area_ref, double t_ref) {
    if (!(area_fb > 0.0) || !(area_ref > 0.0)) {
        throw std::invalid_argument("effective_temperature: areas must be > 0");
    }
    return t_ref * area_fb / area_ref;
}

double effective_temperature_theory(double gamma_nd, double gain_v_nd, double tau_nd,
                                    double t_ref, Band band) {
    const double cooling = gamma_nd / (gamma_nd + gain_v_nd);
    return t_ref * cooling * std::pow(10.0, t_ratio(gamma_nd, gain_v_nd, tau_nd, band));
}

TemperatureReport temperature_report(double area_fb, double area_ref, double t_ref, double f_min,
                                     double f_max) {
    if (!(f_max > f_min)) throw std::invalid_argument("temperature_report: need f_min < f_max");
    TemperatureReport rep;
    rep.f_min = f_min;
    rep.f_max = f_max;
    rep.area = area_fb;
    rep.area_ref = area_ref;
    rep.t_eff = effective_temperature(area_fb, area_ref, t_ref);
    rep.t_ratio = std::log10(area_fb / area_ref);
    return rep;
}

}  // namespace levkit::spectra
