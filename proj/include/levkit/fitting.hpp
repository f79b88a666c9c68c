#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "levkit/signal.hpp"

namespace levkit::fitting {

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};
struct BadBand : std::runtime_error {
    explicit BadBand(const std::string& what) : std::runtime_error(what) {}
};
struct ConstraintViolation : std::runtime_error {
    explicit ConstraintViolation(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter names: "scale", "gamma", "f0", "tau", "gain_v".
struct FitConstraints {
    std::map<std::string, double> fixed;
    std::map<std::string, std::pair<double, double>> bounds;
    void validate() const;
};

struct InitialGuess {
    std::optional<double> scale;
    std::optional<double> gamma;
    std::optional<double> f0;
    std::optional<double> tau;
    std::optional<double> gain_v;
};

struct FitOptions {
    bool log_residuals = true;  ///< residuals on log10(PSD); peaks span decades
    int max_iterations = 200;
    double gradient_tol = 1e-12;
    double step_tol = 1e-13;
    double cost_tol = 1e-9;  ///< relative objective stall that counts as converged
};

struct FitResult {
    // estimates
    double scale = 0.0;   ///< S = 2 kB T / m equivalent
    double gamma = 0.0;   ///< [Hz]
    double f0 = 0.0;      ///< [Hz]
    double tau = 0.0;     ///< [s]; 0 and absent for thermal fits
    double gain_v = 0.0;  ///< [Hz]
    // Jacobian-based standard errors (zero for fixed parameters)
    double scale_err = 0.0;
    double gamma_err = 0.0;
    double f0_err = 0.0;
    double tau_err = 0.0;
    double gain_v_err = 0.0;

    double residual_norm = 0.0;  ///< sqrt(sum of squared residuals) at the optimum
    double area = 0.0;           ///< trapezoid of the fitted model over the band [m^2]
    double area_err = 0.0;       ///< linear error propagation through the covariance
    double band_low = 0.0;       ///< [Hz]
    double band_high = 0.0;      ///< [Hz]
    bool has_feedback = false;   ///< delayed model vs thermal model
    bool converged = false;
    int iterations = 0;
    std::vector<double> cost_history;  ///< objective after each accepted step

    double tau_periods() const { return f0 * tau; }
};

/// Fits the thermal PSD model over [f_low, f_high]; free parameters
/// (scale, gamma, f0) unless fixed by `constraints`. The gamma estimate is
/// the reference to fix in subsequent delayed fits.
FitResult fit_thermal(const signal::Spectrum& spectrum, double f_low, double f_high,
                      const InitialGuess& init = {}, const FitConstraints& constraints = {},
                      const FitOptions& opt = {});

/// Fits the delayed-feedback PSD model (velocity feedback) over the band.
/// Unless bounded explicitly, tau is constrained to its initial value plus
/// or minus one oscillation period.
FitResult fit_delayed(const signal::Spectrum& spectrum, double f_low, double f_high,
                      const FitConstraints& constraints, const InitialGuess& init = {},
                      const FitOptions& opt = {});

/// CSV report with the fixed column roster:
/// scale,S_err,gamma_hz,gamma_err,f0_hz,f0_err,tau_s,tau_err,tau_periods,
/// gamma_v_hz,gamma_v_err,area,area_err.
/// Thermal rows leave the tau/gain columns empty.
std::string fit_report_csv(const std::vector<FitResult>& results);
std::vector<FitResult> parse_fit_report_csv(const std::string& csv);

}  // namespace levkit::fitting
