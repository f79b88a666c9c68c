#include "levkit/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "levkit/constants.hpp"
#include "levkit/spectra.hpp"

namespace levkit::fitting {

using constants::two_pi;

namespace {

constexpr std::array<const char*, 5> kParamNames = {"scale", "gamma", "f0", "tau", "gain_v"};

bool known_param(const std::string& name) {
    return std::find(kParamNames.begin(), kParamNames.end(), name) != kParamNames.end();
}

struct BandData {
    std::vector<double> f;
    std::vector<double> psd;
};

BandData select_band(const signal::Spectrum& spectrum, double f_low, double f_high) {
    if (!(f_high > f_low)) throw BadBand("fit: need f_low < f_high");
    BandData out;
    for (std::size_t i = 0; i < spectrum.frequency.size(); ++i) {
        const double f = spectrum.frequency[i];
        if (f >= f_low && f <= f_high && spectrum.psd[i] > 0.0) {
            out.f.push_back(f);
            out.psd.push_back(spectrum.psd[i]);
        }
    }
    if (out.f.size() < 20) throw BadBand("fit: fewer than 20 usable bins in the band");
    return out;
}

// Levenberg-Marquardt over the free subset of (scale, gamma, f0, tau, gain_v)
// with projection onto box bounds. Parameters are scaled by their initial
// magnitudes so the normal equations stay well conditioned.
struct LevMar {
    std::array<double, 5> value{};            // current full parameter vector
    std::array<bool, 5> free_mask{};          // which entries the optimizer owns
    std::array<double, 5> lo{}, hi{};         // bounds (only meaningful for free)
    const BandData* data = nullptr;
    bool log_space = true;

    double model(double f, const std::array<double, 5>& p) const {
        return spectra::psd_delayed_scaled(two_pi * f, p[0], p[1], p[2], p[3], p[4]);
    }

    void residuals(const std::array<double, 5>& p, Eigen::VectorXd& r) const {
        const auto n = static_cast<Eigen::Index>(data->f.size());
        for (Eigen::Index i = 0; i < n; ++i) {
            const double m = model(data->f[static_cast<std::size_t>(i)], p);
            const double d = data->psd[static_cast<std::size_t>(i)];
            r[i] = log_space ? std::log10(std::max(m, 1e-300)) - std::log10(d) : m - d;
        }
    }

    FitResult run(const FitOptions& opt) {
        std::vector<int> idx;
        for (int k = 0; k < 5; ++k) {
            if (free_mask[static_cast<std::size_t>(k)]) idx.push_back(k);
        }
        const auto np = static_cast<Eigen::Index>(idx.size());
        const auto n = static_cast<Eigen::Index>(data->f.size());

        std::array<double, 5> scale_ref = value;
        for (auto& s : scale_ref) s = std::max(std::abs(s), 1e-12);

        auto pack = [&](const std::array<double, 5>& p) {
            Eigen::VectorXd q(np);
            for (Eigen::Index k = 0; k < np; ++k) {
                q[k] = p[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] /
                       scale_ref[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
            }
            return q;
        };
        auto unpack = [&](const Eigen::VectorXd& q) {
            std::array<double, 5> p = value;
            for (Eigen::Index k = 0; k < np; ++k) {
                const auto j = static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]);
                p[j] = std::clamp(q[k] * scale_ref[j], lo[j], hi[j]);
            }
            return p;
        };

        Eigen::VectorXd q = pack(value);
        Eigen::VectorXd r(n), r_trial(n);
        std::array<double, 5> p = unpack(q);
        residuals(p, r);
        double cost = r.squaredNorm();

        auto jacobian = [&](const std::array<double, 5>& at, Eigen::MatrixXd& jac) {
            // central differences in the scaled coordinates
            for (Eigen::Index k = 0; k < np; ++k) {
                const auto j = static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]);
                const double h = 1e-6 * std::max(std::abs(at[j] / scale_ref[j]), 1e-6);
                std::array<double, 5> plus = at, minus = at;
                plus[j] = at[j] + h * scale_ref[j];
                minus[j] = at[j] - h * scale_ref[j];
                Eigen::VectorXd rp(n), rm(n);
                residuals(plus, rp);
                residuals(minus, rm);
                jac.col(k) = (rp - rm) / (2.0 * h);
            }
        };

        Eigen::MatrixXd jac(n, np);
        std::vector<double> cost_history{cost};
        double lambda = 1e-3;
        bool converged = false;
        int iter = 0;
        for (; iter < opt.max_iterations; ++iter) {
            jacobian(p, jac);
            const Eigen::MatrixXd jtj = jac.transpose() * jac;
            const Eigen::VectorXd g = jac.transpose() * r;
            if (g.lpNorm<Eigen::Infinity>() < opt.gradient_tol) {
                converged = true;
                break;
            }
            bool stepped = false;
            for (int tries = 0; tries < 40; ++tries) {
                Eigen::MatrixXd damped = jtj;
                damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
                Eigen::VectorXd step = damped.ldlt().solve(-g);
                std::array<double, 5> p_trial = unpack(pack(p) + step);

                // when the box clamps a coordinate, re-solve with it frozen so
                // the remaining coordinates take their full step instead of a
                // vanishing projection (avoids crawling along active bounds)
                const Eigen::VectorXd proposed = pack(p) + step;
                const Eigen::VectorXd realized = pack(p_trial);
                bool any_binding = false;
                for (Eigen::Index k = 0; k < np; ++k) {
                    if (std::abs(realized[k] - proposed[k]) >
                        1e-12 * std::max(1.0, std::abs(proposed[k]))) {
                        any_binding = true;
                    }
                }
                if (any_binding) {
                    Eigen::MatrixXd frozen = damped;
                    Eigen::VectorXd g_frozen = g;
                    std::vector<bool> binding(static_cast<std::size_t>(np), false);
                    for (Eigen::Index k = 0; k < np; ++k) {
                        if (std::abs(realized[k] - proposed[k]) >
                            1e-12 * std::max(1.0, std::abs(proposed[k]))) {
                            binding[static_cast<std::size_t>(k)] = true;
                            frozen.row(k).setZero();
                            frozen.col(k).setZero();
                            frozen(k, k) = 1.0;
                            g_frozen[k] = 0.0;
                        }
                    }
                    step = frozen.ldlt().solve(-g_frozen);
                    for (Eigen::Index k = 0; k < np; ++k) {
                        if (binding[static_cast<std::size_t>(k)]) {
                            step[k] = realized[k] - q[k];  // land exactly on the bound
                        }
                    }
                    p_trial = unpack(q + step);
                }
                residuals(p_trial, r_trial);
                const double cost_trial = r_trial.squaredNorm();
                if (cost_trial < cost) {
                    // accepted steps never increase the objective; the actual
                    // move can be shorter than the proposed step when bounds
                    // clamp it, and that is what decides convergence
                    const double rel_step =
                        (pack(p_trial) - q).norm() / std::max(q.norm(), 1e-30);
                    const double improvement = cost - cost_trial;
                    p = p_trial;
                    q = pack(p);
                    r = r_trial;
                    cost = cost_trial;
                    cost_history.push_back(cost);
                    lambda = std::max(lambda * 0.3, 1e-14);
                    stepped = true;
                    if (rel_step < opt.step_tol ||
                        improvement <= opt.cost_tol * std::max(cost, 1e-300)) {
                        converged = true;
                    }
                    break;
                }
                lambda *= 4.0;
            }
            if (!stepped || converged) {
                converged = converged || !stepped;
                // a failed line search at tiny lambda means a (possibly
                // constrained) stationary point
                break;
            }
        }

        // covariance of the free parameters (scaled frame -> physical)
        jacobian(p, jac);
        const double dof = std::max<double>(1.0, static_cast<double>(n - np));
        const double s2 = cost / dof;
        Eigen::MatrixXd cov = (jac.transpose() * jac)
                                  .completeOrthogonalDecomposition()
                                  .pseudoInverse() *
                              s2;

        FitResult res;
        res.scale = p[0];
        res.gamma = p[1];
        res.f0 = p[2];
        res.tau = p[3];
        res.gain_v = p[4];
        std::array<double*, 5> errs = {&res.scale_err, &res.gamma_err, &res.f0_err, &res.tau_err,
                                       &res.gain_v_err};
        for (Eigen::Index k = 0; k < np; ++k) {
            const auto j = static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]);
            *errs[j] = std::sqrt(std::max(cov(k, k), 0.0)) * scale_ref[j];
        }
        res.residual_norm = std::sqrt(cost);
        res.converged = converged;
        res.iterations = iter;
        res.cost_history = std::move(cost_history);

        // band area of the fitted model (trapezoid over the data grid) and
        // first-order error propagation through the covariance
        auto band_area = [&](const std::array<double, 5>& pp) {
            double total = 0.0;
            for (std::size_t i = 0; i + 1 < data->f.size(); ++i) {
                total += 0.5 * (model(data->f[i], pp) + model(data->f[i + 1], pp)) *
                         (data->f[i + 1] - data->f[i]);
            }
            return total;
        };
        res.area = band_area(p);
        Eigen::VectorXd grad(np);
        for (Eigen::Index k = 0; k < np; ++k) {
            const auto j = static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]);
            const double h = 1e-6 * std::max(std::abs(p[j]), scale_ref[j] * 1e-6);
            std::array<double, 5> plus = p, minus = p;
            plus[j] += h;
            minus[j] -= h;
            grad[k] = (band_area(plus) - band_area(minus)) / (2.0 * h) * scale_ref[j];
        }
        res.area_err = std::sqrt(std::max(0.0, double(grad.transpose() * cov * grad)));
        return res;
    }
};

void apply_constraints(LevMar& lm, const FitConstraints& constraints) {
    constraints.validate();
    for (int k = 0; k < 5; ++k) {
        lm.lo[static_cast<std::size_t>(k)] = -std::numeric_limits<double>::infinity();
        lm.hi[static_cast<std::size_t>(k)] = std::numeric_limits<double>::infinity();
    }
    for (const auto& [name, val] : constraints.fixed) {
        for (int k = 0; k < 5; ++k) {
            if (name == kParamNames[static_cast<std::size_t>(k)]) {
                lm.value[static_cast<std::size_t>(k)] = val;
                lm.free_mask[static_cast<std::size_t>(k)] = false;
            }
        }
    }
    for (const auto& [name, b] : constraints.bounds) {
        for (int k = 0; k < 5; ++k) {
            if (name == kParamNames[static_cast<std::size_t>(k)]) {
                lm.lo[static_cast<std::size_t>(k)] = b.first;
                lm.hi[static_cast<std::size_t>(k)] = b.second;
                auto& v = lm.value[static_cast<std::size_t>(k)];
                v = std::clamp(v, b.first, b.second);
            }
        }
    }
}

// peak position and half-power width as starting values
void default_init(const BandData& band, double& scale, double& gamma, double& f0) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < band.psd.size(); ++i) {
        if (band.psd[i] > band.psd[imax]) imax = i;
    }
    f0 = band.f[imax];
    const double half = 0.5 * band.psd[imax];
    double f_lo = band.f.front(), f_hi = band.f.back();
    for (std::size_t i = imax; i-- > 0;) {
        if (band.psd[i] < half) {
            f_lo = band.f[i];
            break;
        }
    }
    for (std::size_t i = imax + 1; i < band.psd.size(); ++i) {
        if (band.psd[i] < half) {
            f_hi = band.f[i];
            break;
        }
    }
    gamma = std::max(two_pi * (f_hi - f_lo), 1e-6);
    // peak height = S / (gamma w0^2)
    scale = band.psd[imax] * gamma * two_pi * f0 * two_pi * f0;
}

}  // namespace

void FitConstraints::validate() const {
    for (const auto& [name, _] : fixed) {
        if (!known_param(name)) throw ConstraintViolation("unknown fixed parameter: " + name);
    }
    for (const auto& [name, b] : bounds) {
        if (!known_param(name)) throw ConstraintViolation("unknown bounded parameter: " + name);
        if (!(b.first < b.second)) {
            throw ConstraintViolation("bounds must satisfy lo < hi for " + name);
        }
        if (fixed.count(name) != 0) {
            throw ConstraintViolation("parameter both fixed and bounded: " + name);
        }
    }
}

FitResult fit_thermal(const signal::Spectrum& spectrum, double f_low, double f_high,
                      const InitialGuess& init, const FitConstraints& constraints,
                      const FitOptions& opt) {
    const BandData band = select_band(spectrum, f_low, f_high);

    LevMar lm;
    lm.data = &band;
    lm.log_space = opt.log_residuals;
    double scale0, gamma0, f00;
    default_init(band, scale0, gamma0, f00);
    lm.value = {init.scale.value_or(scale0), init.gamma.value_or(gamma0), init.f0.value_or(f00),
                0.0, 0.0};
    lm.free_mask = {true, true, true, false, false};
    apply_constraints(lm, constraints);
    // positivity floor for the physical parameters
    for (std::size_t k : {0u, 1u, 2u}) {
        lm.lo[k] = std::max(lm.lo[k], 0.0);
    }

    FitResult res = lm.run(opt);
    if (!res.converged) throw NoConvergence("fit_thermal: no convergence");
    res.band_low = f_low;
    res.band_high = f_high;
    res.has_feedback = false;
    return res;
}

FitResult fit_delayed(const signal::Spectrum& spectrum, double f_low, double f_high,
                      const FitConstraints& constraints, const InitialGuess& init,
                      const FitOptions& opt) {
    const BandData band = select_band(spectrum, f_low, f_high);

    LevMar lm;
    lm.data = &band;
    lm.log_space = opt.log_residuals;
    double scale0, gamma0, f00;
    default_init(band, scale0, gamma0, f00);
    const double tau0 = init.tau.value_or(8.0 / f00);  // nominal electronics delay
    lm.value = {init.scale.value_or(scale0), init.gamma.value_or(gamma0), init.f0.value_or(f00),
                tau0, init.gain_v.value_or(gamma0)};
    lm.free_mask = {true, true, true, true, true};
    apply_constraints(lm, constraints);
    for (std::size_t k : {0u, 1u, 2u}) {
        lm.lo[k] = std::max(lm.lo[k], 0.0);
    }
    // default protocol bound: tau within one period of its starting value
    if (constraints.bounds.count("tau") == 0 && constraints.fixed.count("tau") == 0) {
        const double period = 1.0 / lm.value[2];
        lm.lo[3] = std::max(0.0, lm.value[3] - period);
        lm.hi[3] = lm.value[3] + period;
    }

    FitResult res = lm.run(opt);
    if (!res.converged) throw NoConvergence("fit_delayed: no convergence");
    res.band_low = f_low;
    res.band_high = f_high;
    res.has_feedback = true;
    return res;
}

std::string fit_report_csv(const std::vector<FitResult>& results) {
    if (results.empty()) throw std::invalid_argument("fit_report_csv: no results");
    std::ostringstream out;
    out.precision(17);
    out << "scale,S_err,gamma_hz,gamma_err,f0_hz,f0_err,tau_s,tau_err,tau_periods,"
           "gamma_v_hz,gamma_v_err,area,area_err\n";
    for (const auto& r : results) {
        out << r.scale << ',' << r.scale_err << ',' << r.gamma << ',' << r.gamma_err << ','
            << r.f0 << ',' << r.f0_err << ',';
        if (r.has_feedback) {
            out << r.tau << ',' << r.tau_err << ',' << r.tau_periods() << ',' << r.gain_v << ','
                << r.gain_v_err << ',';
        } else {
            out << ",,,,,";
        }
        out << r.area << ',' << r.area_err << '\n';
    }
    return out.str();
}

std::vector<FitResult> parse_fit_report_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::vector<FitResult> out;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        cells.resize(13);
        FitResult r;
        auto num = [](const std::string& s) { return s.empty() ? 0.0 : std::stod(s); };
        r.scale = num(cells[0]);
        r.scale_err = num(cells[1]);
        r.gamma = num(cells[2]);
        r.gamma_err = num(cells[3]);
        r.f0 = num(cells[4]);
        r.f0_err = num(cells[5]);
        r.has_feedback = !cells[6].empty();
        r.tau = num(cells[6]);
        r.tau_err = num(cells[7]);
        r.gain_v = num(cells[9]);
        r.gain_v_err = num(cells[10]);
        r.area = num(cells[11]);
        r.area_err = num(cells[12]);
        out.push_back(r);
    }
    return out;
}

}  // namespace levkit::fitting
