#include "rydpol/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rydpol/random.hpp"

namespace rydpol {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_data(const FitData& data, std::size_t params) {
    if (data.x.size() != data.y.size() || data.x.size() != data.sigma.size())
        throw std::invalid_argument("x, y and sigma must have equal length");
    if (data.x.size() < params) throw std::invalid_argument("fewer data points than parameters");
    for (std::size_t i = 0; i < data.x.size(); ++i) {
        if (!(data.sigma[i] > 0.0) || !std::isfinite(data.sigma[i]))
            throw std::invalid_argument("sigma must be positive and finite");
        if (!std::isfinite(data.x[i]) || !std::isfinite(data.y[i]))
            throw std::invalid_argument("data must be finite");
    }
}

Eigen::VectorXd residuals(const ModelSpec& model, const FitData& data, std::span<const double> p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(data.x.size()));
    for (std::size_t i = 0; i < data.x.size(); ++i)
        r[static_cast<Eigen::Index>(i)] = (data.y[i] - model.evaluate(data.x[i], p)) / data.sigma[i];
    return r;
}

// Component of J^T r that can still move the parameter inward.
double projected_gradient_norm(const Eigen::VectorXd& jtr, const std::vector<std::size_t>& free,
                               const std::vector<double>& p, const ModelSpec& model) {
    double acc = 0.0;
    for (std::size_t f = 0; f < free.size(); ++f) {
        const std::size_t j = free[f];
        const double g = jtr[static_cast<Eigen::Index>(f)];
        if (p[j] <= model.lower[j] && g < 0.0) continue;
        if (p[j] >= model.upper[j] && g > 0.0) continue;
        acc += g * g;
    }
    // Gradient of chi^2 is -2 J^T r.
    return 2.0 * std::sqrt(acc);
}

}  // namespace

ModelId parse_model_id(std::string_view name) {
    if (name == "lorentzian") return ModelId::lorentzian;
    if (name == "rabi_collective") return ModelId::rabi_collective;
    throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

std::string_view to_string(ModelId id) {
    return id == ModelId::lorentzian ? "lorentzian" : "rabi_collective";
}

std::string_view to_string(FitStatus status) {
    switch (status) {
        case FitStatus::converged: return "converged";
        case FitStatus::small_step: return "small_step";
        case FitStatus::max_iterations: return "max_iterations";
    }
    return "unknown";
}

double lorentzian(double x, double amplitude, double center, double fwhm, double offset) {
    if (!(fwhm > 0.0)) throw std::domain_error("Lorentzian FWHM must be positive");
    const double hw2 = 0.25 * fwhm * fwhm;
    const double dx = x - center;
    return offset + amplitude * hw2 / (dx * dx + hw2);
}

double rabi_collective_model(double omega, double t_pulse, const RabiParams& p) {
    if (!(p.n_polaritons > 0.0)) throw std::domain_error("N must be positive");
    if (!(p.omega_env > 0.0) || !(p.omega_decay > 0.0))
        throw std::domain_error("envelope and decay scales must be positive");
    if (!std::isfinite(omega) || !std::isfinite(t_pulse)) throw std::domain_error("omega and t must be finite");
    const double env = std::tanh(omega / p.omega_env);
    const double c = std::cos(kPi * omega * t_pulse);
    return p.amplitude * env * std::pow(c * c, p.n_polaritons) +
           (1.0 - env) * p.amplitude * std::exp(-omega / p.omega_decay) + p.background;
}

ModelSpec ModelSpec::lorentzian_spec() {
    ModelSpec m;
    m.id = ModelId::lorentzian;
    m.names = {"amplitude", "center", "fwhm", "offset"};
    m.initial = {1.0, 0.0, 1.0, 0.0};
    const double inf = std::numeric_limits<double>::infinity();
    m.lower = {-inf, -inf, 1e-9, -inf};
    m.upper = {inf, inf, inf, inf};
    m.fixed.assign(4, false);
    return m;
}

ModelSpec ModelSpec::rabi_collective_spec(double pulse_duration_us) {
    if (!(pulse_duration_us > 0.0)) throw std::invalid_argument("pulse duration must be positive");
    ModelSpec m;
    m.id = ModelId::rabi_collective;
    m.pulse_duration = pulse_duration_us;
    m.names = {"amplitude", "n_polaritons", "omega_env", "omega_decay", "background"};
    m.initial = {1.0, 1.0, 5.0, 5.0, 0.0};
    const double inf = std::numeric_limits<double>::infinity();
    m.lower = {-inf, 0.05, 1e-3, 1e-3, -inf};
    m.upper = {inf, 100.0, 1e4, 1e4, inf};
    m.fixed.assign(5, false);
    return m;
}

double ModelSpec::evaluate(double x, std::span<const double> p) const {
    if (p.size() != names.size()) throw std::invalid_argument("parameter count does not match the model");
    if (id == ModelId::lorentzian) return lorentzian(x, p[0], p[1], p[2], p[3]);
    return rabi_collective_model(x, pulse_duration, RabiParams{p[0], p[1], p[2], p[3], p[4]});
}

void ModelSpec::check() const {
    const std::size_t n = names.size();
    const std::size_t expected = id == ModelId::lorentzian ? 4 : 5;
    if (n != expected) throw std::invalid_argument("parameter count does not match the model");
    if (initial.size() != n || lower.size() != n || upper.size() != n || fixed.size() != n)
        throw std::invalid_argument("parameter table columns differ in length");
    for (std::size_t j = 0; j < n; ++j) {
        if (!(lower[j] <= upper[j])) throw std::invalid_argument("bounds inverted for " + names[j]);
        if (!(initial[j] >= lower[j] && initial[j] <= upper[j]))
            throw std::invalid_argument("initial value outside bounds for " + names[j]);
    }
    if (id == ModelId::rabi_collective && !(pulse_duration > 0.0))
        throw std::invalid_argument("pulse duration must be positive");
}

std::size_t ModelSpec::index_of(std::string_view name) const {
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == name) return j;
    throw std::invalid_argument("no parameter named '" + std::string(name) + "'");
}

Eigen::MatrixXd numeric_jacobian(const ModelSpec& model, std::span<const double> params,
                                 std::span<const double> x, double step) {
    const auto n = static_cast<Eigen::Index>(x.size());
    const auto m = static_cast<Eigen::Index>(params.size());
    Eigen::MatrixXd jac(n, m);
    std::vector<double> p(params.begin(), params.end());
    for (Eigen::Index j = 0; j < m; ++j) {
        const double p0 = p[static_cast<std::size_t>(j)];
        const double h = step * (std::abs(p0) + 1e-3);
        for (Eigen::Index i = 0; i < n; ++i) {
            p[static_cast<std::size_t>(j)] = p0 + h;
            const double up = model.evaluate(x[static_cast<std::size_t>(i)], p);
            p[static_cast<std::size_t>(j)] = p0 - h;
            const double down = model.evaluate(x[static_cast<std::size_t>(i)], p);
            jac(i, j) = (up - down) / (2.0 * h);
        }
        p[static_cast<std::size_t>(j)] = p0;
    }
    return jac;
}

FitResult fit(const ModelSpec& model, const FitData& data, const FitOptions& options) {
    model.check();
    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < model.parameter_count(); ++j)
        if (!model.fixed[j]) free.push_back(j);
    check_data(data, free.size());
    const auto nf = static_cast<Eigen::Index>(free.size());

    std::vector<double> p = model.initial;
    Eigen::VectorXd r = residuals(model, data, p);
    double cost = r.squaredNorm();
    if (!std::isfinite(cost)) throw FitError("model is not finite at the initial parameters");

    FitResult out;
    out.names = model.names;
    out.cost_history.push_back(cost);

    Eigen::VectorXd inv_sigma(static_cast<Eigen::Index>(data.sigma.size()));
    for (std::size_t i = 0; i < data.sigma.size(); ++i) inv_sigma[static_cast<Eigen::Index>(i)] = 1.0 / data.sigma[i];

    auto weighted_jacobian = [&](const std::vector<double>& params) {
        const Eigen::MatrixXd full = numeric_jacobian(model, params, data.x, options.jacobian_step);
        Eigen::MatrixXd jw(full.rows(), nf);
        for (Eigen::Index f = 0; f < nf; ++f)
            jw.col(f) = full.col(static_cast<Eigen::Index>(free[static_cast<std::size_t>(f)])).cwiseProduct(inv_sigma);
        return jw;
    };

    double lambda = options.initial_damping;
    Eigen::MatrixXd jw = weighted_jacobian(p);
    Eigen::VectorXd jtr = jw.transpose() * r;
    out.status = FitStatus::max_iterations;

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        out.gradient_norm = projected_gradient_norm(jtr, free, p, model);
        if (out.gradient_norm < options.gradient_tolerance * (1.0 + cost)) {
            out.status = FitStatus::converged;
            break;
        }
        const Eigen::MatrixXd jtj = jw.transpose() * jw;
        const double diag_floor = 1e-12 * std::max(jtj.diagonal().maxCoeff(), 1e-300);

        bool accepted = false;
        bool stalled = false;
        while (!accepted) {
            Eigen::MatrixXd a = jtj;
            for (Eigen::Index f = 0; f < nf; ++f) a(f, f) += lambda * std::max(jtj(f, f), diag_floor);
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
            Eigen::VectorXd delta = ldlt.solve(jtr);
            if (ldlt.info() != Eigen::Success || !delta.allFinite()) {
                lambda *= 10.0;
                if (lambda > 1e20) throw FitError("normal matrix is singular even with heavy damping");
                continue;
            }
            std::vector<double> trial = p;
            for (Eigen::Index f = 0; f < nf; ++f) {
                const std::size_t j = free[static_cast<std::size_t>(f)];
                trial[j] = std::clamp(p[j] + delta[f], model.lower[j], model.upper[j]);
            }
            double step_norm = 0.0;
            double p_norm = 0.0;
            for (std::size_t j : free) {
                step_norm += (trial[j] - p[j]) * (trial[j] - p[j]);
                p_norm += p[j] * p[j];
            }
            step_norm = std::sqrt(step_norm);
            p_norm = std::sqrt(p_norm);

            Eigen::VectorXd r_trial;
            double trial_cost = std::numeric_limits<double>::infinity();
            try {
                r_trial = residuals(model, data, trial);
                trial_cost = r_trial.squaredNorm();
            } catch (const std::domain_error&) {
            }
            if (std::isfinite(trial_cost) && trial_cost < cost) {
                p = std::move(trial);
                r = std::move(r_trial);
                cost = trial_cost;
                out.cost_history.push_back(cost);
                lambda = std::max(lambda / 10.0, 1e-15);
                accepted = true;
            } else {
                lambda *= 10.0;
            }
            if (step_norm <= options.step_tolerance * (p_norm + options.step_tolerance) || lambda > 1e16) {
                stalled = true;
                break;
            }
        }
        if (accepted) {
            jw = weighted_jacobian(p);
            jtr = jw.transpose() * r;
        }
        if (stalled) {
            out.gradient_norm = projected_gradient_norm(jtr, free, p, model);
            out.status = out.gradient_norm < options.gradient_tolerance * (1.0 + cost) ? FitStatus::converged
                                                                                       : FitStatus::small_step;
            ++iter;
            break;
        }
    }
    if (out.status == FitStatus::max_iterations) out.gradient_norm = projected_gradient_norm(jtr, free, p, model);

    out.iterations = iter;
    out.parameters = p;
    out.chi2 = cost;
    const auto dof = static_cast<long>(data.x.size()) - static_cast<long>(free.size());
    out.reduced_chi2 = dof > 0 ? cost / static_cast<double>(dof) : 0.0;

    const Eigen::MatrixXd jtj = jw.transpose() * jw;
    const Eigen::MatrixXd inv = jtj.completeOrthogonalDecomposition().pseudoInverse();
    const auto m = static_cast<Eigen::Index>(model.parameter_count());
    out.covariance = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index a = 0; a < nf; ++a)
        for (Eigen::Index b = 0; b < nf; ++b)
            out.covariance(static_cast<Eigen::Index>(free[static_cast<std::size_t>(a)]),
                           static_cast<Eigen::Index>(free[static_cast<std::size_t>(b)])) = 0.5 * (inv(a, b) + inv(b, a));
    const double scale = dof > 0 ? out.reduced_chi2 : 1.0;
    out.errors.assign(model.parameter_count(), 0.0);
    for (Eigen::Index j = 0; j < m; ++j)
        out.errors[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, out.covariance(j, j) * scale));
    return out;
}

namespace {

ModelSpec lorentzian_guess(const FitData& d) {
    ModelSpec m = ModelSpec::lorentzian_spec();
    const auto [lo_it, hi_it] = std::minmax_element(d.y.begin(), d.y.end());
    const auto peak = static_cast<std::size_t>(hi_it - d.y.begin());
    const double offset = *lo_it;
    const double amp = *hi_it - offset;
    const double half = offset + 0.5 * amp;

    // Half-maximum crossings either side of the peak, linearly interpolated.
    std::vector<std::size_t> order(d.x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d.x[a] < d.x[b]; });
    const auto pos = static_cast<std::size_t>(std::find(order.begin(), order.end(), peak) - order.begin());
    double left = d.x[order.front()];
    double right = d.x[order.back()];
    for (std::size_t k = pos; k > 0; --k) {
        const double y0 = d.y[order[k - 1]], y1 = d.y[order[k]];
        if (y0 <= half) {
            left = d.x[order[k - 1]] + (half - y0) / (y1 - y0) * (d.x[order[k]] - d.x[order[k - 1]]);
            break;
        }
    }
    for (std::size_t k = pos; k + 1 < order.size(); ++k) {
        const double y0 = d.y[order[k]], y1 = d.y[order[k + 1]];
        if (y1 <= half) {
            right = d.x[order[k]] + (y0 - half) / (y0 - y1) * (d.x[order[k + 1]] - d.x[order[k]]);
            break;
        }
    }
    double fwhm = right - left;
    if (!(fwhm > 0.0)) fwhm = 0.25 * (d.x[order.back()] - d.x[order.front()]);
    m.initial = {amp, d.x[peak], std::max(fwhm, 1e-6), offset};
    return m;
}

// Weighted linear least squares for y ~ a g + b (b fixed when fix_b).
bool linear_ab(const FitData& d, const std::vector<double>& g, bool fix_b, double b_fixed, double& a,
               double& b, double& cost) {
    double sgg = 0, sg = 0, s1 = 0, sgy = 0, sy = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double w = 1.0 / (d.sigma[i] * d.sigma[i]);
        const double y = fix_b ? d.y[i] - b_fixed : d.y[i];
        sgg += w * g[i] * g[i];
        sg += w * g[i];
        s1 += w;
        sgy += w * g[i] * y;
        sy += w * y;
    }
    if (fix_b) {
        if (!(sgg > 0.0)) return false;
        a = sgy / sgg;
        b = b_fixed;
    } else {
        const double det = sgg * s1 - sg * sg;
        if (!(std::abs(det) > 1e-300)) return false;
        a = (sgy * s1 - sg * sy) / det;
        b = (sgg * sy - sg * sgy) / det;
    }
    cost = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double res = (d.y[i] - a * g[i] - b) / d.sigma[i];
        cost += res * res;
    }
    return true;
}

ModelSpec rabi_guess(const FitData& d, double t_pulse) {
    ModelSpec m = ModelSpec::rabi_collective_spec(t_pulse);
    const auto [lo, hi] = std::minmax_element(d.x.begin(), d.x.end());
    const double x_lo = std::max(*lo, 1e-3);
    const double x_hi = std::max(*hi, 2.0 * x_lo);

    // The model is linear in (A, B) for fixed (N, w_env, w_decay), so a grid
    // over the nonlinear three with a linear solve per node is cheap.
    constexpr int kScaleSteps = 14;
    std::vector<double> scales(kScaleSteps);
    for (int i = 0; i < kScaleSteps; ++i)
        scales[static_cast<std::size_t>(i)] = x_lo * 0.5 * std::pow(20.0 * x_hi / x_lo, i / (kScaleSteps - 1.0));

    double best = std::numeric_limits<double>::infinity();
    std::vector<double> g(d.x.size());
    for (int ni = 1; ni <= 16; ++ni) {
        const double n = 0.5 * ni;
        for (double env : scales) {
            for (double dec : scales) {
                for (std::size_t i = 0; i < d.x.size(); ++i) {
                    const double e = std::tanh(d.x[i] / env);
                    const double c = std::cos(kPi * d.x[i] * t_pulse);
                    g[i] = e * std::pow(c * c, n) + (1.0 - e) * std::exp(-d.x[i] / dec);
                }
                double a, b, cost;
                if (!linear_ab(d, g, false, 0.0, a, b, cost)) continue;
                if (cost < best) {
                    best = cost;
                    m.initial = {a, n, env, dec, b};
                }
            }
        }
    }
    if (!std::isfinite(best)) throw FitError("no usable starting point for the Rabi model");
    return m;
}

}  // namespace

ModelSpec initial_guess(ModelId id, const FitData& data, double pulse_duration_us) {
    if (data.x.empty() || data.x.size() != data.y.size() || data.x.size() != data.sigma.size())
        throw std::invalid_argument("data columns must be non-empty and of equal length");
    return id == ModelId::lorentzian ? lorentzian_guess(data) : rabi_guess(data, pulse_duration_us);
}

FitData synthetic_lorentzian(std::span<const double> x, double amplitude, double center, double fwhm,
                             double offset, double noise_fraction, std::uint64_t seed,
                             std::uint64_t stream) {
    Sampler rng(seed, stream);
    const double sigma = noise_fraction * std::abs(amplitude);
    if (!(sigma > 0.0)) throw std::invalid_argument("noise level must be positive");
    FitData d;
    for (double xi : x) {
        d.x.push_back(xi);
        d.y.push_back(lorentzian(xi, amplitude, center, fwhm, offset) + rng.normal(0.0, sigma));
        d.sigma.push_back(sigma);
    }
    return d;
}

FitData synthetic_rabi_scan(std::span<const double> omega, double t_pulse, const RabiParams& truth,
                            const ShotStatistics& stats, std::uint64_t seed, std::uint64_t stream) {
    if (stats.shots < 2 || stats.experiments_per_shot < 1 || !(stats.detection_probability > 0.0))
        throw std::invalid_argument("invalid shot statistics");
    Sampler rng(seed, stream);
    const double unit = stats.experiments_per_shot * stats.detection_probability;
    const double floor = 1.0 / (unit * std::sqrt(static_cast<double>(stats.shots)));
    FitData d;
    for (double w : omega) {
        const double mean_counts = unit * std::max(0.0, rabi_collective_model(w, t_pulse, truth));
        double sum = 0.0, sum2 = 0.0;
        for (int s = 0; s < stats.shots; ++s) {
            const double c = rng.poisson(mean_counts);
            sum += c;
            sum2 += c * c;
        }
        const double n = stats.shots;
        const double mean = sum / n;
        const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
        d.x.push_back(w);
        d.y.push_back(mean / unit);
        d.sigma.push_back(std::max(std::sqrt(var / n) / unit, floor));
    }
    return d;
}

}  // namespace rydpol
