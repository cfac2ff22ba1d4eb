#include "rydpol/structure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rydpol {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr double kRydbergInfinityGhz = 3289841.960250;
constexpr double kElectronMassU = 5.48579909065e-4;
constexpr double kRb87AtomMassU = 86.909180527;

int twice_j_of(int l, double j) {
    const int tj = static_cast<int>(std::lround(2.0 * j));
    if (std::abs(2.0 * j - tj) > 1e-9 || std::abs(tj - 2 * l) != 1)
        throw std::domain_error("j must equal l +/- 1/2");
    return tj;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return acc;
}

// Linear interpolation of (grid, values) at r; grid is strictly increasing
// and r lies inside it.
double interpolate(const std::vector<double>& grid, const std::vector<double>& values, double r) {
    auto it = std::lower_bound(grid.begin(), grid.end(), r);
    if (it == grid.end()) return values.back();
    const auto hi = static_cast<std::size_t>(it - grid.begin());
    if (grid[hi] == r || hi == 0) return values[hi];
    const std::size_t lo = hi - 1;
    const double t = (r - grid[lo]) / (grid[hi] - grid[lo]);
    return values[lo] + t * (values[hi] - values[lo]);
}

}  // namespace

QuantumDefectModel QuantumDefectModel::rubidium87() {
    QuantumDefectModel m;
    m.rydberg_constant =
        kRydbergInfinityGhz / (1.0 + kElectronMassU / (kRb87AtomMassU - kElectronMassU));
    // Millimetre-wave spectroscopy values (s, p, d) and f-series values.
    m.defects[{0, 1}] = {3.1311804, 0.1784};
    m.defects[{1, 1}] = {2.6548849, 0.2900};
    m.defects[{1, 3}] = {2.6416737, 0.2950};
    m.defects[{2, 3}] = {1.34809171, -0.60286};
    m.defects[{2, 5}] = {1.34646572, -0.59600};
    m.defects[{3, 5}] = {0.0165192, -0.085};
    m.defects[{3, 7}] = {0.0165437, -0.086};
    return m;
}

QuantumDefectModel QuantumDefectModel::hydrogenic(double rydberg_ghz) {
    QuantumDefectModel m;
    m.rydberg_constant = rydberg_ghz;
    return m;
}

double QuantumDefectModel::defect(int n, int l, double j) const {
    const auto it = defects.find({l, twice_j_of(l, j)});
    if (it == defects.end()) return 0.0;
    const auto [d0, d2] = it->second;
    const double core = n - d0;
    if (core <= 0.0) throw std::domain_error("principal quantum number below the quantum defect");
    return d0 + d2 / (core * core);
}

double QuantumDefectModel::effective_n(int n, int l, double j) const {
    if (l < 0 || l >= n) throw std::domain_error("orbital quantum number must satisfy 0 <= l < n");
    const double n_eff = n - defect(n, l, j);
    if (!(n_eff > 0.0)) throw std::domain_error("effective quantum number is not positive");
    return n_eff;
}

double binding_energy(const QuantumDefectModel& model, int n, int l, double j) {
    const double n_eff = model.effective_n(n, l, j);
    return -model.rydberg_constant / (n_eff * n_eff);
}

double transition_frequency(const QuantumDefectModel& model, int n_a, int l_a, double j_a, int n_b,
                            int l_b, double j_b) {
    return std::abs(binding_energy(model, n_b, l_b, j_b) - binding_energy(model, n_a, l_a, j_a));
}

int RadialWavefunction::node_count() const {
    double peak = 0.0;
    for (double v : u) peak = std::max(peak, std::abs(v));
    const double floor = 1e-6 * peak;
    int nodes = 0;
    int last_sign = 0;
    for (double v : u) {
        if (std::abs(v) < floor) continue;
        const int sign = v > 0.0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) ++nodes;
        last_sign = sign;
    }
    return nodes;
}

double RadialWavefunction::norm() const {
    std::vector<double> density(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) density[i] = u[i] * u[i];
    return trapezoid(grid, density);
}

double RadialWavefunction::expectation_r(double power) const {
    std::vector<double> integrand(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        integrand[i] = u[i] * u[i] * std::pow(grid[i], power);
    return trapezoid(grid, integrand) / norm();
}

RadialWavefunction numerov_wavefunction(const QuantumDefectModel& model, int n, int l, double j,
                                        const GridSpec& spec) {
    if (!(spec.log_step > 0.0) || !(spec.inner_fraction > 0.0) || !(spec.outer_factor > 0.0))
        throw std::domain_error("grid spec entries must be positive");

    RadialWavefunction wf;
    wf.n = n;
    wf.l = l;
    wf.twice_j = twice_j_of(l, j);
    wf.effective_n = model.effective_n(n, l, j);

    // Hartree units: E = -1 / (2 n*^2), V = -1/r.
    const double energy = -0.5 / (wf.effective_n * wf.effective_n);
    const double r_in = std::max(spec.inner_fraction * n * n, 1e-4);
    const double r_out = spec.outer_factor * n * (n + 15.0);
    const double centrifugal = l * (l + 1.0);

    // Points-per-wavelength requirement in ln r: dx <= 2 pi / (ppw * r k(r)).
    double max_rk = 0.0;
    for (double r = r_in; r < r_out; r *= 1.01) {
        const double k2 = 2.0 * (energy + 1.0 / r) - centrifugal / (r * r);
        if (k2 > 0.0) max_rk = std::max(max_rk, r * std::sqrt(k2));
    }
    double dx = spec.log_step;
    if (max_rk > 0.0) dx = std::min(dx, kTwoPi / (spec.min_points_per_wavelength * max_rk));

    // Grid points sit at r = exp(k dx) for integer k so that states sharing
    // a step share grid points.
    const auto k_lo = static_cast<long>(std::floor(std::log(r_in) / dx));
    const auto k_hi = static_cast<long>(std::ceil(std::log(r_out) / dx));
    const auto count = static_cast<std::size_t>(k_hi - k_lo + 1);
    if (count < 8) throw IntegrationError("radial grid too coarse");

    std::vector<double> r(count), g(count), w(count, 0.0);
    const double shift = (l + 0.5) * (l + 0.5);
    for (std::size_t i = 0; i < count; ++i) {
        r[i] = std::exp(static_cast<double>(k_lo + static_cast<long>(i)) * dx);
        // w = u / sqrt(r) satisfies w'' = g w in x = ln r.
        g[i] = shift + 2.0 * r[i] * r[i] * (-1.0 / r[i] - energy);
    }

    const double h12 = dx * dx / 12.0;
    w[count - 1] = 1e-10;
    w[count - 2] = 1e-10 * std::exp(dx * std::sqrt(std::max(g[count - 1], 0.0)));
    for (std::size_t i = count - 2; i >= 1; --i) {
        const double f_next = 1.0 - h12 * g[i + 1];
        const double f_here = 1.0 - h12 * g[i];
        const double f_prev = 1.0 - h12 * g[i - 1];
        w[i - 1] = ((12.0 - 10.0 * f_here) * w[i] - f_next * w[i + 1]) / f_prev;
        if (!std::isfinite(w[i - 1])) {
            std::ostringstream msg;
            msg << "Numerov amplitude diverged at r=" << r[i - 1] << " a0 for n=" << n << " l=" << l;
            throw IntegrationError(msg.str());
        }
    }

    // Inside the inner turning point a |u| that grows towards the origin is
    // the irregular solution taking over; cut at the minimum.
    std::size_t first = 0;
    std::size_t allowed = 0;
    while (allowed + 1 < count &&
           energy + 1.0 / r[allowed] - centrifugal / (2.0 * r[allowed] * r[allowed]) < 0.0)
        ++allowed;
    for (std::size_t k = allowed; k > 0; --k) {
        if (std::abs(w[k - 1]) * std::sqrt(r[k - 1]) > std::abs(w[k]) * std::sqrt(r[k])) {
            first = k;
            break;
        }
    }

    wf.grid.assign(r.begin() + static_cast<std::ptrdiff_t>(first), r.end());
    wf.u.resize(wf.grid.size());
    for (std::size_t i = 0; i < wf.grid.size(); ++i)
        wf.u[i] = w[first + i] * std::sqrt(wf.grid[i]);

    const double norm = wf.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        std::ostringstream msg;
        msg << "normalization failed (norm=" << norm << ") for n=" << n << " l=" << l
            << " on " << wf.grid.size() << " points";
        throw IntegrationError(msg.str());
    }
    const double scale = 1.0 / std::sqrt(norm);
    for (double& v : wf.u) v *= scale;
    return wf;
}

double radial_matrix_element(const RadialWavefunction& a, const RadialWavefunction& b) {
    if (a.grid.empty() || b.grid.empty()) throw std::invalid_argument("empty radial grid");
    const double lo = std::max(a.grid.front(), b.grid.front());
    const double hi = std::min(a.grid.back(), b.grid.back());
    if (!(lo < hi)) throw std::invalid_argument("radial grids do not overlap");

    std::vector<double> merged;
    merged.reserve(a.grid.size() + b.grid.size());
    for (double r : a.grid)
        if (r >= lo && r <= hi) merged.push_back(r);
    for (double r : b.grid)
        if (r >= lo && r <= hi) merged.push_back(r);
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    std::vector<double> integrand(merged.size());
    for (std::size_t i = 0; i < merged.size(); ++i) {
        const double product = interpolate(a.grid, a.u, merged[i]) * interpolate(b.grid, b.u, merged[i]);
        integrand[i] = product * merged[i];
    }
    return trapezoid(merged, integrand);
}

double transition_dipole(double radial_ea0, double angular_factor) {
    if (!(angular_factor >= 0.0 && angular_factor <= 1.0))
        throw std::domain_error("angular factor must lie in [0, 1]");
    return radial_ea0 * angular_factor;
}

}  // namespace rydpol
