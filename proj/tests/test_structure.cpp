#include "doctest.h"

#include <cmath>
#include <map>

#include "rydpol/structure.hpp"

using namespace rydpol;
using doctest::Approx;

namespace {

// Overlap integral of two states on a shared log grid (same step).
double overlap(const RadialWavefunction& a, const RadialWavefunction& b) {
    std::map<double, double> ua;
    for (std::size_t i = 0; i < a.grid.size(); ++i) ua[a.grid[i]] = a.u[i];
    double acc = 0.0;
    double prev_r = 0.0, prev_v = 0.0;
    bool have_prev = false;
    for (std::size_t i = 0; i < b.grid.size(); ++i) {
        const auto it = ua.find(b.grid[i]);
        if (it == ua.end()) {
            have_prev = false;
            continue;
        }
        const double v = it->second * b.u[i];
        if (have_prev) acc += 0.5 * (b.grid[i] - prev_r) * (v + prev_v);
        prev_r = b.grid[i];
        prev_v = v;
        have_prev = true;
    }
    return acc;
}

}  // namespace

TEST_CASE("hydrogenic energies") {
    const auto h = QuantumDefectModel::hydrogenic();
    CHECK(binding_energy(h, 1, 0, 0.5) == Approx(-3289841.96025));
    CHECK(binding_energy(h, 2, 0, 0.5) == Approx(-822460.49006).epsilon(1e-10));
    CHECK(binding_energy(h, 2, 1, 1.5) == binding_energy(h, 2, 0, 0.5));
    for (int n = 1; n <= 5; ++n) CHECK(binding_energy(h, n, 0, 0.5) == Approx(-3289841.96025 / (n * n)));
}

TEST_CASE("equal defects give equal energies") {
    QuantumDefectModel m = QuantumDefectModel::hydrogenic();
    m.defects[{1, 1}] = {0.3, 0.01};
    m.defects[{2, 3}] = {0.3, 0.01};
    CHECK(binding_energy(m, 30, 1, 0.5) == binding_energy(m, 30, 2, 1.5));
}

TEST_CASE("rubidium defects reproduce the 60s-59p transition") {
    const auto rb = QuantumDefectModel::rubidium87();
    CHECK(rb.rydberg_constant == Approx(3289821.2).epsilon(1e-7));
    for (int n = 20; n <= 120; n += 10)
        for (auto [l, j] : std::vector<std::pair<int, double>>{{0, 0.5}, {1, 0.5}, {1, 1.5}, {2, 1.5}, {2, 2.5}, {3, 2.5}})
            CHECK(rb.effective_n(n, l, j) > 0.0);
    const double f = transition_frequency(rb, 60, 0, 0.5, 59, 1, 1.5);
    CHECK(f == Approx(18.5).epsilon(0.01));
    CHECK(transition_frequency(rb, 59, 1, 1.5, 60, 0, 0.5) == f);
}

TEST_CASE("quantum number checks") {
    const auto rb = QuantumDefectModel::rubidium87();
    CHECK_THROWS_AS(rb.effective_n(5, 5, 5.5), std::domain_error);
    CHECK_THROWS_AS(rb.effective_n(60, 1, 2.5), std::domain_error);
    CHECK_THROWS_AS(rb.effective_n(60, -1, 0.5), std::domain_error);
    CHECK_THROWS_AS(binding_energy(rb, 3, 0, 0.5), std::domain_error);  // n below the s defect
}

TEST_CASE("hydrogen wavefunctions") {
    const auto h = QuantumDefectModel::hydrogenic();
    const auto s1 = numerov_wavefunction(h, 1, 0, 0.5);
    CHECK(s1.expectation_r() == Approx(1.5).epsilon(1e-3));
    for (int n = 1; n <= 5; ++n) {
        for (int l = 0; l < n; ++l) {
            const auto wf = numerov_wavefunction(h, n, l, l + 0.5);
            CAPTURE(n);
            CAPTURE(l);
            CHECK(wf.norm() == Approx(1.0).epsilon(1e-6));
            CHECK(wf.node_count() == n - l - 1);
            const double expected_r = 0.5 * (3.0 * n * n - l * (l + 1.0));
            CHECK(wf.expectation_r() == Approx(expected_r).epsilon(5e-3));
            double peak = 0.0;
            for (double v : wf.u) peak = std::max(peak, std::abs(v));
            CHECK(std::abs(wf.u.back()) < 1e-6 * peak);
            CHECK(std::abs(wf.u.front()) < 0.5 * peak);
        }
    }
}

TEST_CASE("hydrogen radial matrix elements against closed forms") {
    const auto h = QuantumDefectModel::hydrogenic();
    auto element = [&](int n1, int l1, int n2, int l2) {
        return std::abs(radial_matrix_element(numerov_wavefunction(h, n1, l1, l1 + 0.5),
                                              numerov_wavefunction(h, n2, l2, l2 + 0.5)));
    };
    CHECK(element(1, 0, 2, 1) == Approx(128.0 * std::sqrt(6.0) / 243.0).epsilon(5e-3));
    CHECK(element(2, 0, 2, 1) == Approx(3.0 * std::sqrt(3.0)).epsilon(5e-3));
    CHECK(element(1, 0, 3, 1) == Approx(0.5166).epsilon(5e-3));
    CHECK(element(2, 1, 3, 0) == Approx(0.9384).epsilon(5e-3));
    CHECK(element(2, 1, 3, 2) == Approx(4.7480).epsilon(5e-3));
}

TEST_CASE("hydrogen orthogonality within a series") {
    // No core for hydrogen, so the grid can start well inside the default
    // 0.05 n^2 cutoff; the shared range then covers the low-n states.
    const auto h = QuantumDefectModel::hydrogenic();
    GridSpec deep;
    deep.inner_fraction = 1e-3;
    for (int l = 0; l <= 2; ++l)
        for (int n1 = l + 1; n1 <= 5; ++n1)
            for (int n2 = n1 + 1; n2 <= 5; ++n2)
                CHECK(std::abs(overlap(numerov_wavefunction(h, n1, l, l + 0.5, deep),
                                       numerov_wavefunction(h, n2, l, l + 0.5, deep))) < 1e-3);
}

TEST_CASE("rubidium 60s-59p3/2 radial element") {
    const auto rb = QuantumDefectModel::rubidium87();
    const auto s = numerov_wavefunction(rb, 60, 0, 0.5);
    const auto p = numerov_wavefunction(rb, 59, 1, 1.5);
    CHECK(s.norm() == Approx(1.0).epsilon(1e-6));
    const double d = radial_matrix_element(s, p);
    CHECK(std::abs(d) == Approx(3468.0).epsilon(0.02));
    CHECK(radial_matrix_element(p, s) == d);

    GridSpec fine;
    fine.log_step *= 0.5;
    const double d_fine = radial_matrix_element(numerov_wavefunction(rb, 60, 0, 0.5, fine),
                                                numerov_wavefunction(rb, 59, 1, 1.5, fine));
    CHECK(std::abs(d_fine / d - 1.0) < 1e-3);
}

TEST_CASE("transition dipole") {
    CHECK(transition_dipole(3468.0, std::sqrt(2.0 / 9.0)) == Approx(1634.8).epsilon(1e-4));
    CHECK(transition_dipole(12.5, 1.0) == 12.5);
    CHECK(transition_dipole(12.5, 0.0) == 0.0);
    CHECK_THROWS_AS(transition_dipole(12.5, 1.2), std::domain_error);
    CHECK_THROWS_AS(transition_dipole(12.5, -0.1), std::domain_error);
}

TEST_CASE("grid spec validation") {
    GridSpec bad;
    bad.log_step = 0.0;
    CHECK_THROWS_AS(numerov_wavefunction(QuantumDefectModel::hydrogenic(), 2, 0, 0.5, bad), std::domain_error);
}
