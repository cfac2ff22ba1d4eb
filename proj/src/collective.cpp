#include "rydpol/collective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rydpol {

namespace {

void check_projection(HalfInt j, HalfInt m) {
    if (j.twice() < 0) throw std::domain_error("j must be non-negative");
    if (std::abs(m.twice()) > j.twice()) throw std::domain_error("|m| exceeds j");
    if ((j - m).twice() % 2 != 0) throw std::domain_error("j - m must be an integer");
}

// log of n! for a non-negative integer n given as a HalfInt.
double log_factorial(HalfInt n) {
    return std::lgamma(static_cast<double>(n.twice() / 2) + 1.0);
}

std::size_t index_of(HalfInt j, HalfInt m) {
    return static_cast<std::size_t>((m + j).twice() / 2);
}

}  // namespace

DickeState DickeState::basis(HalfInt j, HalfInt m) {
    check_projection(j, m);
    DickeState s{j, std::vector<double>(static_cast<std::size_t>(j.twice() + 1), 0.0)};
    s.amplitudes[index_of(j, m)] = 1.0;
    return s;
}

double DickeState::amplitude(HalfInt m) const {
    check_projection(j, m);
    return amplitudes.at(index_of(j, m));
}

double DickeState::norm() const {
    double acc = 0.0;
    for (double a : amplitudes) acc += a * a;
    return std::sqrt(acc);
}

double hypergeom_2f1_terminating(int a, double b, double c, double x) {
    if (a > 0) throw std::domain_error("2F1 series does not terminate for positive a");
    const int terms = -a;
    // c = 0, -1, ... inside the summed range makes a term singular.
    if (c <= 0.0 && c == std::floor(c) && -c < terms)
        throw std::domain_error("2F1 lower parameter is a non-positive integer within the series");
    double sum = 1.0;
    double term = 1.0;
    for (int k = 0; k < terms; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
        sum += term;
    }
    return sum;
}

double wigner_d(HalfInt j, HalfInt m_prime, HalfInt m, double theta) {
    check_projection(j, m_prime);
    check_projection(j, m);
    if (!std::isfinite(theta)) throw std::domain_error("rotation angle must be finite");
    // The closed form needs m' >= m; d_{m',m} = (-1)^{m-m'} d_{m,m'} otherwise.
    if (m_prime < m) {
        const int parity = ((m - m_prime).twice() / 2) % 2 == 0 ? 1 : -1;
        return parity * wigner_d(j, m, m_prime, theta);
    }

    const int delta = (m_prime - m).twice() / 2;
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);

    const double log_prefactor =
        0.5 * (log_factorial(j - m) + log_factorial(j + m_prime) - log_factorial(j + m) -
               log_factorial(j - m_prime)) -
        std::lgamma(delta + 1.0);
    const double sign = delta % 2 == 0 ? 1.0 : -1.0;

    // cos^p sin^q 2F1(a, b; delta+1; -tan^2), with the tan^2 powers folded
    // into the cos/sin powers term by term so theta = pi stays finite.
    const int a = (m_prime - j).twice() / 2;
    const int b = (-m - j).twice() / 2;
    const int cos_power = (j + j + m - m_prime).twice() / 2;
    // The series alternates; extended precision delays the cancellation loss
    // that sets in for j of a few tens.
    const int terms = std::min(-a, -b);
    long double series = 0.0L;
    long double coefficient = 1.0L;
    const long double cl = c;
    const long double sl = s;
    for (int k = 0; k <= terms; ++k) {
        if (k > 0)
            coefficient *= -static_cast<long double>(a + k - 1) * (b + k - 1) /
                           (static_cast<long double>(delta + k) * k);
        series += coefficient * std::pow(cl, cos_power - 2 * k) * std::pow(sl, delta + 2 * k);
    }
    return sign * static_cast<double>(std::exp(static_cast<long double>(log_prefactor)) * series);
}

double retrieval_probability(int n_polaritons, double theta) {
    if (n_polaritons < 0) throw std::domain_error("polariton number must be non-negative");
    const double c = std::cos(0.5 * theta);
    return std::pow(c * c, n_polaritons);
}

DickeState rotate(const DickeState& state, double theta) {
    const HalfInt j = state.j;
    const auto dim = static_cast<std::size_t>(j.twice() + 1);
    if (state.amplitudes.size() != dim) throw std::invalid_argument("amplitude count does not match 2j+1");
    DickeState out{j, std::vector<double>(dim, 0.0)};
    for (std::size_t row = 0; row < dim; ++row) {
        const HalfInt mp = HalfInt::from_twice(2 * static_cast<int>(row)) - j;
        double acc = 0.0;
        for (std::size_t col = 0; col < dim; ++col) {
            if (state.amplitudes[col] == 0.0) continue;
            const HalfInt m = HalfInt::from_twice(2 * static_cast<int>(col)) - j;
            acc += wigner_d(j, mp, m, theta) * state.amplitudes[col];
        }
        out.amplitudes[row] = acc;
    }
    return out;
}

DickeState rotate_register(const PolaritonRegister& reg, double theta) {
    if (reg.n_polaritons < 0) throw std::domain_error("polariton number must be non-negative");
    const HalfInt j = reg.total_spin();
    return rotate(DickeState::basis(j, -j), theta);
}

}  // namespace rydpol
