#pragma once

#include <compare>
#include <vector>

namespace rydpol {

/// A half-integer stored as twice its value, so that identity tests are exact.
class HalfInt {
public:
    constexpr HalfInt() = default;
    static constexpr HalfInt from_twice(int twice) { return HalfInt(twice); }
    static constexpr HalfInt from_int(int value) { return HalfInt(2 * value); }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }

    constexpr HalfInt operator-() const { return HalfInt(-twice_); }
    constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice_ + o.twice_); }
    constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice_ - o.twice_); }
    constexpr auto operator<=>(const HalfInt&) const = default;

private:
    constexpr explicit HalfInt(int twice) : twice_(twice) {}
    int twice_ = 0;
};

/// Superposition over the 2j+1 Dicke states |j, m>, amplitudes indexed by
/// m = -j, -j+1, ..., j.
struct DickeState {
    HalfInt j;
    std::vector<double> amplitudes;

    static DickeState basis(HalfInt j, HalfInt m);
    double amplitude(HalfInt m) const;
    double norm() const;
};

/// N stored polaritons sharing one collective readout mode. The spin-wave
/// phases are kept for bookkeeping only.
struct PolaritonRegister {
    int n_polaritons = 0;
    std::vector<double> phases;  // rad
    long atoms_per_polariton = 1;

    HalfInt total_spin() const { return HalfInt::from_twice(n_polaritons); }
};

/// Terminating Gauss series 2F1(a, b; c; x) with a a non-positive integer.
double hypergeom_2f1_terminating(int a, double b, double c, double x);

/// Reduced rotation matrix element d^j_{m', m}(theta) from the closed form
/// with the terminating hypergeometric factor. Factorials are evaluated in
/// log space.
double wigner_d(HalfInt j, HalfInt m_prime, HalfInt m, double theta);

/// Phase-matched retrieval probability [cos^2(theta/2)]^N.
double retrieval_probability(int n_polaritons, double theta);

/// Rotates an arbitrary superposition about y by theta.
DickeState rotate(const DickeState& state, double theta);

/// Rotates the register's initial state |N/2, -N/2> by theta.
DickeState rotate_register(const PolaritonRegister& reg, double theta);

}  // namespace rydpol
