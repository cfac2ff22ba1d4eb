#include "rydpol/interactions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rydpol {

namespace {

constexpr double kTwoPi = 6.283185307179586;

// One matrix element |to><from| of a single-site operator.
struct LocalElement {
    int from;
    int to;
    double amplitude;
};
using LocalOperator = std::vector<LocalElement>;

// Row-major triplet accumulator over a product space of `sites` copies of a
// `local_dim`-dimensional site.
class ProductSpaceBuilder {
public:
    ProductSpaceBuilder(int sites, int local_dim) : sites_(sites), local_dim_(local_dim) {
        dim_ = 1;
        for (int s = 0; s < sites; ++s) {
            dim_ *= local_dim;
            if (dim_ > std::numeric_limits<int>::max() / std::max(local_dim, 1))
                throw std::length_error("product space too large");
        }
        stride_.assign(static_cast<std::size_t>(sites), 1);
        for (int s = sites - 2; s >= 0; --s)
            stride_[static_cast<std::size_t>(s)] =
                stride_[static_cast<std::size_t>(s) + 1] * local_dim;
    }

    Eigen::Index dimension() const { return dim_; }

    int digit(Eigen::Index index, int site) const {
        return static_cast<int>((index / stride_[static_cast<std::size_t>(site)]) % local_dim_);
    }

    void add_one_body(int site, const LocalOperator& op, double coefficient) {
        if (coefficient == 0.0) return;
        const Eigen::Index stride = stride_[static_cast<std::size_t>(site)];
        for (Eigen::Index col = 0; col < dim_; ++col) {
            const int d = digit(col, site);
            for (const auto& e : op) {
                if (e.from != d) continue;
                const Eigen::Index row = col + (e.to - d) * stride;
                triplets_.emplace_back(row, col, coefficient * e.amplitude);
            }
        }
    }

    void add_two_body(int site_a, const LocalOperator& op_a, int site_b, const LocalOperator& op_b,
                      double coefficient) {
        if (coefficient == 0.0) return;
        const Eigen::Index stride_a = stride_[static_cast<std::size_t>(site_a)];
        const Eigen::Index stride_b = stride_[static_cast<std::size_t>(site_b)];
        for (Eigen::Index col = 0; col < dim_; ++col) {
            const int da = digit(col, site_a);
            const int db = digit(col, site_b);
            for (const auto& ea : op_a) {
                if (ea.from != da) continue;
                for (const auto& eb : op_b) {
                    if (eb.from != db) continue;
                    const Eigen::Index row = col + (ea.to - da) * stride_a + (eb.to - db) * stride_b;
                    triplets_.emplace_back(row, col, coefficient * ea.amplitude * eb.amplitude);
                }
            }
        }
    }

    SparseOperator finish() {
        SparseOperator m(dim_, dim_);
        m.setFromTriplets(triplets_.begin(), triplets_.end());
        m.prune(0.0);
        triplets_.clear();
        return m;
    }

private:
    int sites_;
    int local_dim_;
    Eigen::Index dim_ = 1;
    std::vector<Eigen::Index> stride_;
    std::vector<Eigen::Triplet<double>> triplets_;
};

// |to><from| restricted to the levels present in `basis`; empty when either
// level is absent.
LocalOperator transition(const SiteBasis& basis, Level from, Level to, double amplitude = 1.0) {
    const int f = basis.local_index(from);
    const int t = basis.local_index(to);
    if (f < 0 || t < 0) return {};
    return {{f, t, amplitude}};
}

LocalOperator sum(LocalOperator a, const LocalOperator& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

LocalOperator adjoint(const LocalOperator& op) {
    LocalOperator out;
    out.reserve(op.size());
    for (const auto& e : op) out.push_back({e.to, e.from, e.amplitude});
    return out;
}

void check_positions(std::span<const Position> positions, int sites) {
    if (static_cast<int>(positions.size()) != sites)
        throw std::invalid_argument("one position per site is required");
    for (const auto& p : positions)
        if (!p.allFinite()) throw std::invalid_argument("positions must be finite");
}

}  // namespace

// ---------------------------------------------------------------------------
// SiteBasis

SiteBasis SiteBasis::full(int sites) {
    return SiteBasis(sites, {Level::s, Level::p_minus, Level::p_zero, Level::p_plus});
}

SiteBasis SiteBasis::driven(int sites) { return SiteBasis(sites, {Level::s, Level::p_zero}); }

SiteBasis::SiteBasis(int sites, std::vector<Level> levels) : sites_(sites), levels_(std::move(levels)) {
    if (sites < 0) throw std::invalid_argument("site count must be non-negative");
    if (levels_.empty() || local_index(Level::s) != 0)
        throw std::invalid_argument("level set must start with s");
    for (std::size_t i = 0; i < levels_.size(); ++i)
        for (std::size_t k = i + 1; k < levels_.size(); ++k)
            if (levels_[i] == levels_[k]) throw std::invalid_argument("duplicate level in basis");
    dimension_ = 1;
    for (int s = 0; s < sites; ++s) {
        dimension_ *= local_dimension();
        if (dimension_ > (Eigen::Index{1} << 30)) throw std::length_error("site basis too large");
    }
}

int SiteBasis::local_index(Level level) const {
    for (std::size_t i = 0; i < levels_.size(); ++i)
        if (levels_[i] == level) return static_cast<int>(i);
    return -1;
}

Eigen::Index SiteBasis::index_of(std::span<const Level> configuration) const {
    if (static_cast<int>(configuration.size()) != sites_)
        throw std::invalid_argument("configuration length must equal the site count");
    Eigen::Index index = 0;
    for (Level level : configuration) {
        const int d = local_index(level);
        if (d < 0) throw std::invalid_argument("level not present in this basis");
        index = index * local_dimension() + d;
    }
    return index;
}

std::vector<Level> SiteBasis::configuration(Eigen::Index index) const {
    if (index < 0 || index >= dimension_) throw std::out_of_range("basis index out of range");
    std::vector<Level> out(static_cast<std::size_t>(sites_));
    for (int s = sites_ - 1; s >= 0; --s) {
        out[static_cast<std::size_t>(s)] = levels_[static_cast<std::size_t>(index % local_dimension())];
        index /= local_dimension();
    }
    return out;
}

Eigen::Index SiteBasis::all_s_index() const { return 0; }

// ---------------------------------------------------------------------------
// Site Hamiltonians

std::vector<std::pair<int, int>> coupled_pairs(int sites, CouplingGraph graph) {
    std::vector<std::pair<int, int>> pairs;
    if (graph == CouplingGraph::nearest_neighbor) {
        for (int i = 0; i + 1 < sites; ++i) pairs.emplace_back(i, i + 1);
    } else {
        for (int i = 0; i < sites; ++i)
            for (int j = i + 1; j < sites; ++j) pairs.emplace_back(i, j);
    }
    return pairs;
}

SparseOperator build_drive_hamiltonian(const SiteBasis& basis, double omega_mu) {
    if (!(omega_mu >= 0.0) || !std::isfinite(omega_mu))
        throw std::domain_error("microwave Rabi frequency must be non-negative");
    ProductSpaceBuilder builder(basis.sites(), basis.local_dimension());
    const LocalOperator flip = sum(transition(basis, Level::s, Level::p_zero),
                                   transition(basis, Level::p_zero, Level::s));
    for (int site = 0; site < basis.sites(); ++site) builder.add_one_body(site, flip, 0.5 * omega_mu);
    return builder.finish();
}

SparseOperator build_dd_hamiltonian(const SiteBasis& basis, std::span<const Position> positions,
                                    double c3, const InteractionOptions& options) {
    check_positions(positions, basis.sites());
    ProductSpaceBuilder builder(basis.sites(), basis.local_dimension());
    const auto& w = options.weights;

    // Raising parts sigma_q^+ = |p_q><s| for the three spherical channels.
    const LocalOperator raise_plus = transition(basis, Level::s, Level::p_plus);
    const LocalOperator raise_minus = transition(basis, Level::s, Level::p_minus);
    const LocalOperator raise_pi = transition(basis, Level::s, Level::p_zero);

    // Dipole components: mu+ raises m by one, mu- = (mu+)^dagger, mu^z flips s <-> p0.
    const LocalOperator mu_plus = sum(raise_plus, adjoint(raise_minus));
    const LocalOperator mu_minus = adjoint(mu_plus);
    const LocalOperator mu_z = sum(raise_pi, adjoint(raise_pi));

    if (options.form == ExchangeForm::full_dipole && w.sigma_plus != w.sigma_minus)
        throw std::invalid_argument("full dipole form uses one weight for the sigma channels");

    for (const auto& [i, j] : coupled_pairs(basis.sites(), options.graph)) {
        const Position d = positions[static_cast<std::size_t>(i)] - positions[static_cast<std::size_t>(j)];
        const double r = d.norm();
        if (!(r > 0.0))
            throw std::domain_error("coincident polariton positions " + std::to_string(i) + " and " +
                                    std::to_string(j));
        const double v = c3 * 1.0e3 / (r * r * r);

        if (options.form == ExchangeForm::rotating_wave) {
            const std::pair<const LocalOperator*, double> channels[] = {
                {&raise_plus, w.sigma_plus}, {&raise_minus, w.sigma_minus}, {&raise_pi, w.pi}};
            for (const auto& [raise, weight] : channels) {
                const LocalOperator lower = adjoint(*raise);
                builder.add_two_body(i, *raise, j, lower, v * weight);
                builder.add_two_body(i, lower, j, *raise, v * weight);
            }
        } else {
            builder.add_two_body(i, mu_plus, j, mu_minus, v * w.sigma_plus);
            builder.add_two_body(i, mu_minus, j, mu_plus, v * w.sigma_plus);
            builder.add_two_body(i, mu_z, j, mu_z, v * w.pi);
        }
    }
    return builder.finish();
}

SiteHamiltonian build_site_hamiltonian(const SiteBasis& basis, std::vector<Position> positions,
                                       double omega_mu, double c3, const InteractionOptions& options) {
    SiteHamiltonian h{basis, {}, std::move(positions), omega_mu, c3, options};
    h.matrix = build_drive_hamiltonian(basis, omega_mu);
    h.matrix += build_dd_hamiltonian(basis, h.positions, c3, options);
    h.matrix.prune(0.0);
    return h;
}

// ---------------------------------------------------------------------------
// Jaynes-Cummings chain

JcChain build_jc_chain(int sites, int fock_cutoff, double g, double f, double v_dd) {
    if (sites < 1 || sites > 3) throw std::domain_error("JC chain supports 1 to 3 sites");
    if (fock_cutoff < 0 || fock_cutoff > 3) throw std::domain_error("JC chain supports Fock cutoff 0 to 3");
    const int local = 2 * (fock_cutoff + 1);
    Eigen::Index dim = 1;
    for (int s = 0; s < sites; ++s) dim *= local;
    if (dim > kMaxJcDimension) throw std::length_error("JC chain dimension exceeds 10^4");

    auto index = [fock_cutoff](int spin, int photons) { return spin * (fock_cutoff + 1) + photons; };
    LocalOperator sigma_plus_a, annihilate, sigma_plus;
    for (int n = 0; n <= fock_cutoff; ++n) {
        sigma_plus.push_back({index(0, n), index(1, n), 1.0});
        for (int spin = 0; spin < 2; ++spin)
            if (n > 0) annihilate.push_back({index(spin, n), index(spin, n - 1), std::sqrt(double(n))});
        if (n > 0) sigma_plus_a.push_back({index(0, n), index(1, n - 1), std::sqrt(double(n))});
    }

    ProductSpaceBuilder builder(sites, local);
    for (int s = 0; s < sites; ++s) {
        builder.add_one_body(s, sigma_plus_a, g);
        builder.add_one_body(s, adjoint(sigma_plus_a), g);
        builder.add_one_body(s, annihilate, f);
        builder.add_one_body(s, adjoint(annihilate), f);
    }
    const LocalOperator sigma_minus = adjoint(sigma_plus);
    for (const auto& [i, j] : coupled_pairs(sites, CouplingGraph::nearest_neighbor)) {
        builder.add_two_body(i, sigma_plus, j, sigma_minus, v_dd);
        builder.add_two_body(i, sigma_minus, j, sigma_plus, v_dd);
    }
    return JcChain{sites, fock_cutoff, g, f, v_dd, builder.finish()};
}

SparseOperator JcChain::excitation_number() const {
    const int local = 2 * (fock_cutoff + 1);
    LocalOperator number;
    for (int spin = 0; spin < 2; ++spin)
        for (int n = 0; n <= fock_cutoff; ++n) {
            const int idx = spin * (fock_cutoff + 1) + n;
            if (spin + n > 0) number.push_back({idx, idx, double(spin + n)});
        }
    ProductSpaceBuilder builder(sites, local);
    for (int s = 0; s < sites; ++s) builder.add_one_body(s, number, 1.0);
    return builder.finish();
}

// ---------------------------------------------------------------------------
// Spectra

Spectrum<double> eigenspectrum(const SiteHamiltonian& h, bool with_vectors) {
    return eigenspectrum(h.dense(), with_vectors);
}

Spectrum<double> eigenspectrum(const JcChain& h, bool with_vectors) {
    return eigenspectrum(h.dense(), with_vectors);
}

EigenScan pair_eigenscan(double omega_mu, double c3, double r_min, double r_max, int steps,
                         const InteractionOptions& options) {
    if (steps < 2) throw std::invalid_argument("eigenscan needs at least two points");
    if (!(r_min > 0.0) || !(r_max > r_min)) throw std::domain_error("need 0 < r_min < r_max");

    const SiteBasis basis = SiteBasis::full(2);
    const auto dim = basis.dimension();
    EigenScan scan;
    scan.branches.resize(steps, dim);
    Eigen::MatrixXd previous;

    for (int step = 0; step < steps; ++step) {
        const double r = r_min + (r_max - r_min) * step / (steps - 1);
        const auto h = build_site_hamiltonian(basis, {Position(0, 0, 0), Position(0, 0, r)}, omega_mu, c3,
                                              options);
        const auto spec = eigenspectrum(h, true);
        scan.separations.push_back(r);
        scan.sorted.emplace_back(spec.values.data(), spec.values.data() + dim);

        std::vector<Eigen::Index> assignment(static_cast<std::size_t>(dim));
        if (step == 0) {
            for (Eigen::Index b = 0; b < dim; ++b) assignment[static_cast<std::size_t>(b)] = b;
        } else {
            // Greedy maximum-overlap matching between previous branches and
            // the new eigenvectors.
            Eigen::MatrixXd overlap = (previous.transpose() * spec.vectors).cwiseAbs2();
            const Eigen::VectorXd last = scan.branches.row(step - 1).transpose();
            std::vector<bool> branch_done(static_cast<std::size_t>(dim), false);
            std::vector<bool> vector_done(static_cast<std::size_t>(dim), false);
            for (Eigen::Index round = 0; round < dim; ++round) {
                double best = -1.0;
                double best_gap = 0.0;
                Eigen::Index bb = -1, bv = -1;
                for (Eigen::Index b = 0; b < dim; ++b) {
                    if (branch_done[static_cast<std::size_t>(b)]) continue;
                    for (Eigen::Index v = 0; v < dim; ++v) {
                        if (vector_done[static_cast<std::size_t>(v)]) continue;
                        const double score = overlap(b, v);
                        const double gap = std::abs(spec.values(v) - last(b));
                        if (score > best + 1e-9 || (std::abs(score - best) <= 1e-9 && gap < best_gap)) {
                            best = score;
                            best_gap = gap;
                            bb = b;
                            bv = v;
                        }
                    }
                }
                branch_done[static_cast<std::size_t>(bb)] = true;
                vector_done[static_cast<std::size_t>(bv)] = true;
                assignment[static_cast<std::size_t>(bb)] = bv;
            }
        }

        Eigen::MatrixXd ordered(dim, dim);
        for (Eigen::Index b = 0; b < dim; ++b) {
            const Eigen::Index v = assignment[static_cast<std::size_t>(b)];
            scan.branches(step, b) = spec.values(v);
            ordered.col(b) = spec.vectors.col(v);
        }
        previous = std::move(ordered);
    }
    return scan;
}

std::vector<BranchCrossing> find_branch_crossings(const EigenScan& scan, double tolerance,
                                                  double r_from) {
    std::vector<BranchCrossing> out;
    const Eigen::Index n = scan.branches.cols();
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) {
            int last_sign = 0;
            for (std::size_t step = 0; step < scan.separations.size(); ++step) {
                if (scan.separations[step] < r_from) continue;
                const double diff = scan.branches(static_cast<Eigen::Index>(step), a) -
                                    scan.branches(static_cast<Eigen::Index>(step), b);
                if (std::abs(diff) <= tolerance) continue;
                const int sign = diff > 0.0 ? 1 : -1;
                if (last_sign != 0 && sign != last_sign) {
                    out.push_back({static_cast<int>(sign > 0 ? b : a), static_cast<int>(sign > 0 ? a : b),
                                   scan.separations[step]});
                }
                last_sign = sign;
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const BranchCrossing& x, const BranchCrossing& y) { return x.separation < y.separation; });
    return out;
}

double dressed_splitting_deviation(std::span<const double> spectrum, double omega_mu) {
    if (spectrum.empty()) throw std::invalid_argument("empty spectrum");
    const auto [lo, hi] = std::minmax_element(spectrum.begin(), spectrum.end());
    return (*hi - *lo) - 2.0 * omega_mu;
}

// ---------------------------------------------------------------------------
// Dynamics

SpectralPropagator::SpectralPropagator(const Eigen::MatrixXd& h) : spectrum_(eigenspectrum(h, true)) {}

StateVector SpectralPropagator::evolve(const StateVector& psi0, double t) const {
    if (psi0.size() != spectrum_.values.size())
        throw std::invalid_argument("state dimension does not match the Hamiltonian");
    const double norm = psi0.norm();
    if (std::abs(norm - 1.0) > 1e-9) throw std::invalid_argument("initial state must be normalized");
    StateVector coeffs = spectrum_.vectors.transpose().cast<std::complex<double>>() * psi0;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k)
        coeffs(k) *= std::polar(1.0, -kTwoPi * spectrum_.values(k) * t);
    return spectrum_.vectors.cast<std::complex<double>>() * coeffs;
}

StateVector time_evolve(const SiteHamiltonian& h, const StateVector& psi0, double t) {
    return SpectralPropagator(h).evolve(psi0, t);
}

StateVector time_evolve(const Eigen::MatrixXd& h, const StateVector& psi0, double t) {
    return SpectralPropagator(h).evolve(psi0, t);
}

double energy_expectation(const SparseOperator& h, const StateVector& psi) {
    const StateVector h_psi = h.cast<std::complex<double>>() * psi;
    return psi.dot(h_psi).real();
}

StateVector all_s_state(const SiteBasis& basis) {
    StateVector psi = StateVector::Zero(basis.dimension());
    psi(basis.all_s_index()) = 1.0;
    return psi;
}

double retrieval_overlap(const StateVector& psi, const SiteBasis& basis) {
    if (psi.size() != basis.dimension()) throw std::invalid_argument("state dimension mismatch");
    return std::norm(psi(basis.all_s_index()));
}

}  // namespace rydpol
