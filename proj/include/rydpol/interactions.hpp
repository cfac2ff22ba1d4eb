#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rydpol/eigensolver.hpp"

namespace rydpol {

using Position = Eigen::Vector3d;
using SparseOperator = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using StateVector = Eigen::VectorXcd;

/// Per-polariton internal levels, ordered s(m=0), p(m=-1), p(m=0), p(m=+1).
enum class Level : int { s = 0, p_minus = 1, p_zero = 2, p_plus = 3 };

/// Tensor-product basis over `sites` polaritons. Enumeration is site-major:
/// site 0 is the most significant digit. A basis may keep only a subset of
/// the four levels (e.g. the {s, p0} pair reached by a pi-polarized drive).
class SiteBasis {
public:
    static SiteBasis full(int sites);
    static SiteBasis driven(int sites);
    SiteBasis(int sites, std::vector<Level> levels);

    int sites() const { return sites_; }
    const std::vector<Level>& levels() const { return levels_; }
    int local_dimension() const { return static_cast<int>(levels_.size()); }
    Eigen::Index dimension() const { return dimension_; }

    /// Position of `level` in the local level list, or -1 when absent.
    int local_index(Level level) const;
    Eigen::Index index_of(std::span<const Level> configuration) const;
    std::vector<Level> configuration(Eigen::Index index) const;
    /// Every site in s.
    Eigen::Index all_s_index() const;

private:
    int sites_ = 0;
    std::vector<Level> levels_;
    Eigen::Index dimension_ = 1;
};

enum class CouplingGraph { all_pairs, nearest_neighbor };

/// Which parts of the dipole-dipole operator are kept.
///  rotating_wave: excitation-conserving flip-flops |p_q s> <-> |s p_q>
///  full_dipole:   mu+_i mu-_j + mu-_i mu+_j + w_pi mu^z_i mu^z_j with the mu
///                 operators as Hermitian flips, including |s s> <-> |p p>
enum class ExchangeForm { rotating_wave, full_dipole };

/// Relative weights of the three spherical channels (sigma+, sigma-, pi).
struct ChannelWeights {
    double sigma_plus = 1.0;
    double sigma_minus = 1.0;
    double pi = -2.0;
};

struct InteractionOptions {
    CouplingGraph graph = CouplingGraph::all_pairs;
    ExchangeForm form = ExchangeForm::rotating_wave;
    ChannelWeights weights;
};

/// Interacting-polariton Hamiltonian in MHz (E/h), rotating frame, zero
/// detuning. Real symmetric by construction.
struct SiteHamiltonian {
    SiteBasis basis;
    SparseOperator matrix;
    std::vector<Position> positions;  // um
    double omega_mu = 0.0;            // MHz
    double c3 = 0.0;                  // GHz um^3
    InteractionOptions options;

    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }
};

/// (Omega/2)(|s><p0| + |p0><s|) on every site.
SparseOperator build_drive_hamiltonian(const SiteBasis& basis, double omega_mu);

/// Pairwise exchange with V_ij = C3 * 1e3 / R_ij^3 (MHz, signed) times the
/// channel structure selected by `options`.
SparseOperator build_dd_hamiltonian(const SiteBasis& basis, std::span<const Position> positions,
                                    double c3, const InteractionOptions& options = {});

SiteHamiltonian build_site_hamiltonian(const SiteBasis& basis, std::vector<Position> positions,
                                       double omega_mu, double c3,
                                       const InteractionOptions& options = {});

/// Pairs (i, j), i < j, coupled under `graph`. Nearest-neighbour treats the
/// sites as an open chain in the order given.
std::vector<std::pair<int, int>> coupled_pairs(int sites, CouplingGraph graph);

/// Truncated Jaynes-Cummings chain with per-site local space
/// {g, e} x {0..fock_cutoff}, local index spin * (cutoff + 1) + photons.
struct JcChain {
    int sites = 0;
    int fock_cutoff = 0;
    double g = 0.0;
    double f = 0.0;
    double v_dd = 0.0;
    SparseOperator matrix;

    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }
    /// Sum over sites of sigma+ sigma- + a^dagger a.
    SparseOperator excitation_number() const;
};

inline constexpr Eigen::Index kMaxJcDimension = 10000;

/// g sum (s+ a + s- a^dag) + V_dd sum_<ij> (s+_i s-_j + h.c.) + f sum (a + a^dag),
/// nearest neighbours on an open chain.
JcChain build_jc_chain(int sites, int fock_cutoff, double g, double f, double v_dd);

Spectrum<double> eigenspectrum(const SiteHamiltonian& h, bool with_vectors = false);
Spectrum<double> eigenspectrum(const JcChain& h, bool with_vectors = false);

/// Eigenvalue branches of the two-polariton problem versus separation.
struct EigenScan {
    std::vector<double> separations;           // um
    Eigen::MatrixXd branches;                  // row per separation, column per tracked branch
    std::vector<std::vector<double>> sorted;   // per-separation ascending spectrum
};

/// Two sites on the z axis, full 16-dimensional basis. Branches are followed
/// by maximal successive eigenvector overlap, ties broken by eigenvalue
/// proximity.
EigenScan pair_eigenscan(double omega_mu, double c3, double r_min, double r_max, int steps,
                         const InteractionOptions& options = {});

struct BranchCrossing {
    int lower_branch = 0;
    int upper_branch = 0;
    double separation = 0.0;  // first separation at which the order is reversed
};

/// Pairs of tracked branches whose energy ordering reverses between scan
/// points. Differences below `tolerance` (MHz) count as degenerate, not as a
/// change of order. Only separations >= r_from are considered.
std::vector<BranchCrossing> find_branch_crossings(const EigenScan& scan, double tolerance,
                                                  double r_from = 0.0);

/// Width of the driven-pair spectrum minus its non-interacting value 2*Omega.
double dressed_splitting_deviation(std::span<const double> spectrum, double omega_mu);

/// Caches the spectral decomposition of H for repeated propagation,
/// psi(t) = exp(-2 pi i H t) psi0 with H in MHz and t in us.
class SpectralPropagator {
public:
    explicit SpectralPropagator(const Eigen::MatrixXd& h);
    explicit SpectralPropagator(const SiteHamiltonian& h) : SpectralPropagator(h.dense()) {}
    explicit SpectralPropagator(const JcChain& h) : SpectralPropagator(h.dense()) {}

    StateVector evolve(const StateVector& psi0, double t) const;
    const Eigen::VectorXd& energies() const { return spectrum_.values; }

private:
    Spectrum<double> spectrum_;
};

StateVector time_evolve(const SiteHamiltonian& h, const StateVector& psi0, double t);
StateVector time_evolve(const Eigen::MatrixXd& h, const StateVector& psi0, double t);

/// <psi|H|psi> in MHz.
double energy_expectation(const SparseOperator& h, const StateVector& psi);

/// The all-s basis state of `basis`.
StateVector all_s_state(const SiteBasis& basis);

/// |<all s|psi>|^2.
double retrieval_overlap(const StateVector& psi, const SiteBasis& basis);

}  // namespace rydpol
