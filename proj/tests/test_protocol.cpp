#include "doctest.h"

#include <cmath>

#include "rydpol/collective.hpp"
#include "rydpol/protocol.hpp"

using namespace rydpol;
using doctest::Approx;

namespace {

ExperimentConfig unit_cloud() {
    ExperimentConfig c;
    c.cloud_wr = 1.0;
    c.cloud_wz = 1.0;
    return c;
}

}  // namespace

TEST_CASE("cloud sampling") {
    const CloudSample cloud = sample_positions(unit_cloud(), 100000, 7);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero(), sq = Eigen::Vector3d::Zero();
    for (const auto& p : cloud.positions) {
        mean += p;
        sq += p.cwiseProduct(p);
    }
    mean /= 1e5;
    for (int a = 0; a < 3; ++a) {
        const double sd = std::sqrt(sq(a) / 1e5 - mean(a) * mean(a));
        CHECK(sd >= 0.99);
        CHECK(sd <= 1.01);
        CHECK(std::abs(mean(a)) < 0.01);
    }
    ExperimentConfig elongated;
    const CloudSample e = sample_positions(elongated, 20000, 3);
    double zz = 0.0, xx = 0.0;
    for (const auto& p : e.positions) {
        zz += p.z() * p.z();
        xx += p.x() * p.x();
    }
    CHECK(std::sqrt(zz / xx) == Approx(elongated.cloud_wz / elongated.cloud_wr).epsilon(0.03));

    CHECK(sample_positions(elongated, 10, 5).positions == sample_positions(elongated, 10, 5).positions);
    CHECK(sample_positions(elongated, 10, 5).positions != sample_positions(elongated, 10, 6).positions);
    CHECK(sample_positions(elongated, 1, 5).positions.size() == 1);
    CHECK_THROWS(sample_positions(elongated, 0, 5));
}

TEST_CASE("blockade limits of the write") {
    const ExperimentConfig c;
    const CloudSample cloud = sample_positions(c, 12, 9);
    const WriteResult one = write_polaritons(cloud, 1e9, 12, 1);
    CHECK(one.n_polaritons == 1);
    const WriteResult all = write_polaritons(cloud, 1e-9, 12, 1);
    CHECK(all.n_polaritons == 12);
    CHECK(all.candidates == 12);
    CHECK(write_polaritons(cloud, 1e-9, 5, 1).n_polaritons == 5);
    CHECK_THROWS(write_polaritons(cloud, 0.0, 5, 1));
}

TEST_CASE("blockade invariants") {
    const ExperimentConfig c;
    const double r_o = optical_blockade_radius(c.pair.c6, c.eit_width);
    for (std::uint64_t s = 0; s < 300; ++s) {
        const CloudSample cloud = sample_positions(c, 20, s, 1);
        const WriteResult w = write_polaritons(cloud, r_o, 20, s);
        CHECK(w.n_polaritons <= w.candidates);
        CHECK(w.n_polaritons >= 1);
        if (w.n_polaritons > 1) CHECK(w.min_pairwise_distance() >= r_o);
        // every rejected candidate is blockaded by an accepted one
        for (const auto& p : cloud.positions) {
            double nearest = 1e300;
            for (const auto& q : w.polariton_positions) nearest = std::min(nearest, (p - q).norm());
            CHECK(nearest < r_o + 1e-12);
        }
    }
}

TEST_CASE("mean polariton number at the default geometry") {
    const ExperimentConfig c;
    const auto shots = run_shots(c, c.pair, 0.0, 0.0, 11, 10000, 0);
    double mean = 0.0;
    for (const auto& s : shots) mean += s.n_polaritons;
    mean /= 1e4;
    CHECK(mean >= 2.5);
    CHECK(mean <= 3.7);
}

TEST_CASE("overlap limits") {
    const std::vector<Position> pos{Position(0, 0, 0), Position(0, 0, 8), Position(0, 1, 17)};
    CHECK(polariton_overlap(pos, -14.3, 30.0, 0.0) == 1.0);
    CHECK(polariton_overlap({}, -14.3, 30.0, 0.1) == 1.0);
    CHECK(polariton_overlap(pos, 0.0, 7.0, 0.05) == Approx(retrieval_probability(3, 2 * constants::kPi * 0.35)).epsilon(1e-10));
    ShotOptions full;
    full.interactions.form = ExchangeForm::full_dipole;
    CHECK(polariton_overlap(pos, 0.0, 7.0, 0.05, full) == Approx(retrieval_probability(3, 2 * constants::kPi * 0.35)).epsilon(1e-10));
    full.max_full_basis_sites = 2;
    CHECK_THROWS_AS(polariton_overlap(pos, -14.3, 7.0, 0.05, full), std::length_error);
}

TEST_CASE("shot simulation") {
    const ExperimentConfig c;
    const auto a = run_shots(c, c.pair, 0.0, 0.0, 5, 500, 1);
    const auto b = run_shots(c, c.pair, 25.0, 0.0, 5, 500, 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].retrieved == b[i].retrieved);
        CHECK(a[i].detected() == b[i].detected());
        CHECK(a[i].retrieved <= a[i].n_polaritons);
        CHECK(a[i].detected_signal <= a[i].retrieved);
    }

    // Without interactions a pi pulse moves every polariton out of s.
    ExperimentConfig bright = c;
    bright.retrieval_efficiency = 1.0;
    PairCoefficients free_pair = c.pair;
    free_pair.c3 = 0.0;
    const double pulse = 0.1;
    const auto open = run_shots(bright, free_pair, 0.0, pulse, 8, 2000, 0);
    const auto pi = run_shots(bright, free_pair, 0.5 / pulse, pulse, 8, 2000, 0);
    CHECK(mean_retrieved(pi).mean <= 0.05 * mean_retrieved(open).mean);

    // With blockade interactions the same pulse leaves much of the signal.
    const auto blocked = run_shots(bright, c.pair, 0.5 / pulse, pulse, 8, 2000, 0);
    CHECK(mean_retrieved(blocked).mean > 0.2 * mean_retrieved(open).mean);

    const auto t1 = run_shots(c, c.pair, 12.0, 0.2, 3, 300, 1);
    const auto t4 = run_shots(c, c.pair, 12.0, 0.2, 3, 300, 4);
    for (std::size_t i = 0; i < t1.size(); ++i) {
        CHECK(t1[i].retrieved == t4[i].retrieved);
        CHECK(t1[i].retrieval_overlap == t4[i].retrieval_overlap);
        CHECK(t1[i].background == t4[i].background);
    }
    CHECK(simulate_shot(c, c.pair, 12.0, 0.2, 3, 17).retrieved == t1[17].retrieved);

    CHECK_THROWS(simulate_shot(c, c.pair, 10.0, c.storage_time + 0.01, 1, 0));
    CHECK_THROWS(simulate_shot(c, c.pair, -1.0, 0.1, 1, 0));
}

TEST_CASE("mean estimates") {
    std::vector<ShotResult> shots(4);
    shots[0].retrieved = 1;
    shots[1].retrieved = 3;
    const MeanEstimate m = mean_retrieved(shots);
    CHECK(m.mean == Approx(1.0));
    CHECK(m.error == Approx(std::sqrt((0.0 + 4.0 + 1.0 + 1.0) / 3.0 / 4.0)));
    CHECK(mean_detected({}).mean == 0.0);
}
