#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pathwise/errors.hpp"
#include "pathwise/process.hpp"
#include "pathwise/rng.hpp"
#include "pathwise/stats.hpp"

#include <cmath>
#include <vector>

using namespace pathwise;

TEST_CASE("realized die sample: u=24, m=4, v_sample=22") {
    const std::vector<double> path{1, 5, 6, 6, 4, 2};
    const auto st = path_stats(path, lump_sum(6), 3.5);
    CHECK(st.u == 24.0);
    CHECK(st.m == 4.0);
    CHECK(st.v_sample == 22.0);
    CHECK(st.u_norm == 4.0);                // U/t for lump-sum
    CHECK(st.v_mu == doctest::Approx(6.25 + 2.25 + 6.25 + 6.25 + 0.25 + 2.25));
}

TEST_CASE("constant path at mu has zero deviation") {
    const double mu = 0.7;
    const std::vector<double> path(9, mu);
    const auto s = dca(9);
    const auto st = path_stats(path, s, mu);
    CHECK(st.v_mu == 0.0);
    CHECK(st.u == doctest::Approx(mu * measures(s).e1).epsilon(1e-15));
}

TEST_CASE("hand-evaluated dca(2) example") {
    const std::vector<double> path{1.0, 2.0};
    const auto st = path_stats(path, dca(2), 0.0);
    CHECK(st.u == doctest::Approx(2.5).epsilon(1e-15));   // 0.5*1 + 1*2
    CHECK(st.v_mu == doctest::Approx(4.25).epsilon(1e-15)); // 0.25*1 + 1*4
}

TEST_CASE("length mismatch is a validation error") {
    const std::vector<double> path{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(path_stats(path, lump_sum(2), 0.0), validation_error);
}

TEST_CASE("u is linear in the path under lump-sum") {
    rng::Stream s(5, 0);
    const int t = 17;
    std::vector<double> p(t);
    std::vector<double> q(t);
    std::vector<double> pq(t);
    for (int i = 0; i < t; ++i) {
        p[size_t(i)] = s.gaussian();
        q[size_t(i)] = s.gaussian();
        pq[size_t(i)] = p[size_t(i)] + q[size_t(i)];
    }
    const auto sched = lump_sum(t);
    const double lhs = path_stats(pq, sched, 0.0).u;
    const double rhs = path_stats(p, sched, 0.0).u + path_stats(q, sched, 0.0).u;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("v_sample equals (t-1) times the textbook unbiased variance") {
    rng::Stream s(6, 0);
    const int t = 101;
    std::vector<double> path(t);
    for (auto& x : path) x = 2.0 + 0.5 * s.gaussian();

    // Independent two-pass implementation.
    double mean = 0.0;
    for (double x : path) mean += x;
    mean /= t;
    double ss = 0.0;
    for (double x : path) ss += (x - mean) * (x - mean);
    const double unbiased = ss / (t - 1);

    const auto st = path_stats(path, lump_sum(t), 2.0);
    CHECK(st.v_sample == doctest::Approx((t - 1) * unbiased).epsilon(1e-12));
}

TEST_CASE("v_sample is minimal among constant centers") {
    rng::Stream s(7, 0);
    const int t = 40;
    std::vector<double> path(t);
    for (auto& x : path) x = s.gaussian();
    const auto st = path_stats(path, lump_sum(t), 0.0);
    for (double c : {-1.0, -0.25, 0.1, 0.5, 2.0}) {
        double ss = 0.0;
        for (double x : path) ss += (x - c) * (x - c);
        CHECK(st.v_sample <= ss + 1e-12);
    }
}

TEST_CASE("ensemble averages") {
    std::vector<PathStats> same(5);
    for (auto& st : same) st = PathStats{3.0, 1.0, 0, 0, 0, 0};
    const auto mv = ensemble_average(same, PathField::cumulative_return);
    CHECK(mv.mean == 3.0);
    CHECK(mv.variance == 0.0);

    std::vector<PathStats> two(2);
    two[0].u = 0.0;
    two[1].u = 2.0;
    const auto mv2 = ensemble_average(two, PathField::cumulative_return);
    CHECK(mv2.mean == 1.0);
    CHECK(mv2.variance == 2.0);

    std::vector<PathStats> one(1);
    CHECK_THROWS_AS(ensemble_average(one, PathField::cumulative_return), validation_error);
    CHECK_THROWS_AS(ensemble_average(std::vector<PathStats>{}, PathField::cumulative_return),
                    validation_error);
}

TEST_CASE("die ensemble mean of u concentrates on 21") {
    const auto die = ProcessSpec::fair_die();
    const auto sched = lump_sum(6);
    const int n = 100000;
    std::vector<PathStats> stats;
    stats.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        rng::Stream s(2718, i);
        stats.push_back(path_stats(sample_path(die, 6, s), sched, 3.5));
    }
    const auto mv = ensemble_average(stats, PathField::cumulative_return);
    CHECK(std::abs(mv.mean - 21.0) < 4.0 * std::sqrt(17.5 / n));
    CHECK(mv.variance == doctest::Approx(17.5).epsilon(0.05));
}
