#include <cmath>
#include <random>

#include "doctest.h"
#include "sicut/infotheory.hpp"
#include "sicut/statistics.hpp"
#include "../support/oracles.hpp"

using namespace sicut;

namespace {

Dataset column(std::vector<double> values, AttributeType type = AttributeType::real) {
    return Dataset({{"v", type}}, std::move(values));
}

const RealStat& real(const AttributeStatistics& s) { return std::get<RealStat>(s); }
const BooleanStat& boolean(const AttributeStatistics& s) { return std::get<BooleanStat>(s); }

}  // namespace

TEST_CASE("dataset rejects malformed input") {
    CHECK_THROWS_AS(Dataset({{"a", AttributeType::real}}, {1.0}), Error);
    CHECK_THROWS_AS(Dataset({{"a", AttributeType::real}}, {1.0, NAN}), Error);
    CHECK_THROWS_AS(Dataset({{"a", AttributeType::boolean}}, {0.0, 2.0}), Error);
    CHECK_THROWS_AS(Dataset({}, {}), Error);
    CHECK_NOTHROW(Dataset({{"a", AttributeType::boolean}}, {0.0, 1.0}));
}

TEST_CASE("prior of a constant real column uses the absolute floor") {
    const auto data = column({5.0, 5.0, 5.0, 5.0});
    const auto prior = fit_prior(data, 1e-4);
    CHECK(real(prior.statistics[0]).mean == 5.0);
    CHECK(real(prior.statistics[0]).stdev == doctest::Approx(std::sqrt(1e-12)).epsilon(1e-12));
}

TEST_CASE("prior of an all-zero boolean column is clamped") {
    const auto data = column(std::vector<double>(100, 0.0), AttributeType::boolean);
    const auto prior = fit_prior(data, 1e-4);
    CHECK(boolean(prior.statistics[0]).frequency == doctest::Approx(1.0 / 200.0).epsilon(1e-15));
}

TEST_CASE("prior uses population moments") {
    const auto data = column({0.0, 1.0, 2.0, 3.0});
    const auto prior = fit_prior(data, 1e-4);
    CHECK(real(prior.statistics[0]).mean == doctest::Approx(1.5));
    CHECK(real(prior.statistics[0]).stdev == doctest::Approx(std::sqrt(1.25)).epsilon(1e-14));
    CHECK_THROWS_AS(fit_prior(data, 0.0), Error);
}

TEST_CASE("cluster statistics") {
    const Dataset data({{"r", AttributeType::real}, {"b", AttributeType::boolean}},
                       {1.0, 0.0, 3.0, 0.0, 7.0, 1.0, -2.0, 1.0});
    const auto prior = fit_prior(data, 1e-4);
    const std::vector<std::size_t> attrs{0, 1};

    SUBCASE("all points reproduce the prior") {
        const std::vector<std::size_t> everyone{0, 1, 2, 3};
        const auto stats = fit_cluster_statistics(data, prior, everyone, attrs);
        CHECK(real(stats[0]).mean == doctest::Approx(real(prior.statistics[0]).mean).epsilon(1e-14));
        CHECK(real(stats[0]).stdev == doctest::Approx(real(prior.statistics[0]).stdev).epsilon(1e-14));
        CHECK(boolean(stats[1]).frequency == boolean(prior.statistics[1]).frequency);
    }
    SUBCASE("singleton gets the variance floor") {
        const std::vector<std::size_t> one{1};
        const auto stats = fit_cluster_statistics(data, prior, one, attrs);
        CHECK(real(stats[0]).mean == doctest::Approx(3.0).epsilon(1e-14));
        const double global = 10.6875;
        CHECK(real(stats[0]).stdev == doctest::Approx(std::sqrt(1e-4 * global)).epsilon(1e-9));
    }
    SUBCASE("two booleans give one half") {
        const std::vector<std::size_t> pair{1, 2};
        const auto stats = fit_cluster_statistics(data, prior, pair, attrs);
        CHECK(boolean(stats[1]).frequency == 0.5);
    }
    SUBCASE("point order does not matter") {
        const std::vector<std::size_t> a{0, 2, 3};
        const std::vector<std::size_t> b{3, 0, 2};
        const auto sa = fit_cluster_statistics(data, prior, a, attrs);
        const auto sb = fit_cluster_statistics(data, prior, b, attrs);
        CHECK(real(sa[0]).mean == real(sb[0]).mean);
        CHECK(real(sa[0]).stdev == real(sb[0]).stdev);
    }
    SUBCASE("empty cluster is degenerate") {
        const std::vector<std::size_t> none;
        try {
            fit_cluster_statistics(data, prior, none, attrs);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::degenerate_cluster);
        }
    }
}

TEST_CASE("cluster statistics agree with two-pass moments") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> unit(10.0, 3.0);
    std::vector<double> values;
    for (int i = 0; i < 500; ++i) {
        values.push_back(unit(rng));
    }
    const auto data = column(values);
    const auto prior = fit_prior(data, 1e-4);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < 500; i += 3) {
        rows.push_back(i);
    }
    const std::vector<std::size_t> attrs{0};
    const auto stats = fit_cluster_statistics(data, prior, rows, attrs);
    const auto expected = oracle::raw_stat(data, rows, 0);
    CHECK(real(stats[0]).mean == doctest::Approx(expected.a).epsilon(1e-12));
    CHECK(real(stats[0]).stdev == doctest::Approx(expected.b).epsilon(1e-10));
}

TEST_CASE("kl_bernoulli examples") {
    CHECK(kl_bernoulli(0.3, 0.3) == 0.0);
    CHECK(kl_bernoulli(0.5, 0.25) == doctest::Approx(0.5 * std::log2(2.0) + 0.5 * std::log2(2.0 / 3.0)).epsilon(1e-14));
    CHECK(kl_bernoulli(0.5, 0.25) == doctest::Approx(0.20752).epsilon(1e-4));
    CHECK(kl_bernoulli(0.9, 0.1) == doctest::Approx(0.8 * std::log2(9.0)).epsilon(1e-14));
    CHECK(kl_bernoulli(0.9, 0.1) == doctest::Approx(2.53594).epsilon(1e-5));
    CHECK_THROWS_AS(kl_bernoulli(0.0, 0.5), Error);
    CHECK_THROWS_AS(kl_bernoulli(0.5, 1.0), Error);
}

TEST_CASE("kl_gaussian examples") {
    CHECK(kl_gaussian(2.5, 0.7, 2.5, 0.7) == 0.0);
    CHECK(kl_gaussian(1, 1, 0, 1) == doctest::Approx(0.5 / std::log(2.0)).epsilon(1e-14));
    CHECK(kl_gaussian(1, 1, 0, 1) == doctest::Approx(0.72135).epsilon(1e-5));
    CHECK(kl_gaussian(0, 2, 0, 1) == doctest::Approx((-std::log(2.0) + 2.0 - 0.5) / std::log(2.0)).epsilon(1e-14));
    CHECK(kl_gaussian(0, 2, 0, 1) == doctest::Approx(1.16404).epsilon(1e-5));
    CHECK_THROWS_AS(kl_gaussian(0, 0, 0, 1), Error);
    CHECK_THROWS_AS(kl_gaussian(0, 1, 0, -1), Error);
}

TEST_CASE("kl_gaussian agrees with numerical integration") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> mu(-10.0, 10.0);
    std::uniform_real_distribution<double> sigma(0.1, 10.0);
    for (int i = 0; i < 25; ++i) {
        const double m1 = mu(rng), s1 = sigma(rng), m0 = mu(rng), s0 = sigma(rng);
        CHECK(kl_gaussian(m1, s1, m0, s0) == doctest::Approx(oracle::kl_gaussian_numeric(m1, s1, m0, s0)).epsilon(1e-6));
    }
}

TEST_CASE("kl is non-negative") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> freq(0.01, 0.99);
    std::uniform_real_distribution<double> mu(-10.0, 10.0);
    std::uniform_real_distribution<double> sigma(0.1, 10.0);
    for (int i = 0; i < 1000; ++i) {
        CHECK(kl_bernoulli(freq(rng), freq(rng)) >= 0.0);
        CHECK(kl_gaussian(mu(rng), sigma(rng), mu(rng), sigma(rng)) >= 0.0);
    }
}

TEST_CASE("pattern information scales with cluster size") {
    const Dataset data({{"b", AttributeType::boolean}}, std::vector<double>(40, 0.0));
    PriorModel prior = fit_prior(data, 1e-4);
    prior.statistics[0] = BooleanStat{0.25};
    BiclusterPattern p;
    for (std::size_t i = 0; i < 10; ++i) {
        p.points.push_back(i);
    }
    p.attributes = {0};
    p.statistics = {BooleanStat{0.5}};
    CHECK(pattern_information(p, prior) == doctest::Approx(2.0752).epsilon(1e-4));
}

TEST_CASE("description complexity") {
    CHECK(description_complexity(0.0, 250.0, 1.6) == 250.0);
    CHECK(description_complexity(10.0, 250.0, 1.6) == doctest::Approx(250.0 + std::pow(10.0, 1.6)).epsilon(1e-14));
    CHECK(description_complexity(10.0, 250.0, 1.6) == doctest::Approx(289.81).epsilon(1e-4));
    CHECK(description_complexity(7.0, 0.0, 1.0) == 7.0);

    const Dataset data({{"r", AttributeType::real}, {"b", AttributeType::boolean}}, {0.0, 0.0, 1.0, 1.0});
    std::vector<BiclusterPattern> patterns(2);
    patterns[0].attributes = {0, 1};
    patterns[1].attributes = {1};
    CHECK(description_complexity(patterns, data, 0.0, 1.0) == 4.0);
}

TEST_CASE("subjective interestingness") {
    const Dataset data({{"r", AttributeType::real}, {"b", AttributeType::boolean}},
                       {0.0, 0.0, 1.0, 1.0, 5.0, 1.0, 6.0, 0.0});
    const auto prior = fit_prior(data, 1e-4);
    Hyperparameters hp;

    SUBCASE("one cluster over everything scores zero") {
        BiclusterPattern p;
        p.points = {0, 1, 2, 3};
        p.attributes = {0, 1};
        p.statistics = fit_cluster_statistics(data, prior, p.points, p.attributes);
        const std::vector<BiclusterPattern> patterns{p};
        const auto score = subjective_interestingness(patterns, data, prior, hp);
        CHECK(score.information == doctest::Approx(0.0));
        CHECK(score.si == doctest::Approx(0.0));
    }
    SUBCASE("non-partition is rejected") {
        BiclusterPattern p;
        p.points = {0, 1};
        p.attributes = {0};
        p.statistics = fit_cluster_statistics(data, prior, p.points, p.attributes);
        const std::vector<BiclusterPattern> patterns{p};
        CHECK_THROWS_AS(subjective_interestingness(patterns, data, prior, hp), Error);
    }
    SUBCASE("ratio of information to complexity") {
        std::vector<BiclusterPattern> patterns(2);
        patterns[0].points = {0, 1};
        patterns[1].points = {2, 3};
        for (auto& p : patterns) {
            p.attributes = {0};
            p.statistics = fit_cluster_statistics(data, prior, p.points, p.attributes);
        }
        const auto score = subjective_interestingness(patterns, data, prior, hp);
        const auto info = oracle::information_table(data, {{0, 1}, {2, 3}});
        CHECK(score.information == doctest::Approx(info[0][0] + info[1][0]).epsilon(1e-12));
        CHECK(score.complexity == doctest::Approx(250.0 + std::pow(4.0, 1.6)).epsilon(1e-14));
        CHECK(score.si == doctest::Approx(score.information / score.complexity).epsilon(1e-14));
    }
}

TEST_CASE("hyperparameter validation") {
    Hyperparameters hp;
    CHECK_NOTHROW(hp.validate());
    hp.alpha = -1.0;
    CHECK_THROWS_AS(hp.validate(), Error);
    hp.alpha = 0.0;
    hp.beta = 0.5;
    CHECK_THROWS_AS(hp.validate(), Error);
    hp.beta = 1.0;
    hp.time_budget_ms = 0;
    CHECK_THROWS_AS(hp.validate(), Error);
}

TEST_CASE("linkage names round-trip") {
    for (auto l : {Linkage::single, Linkage::complete, Linkage::average}) {
        CHECK(parse_linkage(to_string(l)) == l);
    }
    CHECK_THROWS_AS(parse_linkage("ward"), Error);
}
