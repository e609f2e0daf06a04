#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "refscore/stats.hpp"
#include "test_helpers.hpp"

using namespace refscore;

namespace {

// Independent Spearman oracle: explicit rank table (count-based average
// ranks) and the direct Pearson sum formulas.
double oracle_rank(const std::vector<double>& v, size_t i) {
    size_t less = 0, equal = 0;
    for (double x : v) {
        if (x < v[i])
            ++less;
        else if (x == v[i])
            ++equal;
    }
    return double(less) + (double(equal) - 1.0) / 2.0 + 1.0;
}

double oracle_spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    std::vector<double> rx(n), ry(n);
    for (size_t i = 0; i < n; ++i) {
        rx[i] = oracle_rank(x, i);
        ry[i] = oracle_rank(y, i);
    }
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += rx[i];
        sy += ry[i];
        sxx += rx[i] * rx[i];
        syy += ry[i] * ry[i];
        sxy += rx[i] * ry[i];
    }
    double num = double(n) * sxy - sx * sy;
    double den = std::sqrt((double(n) * sxx - sx * sx) * (double(n) * syy - sy * sy));
    return num / den;
}

bool constant(const std::vector<double>& v) {
    for (double x : v)
        if (x != v[0])
            return false;
    return true;
}

} // namespace

TEST_CASE("spearman on perfect monotone data") {
    CHECK(spearman({1, 2, 3}, {10, 20, 30}) == Catch::Approx(1.0).margin(1e-12));
    CHECK(spearman({1, 2, 3}, {30, 20, 10}) == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("spearman with ties matches the oracle") {
    std::vector<double> x{1, 2, 2, 3}, y{1, 3, 2, 4};
    CHECK(spearman(x, y) == Catch::Approx(oracle_spearman(x, y)).margin(1e-12));
}

TEST_CASE("spearman rejects degenerate input") {
    CHECK_THROWS_AS(spearman({1, 2}, {1, 2}), DegenerateInput);
    CHECK_THROWS_AS(spearman({1, 1, 1}, {1, 2, 3}), DegenerateInput);
    CHECK_THROWS_AS(spearman({1, 2, 3}, {5, 5, 5}), DegenerateInput);
}

TEST_CASE("spearman equals the oracle on random tied instances") {
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<int> size(3, 20), value(1, 5);
    int done = 0;
    while (done < 1000) {
        size_t n = size_t(size(gen));
        std::vector<double> x(n), y(n);
        for (size_t i = 0; i < n; ++i) {
            x[i] = value(gen);
            y[i] = value(gen);
        }
        if (constant(x) || constant(y))
            continue;
        INFO("n=" << n);
        REQUIRE(spearman(x, y) == Catch::Approx(oracle_spearman(x, y)).margin(1e-12));
        ++done;
    }
}

TEST_CASE("spearman is symmetric and rank-invariant") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> value(0.1, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        size_t n = 12;
        std::vector<double> x(n), y(n);
        for (size_t i = 0; i < n; ++i) {
            x[i] = value(gen);
            y[i] = value(gen);
        }
        double rho = spearman(x, y);
        CHECK(rho >= -1.0);
        CHECK(rho <= 1.0);
        CHECK(spearman(y, x) == Catch::Approx(rho).margin(1e-12));

        auto affine = x, expd = x, cubed = x;
        for (size_t i = 0; i < n; ++i) {
            affine[i] = 3.0 * x[i] + 7.0;
            expd[i] = std::exp(x[i]);
            cubed[i] = x[i] * x[i] * x[i];
        }
        CHECK(spearman(affine, y) == Catch::Approx(rho).margin(1e-12));
        CHECK(spearman(expd, y) == Catch::Approx(rho).margin(1e-12));
        CHECK(spearman(cubed, y) == Catch::Approx(rho).margin(1e-12));
    }
}

TEST_CASE("bootstrap is seed-deterministic with ordered bounds") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> noise(-1, 1);
    std::vector<double> x(50), y(50);
    for (size_t i = 0; i < 50; ++i) {
        x[i] = double(i);
        y[i] = double(i) + 10.0 * noise(gen);
    }
    auto a = bootstrap_ci(x, y, 500, 0.05, 42);
    auto b = bootstrap_ci(x, y, 500, 0.05, 42);
    CHECK(a.low == b.low);
    CHECK(a.high == b.high);
    CHECK(a.low <= a.high);
    CHECK(a.low >= -1.0);
    CHECK(a.high <= 1.0);

    auto c = bootstrap_ci(x, y, 500, 0.05, 43);
    CHECK((c.low != a.low || c.high != a.high));
}

TEST_CASE("bootstrap rejects degenerate and undersized input") {
    CHECK_THROWS_AS(bootstrap_ci({1, 2, 3}, {5, 5, 5}, 500, 0.05, 1), DegenerateInput);
    CHECK_THROWS_AS(bootstrap_ci({1, 2}, {1, 2}, 500, 0.05, 1), DegenerateInput);
    CHECK_THROWS_AS(bootstrap_ci({1, 2, 3}, {1, 2, 3}, 50, 0.05, 1), std::invalid_argument);
}

TEST_CASE("aggregate means") {
    ScoreTable t{{"a", {3, 3, 3, 3, 3}}, {"b", {2, 3, 3, 3, 3}}, {"c", {2, 4}}};
    auto sets = aggregate(t, 0);
    REQUIRE(sets.size() == 3);
    CHECK(sets[0].mean == Catch::Approx(3.0).margin(1e-12));
    CHECK(sets[1].mean == Catch::Approx(2.8).margin(1e-12));

    auto first_only = aggregate(t, 1);
    CHECK(first_only[2].mean == Catch::Approx(2.0).margin(1e-12));

    for (const auto& s : sets) {
        double lo = *std::min_element(s.rep_scores.begin(), s.rep_scores.end());
        double hi = *std::max_element(s.rep_scores.begin(), s.rep_scores.end());
        CHECK(s.mean >= lo);
        CHECK(s.mean <= hi);
    }
}

TEST_CASE("aggregate rejects articles with too few reps") {
    ScoreTable t{{"a", {3}}};
    CHECK_THROWS(aggregate(t, 2));
}

TEST_CASE("identical fraction") {
    ScoreTable t{{"a", {3, 3, 3, 3, 3}}, {"b", {2, 3, 3, 3, 3}}};
    CHECK(identical_fraction(t) == Catch::Approx(0.5));

    ScoreTable singles{{"a", {2}}, {"b", {4}}};
    CHECK(identical_fraction(singles) == 1.0);

    ScoreTable ragged{{"a", {1, 2}}, {"b", {1}}};
    CHECK_THROWS(identical_fraction(ragged));
}

TEST_CASE("correlate_by_uoa computes and skips per group") {
    std::vector<Article> arts;
    std::vector<ScoreSet> sets;
    // UoA 1: scores equal proxies -> rho 1.
    for (int i = 0; i < 10; ++i) {
        auto a = testutil::make_article("p" + std::to_string(i), 1, "abc", 1.5 + 0.2 * i);
        arts.push_back(a);
        sets.push_back({a.id, {1.5 + 0.2 * i}, 1.5 + 0.2 * i});
    }
    // UoA 2: only two articles -> skipped.
    for (int i = 0; i < 2; ++i) {
        auto a = testutil::make_article("q" + std::to_string(i), 2, "abc", 2.0 + i);
        arts.push_back(a);
        sets.push_back({a.id, {3.0}, 3.0});
    }
    auto corpus = testutil::make_corpus(std::move(arts));
    auto out = correlate_by_uoa(sets, corpus, 200, 0.05, 7);
    REQUIRE(out.results.size() == 1);
    CHECK(out.results[0].uoa == 1);
    CHECK(out.results[0].n == 10);
    CHECK(out.results[0].rho == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(out.skipped.size() == 1);
    CHECK(out.skipped[0].first == 2);
}

TEST_CASE("iteration curve is flat when all reps are identical") {
    std::vector<Article> arts;
    ScoreTable scores;
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> proxy(1.0, 4.0);
    std::uniform_int_distribution<int> star(1, 4);
    for (int i = 0; i < 30; ++i) {
        auto a = testutil::make_article("a" + std::to_string(i), 1, "abc", proxy(gen));
        arts.push_back(a);
        double s = star(gen);
        scores[a.id] = {s, s, s, s, s};
    }
    auto corpus = testutil::make_corpus(std::move(arts));
    auto curve = iteration_curve(scores, corpus, MainPanel::A, 5);
    REQUIRE(curve.points.size() == 5);
    double first = curve.points.at(1);
    for (const auto& [k, rho] : curve.points)
        CHECK(rho == Catch::Approx(first).margin(1e-12));
}

TEST_CASE("weighted mean rho") {
    std::vector<CorrelationResult> rs(2);
    rs[0].rho = 0.1;
    rs[0].n = 1;
    rs[1].rho = 0.3;
    rs[1].n = 3;
    CHECK(weighted_mean_rho(rs) == Catch::Approx(0.25).margin(1e-12));

    rs[0].n = rs[1].n = 5;
    CHECK(weighted_mean_rho(rs) == Catch::Approx(0.2).margin(1e-12));
    double lo = std::min(rs[0].rho, rs[1].rho), hi = std::max(rs[0].rho, rs[1].rho);
    double wm = weighted_mean_rho(rs);
    CHECK(wm >= lo);
    CHECK(wm <= hi);

    CHECK_THROWS(weighted_mean_rho({}));
}

TEST_CASE("strength ratio") {
    CHECK(strength_ratio(0.239, 0.285) == Catch::Approx(83.86).margin(0.01));
    CHECK(strength_ratio(0.239, 0.252) == Catch::Approx(94.84).margin(0.01));
    CHECK(strength_ratio(0.5, 0.5) == Catch::Approx(100.0).margin(1e-12));
    CHECK(format_percentage(strength_ratio(0.5, 0.5)) == "100.0");
    CHECK_THROWS(strength_ratio(0.1, 0.0));
}
