#pragma once
// Rank statistics for the score-validation pipeline: Spearman with average
// ranks, percentile bootstrap CIs, repetition aggregation, iteration curves
// and the cross-model summary arithmetic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "refscore/corpus.hpp"
#include "refscore/protocol.hpp"
#include "refscore/rng.hpp"

namespace refscore {

class DegenerateInput : public std::invalid_argument {
public:
    explicit DegenerateInput(const std::string& what) : std::invalid_argument(what) {}
};

class TooManyDegenerateResamples : public std::runtime_error {
public:
    TooManyDegenerateResamples()
        : std::runtime_error("bootstrap exceeded redraw budget for degenerate resamples") {}
};

struct ScoreSet {
    std::string article_id;
    std::vector<double> rep_scores;
    double mean = 0.0;
};

struct CorrelationResult {
    int uoa = 0;
    size_t n = 0;
    double rho = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    size_t bootstrap_samples = 0;
    uint64_t seed = 0;
};

struct IterationCurve {
    MainPanel panel = MainPanel::A;
    std::map<int, double> points; // k -> rho
};

// Per-(article, rep) score table. Rep indices are dense from 0.
using ScoreTable = std::map<std::string, std::vector<double>>;

namespace detail {

// Average ranks: tied values share the mean of their rank range.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    const size_t n = v.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]])
            ++j;
        double avg = (double(i) + double(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k)
            ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
    double my = std::accumulate(y.begin(), y.end(), 0.0) / double(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return sxy / std::sqrt(sxx * syy);
}

inline bool is_constant(const std::vector<double>& v) {
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i] != v[0])
            return false;
    return true;
}

} // namespace detail

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("spearman: length mismatch");
    if (x.size() < 3)
        throw DegenerateInput("spearman: need at least 3 pairs");
    if (detail::is_constant(x) || detail::is_constant(y))
        throw DegenerateInput("spearman: constant variable");
    return detail::pearson(detail::average_ranks(x), detail::average_ranks(y));
}

inline double spearman(const std::vector<std::pair<double, double>>& pairs) {
    std::vector<double> x, y;
    x.reserve(pairs.size());
    y.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        x.push_back(a);
        y.push_back(b);
    }
    return spearman(x, y);
}

struct BootstrapCi {
    double low = 0.0;
    double high = 0.0;
    size_t redraws = 0; // degenerate resamples that were redrawn
};

// Percentile bootstrap. Each replicate draws from its own substream keyed by
// (seed, replicate index), so the result is independent of evaluation order.
inline BootstrapCi bootstrap_ci(const std::vector<double>& x, const std::vector<double>& y,
                                size_t B = 1000, double alpha = 0.05, uint64_t seed = 0) {
    if (x.size() != y.size())
        throw std::invalid_argument("bootstrap_ci: length mismatch");
    const size_t n = x.size();
    if (n < 3)
        throw DegenerateInput("bootstrap_ci: need at least 3 pairs");
    if (B < 100)
        throw std::invalid_argument("bootstrap_ci: B must be >= 100");
    if (detail::is_constant(x) || detail::is_constant(y))
        throw DegenerateInput("bootstrap_ci: constant variable");

    std::vector<double> rhos(B);
    size_t total_redraws = 0;
    std::vector<double> rx(n), ry(n);
    for (size_t b = 0; b < B; ++b) {
        auto gen = rng::substream(seed, "bootstrap", b);
        std::uniform_int_distribution<size_t> pick(0, n - 1);
        for (;;) {
            for (size_t i = 0; i < n; ++i) {
                size_t j = pick(gen);
                rx[i] = x[j];
                ry[i] = y[j];
            }
            if (!detail::is_constant(rx) && !detail::is_constant(ry))
                break;
            if (++total_redraws > B)
                throw TooManyDegenerateResamples();
        }
        rhos[b] = detail::pearson(detail::average_ranks(rx), detail::average_ranks(ry));
    }
    std::sort(rhos.begin(), rhos.end());
    auto quantile = [&](double p) {
        double h = p * double(B - 1);
        size_t lo = static_cast<size_t>(std::floor(h));
        size_t hi = std::min(lo + 1, B - 1);
        double frac = h - double(lo);
        return rhos[lo] * (1.0 - frac) + rhos[hi] * frac;
    };
    BootstrapCi ci;
    ci.low = quantile(alpha / 2.0);
    ci.high = quantile(1.0 - alpha / 2.0);
    ci.redraws = total_redraws;
    return ci;
}

// Mean over the first k repetition scores per article; k = 0 means all reps.
inline std::vector<ScoreSet> aggregate(const ScoreTable& scores, size_t k = 0) {
    std::vector<ScoreSet> out;
    for (const auto& [id, reps] : scores) {
        size_t use = k == 0 ? reps.size() : k;
        if (reps.size() < use)
            throw std::runtime_error("article '" + id + "' has " + std::to_string(reps.size()) +
                                     " reps, need " + std::to_string(use));
        ScoreSet s;
        s.article_id = id;
        s.rep_scores.assign(reps.begin(), reps.begin() + long(use));
        s.mean = std::accumulate(s.rep_scores.begin(), s.rep_scores.end(), 0.0) / double(use);
        out.push_back(std::move(s));
    }
    return out;
}

struct UoaCorrelations {
    std::vector<CorrelationResult> results;
    std::vector<std::pair<int, std::string>> skipped; // uoa -> reason
};

inline UoaCorrelations correlate_by_uoa(const std::vector<ScoreSet>& score_sets, const Corpus& c,
                                        size_t B = 1000, double alpha = 0.05, uint64_t seed = 0) {
    std::map<std::string, double> means;
    for (const auto& s : score_sets)
        means[s.article_id] = s.mean;

    std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_uoa;
    for (const auto& a : c.articles) {
        if (!a.proxy_score)
            continue;
        auto it = means.find(a.id);
        if (it == means.end())
            continue;
        by_uoa[a.uoa].first.push_back(it->second);
        by_uoa[a.uoa].second.push_back(*a.proxy_score);
    }

    UoaCorrelations out;
    for (const auto& [uoa, xy] : by_uoa) {
        const auto& [x, y] = xy;
        if (x.size() < 3) {
            out.skipped.push_back({uoa, "fewer than 3 scored articles"});
            continue;
        }
        try {
            CorrelationResult r;
            r.uoa = uoa;
            r.n = x.size();
            r.rho = spearman(x, y);
            uint64_t uoa_seed = rng::combine(seed, uint64_t(uoa));
            auto ci = bootstrap_ci(x, y, B, alpha, uoa_seed);
            r.ci_low = ci.low;
            r.ci_high = ci.high;
            r.bootstrap_samples = B;
            r.seed = uoa_seed;
            out.results.push_back(r);
        } catch (const DegenerateInput& e) {
            out.skipped.push_back({uoa, e.what()});
        }
    }
    return out;
}

// Fraction of articles whose repetition scores are all equal.
inline double identical_fraction(const ScoreTable& scores) {
    if (scores.empty())
        throw std::invalid_argument("identical_fraction: empty table");
    size_t reps = scores.begin()->second.size();
    size_t identical = 0;
    for (const auto& [id, v] : scores) {
        if (v.size() != reps)
            throw std::runtime_error("identical_fraction: ragged rep counts at '" + id + "'");
        if (detail::is_constant(v))
            ++identical;
    }
    return double(identical) / double(scores.size());
}

// Correlation as a function of how many repetitions are averaged, pooled
// over the panel's articles. The k=1 point is the mean of the per-rep
// correlations rather than the first rep alone.
inline IterationCurve iteration_curve(const ScoreTable& scores, const Corpus& c, MainPanel panel,
                                      size_t K) {
    std::map<std::string, const Article*> by_id;
    for (const auto& a : c.articles)
        if (a.proxy_score && main_panel(a.uoa) == panel)
            by_id[a.id] = &a;

    std::vector<const std::vector<double>*> reps;
    std::vector<double> proxy;
    for (const auto& [id, v] : scores) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            continue;
        if (v.size() < K)
            throw std::runtime_error("iteration_curve: article '" + id + "' has fewer than K reps");
        reps.push_back(&v);
        proxy.push_back(*it->second->proxy_score);
    }
    if (reps.size() < 3)
        throw DegenerateInput("iteration_curve: fewer than 3 articles in panel");

    IterationCurve curve;
    curve.panel = panel;
    {
        double sum = 0;
        for (size_t r = 0; r < K; ++r) {
            std::vector<double> x(reps.size());
            for (size_t i = 0; i < reps.size(); ++i)
                x[i] = (*reps[i])[r];
            sum += spearman(x, proxy);
        }
        curve.points[1] = sum / double(K);
    }
    for (size_t k = 2; k <= K; ++k) {
        std::vector<double> x(reps.size());
        for (size_t i = 0; i < reps.size(); ++i)
            x[i] = std::accumulate(reps[i]->begin(), reps[i]->begin() + long(k), 0.0) / double(k);
        curve.points[int(k)] = spearman(x, proxy);
    }
    return curve;
}

inline double weighted_mean_rho(const std::vector<CorrelationResult>& results) {
    if (results.empty())
        throw std::invalid_argument("weighted_mean_rho: empty input");
    double num = 0, den = 0;
    for (const auto& r : results) {
        if (r.n == 0)
            throw std::invalid_argument("weighted_mean_rho: zero-sized group");
        num += double(r.n) * r.rho;
        den += double(r.n);
    }
    return num / den;
}

// 100*a/b as a percentage with one decimal place.
inline double strength_ratio(double rho_a, double rho_b) {
    if (rho_b == 0.0)
        throw std::invalid_argument("strength_ratio: zero denominator");
    return 100.0 * rho_a / rho_b;
}

inline std::string format_percentage(double pct) {
    double tenths = std::floor(pct * 10.0 + 0.5);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", tenths / 10.0);
    return buf;
}

} // namespace refscore
