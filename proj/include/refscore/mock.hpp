#pragma once
// Deterministic mock scorer for offline runs and simulation. Scores are a
// noisy monotone function of the article's proxy score; with probability
// `agreement` all repetitions for an article agree exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "refscore/corpus.hpp"
#include "refscore/report_store.hpp"
#include "refscore/rng.hpp"

namespace refscore {

struct MockProfile {
    double agreement = 0.957;        // probability all repetitions match
    double latent_noise = 0.5;       // half-width of latent quality noise
    std::optional<int> fixed_score;  // short-circuit: always this star level
};

namespace mock_detail {

inline double unit(const std::string& id, const char* label, uint64_t seed, uint64_t extra = 0) {
    return rng::to_unit(rng::combine(rng::hash_str(id, rng::hash_str(label, seed)), extra));
}

} // namespace mock_detail

// The star score the mock assigns to (article, rep). Pure in (id, proxy,
// rep, seed, profile).
inline int mock_score(const Article& a, int rep, uint64_t seed, const MockProfile& profile) {
    if (profile.fixed_score)
        return *profile.fixed_score;
    double latent = a.proxy_score ? *a.proxy_score
                                  : 1.0 + 3.0 * mock_detail::unit(a.id, "latent-base", seed);
    double noise = (mock_detail::unit(a.id, "latent-noise", seed) - 0.5) * 2.0 *
                   profile.latent_noise;
    int base = int(std::lround(std::clamp(latent + noise, 1.0, 4.0)));
    base = std::clamp(base, 1, 4);

    bool stable = mock_detail::unit(a.id, "agreement", seed) < profile.agreement;
    if (stable)
        return base;
    double u = mock_detail::unit(a.id, "jitter", seed, uint64_t(rep));
    int delta;
    if (base == 1)
        delta = u < 0.5 ? 0 : 1;
    else if (base == 4)
        delta = u < 0.5 ? -1 : 0;
    else
        delta = u < 1.0 / 3.0 ? -1 : (u < 2.0 / 3.0 ? 0 : 1);
    return std::clamp(base + delta, 1, 4);
}

// Emits a synthetic report in one of the structural variants seen in real
// report corpora. Byte-identical for identical inputs.
inline RawReport mock_generate(const Article& a, int rep, uint64_t seed,
                               const MockProfile& profile) {
    int score = mock_score(a, rep, seed, profile);
    int variant = int(mock_detail::unit(a.id, "variant", seed, uint64_t(rep)) * 20.0);

    static const char* descriptors[] = {"Nationally Relevant", "Internationally Relevant",
                                        "Internationally Excellent", "World Leading"};
    const char* descriptor = descriptors[score - 1];
    std::string n = std::to_string(score);

    std::string text;
    if (variant == 19) {
        // Rare opener variant.
        text += "## Evaluation of: \"" + a.title + "\"\n\n";
    } else if (variant >= 14) {
        text += "Here's an assessment of the article \"" + a.title + "\".\n\n";
    } else {
        text += "## Assessment of: \"" + a.title + "\"\n\n";
    }

    if (variant % 3 == 0)
        text += "****Overall Score: " + n + "*****\n\n";
    else if (variant % 3 == 1)
        text += "**Overall Score: " + n + "* (" + descriptor + ")**\n\n";
    else
        text += "Overall score: " + n + "*\n\n";

    text += "**Justification:** The assessment below considers the three quality "
            "dimensions in turn.\n\n";
    text += "**1. Originality (" + n + "*):**\n\nThe contribution is assessed at the " + n +
            "* level for originality.\n\n";
    text += "**2. Significance (" + n + "*):**\n\nThe likely influence of the work places it "
            "at the " + n + "* level.\n\n";
    text += "**3. Rigour (" + n + "*):**\n\nThe methods and reporting support a " + n +
            "* rating for rigour.\n\n";
    text += "**In conclusion,** the article merits an overall score of " + n + "*.\n";

    RawReport r;
    r.article_id = a.id;
    r.rep_index = rep;
    r.model_id = "mock";
    r.text = std::move(text);
    r.created_at = 0;
    r.attempt_count = 1;
    return r;
}

} // namespace refscore
