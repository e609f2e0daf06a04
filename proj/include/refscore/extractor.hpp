#pragma once
// Star-score extraction from free-text evaluation reports. Pattern-grammar
// only: every accepted form is an explicit regex, so behaviour is auditable.

#include <cmath>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

namespace refscore {

struct ExtractedScore {
    double value = 0.0;
    size_t span_begin = 0; // character offsets of the matched statement
    size_t span_end = 0;
    bool was_fractional = false;
    std::optional<double> rounded_companion;
};

struct CriterionScores {
    std::optional<double> originality;
    std::optional<double> significance;
    std::optional<double> rigour;
};

class NoScoreFound : public std::runtime_error {
public:
    NoScoreFound() : std::runtime_error("no parseable overall score in report") {}
};

class ScoreOutOfRange : public std::runtime_error {
public:
    explicit ScoreOutOfRange(double v)
        : std::runtime_error("extracted score " + std::to_string(v) + " outside [1,4]"),
          value(v) {}
    double value;
};

namespace detail {

// "Overall Score: 2.5*" with tolerance for asterisk decoration and "4 *".
inline const std::regex& overall_score_re() {
    static const std::regex re(R"(Overall\s+Score\s*:?\s*\**\s*([0-9]+(?:\.[0-9]+)?)\s*\**)",
                               std::regex::icase);
    return re;
}

// "(Rounded to 3*)" / ", which rounds to 3*" in the tail of the statement.
inline const std::regex& rounded_re() {
    static const std::regex re(R"((?:Rounded\s+to|rounds\s+to)\s*:?\s*\**\s*([0-9]+(?:\.[0-9]+)?)\s*\*)",
                               std::regex::icase);
    return re;
}

inline bool is_whole(double v) { return v == std::floor(v); }

} // namespace detail

// Returns the last overall-score statement in the report; when the statement
// carries both a fractional score and its rounding, the fractional one wins.
inline ExtractedScore extract_overall_score(const std::string& text) {
    auto begin = std::sregex_iterator(text.begin(), text.end(), detail::overall_score_re());
    auto end = std::sregex_iterator();
    std::optional<std::smatch> last;
    for (auto it = begin; it != end; ++it)
        last = *it;
    if (!last)
        throw NoScoreFound();

    double value = std::stod((*last)[1].str());
    size_t stmt_begin = static_cast<size_t>(last->position(0));
    size_t stmt_end = stmt_begin + static_cast<size_t>(last->length(0));

    // The rounding clause, when present, sits on the same statement: scan a
    // short window after the number, stopping at the end of the line.
    std::optional<double> companion;
    size_t window_end = text.find('\n', stmt_end);
    if (window_end == std::string::npos)
        window_end = text.size();
    window_end = std::min(window_end, stmt_end + 80);
    std::string tail = text.substr(stmt_end, window_end - stmt_end);
    std::smatch m;
    if (std::regex_search(tail, m, detail::rounded_re())) {
        double rounded = std::stod(m[1].str());
        if (!detail::is_whole(value) && detail::is_whole(rounded))
            companion = rounded;
        stmt_end += static_cast<size_t>(m.position(0)) + static_cast<size_t>(m.length(0));
    }

    if (value < 1.0 || value > 4.0)
        throw ScoreOutOfRange(value);

    ExtractedScore s;
    s.value = value;
    s.span_begin = stmt_begin;
    s.span_end = stmt_end;
    s.was_fractional = !detail::is_whole(value);
    s.rounded_companion = companion;
    return s;
}

namespace detail {

inline std::optional<double> criterion_score(const std::string& text, const char* name) {
    // Heading-like line: optional */#/digit decoration, then the criterion
    // name, then a star score in parentheses or after a colon on that line.
    std::string pattern = std::string(R"((?:^|\n)[ \t]*[*#]*[ \t]*(?:[0-9]+[ \t]*[.)][ \t]*)?()") +
                          name +
                          R"()\b[^\n]*?(?:\(\s*([0-9]+(?:\.[0-9]+)?)\s*\*|:\s*\**\s*([0-9]+(?:\.[0-9]+)?)\s*\*))";
    std::regex re(pattern, std::regex::icase);
    std::smatch m;
    if (!std::regex_search(text, m, re))
        return std::nullopt;
    std::string num = m[2].matched ? m[2].str() : m[3].str();
    double v = std::stod(num);
    if (v < 1.0 || v > 4.0)
        return std::nullopt;
    return v;
}

} // namespace detail

inline CriterionScores extract_criterion_scores(const std::string& text) {
    CriterionScores c;
    c.originality = detail::criterion_score(text, "Originality");
    c.significance = detail::criterion_score(text, "Significance");
    c.rigour = detail::criterion_score(text, "Rigour");
    return c;
}

struct ExtractionRow {
    std::string article_id;
    int rep_index = 0;
    ExtractedScore score;
};

struct ExtractionFailure {
    std::string article_id;
    int rep_index = 0;
    std::string reason;
};

struct ExtractionBatch {
    std::vector<ExtractionRow> rows;
    std::vector<ExtractionFailure> failures;
};

} // namespace refscore
