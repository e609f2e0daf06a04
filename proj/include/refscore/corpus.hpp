#pragma once
// Article corpus: ingestion from CSV/JSONL, proxy score attachment,
// per-UoA short-abstract filtering and descriptive statistics.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "refscore/csv.hpp"

namespace refscore {

constexpr int kMinUoa = 1;
constexpr int kMaxUoa = 34;

struct Article {
    std::string id;
    std::string title;
    std::string abstract_text;
    int uoa = 0;
    std::string institution;
    std::optional<double> proxy_score;
    size_t ingest_index = 0; // original position, used for deterministic tie-breaking
};

struct Corpus {
    std::vector<Article> articles;
    std::string source_path;
    std::optional<double> filter_fraction; // set once filter_short_abstracts has run
};

struct RecordError {
    size_t record_index;
    std::string id; // may be empty when the id itself is missing
    std::string message;
};

struct LoadResult {
    Corpus corpus;
    std::vector<RecordError> errors;
};

enum class CorpusFormat { Csv, Jsonl };

inline CorpusFormat format_from_name(const std::string& name) {
    if (name == "csv")
        return CorpusFormat::Csv;
    if (name == "jsonl")
        return CorpusFormat::Jsonl;
    throw std::runtime_error("unknown corpus format: " + name);
}

inline CorpusFormat format_from_path(const std::string& path) {
    auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "jsonl" || ext == "ndjson")
        return CorpusFormat::Jsonl;
    return CorpusFormat::Csv;
}

namespace detail {

inline std::optional<Article> make_article(const std::string& id, const std::string& title,
                                           const std::string& abstract_text,
                                           const std::string& uoa_str,
                                           const std::string& institution, size_t record_index,
                                           std::vector<RecordError>& errors) {
    auto fail = [&](const std::string& msg) {
        errors.push_back({record_index, id, msg});
        return std::nullopt;
    };
    if (id.empty())
        return fail("missing id");
    if (title.empty())
        return fail("missing title");
    if (abstract_text.empty())
        return fail("missing abstract");
    int uoa = 0;
    try {
        size_t pos = 0;
        uoa = std::stoi(uoa_str, &pos);
        if (pos != uoa_str.size())
            throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        return fail("invalid uoa '" + uoa_str + "'");
    }
    if (uoa < kMinUoa || uoa > kMaxUoa)
        return fail("uoa " + std::to_string(uoa) + " outside 1-34");
    Article a;
    a.id = id;
    a.title = title;
    a.abstract_text = abstract_text;
    a.uoa = uoa;
    a.institution = institution;
    return a;
}

} // namespace detail

inline LoadResult load_corpus(const std::string& path, CorpusFormat format) {
    LoadResult result;
    result.corpus.source_path = path;
    std::vector<Article> articles;
    std::vector<RecordError>& errors = result.errors;

    if (format == CorpusFormat::Csv) {
        auto rows = csv::read_file(path);
        if (rows.empty())
            return result;
        const csv::Row& header = rows[0];
        std::map<std::string, size_t> col;
        for (size_t i = 0; i < header.size(); ++i)
            col[header[i]] = i;
        for (const char* required : {"id", "title", "abstract", "uoa"})
            if (!col.count(required))
                throw std::runtime_error("corpus csv missing column '" + std::string(required) +
                                         "' in " + path);
        auto get = [&](const csv::Row& row, const std::string& name) -> std::string {
            auto it = col.find(name);
            if (it == col.end() || it->second >= row.size())
                return "";
            return row[it->second];
        };
        for (size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.size() == 1 && row[0].empty())
                continue;
            auto a = detail::make_article(get(row, "id"), get(row, "title"), get(row, "abstract"),
                                          get(row, "uoa"), get(row, "institution"), r - 1, errors);
            if (a)
                articles.push_back(std::move(*a));
        }
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot open corpus file " + path);
        std::string line;
        size_t record_index = 0;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty())
                continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                errors.push_back({record_index, "", std::string("bad json: ") + e.what()});
                ++record_index;
                continue;
            }
            auto str = [&](const char* key) -> std::string {
                if (!j.contains(key))
                    return "";
                if (j[key].is_string())
                    return j[key].get<std::string>();
                if (j[key].is_number_integer())
                    return std::to_string(j[key].get<long long>());
                return "";
            };
            auto a = detail::make_article(str("id"), str("title"), str("abstract"), str("uoa"),
                                          str("institution"), record_index, errors);
            if (a)
                articles.push_back(std::move(*a));
            ++record_index;
        }
    }

    // Duplicate ids are fatal: downstream stores key everything by id.
    std::map<std::string, size_t> seen;
    for (const auto& a : articles) {
        if (seen.count(a.id))
            throw std::runtime_error("duplicate article id '" + a.id + "' in " + path);
        seen[a.id] = 1;
    }
    for (size_t i = 0; i < articles.size(); ++i)
        articles[i].ingest_index = i;
    result.corpus.articles = std::move(articles);
    return result;
}

inline LoadResult load_corpus(const std::string& path) {
    return load_corpus(path, format_from_path(path));
}

// Proxy scores come as a separate (institution, uoa) -> score table.
inline std::map<std::pair<std::string, int>, double> load_proxy_scores(const std::string& path) {
    auto rows = csv::read_file(path);
    std::map<std::pair<std::string, int>, double> table;
    for (size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() < 3)
            continue;
        if (r == 0 && row[0] == "institution")
            continue;
        int uoa = std::stoi(row[1]);
        double score = std::stod(row[2]);
        if (score < 1.0 || score > 4.0)
            throw std::runtime_error("proxy score " + row[2] + " outside [1,4] in " + path);
        table[{row[0], uoa}] = score;
    }
    return table;
}

inline size_t attach_proxy_scores(Corpus& c,
                                  const std::map<std::pair<std::string, int>, double>& table) {
    size_t matched = 0;
    for (auto& a : c.articles) {
        auto it = table.find({a.institution, a.uoa});
        if (it != table.end()) {
            a.proxy_score = it->second;
            ++matched;
        }
    }
    return matched;
}

// Shortness is measured in characters after whitespace normalization:
// runs of whitespace collapse to one space, leading/trailing trimmed.
inline size_t normalized_length(const std::string& text) {
    size_t len = 0;
    bool pending_space = false;
    bool started = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = started;
        } else {
            if (pending_space) {
                ++len;
                pending_space = false;
            }
            ++len;
            started = true;
        }
    }
    return len;
}

inline Corpus filter_short_abstracts(const Corpus& c, double fraction = 0.10) {
    if (fraction < 0.0 || fraction >= 1.0)
        throw std::invalid_argument("filter fraction must be in [0,1)");
    std::map<int, std::vector<size_t>> by_uoa;
    for (size_t i = 0; i < c.articles.size(); ++i)
        by_uoa[c.articles[i].uoa].push_back(i);

    std::vector<bool> removed(c.articles.size(), false);
    for (auto& [uoa, idxs] : by_uoa) {
        size_t n_remove = static_cast<size_t>(std::floor(fraction * double(idxs.size())));
        if (n_remove == 0)
            continue;
        // Shortest first; among equal lengths the later-ingested goes first,
        // so earlier articles survive the tie.
        std::vector<size_t> order = idxs;
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            size_t la = normalized_length(c.articles[a].abstract_text);
            size_t lb = normalized_length(c.articles[b].abstract_text);
            if (la != lb)
                return la < lb;
            return c.articles[a].ingest_index > c.articles[b].ingest_index;
        });
        for (size_t k = 0; k < n_remove; ++k)
            removed[order[k]] = true;
    }

    Corpus out;
    out.source_path = c.source_path;
    out.filter_fraction = fraction;
    for (size_t i = 0; i < c.articles.size(); ++i)
        if (!removed[i])
            out.articles.push_back(c.articles[i]);
    return out;
}

struct DescriptiveRow {
    int uoa = 0; // 0 marks the footer row
    size_t n_articles = 0;
    std::optional<double> proxy_mean;
    double score_min = 0;
    double score_max = 0;
    double score_mean = 0;
};

// One row per UoA plus a footer whose means are unweighted means of the
// per-UoA means rather than per-article means.
inline std::vector<DescriptiveRow>
descriptive_stats(const Corpus& c, const std::map<std::string, double>& scores) {
    std::map<int, std::vector<const Article*>> by_uoa;
    for (const auto& a : c.articles) {
        if (!scores.count(a.id))
            throw std::runtime_error("article '" + a.id + "' missing from score table");
        by_uoa[a.uoa].push_back(&a);
    }
    std::vector<DescriptiveRow> rows;
    for (const auto& [uoa, group] : by_uoa) {
        DescriptiveRow row;
        row.uoa = uoa;
        row.n_articles = group.size();
        double sum = 0, lo = 4.0, hi = 1.0;
        double proxy_sum = 0;
        size_t proxy_n = 0;
        for (const Article* a : group) {
            double s = scores.at(a->id);
            sum += s;
            lo = std::min(lo, s);
            hi = std::max(hi, s);
            if (a->proxy_score) {
                proxy_sum += *a->proxy_score;
                ++proxy_n;
            }
        }
        row.score_min = lo;
        row.score_max = hi;
        row.score_mean = sum / double(group.size());
        if (proxy_n)
            row.proxy_mean = proxy_sum / double(proxy_n);
        rows.push_back(row);
    }
    if (!rows.empty()) {
        DescriptiveRow footer;
        footer.uoa = 0;
        double mean_of_means = 0, proxy_mean_of_means = 0;
        size_t proxy_rows = 0;
        for (const auto& r : rows) {
            footer.n_articles += r.n_articles;
            mean_of_means += r.score_mean;
            if (r.proxy_mean) {
                proxy_mean_of_means += *r.proxy_mean;
                ++proxy_rows;
            }
        }
        footer.score_mean = mean_of_means / double(rows.size());
        if (proxy_rows)
            footer.proxy_mean = proxy_mean_of_means / double(proxy_rows);
        footer.score_min = 0;
        footer.score_max = 0;
        rows.push_back(footer);
    }
    return rows;
}

inline void save_corpus_jsonl(const Corpus& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write corpus file " + path);
    for (const auto& a : c.articles) {
        nlohmann::json j{{"id", a.id},
                         {"title", a.title},
                         {"abstract", a.abstract_text},
                         {"uoa", a.uoa},
                         {"institution", a.institution}};
        if (a.proxy_score)
            j["proxy_score"] = *a.proxy_score;
        out << j.dump() << '\n';
    }
}

inline Corpus load_corpus_jsonl_with_proxy(const std::string& path) {
    auto result = load_corpus(path, CorpusFormat::Jsonl);
    if (!result.errors.empty())
        throw std::runtime_error("corpus file " + path + " has invalid records");
    // Re-read proxy scores which load_corpus does not pick up.
    std::ifstream in(path, std::ios::binary);
    std::string line;
    size_t i = 0;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto j = nlohmann::json::parse(line);
        if (j.contains("proxy_score"))
            result.corpus.articles[i].proxy_score = j["proxy_score"].get<double>();
        ++i;
    }
    return result.corpus;
}

} // namespace refscore
