#pragma once
// Report-structure analytics: paragraph splitting and frequency tables of
// first-paragraph patterns and heading/paragraph-start phrases. Matching is
// literal prefix matching over the markdown decoration, case-sensitive.

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "refscore/csv.hpp"
#include "refscore/stats.hpp"

namespace refscore {

struct PatternSpec {
    std::string label;
    std::string prefix;
    std::optional<int> paragraph_index; // 1-based; absent = any paragraph
};

struct StructureRow {
    std::string label;
    size_t count = 0;
    std::string percentage; // rendered to one decimal, round-half-up
};

struct StructureTable {
    std::vector<StructureRow> rows;
    size_t corpus_size = 0;
};

inline std::vector<std::string> split_paragraphs(const std::string& text) {
    // Normalize newlines, split on blank lines, trim.
    std::string norm;
    norm.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n')
                continue;
            norm += '\n';
        } else {
            norm += text[i];
        }
    }
    std::vector<std::string> out;
    size_t pos = 0;
    auto flush = [&](std::string para) {
        size_t b = para.find_first_not_of(" \t\n");
        if (b == std::string::npos)
            return;
        size_t e = para.find_last_not_of(" \t\n");
        out.push_back(para.substr(b, e - b + 1));
    };
    while (pos < norm.size()) {
        size_t brk = norm.find("\n\n", pos);
        if (brk == std::string::npos) {
            flush(norm.substr(pos));
            break;
        }
        flush(norm.substr(pos, brk - pos));
        pos = brk;
        while (pos < norm.size() && norm[pos] == '\n')
            ++pos;
    }
    return out;
}

namespace detail {

inline bool starts_with(const std::string& s, const std::string& prefix) {
    return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

} // namespace detail

inline std::string render_count_percentage(size_t count, size_t total) {
    if (total == 0)
        return "0.0";
    return format_percentage(100.0 * double(count) / double(total));
}

// Table-2 style: one table per paragraph index, with a residual "other" row
// so the counts sum to the corpus size.
inline std::map<int, StructureTable>
paragraph_pattern_table(const std::vector<std::string>& reports,
                        const std::vector<PatternSpec>& specs) {
    if (specs.empty())
        throw std::invalid_argument("paragraph_pattern_table: no specs");
    std::map<int, std::vector<const PatternSpec*>> by_index;
    for (const auto& s : specs)
        if (s.paragraph_index)
            by_index[*s.paragraph_index].push_back(&s);

    std::map<int, StructureTable> tables;
    for (const auto& [index, group] : by_index) {
        StructureTable t;
        t.corpus_size = reports.size();
        std::vector<size_t> counts(group.size(), 0);
        size_t other = 0;
        for (const auto& report : reports) {
            auto paras = split_paragraphs(report);
            bool matched = false;
            if (index >= 1 && size_t(index) <= paras.size()) {
                const std::string& para = paras[size_t(index) - 1];
                for (size_t s = 0; s < group.size(); ++s) {
                    if (detail::starts_with(para, group[s]->prefix)) {
                        ++counts[s];
                        matched = true;
                        break; // a report counts at most once per index
                    }
                }
            }
            if (!matched)
                ++other;
        }
        for (size_t s = 0; s < group.size(); ++s)
            t.rows.push_back({group[s]->label, counts[s],
                              render_count_percentage(counts[s], t.corpus_size)});
        t.rows.push_back({"other", other, render_count_percentage(other, t.corpus_size)});
        tables[index] = std::move(t);
    }
    return tables;
}

// Table-3 style: a report counts once per spec if any paragraph starts with
// the spec's phrase.
inline StructureTable heading_frequency_table(const std::vector<std::string>& reports,
                                              const std::vector<PatternSpec>& specs) {
    if (specs.empty())
        throw std::invalid_argument("heading_frequency_table: no specs");
    StructureTable t;
    t.corpus_size = reports.size();
    std::vector<size_t> counts(specs.size(), 0);
    for (const auto& report : reports) {
        auto paras = split_paragraphs(report);
        for (size_t s = 0; s < specs.size(); ++s) {
            for (const auto& para : paras) {
                if (detail::starts_with(para, specs[s].prefix)) {
                    ++counts[s];
                    break;
                }
            }
        }
    }
    for (size_t s = 0; s < specs.size(); ++s)
        t.rows.push_back({specs[s].label, counts[s],
                          render_count_percentage(counts[s], t.corpus_size)});
    return t;
}

// Spec files: CSV `label,prefix,paragraph_index` or JSONL with those keys.
inline std::vector<PatternSpec> load_pattern_specs(const std::string& path) {
    std::vector<PatternSpec> specs;
    auto add = [&](std::string label, std::string prefix, std::optional<int> index) {
        for (const auto& s : specs)
            if (s.label == label)
                throw std::runtime_error("duplicate spec label '" + label + "' in " + path);
        specs.push_back({std::move(label), std::move(prefix), index});
    };
    if (path.size() > 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot open spec file " + path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            auto j = nlohmann::json::parse(line);
            std::optional<int> index;
            if (j.contains("paragraph_index"))
                index = j["paragraph_index"].get<int>();
            add(j.at("label").get<std::string>(), j.at("prefix").get<std::string>(), index);
        }
    } else {
        auto rows = csv::read_file(path);
        for (size_t r = 0; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.size() < 2)
                continue;
            if (r == 0 && row[0] == "label")
                continue;
            std::optional<int> index;
            if (row.size() >= 3 && !row[2].empty())
                index = std::stoi(row[2]);
            add(row[0], row[1], index);
        }
    }
    if (specs.empty())
        throw std::runtime_error("spec file " + path + " contains no patterns");
    return specs;
}

} // namespace refscore
