#pragma once
// Append-only store of raw LLM reports keyed by (article_id, rep_index).
// Backed by a JSONL file, one report per line, for crash-safe resume.

#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "refscore/extractor.hpp"

namespace refscore {

struct RawReport {
    std::string article_id;
    int rep_index = 0;
    std::string model_id;
    std::string text;
    int64_t created_at = 0; // unix seconds; 0 for the deterministic mock
    int attempt_count = 1;
};

class ReportStore {
public:
    ReportStore() = default;

    // Opens (and creates if absent) a file-backed store, loading existing
    // reports for resume.
    explicit ReportStore(const std::string& path) : path_(path) {
        std::ifstream in(path, std::ios::binary);
        if (in) {
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty())
                    continue;
                auto j = nlohmann::json::parse(line);
                RawReport r;
                r.article_id = j.at("article_id").get<std::string>();
                r.rep_index = j.at("rep_index").get<int>();
                r.model_id = j.value("model_id", "");
                r.text = j.at("text").get<std::string>();
                r.created_at = j.value("created_at", int64_t{0});
                r.attempt_count = j.value("attempt_count", 1);
                reports_[{r.article_id, r.rep_index}] = std::move(r);
            }
        }
        out_.open(path, std::ios::binary | std::ios::app);
        if (!out_)
            throw std::runtime_error("cannot open report store " + path);
    }

    bool contains(const std::string& article_id, int rep_index) const {
        std::lock_guard lock(mu_);
        return reports_.count({article_id, rep_index}) > 0;
    }

    const RawReport& get(const std::string& article_id, int rep_index) const {
        std::lock_guard lock(mu_);
        auto it = reports_.find({article_id, rep_index});
        if (it == reports_.end())
            throw std::out_of_range("no report for (" + article_id + ", " +
                                    std::to_string(rep_index) + ")");
        return it->second;
    }

    void append(RawReport r) {
        std::lock_guard lock(mu_);
        auto key = std::make_pair(r.article_id, r.rep_index);
        if (reports_.count(key))
            throw std::runtime_error("duplicate report for (" + r.article_id + ", " +
                                     std::to_string(r.rep_index) + ")");
        if (out_.is_open()) {
            nlohmann::json j{{"article_id", r.article_id}, {"rep_index", r.rep_index},
                             {"model_id", r.model_id},     {"text", r.text},
                             {"created_at", r.created_at}, {"attempt_count", r.attempt_count}};
            out_ << j.dump() << '\n';
            out_.flush();
        }
        reports_[key] = std::move(r);
    }

    size_t size() const {
        std::lock_guard lock(mu_);
        return reports_.size();
    }

    // Snapshot in deterministic (article_id, rep_index) order.
    std::vector<RawReport> all() const {
        std::lock_guard lock(mu_);
        std::vector<RawReport> out;
        out.reserve(reports_.size());
        for (const auto& [key, r] : reports_)
            out.push_back(r);
        return out;
    }

private:
    std::string path_;
    std::ofstream out_;
    mutable std::mutex mu_;
    std::map<std::pair<std::string, int>, RawReport> reports_;
};

inline ExtractionBatch extract_batch(const ReportStore& store) {
    ExtractionBatch batch;
    for (const auto& r : store.all()) {
        try {
            batch.rows.push_back({r.article_id, r.rep_index, extract_overall_score(r.text)});
        } catch (const NoScoreFound&) {
            batch.failures.push_back({r.article_id, r.rep_index, "no score found"});
        } catch (const ScoreOutOfRange& e) {
            batch.failures.push_back({r.article_id, r.rep_index, e.what()});
        }
    }
    return batch;
}

} // namespace refscore
