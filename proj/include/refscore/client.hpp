#pragma once
// Chat-completion client and batch scheduler. Every request is a fresh
// session: exactly one system message and one user message, no history.
// Repetitions run as repetition-major passes so no article's repetitions
// are ever consecutive.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "refscore/corpus.hpp"
#include "refscore/mock.hpp"
#include "refscore/protocol.hpp"
#include "refscore/report_store.hpp"

namespace refscore {

struct ModelConfig {
    std::string endpoint_url;
    std::string model_name;
    std::optional<double> temperature; // absent = endpoint default
    int max_output_tokens = 2048;
    int repetitions = 5;
    int parallelism = 4;
    int timeout_seconds = 120;
    int retry_limit = 3;
    std::string api_key; // resolved from the environment by the caller
};

class TransportError : public std::runtime_error {
public:
    TransportError(const std::string& what, int attempts)
        : std::runtime_error(what), attempt_count(attempts) {}
    int attempt_count;
};

// One generation request; implementations must be safe for concurrent use.
class ScoreBackend {
public:
    virtual ~ScoreBackend() = default;
    // Returns the full response text for a single fresh-session request.
    // Throws on transport or endpoint failure.
    virtual std::string generate(const PromptPair& prompt) = 0;
    virtual std::string model_id() const = 0;
};

// In-process deterministic scorer; needs the corpus to resolve articles.
class MockBackend : public ScoreBackend {
public:
    MockBackend(const Corpus& corpus, uint64_t seed, MockProfile profile = {})
        : seed_(seed), profile_(profile) {
        for (const auto& a : corpus.articles)
            articles_[a.id] = a;
    }

    std::string generate_for(const std::string& article_id, int rep) {
        auto it = articles_.find(article_id);
        if (it == articles_.end())
            throw std::runtime_error("mock backend: unknown article '" + article_id + "'");
        return mock_generate(it->second, rep, seed_, profile_).text;
    }

    std::string generate(const PromptPair& prompt) override {
        return generate_for(prompt.article_id, 0);
    }
    std::string model_id() const override { return "mock"; }

private:
    std::map<std::string, Article> articles_;
    uint64_t seed_;
    MockProfile profile_;
};

inline nlohmann::json build_request_body(const PromptPair& prompt, const ModelConfig& cfg) {
    nlohmann::json body{
        {"model", cfg.model_name},
        {"messages",
         nlohmann::json::array({nlohmann::json{{"role", "system"}, {"content", prompt.system_text}},
                                nlohmann::json{{"role", "user"}, {"content", prompt.user_text}}})},
        {"max_tokens", cfg.max_output_tokens}};
    if (cfg.temperature)
        body["temperature"] = *cfg.temperature;
    return body;
}

// Single attempt against a chat-completion endpoint; retry policy lives in
// score_article. Defined out of line in http_backend.hpp to keep httplib out
// of every translation unit.
class HttpBackend : public ScoreBackend {
public:
    explicit HttpBackend(ModelConfig cfg);
    std::string generate(const PromptPair& prompt) override;
    std::string model_id() const override { return cfg_.model_name; }

private:
    ModelConfig cfg_;
    std::string base_url_;
    std::string path_;
};

struct FailureRecord {
    std::string article_id;
    int rep_index = 0;
    std::string reason;
};

struct BatchSummary {
    size_t succeeded = 0;
    size_t failed = 0;
    size_t cached = 0;
    std::vector<FailureRecord> failures;
};

inline int64_t now_unix_seconds() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

// One scored repetition with retries and exponential backoff.
inline RawReport score_article(const PromptPair& prompt, const ModelConfig& cfg, int rep_index,
                               ScoreBackend& backend, bool stamp_time = true) {
    if (rep_index >= cfg.repetitions)
        throw std::invalid_argument("rep_index " + std::to_string(rep_index) +
                                    " >= repetitions " + std::to_string(cfg.repetitions));
    int attempts = 0;
    std::string last_error;
    while (attempts <= cfg.retry_limit) {
        ++attempts;
        try {
            std::string text;
            if (auto* mock = dynamic_cast<MockBackend*>(&backend))
                text = mock->generate_for(prompt.article_id, rep_index);
            else
                text = backend.generate(prompt);
            if (text.empty())
                throw std::runtime_error("empty response body");
            RawReport r;
            r.article_id = prompt.article_id;
            r.rep_index = rep_index;
            r.model_id = backend.model_id();
            r.text = std::move(text);
            r.created_at = stamp_time ? now_unix_seconds() : 0;
            r.attempt_count = attempts;
            return r;
        } catch (const std::exception& e) {
            last_error = e.what();
            if (attempts <= cfg.retry_limit) {
                auto backoff = std::chrono::milliseconds(100LL << (attempts - 1));
                std::this_thread::sleep_for(backoff);
            }
        }
    }
    throw TransportError(last_error, attempts);
}

// Called (serialized) whenever a request is dispatched; used by tests to
// verify the non-consecutive scheduling guarantee.
using IssueCallback = std::function<void(const std::string& article_id, int rep_index)>;

inline BatchSummary run_batch(const Corpus& corpus, const TemplateSet& templates,
                              const ModelConfig& cfg, ReportStore& store, ScoreBackend& backend,
                              const IssueCallback& on_issue = nullptr) {
    BatchSummary summary;
    std::mutex mu; // guards summary and on_issue
    const bool is_mock = dynamic_cast<MockBackend*>(&backend) != nullptr;

    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= corpus.articles.size())
                    return;
                const Article& a = corpus.articles[i];
                if (store.contains(a.id, rep)) {
                    std::lock_guard lock(mu);
                    ++summary.cached;
                    continue;
                }
                try {
                    PromptPair prompt = build_prompt(a, templates);
                    {
                        std::lock_guard lock(mu);
                        if (on_issue)
                            on_issue(a.id, rep);
                    }
                    RawReport r = score_article(prompt, cfg, rep, backend, !is_mock);
                    store.append(std::move(r));
                    std::lock_guard lock(mu);
                    ++summary.succeeded;
                } catch (const std::exception& e) {
                    std::lock_guard lock(mu);
                    ++summary.failed;
                    summary.failures.push_back({a.id, rep, e.what()});
                }
            }
        };
        int threads = std::max(1, cfg.parallelism);
        if (threads == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t)
                pool.emplace_back(worker);
            for (auto& t : pool)
                t.join();
        }
        // Pass barrier: rep k+1 starts only after every article finished rep k.
    }
    return summary;
}

} // namespace refscore
