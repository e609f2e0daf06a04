#pragma once
// Pipeline stages behind the CLI subcommands. Each stage reads only config
// plus prior-stage artifacts on disk, so a run can resume at any stage and
// reruns are reproducible.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>

#include "refscore/client.hpp"
#include "refscore/config.hpp"
#include "refscore/corpus.hpp"
#include "refscore/extractor.hpp"
#include "refscore/stats.hpp"
#include "refscore/structure.hpp"

namespace refscore {

namespace exit_code {
constexpr int ok = 0;
constexpr int validation = 1;
constexpr int transport = 2;
constexpr int analysis_threshold = 3;
} // namespace exit_code

// Single-writer guard on the output directory.
class OutputLock {
public:
    explicit OutputLock(const std::filesystem::path& dir) : path_(dir / ".lock") {
        std::filesystem::create_directories(dir);
        FILE* f = std::fopen(path_.string().c_str(), "wx");
        if (!f)
            throw std::runtime_error("output directory is locked by another run: " +
                                     path_.string());
        std::fclose(f);
    }
    ~OutputLock() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    std::filesystem::path path_;
};

namespace paths {
inline std::filesystem::path filtered_corpus(const RunConfig& cfg) {
    return std::filesystem::path(cfg.output_dir) / "corpus_filtered.jsonl";
}
inline std::filesystem::path ingest_report(const RunConfig& cfg) {
    return std::filesystem::path(cfg.output_dir) / "ingest_report.csv";
}
inline std::filesystem::path report_store(const RunConfig& cfg) {
    return std::filesystem::path(cfg.output_dir) / "reports.jsonl";
}
inline std::filesystem::path results_dir(const RunConfig& cfg) {
    return std::filesystem::path(cfg.output_dir) / "results";
}
} // namespace paths

inline std::string format_fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    // Avoid the "-0.0000" artifact so reruns compare byte-identical.
    std::string s = buf;
    if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-')
        s.erase(0, 1);
    return s;
}

inline int cmd_ingest(const RunConfig& cfg, std::ostream& log = std::cout) {
    validate_input_paths(cfg);
    std::filesystem::create_directories(cfg.output_dir);

    auto loaded = load_corpus(cfg.corpus_path);
    for (const auto& e : loaded.errors)
        log << "record " << e.record_index << (e.id.empty() ? "" : " (id " + e.id + ")") << ": "
            << e.message << "\n";

    auto proxy = load_proxy_scores(cfg.proxy_scores_path);
    size_t matched = attach_proxy_scores(loaded.corpus, proxy);

    std::map<int, size_t> before;
    for (const auto& a : loaded.corpus.articles)
        ++before[a.uoa];

    Corpus filtered = filter_short_abstracts(loaded.corpus, cfg.filter_fraction);
    std::map<int, size_t> after;
    for (const auto& a : filtered.articles)
        ++after[a.uoa];

    save_corpus_jsonl(filtered, paths::filtered_corpus(cfg).string());
    {
        csv::Writer w(paths::ingest_report(cfg).string());
        w.write_row({"uoa", "before", "after", "removed"});
        for (const auto& [uoa, n] : before)
            w.write_row({std::to_string(uoa), std::to_string(n), std::to_string(after[uoa]),
                         std::to_string(n - after[uoa])});
    }
    log << "ingested " << loaded.corpus.articles.size() << " articles ("
        << loaded.errors.size() << " rejected), " << matched << " with proxy scores, "
        << filtered.articles.size() << " after filter\n";
    return exit_code::ok;
}

inline std::unique_ptr<ScoreBackend> make_backend(const RunConfig& cfg, const Corpus& corpus);

inline int cmd_score(const RunConfig& cfg, std::ostream& log = std::cout,
                     const IssueCallback& on_issue = nullptr) {
    auto corpus_path = paths::filtered_corpus(cfg);
    if (!std::filesystem::exists(corpus_path)) {
        log << "no ingested corpus at " << corpus_path << "; run ingest first\n";
        return exit_code::validation;
    }
    Corpus corpus = load_corpus_jsonl_with_proxy(corpus_path.string());
    TemplateSet templates = load_templates(cfg.template_paths);
    ReportStore store(paths::report_store(cfg).string());
    auto backend = make_backend(cfg, corpus);

    BatchSummary summary = run_batch(corpus, templates, cfg.model, store, *backend, on_issue);
    log << summary.succeeded << " requests issued, " << summary.cached << " cached, "
        << summary.failed << " failed\n";
    for (const auto& f : summary.failures)
        log << "  failed (" << f.article_id << ", rep " << f.rep_index << "): " << f.reason
            << "\n";
    return summary.failed == 0 ? exit_code::ok : exit_code::transport;
}

inline int cmd_analyze(const RunConfig& cfg, std::ostream& log = std::cout) {
    auto store_path = paths::report_store(cfg);
    if (!std::filesystem::exists(store_path)) {
        log << "no report store at " << store_path << "; run score first\n";
        return exit_code::validation;
    }
    Corpus corpus = load_corpus_jsonl_with_proxy(paths::filtered_corpus(cfg).string());
    ReportStore store(store_path.string());
    auto results = paths::results_dir(cfg);
    std::filesystem::create_directories(results);

    ExtractionBatch batch = extract_batch(store);
    {
        csv::Writer w((results / "extraction.csv").string());
        w.write_row({"article_id", "rep_index", "score", "was_fractional", "rounded_companion"});
        for (const auto& row : batch.rows)
            w.write_row({row.article_id, std::to_string(row.rep_index),
                         format_fixed(row.score.value),
                         row.score.was_fractional ? "true" : "false",
                         row.score.rounded_companion ? format_fixed(*row.score.rounded_companion)
                                                     : ""});
    }
    {
        csv::Writer w((results / "extraction_failures.csv").string());
        w.write_row({"article_id", "rep_index", "reason"});
        for (const auto& f : batch.failures)
            w.write_row({f.article_id, std::to_string(f.rep_index), f.reason});
    }

    size_t total_reports = store.size();
    double failure_rate =
        total_reports == 0 ? 1.0 : double(batch.failures.size()) / double(total_reports);
    if (failure_rate > cfg.extraction_failure_threshold) {
        log << "extraction failure rate " << failure_rate << " exceeds threshold "
            << cfg.extraction_failure_threshold << "\n";
        for (const auto& f : batch.failures)
            log << "  unparsed (" << f.article_id << ", rep " << f.rep_index << "): " << f.reason
                << "\n";
        return exit_code::analysis_threshold;
    }

    ScoreTable table;
    for (const auto& row : batch.rows) {
        auto& v = table[row.article_id];
        if (v.size() <= size_t(row.rep_index))
            v.resize(size_t(row.rep_index) + 1, -1.0);
        v[size_t(row.rep_index)] = row.score.value;
    }
    std::set<std::string> in_corpus;
    for (const auto& a : corpus.articles)
        in_corpus.insert(a.id);
    for (const auto& [id, v] : table) {
        if (!in_corpus.count(id))
            throw std::runtime_error("report store has article '" + id + "' not in corpus");
        if (v.empty())
            throw std::runtime_error("article '" + id + "' has no parsed score");
    }
    for (const auto& a : corpus.articles)
        if (!table.count(a.id)) {
            log << "article '" << a.id << "' has no parsed score\n";
            return exit_code::analysis_threshold;
        }

    auto score_sets = aggregate(table, 0);
    std::map<std::string, double> means;
    for (const auto& s : score_sets)
        means[s.article_id] = s.mean;

    {
        auto rows = descriptive_stats(corpus, means);
        csv::Writer w((results / "descriptive_stats.csv").string());
        w.write_row({"uoa", "n_articles", "proxy_mean", "score_min", "score_max", "score_mean"});
        for (const auto& r : rows) {
            bool footer = r.uoa == 0;
            w.write_row({footer ? "all" : std::to_string(r.uoa), std::to_string(r.n_articles),
                         r.proxy_mean ? format_fixed(*r.proxy_mean) : "",
                         footer ? "" : format_fixed(r.score_min),
                         footer ? "" : format_fixed(r.score_max), format_fixed(r.score_mean)});
        }
    }

    auto correlations =
        correlate_by_uoa(score_sets, corpus, cfg.bootstrap_samples, cfg.bootstrap_alpha, cfg.seed);
    {
        csv::Writer w((results / "correlations.csv").string());
        w.write_row({"uoa", "n", "rho", "ci_low", "ci_high", "B", "seed"});
        for (const auto& r : correlations.results)
            w.write_row({std::to_string(r.uoa), std::to_string(r.n), format_fixed(r.rho),
                         format_fixed(r.ci_low), format_fixed(r.ci_high),
                         std::to_string(r.bootstrap_samples), std::to_string(r.seed)});
        for (const auto& [uoa, reason] : correlations.skipped)
            w.write_row({std::to_string(uoa), "0", "", "", "", "", "skipped: " + reason});
    }

    // Iteration curves need a full rep set per article.
    size_t reps = size_t(cfg.model.repetitions);
    ScoreTable complete;
    for (const auto& [id, v] : table)
        if (v.size() >= reps) {
            std::vector<double> t(v.begin(), v.begin() + long(reps));
            bool ok = true;
            for (double s : t)
                ok = ok && s >= 0;
            if (ok)
                complete[id] = std::move(t);
        }
    {
        csv::Writer w((results / "iteration_curves.csv").string());
        w.write_row({"panel", "k", "rho"});
        for (MainPanel panel : kAllPanels) {
            try {
                auto curve = iteration_curve(complete, corpus, panel, reps);
                for (const auto& [k, rho] : curve.points)
                    w.write_row({std::string(1, panel_letter(panel)), std::to_string(k),
                                 format_fixed(rho)});
            } catch (const DegenerateInput&) {
                // Panel absent from this corpus.
            }
        }
    }

    {
        csv::Writer w((results / "summary.csv").string());
        w.write_row({"metric", "value"});
        w.write_row({"n_articles", std::to_string(corpus.articles.size())});
        w.write_row({"n_reports", std::to_string(total_reports)});
        w.write_row({"n_extraction_failures", std::to_string(batch.failures.size())});
        if (!complete.empty())
            w.write_row({"identical_fraction", format_fixed(identical_fraction(complete))});
        if (!correlations.results.empty())
            w.write_row(
                {"weighted_mean_rho", format_fixed(weighted_mean_rho(correlations.results))});
    }

    log << "analysis complete: " << batch.rows.size() << " scores, " << batch.failures.size()
        << " failures, results in " << results << "\n";
    return exit_code::ok;
}

inline int cmd_structure(const RunConfig& cfg, std::ostream& log = std::cout) {
    auto store_path = paths::report_store(cfg);
    if (!std::filesystem::exists(store_path)) {
        log << "no report store at " << store_path << "; run score first\n";
        return exit_code::validation;
    }
    if (cfg.structure_specs_path.empty()) {
        log << "no structure spec file configured\n";
        return exit_code::validation;
    }
    auto specs = load_pattern_specs(cfg.structure_specs_path);
    ReportStore store(store_path.string());
    std::vector<std::string> reports;
    for (const auto& r : store.all())
        reports.push_back(r.text);

    auto results = paths::results_dir(cfg);
    std::filesystem::create_directories(results);

    auto para_tables = paragraph_pattern_table(reports, specs);
    {
        csv::Writer w((results / "structure_paragraphs.csv").string());
        w.write_row({"paragraph_index", "label", "count", "percentage"});
        for (const auto& [index, t] : para_tables)
            for (const auto& row : t.rows)
                w.write_row({std::to_string(index), row.label, std::to_string(row.count),
                             row.percentage});
    }

    std::vector<PatternSpec> heading_specs;
    for (const auto& s : specs)
        if (!s.paragraph_index)
            heading_specs.push_back(s);
    if (!heading_specs.empty()) {
        auto t = heading_frequency_table(reports, heading_specs);
        csv::Writer w((results / "structure_headings.csv").string());
        w.write_row({"label", "count", "percentage"});
        for (const auto& row : t.rows)
            w.write_row({row.label, std::to_string(row.count), row.percentage});
    }
    log << "structure tables written to " << results << "\n";
    return exit_code::ok;
}

} // namespace refscore
