#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "refscore/structure.hpp"
#include "test_helpers.hpp"

using namespace refscore;

TEST_CASE("split_paragraphs basics") {
    CHECK(split_paragraphs("a\n\nb") == std::vector<std::string>{"a", "b"});
    CHECK(split_paragraphs("a\r\n\r\nb") == std::vector<std::string>{"a", "b"});
    CHECK(split_paragraphs("").empty());
    CHECK(split_paragraphs("  \n\n  ").empty());
    CHECK(split_paragraphs("one\nstill one\n\ntwo") ==
          std::vector<std::string>{"one\nstill one", "two"});
    CHECK(split_paragraphs("\n\n\na\n\n\n\nb\n\n") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("percentage rendering is bit-exact against the reference strings") {
    CHECK(render_count_percentage(24827, 24830) == "100.0");
    CHECK(render_count_percentage(24824, 24830) == "100.0");
    CHECK(render_count_percentage(24822, 24830) == "100.0");
    CHECK(render_count_percentage(24784, 24830) == "99.8");
    CHECK(render_count_percentage(20848, 24830) == "84.0");
    CHECK(render_count_percentage(19529, 24830) == "78.7");
    CHECK(render_count_percentage(12556, 24830) == "50.6");
    CHECK(render_count_percentage(8327, 24830) == "33.5");
    CHECK(render_count_percentage(7319, 24830) == "29.5");
    CHECK(render_count_percentage(0, 24830) == "0.0");
    CHECK(render_count_percentage(0, 0) == "0.0");
    // Round-half-up at the boundary: 0.05% of 1000 = 0.5 renders up.
    CHECK(render_count_percentage(1, 2000) == "0.1");
}

static std::vector<PatternSpec> first_para_specs() {
    return {{"assessment", "## Assessment of:", 1}, {"evaluation", "## Evaluation of:", 1}};
}

TEST_CASE("paragraph pattern table counts first paragraphs") {
    std::vector<std::string> reports = {
        "## Assessment of: \"A\"\n\nOverall score: 3*",
        "## Assessment of: \"B\"\n\nOverall score: 2*",
    };
    auto tables = paragraph_pattern_table(reports, first_para_specs());
    REQUIRE(tables.count(1));
    const auto& t = tables.at(1);
    REQUIRE(t.rows.size() == 3); // two specs + other
    CHECK(t.rows[0].count == 2);
    CHECK(t.rows[0].percentage == "100.0");
    CHECK(t.rows[1].count == 0);
    CHECK(t.rows[2].label == "other");
    CHECK(t.rows[2].count == 0);
}

TEST_CASE("unmatched reports land in the residual row and columns sum") {
    std::vector<std::string> reports = {
        "## Assessment of: X\n\nbody",
        "## Evaluation of: Y\n\nbody",
        "Something else entirely\n\nbody",
    };
    auto tables = paragraph_pattern_table(reports, first_para_specs());
    const auto& t = tables.at(1);
    size_t total = 0;
    for (const auto& row : t.rows)
        total += row.count;
    CHECK(total == t.corpus_size);
    CHECK(t.rows[2].count == 1);
}

TEST_CASE("table 2 style counts reproduce") {
    std::vector<std::string> reports;
    for (int i = 0; i < 4956; ++i)
        reports.push_back("## Assessment of: T\n\nbody");
    for (int i = 0; i < 10; ++i)
        reports.push_back("## Evaluation of: T\n\nbody");
    auto tables = paragraph_pattern_table(reports, first_para_specs());
    const auto& t = tables.at(1);
    CHECK(t.rows[0].count == 4956);
    CHECK(t.rows[1].count == 10);
}

TEST_CASE("heading frequency counts once per report") {
    std::vector<PatternSpec> specs = {{"rigour", "**3. Rigour", std::nullopt},
                                      {"justification", "**Justification", std::nullopt}};
    std::vector<std::string> reports = {
        "intro\n\n**3. Rigour (3*)\n\nmore\n\n**3. Rigour again\n\n**Justification: x",
        "**3. Rigour only\n",
        "nothing relevant",
    };
    auto t = heading_frequency_table(reports, specs);
    CHECK(t.rows[0].count == 2); // duplicated heading counts once
    CHECK(t.rows[1].count == 1);
}

TEST_CASE("matching is case-sensitive and literal") {
    std::vector<PatternSpec> specs = {{"rigour", "**3. Rigour", std::nullopt}};
    std::vector<std::string> reports = {"**3. rigour lowercase"};
    auto t = heading_frequency_table(reports, specs);
    CHECK(t.rows[0].count == 0);
}

TEST_CASE("tables are permutation-invariant") {
    std::vector<std::string> reports;
    std::mt19937_64 gen(4);
    for (int i = 0; i < 200; ++i) {
        if (i % 3 == 0)
            reports.push_back("## Assessment of: T\n\n**Justification x");
        else if (i % 3 == 1)
            reports.push_back("## Evaluation of: T\n\nbody");
        else
            reports.push_back("other\n\n**Justification y");
    }
    std::vector<PatternSpec> specs = {{"a", "## Assessment of:", 1},
                                      {"e", "## Evaluation of:", 1},
                                      {"j", "**Justification", std::nullopt}};
    auto t1p = paragraph_pattern_table(reports, specs);
    auto t1h = heading_frequency_table(reports, {specs[2]});
    std::shuffle(reports.begin(), reports.end(), gen);
    auto t2p = paragraph_pattern_table(reports, specs);
    auto t2h = heading_frequency_table(reports, {specs[2]});
    for (size_t i = 0; i < t1p.at(1).rows.size(); ++i)
        CHECK(t1p.at(1).rows[i].count == t2p.at(1).rows[i].count);
    CHECK(t1h.rows[0].count == t2h.rows[0].count);
}

TEST_CASE("empty spec list throws") {
    CHECK_THROWS(paragraph_pattern_table({"x"}, {}));
    CHECK_THROWS(heading_frequency_table({"x"}, {}));
}

TEST_CASE("spec files load from csv and jsonl") {
    testutil::TempDir dir("specs");
    testutil::write_file(dir.file("s.csv"), "label,prefix,paragraph_index\n"
                                            "opener,## Assessment of:,1\n"
                                            "rigour,**3. Rigour,\n");
    auto specs = load_pattern_specs(dir.file("s.csv"));
    REQUIRE(specs.size() == 2);
    CHECK(specs[0].paragraph_index == 1);
    CHECK_FALSE(specs[1].paragraph_index.has_value());

    testutil::write_file(dir.file("s.jsonl"),
                         R"({"label":"opener","prefix":"## Assessment of:","paragraph_index":1})"
                         "\n"
                         R"({"label":"rigour","prefix":"**3. Rigour"})"
                         "\n");
    auto jspecs = load_pattern_specs(dir.file("s.jsonl"));
    REQUIRE(jspecs.size() == 2);
    CHECK(jspecs[0].paragraph_index == 1);

    testutil::write_file(dir.file("empty.csv"), "label,prefix,paragraph_index\n");
    CHECK_THROWS(load_pattern_specs(dir.file("empty.csv")));

    testutil::write_file(dir.file("dup.csv"), "label,prefix,paragraph_index\n"
                                              "x,p1,\nx,p2,\n");
    CHECK_THROWS(load_pattern_specs(dir.file("dup.csv")));
}
