#pragma once
// Main-panel mapping and prompt construction. Prompts are byte-reproducible:
// same article and templates always give the same pair.

#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "refscore/corpus.hpp"

namespace refscore {

enum class MainPanel { A, B, C, D };

inline char panel_letter(MainPanel p) {
    switch (p) {
    case MainPanel::A: return 'A';
    case MainPanel::B: return 'B';
    case MainPanel::C: return 'C';
    case MainPanel::D: return 'D';
    }
    return '?';
}

inline MainPanel panel_from_letter(char c) {
    switch (c) {
    case 'A': case 'a': return MainPanel::A;
    case 'B': case 'b': return MainPanel::B;
    case 'C': case 'c': return MainPanel::C;
    case 'D': case 'd': return MainPanel::D;
    }
    throw std::invalid_argument(std::string("unknown panel letter: ") + c);
}

constexpr std::array<MainPanel, 4> kAllPanels = {MainPanel::A, MainPanel::B, MainPanel::C,
                                                 MainPanel::D};

// A: 1-6 health/life sciences, B: 7-12 engineering/physical,
// C: 13-24 social sciences, D: 25-34 arts/humanities.
inline MainPanel main_panel(int uoa) {
    if (uoa < kMinUoa || uoa > kMaxUoa)
        throw std::out_of_range("uoa " + std::to_string(uoa) + " outside 1-34");
    if (uoa <= 6)
        return MainPanel::A;
    if (uoa <= 12)
        return MainPanel::B;
    if (uoa <= 24)
        return MainPanel::C;
    return MainPanel::D;
}

struct TemplateSet {
    std::map<MainPanel, std::string> system_instructions;
    std::string user_prefix = "Score this:";
};

struct PromptPair {
    std::string system_text;
    std::string user_text;
    std::string article_id;
};

namespace detail {

inline bool contains_ci(const std::string& haystack, const std::string& needle) {
    auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                          [](char a, char b) {
                              return std::tolower(static_cast<unsigned char>(a)) ==
                                     std::tolower(static_cast<unsigned char>(b));
                          });
    return it != haystack.end();
}

} // namespace detail

// Each panel text must define the four star levels and the three quality
// dimensions; anything less means the wrong file was wired up.
inline void validate_template(MainPanel panel, const std::string& text) {
    static const std::vector<std::string> required = {"1*",          "2*",           "3*", "4*",
                                                      "originality", "significance", "rigour"};
    std::vector<std::string> missing;
    for (const auto& token : required)
        if (!detail::contains_ci(text, token))
            missing.push_back(token);
    if (text.empty())
        missing.insert(missing.begin(), "(empty file)");
    if (!missing.empty()) {
        std::string msg = "panel ";
        msg += panel_letter(panel);
        msg += " template missing required tokens:";
        for (const auto& m : missing)
            msg += " " + m;
        throw std::runtime_error(msg);
    }
}

inline TemplateSet load_templates(const std::map<MainPanel, std::string>& panel_paths) {
    for (MainPanel p : kAllPanels)
        if (!panel_paths.count(p))
            throw std::runtime_error(std::string("template manifest missing panel ") +
                                     panel_letter(p));
    TemplateSet t;
    for (const auto& [panel, path] : panel_paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot open template file " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        std::string text = ss.str();
        validate_template(panel, text);
        t.system_instructions[panel] = std::move(text);
    }
    return t;
}

// "Score this: <title>\nAbstract\n<abstract on one line>"
inline PromptPair build_prompt(const Article& a, const TemplateSet& t) {
    if (a.title.empty() || a.abstract_text.empty())
        throw std::invalid_argument("article " + a.id + " has empty title or abstract");
    MainPanel panel = main_panel(a.uoa);
    auto it = t.system_instructions.find(panel);
    if (it == t.system_instructions.end())
        throw std::runtime_error(std::string("no system instructions for panel ") +
                                 panel_letter(panel));

    std::string flat;
    flat.reserve(a.abstract_text.size());
    bool pending_space = false;
    for (char c : a.abstract_text) {
        if (c == '\n' || c == '\r') {
            pending_space = !flat.empty();
        } else {
            if (pending_space) {
                flat += ' ';
                pending_space = false;
            }
            flat += c;
        }
    }

    PromptPair p;
    p.article_id = a.id;
    p.system_text = it->second;
    p.user_text = t.user_prefix + " " + a.title + "\nAbstract\n" + flat;
    return p;
}

} // namespace refscore
