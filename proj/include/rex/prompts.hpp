#pragma once

#include "rex/errors.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace rex {

/// One chat message: role ("system", "user", ...) plus content.
struct Message {
    std::string role;
    std::string content;
};

namespace detail {

inline bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Substitute {name} placeholders from `values`. Placeholders are detected
/// in the raw template only; substituted values are never rescanned, so
/// program text containing braces cannot inject further substitutions.
/// Any {identifier} without a value is a template error naming the field.
inline std::string render_placeholders(const std::string& text,
                                       const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '{' && i + 1 < text.size() && is_ident_start(text[i + 1])) {
            std::size_t j = i + 1;
            while (j < text.size() && is_ident_char(text[j])) ++j;
            if (j < text.size() && text[j] == '}') {
                const std::string name = text.substr(i + 1, j - i - 1);
                const auto it = values.find(name);
                if (it == values.end()) {
                    throw TemplateError("unresolved placeholder {" + name + "}", name);
                }
                out += it->second;
                i = j + 1;
                continue;
            }
        }
        out += c;
        ++i;
    }
    return out;
}

} // namespace detail

/// A prompt template: an ordered list of role sections whose bodies may
/// contain {problem}, {code} and {feedback} placeholders. File syntax:
///
///   ----- system -----
///   ...body...
///   ----- user -----
///   ...body with {problem}...
///
/// Sections keep their internal formatting; leading/trailing blank lines are
/// trimmed.
struct PromptTemplate {
    std::vector<Message> sections;

    static PromptTemplate parse(const std::string& text) {
        PromptTemplate tmpl;
        std::istringstream in(text);
        std::string line;
        std::string role;
        std::vector<std::string> body;

        auto flush = [&]() {
            if (role.empty()) return;
            while (!body.empty() && body.front().empty()) body.erase(body.begin());
            while (!body.empty() && body.back().empty()) body.pop_back();
            std::string content;
            for (std::size_t i = 0; i < body.size(); ++i) {
                if (i) content += '\n';
                content += body[i];
            }
            tmpl.sections.push_back(Message{role, content});
            body.clear();
        };

        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (auto marker = parse_marker(line)) {
                flush();
                role = *marker;
            } else if (role.empty()) {
                if (line.find_first_not_of(" \t") != std::string::npos) {
                    throw TemplateError("template text before the first role marker", "");
                }
            } else {
                body.push_back(line);
            }
        }
        flush();
        if (tmpl.sections.empty()) {
            throw TemplateError("template has no role sections", "");
        }
        return tmpl;
    }

    static PromptTemplate load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open prompt template: " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    std::vector<Message> render(const std::map<std::string, std::string>& values) const {
        std::vector<Message> out;
        out.reserve(sections.size());
        for (const Message& m : sections) {
            out.push_back(Message{m.role, detail::render_placeholders(m.content, values)});
        }
        return out;
    }

private:
    // "----- role -----" with at least two dashes on each side.
    static std::optional<std::string> parse_marker(const std::string& line) {
        std::size_t a = line.find_first_not_of(" \t");
        if (a == std::string::npos || line[a] != '-') return std::nullopt;
        std::size_t dashes = 0;
        while (a < line.size() && line[a] == '-') ++a, ++dashes;
        if (dashes < 2) return std::nullopt;
        std::size_t b = line.find_last_not_of(" \t");
        if (line[b] != '-') return std::nullopt;
        std::size_t tail = 0;
        while (b != std::string::npos && line[b] == '-') --b, ++tail;
        if (tail < 2 || b == std::string::npos || b < a) return std::nullopt;
        std::string role = line.substr(a, b - a + 1);
        const std::size_t s = role.find_first_not_of(" \t");
        const std::size_t e = role.find_last_not_of(" \t");
        if (s == std::string::npos) return std::nullopt;
        role = role.substr(s, e - s + 1);
        for (char c : role) {
            if (!detail::is_ident_char(c)) return std::nullopt;
        }
        return role;
    }
};

/// Fresh-sample prompt: only {problem} is available.
inline std::vector<Message> build_initial_prompt(const std::string& problem,
                                                 const PromptTemplate& tmpl) {
    return tmpl.render({{"problem", problem}});
}

/// Refinement prompt: embeds the prior program and the failing-conjunct
/// feedback verbatim.
inline std::vector<Message> build_refine_prompt(const std::string& problem,
                                                const std::string& code,
                                                const std::string& feedback,
                                                const PromptTemplate& tmpl) {
    return tmpl.render({{"problem", problem}, {"code", code}, {"feedback", feedback}});
}

} // namespace rex
