#pragma once

// Minimal DOT digraph parser, just enough to validate exported trees:
// `digraph name { stmt; ... }` with node statements `id [k=v, k="v"]` and
// edge statements `a -> b`.

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace testsupport {

struct DotNode {
    std::string id;
    std::map<std::string, std::string> attrs;
};

struct DotEdge {
    std::string from;
    std::string to;
};

struct DotGraph {
    std::string name;
    std::vector<DotNode> nodes;
    std::vector<DotEdge> edges;
    std::map<std::string, std::string> graph_attrs;

    const DotNode* find(const std::string& id) const {
        for (const DotNode& n : nodes) {
            if (n.id == id) return &n;
        }
        return nullptr;
    }
};

class DotParser {
public:
    explicit DotParser(std::string text) : text_(std::move(text)) {}

    DotGraph parse() {
        DotGraph g;
        expect_word("digraph");
        g.name = next_token();
        expect_token("{");
        for (;;) {
            std::string tok = next_token();
            if (tok == "}") break;
            if (tok.empty()) throw std::runtime_error("dot: unexpected end of input");
            if (peek_token() == "->") {
                next_token();
                const std::string to = next_token();
                g.edges.push_back(DotEdge{tok, to});
                skip_optional_attrs();
                expect_token(";");
            } else if (peek_token() == "[") {
                auto attrs = parse_attrs();
                if (tok == "node" || tok == "graph" || tok == "edge") {
                    // defaults; record under graph attrs for visibility
                    for (auto& [k, v] : attrs) g.graph_attrs[tok + "." + k] = v;
                } else {
                    g.nodes.push_back(DotNode{tok, std::move(attrs)});
                }
                expect_token(";");
            } else if (peek_token() == "=") {
                next_token();
                g.graph_attrs[tok] = next_token();
                expect_token(";");
            } else {
                g.nodes.push_back(DotNode{tok, {}});
                expect_token(";");
            }
        }
        return g;
    }

private:
    std::map<std::string, std::string> parse_attrs() {
        std::map<std::string, std::string> attrs;
        expect_token("[");
        for (;;) {
            std::string key = next_token();
            if (key == "]") break;
            expect_token("=");
            attrs[key] = next_token();
            if (peek_token() == ",") next_token();
        }
        return attrs;
    }

    void skip_optional_attrs() {
        if (peek_token() == "[") parse_attrs();
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string peek_token() {
        const std::size_t save = pos_;
        std::string tok = next_token();
        pos_ = save;
        return tok;
    }

    std::string next_token() {
        skip_ws();
        if (pos_ >= text_.size()) return "";
        const char c = text_[pos_];
        if (c == '{' || c == '}' || c == '[' || c == ']' || c == ';' || c == ',' || c == '=') {
            ++pos_;
            return std::string(1, c);
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            pos_ += 2;
            return "->";
        }
        if (c == '"') {
            std::string out;
            ++pos_;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                    out += text_[pos_];
                    ++pos_;
                }
                out += text_[pos_];
                ++pos_;
            }
            if (pos_ >= text_.size()) throw std::runtime_error("dot: unterminated string");
            ++pos_;
            return out;
        }
        std::string out;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               std::string("{}[];,=").find(text_[pos_]) == std::string::npos &&
               !(text_[pos_] == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>')) {
            out += text_[pos_];
            ++pos_;
        }
        if (out.empty()) throw std::runtime_error("dot: cannot tokenize near position " +
                                                  std::to_string(pos_));
        return out;
    }

    void expect_token(const std::string& want) {
        const std::string got = next_token();
        if (got != want) {
            throw std::runtime_error("dot: expected '" + want + "', got '" + got + "'");
        }
    }

    void expect_word(const std::string& want) { expect_token(want); }

    std::string text_;
    std::size_t pos_ = 0;
};

inline DotGraph parse_dot(const std::string& text) { return DotParser(text).parse(); }

} // namespace testsupport
