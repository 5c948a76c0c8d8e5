#pragma once
// Line-based triple text format: `<s> <p> <o> .` with IRIs in angle brackets,
// blank nodes as `_:bN` and plain double-quoted literals.

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "exprkg/errors.hpp"
#include "exprkg/rdf_store.hpp"
#include "exprkg/text.hpp"

namespace exprkg::ntriples {

inline std::string escape_literal(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string render(const Term& t) {
    if (const auto* i = std::get_if<Iri>(&t)) return "<" + i->text + ">";
    if (const auto* b = std::get_if<Blank>(&t)) return blank_label(*b);
    return "\"" + escape_literal(std::get<Literal>(t).lexical) + "\"";
}

inline std::string render(const Triple& t) {
    return render(t.subject) + " <" + t.predicate.text + "> " + render(t.object) + " .";
}

inline void write(std::ostream& out, const Graph& g) {
    for (const auto& t : g.triples()) out << render(t) << '\n';
}

inline std::string to_string(const Graph& g) {
    std::ostringstream out;
    write(out, g);
    return out.str();
}

namespace detail {

struct Cursor {
    std::string_view s;
    std::size_t pos = 0;
    std::size_t line;

    void skip_ws() {
        while (pos < s.size() && text::is_space(s[pos])) ++pos;
    }
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line); }

    Term term() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of line");
        char c = s[pos];
        if (c == '<') {
            auto end = s.find('>', pos + 1);
            if (end == std::string_view::npos) fail("unterminated IRI");
            std::string iri(s.substr(pos + 1, end - pos - 1));
            if (iri.empty()) fail("empty IRI");
            pos = end + 1;
            return Iri{std::move(iri)};
        }
        if (c == '_') {
            auto end = pos;
            while (end < s.size() && !text::is_space(s[end])) ++end;
            auto label = s.substr(pos, end - pos);
            auto n = text::starts_with(label, "_:b") ? text::parse_int(label.substr(3)) : std::nullopt;
            if (!n || *n < 0) fail("malformed blank node '" + std::string(label) + "'");
            pos = end;
            return Blank{static_cast<std::uint64_t>(*n)};
        }
        if (c == '"') {
            std::string lex;
            ++pos;
            for (;;) {
                if (pos >= s.size()) fail("unterminated literal");
                char d = s[pos++];
                if (d == '"') break;
                if (d != '\\') {
                    lex += d;
                    continue;
                }
                if (pos >= s.size()) fail("dangling escape in literal");
                char e = s[pos++];
                switch (e) {
                case '\\': lex += '\\'; break;
                case '"': lex += '"'; break;
                case 'n': lex += '\n'; break;
                case 'r': lex += '\r'; break;
                case 't': lex += '\t'; break;
                default: fail(std::string("unknown escape \\") + e);
                }
            }
            return Literal{std::move(lex)};
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

} // namespace detail

/// Parses one non-empty, non-comment line into a triple.
inline Triple parse_line(std::string_view line, std::size_t line_no = 0) {
    detail::Cursor cur{line, 0, line_no};
    Term s = cur.term();
    if (is_literal(s)) cur.fail("literal in subject position");
    Term p = cur.term();
    if (!is_iri(p)) cur.fail("predicate must be an IRI");
    Term o = cur.term();
    cur.skip_ws();
    if (cur.pos >= line.size() || line[cur.pos] != '.') cur.fail("expected '.' terminator");
    ++cur.pos;
    cur.skip_ws();
    if (cur.pos != line.size()) cur.fail("trailing content after '.'");
    return {std::move(s), std::get<Iri>(std::move(p)), std::move(o)};
}

inline Graph read(std::istream& in) {
    Graph g;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        auto body = text::trim(line);
        if (body.empty() || body.front() == '#') continue;
        g.insert(parse_line(body, n));
    }
    return g;
}

} // namespace exprkg::ntriples
