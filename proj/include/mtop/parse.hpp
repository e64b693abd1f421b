#pragma once

// S-expression reader for map descriptions.
//
//   map    := "(entries" sexpr{n} ")" | "(compose" map map ")"
//           | "(sum" num map num map ")" | "(diag (" num{n} ")" map ")"
//   sexpr  := "(x" int ")" | "(avg" rval "(" num{n} "))"
//           | "(+" sexpr+ ")" | "(*" num sexpr ")"
//   rval   := decimal | "inf" | "-inf"
//
// Whitespace-insensitive; ";" starts a comment running to end of line.

#include <cctype>
#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "mtop/expr.hpp"

namespace mtop {

namespace detail {

struct Token {
    enum class Kind { LParen, RParen, Atom, End };
    Kind kind = Kind::End;
    std::string text;
    int line = 0;
    int col = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ';') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (c == '\n') {
                ++pos_;
                ++line_;
                col_ = 1;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
                ++col_;
            } else {
                break;
            }
        }
        tok_ = Token{Token::Kind::End, "", line_, col_};
        if (pos_ >= src_.size()) return;
        char c = src_[pos_];
        if (c == '(' || c == ')') {
            tok_.kind = c == '(' ? Token::Kind::LParen : Token::Kind::RParen;
            tok_.text = std::string(1, c);
            ++pos_;
            ++col_;
            return;
        }
        tok_.kind = Token::Kind::Atom;
        size_t start = pos_;
        while (pos_ < src_.size()) {
            char d = src_[pos_];
            if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
            ++pos_;
            ++col_;
        }
        tok_.text = std::string(src_.substr(start, pos_ - start));
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
};

class MapParser {
public:
    explicit MapParser(std::string_view src) : lex_(src) {}

    MapExpr parse() {
        MapExpr m = parse_map();
        expect_end();
        return m;
    }

private:
    [[noreturn]] void fail(const std::string& msg, const Token& t) { throw ParseError(msg, t.line, t.col); }

    Token expect(Token::Kind k, const char* what) {
        Token t = lex_.take();
        if (t.kind != k) fail(std::string("expected ") + what, t);
        return t;
    }

    void expect_end() {
        Token t = lex_.take();
        if (t.kind != Token::Kind::End) fail("trailing input after map expression", t);
    }

    std::string head() {
        expect(Token::Kind::LParen, "'('");
        Token t = lex_.take();
        if (t.kind != Token::Kind::Atom) fail("expected operator symbol", t);
        return t.text;
    }

    double parse_number() {
        Token t = lex_.take();
        if (t.kind != Token::Kind::Atom) fail("expected a number", t);
        return number_from(t);
    }

    double number_from(const Token& t) {
        const std::string& s = t.text;
        double out = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc{} || p != s.data() + s.size()) fail("malformed number '" + s + "'", t);
        return out;
    }

    double parse_rval() {
        Token t = lex_.take();
        if (t.kind != Token::Kind::Atom) fail("expected an exponent", t);
        if (t.text == "inf") return kInf;
        if (t.text == "-inf") return -kInf;
        return number_from(t);
    }

    std::vector<double> parse_number_list() {
        expect(Token::Kind::LParen, "'('");
        std::vector<double> out;
        while (lex_.peek().kind == Token::Kind::Atom) out.push_back(parse_number());
        expect(Token::Kind::RParen, "')'");
        return out;
    }

    ScalarExpr parse_scalar() {
        Token open = lex_.peek();
        std::string op = head();
        if (op == "x") {
            Token t = lex_.take();
            if (t.kind != Token::Kind::Atom) fail("expected a variable index", t);
            int idx = 0;
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), idx);
            if (ec != std::errc{} || p != t.text.data() + t.text.size() || idx < 1)
                fail("malformed variable index '" + t.text + "'", t);
            expect(Token::Kind::RParen, "')'");
            return ScalarExpr::var(idx);
        }
        if (op == "avg") {
            double r = parse_rval();
            Token wtok = lex_.peek();
            std::vector<double> raw = parse_number_list();
            expect(Token::Kind::RParen, "')'");
            try {
                return ScalarExpr::avg(r, Weights::normalized(std::move(raw)));
            } catch (const Error& e) {
                fail(e.what(), wtok);
            }
        }
        if (op == "+") {
            std::vector<ScalarExpr::Term> terms;
            while (lex_.peek().kind == Token::Kind::LParen) terms.push_back(parse_term());
            if (terms.empty()) fail("'+' needs at least one term", lex_.peek());
            expect(Token::Kind::RParen, "')'");
            if (terms.size() == 1 && terms[0].coeff == 1.0) return terms[0].expr;
            return ScalarExpr::lin_comb(std::move(terms));
        }
        if (op == "*") {
            Token ctok = lex_.peek();
            double c = parse_number();
            if (!(c > 0.0)) fail("coefficient must be strictly positive", ctok);
            ScalarExpr::Term t = {c, parse_scalar()};
            expect(Token::Kind::RParen, "')'");
            std::vector<ScalarExpr::Term> terms;
            terms.push_back(std::move(t));
            return ScalarExpr::lin_comb(std::move(terms));
        }
        fail("unknown scalar operator '" + op + "'", open);
    }

    /// A "+" child: a plain scalar carries coefficient 1, while "(* c s)"
    /// folds its coefficient into the enclosing combination.
    ScalarExpr::Term parse_term() {
        Token open = lex_.peek();
        ScalarExpr s = parse_scalar();
        if (auto* lc = std::get_if<ScalarExpr::LinComb>(&s.node()); lc && lc->terms.size() == 1)
            return lc->terms[0];
        (void)open;
        return ScalarExpr::Term{1.0, std::move(s)};
    }

    MapExpr parse_map() {
        Token open = lex_.peek();
        std::string op = head();
        if (op == "entries") {
            std::vector<ScalarExpr> es;
            while (lex_.peek().kind == Token::Kind::LParen) es.push_back(parse_scalar());
            if (es.empty()) fail("'entries' needs at least one entry", lex_.peek());
            expect(Token::Kind::RParen, "')'");
            return MapExpr::entries(std::move(es));
        }
        if (op == "compose") {
            MapExpr outer = parse_map();
            MapExpr inner = parse_map();
            expect(Token::Kind::RParen, "')'");
            return MapExpr::compose(std::move(outer), std::move(inner));
        }
        if (op == "sum") {
            Token atok = lex_.peek();
            double a = parse_number();
            if (!(a > 0.0)) fail("coefficient must be strictly positive", atok);
            MapExpr f = parse_map();
            Token btok = lex_.peek();
            double b = parse_number();
            if (!(b > 0.0)) fail("coefficient must be strictly positive", btok);
            MapExpr g = parse_map();
            expect(Token::Kind::RParen, "')'");
            return MapExpr::sum(a, std::move(f), b, std::move(g));
        }
        if (op == "diag") {
            std::vector<double> d = parse_number_list();
            MapExpr f = parse_map();
            expect(Token::Kind::RParen, "')'");
            return MapExpr::diag_scale(std::move(d), std::move(f));
        }
        fail("unknown map operator '" + op + "'", open);
    }

    Lexer lex_;
};

} // namespace detail

/// Parses and validates a map description. Throws ParseError with source
/// position on malformed text, ValidateError on structural violations.
inline MapExpr parse_map(std::string_view text) {
    detail::MapParser p(text);
    MapExpr m = p.parse();
    validate(m);
    return m;
}

} // namespace mtop
