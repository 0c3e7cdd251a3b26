#include "lexer.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "gcore/ast.hpp"

namespace gcore {

namespace {

const std::set<std::string> kKeywords = {
    "CONSTRUCT", "MATCH",  "WHERE",    "ON",     "OPTIONAL", "UNION", "INTERSECT",
    "MINUS",     "GRAPH",  "VIEW",     "PATH",   "AS",       "COST",  "SHORTEST",
    "ALL",       "WHEN",   "SET",      "REMOVE", "GROUP",    "CASE",  "THEN",
    "ELSE",      "END",    "EXISTS",   "AND",    "OR",       "NOT",   "IN",
    "SUBSET",    "OF",     "TRUE",     "FALSE",
};

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

}  // namespace

bool is_keyword(const Token& t, const char* kw) {
    return t.kind == Tok::keyword && t.text == kw;
}

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    size_t i = 0;
    int line = 1, col = 1;
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto peek = [&](size_t off = 0) -> char {
        return i + off < text.size() ? text[i + off] : '\0';
    };
    auto emit = [&](Tok kind, std::string tok_text, int l, int c) {
        Token t;
        t.kind = kind;
        t.text = std::move(tok_text);
        t.line = l;
        t.col = c;
        out.push_back(std::move(t));
    };

    while (i < text.size()) {
        char c = peek();
        int l = line, cl = col;
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '-' && peek(1) == '-') {
            while (i < text.size() && peek() != '\n') advance(1);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = i;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
                advance(1);
            std::string word = text.substr(start, i - start);
            if (word == "_") {
                emit(Tok::underscore, word, l, cl);
            } else {
                std::string up = upper(word);
                if (kKeywords.count(up))
                    emit(Tok::keyword, up, l, cl);
                else
                    emit(Tok::identifier, word, l, cl);
            }
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = i;
            while (std::isdigit(static_cast<unsigned char>(peek()))) advance(1);
            bool is_real = false;
            if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                is_real = true;
                advance(1);
                while (std::isdigit(static_cast<unsigned char>(peek()))) advance(1);
            }
            std::string num = text.substr(start, i - start);
            Token t;
            t.line = l;
            t.col = cl;
            t.text = num;
            if (is_real) {
                t.kind = Tok::real_lit;
                t.real_val = std::stod(num);
            } else {
                t.kind = Tok::int_lit;
                t.int_val = std::stoll(num);
            }
            out.push_back(std::move(t));
            continue;
        }
        if (c == '\'') {
            advance(1);
            std::string s;
            bool closed = false;
            while (i < text.size()) {
                if (peek() == '\'' && peek(1) == '\'') {
                    s.push_back('\'');
                    advance(2);
                    continue;
                }
                if (peek() == '\'') {
                    advance(1);
                    closed = true;
                    break;
                }
                s.push_back(peek());
                advance(1);
            }
            if (!closed) throw ParseError("unterminated string literal", l, cl);
            emit(Tok::string_lit, s, l, cl);
            continue;
        }
        switch (c) {
            case '(': emit(Tok::lparen, "(", l, cl); advance(1); continue;
            case ')': emit(Tok::rparen, ")", l, cl); advance(1); continue;
            case '[': emit(Tok::lbracket, "[", l, cl); advance(1); continue;
            case ']': emit(Tok::rbracket, "]", l, cl); advance(1); continue;
            case '{': emit(Tok::lbrace, "{", l, cl); advance(1); continue;
            case '}': emit(Tok::rbrace, "}", l, cl); advance(1); continue;
            case ',': emit(Tok::comma, ",", l, cl); advance(1); continue;
            case '.': emit(Tok::dot, ".", l, cl); advance(1); continue;
            case ';': emit(Tok::semicolon, ";", l, cl); advance(1); continue;
            case '@': emit(Tok::at, "@", l, cl); advance(1); continue;
            case '~': emit(Tok::tilde, "~", l, cl); advance(1); continue;
            case '|': emit(Tok::pipe, "|", l, cl); advance(1); continue;
            case '+': emit(Tok::plus, "+", l, cl); advance(1); continue;
            case '*': emit(Tok::star, "*", l, cl); advance(1); continue;
            case '/': emit(Tok::slash, "/", l, cl); advance(1); continue;
            case '=': emit(Tok::eq, "=", l, cl); advance(1); continue;
            case ':':
                if (peek(1) == '=') {
                    emit(Tok::assign, ":=", l, cl);
                    advance(2);
                } else {
                    emit(Tok::colon, ":", l, cl);
                    advance(1);
                }
                continue;
            case '!':
                if (peek(1) == '=') {
                    emit(Tok::ne, "!=", l, cl);
                    advance(2);
                    continue;
                }
                throw ParseError("unexpected character '!'", l, cl);
            case '<':
                if (peek(1) == '-' && (peek(2) == '[' || peek(2) == '/')) {
                    emit(Tok::arrow_left, "<-", l, cl);
                    advance(2);
                } else if (peek(1) == '=') {
                    emit(Tok::le, "<=", l, cl);
                    advance(2);
                } else if (peek(1) == '>') {
                    emit(Tok::ne, "<>", l, cl);
                    advance(2);
                } else {
                    emit(Tok::lt, "<", l, cl);
                    advance(1);
                }
                continue;
            case '>':
                if (peek(1) == '=') {
                    emit(Tok::ge, ">=", l, cl);
                    advance(2);
                } else {
                    emit(Tok::gt, ">", l, cl);
                    advance(1);
                }
                continue;
            case '-':
                if (peek(1) == '>') {
                    emit(Tok::arrow_right, "->", l, cl);
                    advance(2);
                } else {
                    emit(Tok::minus, "-", l, cl);
                    advance(1);
                }
                continue;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
        }
    }
    Token eof;
    eof.kind = Tok::end;
    eof.line = line;
    eof.col = col;
    out.push_back(eof);
    return out;
}

}  // namespace gcore
