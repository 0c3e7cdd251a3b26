#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gcore {

enum class Tok {
    end,
    identifier,
    keyword,  // normalized to upper case in text
    string_lit,
    int_lit,
    real_lit,
    lparen, rparen, lbracket, rbracket, lbrace, rbrace,
    comma, dot, colon, assign,            // , . : :=
    eq, ne, lt, le, gt, ge,               // = != < <= > >=
    plus, minus, star, slash,
    arrow_right, arrow_left,              // -> and <- (only before [ or /)
    at, tilde, pipe, semicolon, underscore,
};

struct Token {
    Tok kind = Tok::end;
    std::string text;
    int64_t int_val = 0;
    double real_val = 0;
    int line = 1, col = 1;
};

// Tokenizes the whole input; throws ParseError on malformed literals.
// Keywords are case-insensitive; '--' starts a comment running to the end of
// the line.
std::vector<Token> tokenize(const std::string& text);

bool is_keyword(const Token& t, const char* kw);

}  // namespace gcore
