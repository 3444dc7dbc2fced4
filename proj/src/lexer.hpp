#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tmkit/diagnostic.hpp"

namespace tmkit::detail {

enum class TokenKind { Ident, Number, String, Punct, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;  // for String, the unescaped contents
    int line = 1;
    int column = 1;
};

struct LexResult {
    std::vector<Token> tokens;  // always terminated by an End token
    std::optional<Diagnostic> error;
};

// Shared tokenizer for model and scenario files. `#` starts a comment that
// runs to end of line. Input must be valid UTF-8.
LexResult lex(std::string_view text, const std::string& file, std::string_view syntax_code);

bool is_identifier(std::string_view s);

}  // namespace tmkit::detail
