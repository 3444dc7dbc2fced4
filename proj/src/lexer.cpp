#include "lexer.hpp"

namespace tmkit::detail {

namespace {

bool ident_start(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}

bool ident_continue(unsigned char c) {
    return ident_start(c) || (c >= '0' && c <= '9');
}

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

// Returns the byte offset of the first invalid sequence, or npos.
std::size_t first_invalid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return i;
        }
        if (i + len > s.size()) return i;
        for (std::size_t k = 1; k < len; ++k) {
            auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return i;
            cp = (cp << 6) | (cc & 0x3F);
        }
        const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                              (len == 4 && cp < 0x10000);
        if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
        i += len;
    }
    return std::string_view::npos;
}

}  // namespace

bool is_identifier(std::string_view s) {
    if (s.empty() || !ident_start(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s) {
        if (!ident_continue(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

LexResult lex(std::string_view text, const std::string& file, std::string_view syntax_code) {
    LexResult out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;

    auto fail = [&](int l, int c, std::string msg) {
        out.error = Diagnostic{Severity::Error, std::string(syntax_code), std::move(msg),
                               SourceSpan{file, l, c}};
        out.tokens.push_back(Token{TokenKind::End, {}, l, c});
        return out;
    };

    if (std::size_t bad = first_invalid_utf8(text); bad != std::string_view::npos) {
        int l = 1, c = 1;
        for (std::size_t k = 0; k < bad; ++k) {
            if (text[k] == '\n') {
                ++l;
                c = 1;
            } else {
                ++c;
            }
        }
        return fail(l, c, "input is not valid UTF-8");
    }

    auto advance = [&]() {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++i;
    };

    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance();
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance();
            continue;
        }
        Token tok;
        tok.line = line;
        tok.column = col;
        if (ident_start(c)) {
            std::size_t start = i;
            while (i < text.size() && ident_continue(static_cast<unsigned char>(text[i]))) advance();
            tok.kind = TokenKind::Ident;
            tok.text = std::string(text.substr(start, i - start));
        } else if (is_digit(c)) {
            std::size_t start = i;
            while (i < text.size() && is_digit(static_cast<unsigned char>(text[i]))) advance();
            if (i < text.size() && ident_start(static_cast<unsigned char>(text[i]))) {
                return fail(tok.line, tok.column, "malformed number");
            }
            tok.kind = TokenKind::Number;
            tok.text = std::string(text.substr(start, i - start));
        } else if (c == '"') {
            advance();
            tok.kind = TokenKind::String;
            bool closed = false;
            while (i < text.size()) {
                char ch = text[i];
                if (ch == '\n') break;
                if (ch == '"') {
                    advance();
                    closed = true;
                    break;
                }
                if (ch == '\\' && i + 1 < text.size() && (text[i + 1] == '"' || text[i + 1] == '\\')) {
                    advance();
                    ch = text[i];
                }
                tok.text.push_back(ch);
                advance();
            }
            if (!closed) return fail(tok.line, tok.column, "unterminated string");
        } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            advance();
            advance();
            tok.kind = TokenKind::Punct;
            tok.text = "->";
        } else if (std::string_view("{};,.:=()").find(static_cast<char>(c)) != std::string_view::npos) {
            tok.kind = TokenKind::Punct;
            tok.text = std::string(1, static_cast<char>(c));
            advance();
        } else {
            return fail(line, col, std::string("unexpected character '") + static_cast<char>(c) + "'");
        }
        out.tokens.push_back(std::move(tok));
    }
    out.tokens.push_back(Token{TokenKind::End, {}, line, col});
    return out;
}

}  // namespace tmkit::detail
