#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "forge/error.hpp"

namespace forge {

// Character cursor shared by the small hand-written parsers. Tracks line and
// column for error reports; `#` starts a comment running to end of line.
class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    void skip_space()
    {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    bool at_end()
    {
        skip_space();
        return pos_ >= text_.size();
    }

    char peek()
    {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    // Next raw character without skipping whitespace.
    char peek_raw() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool try_consume(std::string_view token)
    {
        skip_space();
        if (text_.substr(pos_, token.size()) != token)
            return false;
        for (std::size_t i = 0; i < token.size(); ++i)
            advance();
        return true;
    }

    // Consumes `word` only when it is not followed by an identifier character.
    bool try_keyword(std::string_view word)
    {
        skip_space();
        if (text_.substr(pos_, word.size()) != word)
            return false;
        std::size_t end = pos_ + word.size();
        if (end < text_.size() && is_ident_char(text_[end]))
            return false;
        for (std::size_t i = 0; i < word.size(); ++i)
            advance();
        return true;
    }

    void expect(std::string_view token)
    {
        if (!try_consume(token))
            fail("expected '" + std::string(token) + "'");
    }

    bool at_ident()
    {
        skip_space();
        return pos_ < text_.size() && is_ident_char(text_[pos_]);
    }

    std::string ident()
    {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_]))
            advance();
        if (start == pos_)
            fail("expected identifier");
        return std::string(text_.substr(start, pos_ - start));
    }

    std::size_t number()
    {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            advance();
        if (start == pos_)
            fail("expected number");
        return std::stoul(std::string(text_.substr(start, pos_ - start)));
    }

    [[noreturn]] void fail(const std::string& message)
    {
        std::string found = pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'" : "end of input";
        throw ParseError(message + ", found " + found, line_, column_);
    }

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    std::size_t offset() const { return pos_; }

    static bool is_ident_char(char c)
    {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\'';
    }

private:
    void advance()
    {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

}  // namespace forge
