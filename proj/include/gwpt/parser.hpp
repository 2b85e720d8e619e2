#pragma once

#include "gwpt/rewrite.hpp"

#include <string>

namespace gwpt {

struct ParseError : std::runtime_error {
    size_t position;
    std::string input;
    ParseError(std::string msg, size_t pos, std::string text)
        : std::runtime_error(std::move(msg)), position(pos), input(std::move(text)) {}
    // Two-line diagnostic: the input and a caret under the failure position.
    std::string caret_diagnostic() const;
};

// Grammar:
//   term   := 'Z' ['*'] '[' theory ',' mode ']' '{' geom '}' '_'
//             '(' curveclass ')' '(' relins (' | ' relins)* ' || ' monomial
//             [' || ' atombag] ')' ['@' argscale]
//   theory := 'GW' | 'PT';  mode := 'vir' | 'red' | 'full'
// print(parse(x)) == x on well-formed input; parse(print(b)) == b always.
Bracket parse_bracket(const std::string& text);

// Random well-formed brackets for round-trip fuzzing (deterministic in seed).
Bracket random_bracket(unsigned seed);

} // namespace gwpt
