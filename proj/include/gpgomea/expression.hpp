#ifndef GPGOMEA_EXPRESSION_HPP
#define GPGOMEA_EXPRESSION_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gpgomea/dataset.hpp"

namespace gpgomea {

class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Free-form infix expression, as printed by to_expression_string or typed
// by hand. Grammar:
//   expr    := term (('+' | '-') term)*
//   term    := factor (('*' | '/') factor)*
//   factor  := '-' factor | power
//   power   := primary ('^' factor)?
//   primary := number | name | func '(' expr ')' | '(' expr ')'
// Functions: log sqrt sin cos exp abs tan. Names are x1..xd or the supplied
// feature names. '×', '÷' and '−' are accepted as operators. log, sqrt and
// '/' use the same protected semantics as the tree evaluator.
class Expression {
public:
    static Expression parse(std::string_view text, std::span<const std::string> feature_names = {});

    [[nodiscard]] double evaluate(std::span<const double> row) const;
    [[nodiscard]] std::vector<double> evaluate(const Batch& batch) const;

    [[nodiscard]] std::size_t node_count() const noexcept { return program_.size(); }
    // Highest referenced feature index plus one.
    [[nodiscard]] std::size_t features_used() const noexcept { return features_used_; }

    enum class Code : std::uint8_t { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Log, Sqrt, Sin, Cos, Exp, Abs, Tan };
    struct Instr {
        Code code;
        double value;
        std::uint32_t feature;
    };

private:
    std::vector<Instr> program_; // postfix
    std::size_t features_used_ { 0 };
};

} // namespace gpgomea

#endif
