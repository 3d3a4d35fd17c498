#include "gpgomea/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "gpgomea/evaluator.hpp"

namespace gpgomea {

namespace {

using Code = Expression::Code;
using Instr = Expression::Instr;

class Parser {
public:
    Parser(std::string_view text, std::span<const std::string> names, std::vector<Instr>& out)
        : text_(text)
        , names_(names)
        , out_(out)
    {
    }

    void parse()
    {
        expr();
        skip_space();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError("cannot parse expression '" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    // Matches one of the operator spellings; returns the ASCII form or 0.
    char peek_operator()
    {
        skip_space();
        if (pos_ >= text_.size()) {
            return 0;
        }
        auto rest = text_.substr(pos_);
        if (rest.starts_with("×")) {
            return '*';
        }
        if (rest.starts_with("÷")) {
            return '/';
        }
        if (rest.starts_with("−")) {
            return '-';
        }
        char c = rest.front();
        if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
            return c;
        }
        return 0;
    }

    void consume_operator()
    {
        auto rest = text_.substr(pos_);
        if (rest.starts_with("×") || rest.starts_with("÷")) {
            pos_ += 2;
        } else if (rest.starts_with("−")) {
            pos_ += 3;
        } else {
            pos_ += 1;
        }
    }

    void expr()
    {
        term();
        for (char op = peek_operator(); op == '+' || op == '-'; op = peek_operator()) {
            consume_operator();
            term();
            out_.push_back({ op == '+' ? Code::Add : Code::Sub, 0.0, 0 });
        }
    }

    void term()
    {
        factor();
        for (char op = peek_operator(); op == '*' || op == '/'; op = peek_operator()) {
            consume_operator();
            factor();
            out_.push_back({ op == '*' ? Code::Mul : Code::Div, 0.0, 0 });
        }
    }

    void factor()
    {
        if (peek_operator() == '-') {
            consume_operator();
            skip_space();
            // a signed literal is a single constant
            if (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
                auto before = out_.size();
                power();
                if (out_.size() == before + 1 && out_.back().code == Code::Const) {
                    out_.back().value = -out_.back().value;
                } else {
                    out_.push_back({ Code::Neg, 0.0, 0 });
                }
                return;
            }
            factor();
            out_.push_back({ Code::Neg, 0.0, 0 });
            return;
        }
        power();
    }

    void power()
    {
        primary();
        if (peek_operator() == '^') {
            consume_operator();
            factor();
            out_.push_back({ Code::Pow, 0.0, 0 });
        }
    }

    void primary()
    {
        skip_space();
        if (pos_ >= text_.size()) {
            fail("unexpected end of input");
        }
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            expr();
            skip_space();
            if (pos_ >= text_.size() || text_[pos_] != ')') {
                fail("expected ')'");
            }
            ++pos_;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            auto start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '.')) {
                ++pos_;
            }
            auto name = text_.substr(start, pos_ - start);
            skip_space();
            if (pos_ < text_.size() && text_[pos_] == '(') {
                function_call(name);
            } else {
                variable(name);
            }
            return;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    void number()
    {
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
        if (ec != std::errc {}) {
            fail("bad number");
        }
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        out_.push_back({ Code::Const, value, 0 });
    }

    void function_call(std::string_view name)
    {
        static constexpr std::pair<std::string_view, Code> table[] = {
            { "log", Code::Log }, { "sqrt", Code::Sqrt }, { "sin", Code::Sin }, { "cos", Code::Cos },
            { "exp", Code::Exp }, { "abs", Code::Abs }, { "tan", Code::Tan },
        };
        Code code {};
        bool found = false;
        for (auto [n, cd] : table) {
            if (n == name) {
                code = cd;
                found = true;
            }
        }
        if (!found) {
            fail("unknown function '" + std::string(name) + "'");
        }
        ++pos_; // '('
        expr();
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != ')') {
            fail("expected ')'");
        }
        ++pos_;
        out_.push_back({ code, 0.0, 0 });
    }

    void variable(std::string_view name)
    {
        for (std::size_t j = 0; j < names_.size(); ++j) {
            if (names_[j] == name) {
                out_.push_back({ Code::Var, 0.0, static_cast<std::uint32_t>(j) });
                return;
            }
        }
        if (name.size() > 1 && name.front() == 'x') {
            std::uint32_t index = 0;
            auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
            if (ec == std::errc {} && ptr == name.data() + name.size() && index >= 1) {
                out_.push_back({ Code::Var, 0.0, index - 1 });
                return;
            }
        }
        fail("unknown variable '" + std::string(name) + "'");
    }

    std::string_view text_;
    std::span<const std::string> names_;
    std::vector<Instr>& out_;
    std::size_t pos_ { 0 };
};

} // namespace

Expression Expression::parse(std::string_view text, std::span<const std::string> feature_names)
{
    Expression e;
    Parser(text, feature_names, e.program_).parse();
    for (const auto& instr : e.program_) {
        if (instr.code == Code::Var) {
            e.features_used_ = std::max<std::size_t>(e.features_used_, instr.feature + 1);
        }
    }
    return e;
}

double Expression::evaluate(std::span<const double> row) const
{
    std::vector<double> stack;
    stack.reserve(program_.size());
    for (const auto& instr : program_) {
        switch (instr.code) {
        case Code::Const: stack.push_back(instr.value); continue;
        case Code::Var: stack.push_back(row[instr.feature]); continue;
        default: break;
        }
        double& top = stack.back();
        switch (instr.code) {
        case Code::Neg: top = -top; continue;
        case Code::Log: top = protected_log(top); continue;
        case Code::Sqrt: top = protected_sqrt(top); continue;
        case Code::Sin: top = std::sin(top); continue;
        case Code::Cos: top = std::cos(top); continue;
        case Code::Exp: top = std::exp(top); continue;
        case Code::Abs: top = std::abs(top); continue;
        case Code::Tan: top = std::tan(top); continue;
        default: break;
        }
        double rhs = stack.back();
        stack.pop_back();
        double& lhs = stack.back();
        switch (instr.code) {
        case Code::Add: lhs = lhs + rhs; break;
        case Code::Sub: lhs = lhs - rhs; break;
        case Code::Mul: lhs = lhs * rhs; break;
        case Code::Div: lhs = protected_div(lhs, rhs); break;
        case Code::Pow: lhs = std::pow(lhs, rhs); break;
        default: break;
        }
    }
    return stack.back();
}

std::vector<double> Expression::evaluate(const Batch& batch) const
{
    if (features_used_ > batch.columns.size()) {
        throw ParseError("expression uses feature x" + std::to_string(features_used_) + " but the data has " + std::to_string(batch.columns.size()));
    }
    std::vector<double> row(batch.columns.size());
    std::vector<double> out(batch.rows());
    for (std::size_t i = 0; i < batch.rows(); ++i) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            row[j] = batch.columns[j][i];
        }
        out[i] = evaluate(row);
    }
    return out;
}

} // namespace gpgomea
