// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qbsde {

/// A compiled arithmetic expression over a fixed list of named variables.
///
/// Grammar (precedence low to high):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := ('+' | '-') unary | power
///     power   := primary ('^' unary)?
///     primary := number | variable | func '(' expr ')' | '(' expr ')'
///     func    := exp | log | abs
///
/// '^' is right-associative and binds tighter than unary minus, so -y^2 is
/// -(y^2). Parse errors throw ConfigError carrying the 1-based column.
class Expression {
 public:
  Expression() = default;

  static Expression parse(std::string_view text,
                          std::initializer_list<std::string_view> variables = {"y"});

  /// Evaluates with the variables bound positionally.
  double operator()(std::span<const double> values) const;
  double operator()(double v0) const {
    const double v[1] = {v0};
    return (*this)(std::span<const double>(v, 1));
  }
  double operator()(double v0, double v1) const {
    const double v[2] = {v0, v1};
    return (*this)(std::span<const double>(v, 2));
  }

  const std::string& text() const noexcept { return text_; }
  std::size_t arity() const noexcept { return arity_; }
  bool empty() const noexcept { return program_.empty(); }

 private:
  enum class Op : unsigned char { constant, variable, add, sub, mul, div, pow, neg, exp, log, abs };
  struct Instr {
    Op op;
    int index = 0;     // variable slot
    double value = 0;  // constant
  };

  friend class ExpressionParser;

  std::string text_;
  std::size_t arity_ = 0;
  std::vector<Instr> program_;
  std::size_t max_stack_ = 0;
};

}  // namespace qbsde
