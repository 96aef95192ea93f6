// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "qbsde/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "qbsde/errors.hpp"

namespace qbsde {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, std::vector<std::string> vars)
      : text_(text), vars_(std::move(vars)) {}

  Expression run() {
    Expression e;
    e.text_ = std::string(text_);
    e.arity_ = vars_.size();
    out_ = &e.program_;
    parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    if (e.program_.empty()) fail("empty expression");
    e.max_stack_ = max_depth_;
    return e;
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression '" + std::string(text_) + "', column " +
                      std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(Op op, int index = 0, double value = 0.0) {
    out_->push_back({op, index, value});
    switch (op) {
      case Op::constant:
      case Op::variable:
        ++depth_;
        break;
      case Op::add: case Op::sub: case Op::mul: case Op::div: case Op::pow:
        --depth_;
        break;
      default:
        break;
    }
    if (depth_ > max_depth_) max_depth_ = depth_;
  }

  void parse_expr() {
    parse_term();
    for (;;) {
      if (accept('+')) {
        parse_term();
        emit(Op::add);
      } else if (accept('-')) {
        parse_term();
        emit(Op::sub);
      } else {
        return;
      }
    }
  }

  void parse_term() {
    parse_unary();
    for (;;) {
      if (accept('*')) {
        parse_unary();
        emit(Op::mul);
      } else if (accept('/')) {
        parse_unary();
        emit(Op::div);
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    if (accept('-')) {
      parse_unary();
      emit(Op::neg);
    } else if (accept('+')) {
      parse_unary();
    } else {
      parse_power();
    }
  }

  void parse_power() {
    parse_primary();
    if (accept('^')) {
      parse_unary();
      emit(Op::pow);
    }
  }

  void parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::string rest(text_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - rest.c_str());
      emit(Op::constant, 0, v);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name(text_.substr(start, pos_ - start));
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == name) {
          emit(Op::variable, static_cast<int>(i));
          return;
        }
      }
      Op fn;
      if (name == "exp") {
        fn = Op::exp;
      } else if (name == "log") {
        fn = Op::log;
      } else if (name == "abs") {
        fn = Op::abs;
      } else {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      if (!accept('(')) fail("expected '(' after " + name);
      parse_expr();
      if (!accept(')')) fail("expected ')'");
      emit(fn);
      return;
    }
    if (accept('(')) {
      parse_expr();
      if (!accept(')')) fail("expected ')'");
      return;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::vector<std::string> vars_;
  std::vector<Expression::Instr>* out_ = nullptr;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
  std::size_t max_depth_ = 0;
};

Expression Expression::parse(std::string_view text,
                             std::initializer_list<std::string_view> variables) {
  std::vector<std::string> vars;
  for (auto v : variables) vars.emplace_back(v);
  return ExpressionParser(text, std::move(vars)).run();
}

double Expression::operator()(std::span<const double> values) const {
  // Expressions from config files are short; a fixed stack covers them.
  constexpr std::size_t kStack = 64;
  if (max_stack_ > kStack) throw ConfigError("expression too deeply nested: " + text_);
  double st[kStack];
  std::size_t sp = 0;
  for (const Instr& in : program_) {
    switch (in.op) {
      case Op::constant: st[sp++] = in.value; break;
      case Op::variable: st[sp++] = values[static_cast<std::size_t>(in.index)]; break;
      case Op::add: --sp; st[sp - 1] += st[sp]; break;
      case Op::sub: --sp; st[sp - 1] -= st[sp]; break;
      case Op::mul: --sp; st[sp - 1] *= st[sp]; break;
      case Op::div: --sp; st[sp - 1] /= st[sp]; break;
      case Op::pow: {
        --sp;
        const double e = st[sp];
        const double b = st[sp - 1];
        if (e == 2.0) {
          st[sp - 1] = b * b;
        } else if (e == std::round(e) && std::abs(e) < 64) {
          st[sp - 1] = std::pow(b, static_cast<int>(e));
        } else {
          st[sp - 1] = std::pow(b, e);
        }
        break;
      }
      case Op::neg: st[sp - 1] = -st[sp - 1]; break;
      case Op::exp: st[sp - 1] = std::exp(st[sp - 1]); break;
      case Op::log: st[sp - 1] = std::log(st[sp - 1]); break;
      case Op::abs: st[sp - 1] = std::abs(st[sp - 1]); break;
    }
  }
  return st[0];
}

}  // namespace qbsde
