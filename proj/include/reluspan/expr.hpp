#pragma once

// A small expression language for targets on the command line.
//
//   expr    := expr ('+' | '-') expr | expr ('*' | '/') expr
//            | '-' expr | expr '^' expr
//            | number | 'x' | 'pi' | name '(' expr ')' | '(' expr ')'
//   name    := abs | sqrt | sin | cos | exp_neg_sq | arctan | relu
//   number  := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
//            | '.' digits [exponent]
//
// Binding, loosest first: + -, then * /, then unary minus, then ^.
// Binary operators associate to the left except ^, which associates to the
// right. There is no implicit multiplication. exp_neg_sq(u) = exp(-u^2).

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "reluspan/core.hpp"

namespace reluspan {

enum class UnaryOp { neg, abs, sqrt, sin, cos, exp_neg_sq, arctan, relu };
enum class BinaryOp { add, sub, mul, div, pow };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  struct Constant {
    double value;
  };
  struct Variable {};
  struct Unary {
    UnaryOp op;
    ExprPtr child;
  };
  struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
  };

  std::variant<Constant, Variable, Unary, Binary> node;
};

/// Immutable expression tree in the single variable x.
class ExprAst {
 public:
  explicit ExprAst(ExprPtr root);

  const ExprNode& root() const noexcept { return *root_; }

  /// Throws DomainError when an operation leaves its domain or overflows.
  double operator()(double x) const;

 private:
  ExprPtr root_;
};

/// Deepest parenthesis / operator nesting accepted by the parser.
inline constexpr int kMaxExpressionDepth = 256;

/// Throws ParseError carrying the byte offset of the offending input.
ExprAst parse_expression(std::string_view source);

double eval_ast(const ExprAst& ast, double x);

/// Fully parenthesized text that parses back to an equivalent tree.
std::string print_expression(const ExprAst& ast);

const char* to_string(UnaryOp op) noexcept;

/// Wraps the expression as a target in Y. Missing alphas are estimated on
/// use. Throws NotInY when the expression cannot be evaluated at ±2^20.
YTarget to_target(const ExprAst& ast, std::optional<double> alpha_plus,
                  std::optional<double> alpha_minus, std::string label = {});

}  // namespace reluspan
