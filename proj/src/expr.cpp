#include "reluspan/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "reluspan/errors.hpp"
#include "reluspan/io.hpp"

namespace reluspan {
namespace {

enum class TokenKind { number, identifier, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
  TokenKind kind;
  std::size_t position;
  std::string_view text;
  double value = 0.0;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || c == '.') {
      while (i < src.size() && is_digit(src[i])) ++i;
      const std::size_t int_digits = i - start;
      std::size_t frac_digits = 0;
      if (i < src.size() && src[i] == '.') {
        ++i;
        const std::size_t frac_start = i;
        while (i < src.size() && is_digit(src[i])) ++i;
        frac_digits = i - frac_start;
      }
      if (int_digits == 0 && frac_digits == 0) {
        throw ParseError(ParseError::Kind::lexical, start, "malformed number");
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        ++i;
        if (i < src.size() && (src[i] == '+' || src[i] == '-')) ++i;
        const std::size_t exp_start = i;
        while (i < src.size() && is_digit(src[i])) ++i;
        if (i == exp_start) throw ParseError(ParseError::Kind::lexical, start, "malformed exponent");
      }
      const std::string_view text = src.substr(start, i - start);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec == std::errc::result_out_of_range || (ec == std::errc() && !std::isfinite(value))) {
        throw ParseError(ParseError::Kind::lexical, start, "number out of range");
      }
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError(ParseError::Kind::lexical, start, "malformed number");
      }
      tokens.push_back({TokenKind::number, start, text, value});
      continue;
    }
    if (is_ident_start(c)) {
      while (i < src.size() && is_ident_char(src[i])) ++i;
      tokens.push_back({TokenKind::identifier, start, src.substr(start, i - start)});
      continue;
    }
    TokenKind kind;
    switch (c) {
      case '+': kind = TokenKind::plus; break;
      case '-': kind = TokenKind::minus; break;
      case '*': kind = TokenKind::star; break;
      case '/': kind = TokenKind::slash; break;
      case '^': kind = TokenKind::caret; break;
      case '(': kind = TokenKind::lparen; break;
      case ')': kind = TokenKind::rparen; break;
      default: {
        const auto byte = static_cast<unsigned char>(c);
        std::string shown = byte >= 0x20 && byte < 0x7f ? std::string("'") + c + "'"
                                                       : "byte " + std::to_string(byte);
        throw ParseError(ParseError::Kind::lexical, start, "unexpected character " + shown);
      }
    }
    tokens.push_back({kind, start, src.substr(start, 1)});
    ++i;
  }
  tokens.push_back({TokenKind::end, src.size(), {}});
  return tokens;
}

std::optional<UnaryOp> function_named(std::string_view name) {
  if (name == "abs") return UnaryOp::abs;
  if (name == "sqrt") return UnaryOp::sqrt;
  if (name == "sin") return UnaryOp::sin;
  if (name == "cos") return UnaryOp::cos;
  if (name == "exp_neg_sq") return UnaryOp::exp_neg_sq;
  if (name == "arctan") return UnaryOp::arctan;
  if (name == "relu") return UnaryOp::relu;
  return std::nullopt;
}

constexpr int kAdditive = 10;
constexpr int kMultiplicative = 20;
constexpr int kPrefixMinus = 30;
constexpr int kPower = 40;

int left_binding_power(TokenKind kind) {
  switch (kind) {
    case TokenKind::plus:
    case TokenKind::minus: return kAdditive;
    case TokenKind::star:
    case TokenKind::slash: return kMultiplicative;
    case TokenKind::caret: return kPower;
    default: return 0;
  }
}

std::string describe(const Token& t) {
  if (t.kind == TokenKind::end) return "end of input";
  return "'" + std::string(t.text) + "'";
}

ExprPtr make(ExprNode::Constant c) { return std::make_shared<const ExprNode>(ExprNode{c}); }
ExprPtr make_variable() { return std::make_shared<const ExprNode>(ExprNode{ExprNode::Variable{}}); }
ExprPtr make(UnaryOp op, ExprPtr child) {
  return std::make_shared<const ExprNode>(ExprNode{ExprNode::Unary{op, std::move(child)}});
}
ExprPtr make(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const ExprNode>(
      ExprNode{ExprNode::Binary{op, std::move(lhs), std::move(rhs)}});
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  ExprPtr parse() {
    ExprPtr root = expression(0, 0);
    if (peek().kind != TokenKind::end) {
      throw ParseError(ParseError::Kind::syntax, peek().position,
                       "unexpected " + describe(peek()));
    }
    return root;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }

  void expect(TokenKind kind, const char* what) {
    if (peek().kind != kind) {
      throw ParseError(ParseError::Kind::syntax, peek().position,
                       std::string("expected ") + what + ", found " + describe(peek()));
    }
    next();
  }

  ExprPtr expression(int right_binding, int depth) {
    if (depth > kMaxExpressionDepth) {
      throw ParseError(ParseError::Kind::syntax, peek().position, "expression nested too deeply");
    }
    ExprPtr left = prefix(depth);
    while (left_binding_power(peek().kind) > right_binding) {
      const Token op = next();
      switch (op.kind) {
        case TokenKind::plus: left = make(BinaryOp::add, left, expression(kAdditive, depth + 1)); break;
        case TokenKind::minus: left = make(BinaryOp::sub, left, expression(kAdditive, depth + 1)); break;
        case TokenKind::star: left = make(BinaryOp::mul, left, expression(kMultiplicative, depth + 1)); break;
        case TokenKind::slash: left = make(BinaryOp::div, left, expression(kMultiplicative, depth + 1)); break;
        // Right-associative: the right operand may itself contain '^'.
        case TokenKind::caret: left = make(BinaryOp::pow, left, expression(kPower - 1, depth + 1)); break;
        default: break;
      }
    }
    return left;
  }

  ExprPtr prefix(int depth) {
    const Token t = next();
    switch (t.kind) {
      case TokenKind::number: return make(ExprNode::Constant{t.value});
      case TokenKind::minus: return make(UnaryOp::neg, expression(kPrefixMinus, depth + 1));
      case TokenKind::lparen: {
        ExprPtr inner = expression(0, depth + 1);
        expect(TokenKind::rparen, "')'");
        return inner;
      }
      case TokenKind::identifier: {
        if (t.text == "x") return make_variable();
        if (t.text == "pi") return make(ExprNode::Constant{std::numbers::pi});
        if (peek().kind != TokenKind::lparen) {
          throw ParseError(ParseError::Kind::syntax, t.position,
                           "unknown identifier '" + std::string(t.text) + "'");
        }
        const auto op = function_named(t.text);
        if (!op) {
          throw ParseError(ParseError::Kind::unknown_function, t.position,
                           "unknown function '" + std::string(t.text) + "'");
        }
        next();
        ExprPtr arg = expression(0, depth + 1);
        expect(TokenKind::rparen, "')'");
        return make(*op, std::move(arg));
      }
      default:
        throw ParseError(ParseError::Kind::syntax, t.position, "unexpected " + describe(t));
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

double checked(const char* op, double result, double x) {
  if (!std::isfinite(result)) throw DomainError(op, result, x);
  return result;
}

double evaluate(const ExprNode& node, double x) {
  return std::visit(
      [x](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ExprNode::Constant>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, ExprNode::Variable>) {
          return x;
        } else if constexpr (std::is_same_v<T, ExprNode::Unary>) {
          const double u = evaluate(*n.child, x);
          switch (n.op) {
            case UnaryOp::neg: return -u;
            case UnaryOp::abs: return std::abs(u);
            case UnaryOp::sqrt:
              if (u < 0.0) throw DomainError("sqrt", u, x);
              return std::sqrt(u);
            case UnaryOp::sin: return std::sin(u);
            case UnaryOp::cos: return std::cos(u);
            case UnaryOp::exp_neg_sq: return std::exp(-u * u);
            case UnaryOp::arctan: return std::atan(u);
            case UnaryOp::relu: return relu(u);
          }
          return u;
        } else {
          const double l = evaluate(*n.lhs, x);
          const double r = evaluate(*n.rhs, x);
          switch (n.op) {
            case BinaryOp::add: return checked("addition", l + r, x);
            case BinaryOp::sub: return checked("subtraction", l - r, x);
            case BinaryOp::mul: return checked("multiplication", l * r, x);
            case BinaryOp::div:
              if (r == 0.0) throw DomainError("division", r, x);
              return checked("division", l / r, x);
            case BinaryOp::pow:
              if (l == 0.0 && r < 0.0) throw DomainError("power", r, x);
              if (l < 0.0 && std::trunc(r) != r) throw DomainError("power", l, x);
              return checked("power", std::pow(l, r), x);
          }
          return l;
        }
      },
      node.node);
}

void print(const ExprNode& node, std::string& out) {
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ExprNode::Constant>) {
          if (std::signbit(n.value)) {
            out += '(';
            out += format_number(n.value);
            out += ')';
          } else {
            out += format_number(n.value);
          }
        } else if constexpr (std::is_same_v<T, ExprNode::Variable>) {
          out += 'x';
        } else if constexpr (std::is_same_v<T, ExprNode::Unary>) {
          if (n.op == UnaryOp::neg) {
            out += "(-";
            print(*n.child, out);
            out += ')';
          } else {
            out += to_string(n.op);
            out += '(';
            print(*n.child, out);
            out += ')';
          }
        } else {
          static constexpr char kSymbols[] = {'+', '-', '*', '/', '^'};
          out += '(';
          print(*n.lhs, out);
          out += ' ';
          out += kSymbols[static_cast<int>(n.op)];
          out += ' ';
          print(*n.rhs, out);
          out += ')';
        }
      },
      node.node);
}

}  // namespace

ExprAst::ExprAst(ExprPtr root) : root_(std::move(root)) {
  if (!root_) throw InvalidArgument("expression tree needs a root");
}

double ExprAst::operator()(double x) const { return evaluate(*root_, x); }

ExprAst parse_expression(std::string_view source) {
  return ExprAst(Parser(tokenize(source)).parse());
}

double eval_ast(const ExprAst& ast, double x) { return ast(x); }

std::string print_expression(const ExprAst& ast) {
  std::string out;
  print(ast.root(), out);
  return out;
}

const char* to_string(UnaryOp op) noexcept {
  switch (op) {
    case UnaryOp::neg: return "neg";
    case UnaryOp::abs: return "abs";
    case UnaryOp::sqrt: return "sqrt";
    case UnaryOp::sin: return "sin";
    case UnaryOp::cos: return "cos";
    case UnaryOp::exp_neg_sq: return "exp_neg_sq";
    case UnaryOp::arctan: return "arctan";
    case UnaryOp::relu: return "relu";
  }
  return "?";
}

YTarget to_target(const ExprAst& ast, std::optional<double> alpha_plus,
                  std::optional<double> alpha_minus, std::string label) {
  for (double probe : {-1048576.0, 1048576.0}) {
    try {
      ast(probe);
    } catch (const DomainError& e) {
      throw NotInY(std::string("target not evaluable at large |x|: ") + e.what());
    }
  }
  if (label.empty()) label = print_expression(ast);
  return YTarget([ast](double x) { return ast(x); }, alpha_plus, alpha_minus, std::move(label));
}

}  // namespace reluspan
