#ifndef SOLMAP_EXPR_HPP
#define SOLMAP_EXPR_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace solmap {

/** Parse error carrying the byte offset into the source text. */
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const { return pos_; }

  private:
    std::size_t pos_;
};

/** Evaluation-time domain error (log of non-positive, division by zero, overflow).
 *  Carries the source position of the offending node. */
class DomainError : public std::runtime_error {
  public:
    DomainError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (node at position " + std::to_string(pos) + ")"), pos_(pos) {}
    std::size_t position() const { return pos_; }

  private:
    std::size_t pos_;
};

/** Immutable symbolic expression in a declared variable list.
 *
 *  Grammar: + - * / with usual precedence, ^ with integer exponent binding
 *  tighter than unary minus, sin/cos/exp/log, built-in constant pi.
 *  Nodes live in a flat arena; Expression is safe to share across threads.
 */
class Expression {
  public:
    enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log };

    struct Node {
        Kind kind;
        double value = 0.0;    // Constant
        int var = -1;          // Variable index into variables()
        int a = -1, b = -1;    // children
        int ipow = 0;          // Pow exponent
        std::size_t pos = 0;   // source position for diagnostics
    };

    Expression() = default;

    /** Parse `text` over the declared variable names. Throws ParseError. */
    static Expression parse(const std::string& text, const std::vector<std::string>& variables);

    /** Constant expression (no variables unless `variables` given). */
    static Expression constant(double c, std::vector<std::string> variables = {});

    /** Exact symbolic partial derivative with respect to a declared variable. */
    Expression differentiate(const std::string& variable) const;

    /** this + scale * other; both must share the same variable list. */
    Expression plus_scaled(const Expression& other, double scale) const;

    /** Substitute a declared variable by a constant (result keeps the variable list). */
    Expression bind(const std::string& variable, double value) const;

    /** Evaluate with variables bound positionally (size must cover used variables). */
    double eval(std::span<const double> env) const;
    /** Evaluate by name; every used variable must be bound. */
    double eval(const std::vector<std::pair<std::string, double>>& env) const;

    const std::vector<std::string>& variables() const { return vars_; }
    std::optional<int> var_index(const std::string& name) const;
    bool uses_variable(int index) const;

    /** Grammar text that parses back to an identically-evaluating expression. */
    std::string to_string() const;

    bool empty() const { return nodes_.empty(); }

  private:
    friend class ExprBuilder;
    std::vector<Node> nodes_;
    int root_ = -1;
    std::vector<std::string> vars_;

    double eval_node(int idx, std::span<const double> env) const;
    std::string print_node(int idx, int parent_prec) const;
};

}  // namespace solmap

#endif
