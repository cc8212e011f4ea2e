#include "solmap/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

namespace solmap {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Token {
    enum class Type { Number, Name, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
    Type type;
    double number = 0.0;
    std::string name;
    std::size_t pos = 0;
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token tok;
        tok.pos = i;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = text.c_str() + i;
            char* end = nullptr;
            tok.type = Token::Type::Number;
            tok.number = std::strtod(start, &end);
            if (end == start) throw ParseError("cannot parse number", i);
            i += static_cast<std::size_t>(end - start);
            out.push_back(tok);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            tok.type = Token::Type::Name;
            tok.name = text.substr(i, j - i);
            i = j;
            out.push_back(tok);
            continue;
        }
        switch (c) {
            case '+': tok.type = Token::Type::Plus; break;
            case '-': tok.type = Token::Type::Minus; break;
            case '*': tok.type = Token::Type::Star; break;
            case '/': tok.type = Token::Type::Slash; break;
            case '^': tok.type = Token::Type::Caret; break;
            case '(': tok.type = Token::Type::LParen; break;
            case ')': tok.type = Token::Type::RParen; break;
            default: throw ParseError(std::string("unexpected character '") + c + "'", i);
        }
        ++i;
        out.push_back(tok);
    }
    Token end;
    end.type = Token::Type::End;
    end.pos = text.size();
    out.push_back(end);
    return out;
}

bool is_function(const std::string& name) {
    return name == "sin" || name == "cos" || name == "exp" || name == "log";
}

}  // namespace

/** Arena-building helper shared by the parser, differentiate, and bind.
 *  Smart constructors fold constants and apply 0/1 identities only. */
class ExprBuilder {
  public:
    explicit ExprBuilder(std::vector<std::string> vars) { e_.vars_ = std::move(vars); }

    using Kind = Expression::Kind;

    int constant(double v, std::size_t pos = 0) {
        Expression::Node n;
        n.kind = Kind::Constant;
        n.value = v;
        n.pos = pos;
        return push(n);
    }
    int variable(int idx, std::size_t pos = 0) {
        Expression::Node n;
        n.kind = Kind::Variable;
        n.var = idx;
        n.pos = pos;
        return push(n);
    }
    int add(int a, int b) {
        if (is_const(a) && is_const(b)) return constant(cval(a) + cval(b));
        if (is_zero(a)) return b;
        if (is_zero(b)) return a;
        return binary(Kind::Add, a, b);
    }
    int sub(int a, int b) {
        if (is_const(a) && is_const(b)) return constant(cval(a) - cval(b));
        if (is_zero(b)) return a;
        if (is_zero(a)) return neg(b);
        return binary(Kind::Sub, a, b);
    }
    int mul(int a, int b) {
        if (is_const(a) && is_const(b)) return constant(cval(a) * cval(b));
        if (is_zero(a) || is_zero(b)) return constant(0.0);
        if (is_one(a)) return b;
        if (is_one(b)) return a;
        return binary(Kind::Mul, a, b);
    }
    int div(int a, int b, std::size_t pos = 0) {
        if (is_const(a) && is_const(b) && cval(b) != 0.0) return constant(cval(a) / cval(b));
        if (is_zero(a)) return constant(0.0);
        if (is_one(b)) return a;
        int r = binary(Kind::Div, a, b);
        e_.nodes_[static_cast<std::size_t>(r)].pos = pos;
        return r;
    }
    int pow(int a, int k, std::size_t pos = 0) {
        if (k == 0) return constant(1.0);
        if (k == 1) return a;
        if (is_const(a)) return constant(std::pow(cval(a), k));
        Expression::Node n;
        n.kind = Kind::Pow;
        n.a = a;
        n.ipow = k;
        n.pos = pos;
        return push(n);
    }
    int neg(int a) {
        if (is_const(a)) return constant(-cval(a));
        if (e_.nodes_[static_cast<std::size_t>(a)].kind == Kind::Neg)
            return e_.nodes_[static_cast<std::size_t>(a)].a;
        Expression::Node n;
        n.kind = Kind::Neg;
        n.a = a;
        return push(n);
    }
    int unary(Kind kind, int a, std::size_t pos = 0) {
        if (is_const(a)) {
            double x = cval(a);
            switch (kind) {
                case Kind::Sin: return constant(std::sin(x));
                case Kind::Cos: return constant(std::cos(x));
                case Kind::Exp: return constant(std::exp(x));
                case Kind::Log:
                    if (x > 0.0) return constant(std::log(x));
                    break;  // keep the node; evaluation reports the domain error
                default: break;
            }
        }
        Expression::Node n;
        n.kind = kind;
        n.a = a;
        n.pos = pos;
        return push(n);
    }

    /** Deep-copy a node tree from another expression into this arena,
     *  optionally substituting one variable by a constant. */
    int import(const Expression& src, int idx, int subst_var = -1, double subst_value = 0.0) {
        const Expression::Node& n = src.nodes_[static_cast<std::size_t>(idx)];
        switch (n.kind) {
            case Kind::Constant: return constant(n.value, n.pos);
            case Kind::Variable:
                if (n.var == subst_var) return constant(subst_value, n.pos);
                return variable(n.var, n.pos);
            case Kind::Add: return add(import(src, n.a, subst_var, subst_value),
                                       import(src, n.b, subst_var, subst_value));
            case Kind::Sub: return sub(import(src, n.a, subst_var, subst_value),
                                       import(src, n.b, subst_var, subst_value));
            case Kind::Mul: return mul(import(src, n.a, subst_var, subst_value),
                                       import(src, n.b, subst_var, subst_value));
            case Kind::Div: return div(import(src, n.a, subst_var, subst_value),
                                       import(src, n.b, subst_var, subst_value), n.pos);
            case Kind::Pow: return pow(import(src, n.a, subst_var, subst_value), n.ipow, n.pos);
            case Kind::Neg: return neg(import(src, n.a, subst_var, subst_value));
            default: return unary(n.kind, import(src, n.a, subst_var, subst_value), n.pos);
        }
    }

    /** Derivative of src's subtree w.r.t. variable index v, built into this arena. */
    int derive(const Expression& src, int idx, int v) {
        const Expression::Node& n = src.nodes_[static_cast<std::size_t>(idx)];
        switch (n.kind) {
            case Kind::Constant: return constant(0.0);
            case Kind::Variable: return constant(n.var == v ? 1.0 : 0.0);
            case Kind::Add: return add(derive(src, n.a, v), derive(src, n.b, v));
            case Kind::Sub: return sub(derive(src, n.a, v), derive(src, n.b, v));
            case Kind::Mul: {
                int da = derive(src, n.a, v);
                int db = derive(src, n.b, v);
                int a = import(src, n.a);
                int b = import(src, n.b);
                return add(mul(da, b), mul(a, db));
            }
            case Kind::Div: {
                int da = derive(src, n.a, v);
                int db = derive(src, n.b, v);
                int a = import(src, n.a);
                int b = import(src, n.b);
                int num = sub(mul(da, b), mul(a, db));
                return div(num, pow(import(src, n.b), 2, n.pos), n.pos);
            }
            case Kind::Pow: {
                int da = derive(src, n.a, v);
                int a = import(src, n.a);
                return mul(mul(constant(static_cast<double>(n.ipow)), pow(a, n.ipow - 1, n.pos)),
                           da);
            }
            case Kind::Neg: return neg(derive(src, n.a, v));
            case Kind::Sin: return mul(unary(Kind::Cos, import(src, n.a), n.pos),
                                       derive(src, n.a, v));
            case Kind::Cos: return neg(mul(unary(Kind::Sin, import(src, n.a), n.pos),
                                           derive(src, n.a, v)));
            case Kind::Exp: return mul(unary(Kind::Exp, import(src, n.a), n.pos),
                                       derive(src, n.a, v));
            case Kind::Log: return div(derive(src, n.a, v), import(src, n.a), n.pos);
        }
        return constant(0.0);
    }

    Expression finish(int root) {
        e_.root_ = root;
        return std::move(e_);
    }

  private:
    Expression e_;

    int push(const Expression::Node& n) {
        e_.nodes_.push_back(n);
        return static_cast<int>(e_.nodes_.size()) - 1;
    }
    int binary(Kind kind, int a, int b) {
        Expression::Node n;
        n.kind = kind;
        n.a = a;
        n.b = b;
        return push(n);
    }
    bool is_const(int i) const {
        return e_.nodes_[static_cast<std::size_t>(i)].kind == Kind::Constant;
    }
    double cval(int i) const { return e_.nodes_[static_cast<std::size_t>(i)].value; }
    bool is_zero(int i) const { return is_const(i) && cval(i) == 0.0; }
    bool is_one(int i) const { return is_const(i) && cval(i) == 1.0; }
};

namespace {

/** Recursive-descent parser over the token stream. */
class Parser {
  public:
    Parser(const std::vector<Token>& toks, const std::vector<std::string>& vars, ExprBuilder& b)
        : toks_(toks), vars_(vars), b_(b) {}

    int parse_expression() {
        int lhs = parse_term();
        while (peek().type == Token::Type::Plus || peek().type == Token::Type::Minus) {
            bool plus = peek().type == Token::Type::Plus;
            advance();
            int rhs = parse_term();
            lhs = plus ? b_.add(lhs, rhs) : b_.sub(lhs, rhs);
        }
        return lhs;
    }

    void expect_end() const {
        if (peek().type != Token::Type::End) throw ParseError("unexpected token", peek().pos);
    }

  private:
    const std::vector<Token>& toks_;
    const std::vector<std::string>& vars_;
    ExprBuilder& b_;
    std::size_t at_ = 0;

    const Token& peek() const { return toks_[at_]; }
    void advance() { ++at_; }

    int parse_term() {
        int lhs = parse_unary();
        while (peek().type == Token::Type::Star || peek().type == Token::Type::Slash) {
            bool star = peek().type == Token::Type::Star;
            std::size_t pos = peek().pos;
            advance();
            int rhs = parse_unary();
            lhs = star ? b_.mul(lhs, rhs) : b_.div(lhs, rhs, pos);
        }
        return lhs;
    }

    int parse_unary() {
        if (peek().type == Token::Type::Minus) {
            advance();
            return b_.neg(parse_unary());
        }
        return parse_power();
    }

    int parse_power() {
        int base = parse_atom();
        while (peek().type == Token::Type::Caret) {
            std::size_t pos = peek().pos;
            advance();
            base = b_.pow(base, parse_int_exponent(), pos);
        }
        return base;
    }

    int parse_int_exponent() {
        bool paren = false;
        if (peek().type == Token::Type::LParen) {
            paren = true;
            advance();
        }
        int sign = 1;
        if (peek().type == Token::Type::Minus) {
            sign = -1;
            advance();
        }
        if (peek().type != Token::Type::Number)
            throw ParseError("integer exponent expected", peek().pos);
        double v = peek().number;
        int k = static_cast<int>(v);
        if (static_cast<double>(k) != v)
            throw ParseError("integer exponent expected", peek().pos);
        advance();
        if (paren) {
            if (peek().type != Token::Type::RParen) throw ParseError("')' expected", peek().pos);
            advance();
        }
        return sign * k;
    }

    int parse_atom() {
        const Token& t = peek();
        switch (t.type) {
            case Token::Type::Number: {
                advance();
                return b_.constant(t.number, t.pos);
            }
            case Token::Type::LParen: {
                advance();
                int inner = parse_expression();
                if (peek().type != Token::Type::RParen)
                    throw ParseError("')' expected", peek().pos);
                advance();
                return inner;
            }
            case Token::Type::Name: {
                advance();
                if (is_function(t.name)) {
                    if (peek().type != Token::Type::LParen)
                        throw ParseError("'(' expected after " + t.name, peek().pos);
                    advance();
                    int arg = parse_expression();
                    if (peek().type != Token::Type::RParen)
                        throw ParseError("')' expected", peek().pos);
                    advance();
                    Expression::Kind k = t.name == "sin"   ? Expression::Kind::Sin
                                         : t.name == "cos" ? Expression::Kind::Cos
                                         : t.name == "exp" ? Expression::Kind::Exp
                                                           : Expression::Kind::Log;
                    return b_.unary(k, arg, t.pos);
                }
                if (t.name == "pi") return b_.constant(kPi, t.pos);
                for (std::size_t i = 0; i < vars_.size(); ++i)
                    if (vars_[i] == t.name) return b_.variable(static_cast<int>(i), t.pos);
                throw ParseError("undeclared variable '" + t.name + "'", t.pos);
            }
            default: throw ParseError("operand expected", t.pos);
        }
    }
};

}  // namespace

Expression Expression::parse(const std::string& text, const std::vector<std::string>& variables) {
    if (text.empty()) throw ParseError("empty expression", 0);
    std::vector<Token> toks = tokenize(text);
    ExprBuilder b(variables);
    Parser p(toks, variables, b);
    int root = p.parse_expression();
    p.expect_end();
    return b.finish(root);
}

Expression Expression::constant(double c, std::vector<std::string> variables) {
    ExprBuilder b(std::move(variables));
    return b.finish(b.constant(c));
}

Expression Expression::differentiate(const std::string& variable) const {
    std::optional<int> v = var_index(variable);
    if (!v) throw std::invalid_argument("differentiate: variable '" + variable + "' not declared");
    ExprBuilder b(vars_);
    return b.finish(b.derive(*this, root_, *v));
}

Expression Expression::plus_scaled(const Expression& other, double scale) const {
    if (vars_ != other.vars_)
        throw std::invalid_argument("plus_scaled: variable lists differ");
    ExprBuilder b(vars_);
    int a = b.import(*this, root_);
    int c = b.import(other, other.root_);
    return b.finish(b.add(a, b.mul(b.constant(scale), c)));
}

Expression Expression::bind(const std::string& variable, double value) const {
    std::optional<int> v = var_index(variable);
    if (!v) throw std::invalid_argument("bind: variable '" + variable + "' not declared");
    ExprBuilder b(vars_);
    return b.finish(b.import(*this, root_, *v, value));
}

std::optional<int> Expression::var_index(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == name) return static_cast<int>(i);
    return std::nullopt;
}

bool Expression::uses_variable(int index) const {
    for (const Node& n : nodes_)
        if (n.kind == Kind::Variable && n.var == index) return true;
    return false;
}

double Expression::eval_node(int idx, std::span<const double> env) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.kind) {
        case Kind::Constant: return n.value;
        case Kind::Variable: return env[static_cast<std::size_t>(n.var)];
        case Kind::Add: return eval_node(n.a, env) + eval_node(n.b, env);
        case Kind::Sub: return eval_node(n.a, env) - eval_node(n.b, env);
        case Kind::Mul: return eval_node(n.a, env) * eval_node(n.b, env);
        case Kind::Div: {
            double den = eval_node(n.b, env);
            if (den == 0.0) throw DomainError("division by zero", n.pos);
            return eval_node(n.a, env) / den;
        }
        case Kind::Pow: {
            double base = eval_node(n.a, env);
            int k = n.ipow;
            if (k < 0) {
                if (base == 0.0) throw DomainError("division by zero in negative power", n.pos);
                base = 1.0 / base;
                k = -k;
            }
            double r = 1.0;
            while (k > 0) {
                if (k & 1) r *= base;
                base *= base;
                k >>= 1;
            }
            return r;
        }
        case Kind::Neg: return -eval_node(n.a, env);
        case Kind::Sin: return std::sin(eval_node(n.a, env));
        case Kind::Cos: return std::cos(eval_node(n.a, env));
        case Kind::Exp: return std::exp(eval_node(n.a, env));
        case Kind::Log: {
            double x = eval_node(n.a, env);
            if (x <= 0.0) throw DomainError("log of non-positive value", n.pos);
            return std::log(x);
        }
    }
    return 0.0;
}

double Expression::eval(std::span<const double> env) const {
    if (root_ < 0) throw std::logic_error("eval of empty expression");
    double r = eval_node(root_, env);
    if (!std::isfinite(r))
        throw DomainError("non-finite result", nodes_[static_cast<std::size_t>(root_)].pos);
    return r;
}

double Expression::eval(const std::vector<std::pair<std::string, double>>& env) const {
    std::vector<double> slots(vars_.size(), 0.0);
    std::vector<bool> bound(vars_.size(), false);
    for (const auto& [name, value] : env) {
        std::optional<int> i = var_index(name);
        if (!i) throw std::invalid_argument("eval: unknown variable '" + name + "'");
        slots[static_cast<std::size_t>(*i)] = value;
        bound[static_cast<std::size_t>(*i)] = true;
    }
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (!bound[i] && uses_variable(static_cast<int>(i)))
            throw std::invalid_argument("eval: variable '" + vars_[i] + "' not bound");
    return eval(slots);
}

namespace {
// precedence levels used when printing: Add/Sub 1, Mul/Div 2, Neg 3, Pow 4
int prec(Expression::Kind k) {
    switch (k) {
        case Expression::Kind::Add:
        case Expression::Kind::Sub: return 1;
        case Expression::Kind::Mul:
        case Expression::Kind::Div: return 2;
        case Expression::Kind::Neg: return 3;
        case Expression::Kind::Pow: return 4;
        default: return 5;
    }
}
}  // namespace

std::string Expression::print_node(int idx, int parent_prec) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    int p = prec(n.kind);
    std::string s;
    switch (n.kind) {
        case Kind::Constant: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            s = buf;
            if (n.value < 0.0) s = "(" + s + ")";
            return s;
        }
        case Kind::Variable: return vars_[static_cast<std::size_t>(n.var)];
        case Kind::Add: s = print_node(n.a, p) + " + " + print_node(n.b, p + 1); break;
        case Kind::Sub: s = print_node(n.a, p) + " - " + print_node(n.b, p + 1); break;
        case Kind::Mul: s = print_node(n.a, p) + "*" + print_node(n.b, p); break;
        case Kind::Div: s = print_node(n.a, p) + "/" + print_node(n.b, p + 1); break;
        case Kind::Neg: s = "-" + print_node(n.a, p + 1); break;
        case Kind::Pow:
            s = print_node(n.a, p + 1) + "^" +
                (n.ipow < 0 ? "(" + std::to_string(n.ipow) + ")" : std::to_string(n.ipow));
            break;
        case Kind::Sin: return "sin(" + print_node(n.a, 0) + ")";
        case Kind::Cos: return "cos(" + print_node(n.a, 0) + ")";
        case Kind::Exp: return "exp(" + print_node(n.a, 0) + ")";
        case Kind::Log: return "log(" + print_node(n.a, 0) + ")";
    }
    if (p < parent_prec) s = "(" + s + ")";
    return s;
}

std::string Expression::to_string() const {
    if (root_ < 0) return "";
    return print_node(root_, 0);
}

}  // namespace solmap
