#include "aims/minilang.hpp"

#include <cctype>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace aims::mini {

std::string type_name(Type t) {
  switch (t) {
    case Type::Int: return "int";
    case Type::Bool: return "bool";
    case Type::IntArray: return "int[]";
    case Type::Void: return "void";
  }
  return "?";
}

std::string Value::to_string() const {
  if (is_int()) return std::to_string(as_int());
  if (is_bool()) return as_bool() ? "true" : "false";
  std::ostringstream os;
  os << "[";
  const auto& a = as_array();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) os << ",";
    os << a[i];
  }
  os << "]";
  return os.str();
}

std::string binop_token(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
  }
  return "?";
}

std::string unop_token(UnOp op) { return op == UnOp::Neg ? "-" : "!"; }

static std::string fmt_pos(int line, int col, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line << ", col " << col << ": " << msg;
  return os.str();
}

ParseError::ParseError(int l, int c, const std::string& msg)
    : std::runtime_error(fmt_pos(l, c, msg)), line(l), col(c) {}

SemanticError::SemanticError(int l, int c, const std::string& msg)
    : std::runtime_error(fmt_pos(l, c, msg)), line(l), col(c) {}

// --- clone / structural equality ---

ExprPtr Expr::clone() const {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->int_val = int_val;
  e->bool_val = bool_val;
  e->name = name;
  e->op = op;
  e->uop = uop;
  e->type = type;
  e->line = line;
  e->col = col;
  for (const auto& k : kids) e->kids.push_back(k->clone());
  return e;
}

bool Expr::structurally_equal(const Expr& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::IntLit:
      if (int_val != o.int_val) return false;
      break;
    case Kind::BoolLit:
      if (bool_val != o.bool_val) return false;
      break;
    case Kind::Var:
    case Kind::Index:
    case Kind::Len:
      if (name != o.name) return false;
      break;
    case Kind::Binary:
      if (op != o.op) return false;
      break;
    case Kind::Unary:
      if (uop != o.uop) return false;
      break;
    case Kind::ArrayLit:
      break;
  }
  if (kids.size() != o.kids.size()) return false;
  for (std::size_t i = 0; i < kids.size(); ++i)
    if (!kids[i]->structurally_equal(*o.kids[i])) return false;
  return true;
}

StmtPtr Stmt::clone() const {
  auto s = std::make_unique<Stmt>();
  s->kind = kind;
  s->index = index;
  s->name = name;
  s->decl_type = decl_type;
  s->line = line;
  s->col = col;
  for (const auto& e : exprs) s->exprs.push_back(e->clone());
  for (const auto& b : body) s->body.push_back(b->clone());
  for (const auto& b : else_body) s->else_body.push_back(b->clone());
  return s;
}

bool Stmt::structurally_equal(const Stmt& o) const {
  if (kind != o.kind || index != o.index || name != o.name) return false;
  if (kind == Kind::Let && decl_type != o.decl_type) return false;
  if (exprs.size() != o.exprs.size() || body.size() != o.body.size() ||
      else_body.size() != o.else_body.size())
    return false;
  for (std::size_t i = 0; i < exprs.size(); ++i)
    if (!exprs[i]->structurally_equal(*o.exprs[i])) return false;
  for (std::size_t i = 0; i < body.size(); ++i)
    if (!body[i]->structurally_equal(*o.body[i])) return false;
  for (std::size_t i = 0; i < else_body.size(); ++i)
    if (!else_body[i]->structurally_equal(*o.else_body[i])) return false;
  return true;
}

Function Function::clone() const {
  Function f;
  f.name = name;
  f.params = params;
  f.return_type = return_type;
  f.locals = locals;
  for (const auto& s : body) f.body.push_back(s->clone());
  return f;
}

bool Function::structurally_equal(const Function& o) const {
  if (name != o.name || params != o.params || return_type != o.return_type) return false;
  if (body.size() != o.body.size()) return false;
  for (std::size_t i = 0; i < body.size(); ++i)
    if (!body[i]->structurally_equal(*o.body[i])) return false;
  return true;
}

const Function* Program::find(const std::string& fname) const {
  for (const auto& f : functions)
    if (f.name == fname) return &f;
  return nullptr;
}

Program Program::clone() const {
  Program p;
  p.source_text = source_text;
  p.statement_count = statement_count;
  for (const auto& f : functions) p.functions.push_back(f.clone());
  return p;
}

bool Program::structurally_equal(const Program& o) const {
  if (functions.size() != o.functions.size()) return false;
  for (std::size_t i = 0; i < functions.size(); ++i)
    if (!functions[i].structurally_equal(o.functions[i])) return false;
  return true;
}

// --- lexer ---

namespace {

struct Token {
  enum class Kind { Ident, Int, Keyword, Punct, Eof };
  Kind kind = Kind::Eof;
  std::string text;
  std::int64_t value = 0;
  int line = 1, col = 1;
};

const std::unordered_set<std::string>& keywords() {
  static const std::unordered_set<std::string> kw = {
      "fn", "let", "if", "else", "while", "return", "true", "false", "len", "int", "bool"};
  return kw;
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_ws_and_comments();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= src_.size()) {
        t.kind = Token::Kind::Eof;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          num += advance();
        t.kind = Token::Kind::Int;
        t.text = num;
        t.value = std::stoll(num);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          id += advance();
        t.kind = keywords().count(id) ? Token::Kind::Keyword : Token::Kind::Ident;
        t.text = id;
      } else {
        t.kind = Token::Kind::Punct;
        t.text = punct();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  bool match2(const char* two) {
    if (pos_ + 1 < src_.size() && src_[pos_] == two[0] && src_[pos_ + 1] == two[1]) {
      advance();
      advance();
      return true;
    }
    return false;
  }

  std::string punct() {
    static const char* two_char[] = {"->", "<=", ">=", "==", "!=", "&&", "||"};
    for (const char* p : two_char)
      if (match2(p)) return p;
    char c = src_[pos_];
    static const std::string singles = "+-*/%<>!=(){}[],:;";
    if (singles.find(c) == std::string::npos)
      throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
    advance();
    return std::string(1, c);
  }

  void skip_ws_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        advance();
        advance();
        while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) advance();
        if (pos_ + 1 >= src_.size()) throw ParseError(line_, col_, "unterminated block comment");
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

// --- parser ---

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program run() {
    Program p;
    while (!at_eof()) p.functions.push_back(function());
    p.statement_count = next_index_;
    return p;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  bool at_eof() const { return peek().kind == Token::Kind::Eof; }

  const Token& take() { return toks_[i_++]; }

  bool is_punct(const char* t) const {
    return peek().kind == Token::Kind::Punct && peek().text == t;
  }
  bool is_kw(const char* t) const {
    return peek().kind == Token::Kind::Keyword && peek().text == t;
  }

  const Token& expect_punct(const char* t) {
    if (!is_punct(t))
      throw ParseError(peek().line, peek().col,
                       "expected '" + std::string(t) + "', found '" + describe(peek()) + "'");
    return take();
  }

  const Token& expect_kw(const char* t) {
    if (!is_kw(t))
      throw ParseError(peek().line, peek().col,
                       "expected '" + std::string(t) + "', found '" + describe(peek()) + "'");
    return take();
  }

  std::string expect_ident() {
    if (peek().kind != Token::Kind::Ident)
      throw ParseError(peek().line, peek().col,
                       "expected identifier, found '" + describe(peek()) + "'");
    return take().text;
  }

  static std::string describe(const Token& t) {
    return t.kind == Token::Kind::Eof ? "<eof>" : t.text;
  }

  Type parse_type() {
    if (is_kw("int")) {
      take();
      if (is_punct("[")) {
        take();
        expect_punct("]");
        return Type::IntArray;
      }
      return Type::Int;
    }
    if (is_kw("bool")) {
      take();
      return Type::Bool;
    }
    throw ParseError(peek().line, peek().col, "expected type, found '" + describe(peek()) + "'");
  }

  Function function() {
    expect_kw("fn");
    Function f;
    f.name = expect_ident();
    expect_punct("(");
    if (!is_punct(")")) {
      while (true) {
        Param p;
        p.name = expect_ident();
        expect_punct(":");
        p.type = parse_type();
        f.params.push_back(p);
        if (is_punct(",")) {
          take();
          continue;
        }
        break;
      }
    }
    expect_punct(")");
    f.return_type = Type::Void;
    if (is_punct("->")) {
      take();
      f.return_type = parse_type();
    }
    f.body = block();
    return f;
  }

  std::vector<StmtPtr> block() {
    expect_punct("{");
    std::vector<StmtPtr> out;
    while (!is_punct("}")) out.push_back(statement());
    take();
    return out;
  }

  StmtPtr statement() {
    auto s = std::make_unique<Stmt>();
    s->line = peek().line;
    s->col = peek().col;
    s->index = next_index_++;
    if (is_kw("let")) {
      take();
      s->kind = Stmt::Kind::Let;
      s->name = expect_ident();
      expect_punct(":");
      s->decl_type = parse_type();
      expect_punct("=");
      s->exprs.push_back(expression());
      expect_punct(";");
    } else if (is_kw("if")) {
      take();
      s->kind = Stmt::Kind::If;
      expect_punct("(");
      s->exprs.push_back(expression());
      expect_punct(")");
      s->body = block();
      if (is_kw("else")) {
        take();
        s->else_body = block();
      }
    } else if (is_kw("while")) {
      take();
      s->kind = Stmt::Kind::While;
      expect_punct("(");
      s->exprs.push_back(expression());
      expect_punct(")");
      s->body = block();
    } else if (is_kw("return")) {
      take();
      s->kind = Stmt::Kind::Return;
      if (!is_punct(";")) s->exprs.push_back(expression());
      expect_punct(";");
    } else if (peek().kind == Token::Kind::Ident) {
      s->name = take().text;
      if (is_punct("[")) {
        take();
        s->kind = Stmt::Kind::Store;
        s->exprs.push_back(expression());
        expect_punct("]");
        expect_punct("=");
        s->exprs.push_back(expression());
        expect_punct(";");
      } else {
        s->kind = Stmt::Kind::Assign;
        expect_punct("=");
        s->exprs.push_back(expression());
        expect_punct(";");
      }
    } else {
      throw ParseError(peek().line, peek().col,
                       "expected statement, found '" + describe(peek()) + "'");
    }
    return s;
  }

  // precedence climbing: || < && < relational < additive < multiplicative < unary
  ExprPtr expression() { return or_expr(); }

  ExprPtr make_bin(BinOp op, ExprPtr l, ExprPtr r, int line, int col) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Binary;
    e->op = op;
    e->line = line;
    e->col = col;
    e->kids.push_back(std::move(l));
    e->kids.push_back(std::move(r));
    return e;
  }

  ExprPtr or_expr() {
    auto l = and_expr();
    while (is_punct("||")) {
      int line = peek().line, col = peek().col;
      take();
      l = make_bin(BinOp::Or, std::move(l), and_expr(), line, col);
    }
    return l;
  }

  ExprPtr and_expr() {
    auto l = rel_expr();
    while (is_punct("&&")) {
      int line = peek().line, col = peek().col;
      take();
      l = make_bin(BinOp::And, std::move(l), rel_expr(), line, col);
    }
    return l;
  }

  ExprPtr rel_expr() {
    auto l = add_expr();
    while (is_punct("<") || is_punct("<=") || is_punct(">") || is_punct(">=") || is_punct("==") ||
           is_punct("!=")) {
      const std::string t = peek().text;
      int line = peek().line, col = peek().col;
      take();
      BinOp op = t == "<"    ? BinOp::Lt
                 : t == "<=" ? BinOp::Le
                 : t == ">"  ? BinOp::Gt
                 : t == ">=" ? BinOp::Ge
                 : t == "==" ? BinOp::Eq
                             : BinOp::Ne;
      l = make_bin(op, std::move(l), add_expr(), line, col);
    }
    return l;
  }

  ExprPtr add_expr() {
    auto l = mul_expr();
    while (is_punct("+") || is_punct("-")) {
      BinOp op = peek().text == "+" ? BinOp::Add : BinOp::Sub;
      int line = peek().line, col = peek().col;
      take();
      l = make_bin(op, std::move(l), mul_expr(), line, col);
    }
    return l;
  }

  ExprPtr mul_expr() {
    auto l = unary_expr();
    while (is_punct("*") || is_punct("/") || is_punct("%")) {
      BinOp op = peek().text == "*" ? BinOp::Mul : peek().text == "/" ? BinOp::Div : BinOp::Mod;
      int line = peek().line, col = peek().col;
      take();
      l = make_bin(op, std::move(l), unary_expr(), line, col);
    }
    return l;
  }

  ExprPtr unary_expr() {
    if (is_punct("-") || is_punct("!")) {
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Unary;
      e->uop = peek().text == "-" ? UnOp::Neg : UnOp::Not;
      e->line = peek().line;
      e->col = peek().col;
      take();
      e->kids.push_back(unary_expr());
      return e;
    }
    return primary();
  }

  ExprPtr primary() {
    auto e = std::make_unique<Expr>();
    e->line = peek().line;
    e->col = peek().col;
    if (peek().kind == Token::Kind::Int) {
      e->kind = Expr::Kind::IntLit;
      e->int_val = take().value;
      return e;
    }
    if (is_kw("true") || is_kw("false")) {
      e->kind = Expr::Kind::BoolLit;
      e->bool_val = take().text == "true";
      return e;
    }
    if (is_kw("len")) {
      take();
      expect_punct("(");
      e->kind = Expr::Kind::Len;
      e->name = expect_ident();
      expect_punct(")");
      return e;
    }
    if (is_punct("(")) {
      take();
      auto inner = expression();
      expect_punct(")");
      return inner;
    }
    if (is_punct("[")) {
      take();
      e->kind = Expr::Kind::ArrayLit;
      if (!is_punct("]")) {
        while (true) {
          e->kids.push_back(expression());
          if (is_punct(",")) {
            take();
            continue;
          }
          break;
        }
      }
      expect_punct("]");
      return e;
    }
    if (peek().kind == Token::Kind::Ident) {
      e->name = take().text;
      if (is_punct("[")) {
        take();
        e->kind = Expr::Kind::Index;
        e->kids.push_back(expression());
        expect_punct("]");
      } else {
        e->kind = Expr::Kind::Var;
      }
      return e;
    }
    throw ParseError(peek().line, peek().col,
                     "expected expression, found '" + describe(peek()) + "'");
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  int next_index_ = 0;
};

// --- semantic checker ---

class Checker {
 public:
  explicit Checker(Program& p) : prog_(p) {}

  void run() {
    std::set<std::string> names;
    for (auto& f : prog_.functions) {
      if (!names.insert(f.name).second)
        throw SemanticError(0, 0, "duplicate function name " + f.name);
    }
    for (auto& f : prog_.functions) check_function(f);
  }

 private:
  void check_function(Function& f) {
    scope_.clear();
    f.locals.clear();
    for (const auto& p : f.params) {
      if (scope_.count(p.name))
        throw SemanticError(0, 0, "duplicate parameter " + p.name + " in " + f.name);
      scope_[p.name] = p.type;
    }
    fn_ = &f;
    bool returns = check_block(f.body, &f.locals);
    if (f.return_type != Type::Void && !returns)
      throw SemanticError(0, 0, "function " + f.name + ": not all control paths return a value");
  }

  // returns true when the block definitely returns on every path
  bool check_block(std::vector<StmtPtr>& stmts, std::vector<Param>* locals) {
    bool definite = false;
    for (auto& s : stmts) definite = check_stmt(*s, locals) || definite;
    return definite;
  }

  bool check_stmt(Stmt& s, std::vector<Param>* locals) {
    switch (s.kind) {
      case Stmt::Kind::Let: {
        if (scope_.count(s.name))
          throw SemanticError(s.line, s.col, "duplicate declaration of " + s.name);
        Type rhs = check_expr(*s.exprs[0]);
        if (rhs != s.decl_type)
          throw SemanticError(s.line, s.col,
                              "cannot initialize " + type_name(s.decl_type) + " " + s.name +
                                  " from " + type_name(rhs));
        scope_[s.name] = s.decl_type;
        locals->push_back({s.name, s.decl_type});
        return false;
      }
      case Stmt::Kind::Assign: {
        Type var = lookup(s.name, s.line, s.col);
        Type rhs = check_expr(*s.exprs[0]);
        if (var != rhs)
          throw SemanticError(s.line, s.col,
                              "cannot assign " + type_name(rhs) + " to " + type_name(var) + " " +
                                  s.name);
        return false;
      }
      case Stmt::Kind::Store: {
        Type var = lookup(s.name, s.line, s.col);
        if (var != Type::IntArray)
          throw SemanticError(s.line, s.col, s.name + " is not an array");
        if (check_expr(*s.exprs[0]) != Type::Int)
          throw SemanticError(s.line, s.col, "array index must be int");
        if (check_expr(*s.exprs[1]) != Type::Int)
          throw SemanticError(s.line, s.col, "array element must be int");
        return false;
      }
      case Stmt::Kind::If: {
        if (check_expr(*s.exprs[0]) != Type::Bool)
          throw SemanticError(s.line, s.col, "if condition must be bool");
        bool t = check_block(s.body, locals);
        bool e = !s.else_body.empty() && check_block(s.else_body, locals);
        return t && e && !s.else_body.empty();
      }
      case Stmt::Kind::While: {
        if (check_expr(*s.exprs[0]) != Type::Bool)
          throw SemanticError(s.line, s.col, "while condition must be bool");
        check_block(s.body, locals);
        return false;  // loop may not run
      }
      case Stmt::Kind::Return: {
        if (fn_->return_type == Type::Void) {
          if (!s.exprs.empty())
            throw SemanticError(s.line, s.col, "void function cannot return a value");
        } else {
          if (s.exprs.empty())
            throw SemanticError(s.line, s.col, "non-void function must return a value");
          Type t = check_expr(*s.exprs[0]);
          if (t != fn_->return_type)
            throw SemanticError(s.line, s.col,
                                "return type mismatch: expected " + type_name(fn_->return_type) +
                                    ", found " + type_name(t));
        }
        return true;
      }
    }
    return false;
  }

  Type lookup(const std::string& name, int line, int col) {
    auto it = scope_.find(name);
    if (it == scope_.end())
      throw SemanticError(line, col, "undeclared variable " + name);
    return it->second;
  }

  Type check_expr(Expr& e) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return e.type = Type::Int;
      case Expr::Kind::BoolLit:
        return e.type = Type::Bool;
      case Expr::Kind::Var:
        return e.type = lookup(e.name, e.line, e.col);
      case Expr::Kind::Len: {
        Type t = lookup(e.name, e.line, e.col);
        if (t != Type::IntArray) throw SemanticError(e.line, e.col, e.name + " is not an array");
        return e.type = Type::Int;
      }
      case Expr::Kind::Index: {
        Type t = lookup(e.name, e.line, e.col);
        if (t != Type::IntArray) throw SemanticError(e.line, e.col, e.name + " is not an array");
        if (check_expr(*e.kids[0]) != Type::Int)
          throw SemanticError(e.line, e.col, "array index must be int");
        return e.type = Type::Int;
      }
      case Expr::Kind::ArrayLit: {
        for (auto& k : e.kids)
          if (check_expr(*k) != Type::Int)
            throw SemanticError(e.line, e.col, "array literal elements must be int");
        return e.type = Type::IntArray;
      }
      case Expr::Kind::Unary: {
        Type t = check_expr(*e.kids[0]);
        if (e.uop == UnOp::Neg && t != Type::Int)
          throw SemanticError(e.line, e.col, "unary - needs int operand");
        if (e.uop == UnOp::Not && t != Type::Bool)
          throw SemanticError(e.line, e.col, "unary ! needs bool operand");
        return e.type = t;
      }
      case Expr::Kind::Binary: {
        Type l = check_expr(*e.kids[0]);
        Type r = check_expr(*e.kids[1]);
        switch (e.op) {
          case BinOp::Add:
          case BinOp::Sub:
          case BinOp::Mul:
          case BinOp::Div:
          case BinOp::Mod:
            if (l != Type::Int || r != Type::Int)
              throw SemanticError(e.line, e.col, "arithmetic needs int operands");
            return e.type = Type::Int;
          case BinOp::Lt:
          case BinOp::Le:
          case BinOp::Gt:
          case BinOp::Ge:
          case BinOp::Eq:
          case BinOp::Ne:
            if (l != Type::Int || r != Type::Int)
              throw SemanticError(e.line, e.col, "comparison needs int operands");
            return e.type = Type::Bool;
          case BinOp::And:
          case BinOp::Or:
            if (l != Type::Bool || r != Type::Bool)
              throw SemanticError(e.line, e.col, "logical op needs bool operands");
            return e.type = Type::Bool;
        }
        return e.type = Type::Void;
      }
    }
    return Type::Void;
  }

  Program& prog_;
  Function* fn_ = nullptr;
  std::unordered_map<std::string, Type> scope_;
};

void renumber(std::vector<StmtPtr>& stmts, int& next) {
  for (auto& s : stmts) {
    s->index = next++;
    renumber(s->body, next);
    renumber(s->else_body, next);
  }
}

}  // namespace

Program parse(const std::string& source) {
  Lexer lex(source);
  Parser parser(lex.run());
  Program p = parser.run();
  p.source_text = source;
  Checker(p).run();
  return p;
}

bool check_program(Program& program) {
  try {
    Checker(program).run();
    return true;
  } catch (const SemanticError&) {
    return false;
  }
}

void renumber_statements(Program& program) {
  int next = 0;
  for (auto& f : program.functions) renumber(f.body, next);
  program.statement_count = next;
}

}  // namespace aims::mini
