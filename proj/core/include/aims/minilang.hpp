#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// A small imperative language: int / bool / fixed-length int arrays,
// assignments, if/else, while, return. One function per analysis target.
// Programs are parsed once, checked, and then only ever executed or cloned;
// execution never mutates the AST.

namespace aims::mini {

enum class Type { Int, Bool, IntArray, Void };

std::string type_name(Type t);

struct Value {
  std::variant<std::int64_t, bool, std::vector<std::int64_t>> v;

  Value() : v(std::int64_t{0}) {}
  Value(std::int64_t i) : v(i) {}
  Value(bool b) : v(b) {}
  Value(std::vector<std::int64_t> a) : v(std::move(a)) {}

  bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_array() const { return std::holds_alternative<std::vector<std::int64_t>>(v); }

  std::int64_t as_int() const { return std::get<std::int64_t>(v); }
  bool as_bool() const { return std::get<bool>(v); }
  const std::vector<std::int64_t>& as_array() const {
    return std::get<std::vector<std::int64_t>>(v);
  }
  std::vector<std::int64_t>& as_array() { return std::get<std::vector<std::int64_t>>(v); }

  Type type() const {
    if (is_int()) return Type::Int;
    if (is_bool()) return Type::Bool;
    return Type::IntArray;
  }

  bool operator==(const Value& o) const { return v == o.v; }
  std::string to_string() const;
};

enum class BinOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class UnOp { Neg, Not };

std::string binop_token(BinOp op);
std::string unop_token(UnOp op);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind { IntLit, BoolLit, Var, Binary, Unary, Index, Len, ArrayLit };

  Kind kind = Kind::IntLit;
  std::int64_t int_val = 0;
  bool bool_val = false;
  std::string name;  // Var; Index / Len array name
  BinOp op = BinOp::Add;
  UnOp uop = UnOp::Neg;
  std::vector<ExprPtr> kids;  // Binary: [l,r]; Unary: [e]; Index: [idx]; ArrayLit: elems
  Type type = Type::Void;     // filled in by the checker
  int line = 0, col = 0;

  ExprPtr clone() const;
  bool structurally_equal(const Expr& o) const;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
  enum class Kind { Let, Assign, Store, If, While, Return };

  Kind kind = Kind::Return;
  int index = -1;  // ordinal in textual order, program-wide
  std::string name;            // Let/Assign target; Store array name
  Type decl_type = Type::Int;  // Let
  std::vector<ExprPtr> exprs;  // Let/Assign: [rhs]; Store: [idx, rhs]; If/While: [cond]; Return: [e?]
  std::vector<StmtPtr> body;       // If: then-branch; While: loop body
  std::vector<StmtPtr> else_body;  // If
  int line = 0, col = 0;

  StmtPtr clone() const;
  bool structurally_equal(const Stmt& o) const;
};

struct Param {
  std::string name;
  Type type = Type::Int;
  bool operator==(const Param&) const = default;
};

struct Function {
  std::string name;
  std::vector<Param> params;
  Type return_type = Type::Void;
  std::vector<StmtPtr> body;
  std::vector<Param> locals;  // every `let`, in textual order

  Function clone() const;
  bool structurally_equal(const Function& o) const;
};

struct Program {
  std::vector<Function> functions;
  std::string source_text;
  int statement_count = 0;

  const Function* find(const std::string& fname) const;
  Program clone() const;
  bool structurally_equal(const Program& o) const;
};

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(int l, int c, const std::string& msg);
};

struct SemanticError : std::runtime_error {
  int line, col;
  SemanticError(int l, int c, const std::string& msg);
};

// Parses and semantically checks a whole program. Statement ordinals are
// assigned in textual order across the program. Throws ParseError or
// SemanticError.
Program parse(const std::string& source);

// Re-checks an already-built AST (used to vet mutated programs) without
// touching it. Returns false instead of throwing.
bool check_program(Program& program);

// Renumbers statement ordinals exactly the way a fresh parse would.
void renumber_statements(Program& program);

// --- canonical printing ---

// Per-statement token ranges in the canonical stream. For If/While the span
// covers the header only (`if ( cond )`), which is where their mutation
// sites live; bodies are separate statements.
struct StmtSpan {
  int start = 0;
  int end = 0;  // exclusive
};

std::vector<std::string> token_stream(const Program& program,
                                      std::map<int, StmtSpan>* spans = nullptr);

// Canonical single-space-separated token form, one line per function.
std::string pretty_print(const Program& program);

// --- execution ---

enum class RunStatus { Ok, RuntimeError, StepLimit };

std::string status_name(RunStatus s);

struct TestCase {
  std::string function;
  std::vector<Value> args;
};

struct ExecutionRecord {
  std::map<std::string, Value> pre_state;   // parameter snapshot before the call
  std::map<std::string, Value> post_state;  // params and locals at exit
  std::optional<Value> result;
  RunStatus status = RunStatus::Ok;

  bool operator==(const ExecutionRecord&) const = default;
};

inline constexpr std::int64_t kDefaultStepLimit = 100000;

// One step is charged per statement executed (loop headers recount on every
// iteration). Division by zero and out-of-bounds indexing end the run with
// RuntimeError; exceeding the budget ends it with StepLimit.
ExecutionRecord execute(const Program& program, const TestCase& test,
                        std::int64_t step_limit = kDefaultStepLimit);

std::vector<ExecutionRecord> run_suite(const Program& program,
                                       const std::vector<TestCase>& tests,
                                       std::int64_t step_limit = kDefaultStepLimit);

// --- test suites on disk: JSON array of {"function": name, "args": [...]} ---

std::vector<TestCase> parse_suite_json(const std::string& text);
std::vector<TestCase> load_suite(const std::string& path);

// Validates arity and argument types against the program's signatures.
// Throws SemanticError on mismatch.
void check_suite(const Program& program, const std::vector<TestCase>& tests);

}  // namespace aims::mini
