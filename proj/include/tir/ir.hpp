// Core IR: types, instructions, functions, programs, and validation.
// All analyses and transformations in this project operate on these types.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace tir {

struct Signature;

// A value is either a 64-bit integer or a typed function pointer.
struct Type {
  enum class Kind { Int, FnPtr };
  Kind kind = Kind::Int;
  std::shared_ptr<const Signature> sig;  // non-null iff kind == FnPtr

  static Type integer() { return Type{}; }
  static Type fnptr(Signature s);
  bool is_int() const { return kind == Kind::Int; }
  bool is_fnptr() const { return kind == Kind::FnPtr; }
};

struct Signature {
  std::vector<Type> params;
  std::optional<Type> ret;  // nullopt means void

  bool returns_void() const { return !ret.has_value(); }
};

// Structural equality: two signatures are equal iff return types and
// parameter lists are element-wise equal.
bool operator==(const Type& a, const Type& b);
inline bool operator!=(const Type& a, const Type& b) { return !(a == b); }
bool operator==(const Signature& a, const Signature& b);
inline bool operator!=(const Signature& a, const Signature& b) { return !(a == b); }

// Canonical spellings, e.g. "int", "fn(int, int) -> int".
std::string to_string(const Type& t);
std::string to_string(const Signature& s);

enum class BinOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Gt, And, Or };
const char* to_string(BinOp op);

// ---- Instruction bodies ----------------------------------------------------

struct ConstIns {
  std::string dst;
  int64_t value = 0;
  friend bool operator==(const ConstIns&, const ConstIns&) = default;
};
struct ReadInputIns {
  std::string dst;
  friend bool operator==(const ReadInputIns&, const ReadInputIns&) = default;
};
struct BinOpIns {
  std::string dst;
  BinOp op = BinOp::Add;
  std::string lhs, rhs;
  friend bool operator==(const BinOpIns&, const BinOpIns&) = default;
};
struct FnAddrIns {
  std::string dst;
  std::string fn;
  friend bool operator==(const FnAddrIns&, const FnAddrIns&) = default;
};
struct CallDirectIns {
  std::string dst;  // empty if the result is unused / callee returns void
  std::string callee;
  std::vector<std::string> args;
  friend bool operator==(const CallDirectIns&, const CallDirectIns&) = default;
};
struct CallIndirectIns {
  std::string dst;
  Signature sig;  // signature carried by the call site
  std::string ptr;
  std::vector<std::string> args;
  friend bool operator==(const CallIndirectIns&, const CallIndirectIns&) = default;
};
struct BrIns {
  std::string cond;
  std::string if_true, if_false;
  friend bool operator==(const BrIns&, const BrIns&) = default;
};
struct JmpIns {
  std::string label;
  friend bool operator==(const JmpIns&, const JmpIns&) = default;
};
struct RetIns {
  std::optional<std::string> value;
  friend bool operator==(const RetIns&, const RetIns&) = default;
};
struct ExitIns {
  int64_t code = 0;
  // Set on exits inserted by the pruner; the interpreter reports those runs
  // as PrunedExit instead of NormalReturn. Persisted as `prune_exit`.
  bool pruner_inserted = false;
  friend bool operator==(const ExitIns&, const ExitIns&) = default;
};
struct TargetIns {
  std::string id;
  friend bool operator==(const TargetIns&, const TargetIns&) = default;
};
struct BugIns {
  std::string id;
  friend bool operator==(const BugIns&, const BugIns&) = default;
};
struct MarkerIns {
  friend bool operator==(const MarkerIns&, const MarkerIns&) = default;
};

using InsBody = std::variant<ConstIns, ReadInputIns, BinOpIns, FnAddrIns,
                             CallDirectIns, CallIndirectIns, BrIns, JmpIns,
                             RetIns, ExitIns, TargetIns, BugIns, MarkerIns>;

// Instruction ids are program-unique and stable across the marking and
// pruning passes: parser-assigned ids count only user instructions, while
// synthetic instructions (markers, pruner exits) draw from a disjoint range.
// Structural equality ignores ids and source lines.
inline constexpr uint32_t kSyntheticIdBase = 1'000'000'000;

struct Instruction {
  uint32_t id = 0;
  uint32_t line = 0;  // source line, 0 for synthetic instructions
  InsBody body;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&body);
  }
  bool is_marker() const { return std::holds_alternative<MarkerIns>(body); }
  bool is_exit() const { return std::holds_alternative<ExitIns>(body); }
  // br/jmp/ret may only appear as the final instruction of a block.
  bool is_strict_terminator() const {
    return std::holds_alternative<BrIns>(body) ||
           std::holds_alternative<JmpIns>(body) ||
           std::holds_alternative<RetIns>(body);
  }
  // Instructions allowed in the final position: br/jmp/ret/exit.
  bool stops_flow() const { return is_strict_terminator() || is_exit(); }
  bool is_call() const {
    return std::holds_alternative<CallDirectIns>(body) ||
           std::holds_alternative<CallIndirectIns>(body);
  }

  friend bool operator==(const Instruction& a, const Instruction& b) {
    return a.body == b.body;
  }
};

struct BasicBlock {
  std::string label;
  std::vector<Instruction> instructions;
  friend bool operator==(const BasicBlock&, const BasicBlock&) = default;
};

struct Param {
  std::string name;
  Type type;
  friend bool operator==(const Param& a, const Param& b) {
    return a.name == b.name && a.type == b.type;
  }
};

struct Function {
  std::string name;
  std::vector<Param> params;
  std::optional<Type> ret;  // nullopt means void
  std::vector<BasicBlock> blocks;  // first block is the entry block

  Signature signature() const;
  friend bool operator==(const Function& a, const Function& b) {
    return a.name == b.name && a.params == b.params && a.ret == b.ret &&
           a.blocks == b.blocks;
  }
};

struct Program {
  std::vector<Function> functions;
  std::string entry = "main";

  const Function* find_function(const std::string& name) const;
  friend bool operator==(const Program&, const Program&) = default;
};

// The set of target ids a run of the toolchain is directed at.
struct TargetSpec {
  std::set<std::string> target_ids;
};

// ---- Validation ------------------------------------------------------------

struct Violation {
  std::string function;
  std::string block;
  uint32_t instr_id = 0;  // 0 when the violation is not tied to an instruction
  std::string message;
};

// Returns an empty list iff all structural and type invariants hold.
// Violations are data, not failures.
std::vector<Violation> validate(const Program& p);

// Fresh id helpers for passes that insert synthetic instructions.
uint32_t max_synthetic_id(const Program& p);

}  // namespace tir
