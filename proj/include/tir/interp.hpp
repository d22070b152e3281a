// Deterministic interpreter over byte-string inputs. Stands in for native
// execution plus sanitizer: coverage is collected per run, `bug` instructions
// abort with a call stack, reads past end-of-input yield zero.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tir/ir.hpp"
#include "tir/layout.hpp"

namespace tir {

enum class Termination { NormalReturn, PrunedExit, BugTriggered, StepBudgetExhausted };
const char* to_string(Termination t);

struct StackFrameRef {
  std::string function;
  uint32_t instr_id = 0;
  friend bool operator==(const StackFrameRef&, const StackFrameRef&) = default;
  friend auto operator<=>(const StackFrameRef&, const StackFrameRef&) = default;
};

struct ExecutionTrace {
  Termination termination = Termination::NormalReturn;
  uint64_t steps = 0;
  int64_t exit_code = 0;

  std::string bug_id;                    // set when termination == BugTriggered
  std::vector<StackFrameRef> bug_stack;  // innermost frame first

  std::vector<uint32_t> blocks_covered;  // sorted global block ids
  // Edge key packs (from << 32 | to); sorted by key, value is the hit count.
  std::vector<std::pair<uint64_t, uint32_t>> edges;
  std::vector<int> targets_hit;          // indices into Interpreter::targets()
  // Concrete (call instruction id, callee function index) pairs, for
  // differential checks against the static call graph.
  std::vector<std::pair<uint32_t, int>> indirect_calls;
  std::vector<uint32_t> instr_trace;     // filled only when requested
};

struct InterpOptions {
  uint64_t step_budget = 1'000'000;
  uint32_t max_stack_depth = 1024;
  bool record_instruction_trace = false;
};

struct TargetInfo {
  std::string id;
  std::string function;
  std::string block;
  uint32_t instr_id = 0;
};

// Raised on dynamic type violations (indirect call through a value that does
// not hold a matching function). Cannot happen for programs whose function
// pointer definitions precede their uses on every path.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Interpreter {
 public:
  // The program must be valid and outlive the interpreter.
  explicit Interpreter(const Program& p);
  ~Interpreter();
  Interpreter(const Interpreter&) = delete;
  Interpreter& operator=(const Interpreter&) = delete;

  ExecutionTrace run(std::span<const uint8_t> input, const InterpOptions& opt = {});

  const Layout& layout() const;
  const std::vector<TargetInfo>& targets() const;

 private:
  struct Impl;
  Impl* impl_;
};

// One-shot convenience wrapper.
ExecutionTrace interpret(const Program& p, std::span<const uint8_t> input,
                         const InterpOptions& opt = {});

}  // namespace tir
