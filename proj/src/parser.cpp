#include <cctype>
#include <map>
#include <optional>
#include <vector>

#include "tir/text.hpp"

namespace tir {

namespace {

struct Token {
  enum Kind { Ident, Number, Punct, End } kind = End;
  std::string text;
  int64_t number = 0;
  int column = 0;
};

// Tokenizes one line; '#' starts a comment.
class Line {
 public:
  Line(const std::string& s, int lineno) : lineno_(lineno) {
    size_t i = 0;
    while (i < s.size()) {
      char c = s[i];
      if (c == '#') break;
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      Token t;
      t.column = static_cast<int>(i) + 1;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t j = i;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) ||
                                s[j] == '_'))
          ++j;
        t.kind = Token::Ident;
        t.text = s.substr(i, j - i);
        i = j;
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && i + 1 < s.size() &&
                  std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
        size_t j = i + 1;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
          ++j;
        t.kind = Token::Number;
        t.text = s.substr(i, j - i);
        t.number = std::stoll(t.text);
        i = j;
      } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
        t.kind = Token::Punct;
        t.text = "->";
        i += 2;
      } else {
        t.kind = Token::Punct;
        t.text = std::string(1, c);
        ++i;
      }
      toks_.push_back(std::move(t));
    }
  }

  bool empty() const { return toks_.empty(); }
  bool at_end() const { return pos_ >= toks_.size(); }
  const Token& peek() const {
    static Token end;
    return at_end() ? end : toks_[pos_];
  }
  Token next() {
    Token t = peek();
    if (!at_end()) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    int col = at_end() ? (toks_.empty() ? 1 : toks_.back().column) : peek().column;
    throw ParseError(lineno_, col, msg);
  }
  std::string expect_ident() {
    if (peek().kind != Token::Ident) fail("expected identifier");
    return next().text;
  }
  void expect_punct(const std::string& p) {
    if (peek().kind != Token::Punct || peek().text != p)
      fail("expected '" + p + "'");
    next();
  }
  bool accept_punct(const std::string& p) {
    if (peek().kind == Token::Punct && peek().text == p) {
      next();
      return true;
    }
    return false;
  }
  bool accept_ident(const std::string& kw) {
    if (peek().kind == Token::Ident && peek().text == kw) {
      next();
      return true;
    }
    return false;
  }
  int64_t expect_number() {
    if (peek().kind != Token::Number) fail("expected integer literal");
    return next().number;
  }
  void expect_end() {
    if (!at_end()) fail("trailing tokens");
  }
  int lineno() const { return lineno_; }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  int lineno_;
};

const std::map<std::string, BinOp>& binop_table() {
  static const std::map<std::string, BinOp> t = {
      {"add", BinOp::Add}, {"sub", BinOp::Sub}, {"mul", BinOp::Mul},
      {"div", BinOp::Div}, {"eq", BinOp::Eq},   {"ne", BinOp::Ne},
      {"lt", BinOp::Lt},   {"gt", BinOp::Gt},   {"and", BinOp::And},
      {"or", BinOp::Or}};
  return t;
}

constexpr int kMaxTypeDepth = 64;

Type parse_type(Line& ln, int depth) {
  if (depth > kMaxTypeDepth) ln.fail("type nesting too deep");
  if (ln.accept_ident("int")) return Type::integer();
  if (ln.accept_ident("fn")) {
    Signature sig;
    ln.expect_punct("(");
    if (!ln.accept_punct(")")) {
      do {
        sig.params.push_back(parse_type(ln, depth + 1));
      } while (ln.accept_punct(","));
      ln.expect_punct(")");
    }
    if (ln.accept_punct("->")) sig.ret = parse_type(ln, depth + 1);
    return Type::fnptr(std::move(sig));
  }
  ln.fail("expected type");
}

std::vector<std::string> parse_args(Line& ln) {
  std::vector<std::string> args;
  ln.expect_punct("(");
  if (ln.accept_punct(")")) return args;
  do {
    args.push_back(ln.expect_ident());
  } while (ln.accept_punct(","));
  ln.expect_punct(")");
  return args;
}

struct Parser {
  const ParseOptions& opts;
  Program prog;
  Function* cur_fn = nullptr;
  BasicBlock* cur_blk = nullptr;
  bool entry_set = false;

  void parse_instruction(Line& ln);
  InsBody parse_op(Line& ln, std::string dst);
};

InsBody Parser::parse_op(Line& ln, std::string dst) {
  std::string op = ln.expect_ident();
  if (op == "const") {
    return ConstIns{std::move(dst), ln.expect_number()};
  }
  if (op == "read_input") {
    return ReadInputIns{std::move(dst)};
  }
  if (auto it = binop_table().find(op); it != binop_table().end()) {
    BinOpIns b;
    b.dst = std::move(dst);
    b.op = it->second;
    b.lhs = ln.expect_ident();
    ln.expect_punct(",");
    b.rhs = ln.expect_ident();
    return b;
  }
  if (op == "fnaddr") {
    return FnAddrIns{std::move(dst), ln.expect_ident()};
  }
  if (op == "call") {
    CallDirectIns c;
    c.dst = std::move(dst);
    c.callee = ln.expect_ident();
    c.args = parse_args(ln);
    return c;
  }
  if (op == "icall") {
    CallIndirectIns c;
    c.dst = std::move(dst);
    ln.expect_punct("[");
    Type t = parse_type(ln, 0);
    if (!t.is_fnptr()) ln.fail("indirect call signature must be a fn type");
    c.sig = *t.sig;
    ln.expect_punct("]");
    c.ptr = ln.expect_ident();
    c.args = parse_args(ln);
    return c;
  }
  ln.fail("unknown instruction '" + op + "'");
}

void Parser::parse_instruction(Line& ln) {
  if (!cur_blk) ln.fail("instruction outside of a basic block");
  Instruction ins;
  ins.line = static_cast<uint32_t>(ln.lineno());

  const Token& first = ln.peek();
  if (first.kind != Token::Ident) ln.fail("expected instruction");
  std::string head = first.text;

  if (head == "br") {
    ln.next();
    BrIns b;
    b.cond = ln.expect_ident();
    ln.expect_punct(",");
    b.if_true = ln.expect_ident();
    ln.expect_punct(",");
    b.if_false = ln.expect_ident();
    ins.body = std::move(b);
  } else if (head == "jmp") {
    ln.next();
    ins.body = JmpIns{ln.expect_ident()};
  } else if (head == "ret") {
    ln.next();
    RetIns r;
    if (!ln.at_end()) r.value = ln.expect_ident();
    ins.body = std::move(r);
  } else if (head == "exit") {
    ln.next();
    ins.body = ExitIns{ln.expect_number(), false};
  } else if (head == "target") {
    ln.next();
    ins.body = TargetIns{ln.expect_ident()};
  } else if (head == "bug") {
    ln.next();
    ins.body = BugIns{ln.expect_ident()};
  } else if (head == "marker") {
    if (!opts.trusted)
      ln.fail("'marker' is not allowed in untrusted input");
    ln.next();
    ins.body = MarkerIns{};
  } else if (head == "prune_exit") {
    if (!opts.trusted)
      ln.fail("'prune_exit' is not allowed in untrusted input");
    ln.next();
    ins.body = ExitIns{0, true};
  } else if (head == "call" || head == "icall") {
    ins.body = parse_op(ln, "");
  } else {
    // Either "name = op ..." or an error.
    ln.next();
    ln.expect_punct("=");
    ins.body = parse_op(ln, head);
  }
  ln.expect_end();
  cur_blk->instructions.push_back(std::move(ins));
}

}  // namespace

Program parse_program(const std::string& text, const ParseOptions& opts) {
  Parser ps{opts, {}, nullptr, nullptr, false};

  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    lines.push_back(cur);
  }

  for (size_t n = 0; n < lines.size(); ++n) {
    Line ln(lines[n], static_cast<int>(n) + 1);
    if (ln.empty()) continue;

    if (ln.accept_ident("entry")) {
      if (ps.entry_set) ln.fail("duplicate entry directive");
      ps.prog.entry = ln.expect_ident();
      ps.entry_set = true;
      ln.expect_end();
      continue;
    }
    if (ln.accept_ident("func")) {
      if (ps.cur_fn) ln.fail("nested function definition");
      Function f;
      f.name = ln.expect_ident();
      ln.expect_punct("(");
      if (!ln.accept_punct(")")) {
        do {
          Param prm;
          prm.name = ln.expect_ident();
          ln.expect_punct(":");
          prm.type = parse_type(ln, 0);
          f.params.push_back(std::move(prm));
        } while (ln.accept_punct(","));
        ln.expect_punct(")");
      }
      if (ln.accept_punct("->")) f.ret = parse_type(ln, 0);
      ln.expect_punct("{");
      ln.expect_end();
      ps.prog.functions.push_back(std::move(f));
      ps.cur_fn = &ps.prog.functions.back();
      ps.cur_blk = nullptr;
      continue;
    }
    if (ln.peek().kind == Token::Punct && ln.peek().text == "}") {
      ln.next();
      ln.expect_end();
      if (!ps.cur_fn) ln.fail("'}' outside of a function");
      if (ps.cur_fn->blocks.empty())
        ln.fail("function '" + ps.cur_fn->name + "' has no blocks");
      ps.cur_fn = nullptr;
      ps.cur_blk = nullptr;
      continue;
    }
    if (!ps.cur_fn) ln.fail("expected 'entry', 'func' or end of file");

    // "label:" opens a block; an instruction may follow on the same line.
    if (ln.peek().kind == Token::Ident) {
      Line probe = ln;
      std::string name = probe.expect_ident();
      if (probe.accept_punct(":")) {
        ps.cur_fn->blocks.push_back(BasicBlock{name, {}});
        ps.cur_blk = &ps.cur_fn->blocks.back();
        ln = probe;
        if (ln.at_end()) continue;
        ps.parse_instruction(ln);
        continue;
      }
    }
    ps.parse_instruction(ln);
  }
  if (ps.cur_fn)
    throw ParseError(static_cast<int>(lines.size()), 1,
                     "unterminated function '" + ps.cur_fn->name + "'");

  // Assign program-unique ids: user instructions get sequential small ids,
  // pass-generated instructions (markers, pruner exits) a disjoint range, so
  // original ids stay stable across the marked and pruned artifacts.
  uint32_t next_id = 1;
  uint32_t next_synth = kSyntheticIdBase + 1;
  for (Function& f : ps.prog.functions)
    for (BasicBlock& b : f.blocks)
      for (Instruction& ins : b.instructions) {
        bool synth = ins.is_marker() ||
                     (ins.as<ExitIns>() && ins.as<ExitIns>()->pruner_inserted);
        ins.id = synth ? next_synth++ : next_id++;
      }

  std::vector<Violation> errs = validate(ps.prog);
  if (!errs.empty()) {
    const Violation& v = errs.front();
    int line = 0;
    for (const Function& f : ps.prog.functions)
      for (const BasicBlock& b : f.blocks)
        for (const Instruction& ins : b.instructions)
          if (ins.id == v.instr_id && v.instr_id != 0)
            line = static_cast<int>(ins.line);
    throw ParseError(line, 1, v.message);
  }
  return ps.prog;
}

std::string print_program(const Program& p) {
  std::string out = "entry " + p.entry + "\n";
  for (const Function& f : p.functions) {
    out += "\nfunc " + f.name + "(";
    for (size_t i = 0; i < f.params.size(); ++i) {
      if (i) out += ", ";
      out += f.params[i].name + ": " + to_string(f.params[i].type);
    }
    out += ")";
    if (f.ret) out += " -> " + to_string(*f.ret);
    out += " {\n";
    for (const BasicBlock& b : f.blocks) {
      out += b.label + ":\n";
      for (const Instruction& ins : b.instructions) {
        out += "  ";
        if (auto* c = ins.as<ConstIns>()) {
          out += c->dst + " = const " + std::to_string(c->value);
        } else if (auto* r = ins.as<ReadInputIns>()) {
          out += r->dst + " = read_input";
        } else if (auto* bo = ins.as<BinOpIns>()) {
          out += bo->dst + " = " + std::string(to_string(bo->op)) + " " +
                 bo->lhs + ", " + bo->rhs;
        } else if (auto* fa = ins.as<FnAddrIns>()) {
          out += fa->dst + " = fnaddr " + fa->fn;
        } else if (auto* cd = ins.as<CallDirectIns>()) {
          if (!cd->dst.empty()) out += cd->dst + " = ";
          out += "call " + cd->callee + "(";
          for (size_t i = 0; i < cd->args.size(); ++i) {
            if (i) out += ", ";
            out += cd->args[i];
          }
          out += ")";
        } else if (auto* ci = ins.as<CallIndirectIns>()) {
          if (!ci->dst.empty()) out += ci->dst + " = ";
          Type t;
          t.kind = Type::Kind::FnPtr;
          t.sig = std::make_shared<const Signature>(ci->sig);
          out += "icall [" + to_string(t) + "] " + ci->ptr + "(";
          for (size_t i = 0; i < ci->args.size(); ++i) {
            if (i) out += ", ";
            out += ci->args[i];
          }
          out += ")";
        } else if (auto* br = ins.as<BrIns>()) {
          out += "br " + br->cond + ", " + br->if_true + ", " + br->if_false;
        } else if (auto* j = ins.as<JmpIns>()) {
          out += "jmp " + j->label;
        } else if (auto* rt = ins.as<RetIns>()) {
          out += "ret";
          if (rt->value) out += " " + *rt->value;
        } else if (auto* ex = ins.as<ExitIns>()) {
          if (ex->pruner_inserted)
            out += "prune_exit";
          else
            out += "exit " + std::to_string(ex->code);
        } else if (auto* tg = ins.as<TargetIns>()) {
          out += "target " + tg->id;
        } else if (auto* bg = ins.as<BugIns>()) {
          out += "bug " + bg->id;
        } else if (ins.is_marker()) {
          out += "marker";
        }
        out += "\n";
      }
    }
    out += "}\n";
  }
  return out;
}

}  // namespace tir
