#include "tir/ir.hpp"

#include <map>
#include <set>

namespace tir {

Type Type::fnptr(Signature s) {
  Type t;
  t.kind = Kind::FnPtr;
  t.sig = std::make_shared<const Signature>(std::move(s));
  return t;
}

bool operator==(const Type& a, const Type& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Type::Kind::Int) return true;
  return *a.sig == *b.sig;
}

bool operator==(const Signature& a, const Signature& b) {
  if (a.params.size() != b.params.size()) return false;
  for (size_t i = 0; i < a.params.size(); ++i)
    if (!(a.params[i] == b.params[i])) return false;
  if (a.ret.has_value() != b.ret.has_value()) return false;
  if (a.ret && !(*a.ret == *b.ret)) return false;
  return true;
}

std::string to_string(const Type& t) {
  if (t.is_int()) return "int";
  std::string out = "fn(";
  const Signature& s = *t.sig;
  for (size_t i = 0; i < s.params.size(); ++i) {
    if (i) out += ", ";
    out += to_string(s.params[i]);
  }
  out += ")";
  if (s.ret) out += " -> " + to_string(*s.ret);
  return out;
}

std::string to_string(const Signature& s) {
  std::string out = "(";
  for (size_t i = 0; i < s.params.size(); ++i) {
    if (i) out += ", ";
    out += to_string(s.params[i]);
  }
  out += ")";
  out += s.ret ? " -> " + to_string(*s.ret) : " -> void";
  return out;
}

const char* to_string(BinOp op) {
  switch (op) {
    case BinOp::Add: return "add";
    case BinOp::Sub: return "sub";
    case BinOp::Mul: return "mul";
    case BinOp::Div: return "div";
    case BinOp::Eq: return "eq";
    case BinOp::Ne: return "ne";
    case BinOp::Lt: return "lt";
    case BinOp::Gt: return "gt";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
  }
  return "?";
}

Signature Function::signature() const {
  Signature s;
  for (const Param& p : params) s.params.push_back(p.type);
  s.ret = ret;
  return s;
}

const Function* Program::find_function(const std::string& name) const {
  for (const Function& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

uint32_t max_synthetic_id(const Program& p) {
  uint32_t m = kSyntheticIdBase;
  for (const Function& f : p.functions)
    for (const BasicBlock& b : f.blocks)
      for (const Instruction& i : b.instructions)
        if (i.id > m) m = i.id;
  return m;
}

namespace {

const std::string* dst_of(const Instruction& ins) {
  if (auto* c = ins.as<ConstIns>()) return &c->dst;
  if (auto* r = ins.as<ReadInputIns>()) return &r->dst;
  if (auto* b = ins.as<BinOpIns>()) return &b->dst;
  if (auto* f = ins.as<FnAddrIns>()) return &f->dst;
  if (auto* cd = ins.as<CallDirectIns>()) return &cd->dst;
  if (auto* ci = ins.as<CallIndirectIns>()) return &ci->dst;
  return nullptr;
}

struct FnChecker {
  const Program& p;
  const Function& f;
  std::vector<Violation>& out;

  std::map<std::string, int> labels;
  std::map<std::string, Type> env;       // defined so far, textual order
  std::set<std::string> defined_later;   // any dst anywhere in the function
  const BasicBlock* cur = nullptr;

  void add(uint32_t id, std::string msg) {
    out.push_back(Violation{f.name, cur ? cur->label : "", id, std::move(msg)});
  }

  const Type* use(const std::string& name, const Instruction& ins) {
    auto it = env.find(name);
    if (it != env.end()) return &it->second;
    if (defined_later.count(name))
      add(ins.id, "value '" + name + "' used before its definition");
    else
      add(ins.id, "use of undefined value '" + name + "'");
    return nullptr;
  }

  void def(const std::string& name, Type t, const Instruction& ins) {
    if (name.empty()) return;
    if (env.count(name)) {
      add(ins.id, "value '" + name + "' redefined");
      return;
    }
    env.emplace(name, std::move(t));
  }

  void check_args(const Instruction& ins, const Signature& sig,
                  const std::vector<std::string>& args,
                  const std::string& dst) {
    if (args.size() != sig.params.size())
      add(ins.id, "call argument count mismatch");
    for (size_t i = 0; i < args.size(); ++i) {
      const Type* t = use(args[i], ins);
      if (t && i < sig.params.size() && !(*t == sig.params[i]))
        add(ins.id, "call argument type mismatch for '" + args[i] + "'");
    }
    if (!dst.empty() && sig.returns_void())
      add(ins.id, "void call cannot define a value");
  }

  void run() {
    for (size_t bi = 0; bi < f.blocks.size(); ++bi) {
      const std::string& l = f.blocks[bi].label;
      if (labels.count(l)) {
        cur = &f.blocks[bi];
        add(0, "duplicate block name '" + l + "'");
      }
      labels[l] = static_cast<int>(bi);
    }
    cur = nullptr;

    if (f.blocks.empty()) {
      add(0, "function has no blocks");
      return;
    }

    for (const Param& prm : f.params) {
      if (env.count(prm.name)) add(0, "duplicate parameter '" + prm.name + "'");
      env[prm.name] = prm.type;
    }
    for (const BasicBlock& b : f.blocks)
      for (const Instruction& ins : b.instructions)
        if (const std::string* d = dst_of(ins); d && !d->empty())
          defined_later.insert(*d);

    for (const BasicBlock& b : f.blocks) {
      cur = &b;
      if (b.instructions.empty()) {
        add(0, "empty basic block '" + b.label + "'");
        continue;
      }
      for (size_t ii = 0; ii < b.instructions.size(); ++ii) {
        const Instruction& ins = b.instructions[ii];
        bool last = ii + 1 == b.instructions.size();
        if (ins.is_strict_terminator() && !last)
          add(ins.id, "instruction follows a terminator");
        if (last && !ins.stops_flow())
          add(ins.id, "block '" + b.label + "' does not end in a terminator");
        check_ins(ins);
      }
    }
  }

  void check_ins(const Instruction& ins) {
    if (auto* c = ins.as<ConstIns>()) {
      def(c->dst, Type::integer(), ins);
    } else if (auto* r = ins.as<ReadInputIns>()) {
      def(r->dst, Type::integer(), ins);
    } else if (auto* bo = ins.as<BinOpIns>()) {
      for (const std::string* o : {&bo->lhs, &bo->rhs})
        if (const Type* t = use(*o, ins); t && !t->is_int())
          add(ins.id, "arithmetic on non-int value '" + *o + "'");
      def(bo->dst, Type::integer(), ins);
    } else if (auto* fa = ins.as<FnAddrIns>()) {
      const Function* callee = p.find_function(fa->fn);
      if (!callee) {
        add(ins.id, "unknown function '" + fa->fn + "'");
        def(fa->dst, Type::integer(), ins);
      } else {
        def(fa->dst, Type::fnptr(callee->signature()), ins);
      }
    } else if (auto* cd = ins.as<CallDirectIns>()) {
      const Function* callee = p.find_function(cd->callee);
      if (!callee) {
        add(ins.id, "unknown callee '" + cd->callee + "'");
        for (const std::string& a : cd->args) use(a, ins);
        if (!cd->dst.empty()) def(cd->dst, Type::integer(), ins);
        return;
      }
      check_args(ins, callee->signature(), cd->args, cd->dst);
      if (!cd->dst.empty())
        def(cd->dst, callee->ret ? *callee->ret : Type::integer(), ins);
    } else if (auto* ci = ins.as<CallIndirectIns>()) {
      if (const Type* t = use(ci->ptr, ins))
        if (!t->is_fnptr() || !(*t->sig == ci->sig))
          add(ins.id, "type mismatch on indirect call pointer '" + ci->ptr + "'");
      check_args(ins, ci->sig, ci->args, ci->dst);
      if (!ci->dst.empty())
        def(ci->dst, ci->sig.ret ? *ci->sig.ret : Type::integer(), ins);
    } else if (auto* br = ins.as<BrIns>()) {
      if (const Type* t = use(br->cond, ins); t && !t->is_int())
        add(ins.id, "branch condition must be int");
      for (const std::string* l : {&br->if_true, &br->if_false})
        if (!labels.count(*l)) add(ins.id, "unknown label '" + *l + "'");
    } else if (auto* j = ins.as<JmpIns>()) {
      if (!labels.count(j->label)) add(ins.id, "unknown label '" + j->label + "'");
    } else if (auto* rt = ins.as<RetIns>()) {
      if (f.ret.has_value() != rt->value.has_value())
        add(ins.id, "return arity mismatch");
      else if (rt->value) {
        if (const Type* t = use(*rt->value, ins); t && !(*t == *f.ret))
          add(ins.id, "return type mismatch");
      }
    }
    // exit/target/bug/marker carry no operands to check
  }
};

}  // namespace

std::vector<Violation> validate(const Program& p) {
  std::vector<Violation> out;

  std::set<std::string> names;
  for (const Function& f : p.functions) {
    if (!names.insert(f.name).second)
      out.push_back(
          Violation{f.name, "", 0, "duplicate function name '" + f.name + "'"});
  }

  const Function* entry = p.find_function(p.entry);
  if (!entry)
    out.push_back(
        Violation{"", "", 0, "entry function '" + p.entry + "' does not exist"});
  else if (!entry->params.empty())
    out.push_back(
        Violation{p.entry, "", 0, "entry function must take no parameters"});

  for (const Function& f : p.functions) {
    FnChecker chk{p, f, out, {}, {}, {}, nullptr};
    chk.run();
  }
  return out;
}

}  // namespace tir
