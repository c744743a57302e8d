#include "sill/printer.hpp"

#include <sstream>

namespace sill {

namespace {

std::string amount(const Rat& q, int site) {
  return site >= 0 ? "?" : rat_to_string(q);
}

// Value types: sums bind loosest, products tighter, atoms tightest.
std::string fun_type_prec(const FunTypePtr& t, int min_prec) {
  std::string s;
  int prec;
  switch (t->kind) {
  case FunType::Kind::Base:
    return base_type_name(t->base);
  case FunType::Kind::Sum:
    prec = 0;
    s = fun_type_prec(t->left, prec + 1) + " + " + fun_type_prec(t->right, prec);
    break;
  case FunType::Kind::Prod:
    prec = 1;
    s = fun_type_prec(t->left, prec + 1) + " * " + fun_type_prec(t->right, prec);
    break;
  case FunType::Kind::Proc:
    return "<process>"; // never written in source; shown in diagnostics only
  }
  return prec < min_prec ? "(" + s + ")" : s;
}

// Session types that can stand as the left operand of `-o` or `*` without
// parentheses: exactly the parser's type atoms.
bool is_type_atom(const TypePtr& t) {
  switch (t->kind) {
  case SessionType::Kind::Var:
  case SessionType::Kind::One:
  case SessionType::Kind::Ext:
  case SessionType::Kind::Int:
    return true;
  default:
    return false;
  }
}

std::string type_left(const TypePtr& t) {
  std::string s = print_type(t);
  return is_type_atom(t) ? s : "(" + s + ")";
}

bool is_skel_atom(const SkelPtr& k) {
  switch (k->kind) {
  case Skeleton::Kind::Var:
  case Skeleton::Kind::One:
  case Skeleton::Kind::Ext:
  case Skeleton::Kind::ExtWorld:
  case Skeleton::Kind::Int:
  case Skeleton::Kind::IntWorld:
    return true;
  default:
    return false;
  }
}

std::string skel_left(const SkelPtr& k) {
  std::string s = print_skel(k);
  return is_skel_atom(k) ? s : "(" + s + ")";
}

// Value terms in skeletons: `inl`/`inr` arguments need parens unless atomic.
std::string hvalue_arg(const HPtr& h) {
  if (h->kind == HValue::Kind::Inl || h->kind == HValue::Kind::Inr)
    return "(" + print_hvalue(h) + ")";
  return print_hvalue(h);
}

std::string indent_str(int n) { return std::string(2 * n, ' '); }

// Expression precedence mirrors the parser: cmp 0, add 1, mul 2, atom 3.
std::string expr_prec(const FunPtr& e, int min_prec) {
  std::ostringstream os;
  int prec = 3;
  switch (e->kind) {
  case FunTerm::Kind::Var:
    return e->name;
  case FunTerm::Kind::Unit:
    return "()";
  case FunTerm::Kind::BoolLit:
    return e->bval ? "true" : "false";
  case FunTerm::Kind::IntLit: {
    // Negative literals reparse via unary minus, which lives at mul level.
    if (e->ival < 0) {
      prec = 2;
      os << e->ival.str();
    } else {
      os << e->ival.str();
    }
    break;
  }
  case FunTerm::Kind::Pair:
    return "(" + print_expr(e->args[0]) + ", " + print_expr(e->args[1]) + ")";
  case FunTerm::Kind::Inl:
    prec = 3;
    os << "inl " << expr_prec(e->args[0], 4);
    break;
  case FunTerm::Kind::Inr:
    prec = 3;
    os << "inr " << expr_prec(e->args[0], 4);
    break;
  case FunTerm::Kind::FunRef:
    return e->name;
  case FunTerm::Kind::App: {
    os << e->name << "(";
    for (size_t i = 0; i < e->args.size(); ++i) {
      if (i) os << ", ";
      os << print_expr(e->args[i]);
    }
    os << ")";
    return os.str();
  }
  case FunTerm::Kind::Arith: {
    bool mul = e->aop == ArithOp::Mul;
    prec = mul ? 2 : 1;
    const char* op = mul ? " * " : (e->aop == ArithOp::Add ? " + " : " - ");
    os << expr_prec(e->args[0], prec) << op << expr_prec(e->args[1], prec + 1);
    break;
  }
  case FunTerm::Kind::Cmp: {
    prec = 0;
    const char* op = e->cop == CmpOp::Eq ? " == " : (e->cop == CmpOp::Lt ? " < " : " <= ");
    os << expr_prec(e->args[0], 1) << op << expr_prec(e->args[1], 1);
    break;
  }
  case FunTerm::Kind::If:
    prec = 0;
    os << "if " << expr_prec(e->args[0], 1) << " then " << expr_prec(e->args[1], 1)
       << " else " << expr_prec(e->args[2], 0);
    break;
  case FunTerm::Kind::ProcVal:
    return "<process value>";
  case FunTerm::Kind::MatchPair:
    return "match " + expr_prec(e->args[0], 1) + " { (" + e->bind1 + ", " +
           e->bind2 + ") => " + print_expr(e->args[1]) + " }";
  case FunTerm::Kind::MatchSum:
    return "match " + expr_prec(e->args[0], 1) + " { inl " + e->bind1 + " => " +
           print_expr(e->args[1]) + ", inr " + e->bind2 + " => " +
           print_expr(e->args[2]) + " }";
  }
  std::string s = os.str();
  return prec < min_prec ? "(" + s + ")" : s;
}

} // namespace

std::string print_fun_type(const FunTypePtr& t) { return fun_type_prec(t, 0); }

std::string print_type(const TypePtr& t) {
  switch (t->kind) {
  case SessionType::Kind::Var:
    return t->var;
  case SessionType::Kind::One:
    return "1";
  case SessionType::Kind::ValIn:
    return print_fun_type(t->value) + " => " + print_type(t->cont);
  case SessionType::Kind::ValOut:
    return print_fun_type(t->value) + " /\\ " + print_type(t->cont);
  case SessionType::Kind::ChanIn:
    return type_left(t->arg) + " -o " + print_type(t->cont);
  case SessionType::Kind::ChanOut:
    return type_left(t->arg) + " * " + print_type(t->cont);
  case SessionType::Kind::Ext:
  case SessionType::Kind::Int: {
    std::string s = t->kind == SessionType::Kind::Ext ? "&{" : "+{";
    bool first = true;
    for (const auto& [l, b] : t->branches) {
      if (!first) s += ", ";
      first = false;
      s += l + ": " + print_type(b);
    }
    return s + "}";
  }
  case SessionType::Kind::Get:
    return "<|" + amount(t->q, t->ann_site) + " " + print_type(t->cont);
  case SessionType::Kind::Pay:
    return "|>" + amount(t->q, t->ann_site) + " " + print_type(t->cont);
  }
  return "?";
}

std::string print_hvalue(const HPtr& h) {
  switch (h->kind) {
  case HValue::Kind::Var:
    return h->var;
  case HValue::Kind::Unit:
    return "()";
  case HValue::Kind::Bool:
    return h->bval ? "true" : "false";
  case HValue::Kind::Int:
    return h->ival.str();
  case HValue::Kind::Pair:
    return "(" + print_hvalue(h->left) + ", " + print_hvalue(h->right) + ")";
  case HValue::Kind::Inl:
    return "inl " + hvalue_arg(h->left);
  case HValue::Kind::Inr:
    return "inr " + hvalue_arg(h->left);
  }
  return "?";
}

std::string print_skel(const SkelPtr& k) {
  switch (k->kind) {
  case Skeleton::Kind::Var:
    return k->var;
  case Skeleton::Kind::One:
    return "1";
  case Skeleton::Kind::ValInWorld:
    return print_hvalue(k->hval) + " => " + print_skel(k->cont);
  case Skeleton::Kind::ValInProc:
    return print_fun_type(k->value) + " => " + print_skel(k->cont);
  case Skeleton::Kind::ValOutProc:
    return print_fun_type(k->value) + " /\\ " + print_skel(k->cont);
  case Skeleton::Kind::ValOutWorld:
    return print_hvalue(k->hval) + " /\\ " + print_skel(k->cont);
  case Skeleton::Kind::ChanIn:
    return skel_left(k->arg) + " -o " + print_skel(k->cont);
  case Skeleton::Kind::ChanOut:
    return skel_left(k->arg) + " * " + print_skel(k->cont);
  case Skeleton::Kind::Ext:
  case Skeleton::Kind::ExtWorld:
  case Skeleton::Kind::Int:
  case Skeleton::Kind::IntWorld: {
    std::string s;
    switch (k->kind) {
    case Skeleton::Kind::Ext: s = "&{"; break;
    case Skeleton::Kind::ExtWorld:
      // A forced (single-branch) world choice carries no variable; print it
      // like a plain choice instead of an unparseable "&_{".
      s = k->choice_var.empty() ? "&{" : "&_" + k->choice_var + "{";
      break;
    case Skeleton::Kind::Int: s = "+{"; break;
    default:
      s = k->choice_var.empty() ? "+{" : "+_" + k->choice_var + "{";
      break;
    }
    bool first = true;
    for (const auto& [l, b] : k->branches) {
      if (!first) s += ", ";
      first = false;
      s += l + ": " + print_skel(b);
    }
    return s + "}";
  }
  case Skeleton::Kind::Get:
    return "<|" + rat_to_string(k->q) + " " + print_skel(k->cont);
  case Skeleton::Kind::Pay:
    return "|>" + rat_to_string(k->q) + " " + print_skel(k->cont);
  }
  return "?";
}

std::string print_expr(const FunPtr& e) { return expr_prec(e, 0); }

std::string print_proc(const ProcPtr& p, int indent) {
  std::string pre = indent_str(indent);
  switch (p->kind) {
  case ProcTerm::Kind::Spawn: {
    std::string s = pre + p->chan + " <- " + print_expr(p->expr);
    if (!p->spawn_uses.empty()) {
      s += " [";
      for (size_t i = 0; i < p->spawn_uses.size(); ++i) {
        if (i) s += ", ";
        s += p->spawn_uses[i];
      }
      s += "]";
    }
    return s + ";\n" + print_proc(p->cont, indent);
  }
  case ProcTerm::Kind::Fwd:
    return pre + p->chan + " <- " + p->chan2;
  case ProcTerm::Kind::Tick:
    return pre + "tick " + rat_to_string(p->q) + ";\n" + print_proc(p->cont, indent);
  case ProcTerm::Kind::Recv:
    return pre + p->binder + " <- recv " + p->chan + ";\n" +
           print_proc(p->cont, indent);
  case ProcTerm::Kind::SendVal:
    return pre + "send " + p->chan + " " + print_expr(p->expr) + ";\n" +
           print_proc(p->cont, indent);
  case ProcTerm::Kind::SendChan:
    return pre + "send " + p->chan + " " + p->chan2 + ";\n" +
           print_proc(p->cont, indent);
  case ProcTerm::Kind::Case: {
    std::string s = pre + "case " + p->chan + " {\n";
    bool first = true;
    for (const auto& [l, b] : p->branches) {
      if (!first) s += ",\n";
      first = false;
      s += indent_str(indent + 1) + l + " =>\n" + print_proc(b, indent + 2);
    }
    return s + "\n" + pre + "}";
  }
  case ProcTerm::Kind::Select:
    return pre + p->chan + "." + p->label + ";\n" + print_proc(p->cont, indent);
  case ProcTerm::Kind::Close:
    return pre + "close " + p->chan;
  case ProcTerm::Kind::Wait:
    return pre + "wait " + p->chan + ";\n" + print_proc(p->cont, indent);
  case ProcTerm::Kind::Get:
    return pre + "get " + p->chan + " {" + amount(p->q, p->ann_site) + "};\n" +
           print_proc(p->cont, indent);
  case ProcTerm::Kind::Pay:
    return pre + "pay " + p->chan + " {" + amount(p->q, p->ann_site) + "};\n" +
           print_proc(p->cont, indent);
  }
  return pre + "?";
}

std::string print_program(const Program& p) {
  std::ostringstream os;
  for (const auto& [name, def] : p.sig.type_defs)
    os << "type " << name << " = " << print_type(def) << "\n";
  if (!p.sig.type_defs.empty()) os << "\n";
  for (const auto& [name, def] : p.sig.fun_defs) {
    if (def.value->kind == FunTerm::Kind::ProcVal) {
      const auto& pv = *def.value;
      os << "proc " << name;
      if (!def.params.empty()) {
        os << "(";
        for (size_t i = 0; i < def.params.size(); ++i) {
          if (i) os << ", ";
          os << def.params[i].first << " : " << print_fun_type(def.params[i].second);
        }
        os << ")";
      }
      os << " |- {"
         << amount(pv.iface->init_potential, pv.iface->init_site) << "} ("
         << pv.prov_name << " : " << print_type(pv.iface->provides) << ")";
      if (!pv.use_names.empty()) {
        os << " [";
        for (size_t i = 0; i < pv.use_names.size(); ++i) {
          if (i) os << ", ";
          os << pv.use_names[i] << " : " << print_type(pv.iface->uses[i]);
        }
        os << "]";
      }
      os << " =\n" << print_proc(pv.body, 1) << "\n\n";
    } else {
      os << "def " << name;
      os << "(";
      for (size_t i = 0; i < def.params.size(); ++i) {
        if (i) os << ", ";
        os << def.params[i].first << " : " << print_fun_type(def.params[i].second);
      }
      os << ") : " << print_fun_type(def.ret) << " = " << print_expr(def.value)
         << "\n\n";
    }
  }
  os << "config {\n";
  for (const auto& e : p.config) {
    os << "  " << e.chan << " <- " << print_expr(e.callee);
    if (!e.uses.empty()) {
      os << " [";
      for (size_t i = 0; i < e.uses.size(); ++i) {
        if (i) os << ", ";
        os << e.uses[i];
      }
      os << "]";
    }
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

std::string print_skel_file(const SkelFile& f) {
  std::ostringstream os;
  for (const auto& [name, def] : f.defs)
    os << "skeleton " << name << " = " << print_skel(def) << "\n";
  for (const auto& [chan, k] : f.targets)
    os << "target " << chan << " = " << print_skel(k) << "\n";
  return os.str();
}

} // namespace sill
