#include "sill/parser.hpp"

#include "sill/lexer.hpp"

#include <fstream>
#include <optional>
#include <sstream>

namespace sill {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

class Parser {
public:
  Parser(const std::string& src, const std::string& filename)
      : toks_(lex(src, filename)) {}

  Program program() {
    Program p;
    sites_ = &p.num_ann_sites;
    bool saw_config = false;
    while (!at(Tok::Eof)) {
      if (at(Tok::KwType)) {
        next();
        Token name = eat(Tok::Ident, "type name");
        eat(Tok::Assign, "'='");
        define(p.sig.type_defs, name.text, parse_type(), "type", name.span);
      } else if (at(Tok::KwDef)) {
        parse_def(p);
      } else if (at(Tok::KwProc)) {
        parse_proc_def(p);
      } else if (at(Tok::KwConfig)) {
        if (saw_config)
          fail(Errc::DuplicateDefinition, "a program has one config block",
               cur().span);
        saw_config = true;
        parse_config(p);
      } else {
        fail(Errc::ParseError,
             std::string("expected a top-level definition, found ") +
                 tok_name(cur().kind),
             cur().span);
      }
    }
    return p;
  }

  SkelFile skel_file() {
    SkelFile f;
    int dummy_sites = 0;
    sites_ = &dummy_sites; // `?` is rejected below, counter stays unused
    no_unknowns_ = true;
    while (!at(Tok::Eof)) {
      if (at(Tok::KwSkeleton)) {
        next();
        Token name = eat(Tok::Ident, "skeleton name");
        eat(Tok::Assign, "'='");
        define(f.defs, name.text, parse_skel(), "skeleton", name.span);
      } else if (at(Tok::KwTarget)) {
        next();
        Token chan = eat(Tok::Ident, "channel name");
        eat(Tok::Assign, "'='");
        f.targets.emplace_back(chan.text, parse_skel());
        for (size_t i = 0; i + 1 < f.targets.size(); ++i)
          if (f.targets[i].first == chan.text)
            fail(Errc::DuplicateDefinition,
                 "channel '" + chan.text + "' already has a target skeleton",
                 chan.span);
      } else {
        fail(Errc::ParseError,
             std::string("expected 'skeleton' or 'target', found ") +
                 tok_name(cur().kind),
             cur().span);
      }
    }
    return f;
  }

  TypePtr type_only() {
    int dummy = 0;
    if (!sites_) sites_ = &dummy;
    TypePtr t = parse_type();
    eat(Tok::Eof, "end of input");
    return t;
  }
  SkelPtr skel_only() {
    int dummy = 0;
    sites_ = &dummy;
    no_unknowns_ = true;
    SkelPtr k = parse_skel();
    eat(Tok::Eof, "end of input");
    return k;
  }
  FunPtr expr_only() {
    int dummy = 0;
    sites_ = &dummy;
    FunPtr e = parse_expr();
    eat(Tok::Eof, "end of input");
    return e;
  }

  void set_sites(int* s) { sites_ = s; }

private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  int* sites_ = nullptr;
  bool no_unknowns_ = false;

  const Token& cur() const { return toks_[pos_]; }
  bool at(Tok t) const { return cur().kind == t; }
  Token next() { return toks_[pos_++]; }
  Token eat(Tok t, const char* what) {
    if (!at(t))
      fail(Errc::ParseError,
           std::string("expected ") + what + ", found " + tok_name(cur().kind),
           cur().span);
    return next();
  }

  template <class T>
  void define(std::map<std::string, T>& m, const std::string& name, T v,
              const char* what, SourceSpan sp) {
    if (!m.emplace(name, std::move(v)).second)
      fail(Errc::DuplicateDefinition,
           std::string(what) + " '" + name + "' is defined twice", sp);
  }

  // Runs f; on a parse error, rewinds and returns nothing. Errors other than
  // ParseError (duplicate labels, rejected `?`) are real and propagate.
  template <class F>
  auto attempt(F&& f) -> std::optional<decltype(f())> {
    size_t save = pos_;
    try {
      return f();
    } catch (const SillError& e) {
      if (e.code() != Errc::ParseError) throw;
      pos_ = save;
      return std::nullopt;
    }
  }

  // --- numbers ---------------------------------------------------------------

  BigInt parse_bigint() {
    Token t = eat(Tok::IntLit, "an integer");
    return BigInt(t.text);
  }

  Rat parse_rational(bool allow_negative) {
    bool neg = false;
    if (allow_negative && at(Tok::Minus)) {
      next();
      neg = true;
    }
    BigInt num = parse_bigint();
    BigInt den = 1;
    if (at(Tok::Slash)) {
      next();
      den = parse_bigint();
      if (den == 0) fail(Errc::ParseError, "zero denominator", cur().span);
    }
    Rat r(num, den);
    return neg ? Rat(-r) : r;
  }

  // A potential amount: a nonnegative rational, or `?` registering an
  // annotation site. Returns the site index, or -1 for a concrete amount.
  int parse_amount(Rat& q) {
    if (at(Tok::Question)) {
      Token t = next();
      if (no_unknowns_)
        fail(Errc::UnknownAnnotation,
             "'?' is not allowed here; skeleton amounts must be concrete",
             t.span);
      q = 0;
      return (*sites_)++;
    }
    q = parse_rational(false);
    return -1;
  }

  // --- value (functional) types ------------------------------------------------

  FunTypePtr parse_fun_type() {
    std::vector<FunTypePtr> sums{parse_fun_prod()};
    while (at(Tok::Plus)) {
      next();
      sums.push_back(parse_fun_prod());
    }
    FunTypePtr t = sums.back();
    for (size_t i = sums.size() - 1; i-- > 0;)
      t = FunType::mk_sum(sums[i], t);
    return t;
  }

  FunTypePtr parse_fun_prod() {
    std::vector<FunTypePtr> factors{parse_fun_atom()};
    while (at(Tok::Star)) {
      next();
      factors.push_back(parse_fun_atom());
    }
    FunTypePtr t = factors.back();
    for (size_t i = factors.size() - 1; i-- > 0;)
      t = FunType::mk_prod(factors[i], t);
    return t;
  }

  FunTypePtr parse_fun_atom() {
    if (at(Tok::KwUnit)) { next(); return FunType::mk_base(BaseType::Unit); }
    if (at(Tok::KwBool)) { next(); return FunType::mk_base(BaseType::Bool); }
    if (at(Tok::KwInt)) { next(); return FunType::mk_base(BaseType::Int); }
    if (at(Tok::LParen)) {
      next();
      FunTypePtr t = parse_fun_type();
      eat(Tok::RParen, "')'");
      return t;
    }
    fail(Errc::ParseError,
         std::string("expected a value type, found ") + tok_name(cur().kind),
         cur().span);
  }

  // --- session types -------------------------------------------------------------

  TypePtr parse_type() {
    if (auto r = attempt([&]() -> TypePtr {
          FunTypePtr b = parse_fun_type();
          if (at(Tok::FatArrow)) {
            next();
            return SessionType::mk_valin(b, parse_type());
          }
          if (at(Tok::SlashBack)) {
            next();
            return SessionType::mk_valout(b, parse_type());
          }
          fail(Errc::ParseError, "expected '=>' or '/\\'", cur().span);
        }))
      return *r;
    TypePtr a = parse_type_atom();
    if (at(Tok::Lolli)) {
      next();
      return SessionType::mk_chanin(a, parse_type());
    }
    if (at(Tok::Star)) {
      next();
      return SessionType::mk_chanout(a, parse_type());
    }
    return a;
  }

  TypePtr parse_type_atom() {
    SourceSpan sp = cur().span;
    if (at(Tok::IntLit)) {
      Token t = next();
      if (t.text == "1") return SessionType::mk_one();
      fail(Errc::ParseError, "'" + t.text + "' is not a session type", t.span);
    }
    if (at(Tok::Ident)) {
      Token t = next();
      return SessionType::mk_var(t.text, t.span);
    }
    if (at(Tok::Amp)) {
      next();
      return SessionType::mk_ext(parse_type_branches());
    }
    if (at(Tok::Plus)) {
      next();
      return SessionType::mk_int(parse_type_branches());
    }
    if (at(Tok::AmpUnder) || at(Tok::PlusUnder))
      fail(Errc::ParseError, "choice subscripts belong in skeletons, not types",
           sp);
    if (at(Tok::GetTok)) {
      next();
      Rat q;
      int site = parse_amount(q);
      return SessionType::mk_get(q, parse_type(), site);
    }
    if (at(Tok::PayTok)) {
      next();
      Rat q;
      int site = parse_amount(q);
      return SessionType::mk_pay(q, parse_type(), site);
    }
    if (at(Tok::LParen)) {
      next();
      TypePtr t = parse_type();
      eat(Tok::RParen, "')'");
      return t;
    }
    fail(Errc::ParseError,
         std::string("expected a session type, found ") + tok_name(cur().kind),
         sp);
  }

  std::map<std::string, TypePtr> parse_type_branches() {
    eat(Tok::LBrace, "'{'");
    std::map<std::string, TypePtr> bs;
    while (true) {
      Token l = eat(Tok::Ident, "a branch label");
      eat(Tok::Colon, "':'");
      if (!bs.emplace(l.text, parse_type()).second)
        fail(Errc::DuplicateLabel, "label '" + l.text + "' appears twice", l.span);
      if (at(Tok::Comma)) {
        next();
        continue;
      }
      break;
    }
    eat(Tok::RBrace, "'}'");
    return bs;
  }

  // --- skeletons --------------------------------------------------------------------

  SkelPtr parse_skel() {
    if (auto r = attempt([&]() -> SkelPtr {
          FunTypePtr b = parse_fun_type();
          if (at(Tok::FatArrow)) {
            next();
            return Skeleton::mk_valin_proc(b, parse_skel());
          }
          if (at(Tok::SlashBack)) {
            next();
            return Skeleton::mk_valout_proc(b, parse_skel());
          }
          fail(Errc::ParseError, "expected '=>' or '/\\'", cur().span);
        }))
      return *r;
    if (auto r = attempt([&]() -> SkelPtr {
          HPtr h = parse_hvalue();
          if (at(Tok::FatArrow)) {
            next();
            return Skeleton::mk_valin_world(h, parse_skel());
          }
          if (at(Tok::SlashBack)) {
            next();
            return Skeleton::mk_valout_world(h, parse_skel());
          }
          fail(Errc::ParseError, "expected '=>' or '/\\'", cur().span);
        }))
      return *r;
    SkelPtr a = parse_skel_atom();
    if (at(Tok::Lolli)) {
      next();
      return Skeleton::mk_chanin(a, parse_skel());
    }
    if (at(Tok::Star)) {
      next();
      return Skeleton::mk_chanout(a, parse_skel());
    }
    return a;
  }

  SkelPtr parse_skel_atom() {
    SourceSpan sp = cur().span;
    if (at(Tok::IntLit)) {
      Token t = next();
      if (t.text == "1") return Skeleton::mk_one();
      fail(Errc::ParseError, "'" + t.text + "' is not a skeleton", t.span);
    }
    if (at(Tok::Ident)) {
      Token t = next();
      return Skeleton::mk_var(t.text, t.span);
    }
    if (at(Tok::Amp)) {
      next();
      return Skeleton::mk_ext(parse_skel_branches());
    }
    if (at(Tok::AmpUnder)) {
      next();
      Token x = eat(Tok::Ident, "a choice variable");
      return Skeleton::mk_ext_world(x.text, parse_skel_branches());
    }
    if (at(Tok::Plus)) {
      next();
      return Skeleton::mk_int(parse_skel_branches());
    }
    if (at(Tok::PlusUnder)) {
      next();
      Token x = eat(Tok::Ident, "a choice variable");
      return Skeleton::mk_int_world(x.text, parse_skel_branches());
    }
    if (at(Tok::GetTok)) {
      next();
      Rat q;
      parse_amount(q);
      return Skeleton::mk_get(q, parse_skel());
    }
    if (at(Tok::PayTok)) {
      next();
      Rat q;
      parse_amount(q);
      return Skeleton::mk_pay(q, parse_skel());
    }
    if (at(Tok::LParen)) {
      next();
      SkelPtr k = parse_skel();
      eat(Tok::RParen, "')'");
      return k;
    }
    fail(Errc::ParseError,
         std::string("expected a skeleton, found ") + tok_name(cur().kind), sp);
  }

  std::map<std::string, SkelPtr> parse_skel_branches() {
    eat(Tok::LBrace, "'{'");
    std::map<std::string, SkelPtr> bs;
    while (true) {
      Token l = eat(Tok::Ident, "a branch label");
      eat(Tok::Colon, "':'");
      if (!bs.emplace(l.text, parse_skel()).second)
        fail(Errc::DuplicateLabel, "label '" + l.text + "' appears twice", l.span);
      if (at(Tok::Comma)) {
        next();
        continue;
      }
      break;
    }
    eat(Tok::RBrace, "'}'");
    return bs;
  }

  HPtr parse_hvalue() {
    if (at(Tok::Ident)) return HValue::mk_var(next().text);
    if (at(Tok::IntLit)) return HValue::mk_int(parse_bigint());
    if (at(Tok::Minus)) {
      next();
      return HValue::mk_int(-parse_bigint());
    }
    if (at(Tok::KwTrue)) { next(); return HValue::mk_bool(true); }
    if (at(Tok::KwFalse)) { next(); return HValue::mk_bool(false); }
    if (at(Tok::KwInl)) { next(); return HValue::mk_inl(parse_hvalue()); }
    if (at(Tok::KwInr)) { next(); return HValue::mk_inr(parse_hvalue()); }
    if (at(Tok::LParen)) {
      next();
      if (at(Tok::RParen)) {
        next();
        return HValue::mk_unit();
      }
      HPtr a = parse_hvalue();
      if (at(Tok::Comma)) {
        next();
        HPtr b = parse_hvalue();
        eat(Tok::RParen, "')'");
        return HValue::mk_pair(a, b);
      }
      eat(Tok::RParen, "')'");
      return a;
    }
    fail(Errc::ParseError,
         std::string("expected a value term, found ") + tok_name(cur().kind),
         cur().span);
  }

  // --- expressions ------------------------------------------------------------------

  FunPtr parse_expr() { return parse_cmp(); }

  FunPtr parse_cmp() {
    FunPtr a = parse_add();
    if (at(Tok::EqEq)) { next(); return FunTerm::mk_cmp(CmpOp::Eq, a, parse_add()); }
    if (at(Tok::Lt)) { next(); return FunTerm::mk_cmp(CmpOp::Lt, a, parse_add()); }
    if (at(Tok::Le)) { next(); return FunTerm::mk_cmp(CmpOp::Le, a, parse_add()); }
    return a;
  }

  FunPtr parse_add() {
    FunPtr a = parse_mul();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      ArithOp op = at(Tok::Plus) ? ArithOp::Add : ArithOp::Sub;
      next();
      a = FunTerm::mk_arith(op, a, parse_mul());
    }
    return a;
  }

  FunPtr parse_mul() {
    FunPtr a = parse_unary();
    while (at(Tok::Star)) {
      next();
      a = FunTerm::mk_arith(ArithOp::Mul, a, parse_unary());
    }
    return a;
  }

  FunPtr parse_unary() {
    if (at(Tok::Minus)) {
      next();
      if (at(Tok::IntLit)) return FunTerm::mk_int(-parse_bigint());
      return FunTerm::mk_arith(ArithOp::Sub, FunTerm::mk_int(0), parse_unary());
    }
    return parse_postfix();
  }

  FunPtr parse_postfix() {
    FunPtr a = parse_expr_atom();
    if (a->kind == FunTerm::Kind::Var && at(Tok::LParen)) {
      next();
      std::vector<FunPtr> args;
      if (!at(Tok::RParen)) {
        args.push_back(parse_expr());
        while (at(Tok::Comma)) {
          next();
          args.push_back(parse_expr());
        }
      }
      eat(Tok::RParen, "')'");
      return FunTerm::mk_app(a->name, std::move(args), a->span);
    }
    return a;
  }

  FunPtr parse_expr_atom() {
    SourceSpan sp = cur().span;
    if (at(Tok::IntLit)) return FunTerm::mk_int(parse_bigint());
    if (at(Tok::KwTrue)) { next(); return FunTerm::mk_bool(true); }
    if (at(Tok::KwFalse)) { next(); return FunTerm::mk_bool(false); }
    if (at(Tok::Ident)) {
      Token t = next();
      return FunTerm::mk_var(t.text, t.span);
    }
    if (at(Tok::KwInl)) { next(); return FunTerm::mk_inl(parse_expr_atom()); }
    if (at(Tok::KwInr)) { next(); return FunTerm::mk_inr(parse_expr_atom()); }
    if (at(Tok::KwIf)) {
      next();
      FunPtr c = parse_expr();
      eat(Tok::KwThen, "'then'");
      FunPtr t = parse_expr();
      eat(Tok::KwElse, "'else'");
      FunPtr e = parse_expr();
      return FunTerm::mk_if(c, t, e);
    }
    if (at(Tok::KwMatch)) return parse_match();
    if (at(Tok::LParen)) {
      next();
      if (at(Tok::RParen)) {
        next();
        return FunTerm::mk_unit();
      }
      FunPtr a = parse_expr();
      if (at(Tok::Comma)) {
        next();
        FunPtr b = parse_expr();
        eat(Tok::RParen, "')'");
        return FunTerm::mk_pair(a, b);
      }
      eat(Tok::RParen, "')'");
      return a;
    }
    fail(Errc::ParseError,
         std::string("expected an expression, found ") + tok_name(cur().kind),
         sp);
  }

  FunPtr parse_match() {
    eat(Tok::KwMatch, "'match'");
    FunPtr scrut = parse_expr();
    eat(Tok::LBrace, "'{'");
    if (at(Tok::LParen)) {
      next();
      Token x = eat(Tok::Ident, "a binder");
      eat(Tok::Comma, "','");
      Token y = eat(Tok::Ident, "a binder");
      eat(Tok::RParen, "')'");
      eat(Tok::FatArrow, "'=>'");
      FunPtr body = parse_expr();
      eat(Tok::RBrace, "'}'");
      return FunTerm::mk_match_pair(scrut, x.text, y.text, body);
    }
    eat(Tok::KwInl, "'inl' or a pair pattern");
    Token x = eat(Tok::Ident, "a binder");
    eat(Tok::FatArrow, "'=>'");
    FunPtr l = parse_expr();
    eat(Tok::Comma, "','");
    eat(Tok::KwInr, "'inr'");
    Token y = eat(Tok::Ident, "a binder");
    eat(Tok::FatArrow, "'=>'");
    FunPtr r = parse_expr();
    eat(Tok::RBrace, "'}'");
    return FunTerm::mk_match_sum(scrut, x.text, l, y.text, r);
  }

  // --- processes ------------------------------------------------------------------------

  ProcPtr parse_proc() {
    SourceSpan sp = cur().span;
    if (at(Tok::KwTick)) {
      next();
      Rat q = parse_rational(true);
      eat(Tok::Semi, "';'");
      return ProcTerm::mk_tick(q, parse_proc(), sp);
    }
    if (at(Tok::KwSend)) {
      next();
      Token c = eat(Tok::Ident, "a channel");
      FunPtr e = parse_expr();
      eat(Tok::Semi, "';'");
      return ProcTerm::mk_sendval(c.text, e, parse_proc(), sp);
    }
    if (at(Tok::KwCase)) {
      next();
      Token c = eat(Tok::Ident, "a channel");
      eat(Tok::LBrace, "'{'");
      std::map<std::string, ProcPtr> bs;
      while (true) {
        Token l = eat(Tok::Ident, "a branch label");
        eat(Tok::FatArrow, "'=>'");
        if (!bs.emplace(l.text, parse_proc()).second)
          fail(Errc::DuplicateLabel, "label '" + l.text + "' appears twice",
               l.span);
        if (at(Tok::Comma)) {
          next();
          continue;
        }
        break;
      }
      eat(Tok::RBrace, "'}'");
      return ProcTerm::mk_case(c.text, std::move(bs), sp);
    }
    if (at(Tok::KwClose)) {
      next();
      Token c = eat(Tok::Ident, "a channel");
      return ProcTerm::mk_close(c.text, sp);
    }
    if (at(Tok::KwWait)) {
      next();
      Token c = eat(Tok::Ident, "a channel");
      eat(Tok::Semi, "';'");
      return ProcTerm::mk_wait(c.text, parse_proc(), sp);
    }
    if (at(Tok::KwGet) || at(Tok::KwPay)) {
      bool is_get = at(Tok::KwGet);
      next();
      Token c = eat(Tok::Ident, "a channel");
      eat(Tok::LBrace, "'{'");
      Rat q;
      int site = parse_amount(q);
      eat(Tok::RBrace, "'}'");
      eat(Tok::Semi, "';'");
      ProcPtr k = parse_proc();
      return is_get ? ProcTerm::mk_get(c.text, q, k, site, sp)
                    : ProcTerm::mk_pay(c.text, q, k, site, sp);
    }
    if (at(Tok::Ident)) {
      Token c = next();
      if (at(Tok::Dot)) {
        next();
        Token l = eat(Tok::Ident, "a label");
        eat(Tok::Semi, "';'");
        return ProcTerm::mk_select(c.text, l.text, parse_proc(), sp);
      }
      eat(Tok::LArrow, "'<-'");
      if (at(Tok::KwRecv)) {
        next();
        Token src = eat(Tok::Ident, "a channel");
        eat(Tok::Semi, "';'");
        return ProcTerm::mk_recv(c.text, src.text, parse_proc(), sp);
      }
      FunPtr callee = parse_expr();
      std::vector<std::string> uses;
      bool bracketed = false;
      if (at(Tok::LBracket)) {
        bracketed = true;
        next();
        if (!at(Tok::RBracket)) {
          uses.push_back(eat(Tok::Ident, "a channel").text);
          while (at(Tok::Comma)) {
            next();
            uses.push_back(eat(Tok::Ident, "a channel").text);
          }
        }
        eat(Tok::RBracket, "']'");
      }
      if (bracketed || at(Tok::Semi)) {
        eat(Tok::Semi, "';'");
        return ProcTerm::mk_spawn(c.text, callee, std::move(uses), parse_proc(),
                                  sp);
      }
      if (callee->kind != FunTerm::Kind::Var)
        fail(Errc::ParseError,
             "forwarding expects a channel name after '<-' (spawns end with ';')",
             sp);
      return ProcTerm::mk_fwd(c.text, callee->name, sp);
    }
    fail(Errc::ParseError,
         std::string("expected a process, found ") + tok_name(cur().kind), sp);
  }

  // --- top-level definitions ---------------------------------------------------------------

  std::vector<std::pair<std::string, FunTypePtr>> parse_params() {
    std::vector<std::pair<std::string, FunTypePtr>> ps;
    if (!at(Tok::LParen)) return ps;
    next();
    if (!at(Tok::RParen)) {
      while (true) {
        Token x = eat(Tok::Ident, "a parameter name");
        eat(Tok::Colon, "':'");
        ps.emplace_back(x.text, parse_fun_type());
        if (at(Tok::Comma)) {
          next();
          continue;
        }
        break;
      }
    }
    eat(Tok::RParen, "')'");
    return ps;
  }

  void parse_def(Program& p) {
    SourceSpan sp = cur().span;
    eat(Tok::KwDef, "'def'");
    Token name = eat(Tok::Ident, "a definition name");
    FunDef d;
    d.name = name.text;
    d.span = sp;
    d.params = parse_params();
    eat(Tok::Colon, "':'");
    FunTypePtr ret = parse_fun_type();
    eat(Tok::Assign, "'='");
    d.value = parse_expr();
    d.ret = ret;
    define(p.sig.fun_defs, name.text, std::move(d), "definition", name.span);
  }

  void parse_proc_def(Program& p) {
    SourceSpan sp = cur().span;
    eat(Tok::KwProc, "'proc'");
    Token name = eat(Tok::Ident, "a process name");
    FunDef d;
    d.name = name.text;
    d.span = sp;
    d.params = parse_params();
    eat(Tok::Turnstile, "'|-'");
    ProcInterface iface;
    iface.init_potential = 0;
    if (at(Tok::LBrace)) {
      next();
      iface.init_site = parse_amount(iface.init_potential);
      eat(Tok::RBrace, "'}'");
    }
    eat(Tok::LParen, "'('");
    Token prov = eat(Tok::Ident, "the provided channel");
    eat(Tok::Colon, "':'");
    iface.provides = parse_type();
    eat(Tok::RParen, "')'");
    std::vector<std::string> use_names;
    if (at(Tok::LBracket)) {
      next();
      if (!at(Tok::RBracket)) {
        while (true) {
          Token u = eat(Tok::Ident, "a channel");
          eat(Tok::Colon, "':'");
          iface.uses.push_back(parse_type());
          use_names.push_back(u.text);
          if (at(Tok::Comma)) {
            next();
            continue;
          }
          break;
        }
      }
      eat(Tok::RBracket, "']'");
    }
    eat(Tok::Assign, "'='");
    ProcPtr body = parse_proc();
    d.value = FunTerm::mk_procval(prov.text, std::move(use_names),
                                  std::make_shared<ProcInterface>(std::move(iface)),
                                  std::move(body));
    d.ret = nullptr;
    define(p.sig.fun_defs, name.text, std::move(d), "process", name.span);
  }

  void parse_config(Program& p) {
    eat(Tok::KwConfig, "'config'");
    eat(Tok::LBrace, "'{'");
    while (!at(Tok::RBrace)) {
      ConfigEntry e;
      Token c = eat(Tok::Ident, "a channel");
      e.chan = c.text;
      e.span = c.span;
      eat(Tok::LArrow, "'<-'");
      e.callee = parse_expr();
      if (at(Tok::LBracket)) {
        next();
        if (!at(Tok::RBracket)) {
          e.uses.push_back(eat(Tok::Ident, "a channel").text);
          while (at(Tok::Comma)) {
            next();
            e.uses.push_back(eat(Tok::Ident, "a channel").text);
          }
        }
        eat(Tok::RBracket, "']'");
      }
      p.config.push_back(std::move(e));
      if (at(Tok::Semi)) {
        next();
        continue;
      }
      break;
    }
    eat(Tok::RBrace, "'}'");
  }
};

} // namespace

Program parse_program(const std::string& src, const std::string& filename) {
  Parser ps(src, filename);
  Program p = ps.program();
  p.source_name = filename;
  return p;
}

SkelFile parse_skel_file(const std::string& src, const std::string& filename) {
  Parser ps(src, filename);
  SkelFile f = ps.skel_file();
  f.source_name = filename;
  return f;
}

TypePtr parse_type_string(const std::string& src, int* num_sites) {
  Parser ps(src, "<type>");
  if (num_sites) ps.set_sites(num_sites);
  return ps.type_only();
}

SkelPtr parse_skel_string(const std::string& src) {
  Parser ps(src, "<skeleton>");
  return ps.skel_only();
}

FunPtr parse_expr_string(const std::string& src) {
  Parser ps(src, "<expr>");
  return ps.expr_only();
}

} // namespace sill
