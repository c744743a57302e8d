#include "sill/skeleton.hpp"

#include "sill/parser.hpp"
#include "sill/printer.hpp"
#include "sill/typecheck.hpp"

#include <set>
#include <utility>

namespace sill {

namespace {

const char* side_name(Side s) {
  return s == Side::ProcProvides ? "program-provided" : "world-provided";
}

// Who supplies the value at a ValIn/ValOut node, and who picks the label at
// an Ext/Int node, depends on which side of the channel the program is on.
// The provider receives at ValIn/Ext and sends at ValOut/Int; the program is
// the provider exactly on ProcProvides.
bool world_supplies_value(SessionType::Kind k, Side side) {
  bool provider_receives = k == SessionType::Kind::ValIn;
  bool program_is_provider = side == Side::ProcProvides;
  return provider_receives == program_is_provider;
}

bool world_picks_label(SessionType::Kind k, Side side) {
  bool provider_receives = k == SessionType::Kind::Ext;
  bool program_is_provider = side == Side::ProcProvides;
  return provider_receives == program_is_provider;
}

// ---------------------------------------------------------------------------
// check_compat

struct CompatChecker {
  const Signature& sig;
  SkelCheckResult& out;
  std::set<std::string> used_names;
  std::set<std::string> skel_defs_on_path;
  int next_sel = 0;

  void register_name(const std::string& name, SourceSpan sp) {
    if (!used_names.insert(name).second)
      fail(Errc::DuplicateSkeletonVariable,
           "skeleton variable '" + name + "' is used more than once", sp);
  }

  void check_h(const HPtr& h, const FunTypePtr& ty, SourceSpan sp) {
    if (ty->kind == FunType::Kind::Proc)
      fail(Errc::CompatError,
           "the world cannot supply process values, so no skeleton shape "
           "fits this position",
           sp);
    switch (h->kind) {
    case HValue::Kind::Var:
      if (ty->kind != FunType::Kind::Base)
        fail(Errc::CompatError,
             "skeleton variable '" + h->var +
                 "' must stand for a base-sort value, but the type here is " +
                 print_fun_type(ty),
             sp);
      register_name(h->var, sp);
      out.value_vars.emplace(h->var, ty->base);
      return;
    case HValue::Kind::Unit:
      if (ty->kind == FunType::Kind::Base && ty->base == BaseType::Unit)
        return;
      break;
    case HValue::Kind::Bool:
      if (ty->kind == FunType::Kind::Base && ty->base == BaseType::Bool)
        return;
      break;
    case HValue::Kind::Int:
      if (ty->kind == FunType::Kind::Base && ty->base == BaseType::Int)
        return;
      break;
    case HValue::Kind::Pair:
      if (ty->kind == FunType::Kind::Prod) {
        check_h(h->left, ty->left, sp);
        check_h(h->right, ty->right, sp);
        return;
      }
      break;
    case HValue::Kind::Inl:
      if (ty->kind == FunType::Kind::Sum) {
        check_h(h->left, ty->left, sp);
        return;
      }
      break;
    case HValue::Kind::Inr:
      if (ty->kind == FunType::Kind::Sum) {
        check_h(h->left, ty->right, sp);
        return;
      }
      break;
    }
    fail(Errc::CompatError,
         "value shape " + print_hvalue(h) + " does not fit type " +
             print_fun_type(ty),
         sp);
  }

  [[noreturn]] void mismatch(const SkelPtr& k, const TypePtr& t, Side side) {
    fail(Errc::CompatError,
         "skeleton " + print_skel(k) + " does not match the " +
             side_name(side) + " protocol " + print_type(t),
         k->span.valid() ? k->span : t->span);
  }

  SkelPtr go(SkelPtr k, TypePtr t, Side side) {
    // Skeleton definitions must expand to a finite tree; a definition that
    // reappears on its own expansion path never does.
    std::vector<std::string> opened;
    while (k->kind == Skeleton::Kind::Var) {
      if (skel_defs_on_path.count(k->var))
        fail(Errc::FiniteInputViolation,
             "skeleton '" + k->var +
                 "' refers back to itself; skeletons must describe a finite "
                 "interaction",
             k->span);
      skel_defs_on_path.insert(k->var);
      opened.push_back(k->var);
      k = sig.lookup_skeleton(k->var, k->span);
    }
    while (t->kind == SessionType::Kind::Var)
      t = unfold(sig, t);

    SkelPtr result = match(k, t, side);
    for (const auto& name : opened)
      skel_defs_on_path.erase(name);
    return result;
  }

  SkelPtr match(const SkelPtr& k, const TypePtr& t, Side side) {
    switch (t->kind) {
    case SessionType::Kind::One:
      if (k->kind != Skeleton::Kind::One)
        mismatch(k, t, side);
      return Skeleton::mk_one();

    case SessionType::Kind::ValIn:
    case SessionType::Kind::ValOut: {
      bool in = t->kind == SessionType::Kind::ValIn;
      if (world_supplies_value(t->kind, side)) {
        Skeleton::Kind want =
            in ? Skeleton::Kind::ValInWorld : Skeleton::Kind::ValOutWorld;
        if (k->kind != want) {
          if (k->kind == Skeleton::Kind::ValInProc ||
              k->kind == Skeleton::Kind::ValOutProc)
            fail(Errc::CompatError,
                 "this value is supplied by the world; describe its shape "
                 "with a value term instead of the bare type " +
                     print_fun_type(k->value),
                 k->span);
          mismatch(k, t, side);
        }
        check_h(k->hval, t->value, k->span.valid() ? k->span : t->span);
        SkelPtr cont = go(k->cont, t->cont, side);
        return in ? Skeleton::mk_valin_world(k->hval, cont)
                  : Skeleton::mk_valout_world(k->hval, cont);
      }
      Skeleton::Kind want =
          in ? Skeleton::Kind::ValInProc : Skeleton::Kind::ValOutProc;
      if (k->kind != want) {
        if (k->kind == Skeleton::Kind::ValInWorld ||
            k->kind == Skeleton::Kind::ValOutWorld)
          fail(Errc::CompatError,
               "this value is computed by the program, not the world; the "
               "skeleton must carry the value type " +
                   print_fun_type(t->value) + ", not a value shape",
               k->span);
        mismatch(k, t, side);
      }
      if (!fun_type_equal(k->value, t->value))
        fail(Errc::CompatError,
             "program-sent value type " + print_fun_type(k->value) +
                 " does not match the protocol's " + print_fun_type(t->value),
             k->span);
      SkelPtr cont = go(k->cont, t->cont, side);
      return in ? Skeleton::mk_valin_proc(t->value, cont)
                : Skeleton::mk_valout_proc(t->value, cont);
    }

    case SessionType::Kind::ChanIn:
    case SessionType::Kind::ChanOut: {
      bool in = t->kind == SessionType::Kind::ChanIn;
      Skeleton::Kind want = in ? Skeleton::Kind::ChanIn : Skeleton::Kind::ChanOut;
      if (k->kind != want)
        mismatch(k, t, side);
      // A channel the provider receives travels against the channel's own
      // direction, so it is checked on the flipped side; one the provider
      // sends keeps the side.
      Side arg_side = in ? flip(side) : side;
      SkelPtr arg = go(k->arg, t->arg, arg_side);
      SkelPtr cont = go(k->cont, t->cont, side);
      return in ? Skeleton::mk_chanin(arg, cont)
                : Skeleton::mk_chanout(arg, cont);
    }

    case SessionType::Kind::Ext:
    case SessionType::Kind::Int: {
      bool ext = t->kind == SessionType::Kind::Ext;
      bool world = world_picks_label(t->kind, side);
      bool plain = k->kind == (ext ? Skeleton::Kind::Ext : Skeleton::Kind::Int);
      bool subscripted =
          k->kind == (ext ? Skeleton::Kind::ExtWorld : Skeleton::Kind::IntWorld);
      if (!plain && !subscripted)
        mismatch(k, t, side);
      if (!world && subscripted)
        fail(Errc::CompatError,
             "this label is chosen by the program; a choice variable cannot "
             "record it",
             k->span);

      if (world) {
        // The world decides here, so the skeleton may keep any nonempty
        // subset of the offered labels.
        if (k->branches.empty())
          fail(Errc::CompatError, "a choice point needs at least one label",
               k->span);
        std::map<std::string, SkelPtr> bs;
        for (const auto& [l, bk] : k->branches) {
          auto it = t->branches.find(l);
          if (it == t->branches.end())
            fail(Errc::CompatError,
                 "label '" + l + "' is not offered by the protocol " +
                     print_type(t),
                 bk->span.valid() ? bk->span : k->span);
          bs.emplace(l, go(bk, it->second, side));
        }
        std::string var;
        if (bs.size() > 1) {
          // A singleton choice is forced, so only real choices get (or keep)
          // a variable the solver can set.
          var = k->choice_var;
          if (var.empty())
            var = "sel#" + std::to_string(next_sel++);
          register_name(var, k->span);
          std::vector<std::string> labels;
          for (const auto& [l, _] : bs)
            labels.push_back(l);
          out.choice_vars.emplace(var, std::move(labels));
        }
        return ext ? Skeleton::mk_ext_world(var, std::move(bs))
                   : Skeleton::mk_int_world(var, std::move(bs));
      }

      // The program decides here; the skeleton must be ready for every label.
      for (const auto& [l, _] : t->branches)
        if (!k->branches.count(l))
          fail(Errc::CompatError,
               "the program may choose label '" + l +
                   "', but the skeleton does not cover it",
               k->span);
      std::map<std::string, SkelPtr> bs;
      for (const auto& [l, bk] : k->branches) {
        auto it = t->branches.find(l);
        if (it == t->branches.end())
          fail(Errc::CompatError,
               "label '" + l + "' is not offered by the protocol " +
                   print_type(t),
               bk->span.valid() ? bk->span : k->span);
        bs.emplace(l, go(bk, it->second, side));
      }
      return ext ? Skeleton::mk_ext(std::move(bs))
                 : Skeleton::mk_int(std::move(bs));
    }

    case SessionType::Kind::Get:
    case SessionType::Kind::Pay: {
      bool get = t->kind == SessionType::Kind::Get;
      if (t->ann_unknown())
        fail(Errc::UnknownAnnotation,
             "the protocol still has a '?' potential annotation here; run "
             "annotation inference first",
             t->span);
      if (k->kind != (get ? Skeleton::Kind::Get : Skeleton::Kind::Pay))
        mismatch(k, t, side);
      if (k->q != t->q)
        fail(Errc::CompatError,
             "potential amount " + rat_to_string(k->q) +
                 " does not match the protocol's " + rat_to_string(t->q),
             k->span);
      SkelPtr cont = go(k->cont, t->cont, side);
      return get ? Skeleton::mk_get(t->q, cont) : Skeleton::mk_pay(t->q, cont);
    }

    case SessionType::Kind::Var:
      break; // unfolded by go()
    }
    fail(Errc::Internal, "unhandled type constructor in skeleton matching",
         t->span);
  }
};

// ---------------------------------------------------------------------------
// count_actions

using PathKey = std::pair<std::string, Side>;

std::optional<unsigned long long> count_go(const Signature& sig,
                                           const TypePtr& t, Side side,
                                           std::set<PathKey>& on_path) {
  using K = SessionType::Kind;
  switch (t->kind) {
  case K::Var: {
    // Meeting the same definition on the same side again means the path
    // loops; a finite interaction gains nothing from repeating it, and a
    // program-forced repeat never ends, so the revisit counts as infinite.
    PathKey key{t->var, side};
    if (!on_path.insert(key).second)
      return std::nullopt;
    auto r = count_go(sig, unfold(sig, t), side, on_path);
    on_path.erase(key);
    return r;
  }
  case K::One:
    return 0;
  case K::ValIn:
  case K::ValOut:
  case K::Get:
  case K::Pay: {
    auto c = count_go(sig, t->cont, side, on_path);
    if (!c)
      return std::nullopt;
    return 1 + *c;
  }
  case K::ChanIn:
  case K::ChanOut: {
    Side arg_side = t->kind == K::ChanIn ? flip(side) : side;
    auto a = count_go(sig, t->arg, arg_side, on_path);
    if (!a)
      return std::nullopt;
    auto c = count_go(sig, t->cont, side, on_path);
    if (!c)
      return std::nullopt;
    return 1 + *a + *c;
  }
  case K::Ext:
  case K::Int: {
    if (world_picks_label(t->kind, side)) {
      // The world may steer into the cheapest branch (the skeleton can drop
      // the others), so an infinite branch only matters if all are.
      std::optional<unsigned long long> best;
      for (const auto& [_, bt] : t->branches) {
        auto b = count_go(sig, bt, side, on_path);
        if (b && (!best || *b < *best))
          best = b;
      }
      if (!best)
        return std::nullopt;
      return 1 + *best;
    }
    // The program picks, so the skeleton must survive the longest branch.
    unsigned long long worst = 0;
    for (const auto& [_, bt] : t->branches) {
      auto b = count_go(sig, bt, side, on_path);
      if (!b)
        return std::nullopt;
      if (*b > worst)
        worst = *b;
    }
    return 1 + worst;
  }
  }
  fail(Errc::Internal, "unhandled type constructor in action counting",
       t->span);
}

// ---------------------------------------------------------------------------
// skeletonize

struct SkelGen {
  const Signature& sig;
  int next_val = 0;

  HPtr mint_value(const FunTypePtr& ty, SourceSpan sp) {
    switch (ty->kind) {
    case FunType::Kind::Base:
      // A unit value carries no information, so it stays literal; bool and
      // int leaves become variables for the solver to fill in.
      if (ty->base == BaseType::Unit)
        return HValue::mk_unit();
      return HValue::mk_var("val#" + std::to_string(next_val++));
    case FunType::Kind::Prod: {
      HPtr l = mint_value(ty->left, sp);
      HPtr r = mint_value(ty->right, sp);
      return HValue::mk_pair(l, r);
    }
    case FunType::Kind::Sum:
      fail(Errc::UsageError,
           "skeleton generation cannot choose between the constructors of " +
               print_fun_type(ty) +
               " for a world-sent value; write the skeleton by hand",
           sp);
    case FunType::Kind::Proc:
      fail(Errc::CompatError,
           "the world cannot supply process values, so no skeleton exists "
           "for this type",
           sp);
    }
    fail(Errc::Internal, "unhandled value type in skeleton generation", sp);
  }

  SkelPtr go(const TypePtr& t, Side side, int budget) {
    using K = SessionType::Kind;
    switch (t->kind) {
    case K::Var:
      if (budget <= 0)
        fail(Errc::BudgetRequired,
             "generating a skeleton for this type needs more unfolds of '" +
                 t->var + "' than the unroll budget allows",
             t->span);
      return go(unfold(sig, t), side, budget - 1);
    case K::One:
      return Skeleton::mk_one();
    case K::ValIn:
    case K::ValOut: {
      bool in = t->kind == K::ValIn;
      if (world_supplies_value(t->kind, side)) {
        HPtr h = mint_value(t->value, t->span);
        SkelPtr cont = go(t->cont, side, budget);
        return in ? Skeleton::mk_valin_world(h, cont)
                  : Skeleton::mk_valout_world(h, cont);
      }
      SkelPtr cont = go(t->cont, side, budget);
      return in ? Skeleton::mk_valin_proc(t->value, cont)
                : Skeleton::mk_valout_proc(t->value, cont);
    }
    case K::ChanIn:
    case K::ChanOut: {
      bool in = t->kind == K::ChanIn;
      SkelPtr arg = go(t->arg, in ? flip(side) : side, budget);
      SkelPtr cont = go(t->cont, side, budget);
      return in ? Skeleton::mk_chanin(arg, cont)
                : Skeleton::mk_chanout(arg, cont);
    }
    case K::Ext:
    case K::Int: {
      bool ext = t->kind == K::Ext;
      if (world_picks_label(t->kind, side)) {
        // Keep the branches that stay finite and fit the budget; the world
        // is free to never pick the rest.
        std::map<std::string, SkelPtr> bs;
        bool budget_hit = false;
        for (const auto& [l, bt] : t->branches) {
          if (!count_actions(sig, bt, side))
            continue;
          try {
            bs.emplace(l, go(bt, side, budget));
          } catch (const SillError& e) {
            if (e.code() != Errc::BudgetRequired)
              throw;
            budget_hit = true;
          }
        }
        if (bs.empty()) {
          if (budget_hit)
            fail(Errc::BudgetRequired,
                 "every finite branch of this choice needs more type "
                 "unfolds than the unroll budget allows",
                 t->span);
          fail(Errc::FiniteInputViolation,
               "no branch of this world-chosen point leads to a finite "
               "interaction",
               t->span);
        }
        return ext ? Skeleton::mk_ext_world("", std::move(bs))
                   : Skeleton::mk_int_world("", std::move(bs));
      }
      std::map<std::string, SkelPtr> bs;
      for (const auto& [l, bt] : t->branches)
        bs.emplace(l, go(bt, side, budget));
      return ext ? Skeleton::mk_ext(std::move(bs))
                 : Skeleton::mk_int(std::move(bs));
    }
    case K::Get:
    case K::Pay: {
      if (t->ann_unknown())
        fail(Errc::UnknownAnnotation,
             "the protocol still has a '?' potential annotation here; run "
             "annotation inference first",
             t->span);
      SkelPtr cont = go(t->cont, side, budget);
      return t->kind == K::Get ? Skeleton::mk_get(t->q, cont)
                               : Skeleton::mk_pay(t->q, cont);
    }
    }
    fail(Errc::Internal, "unhandled type constructor in skeleton generation",
         t->span);
  }
};

} // namespace

// ---------------------------------------------------------------------------
// public interface

SkelCheckResult check_compat(const Signature& sig, const SkelPtr& skel,
                             const TypePtr& type, Side side) {
  SkelCheckResult result;
  CompatChecker ck{sig, result};
  result.skeleton = ck.go(skel, type, side);
  return result;
}

std::optional<unsigned long long> count_actions(const Signature& sig,
                                                const TypePtr& t, Side side) {
  std::set<PathKey> on_path;
  return count_go(sig, t, side, on_path);
}

void require_finite_input(const Signature& sig, const TypePtr& t, Side side,
                          const std::string& chan) {
  if (!count_actions(sig, t, side))
    fail(Errc::FiniteInputViolation,
         "external channel '" + chan +
             "' admits no finite interaction with the world, so no input "
             "skeleton exists for it",
         t->span);
}

SkelPtr skeletonize(const Signature& sig, const TypePtr& t, int unfold_budget,
                    Side side) {
  if (!count_actions(sig, t, side))
    fail(Errc::FiniteInputViolation,
         "this type admits no finite interaction with the world, so no "
         "input skeleton exists",
         t->span);
  SkelGen gen{sig};
  return gen.go(t, side, unfold_budget);
}

Rat world_potential_bound(const SkelPtr& k, Side side) {
  using K = Skeleton::Kind;
  switch (k->kind) {
  case K::Var:
    fail(Errc::Internal,
         "world_potential_bound expects an expanded skeleton", k->span);
  case K::One:
    return 0;
  case K::ValInWorld:
  case K::ValInProc:
  case K::ValOutProc:
  case K::ValOutWorld:
    return world_potential_bound(k->cont, side);
  case K::ChanIn:
    return world_potential_bound(k->arg, flip(side)) +
           world_potential_bound(k->cont, side);
  case K::ChanOut:
    return world_potential_bound(k->arg, side) +
           world_potential_bound(k->cont, side);
  case K::Ext:
  case K::ExtWorld:
  case K::Int:
  case K::IntWorld: {
    Rat best = 0;
    for (const auto& [_, bk] : k->branches) {
      Rat b = world_potential_bound(bk, side);
      if (b > best)
        best = b;
    }
    return best;
  }
  case K::Get:
    // The provider receives q: that is potential flowing into the program
    // exactly when the program provides.
    return (side == Side::ProcProvides ? k->q : Rat(0)) +
           world_potential_bound(k->cont, side);
  case K::Pay:
    // The provider pays q: inflow exactly when the world provides.
    return (side == Side::WorldProvides ? k->q : Rat(0)) +
           world_potential_bound(k->cont, side);
  }
  fail(Errc::Internal, "unhandled skeleton constructor in potential bound",
       k->span);
}

Rat config_cost_bound(const Program& p,
                      const std::map<std::string, SkelPtr>& skels) {
  ExternalInterface ext = external_interface(p);
  for (const auto& [name, _] : skels)
    if (!ext.provided.count(name) && !ext.used.count(name))
      fail(Errc::UsageError,
           "skeleton bound to '" + name +
               "', which is not an external channel of the configuration");

  Rat total = 0;
  for (const auto& e : p.config) {
    auto iface = config_callee_interface(p, e);
    if (iface->init_unknown())
      fail(Errc::UnknownAnnotation,
           "the initial potential of the process providing '" + e.chan +
               "' is still a '?'; run annotation inference first",
           e.span);
    total += iface->init_potential;
  }

  auto add_side = [&](const std::map<std::string, TypePtr>& chans, Side side) {
    for (const auto& [name, ty] : chans) {
      auto it = skels.find(name);
      if (it == skels.end())
        fail(Errc::UsageError,
             "no skeleton bound for external channel '" + name + "'");
      SkelCheckResult res = check_compat(p.sig, it->second, ty, side);
      total += world_potential_bound(res.skeleton, side);
    }
  };
  add_side(ext.provided, Side::ProcProvides);
  add_side(ext.used, Side::WorldProvides);
  return total;
}

std::map<std::string, SkelPtr> load_skel_file(Signature& sig,
                                              const SkelFile& f) {
  for (const auto& [name, k] : f.defs)
    if (!sig.skeleton_defs.emplace(name, k).second)
      fail(Errc::DuplicateDefinition,
           "skeleton '" + name + "' is already defined", k->span);
  std::map<std::string, SkelPtr> targets;
  for (const auto& [chan, k] : f.targets)
    if (!targets.emplace(chan, k).second)
      fail(Errc::DuplicateDefinition,
           "channel '" + chan + "' is bound to two skeletons", k->span);
  return targets;
}

} // namespace sill
