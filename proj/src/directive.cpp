//===- directive.cpp - pragma directives and transformation plans -*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "loopforge/directive.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <set>

namespace loopforge {

const char *dirKindName(DirKind k) {
  switch (k) {
  case DirKind::Id: return "id";
  case DirKind::Reverse: return "reverse";
  case DirKind::Interchange: return "interchange";
  case DirKind::Tile: return "tile";
  case DirKind::StripMine: return "stripmine";
  case DirKind::Unroll: return "unroll";
  case DirKind::UnrollAndJam: return "unroll_and_jam";
  case DirKind::Distribute: return "distribute";
  case DirKind::Fuse: return "fuse";
  case DirKind::Pack: return "pack";
  }
  return "?";
}

namespace {

std::string joinNames(const std::vector<std::string> &v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i)
      s += ",";
    s += v[i];
  }
  return s;
}

std::string joinInts(const std::vector<int64_t> &v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i)
      s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

/// Token stream over one pragma line.
class LineLexer {
public:
  LineLexer(const std::string &line, SourceLoc loc) : line_(line), loc_(loc) {}

  std::optional<std::string> peekWord() {
    skipSpace();
    size_t p = pos_;
    std::string w;
    while (p < line_.size() &&
           (std::isalnum(static_cast<unsigned char>(line_[p])) ||
            line_[p] == '_'))
      w += line_[p++];
    if (w.empty())
      return std::nullopt;
    return w;
  }

  std::string takeWord() {
    auto w = peekWord();
    if (!w)
      fail("expected a word");
    pos_ += w->size();
    return *w;
  }

  bool tryPunct(char c) {
    skipSpace();
    if (pos_ < line_.size() && line_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool atPunct(char c) {
    skipSpace();
    return pos_ < line_.size() && line_[pos_] == c;
  }

  bool atEnd() {
    skipSpace();
    return pos_ >= line_.size();
  }

  [[noreturn]] void fail(const std::string &msg, ErrCode code = ErrCode::UnknownClause) {
    throw Diag(code, msg + " in '" + line_ + "'", loc_);
  }

  std::vector<std::string> parenNameList(const std::string &what) {
    if (!tryPunct('('))
      fail("expected '(' after " + what, ErrCode::ClauseArityError);
    std::vector<std::string> names;
    while (true) {
      names.push_back(takeWord());
      if (tryPunct(','))
        continue;
      break;
    }
    if (!tryPunct(')'))
      fail("expected ')' after " + what, ErrCode::ClauseArityError);
    return names;
  }

  std::vector<int64_t> parenIntList(const std::string &what) {
    auto names = parenNameList(what);
    std::vector<int64_t> vals;
    for (const auto &n : names) {
      for (char c : n)
        if (!std::isdigit(static_cast<unsigned char>(c)))
          fail(what + " expects integer arguments", ErrCode::ClauseArityError);
      vals.push_back(std::stoll(n));
    }
    return vals;
  }

private:
  void skipSpace() {
    while (pos_ < line_.size() &&
           std::isspace(static_cast<unsigned char>(line_[pos_])))
      ++pos_;
  }

  const std::string &line_;
  SourceLoc loc_;
  size_t pos_ = 0;
};

std::optional<DirKind> kindFromWord(const std::string &w) {
  if (w == "id") return DirKind::Id;
  if (w == "reverse") return DirKind::Reverse;
  if (w == "interchange") return DirKind::Interchange;
  if (w == "tile") return DirKind::Tile;
  if (w == "stripmine") return DirKind::StripMine;
  if (w == "unroll") return DirKind::Unroll;
  if (w == "unroll_and_jam") return DirKind::UnrollAndJam;
  if (w == "distribute") return DirKind::Distribute;
  if (w == "fuse") return DirKind::Fuse;
  if (w == "pack") return DirKind::Pack;
  return std::nullopt;
}

} // namespace

bool isLoopPragma(const std::string &line) {
  LineLexer lex(line, {});
  if (!lex.tryPunct('#'))
    return false;
  auto w = lex.peekWord();
  if (!w || *w != "pragma")
    return false;
  lex.takeWord();
  w = lex.peekWord();
  if (w && *w == "clang") {
    lex.takeWord();
    w = lex.peekWord();
  }
  return w && *w == "loop";
}

Directive parse_directive(const std::string &line, SourceLoc loc) {
  LineLexer lex(line, loc);
  if (!lex.tryPunct('#') || lex.takeWord() != "pragma")
    lex.fail("not a pragma line", ErrCode::UnknownTransformation);
  std::string w = lex.takeWord();
  if (w == "clang")
    w = lex.takeWord();
  if (w != "loop")
    lex.fail("not a loop pragma", ErrCode::UnknownTransformation);

  Directive d;
  d.loc = loc;
  if (lex.atPunct('('))
    d.targets = lex.parenNameList("loop target list");

  std::string kindWord = lex.takeWord();
  auto kind = kindFromWord(kindWord);
  if (!kind)
    throw Diag(ErrCode::UnknownTransformation,
               "unknown transformation '" + kindWord + "' in '" + line + "'",
               loc);
  d.kind = *kind;

  if (d.kind == DirKind::Id) {
    auto names = lex.parenNameList("id");
    if (names.size() != 1)
      lex.fail("id takes exactly one identifier", ErrCode::ClauseArityError);
    d.idName = names[0];
  } else if (lex.atPunct('(')) {
    // Old-style `transformation(option)` syntax is deliberately rejected.
    lex.fail("old pragma syntax 'transformation(option)' is not supported; "
             "use 'transformation clause(args)'",
             ErrCode::UnknownClause);
  }

  std::set<std::string> seenClauses;
  auto once = [&](const std::string &name) {
    if (!seenClauses.insert(name).second)
      throw Diag(ErrCode::DuplicateClause,
                 "duplicate clause '" + name + "' in '" + line + "'", loc);
  };

  while (!lex.atEnd()) {
    std::string clause = lex.takeWord();
    bool known = false;
    auto accept = [&](const std::string &name, DirKind onKind) {
      if (clause == name && d.kind == onKind) {
        once(name);
        known = true;
        return true;
      }
      return false;
    };
    // Common clauses first.
    if (clause == "hint") {
      once("hint");
      d.forced = false;
      continue;
    }
    if (clause == "unsafe") {
      once("unsafe");
      d.unsafe = true;
      continue;
    }
    if (accept("permutation", DirKind::Interchange)) {
      d.permutation = lex.parenNameList("permutation");
    } else if (accept("sizes", DirKind::Tile)) {
      d.sizes = lex.parenIntList("sizes");
    } else if (accept("pit_ids", DirKind::Tile)) {
      d.pitIds = lex.parenNameList("pit_ids");
    } else if (accept("tile_ids", DirKind::Tile)) {
      d.tileIds = lex.parenNameList("tile_ids");
    } else if (accept("size", DirKind::StripMine)) {
      auto v = lex.parenIntList("size");
      if (v.size() != 1)
        lex.fail("size takes one integer", ErrCode::ClauseArityError);
      d.size = v[0];
    } else if (accept("pit_id", DirKind::StripMine)) {
      auto v = lex.parenNameList("pit_id");
      if (v.size() != 1)
        lex.fail("pit_id takes one identifier", ErrCode::ClauseArityError);
      d.pitId = v[0];
    } else if (accept("strip_id", DirKind::StripMine)) {
      auto v = lex.parenNameList("strip_id");
      if (v.size() != 1)
        lex.fail("strip_id takes one identifier", ErrCode::ClauseArityError);
      d.stripId = v[0];
    } else if ((clause == "factor" && (d.kind == DirKind::Unroll ||
                                       d.kind == DirKind::UnrollAndJam))) {
      once("factor");
      known = true;
      auto v = lex.parenIntList("factor");
      if (v.size() != 1)
        lex.fail("factor takes one integer", ErrCode::ClauseArityError);
      if (v[0] < 2)
        lex.fail("factor must be at least 2", ErrCode::ClauseArityError);
      d.factor = v[0];
    } else if (clause == "full" && d.kind == DirKind::Unroll) {
      once("full");
      known = true;
      d.full = true;
    } else if (accept("ids", DirKind::Distribute)) {
      d.distIds = lex.parenNameList("ids");
    } else if (accept("array", DirKind::Pack)) {
      auto v = lex.parenNameList("array");
      if (v.size() != 1)
        lex.fail("array takes one identifier", ErrCode::ClauseArityError);
      d.array = v[0];
    } else if (accept("allocate", DirKind::Pack)) {
      auto v = lex.parenNameList("allocate");
      if (v.size() != 1 || v[0] != "malloc")
        lex.fail("allocate supports only allocate(malloc)",
                 ErrCode::ClauseArityError);
      d.heapAlloc = true;
    } else if (accept("layout", DirKind::Pack)) {
      d.layout = lex.parenIntList("layout");
    }
    if (!known)
      throw Diag(ErrCode::UnknownClause,
                 "unknown clause '" + clause + "' for transformation '" +
                     std::string(dirKindName(d.kind)) + "' in '" + line + "'",
                 loc);
  }

  // Mandatory clauses and arity against an explicit target list.
  switch (d.kind) {
  case DirKind::Interchange:
    if (d.permutation.empty())
      throw Diag(ErrCode::ClauseArityError,
                 "interchange requires permutation(...)", loc);
    if (!d.targets.empty() && d.permutation.size() != d.targets.size())
      throw Diag(ErrCode::ClauseArityError,
                 "permutation length must equal the number of target loops",
                 loc);
    break;
  case DirKind::Tile:
    if (d.sizes.empty())
      throw Diag(ErrCode::ClauseArityError, "tile requires sizes(...)", loc);
    if (!d.targets.empty() && d.sizes.size() != d.targets.size())
      throw Diag(ErrCode::ClauseArityError,
                 "sizes length must equal the number of target loops", loc);
    if (!d.pitIds.empty() && d.pitIds.size() != d.sizes.size())
      throw Diag(ErrCode::ClauseArityError,
                 "pit_ids length must equal sizes length", loc);
    if (!d.tileIds.empty() && d.tileIds.size() != d.sizes.size())
      throw Diag(ErrCode::ClauseArityError,
                 "tile_ids length must equal sizes length", loc);
    break;
  case DirKind::StripMine:
    if (d.size == 0)
      throw Diag(ErrCode::ClauseArityError, "stripmine requires size(n)", loc);
    break;
  case DirKind::Unroll:
    if (d.factor == 0 && !d.full)
      throw Diag(ErrCode::ClauseArityError,
                 "unroll requires factor(n) or full", loc);
    if (d.factor != 0 && d.full)
      throw Diag(ErrCode::ClauseArityError,
                 "unroll cannot combine factor(n) with full", loc);
    break;
  case DirKind::UnrollAndJam:
    if (d.factor == 0)
      throw Diag(ErrCode::ClauseArityError, "unroll_and_jam requires factor(n)",
                 loc);
    if (d.targets.size() > 2)
      throw Diag(ErrCode::ClauseArityError,
                 "unroll_and_jam takes at most two target loops", loc);
    break;
  case DirKind::Pack:
    if (d.array.empty())
      throw Diag(ErrCode::ClauseArityError, "pack requires array(A)", loc);
    if (d.targets.size() > 1)
      throw Diag(ErrCode::ClauseArityError,
                 "pack takes at most one placement loop", loc);
    break;
  default:
    break;
  }
  return d;
}

std::string Directive::str() const {
  std::string s = dirKindName(kind);
  if (!targets.empty())
    s += "(" + joinNames(targets) + ")";
  switch (kind) {
  case DirKind::Id:
    s += " " + idName;
    break;
  case DirKind::Interchange:
    s += " permutation(" + joinNames(permutation) + ")";
    break;
  case DirKind::Tile:
    s += " sizes(" + joinInts(sizes) + ")";
    if (!pitIds.empty())
      s += " pit_ids(" + joinNames(pitIds) + ")";
    if (!tileIds.empty())
      s += " tile_ids(" + joinNames(tileIds) + ")";
    break;
  case DirKind::StripMine:
    s += " size(" + std::to_string(size) + ")";
    if (!pitId.empty())
      s += " pit_id(" + pitId + ")";
    if (!stripId.empty())
      s += " strip_id(" + stripId + ")";
    break;
  case DirKind::Unroll:
    s += full ? " full" : " factor(" + std::to_string(factor) + ")";
    break;
  case DirKind::UnrollAndJam:
    s += " factor(" + std::to_string(factor) + ")";
    break;
  case DirKind::Distribute:
    if (!distIds.empty())
      s += " ids(" + joinNames(distIds) + ")";
    break;
  case DirKind::Pack:
    s += " array(" + array + ")";
    if (heapAlloc)
      s += " allocate(malloc)";
    if (!layout.empty())
      s += " layout(" + joinInts(layout) + ")";
    break;
  default:
    break;
  }
  if (!forced)
    s += " hint";
  if (unsafe)
    s += " unsafe";
  return s;
}

namespace {

struct LoopRecord {
  const Stmt *stmt = nullptr;
  const Stmt *parent = nullptr; // enclosing loop or null
  std::vector<Directive> stack; // parsed pragmas, source order
};

void collectLoops(const std::vector<StmtRef> &body, const Stmt *parent,
                  std::vector<LoopRecord> &out,
                  std::vector<std::pair<const Stmt *, std::vector<Directive>>>
                      &nonLoopStacks) {
  for (const auto &s : body) {
    std::vector<Directive> stack;
    for (const auto &p : s->pragmas)
      if (isLoopPragma(p.text))
        stack.push_back(parse_directive(p.text, p.loc));
    if (s->kind == Stmt::Kind::Loop) {
      out.push_back({s.get(), parent, std::move(stack)});
      collectLoops(s->body, s.get(), out, nonLoopStacks);
    } else {
      if (!stack.empty())
        nonLoopStacks.emplace_back(s.get(), std::move(stack));
      collectLoops(s->body, parent, out, nonLoopStacks);
      collectLoops(s->elseBody, parent, out, nonLoopStacks);
    }
  }
}

/// Checks that explicitly targeted source loops form a perfect nest in the
/// given outer-to-inner order.
bool isPerfectChain(const std::vector<const Stmt *> &loops) {
  for (size_t i = 0; i + 1 < loops.size(); ++i) {
    if (loops[i]->body.size() != 1 || loops[i]->body[0].get() != loops[i + 1])
      return false;
  }
  return true;
}

} // namespace

FunctionPlan resolve_plan(const Function &f) {
  std::vector<LoopRecord> loops;
  std::vector<std::pair<const Stmt *, std::vector<Directive>>> nonLoopStacks;
  collectLoops(f.body, nullptr, loops, nonLoopStacks);

  FunctionPlan plan;

  // Explicit ids from id(...) directives.
  std::map<std::string, const Stmt *> explicitIds;
  for (auto &rec : loops) {
    for (const auto &d : rec.stack) {
      if (d.kind != DirKind::Id)
        continue;
      if (explicitIds.count(d.idName))
        throw Diag(ErrCode::IdRedefinition,
                   "loop identifier '" + d.idName + "' is already defined",
                   d.loc);
      explicitIds[d.idName] = rec.stmt;
    }
  }
  for (const auto &[stmt, stack] : nonLoopStacks)
    for (const auto &d : stack)
      if (d.kind == DirKind::Id)
        throw Diag(ErrCode::UnresolvedLoopId,
                   "id pragma must be attached to a for-loop", d.loc);

  // Band id per source loop: the explicit id when present, else internal.
  std::map<const Stmt *, std::string> &loopIds = plan.loopIds;
  for (const auto &[name, stmt] : explicitIds)
    if (!loopIds.count(stmt))
      loopIds[stmt] = name;
  int internal = 0;
  for (const auto &rec : loops)
    if (!loopIds.count(rec.stmt))
      loopIds[rec.stmt] = "@L" + std::to_string(internal++);

  // Induction-variable aliases ("" when ambiguous).
  for (const auto &rec : loops) {
    auto [it, fresh] = plan.aliases.emplace(rec.stmt->counter, loopIds[rec.stmt]);
    if (!fresh && it->second != loopIds[rec.stmt])
      it->second = "";
  }

  std::set<std::string> promised;
  auto promise = [&](const std::string &name, SourceLoc loc) {
    if (name.empty())
      return;
    bool clash = explicitIds.count(name) || promised.count(name);
    auto alias = plan.aliases.find(name);
    if (alias != plan.aliases.end() && !alias->second.empty() &&
        alias->second != name)
      clash = true;
    if (clash)
      throw Diag(ErrCode::IdRedefinition,
                 "output loop identifier '" + name + "' is already in use",
                 loc);
    promised.insert(name);
  };

  auto resolveName = [&](const std::string &name, SourceLoc loc) {
    auto e = explicitIds.find(name);
    if (e != explicitIds.end())
      return loopIds[e->second];
    if (promised.count(name))
      return name;
    auto a = plan.aliases.find(name);
    if (a != plan.aliases.end()) {
      if (a->second.empty())
        throw Diag(ErrCode::AmbiguousImplicitId,
                   "induction variable '" + name +
                       "' names more than one loop; give the loops explicit ids",
                   loc);
      return a->second;
    }
    throw Diag(ErrCode::UnresolvedLoopId, "no loop named '" + name + "'", loc);
  };

  auto sourceLoopOf = [&](const std::string &bandId) -> const Stmt * {
    for (const auto &[stmt, id] : loopIds)
      if (id == bandId)
        return stmt;
    return nullptr;
  };

  // Application order: innermost stacks first, each stack bottom-up.
  std::vector<std::pair<const Stmt *, const std::vector<Directive> *>> stacks;
  std::function<void(const std::vector<StmtRef> &)> post =
      [&](const std::vector<StmtRef> &body) {
        for (const auto &s : body) {
          post(s->body);
          post(s->elseBody);
          if (s->kind == Stmt::Kind::Loop) {
            for (const auto &rec : loops)
              if (rec.stmt == s.get() && !rec.stack.empty())
                stacks.emplace_back(s.get(), &rec.stack);
          }
        }
      };
  post(f.body);
  for (const auto &[stmt, stack] : nonLoopStacks)
    stacks.emplace_back(stmt, &stack);

  for (const auto &[stmt, stack] : stacks) {
    // Current output of this stack, for target-less directives.
    std::string current =
        stmt->kind == Stmt::Kind::Loop ? loopIds[stmt] : std::string();
    for (auto it = stack->rbegin(); it != stack->rend(); ++it) {
      Directive d = *it;
      if (d.kind == DirKind::Id)
        continue;
      if (d.targets.empty() && d.kind == DirKind::Interchange) {
        // interchange permutation(...) with no loop list permutes exactly
        // the loops the permutation names.
        d.targets = d.permutation;
        for (auto &t : d.targets)
          t = resolveName(t, d.loc);
      } else if (d.targets.empty()) {
        if (current.empty())
          throw Diag(ErrCode::UnresolvedLoopId,
                     "directive has no target loop", d.loc);
        d.targets = {current};
        if (d.kind == DirKind::Tile && d.sizes.size() != 1)
          throw Diag(ErrCode::ClauseArityError,
                     "tile on the next loop takes exactly one size", d.loc);
      } else {
        for (auto &t : d.targets)
          t = resolveName(t, d.loc);
      }
      for (auto &p : d.permutation)
        p = resolveName(p, d.loc);

      // Source-level perfect-nest check when all targets are source loops.
      if (d.kind == DirKind::Interchange || d.kind == DirKind::Tile) {
        std::vector<const Stmt *> chain;
        bool allSource = true;
        for (const auto &t : d.targets) {
          const Stmt *ls = sourceLoopOf(t);
          if (!ls) {
            allSource = false;
            break;
          }
          chain.push_back(ls);
        }
        // Outer-to-inner, independent of the order the pragma names them.
        std::map<const Stmt *, int> depth;
        for (const auto &rec : loops) {
          int dpt = 0;
          for (const Stmt *p = rec.parent; p;) {
            ++dpt;
            const Stmt *next = nullptr;
            for (const auto &r2 : loops)
              if (r2.stmt == p)
                next = r2.parent;
            p = next;
          }
          depth[rec.stmt] = dpt;
        }
        std::sort(chain.begin(), chain.end(),
                  [&](const Stmt *a, const Stmt *b) { return depth[a] < depth[b]; });
        if (allSource && !isPerfectChain(chain))
          throw Diag(ErrCode::TargetNotPerfectlyNested,
                     "target loops of " + std::string(dirKindName(d.kind)) +
                         " are not perfectly nested",
                     d.loc);
      }

      // Register promised output-loop identifiers and the new stack output.
      switch (d.kind) {
      case DirKind::StripMine:
        promise(d.pitId, d.loc);
        promise(d.stripId, d.loc);
        current = !d.pitId.empty() ? d.pitId : d.targets[0];
        break;
      case DirKind::Tile:
        for (const auto &n : d.pitIds)
          promise(n, d.loc);
        for (const auto &n : d.tileIds)
          promise(n, d.loc);
        current = !d.pitIds.empty() ? d.pitIds[0] : d.targets[0];
        break;
      case DirKind::Distribute:
        for (const auto &n : d.distIds)
          promise(n, d.loc);
        current.clear(); // several outputs; a following pragma must name one
        break;
      case DirKind::Unroll:
        current = d.full ? std::string() : d.targets[0];
        break;
      case DirKind::Interchange:
        current = d.permutation[0];
        break;
      default:
        current = d.targets[0];
        break;
      }

      if (d.kind == DirKind::Pack && !f.arrayDims(d.array))
        throw Diag(ErrCode::ClauseArityError,
                   "pack array(" + d.array + ") does not name a declared array",
                   d.loc);

      plan.order.push_back(std::move(d));
    }
  }
  return plan;
}

std::string dump_plan(const Program &p) {
  std::string out;
  for (const auto &f : p.functions) {
    FunctionPlan plan = resolve_plan(f);
    for (const auto &d : plan.order) {
      out += f.name + ": " + d.str();
      if (d.loc.valid())
        out += "  // line " + std::to_string(d.loc.line);
      out += "\n";
    }
  }
  return out;
}

} // namespace loopforge
