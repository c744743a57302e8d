// Tokenizer for program (.sill) and skeleton (.skel) sources.
//
// Line comments start with `--`. Multi-character operators are resolved
// greedily with one character of lookahead; `-o` is recognised only when the
// `o` is not part of a longer identifier, so `a-old` still lexes as a
// subtraction.
#pragma once

#include "sill/diagnostics.hpp"

#include <string>
#include <vector>

namespace sill {

enum class Tok {
  Ident,
  IntLit,
  // keywords
  KwType, KwProc, KwDef, KwSkeleton, KwConfig, KwTarget,
  KwTick, KwSend, KwRecv, KwCase, KwClose, KwWait, KwGet, KwPay,
  KwUnit, KwBool, KwInt, KwTrue, KwFalse,
  KwIf, KwThen, KwElse, KwMatch, KwInl, KwInr,
  // punctuation and operators
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Semi, Colon, Dot, Question,
  Assign,      // =
  EqEq,        // ==
  FatArrow,    // =>
  SlashBack,   // /\ (value-send type constructor)
  Slash,       // /  (rational separator)
  Lolli,       // -o
  LArrow,      // <-
  GetTok,      // <|
  PayTok,      // |>
  Turnstile,   // |-
  Amp,         // &
  AmpUnder,    // &_
  Plus,        // +
  PlusUnder,   // +_
  Star,        // *
  Minus,       // -
  Lt,          // <
  Le,          // <=
  Eof,
};

const char* tok_name(Tok t);

struct Token {
  Tok kind;
  std::string text; // identifier spelling or integer digits
  SourceSpan span;
};

std::vector<Token> lex(const std::string& src, const std::string& filename);

} // namespace sill
