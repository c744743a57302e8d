#include "sill/lexer.hpp"

#include <cctype>
#include <map>

namespace sill {

const char* tok_name(Tok t) {
  switch (t) {
  case Tok::Ident: return "identifier";
  case Tok::IntLit: return "integer";
  case Tok::KwType: return "'type'";
  case Tok::KwProc: return "'proc'";
  case Tok::KwDef: return "'def'";
  case Tok::KwSkeleton: return "'skeleton'";
  case Tok::KwConfig: return "'config'";
  case Tok::KwTarget: return "'target'";
  case Tok::KwTick: return "'tick'";
  case Tok::KwSend: return "'send'";
  case Tok::KwRecv: return "'recv'";
  case Tok::KwCase: return "'case'";
  case Tok::KwClose: return "'close'";
  case Tok::KwWait: return "'wait'";
  case Tok::KwGet: return "'get'";
  case Tok::KwPay: return "'pay'";
  case Tok::KwUnit: return "'unit'";
  case Tok::KwBool: return "'bool'";
  case Tok::KwInt: return "'int'";
  case Tok::KwTrue: return "'true'";
  case Tok::KwFalse: return "'false'";
  case Tok::KwIf: return "'if'";
  case Tok::KwThen: return "'then'";
  case Tok::KwElse: return "'else'";
  case Tok::KwMatch: return "'match'";
  case Tok::KwInl: return "'inl'";
  case Tok::KwInr: return "'inr'";
  case Tok::LParen: return "'('";
  case Tok::RParen: return "')'";
  case Tok::LBrace: return "'{'";
  case Tok::RBrace: return "'}'";
  case Tok::LBracket: return "'['";
  case Tok::RBracket: return "']'";
  case Tok::Comma: return "','";
  case Tok::Semi: return "';'";
  case Tok::Colon: return "':'";
  case Tok::Dot: return "'.'";
  case Tok::Question: return "'?'";
  case Tok::Assign: return "'='";
  case Tok::EqEq: return "'=='";
  case Tok::FatArrow: return "'=>'";
  case Tok::SlashBack: return "'/\\'";
  case Tok::Slash: return "'/'";
  case Tok::Lolli: return "'-o'";
  case Tok::LArrow: return "'<-'";
  case Tok::GetTok: return "'<|'";
  case Tok::PayTok: return "'|>'";
  case Tok::Turnstile: return "'|-'";
  case Tok::Amp: return "'&'";
  case Tok::AmpUnder: return "'&_'";
  case Tok::Plus: return "'+'";
  case Tok::PlusUnder: return "'+_'";
  case Tok::Star: return "'*'";
  case Tok::Minus: return "'-'";
  case Tok::Lt: return "'<'";
  case Tok::Le: return "'<='";
  case Tok::Eof: return "end of input";
  }
  return "?";
}

namespace {

const std::map<std::string, Tok>& keywords() {
  static const std::map<std::string, Tok> kws = {
      {"type", Tok::KwType},       {"proc", Tok::KwProc},
      {"def", Tok::KwDef},         {"skeleton", Tok::KwSkeleton},
      {"config", Tok::KwConfig},   {"target", Tok::KwTarget},
      {"tick", Tok::KwTick},       {"send", Tok::KwSend},
      {"recv", Tok::KwRecv},       {"case", Tok::KwCase},
      {"close", Tok::KwClose},     {"wait", Tok::KwWait},
      {"get", Tok::KwGet},         {"pay", Tok::KwPay},
      {"unit", Tok::KwUnit},       {"bool", Tok::KwBool},
      {"int", Tok::KwInt},         {"true", Tok::KwTrue},
      {"false", Tok::KwFalse},     {"if", Tok::KwIf},
      {"then", Tok::KwThen},       {"else", Tok::KwElse},
      {"match", Tok::KwMatch},     {"inl", Tok::KwInl},
      {"inr", Tok::KwInr},
  };
  return kws;
}

bool ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
bool ident_cont(char c) { return std::isalnum((unsigned char)c) || c == '_' || c == '\''; }

} // namespace

std::vector<Token> lex(const std::string& src, const std::string& filename) {
  std::vector<Token> out;
  size_t i = 0, n = src.size();
  uint32_t line = 1, col = 1;

  auto here = [&] { return SourceSpan{line, col, filename}; };
  auto advance = [&](size_t k) {
    for (size_t j = 0; j < k && i < n; ++j, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto peek = [&](size_t k) -> char { return i + k < n ? src[i + k] : '\0'; };
  auto push = [&](Tok t, SourceSpan sp, std::string text = {}) {
    out.push_back(Token{t, std::move(text), std::move(sp)});
  };

  while (i < n) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '-' && peek(1) == '-') {
      while (i < n && src[i] != '\n') advance(1);
      continue;
    }
    SourceSpan sp = here();
    if (ident_start(c)) {
      size_t j = i;
      while (j < n && ident_cont(src[j])) ++j;
      std::string word = src.substr(i, j - i);
      advance(j - i);
      auto it = keywords().find(word);
      if (it != keywords().end())
        push(it->second, sp);
      else
        push(Tok::Ident, sp, std::move(word));
      continue;
    }
    if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < n && std::isdigit((unsigned char)src[j])) ++j;
      std::string digits = src.substr(i, j - i);
      advance(j - i);
      push(Tok::IntLit, sp, std::move(digits));
      continue;
    }
    switch (c) {
    case '(': advance(1); push(Tok::LParen, sp); continue;
    case ')': advance(1); push(Tok::RParen, sp); continue;
    case '{': advance(1); push(Tok::LBrace, sp); continue;
    case '}': advance(1); push(Tok::RBrace, sp); continue;
    case '[': advance(1); push(Tok::LBracket, sp); continue;
    case ']': advance(1); push(Tok::RBracket, sp); continue;
    case ',': advance(1); push(Tok::Comma, sp); continue;
    case ';': advance(1); push(Tok::Semi, sp); continue;
    case ':': advance(1); push(Tok::Colon, sp); continue;
    case '.': advance(1); push(Tok::Dot, sp); continue;
    case '?': advance(1); push(Tok::Question, sp); continue;
    case '*': advance(1); push(Tok::Star, sp); continue;
    case '=':
      if (peek(1) == '=') { advance(2); push(Tok::EqEq, sp); }
      else if (peek(1) == '>') { advance(2); push(Tok::FatArrow, sp); }
      else { advance(1); push(Tok::Assign, sp); }
      continue;
    case '/':
      if (peek(1) == '\\') { advance(2); push(Tok::SlashBack, sp); }
      else { advance(1); push(Tok::Slash, sp); }
      continue;
    case '-':
      if (peek(1) == 'o' && !ident_cont(peek(2))) { advance(2); push(Tok::Lolli, sp); }
      else { advance(1); push(Tok::Minus, sp); }
      continue;
    case '<':
      if (peek(1) == '-') { advance(2); push(Tok::LArrow, sp); }
      else if (peek(1) == '|') { advance(2); push(Tok::GetTok, sp); }
      else if (peek(1) == '=') { advance(2); push(Tok::Le, sp); }
      else { advance(1); push(Tok::Lt, sp); }
      continue;
    case '|':
      if (peek(1) == '>') { advance(2); push(Tok::PayTok, sp); }
      else if (peek(1) == '-') { advance(2); push(Tok::Turnstile, sp); }
      else fail(Errc::ParseError, "stray '|'", sp);
      continue;
    case '&':
      if (peek(1) == '_') { advance(2); push(Tok::AmpUnder, sp); }
      else { advance(1); push(Tok::Amp, sp); }
      continue;
    case '+':
      if (peek(1) == '_') { advance(2); push(Tok::PlusUnder, sp); }
      else { advance(1); push(Tok::Plus, sp); }
      continue;
    default:
      fail(Errc::ParseError, std::string("unexpected character '") + c + "'", sp);
    }
  }
  push(Tok::Eof, here());
  return out;
}

} // namespace sill
