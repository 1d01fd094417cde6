#include "authpi/text.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace authpi {

std::string ParseError::render() const {
  std::ostringstream os;
  os << span.line << ':' << span.column << ": " << message;
  if (!expected.empty()) {
    os << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) os << (i + 1 == expected.size() ? " or " : ", ");
      os << expected[i];
    }
    os << ')';
  }
  return os.str();
}

namespace {

enum class Tok { name, zero, lparen, rparen, lbrack, rbrack, bang, query, dot, bar, kw_new, end };

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::name:
      return "name";
    case Tok::zero:
      return "'0'";
    case Tok::lparen:
      return "'('";
    case Tok::rparen:
      return "')'";
    case Tok::lbrack:
      return "'['";
    case Tok::rbrack:
      return "']'";
    case Tok::bang:
      return "'!'";
    case Tok::query:
      return "'?'";
    case Tok::dot:
      return "'.'";
    case Tok::bar:
      return "'|'";
    case Tok::kw_new:
      return "'new'";
    case Tok::end:
      return "end of input";
  }
  return "?";
}

struct LexFailure {
  ParseError error;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      SourceSpan sp{pos_, pos_, line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::end, "", sp});
        return out;
      }
      char c = src_[pos_];
      if (is_alpha(c)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (is_alpha(src_[pos_]) || is_digit(src_[pos_]) || src_[pos_] == '_'))
          advance();
        std::string text(src_.substr(start, pos_ - start));
        sp.end = pos_;
        out.push_back({text == "new" ? Tok::kw_new : Tok::name, text, sp});
        continue;
      }
      if (is_digit(c)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (is_digit(src_[pos_]) || is_alpha(src_[pos_]) || src_[pos_] == '_'))
          advance();
        sp.end = pos_;
        std::string text(src_.substr(start, pos_ - start));
        if (text != "0")
          throw LexFailure{{sp, "invalid token '" + text + "'; names must start with a letter", {}}};
        out.push_back({Tok::zero, text, sp});
        continue;
      }
      Tok kind;
      switch (c) {
        case '(':
          kind = Tok::lparen;
          break;
        case ')':
          kind = Tok::rparen;
          break;
        case '[':
          kind = Tok::lbrack;
          break;
        case ']':
          kind = Tok::rbrack;
          break;
        case '!':
          kind = Tok::bang;
          break;
        case '?':
          kind = Tok::query;
          break;
        case '.':
          kind = Tok::dot;
          break;
        case '|':
          kind = Tok::bar;
          break;
        default: {
          advance();
          sp.end = pos_;
          std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                                  ? "byte 0x" + hex(static_cast<unsigned char>(c))
                                  : std::string("'") + c + "'";
          throw LexFailure{{sp, "unexpected character " + shown, {}}};
        }
      }
      advance();
      sp.end = pos_;
      out.push_back({kind, std::string(1, c), sp});
    }
  }

 private:
  static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static std::string hex(unsigned v) {
    const char* digits = "0123456789abcdef";
    return {digits[v >> 4], digits[v & 15]};
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

struct SyntaxFailure {
  ParseError error;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Process run() {
    Process p = process();
    if (peek().kind == Tok::rparen)
      fail(peek(), "unmatched ')'", {});
    if (peek().kind != Tok::end) fail(peek(), "unexpected " + shown(peek()), {"'|'", "end of input"});
    return p;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  static std::string shown(const Token& t) {
    if (t.kind == Tok::name) return "name '" + t.text + "'";
    return describe(t.kind);
  }

  [[noreturn]] void fail(const Token& at, std::string message, std::vector<std::string> expected) {
    throw SyntaxFailure{{at.span, std::move(message), std::move(expected)}};
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind) fail(peek(), "unexpected " + shown(peek()), {describe(kind)});
    return take();
  }

  SourceSpan span_from(const SourceSpan& start) const {
    const Token& last = toks_[pos_ == 0 ? 0 : pos_ - 1];
    return {start.start, last.span.end, start.line, start.column};
  }

  Name lookup(const std::string& text) const {
    for (std::size_t i = scope_.size(); i-- > 0;)
      if (scope_[i].text() == text) return scope_[i];
    return Name::global(text);
  }

  Process process() {
    SourceSpan start = peek().span;
    Process acc = term();
    while (peek().kind == Tok::bar) {
      take();
      Process rhs = term();
      acc = Process::par(acc, rhs).with_span(span_from(start));
    }
    return acc;
  }

  Process term() {
    const Token& t = peek();
    SourceSpan start = t.span;
    switch (t.kind) {
      case Tok::zero:
        take();
        return Process::nil().with_span(span_from(start));
      case Tok::lparen: {
        const Token open = take();
        Process inner = process();
        if (peek().kind != Tok::rparen) {
          std::ostringstream msg;
          msg << "unclosed '(' opened at " << open.span.line << ':' << open.span.column << "; found "
              << shown(peek());
          fail(peek(), msg.str(), {"')'", "'|'"});
        }
        take();
        return inner;
      }
      case Tok::kw_new: {
        take();
        const Token& id = expect(Tok::name);
        Name binder = Name::fresh(id.text);
        expect(Tok::dot);
        scope_.push_back(binder);
        Process body = term();
        scope_.pop_back();
        return Process::restrict(binder, body).with_span(span_from(start));
      }
      case Tok::lbrack: {
        const Token open = take();
        const Token& id = expect(Tok::name);
        Name scope = lookup(id.text);
        if (peek().kind != Tok::rbrack) {
          std::ostringstream msg;
          msg << "unclosed '[' opened at " << open.span.line << ':' << open.span.column << "; found "
              << shown(peek());
          fail(peek(), msg.str(), {"']'"});
        }
        take();
        Process body = term();
        return Process::auth(scope, body).with_span(span_from(start));
      }
      case Tok::name:
        return prefixed();
      case Tok::rparen:
        fail(t, "unmatched ')'", {"process"});
      default:
        fail(t, "unexpected " + shown(t), {"'0'", "'('", "'new'", "'['", "name"});
    }
  }

  Process prefixed() {
    SourceSpan start = peek().span;
    Name chan = lookup(take().text);
    const Token& op = peek();
    if (op.kind != Tok::bang && op.kind != Tok::query)
      fail(op, "unexpected " + shown(op) + " after channel name", {"'!'", "'?'"});
    take();
    bool sending = op.kind == Tok::bang;
    Action action;
    std::optional<Name> binder;
    if (peek().kind == Tok::lbrack) {
      const Token open = take();
      Name obj = lookup(expect(Tok::name).text);
      if (peek().kind != Tok::rbrack) {
        std::ostringstream msg;
        msg << "unclosed '[' opened at " << open.span.line << ':' << open.span.column << "; found "
            << shown(peek());
        fail(peek(), msg.str(), {"']'"});
      }
      take();
      action = sending ? Action::send_auth(chan, obj) : Action::recv_auth(chan, obj);
    } else if (peek().kind == Tok::name) {
      const Token& id = take();
      if (sending) {
        action = Action::output(chan, lookup(id.text));
      } else {
        binder = Name::fresh(id.text);
        action = Action::input(chan, *binder);
      }
    } else {
      fail(peek(), "unexpected " + shown(peek()) + " in prefix", {"name", "'['"});
    }
    expect(Tok::dot);
    if (binder) scope_.push_back(*binder);
    Process cont = term();
    if (binder) scope_.pop_back();
    return Process::prefix(action, cont).with_span(span_from(start));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Name> scope_;
};

// ---------------------------------------------------------------------------

/// Assigns display text to names while walking a term. Binders pick the
/// smallest variant of their text not used by another name free in their body.
class Namer {
 public:
  explicit Namer(const Process& root) {
    auto names = sorted_for_display(free_names(root));
    for (const Name& n : names) global_.push_back(n.text());
    std::unordered_map<std::string, int> seen;
    for (const Name& n : names) {
      std::string text = n.text();
      if (seen[text]++ > 0 || !is_identifier(text)) {
        text = variant_of(text, global_);
        global_.push_back(text);
      }
      push(n, text);
    }
  }

  const std::string& text(const Name& n) const {
    auto it = current_.find(n.uid());
    if (it != current_.end() && !it->second.empty()) return it->second.back();
    return n.text();
  }

  std::string bind(const Name& binder, const Process& body) {
    std::vector<std::string> used;
    for (const Name& n : free_names(body))
      if (n != binder) used.push_back(text(n));
    std::string chosen = binder.text();
    if (!is_identifier(chosen) || std::find(used.begin(), used.end(), chosen) != used.end())
      chosen = variant_of(binder.text(), used);
    push(binder, chosen);
    return chosen;
  }

  void unbind(const Name& binder) { current_[binder.uid()].pop_back(); }

 private:
  static std::string variant_of(const std::string& base, const std::vector<std::string>& used) {
    std::string stem = is_identifier(base) ? base : "n";
    for (int k = 1;; ++k) {
      std::string candidate = stem + std::to_string(k);
      if (std::find(used.begin(), used.end(), candidate) == used.end()) return candidate;
    }
  }

  void push(const Name& n, std::string text) { current_[n.uid()].push_back(std::move(text)); }

  std::unordered_map<std::uint64_t, std::vector<std::string>> current_;
  std::vector<std::string> global_;
};

class Printer {
 public:
  explicit Printer(const Process& root) : namer_(root) {}

  void process(const Process& p) {
    if (p.kind() == ProcessKind::par) {
      process(p.left());
      out_ += " | ";
      term(p.right());
    } else {
      term(p);
    }
  }

  std::string take() { return std::move(out_); }

 private:
  void term(const Process& p) {
    switch (p.kind()) {
      case ProcessKind::nil:
        out_ += '0';
        return;
      case ProcessKind::par:
        out_ += '(';
        process(p);
        out_ += ')';
        return;
      case ProcessKind::restrict: {
        std::string b = namer_.bind(p.name(), p.body());
        out_ += "new " + b + ".";
        term(p.body());
        namer_.unbind(p.name());
        return;
      }
      case ProcessKind::auth:
        out_ += '[' + namer_.text(p.name()) + ']';
        term(p.body());
        return;
      case ProcessKind::prefix: {
        const Action& a = p.action();
        out_ += namer_.text(a.channel);
        switch (a.kind) {
          case ActionKind::output:
            out_ += '!' + namer_.text(a.object);
            break;
          case ActionKind::input: {
            std::string b = namer_.bind(a.object, p.continuation());
            out_ += '?' + b + '.';
            term(p.continuation());
            namer_.unbind(a.object);
            return;
          }
          case ActionKind::send_auth:
            out_ += "![" + namer_.text(a.object) + ']';
            break;
          case ActionKind::recv_auth:
            out_ += "?[" + namer_.text(a.object) + ']';
            break;
        }
        out_ += '.';
        term(p.continuation());
        return;
      }
    }
  }

  Namer namer_;
  std::string out_;
};

const char* json_tag(ActionKind k) {
  switch (k) {
    case ActionKind::output:
      return "out";
    case ActionKind::input:
      return "in";
    case ActionKind::send_auth:
      return "sendauth";
    case ActionKind::recv_auth:
      return "recvauth";
  }
  return "?";
}

nlohmann::ordered_json json_rec(const Process& p, Namer& namer) {
  nlohmann::ordered_json j;
  switch (p.kind()) {
    case ProcessKind::nil:
      j["kind"] = "nil";
      break;
    case ProcessKind::par:
      j["kind"] = "par";
      j["left"] = json_rec(p.left(), namer);
      j["right"] = json_rec(p.right(), namer);
      break;
    case ProcessKind::restrict:
      j["kind"] = "new";
      j["name"] = namer.bind(p.name(), p.body());
      j["body"] = json_rec(p.body(), namer);
      namer.unbind(p.name());
      break;
    case ProcessKind::auth:
      j["kind"] = "auth";
      j["name"] = namer.text(p.name());
      j["body"] = json_rec(p.body(), namer);
      break;
    case ProcessKind::prefix: {
      const Action& a = p.action();
      j["kind"] = "prefix";
      nlohmann::ordered_json act;
      act["tag"] = json_tag(a.kind);
      act["chan"] = namer.text(a.channel);
      if (a.binds()) {
        act["obj"] = namer.bind(a.object, p.continuation());
        j["action"] = act;
        j["cont"] = json_rec(p.continuation(), namer);
        namer.unbind(a.object);
      } else {
        act["obj"] = namer.text(a.object);
        j["action"] = act;
        j["cont"] = json_rec(p.continuation(), namer);
      }
      break;
    }
  }
  return j;
}

}  // namespace

ParseResult parse(std::string_view text) {
  try {
    Lexer lexer(text);
    Parser parser(lexer.run());
    return parser.run();
  } catch (const LexFailure& f) {
    return f.error;
  } catch (const SyntaxFailure& f) {
    return f.error;
  }
}

Process parse_or_throw(std::string_view text) {
  auto result = parse(text);
  if (auto* err = std::get_if<ParseError>(&result))
    throw std::invalid_argument("parse error: " + err->render() + " in `" + std::string(text) + "`");
  return std::get<Process>(std::move(result));
}

std::string print(const Process& p) {
  Printer printer(p);
  printer.process(p);
  return printer.take();
}

std::string print_action(const Action& a) {
  switch (a.kind) {
    case ActionKind::output:
      return a.channel.text() + "!" + a.object.text();
    case ActionKind::input:
      return a.channel.text() + "?" + a.object.text();
    case ActionKind::send_auth:
      return a.channel.text() + "![" + a.object.text() + "]";
    case ActionKind::recv_auth:
      return a.channel.text() + "?[" + a.object.text() + "]";
  }
  return {};
}

nlohmann::ordered_json to_json(const Process& p) {
  Namer namer(p);
  return json_rec(p, namer);
}

}  // namespace authpi
