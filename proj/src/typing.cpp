#include "authpi/typing.hpp"

#include <sstream>

#include "authpi/text.hpp"

namespace authpi {

const char* rule_name(TypingRule r) {
  switch (r) {
    case TypingRule::tnew:
      return "tnew";
    case TypingRule::trecv:
      return "trecv";
    case TypingRule::tdeleg:
      return "tdeleg";
  }
  return "?";
}

std::string TypeError::render() const {
  std::ostringstream os;
  os << "type error (" << rule_name(rule) << ")";
  if (span) os << " at " << span->line << ':' << span->column;
  os << ": " << message;
  return os.str();
}

std::string render_names(const NameSet& names) {
  std::string out = "{";
  bool first = true;
  for (const Name& n : sorted_for_display(names)) {
    if (!first) out += ", ";
    out += n.text();
    first = false;
  }
  return out + "}";
}

namespace {

class Inference {
 public:
  explicit Inference(bool stop_at_first) : stop_at_first_(stop_at_first) {}

  NameSet run(const Process& p) { return visit(p); }
  std::vector<TypeError>& errors() { return errors_; }

 private:
  struct Abort {};

  void report(TypingRule rule, const Process& at, const Name& offending, std::string message) {
    errors_.push_back({rule, path_, offending, std::move(message), at.span()});
    if (stop_at_first_) throw Abort{};
  }

  NameSet child(const Process& p, std::size_t index) {
    path_.push_back(index);
    NameSet rho = visit(p);
    path_.pop_back();
    return rho;
  }

  NameSet visit(const Process& p) {
    switch (p.kind()) {
      case ProcessKind::nil:
        return {};
      case ProcessKind::par: {
        NameSet rho = child(p.left(), 0);
        NameSet right = child(p.right(), 1);
        rho.insert(right.begin(), right.end());
        return rho;
      }
      case ProcessKind::restrict: {
        NameSet rho = child(p.body(), 0);
        if (rho.count(p.name()))
          report(TypingRule::tnew, p, p.name(),
                 "restricted name " + p.name().text() + " is used without authorization in its scope");
        return rho;
      }
      case ProcessKind::auth: {
        NameSet rho = child(p.body(), 0);
        rho.erase(p.name());
        return rho;
      }
      case ProcessKind::prefix: {
        const Action& a = p.action();
        NameSet rho = child(p.continuation(), 0);
        switch (a.kind) {
          case ActionKind::output:
            rho.insert(a.channel);
            break;
          case ActionKind::input:
            if (rho.count(a.object))
              report(TypingRule::trecv, p, a.object,
                     "received name " + a.object.text() +
                         " is used without authorization in the continuation of " + print_action(a));
            rho.insert(a.channel);
            break;
          case ActionKind::send_auth:
            if (rho.count(a.object))
              report(TypingRule::tdeleg, p, a.object,
                     "delegated name " + a.object.text() +
                         " is still used without authorization after " + print_action(a));
            rho.insert(a.channel);
            rho.insert(a.object);
            break;
          case ActionKind::recv_auth:
            rho.erase(a.object);
            rho.insert(a.channel);
            break;
        }
        return rho;
      }
    }
    return {};
  }

  bool stop_at_first_;
  std::vector<std::size_t> path_;
  std::vector<TypeError> errors_;
};

}  // namespace

InferResult infer(const Process& p) {
  Inference inference(true);
  try {
    return TypeContext{inference.run(p)};
  } catch (...) {
    if (inference.errors().empty()) throw;
    return inference.errors().front();
  }
}

Diagnostics infer_all(const Process& p) {
  Inference inference(false);
  Diagnostics d;
  d.rho = inference.run(p);
  d.errors = std::move(inference.errors());
  return d;
}

bool well_typed(const Process& p) {
  auto r = infer(p);
  auto* ctx = std::get_if<TypeContext>(&r);
  return ctx && ctx->rho.empty();
}

}  // namespace authpi
