#include "authpi/safety.hpp"

#include <algorithm>

#include "authpi/congruence.hpp"
#include "authpi/text.hpp"

namespace authpi {

bool context_authorizes(const ContextPath& path, const Name& a) {
  return std::any_of(path.begin(), path.end(),
                     [&](const Frame& f) { return f.kind == FrameKind::auth && f.name == a; });
}

namespace {

void collect_active(const Process& p, ContextPath& path, std::vector<ActivePrefix>& out) {
  switch (p.kind()) {
    case ProcessKind::nil:
      return;
    case ProcessKind::par:
      path.push_back(Frame::par_branch());
      collect_active(p.left(), path, out);
      collect_active(p.right(), path, out);
      path.pop_back();
      return;
    case ProcessKind::restrict:
      path.push_back(Frame::restriction(p.name()));
      collect_active(p.body(), path, out);
      path.pop_back();
      return;
    case ProcessKind::auth:
      path.push_back(Frame::auth(p.name()));
      collect_active(p.body(), path, out);
      path.pop_back();
      return;
    case ProcessKind::prefix:
      out.push_back({path, p.action(), p.continuation()});
      return;
  }
}

}  // namespace

std::vector<ActivePrefix> active_prefixes(const Process& p) {
  std::vector<ActivePrefix> out;
  ContextPath path;
  collect_active(p, path, out);
  return out;
}

std::string Violation::render() const {
  return "error[clause " + std::to_string(clause) + "] at " + print_action(action) + ": name " +
         offending.text() + " not authorized";
}

ErrorReport presentation_errors(const Process& p) {
  ErrorReport report;
  for (const ActivePrefix& ap : active_prefixes(p)) {
    if (!context_authorizes(ap.path, ap.action.channel))
      report.violations.push_back({ap.path, ap.action, 1, ap.action.channel});
    if (ap.action.kind == ActionKind::send_auth && !context_authorizes(ap.path, ap.action.object))
      report.violations.push_back({ap.path, ap.action, 2, ap.action.object});
  }
  return report;
}

ErrorReport is_error(const Process& p) { return presentation_errors(canonicalize(p)); }

}  // namespace authpi
