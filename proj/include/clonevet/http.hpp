#pragma once

#include <string>

namespace httplib {
class Server;
}

namespace clonevet::service {

class Service;

/// Installs the JSON API on `server`:
///   POST /users                      register (name, email) -> id, token
///   POST /tools                      register a tool
///   POST /experiments                multipart (tool_id, name, csv file) or JSON
///   GET  /experiments/:id            state, progress, sample outcomes
///   POST /experiments/:id/judges     {"user_ids": [...]}
///   GET  /judges/:id/tasks
///   GET  /tasks/:id                  includes both method sources
///   POST /tasks/:id/judgment         {"is_clone", "clone_type"?, "comment"?}
///   GET  /experiments/:id/report
///   GET  /export/labels              CSV
/// All but POST /users need "Authorization: Bearer <token>". POSTs carrying a
/// Request-Id header are answered once and replayed on retry.
void install_routes(httplib::Server& server, Service& service);

/// Serves until the process is stopped. Returns false if binding fails.
bool serve(Service& service, const std::string& host, int port);

}  // namespace clonevet::service
