#include "clonevet/http.hpp"

#include <httplib.h>

#include <json.hpp>

#include "clonevet/error.hpp"
#include "clonevet/service.hpp"

namespace clonevet::service {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, http_status(code), {{"error", to_string(code)}, {"message", message}});
}

std::string bearer(const httplib::Request& req) {
  const std::string h = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  if (h.compare(0, prefix.size(), prefix) == 0) return h.substr(prefix.size());
  return {};
}

json body_json(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::InvalidParameter, "request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidParameter, std::string("invalid JSON body: ") + e.what());
  }
}

// Text value of a multipart field or a JSON member.
std::optional<std::string> field(const httplib::Request& req, const json& body, const std::string& name) {
  if (req.is_multipart_form_data()) {
    if (req.has_file(name)) return req.get_file_value(name).content;
    return std::nullopt;
  }
  if (!body.contains(name) || body[name].is_null()) return std::nullopt;
  return body[name].is_string() ? body[name].get<std::string>() : body[name].dump();
}

study::StudyConfig config_from_request(const httplib::Request& req, const json& body) {
  study::StudyConfig c;
  json cfg = body.contains("config") ? body["config"] : json::object();
  auto get = [&](const std::string& name) -> std::optional<std::string> {
    if (cfg.contains(name) && !cfg[name].is_null()) {
      return cfg[name].is_string() ? cfg[name].get<std::string>() : cfg[name].dump();
    }
    return field(req, body, name);
  };
  try {
    if (auto v = get("min_tokens")) c.pipeline.min_tokens = std::stoi(*v);
    if (auto v = get("theta_t3")) c.pipeline.theta_t3 = Rational::parse(*v);
    if (auto v = get("classifier_cutoff")) c.pipeline.classifier_cutoff = std::stod(*v);
    if (auto v = get("trust_similarity_floor")) c.pipeline.trust_similarity_floor = Rational::parse(*v);
    if (auto v = get("confidence")) c.confidence = Rational::parse(*v);
    if (auto v = get("margin")) c.margin = Rational::parse(*v);
    if (auto v = get("sample_target")) c.sample_target = std::stoll(*v);
    if (auto v = get("seed")) c.seed = std::stoull(*v);
  } catch (const std::logic_error& e) {
    throw Error(ErrorCode::InvalidParameter, std::string("bad experiment config: ") + e.what());
  }
  return c;
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&, const User*)>;

// Wraps a handler with authentication, error mapping and request-id replay.
httplib::Server::Handler wrap(Service& service, bool needs_auth, Handler h) {
  return [&service, needs_auth, h](const httplib::Request& req, httplib::Response& res) {
    try {
      std::optional<User> user;
      if (needs_auth) user = service.authenticate(bearer(req));
      std::string request_key;
      const std::string rid = req.get_header_value("Request-Id");
      if (req.method == "POST" && !rid.empty()) {
        request_key = (user ? user->id : std::string("-")) + " " + req.path + " " + rid;
        if (auto stored = service.replay(request_key)) {
          const json j = json::parse(*stored);
          res.status = j.at("status").get<int>();
          res.set_content(j.at("body").get<std::string>(), j.at("type").get<std::string>());
          return;
        }
      }
      h(req, res, user ? &*user : nullptr);
      if (!request_key.empty() && res.status < 500) {
        service.remember(request_key, json{{"status", res.status},
                                           {"body", res.body},
                                           {"type", res.get_header_value("Content-Type")}}
                                          .dump());
      }
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", "InternalError"}, {"message", e.what()}});
    }
  };
}

}  // namespace

void install_routes(httplib::Server& server, Service& service) {
  server.set_payload_max_length(256u << 20);

  server.Post("/users", wrap(service, false, [&](const auto& req, auto& res, const User*) {
    const json b = body_json(req);
    const User u = service.register_user(b.value("name", ""), b.value("email", ""));
    send_json(res, 201, {{"id", u.id}, {"name", u.name}, {"email", u.email}, {"token", u.token}});
  }));

  server.Post("/tools", wrap(service, true, [&](const auto& req, auto& res, const User* u) {
    const json b = body_json(req);
    const Tool t = service.register_tool(u->id, b.value("name", ""), b.value("version", ""),
                                         b.value("description", ""));
    send_json(res, 201, Service::tool_json(t));
  }));

  server.Post("/experiments", wrap(service, true, [&](const auto& req, auto& res, const User* u) {
    const json b = req.is_multipart_form_data() ? json::object() : body_json(req);
    const auto tool = field(req, b, "tool_id");
    if (!tool) throw Error(ErrorCode::InvalidParameter, "tool_id is required");
    auto csv_text = field(req, b, "csv");
    if (!csv_text && req.is_multipart_form_data() && req.has_file("file")) {
      csv_text = req.get_file_value("file").content;
    }
    if (!csv_text) throw Error(ErrorCode::MalformedCSV, "no CSV upload (field 'csv' or 'file')");
    const Experiment e = service.create_experiment(u->id, *tool, field(req, b, "name").value_or(""),
                                                   *csv_text, config_from_request(req, b));
    send_json(res, 201, service.experiment_json(e));
  }));

  server.Get("/experiments/:id", wrap(service, true, [&](const auto& req, auto& res, const User*) {
    send_json(res, 200, service.experiment_json(service.experiment(req.path_params.at("id"))));
  }));

  server.Post("/experiments/:id/judges", wrap(service, true, [&](const auto& req, auto& res, const User* u) {
    const json b = body_json(req);
    std::vector<std::string> ids;
    try {
      ids = b.at("user_ids").get<std::vector<std::string>>();
    } catch (const json::exception&) {
      throw Error(ErrorCode::InvalidParameter, "user_ids must be a list of strings");
    }
    const Experiment e = service.invite_judges(u->id, req.path_params.at("id"), ids);
    send_json(res, 200, service.experiment_json(e));
  }));

  server.Get("/judges/:id/tasks", wrap(service, true, [&](const auto& req, auto& res, const User* u) {
    const std::string judge = req.path_params.at("id");
    if (judge != u->id) throw Error(ErrorCode::Unauthorized, "judges can only list their own tasks");
    json out = json::array();
    for (const Task& t : service.tasks_for(judge)) out.push_back(service.task_json(t, false));
    send_json(res, 200, out);
  }));

  server.Get("/tasks/:id", wrap(service, true, [&](const auto& req, auto& res, const User* u) {
    const Task t = service.task(req.path_params.at("id"));
    if (t.judge_id != u->id) throw Error(ErrorCode::Unauthorized, "task belongs to another judge");
    send_json(res, 200, service.task_json(t, true));
  }));

  server.Post("/tasks/:id/judgment", wrap(service, true, [&](const auto& req, auto& res, const User* u) {
    const json b = body_json(req);
    if (!b.contains("is_clone") || !b["is_clone"].is_boolean()) {
      throw Error(ErrorCode::InvalidParameter, "is_clone (boolean) is required");
    }
    std::optional<CloneType> type;
    if (b.contains("clone_type") && !b["clone_type"].is_null()) {
      type = parse_clone_type(b["clone_type"].get<std::string>());
      if (!type) throw Error(ErrorCode::IllegalCloneType, "unknown clone type");
    }
    const Task t = service.submit_judgment(u->id, req.path_params.at("id"), b["is_clone"].get<bool>(),
                                           type, b.value("comment", ""));
    send_json(res, 200, service.task_json(t, false));
  }));

  server.Get("/experiments/:id/report", wrap(service, true, [&](const auto& req, auto& res, const User*) {
    const std::string id = req.path_params.at("id");
    try {
      res.status = 200;
      res.set_content(service.experiment_report(id), "application/json");
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotComplete) throw;
      const Progress p = service.progress(id);
      send_json(res, 409, {{"error", "NotComplete"},
                           {"message", e.what()},
                           {"progress", {{"done", p.done}, {"total", p.total}}}});
    }
  }));

  server.Get("/export/labels", wrap(service, true, [&](const auto&, auto& res, const User*) {
    res.status = 200;
    res.set_content(service.export_labels(), "text/csv");
  }));
}

bool serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  install_routes(server, service);
  return server.listen(host, port);
}

}  // namespace clonevet::service
