#include "clonevet/service.hpp"

#include <openssl/rand.h>

#include <algorithm>
#include <cstdio>

#include "clonevet/csv.hpp"
#include "clonevet/error.hpp"

namespace clonevet::service {

using nlohmann::json;

const char* to_string(ExperimentState s) noexcept {
  switch (s) {
    case ExperimentState::Created: return "created";
    case ExperimentState::Sampling: return "sampling";
    case ExperimentState::Judging: return "judging";
    case ExperimentState::Complete: return "complete";
  }
  return "?";
}

std::size_t Experiment::manual_count() const {
  return static_cast<std::size_t>(std::count_if(sample.begin(), sample.end(), [](const SampledPair& p) {
    return p.outcome.status == pipeline::ResolutionStatus::Manual;
  }));
}

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Unauthorized: return 401;
    case ErrorCode::UnknownTool:
    case ErrorCode::UnknownExperiment:
    case ErrorCode::TaskNotFound:
    case ErrorCode::UnknownJudge: return 404;
    case ErrorCode::DuplicateTool:
    case ErrorCode::ExperimentComplete:
    case ErrorCode::NotComplete: return 409;
    case ErrorCode::EmptyAfterFilter:
    case ErrorCode::UnregisteredUser: return 422;
    case ErrorCode::StorageError: return 500;
    default: return 400;
  }
}

// ---------------------------------------------------------------------------
// Document encoding

namespace {

json loc_json(const MethodLocation& m) {
  return {{"folder", m.folder}, {"file", m.file}, {"start_line", m.start_line}, {"end_line", m.end_line}};
}

MethodLocation loc_from(const json& j) {
  return {j.at("folder").get<std::string>(), j.at("file").get<std::string>(),
          j.at("start_line").get<int>(), j.at("end_line").get<int>()};
}

json key_json(const PairKey& k) { return json::array({loc_json(k.first()), loc_json(k.second())}); }
PairKey key_from(const json& j) { return PairKey(loc_from(j.at(0)), loc_from(j.at(1))); }

json outcome_json(const pipeline::ResolutionOutcome& o) {
  json j{{"status", pipeline::to_string(o.status)},
         {"clone_type", o.clone_type ? json(to_string(*o.clone_type)) : json(nullptr)},
         {"provenance", pipeline::to_string(o.provenance)},
         {"reason", o.reason}};
  if (o.action_similarity) j["action_similarity"] = o.action_similarity->to_string();
  if (o.probability) j["probability"] = *o.probability;
  return j;
}

pipeline::ResolutionOutcome outcome_from(const json& j) {
  pipeline::ResolutionOutcome o;
  o.status = pipeline::parse_status(j.at("status").get<std::string>()).value();
  if (!j.at("clone_type").is_null()) o.clone_type = parse_clone_type(j["clone_type"].get<std::string>());
  o.provenance = pipeline::parse_provenance(j.at("provenance").get<std::string>()).value();
  o.reason = j.at("reason").get<std::string>();
  if (j.contains("action_similarity")) o.action_similarity = Rational::parse(j["action_similarity"].get<std::string>());
  if (j.contains("probability")) o.probability = j["probability"].get<double>();
  return o;
}

json config_json(const study::StudyConfig& c) {
  return {{"min_tokens", c.pipeline.min_tokens},
          {"theta_t3", c.pipeline.theta_t3.to_string()},
          {"classifier_cutoff", c.pipeline.classifier_cutoff},
          {"trust_similarity_floor", c.pipeline.trust_similarity_floor.to_string()},
          {"confidence", c.confidence.to_string()},
          {"margin", c.margin.to_string()},
          {"sample_target", c.sample_target},
          {"seed", c.seed}};
}

study::StudyConfig config_from(const json& j) {
  study::StudyConfig c;
  c.pipeline.min_tokens = j.at("min_tokens").get<int>();
  c.pipeline.theta_t3 = Rational::parse(j.at("theta_t3").get<std::string>());
  c.pipeline.classifier_cutoff = j.at("classifier_cutoff").get<double>();
  c.pipeline.trust_similarity_floor = Rational::parse(j.at("trust_similarity_floor").get<std::string>());
  c.confidence = Rational::parse(j.at("confidence").get<std::string>());
  c.margin = Rational::parse(j.at("margin").get<std::string>());
  c.sample_target = j.at("sample_target").get<std::int64_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json plan_json(const stats::SamplePlan& p) {
  return {{"confidence", p.confidence.to_string()},
          {"margin", p.margin.to_string()},
          {"population", p.population ? json(*p.population) : json(nullptr)},
          {"required_n", p.required_n},
          {"sample_target", p.sample_target},
          {"seed", p.seed},
          {"drawn", p.drawn},
          {"shortfall", p.shortfall}};
}

stats::SamplePlan plan_from(const json& j) {
  stats::SamplePlan p;
  p.confidence = Rational::parse(j.at("confidence").get<std::string>());
  p.margin = Rational::parse(j.at("margin").get<std::string>());
  if (!j.at("population").is_null()) p.population = j["population"].get<std::int64_t>();
  p.required_n = j.at("required_n").get<std::int64_t>();
  p.sample_target = j.at("sample_target").get<std::int64_t>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.drawn = j.at("drawn").get<std::int64_t>();
  p.shortfall = j.at("shortfall").get<std::int64_t>();
  return p;
}

json view_json(const MethodView& v) { return {{"location", loc_json(v.location)}, {"source", v.source}}; }
MethodView view_from(const json& j) { return {loc_from(j.at("location")), j.at("source").get<std::string>()}; }

json experiment_doc(const Experiment& e) {
  json sample = json::array();
  for (const SampledPair& p : e.sample) {
    json s{{"key", key_json(p.key)}, {"outcome", outcome_json(p.outcome)}};
    if (p.left) s["left"] = view_json(*p.left);
    if (p.right) s["right"] = view_json(*p.right);
    sample.push_back(std::move(s));
  }
  json j{{"id", e.id},
         {"tool_id", e.tool_id},
         {"name", e.name},
         {"owner", e.owner},
         {"uploaded_pair_count", e.uploaded_pair_count},
         {"filtered_pair_count", e.filtered_pair_count},
         {"config", config_json(e.config)},
         {"plan", plan_json(e.plan)},
         {"sample", std::move(sample)},
         {"judges", e.judges},
         {"state", to_string(e.state)},
         {"kb_snapshot_id", e.kb_snapshot_id},
         {"report", e.report ? json(*e.report) : json(nullptr)}};
  return j;
}

Experiment experiment_from(const json& j) {
  Experiment e;
  e.id = j.at("id").get<std::string>();
  e.tool_id = j.at("tool_id").get<std::string>();
  e.name = j.at("name").get<std::string>();
  e.owner = j.at("owner").get<std::string>();
  e.uploaded_pair_count = j.at("uploaded_pair_count").get<std::size_t>();
  e.filtered_pair_count = j.at("filtered_pair_count").get<std::size_t>();
  e.config = config_from(j.at("config"));
  e.plan = plan_from(j.at("plan"));
  for (const json& s : j.at("sample")) {
    SampledPair p;
    p.key = key_from(s.at("key"));
    p.outcome = outcome_from(s.at("outcome"));
    if (s.contains("left")) p.left = view_from(s["left"]);
    if (s.contains("right")) p.right = view_from(s["right"]);
    e.sample.push_back(std::move(p));
  }
  e.judges = j.at("judges").get<std::set<std::string>>();
  const std::string st = j.at("state").get<std::string>();
  for (auto s : {ExperimentState::Created, ExperimentState::Sampling, ExperimentState::Judging,
                 ExperimentState::Complete}) {
    if (st == to_string(s)) e.state = s;
  }
  e.kb_snapshot_id = j.at("kb_snapshot_id").get<std::string>();
  if (!j.at("report").is_null()) e.report = j["report"].get<std::string>();
  return e;
}

json task_doc(const Task& t) {
  return {{"id", t.id},
          {"experiment_id", t.experiment_id},
          {"judge_id", t.judge_id},
          {"pair_index", t.pair_index},
          {"status", t.status == TaskStatus::Done ? "done" : "pending"},
          {"is_clone", t.is_clone ? json(*t.is_clone) : json(nullptr)},
          {"clone_type", t.clone_type ? json(to_string(*t.clone_type)) : json(nullptr)},
          {"comment", t.comment}};
}

Task task_from(const json& j) {
  Task t;
  t.id = j.at("id").get<std::string>();
  t.experiment_id = j.at("experiment_id").get<std::string>();
  t.judge_id = j.at("judge_id").get<std::string>();
  t.pair_index = j.at("pair_index").get<std::size_t>();
  t.status = j.at("status").get<std::string>() == "done" ? TaskStatus::Done : TaskStatus::Pending;
  if (!j.at("is_clone").is_null()) t.is_clone = j["is_clone"].get<bool>();
  if (!j.at("clone_type").is_null()) t.clone_type = parse_clone_type(j["clone_type"].get<std::string>());
  t.comment = j.at("comment").get<std::string>();
  return t;
}

std::string random_token() {
  unsigned char buf[24];
  if (RAND_bytes(buf, sizeof buf) != 1) throw Error(ErrorCode::StorageError, "no randomness for token");
  std::string out;
  char hex[3];
  for (unsigned char c : buf) {
    std::snprintf(hex, sizeof hex, "%02x", c);
    out += hex;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Service::Service(std::shared_ptr<knowledge::KnowledgeStore> kb, std::shared_ptr<const Corpus> corpus,
                 std::shared_ptr<const classifier::Classifier> model)
    : kb_(std::move(kb)), corpus_(std::move(corpus)), model_(std::move(model)) {
  load();
}

void Service::load() {
  std::lock_guard lock(mu_);
  for (const auto& [id, body] : kb_->list_documents("user")) {
    const json j = json::parse(body);
    User u{j.at("id"), j.at("name"), j.at("email"), j.at("token")};
    tokens_[u.token] = u.id;
    users_[u.id] = u;
  }
  for (const auto& [id, body] : kb_->list_documents("tool")) {
    const json j = json::parse(body);
    tools_[id] = Tool{j.at("id"), j.at("name"), j.at("version"), j.at("description"), j.at("owner")};
  }
  for (const auto& [id, body] : kb_->list_documents("experiment")) {
    experiments_[id] = experiment_from(json::parse(body));
  }
  for (const auto& [id, body] : kb_->list_documents("task")) tasks_[id] = task_from(json::parse(body));
  for (const auto& [id, body] : kb_->list_documents("request")) requests_[id] = body;
  if (auto c = kb_->get_document("meta", "counter")) counter_ = std::stoull(*c);
}

std::string Service::next_id(const char* prefix) {
  ++counter_;
  kb_->put_document("meta", "counter", std::to_string(counter_));
  return std::string(prefix) + "-" + std::to_string(counter_);
}

void Service::persist(const Experiment& e) { kb_->put_document("experiment", e.id, experiment_doc(e).dump()); }
void Service::persist(const Task& t) { kb_->put_document("task", t.id, task_doc(t).dump()); }

User Service::register_user(const std::string& name, const std::string& email) {
  if (name.empty()) throw Error(ErrorCode::InvalidParameter, "user name is required");
  std::lock_guard lock(mu_);
  User u;
  kb_->transaction([&] {
    u.id = next_id("user");
    u.name = name;
    u.email = email;
    u.token = random_token();
    kb_->register_judge(u.id, name);
    kb_->put_document("user", u.id,
                      json{{"id", u.id}, {"name", u.name}, {"email", u.email}, {"token", u.token}}.dump());
  });
  users_[u.id] = u;
  tokens_[u.token] = u.id;
  return u;
}

User Service::authenticate(const std::string& token) const {
  std::lock_guard lock(mu_);
  auto it = tokens_.find(token);
  if (token.empty() || it == tokens_.end()) throw Error(ErrorCode::Unauthorized, "invalid or missing token");
  return users_.at(it->second);
}

std::optional<User> Service::user(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = users_.find(id);
  if (it == users_.end()) return std::nullopt;
  return it->second;
}

Tool Service::register_tool(const std::string& owner, const std::string& name,
                            const std::string& version, const std::string& description) {
  if (name.empty()) throw Error(ErrorCode::InvalidParameter, "tool name is required");
  std::lock_guard lock(mu_);
  for (const auto& [id, t] : tools_) {
    if (t.name == name && t.version == version && t.owner == owner) {
      throw Error(ErrorCode::DuplicateTool, "tool " + name + " " + version + " already registered as " + id);
    }
  }
  Tool t;
  kb_->transaction([&] {
    t = Tool{next_id("tool"), name, version, description, owner};
    kb_->put_document("tool", t.id, tool_json(t).dump());
  });
  tools_[t.id] = t;
  return t;
}

json Service::tool_json(const Tool& t) {
  return {{"id", t.id}, {"name", t.name}, {"version", t.version}, {"description", t.description}, {"owner", t.owner}};
}

Experiment Service::create_experiment(const std::string& owner, const std::string& tool_id,
                                      const std::string& name, const std::string& csv_text,
                                      const study::StudyConfig& config) {
  config.validate();
  {
    std::lock_guard lock(mu_);
    if (!tools_.count(tool_id)) throw Error(ErrorCode::UnknownTool, "unknown tool: " + tool_id);
  }
  const auto rows = csv::parse_upload(csv_text);

  Experiment e;
  e.tool_id = tool_id;
  e.name = name;
  e.owner = owner;
  e.config = config;
  e.state = ExperimentState::Sampling;
  e.uploaded_pair_count = rows.size();
  const study::PreparedPairs prepared = study::prepare_pairs(rows, *corpus_, config.pipeline.min_tokens);
  e.filtered_pair_count = prepared.pairs.size();
  if (prepared.pairs.empty()) {
    throw Error(ErrorCode::EmptyAfterFilter,
                "no pair left after removing methods under " + std::to_string(config.pipeline.min_tokens) +
                    " tokens (" + std::to_string(rows.size()) + " uploaded)");
  }

  std::lock_guard lock(mu_);
  kb_->transaction([&] {
    e.id = next_id("exp");
    e.kb_snapshot_id = "snapshot-" + e.id;
    auto snapshot = kb_->snapshot(e.kb_snapshot_id);
    const study::StudyRun run = study::sample_and_resolve(prepared, snapshot.get(), model_.get(), config);
    e.plan = run.plan;
    for (const auto& cp : run.sample) {
      SampledPair p;
      p.key = cp.key;
      p.outcome = cp.resolution.value_or(pipeline::ResolutionOutcome{});
      if (p.outcome.status == pipeline::ResolutionStatus::Manual) {
        p.left = MethodView{cp.left->location, cp.left->record.text};
        p.right = MethodView{cp.right->location, cp.right->record.text};
      }
      e.sample.push_back(std::move(p));
    }
    e.state = ExperimentState::Judging;
    maybe_complete(e);
    persist(e);
  });
  experiments_[e.id] = e;
  return e;
}

Experiment Service::experiment(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = experiments_.find(id);
  if (it == experiments_.end()) throw Error(ErrorCode::UnknownExperiment, "unknown experiment: " + id);
  return it->second;
}

std::vector<Experiment> Service::experiments_for(const std::string& user_id) const {
  std::lock_guard lock(mu_);
  std::vector<Experiment> out;
  for (const auto& [id, e] : experiments_) {
    if (e.owner == user_id || e.judges.count(user_id)) out.push_back(e);
  }
  return out;
}

Experiment Service::invite_judges(const std::string& caller, const std::string& experiment_id,
                                  const std::vector<std::string>& user_ids) {
  std::lock_guard lock(mu_);
  auto it = experiments_.find(experiment_id);
  if (it == experiments_.end()) throw Error(ErrorCode::UnknownExperiment, "unknown experiment: " + experiment_id);
  Experiment& e = it->second;
  if (e.owner != caller) throw Error(ErrorCode::Unauthorized, "only the experiment owner can invite judges");
  if (e.state == ExperimentState::Complete) {
    throw Error(ErrorCode::ExperimentComplete, "experiment " + experiment_id + " is complete");
  }
  for (const auto& uid : user_ids) {
    if (!users_.count(uid)) throw Error(ErrorCode::UnregisteredUser, "not a registered user: " + uid);
  }
  Experiment updated = e;
  std::vector<Task> created;
  kb_->transaction([&] {
    for (const auto& uid : user_ids) {
      if (!updated.judges.insert(uid).second) continue;
      for (std::size_t i = 0; i < updated.sample.size(); ++i) {
        if (updated.sample[i].outcome.status != pipeline::ResolutionStatus::Manual) continue;
        Task t;
        t.id = next_id("task");
        t.experiment_id = updated.id;
        t.judge_id = uid;
        t.pair_index = i;
        persist(t);
        created.push_back(std::move(t));
      }
    }
    persist(updated);
  });
  for (auto& t : created) tasks_[t.id] = std::move(t);
  e = std::move(updated);
  return e;
}

std::vector<Task> Service::tasks_for(const std::string& judge_id) const {
  std::lock_guard lock(mu_);
  std::vector<Task> out;
  for (const auto& [id, t] : tasks_) {
    if (t.judge_id == judge_id) out.push_back(t);
  }
  auto rank = [&](const Task& t) {
    const Experiment& e = experiments_.at(t.experiment_id);
    return std::make_tuple(t.status == TaskStatus::Done, e.id, e.sample[t.pair_index].key);
  };
  std::sort(out.begin(), out.end(), [&](const Task& a, const Task& b) { return rank(a) < rank(b); });
  return out;
}

Task Service::task(const std::string& task_id) const {
  std::lock_guard lock(mu_);
  auto it = tasks_.find(task_id);
  if (it == tasks_.end()) throw Error(ErrorCode::TaskNotFound, "no such task: " + task_id);
  return it->second;
}

Task Service::submit_judgment(const std::string& caller, const std::string& task_id, bool is_clone,
                              std::optional<CloneType> clone_type, const std::string& comment) {
  if (clone_type == CloneType::T1) {
    throw Error(ErrorCode::IllegalCloneType, "Type I cannot be chosen when judging");
  }
  std::lock_guard lock(mu_);
  auto it = tasks_.find(task_id);
  if (it == tasks_.end()) throw Error(ErrorCode::TaskNotFound, "no such task: " + task_id);
  if (it->second.judge_id != caller) throw Error(ErrorCode::Unauthorized, "task belongs to another judge");
  Task t = it->second;
  Experiment e = experiments_.at(t.experiment_id);
  t.status = TaskStatus::Done;
  t.is_clone = is_clone;
  t.clone_type = is_clone ? clone_type : std::nullopt;
  t.comment = comment;
  kb_->transaction([&] {
    kb_->record_judgment(e.sample[t.pair_index].key, t.judge_id, is_clone, t.clone_type, comment);
    persist(t);
    tasks_[t.id] = t;
    if (e.state != ExperimentState::Complete) {
      maybe_complete(e);
      persist(e);
    }
  });
  experiments_[e.id] = e;
  return t;
}

Progress Service::progress(const std::string& experiment_id) const {
  std::lock_guard lock(mu_);
  Progress p;
  for (const auto& [id, t] : tasks_) {
    if (t.experiment_id != experiment_id) continue;
    ++p.total;
    if (t.status == TaskStatus::Done) ++p.done;
  }
  return p;
}

void Service::maybe_complete(Experiment& e) {
  // Votes per manual pair, from this experiment's tasks only.
  std::map<PairKey, std::vector<bool>> votes;
  bool any_task = false;
  for (const auto& [id, t] : tasks_) {
    if (t.experiment_id != e.id) continue;
    any_task = true;
    if (t.status != TaskStatus::Done) return;
    votes[e.sample[t.pair_index].key].push_back(*t.is_clone);
  }
  if (e.manual_count() > 0 && !any_task) return;
  std::vector<PairKey> keys;
  std::vector<pipeline::ResolutionOutcome> outcomes;
  for (const auto& p : e.sample) {
    keys.push_back(p.key);
    outcomes.push_back(p.outcome);
  }
  stats::PrecisionReport report = stats::compute_precision_report(keys, outcomes, votes);
  report.plan = e.plan;
  e.report = report.to_json();
  e.state = ExperimentState::Complete;
}

std::string Service::experiment_report(const std::string& experiment_id) const {
  const Experiment e = experiment(experiment_id);
  if (e.state != ExperimentState::Complete || !e.report) {
    const Progress p = progress(experiment_id);
    throw Error(ErrorCode::NotComplete, "experiment " + experiment_id + " is not complete: " +
                                            std::to_string(p.done) + "/" + std::to_string(p.total) +
                                            " tasks done");
  }
  return *e.report;
}

json Service::experiment_json(const Experiment& e) const {
  const Progress p = progress(e.id);
  json sample = json::array();
  for (const auto& s : e.sample) sample.push_back({{"key", key_json(s.key)}, {"outcome", outcome_json(s.outcome)}});
  return {{"id", e.id},
          {"tool_id", e.tool_id},
          {"name", e.name},
          {"owner", e.owner},
          {"state", to_string(e.state)},
          {"uploaded_pair_count", e.uploaded_pair_count},
          {"filtered_pair_count", e.filtered_pair_count},
          {"sample_size", e.sample.size()},
          {"manual_count", e.manual_count()},
          {"judges", e.judges},
          {"kb_snapshot_id", e.kb_snapshot_id},
          {"config", config_json(e.config)},
          {"plan", plan_json(e.plan)},
          {"progress", {{"done", p.done}, {"total", p.total}}},
          {"sample", std::move(sample)}};
}

json Service::task_json(const Task& t, bool with_sources) const {
  json j = task_doc(t);
  const Experiment e = experiment(t.experiment_id);
  const SampledPair& p = e.sample.at(t.pair_index);
  j["key"] = key_json(p.key);
  j["experiment_name"] = e.name;
  if (with_sources) {
    if (p.left) j["left"] = view_json(*p.left);
    if (p.right) j["right"] = view_json(*p.right);
  }
  return j;
}

std::optional<std::string> Service::replay(const std::string& request_key) const {
  std::lock_guard lock(mu_);
  auto it = requests_.find(request_key);
  if (it == requests_.end()) return std::nullopt;
  return it->second;
}

void Service::remember(const std::string& request_key, const std::string& response) {
  std::lock_guard lock(mu_);
  requests_[request_key] = response;
  kb_->put_document("request", request_key, response);
}

}  // namespace clonevet::service
