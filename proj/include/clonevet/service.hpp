#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "clonevet/classifier/features.hpp"
#include "clonevet/corpus.hpp"
#include "clonevet/error.hpp"
#include "clonevet/knowledge.hpp"
#include "clonevet/pipeline.hpp"
#include "clonevet/stats.hpp"
#include "clonevet/study.hpp"

namespace clonevet::service {

struct User {
  std::string id;
  std::string name;
  std::string email;
  std::string token;
};

struct Tool {
  std::string id;
  std::string name;
  std::string version;
  std::string description;
  std::string owner;
};

enum class ExperimentState { Created, Sampling, Judging, Complete };
const char* to_string(ExperimentState s) noexcept;

struct MethodView {
  MethodLocation location;  // span of the matched method
  std::string source;
};

struct SampledPair {
  PairKey key;
  pipeline::ResolutionOutcome outcome;
  /// Present for pairs that need a human.
  std::optional<MethodView> left;
  std::optional<MethodView> right;
};

struct Experiment {
  std::string id;
  std::string tool_id;
  std::string name;
  std::string owner;
  std::size_t uploaded_pair_count = 0;
  std::size_t filtered_pair_count = 0;
  study::StudyConfig config;
  stats::SamplePlan plan;
  std::vector<SampledPair> sample;
  std::set<std::string> judges;
  ExperimentState state = ExperimentState::Created;
  std::string kb_snapshot_id;
  /// Serialized report, fixed once the experiment completes.
  std::optional<std::string> report;

  std::size_t manual_count() const;
};

enum class TaskStatus { Pending, Done };

struct Task {
  std::string id;
  std::string experiment_id;
  std::string judge_id;
  std::size_t pair_index = 0;
  TaskStatus status = TaskStatus::Pending;
  std::optional<bool> is_clone;
  std::optional<CloneType> clone_type;
  std::string comment;
};

struct Progress {
  std::size_t done = 0;
  std::size_t total = 0;
};

/// The study service. Every mutation is written through to the knowledge
/// store's document table, so a service reopened on the same store resumes
/// where it stopped. Thread-safe.
class Service {
 public:
  Service(std::shared_ptr<knowledge::KnowledgeStore> kb, std::shared_ptr<const Corpus> corpus,
          std::shared_ptr<const classifier::Classifier> model = nullptr);

  User register_user(const std::string& name, const std::string& email);
  /// Throws Error(Unauthorized).
  User authenticate(const std::string& token) const;
  std::optional<User> user(const std::string& id) const;

  /// Throws Error(DuplicateTool) for a repeated (name, version, owner).
  Tool register_tool(const std::string& owner, const std::string& name,
                     const std::string& version, const std::string& description = "");

  /// Parses the upload, filters, samples and resolves against a snapshot of
  /// the knowledge base. Completes immediately when nothing needs a human.
  /// Throws Error(UnknownTool), Error(MalformedCSV), Error(EmptyAfterFilter).
  Experiment create_experiment(const std::string& owner, const std::string& tool_id,
                               const std::string& name, const std::string& csv_text,
                               const study::StudyConfig& config);
  /// Throws Error(UnknownExperiment).
  Experiment experiment(const std::string& id) const;
  std::vector<Experiment> experiments_for(const std::string& user_id) const;

  /// Throws Error(UnknownExperiment), Error(UnregisteredUser),
  /// Error(ExperimentComplete); Error(Unauthorized) unless `caller` owns it.
  Experiment invite_judges(const std::string& caller, const std::string& experiment_id,
                           const std::vector<std::string>& user_ids);

  /// Pending and done tasks of a judge, pending first, each group in PairKey order.
  std::vector<Task> tasks_for(const std::string& judge_id) const;
  /// Throws Error(TaskNotFound).
  Task task(const std::string& task_id) const;

  /// Records (or replaces) the judge's vote in the experiment and the
  /// knowledge base; completes the experiment when its last task is done.
  /// Throws Error(TaskNotFound), Error(IllegalCloneType), Error(Unauthorized).
  Task submit_judgment(const std::string& caller, const std::string& task_id, bool is_clone,
                       std::optional<CloneType> clone_type, const std::string& comment);

  Progress progress(const std::string& experiment_id) const;
  /// Throws Error(NotComplete) with the progress in the message.
  std::string experiment_report(const std::string& experiment_id) const;

  std::string export_labels() const { return kb_->export_labels(); }

  // JSON views used by the HTTP layer.
  nlohmann::json experiment_json(const Experiment& e) const;
  nlohmann::json task_json(const Task& t, bool with_sources) const;
  static nlohmann::json tool_json(const Tool& t);

  /// Replays a stored response for an idempotent request, if any.
  std::optional<std::string> replay(const std::string& request_key) const;
  void remember(const std::string& request_key, const std::string& response);

 private:
  void load();
  void persist(const Experiment& e);
  void persist(const Task& t);
  void maybe_complete(Experiment& e);
  std::string next_id(const char* prefix);

  std::shared_ptr<knowledge::KnowledgeStore> kb_;
  std::shared_ptr<const Corpus> corpus_;
  std::shared_ptr<const classifier::Classifier> model_;

  mutable std::recursive_mutex mu_;
  std::map<std::string, User> users_;
  std::map<std::string, std::string> tokens_;  // token -> user id
  std::map<std::string, Tool> tools_;
  std::map<std::string, Experiment> experiments_;
  std::map<std::string, Task> tasks_;
  std::map<std::string, std::string> requests_;
  std::uint64_t counter_ = 0;
};

/// HTTP status for a library error code.
int http_status(ErrorCode code) noexcept;

}  // namespace clonevet::service
