#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clonevet/pair_key.hpp"
#include "clonevet/rational.hpp"

struct sqlite3;

namespace clonevet::knowledge {

enum class Label { TrueClone, FalsePositive };
enum class LabelSource { SeedImport, CommunityFinal };

const char* to_string(Label label) noexcept;
const char* to_string(LabelSource source) noexcept;

/// Unique votes needed before a community label is final.
inline constexpr int kFinalMinVotes = 10;
/// Share of votes that must agree before a community label is final.
inline const Rational kFinalAgreement{7, 10};
/// Imported Type III labels below this similarity are not trusted.
inline const Rational kDefaultTrustFloor{7, 10};

struct KnownLabel {
  PairKey key;
  Label label = Label::TrueClone;
  std::optional<CloneType> clone_type;
  /// Only imported Type III labels carry one.
  std::optional<Rational> similarity;
  LabelSource source = LabelSource::SeedImport;
  int vote_count = 0;
  Rational agreement;
  /// trusted_at(kDefaultTrustFloor), filled in by lookups.
  bool trusted = true;

  /// Community labels are always trusted; imported Type III labels only when
  /// their similarity is at least `floor`.
  bool trusted_at(const Rational& floor) const;

  bool operator==(const KnownLabel&) const = default;
};

struct Vote {
  std::string judge_id;
  bool is_clone = false;
  std::optional<CloneType> clone_type;
  std::string comment;
  std::int64_t timestamp = 0;  // ms since epoch

  bool operator==(const Vote&) const = default;
};

/// Final label for a ledger, or nothing: at least kFinalMinVotes votes with
/// the larger side holding at least kFinalAgreement of them. clone_type is
/// the most frequent type among the agreeing clone votes (unset on a tie).
std::optional<KnownLabel> finalize_check(const PairKey& key, const std::vector<Vote>& ledger);

/// Read access used by the pipeline.
class KnowledgeView {
 public:
  virtual ~KnowledgeView() = default;
  /// Final labels only; community labels take precedence over seed labels.
  virtual std::optional<KnownLabel> lookup(const PairKey& key) const = 0;
};

/// Immutable copy of every final label at one point in time.
class KnowledgeSnapshot final : public KnowledgeView {
 public:
  KnowledgeSnapshot() = default;
  KnowledgeSnapshot(std::string id, std::map<PairKey, KnownLabel> labels)
      : id_(std::move(id)), labels_(std::move(labels)) {}

  std::optional<KnownLabel> lookup(const PairKey& key) const override;
  const std::string& id() const noexcept { return id_; }
  std::size_t size() const noexcept { return labels_.size(); }
  const std::map<PairKey, KnownLabel>& labels() const noexcept { return labels_; }

 private:
  std::string id_;
  std::map<PairKey, KnownLabel> labels_;
};

struct SeedImportResult {
  int imported = 0;
  int malformed = 0;
  /// "line N: reason" per skipped row.
  std::vector<std::string> errors;
};

/// Seed labels, judges, votes and community labels in one SQLite database
/// (write-ahead log). All access is serialized; use ":memory:" for a
/// throwaway store.
class KnowledgeStore final : public KnowledgeView {
 public:
  explicit KnowledgeStore(const std::string& path = ":memory:");
  ~KnowledgeStore() override;
  KnowledgeStore(const KnowledgeStore&) = delete;
  KnowledgeStore& operator=(const KnowledgeStore&) = delete;

  std::optional<KnownLabel> lookup(const PairKey& key) const override;

  void register_judge(const std::string& judge_id, const std::string& name = "");
  bool has_judge(const std::string& judge_id) const;

  /// Upserts the judge's vote and re-evaluates finality. Returns the ledger.
  /// Throws Error(UnknownJudge), Error(IllegalCloneType) for T1.
  std::vector<Vote> record_judgment(const PairKey& key, const std::string& judge_id,
                                    bool is_clone,
                                    std::optional<CloneType> clone_type = std::nullopt,
                                    const std::string& comment = "");
  std::vector<Vote> ledger(const PairKey& key) const;

  /// Seed CSV (see docs/metric-dictionary.md for the column list).
  SeedImportResult import_seed_text(std::string_view csv_text);
  SeedImportResult import_seed(const std::filesystem::path& path);
  /// Adds one seed label, keeping the higher-similarity row on duplicates.
  /// Returns false when an existing row was kept.
  bool put_seed(const KnownLabel& label);

  /// Every final label, seed format plus vote_count and agreement.
  std::string export_labels() const;

  std::shared_ptr<const KnowledgeSnapshot> snapshot(std::string id = "") const;

  /// Generic JSON documents for callers that keep their own state here.
  void put_document(const std::string& kind, const std::string& id, const std::string& body);
  std::optional<std::string> get_document(const std::string& kind, const std::string& id) const;
  std::vector<std::pair<std::string, std::string>> list_documents(const std::string& kind) const;

  /// Runs `fn` inside one transaction, holding the writer lock.
  void transaction(const std::function<void()>& fn);

  /// Overrides the vote clock (tests).
  void set_clock(std::function<std::int64_t()> clock) { clock_ = std::move(clock); }

 private:
  std::optional<KnownLabel> seed_label(const PairKey& key) const;
  std::optional<KnownLabel> community_label(const PairKey& key) const;
  void exec(const char* sql) const;

  sqlite3* db_ = nullptr;
  mutable std::recursive_mutex mu_;
  int tx_depth_ = 0;
  std::function<std::int64_t()> clock_;
};

}  // namespace clonevet::knowledge
