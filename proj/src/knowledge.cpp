#include "clonevet/knowledge.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "clonevet/csv.hpp"
#include "clonevet/error.hpp"

namespace clonevet::knowledge {

const char* to_string(Label label) noexcept {
  return label == Label::TrueClone ? "true" : "false";
}

const char* to_string(LabelSource source) noexcept {
  return source == LabelSource::SeedImport ? "seed_import" : "community_final";
}

bool KnownLabel::trusted_at(const Rational& floor) const {
  if (source == LabelSource::CommunityFinal) return true;
  if (clone_type && is_type3_family(*clone_type)) {
    return similarity.has_value() && *similarity >= floor;
  }
  return true;
}

std::optional<KnownLabel> finalize_check(const PairKey& key, const std::vector<Vote>& ledger) {
  const int n = static_cast<int>(ledger.size());
  if (n < kFinalMinVotes) return std::nullopt;
  const int yes = static_cast<int>(
      std::count_if(ledger.begin(), ledger.end(), [](const Vote& v) { return v.is_clone; }));
  const int agree = std::max(yes, n - yes);
  const Rational ratio(agree, n);
  if (ratio < kFinalAgreement) return std::nullopt;

  KnownLabel out;
  out.key = key;
  out.label = yes >= n - yes ? Label::TrueClone : Label::FalsePositive;
  out.source = LabelSource::CommunityFinal;
  out.vote_count = n;
  out.agreement = ratio;
  if (out.label == Label::TrueClone) {
    std::map<CloneType, int> freq;
    for (const Vote& v : ledger) {
      if (v.is_clone && v.clone_type) ++freq[*v.clone_type];
    }
    int best = 0;
    bool tie = false;
    for (const auto& [type, count] : freq) {
      if (count > best) {
        best = count;
        out.clone_type = type;
        tie = false;
      } else if (count == best) {
        tie = true;
      }
    }
    if (tie) out.clone_type.reset();
  }
  return out;
}

std::optional<KnownLabel> KnowledgeSnapshot::lookup(const PairKey& key) const {
  auto it = labels_.find(key);
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// SQLite plumbing

namespace {

[[noreturn]] void storage_error(sqlite3* db, const std::string& what) {
  throw Error(ErrorCode::StorageError, what + ": " + (db ? sqlite3_errmsg(db) : "no database"));
}

class Stmt {
 public:
  Stmt(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &st_, nullptr) != SQLITE_OK) storage_error(db, "prepare");
  }
  ~Stmt() { sqlite3_finalize(st_); }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;

  Stmt& bind(int i, const std::string& s) {
    sqlite3_bind_text(st_, i, s.data(), static_cast<int>(s.size()), SQLITE_TRANSIENT);
    return *this;
  }
  Stmt& bind(int i, std::int64_t v) {
    sqlite3_bind_int64(st_, i, v);
    return *this;
  }
  Stmt& bind_null(int i) {
    sqlite3_bind_null(st_, i);
    return *this;
  }
  /// Binds the eight key columns starting at `i`.
  Stmt& bind_key(int i, const PairKey& k) {
    bind(i, k.first().folder).bind(i + 1, k.first().file);
    bind(i + 2, std::int64_t{k.first().start_line}).bind(i + 3, std::int64_t{k.first().end_line});
    bind(i + 4, k.second().folder).bind(i + 5, k.second().file);
    bind(i + 6, std::int64_t{k.second().start_line}).bind(i + 7, std::int64_t{k.second().end_line});
    return *this;
  }
  bool step() {
    const int rc = sqlite3_step(st_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    storage_error(db_, "step");
  }
  std::string text(int i) const {
    const auto* p = sqlite3_column_text(st_, i);
    return p ? std::string(reinterpret_cast<const char*>(p),
                           static_cast<std::size_t>(sqlite3_column_bytes(st_, i)))
             : std::string();
  }
  std::int64_t integer(int i) const { return sqlite3_column_int64(st_, i); }
  bool is_null(int i) const { return sqlite3_column_type(st_, i) == SQLITE_NULL; }
  PairKey key(int i) const {
    MethodLocation a{text(i), text(i + 1), static_cast<int>(integer(i + 2)),
                     static_cast<int>(integer(i + 3))};
    MethodLocation b{text(i + 4), text(i + 5), static_cast<int>(integer(i + 6)),
                     static_cast<int>(integer(i + 7))};
    return PairKey(std::move(a), std::move(b));
  }

 private:
  sqlite3* db_;
  sqlite3_stmt* st_ = nullptr;
};

constexpr const char* kKeyColumns = "f1, n1, s1, e1, f2, n2, s2, e2";
constexpr const char* kKeyWhere =
    "f1 = ?1 AND n1 = ?2 AND s1 = ?3 AND e1 = ?4 AND f2 = ?5 AND n2 = ?6 AND s2 = ?7 AND e2 = ?8";

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS seed_labels (
  f1 TEXT, n1 TEXT, s1 INTEGER, e1 INTEGER, f2 TEXT, n2 TEXT, s2 INTEGER, e2 INTEGER,
  label INTEGER NOT NULL, clone_type TEXT, sim_num INTEGER, sim_den INTEGER,
  PRIMARY KEY (f1, n1, s1, e1, f2, n2, s2, e2));
CREATE TABLE IF NOT EXISTS judges (
  judge_id TEXT PRIMARY KEY, name TEXT);
CREATE TABLE IF NOT EXISTS votes (
  f1 TEXT, n1 TEXT, s1 INTEGER, e1 INTEGER, f2 TEXT, n2 TEXT, s2 INTEGER, e2 INTEGER,
  judge_id TEXT NOT NULL REFERENCES judges(judge_id),
  is_clone INTEGER NOT NULL, clone_type TEXT, comment TEXT, ts INTEGER NOT NULL,
  PRIMARY KEY (f1, n1, s1, e1, f2, n2, s2, e2, judge_id));
CREATE TABLE IF NOT EXISTS community_labels (
  f1 TEXT, n1 TEXT, s1 INTEGER, e1 INTEGER, f2 TEXT, n2 TEXT, s2 INTEGER, e2 INTEGER,
  label INTEGER NOT NULL, clone_type TEXT, vote_count INTEGER, agree_num INTEGER, agree_den INTEGER,
  PRIMARY KEY (f1, n1, s1, e1, f2, n2, s2, e2));
CREATE TABLE IF NOT EXISTS documents (
  kind TEXT NOT NULL, id TEXT NOT NULL, body TEXT NOT NULL, PRIMARY KEY (kind, id));
)sql";

std::optional<CloneType> type_column(const Stmt& s, int i) {
  if (s.is_null(i)) return std::nullopt;
  return parse_clone_type(s.text(i));
}

void bind_type(Stmt& s, int i, const std::optional<CloneType>& t) {
  if (t) s.bind(i, std::string(to_string(*t)));
  else s.bind_null(i);
}

std::int64_t wall_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace

KnowledgeStore::KnowledgeStore(const std::string& path) : clock_(wall_clock_ms) {
  if (sqlite3_open_v2(path.c_str(), &db_,
                      SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                      nullptr) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    db_ = nullptr;
    throw Error(ErrorCode::StorageError, "cannot open " + path + ": " + msg);
  }
  sqlite3_busy_timeout(db_, 5000);
  if (path != ":memory:") exec("PRAGMA journal_mode=WAL;");
  exec("PRAGMA foreign_keys=ON;");
  exec(kSchema);
}

KnowledgeStore::~KnowledgeStore() { sqlite3_close(db_); }

void KnowledgeStore::exec(const char* sql) const {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw Error(ErrorCode::StorageError, msg);
  }
}

void KnowledgeStore::transaction(const std::function<void()>& fn) {
  std::lock_guard lock(mu_);
  if (tx_depth_ > 0) {
    // Nested calls join the outer transaction.
    fn();
    return;
  }
  exec("BEGIN IMMEDIATE;");
  ++tx_depth_;
  try {
    fn();
  } catch (...) {
    --tx_depth_;
    exec("ROLLBACK;");
    throw;
  }
  --tx_depth_;
  exec("COMMIT;");
}

std::optional<KnownLabel> KnowledgeStore::seed_label(const PairKey& key) const {
  Stmt s(db_, (std::string("SELECT label, clone_type, sim_num, sim_den FROM seed_labels WHERE ") +
               kKeyWhere).c_str());
  s.bind_key(1, key);
  if (!s.step()) return std::nullopt;
  KnownLabel out;
  out.key = key;
  out.label = s.integer(0) ? Label::TrueClone : Label::FalsePositive;
  out.clone_type = type_column(s, 1);
  if (!s.is_null(2)) out.similarity = Rational(s.integer(2), s.integer(3));
  out.source = LabelSource::SeedImport;
  out.trusted = out.trusted_at(kDefaultTrustFloor);
  return out;
}

std::optional<KnownLabel> KnowledgeStore::community_label(const PairKey& key) const {
  Stmt s(db_, (std::string("SELECT label, clone_type, vote_count, agree_num, agree_den "
                           "FROM community_labels WHERE ") + kKeyWhere).c_str());
  s.bind_key(1, key);
  if (!s.step()) return std::nullopt;
  KnownLabel out;
  out.key = key;
  out.label = s.integer(0) ? Label::TrueClone : Label::FalsePositive;
  out.clone_type = type_column(s, 1);
  out.source = LabelSource::CommunityFinal;
  out.vote_count = static_cast<int>(s.integer(2));
  out.agreement = Rational(s.integer(3), s.integer(4));
  out.trusted = true;
  return out;
}

std::optional<KnownLabel> KnowledgeStore::lookup(const PairKey& key) const {
  std::lock_guard lock(mu_);
  if (auto c = community_label(key)) return c;
  return seed_label(key);
}

void KnowledgeStore::register_judge(const std::string& judge_id, const std::string& name) {
  std::lock_guard lock(mu_);
  Stmt s(db_, "INSERT INTO judges (judge_id, name) VALUES (?1, ?2) "
              "ON CONFLICT(judge_id) DO UPDATE SET name = excluded.name");
  s.bind(1, judge_id).bind(2, name);
  s.step();
}

bool KnowledgeStore::has_judge(const std::string& judge_id) const {
  std::lock_guard lock(mu_);
  Stmt s(db_, "SELECT 1 FROM judges WHERE judge_id = ?1");
  s.bind(1, judge_id);
  return s.step();
}

std::vector<Vote> KnowledgeStore::ledger(const PairKey& key) const {
  std::lock_guard lock(mu_);
  Stmt s(db_, (std::string("SELECT judge_id, is_clone, clone_type, comment, ts FROM votes WHERE ") +
               kKeyWhere + " ORDER BY judge_id").c_str());
  s.bind_key(1, key);
  std::vector<Vote> out;
  while (s.step()) {
    Vote v;
    v.judge_id = s.text(0);
    v.is_clone = s.integer(1) != 0;
    v.clone_type = type_column(s, 2);
    v.comment = s.text(3);
    v.timestamp = s.integer(4);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Vote> KnowledgeStore::record_judgment(const PairKey& key, const std::string& judge_id,
                                                  bool is_clone,
                                                  std::optional<CloneType> clone_type,
                                                  const std::string& comment) {
  if (clone_type == CloneType::T1) {
    throw Error(ErrorCode::IllegalCloneType, "Type I is not a judgeable clone type");
  }
  std::lock_guard lock(mu_);
  if (!has_judge(judge_id)) throw Error(ErrorCode::UnknownJudge, "unknown judge: " + judge_id);
  std::vector<Vote> result;
  transaction([&] {
    {
      Stmt s(db_, (std::string("INSERT OR REPLACE INTO votes (") + kKeyColumns +
                   ", judge_id, is_clone, clone_type, comment, ts) "
                   "VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11, ?12, ?13)").c_str());
      s.bind_key(1, key).bind(9, judge_id).bind(10, std::int64_t{is_clone});
      bind_type(s, 11, clone_type);
      s.bind(12, comment).bind(13, clock_());
      s.step();
    }
    result = ledger(key);
    {
      Stmt del(db_, (std::string("DELETE FROM community_labels WHERE ") + kKeyWhere).c_str());
      del.bind_key(1, key);
      del.step();
    }
    if (auto fin = finalize_check(key, result)) {
      Stmt s(db_, (std::string("INSERT INTO community_labels (") + kKeyColumns +
                   ", label, clone_type, vote_count, agree_num, agree_den) "
                   "VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11, ?12, ?13)").c_str());
      s.bind_key(1, key).bind(9, std::int64_t{fin->label == Label::TrueClone});
      bind_type(s, 10, fin->clone_type);
      s.bind(11, std::int64_t{fin->vote_count})
          .bind(12, fin->agreement.num())
          .bind(13, fin->agreement.den());
      s.step();
    }
  });
  return result;
}

bool KnowledgeStore::put_seed(const KnownLabel& label) {
  std::lock_guard lock(mu_);
  if (auto existing = seed_label(label.key)) {
    // Keep the higher-similarity row; a row with a similarity beats one
    // without, and among equals the earlier row stays.
    const bool replace = label.similarity &&
                         (!existing->similarity || *label.similarity > *existing->similarity);
    if (!replace) return false;
  }
  Stmt s(db_, (std::string("INSERT OR REPLACE INTO seed_labels (") + kKeyColumns +
               ", label, clone_type, sim_num, sim_den) "
               "VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11, ?12)").c_str());
  s.bind_key(1, label.key).bind(9, std::int64_t{label.label == Label::TrueClone});
  bind_type(s, 10, label.clone_type);
  if (label.similarity) {
    s.bind(11, label.similarity->num()).bind(12, label.similarity->den());
  } else {
    s.bind_null(11).bind_null(12);
  }
  s.step();
  return true;
}

SeedImportResult KnowledgeStore::import_seed_text(std::string_view csv_text) {
  SeedImportResult result;
  std::vector<csv::Row> rows;
  try {
    rows = csv::read_rows(csv_text);
  } catch (const Error& e) {
    result.malformed = 1;
    result.errors.push_back(e.what());
    return result;
  }
  auto reject = [&](const csv::Row& row, const std::string& why) {
    ++result.malformed;
    result.errors.push_back("line " + std::to_string(row.line) + ": " + why);
  };
  transaction([&] {
    bool first = true;
    for (const csv::Row& row : rows) {
      if (first) {
        first = false;
        if (!row.fields.empty() && row.fields[0] == "folder_1") continue;
      }
      if (row.fields.size() < 10 || row.fields.size() > 13) {
        reject(row, "expected 10 or 11 columns, found " + std::to_string(row.fields.size()));
        continue;
      }
      KnownLabel label;
      try {
        auto [a, b] = csv::parse_pair_columns(row);
        label.key = PairKey(std::move(a), std::move(b));
      } catch (const Error& e) {
        reject(row, e.what());
        continue;
      }
      const std::string& l = row.fields[8];
      if (l == "true" || l == "1") label.label = Label::TrueClone;
      else if (l == "false" || l == "0") label.label = Label::FalsePositive;
      else {
        reject(row, "label must be true or false, got '" + l + "'");
        continue;
      }
      if (!row.fields[9].empty()) {
        label.clone_type = parse_clone_type(row.fields[9]);
        if (!label.clone_type) {
          reject(row, "unknown clone type '" + row.fields[9] + "'");
          continue;
        }
      }
      if (row.fields.size() > 10 && !row.fields[10].empty()) {
        try {
          label.similarity = Rational::parse(row.fields[10]);
        } catch (const Error& e) {
          reject(row, e.what());
          continue;
        }
        if (!in_unit_interval(*label.similarity)) {
          reject(row, "similarity outside [0,1]");
          continue;
        }
      }
      if (label.clone_type && is_type3_family(*label.clone_type)) {
        if (!label.similarity) {
          reject(row, "Type III row without similarity");
          continue;
        }
        label.clone_type = type3_subcategory(*label.similarity);
      }
      label.source = LabelSource::SeedImport;
      if (put_seed(label)) ++result.imported;
    }
  });
  return result;
}

SeedImportResult KnowledgeStore::import_seed(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return import_seed_text(ss.str());
}

std::shared_ptr<const KnowledgeSnapshot> KnowledgeStore::snapshot(std::string id) const {
  std::lock_guard lock(mu_);
  std::map<PairKey, KnownLabel> labels;
  {
    Stmt s(db_, (std::string("SELECT ") + kKeyColumns +
                 ", label, clone_type, sim_num, sim_den FROM seed_labels").c_str());
    while (s.step()) {
      KnownLabel l;
      l.key = s.key(0);
      l.label = s.integer(8) ? Label::TrueClone : Label::FalsePositive;
      l.clone_type = type_column(s, 9);
      if (!s.is_null(10)) l.similarity = Rational(s.integer(10), s.integer(11));
      l.source = LabelSource::SeedImport;
      l.trusted = l.trusted_at(kDefaultTrustFloor);
      labels[l.key] = l;
    }
  }
  {
    Stmt s(db_, (std::string("SELECT ") + kKeyColumns +
                 ", label, clone_type, vote_count, agree_num, agree_den FROM community_labels")
                    .c_str());
    while (s.step()) {
      KnownLabel l;
      l.key = s.key(0);
      l.label = s.integer(8) ? Label::TrueClone : Label::FalsePositive;
      l.clone_type = type_column(s, 9);
      l.source = LabelSource::CommunityFinal;
      l.vote_count = static_cast<int>(s.integer(10));
      l.agreement = Rational(s.integer(11), s.integer(12));
      labels[l.key] = l;  // community wins over seed
    }
  }
  return std::make_shared<const KnowledgeSnapshot>(std::move(id), std::move(labels));
}

std::string KnowledgeStore::export_labels() const {
  auto snap = snapshot();
  std::string out =
      "folder_1,file_1,start_1,end_1,folder_2,file_2,start_2,end_2,"
      "label,clone_type,similarity,vote_count,agreement\n";
  for (const auto& [key, l] : snap->labels()) {
    out += csv::pair_columns(key);
    out += ',';
    out += to_string(l.label);
    out += ',';
    if (l.clone_type) out += to_string(*l.clone_type);
    out += ',';
    if (l.similarity) out += l.similarity->to_string();
    out += ',';
    if (l.source == LabelSource::CommunityFinal) {
      out += std::to_string(l.vote_count) + "," + l.agreement.to_string();
    } else {
      out += ',';
    }
    out += '\n';
  }
  return out;
}

void KnowledgeStore::put_document(const std::string& kind, const std::string& id,
                                  const std::string& body) {
  std::lock_guard lock(mu_);
  Stmt s(db_, "INSERT OR REPLACE INTO documents (kind, id, body) VALUES (?1, ?2, ?3)");
  s.bind(1, kind).bind(2, id).bind(3, body);
  s.step();
}

std::optional<std::string> KnowledgeStore::get_document(const std::string& kind,
                                                        const std::string& id) const {
  std::lock_guard lock(mu_);
  Stmt s(db_, "SELECT body FROM documents WHERE kind = ?1 AND id = ?2");
  s.bind(1, kind).bind(2, id);
  if (!s.step()) return std::nullopt;
  return s.text(0);
}

std::vector<std::pair<std::string, std::string>> KnowledgeStore::list_documents(
    const std::string& kind) const {
  std::lock_guard lock(mu_);
  Stmt s(db_, "SELECT id, body FROM documents WHERE kind = ?1 ORDER BY id");
  s.bind(1, kind);
  std::vector<std::pair<std::string, std::string>> out;
  while (s.step()) out.emplace_back(s.text(0), s.text(1));
  return out;
}

}  // namespace clonevet::knowledge
