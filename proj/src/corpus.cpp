#include "clonevet/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "clonevet/digest.hpp"
#include "clonevet/error.hpp"

namespace clonevet {

namespace fs = std::filesystem;
using nlohmann::json;

struct Corpus::Cache {
  std::mutex mu;
  std::map<MethodLocation, std::shared_ptr<const AnalyzedMethod>> entries;
};

Corpus::Corpus() : cache_(std::make_unique<Cache>()) {}
Corpus::~Corpus() = default;
Corpus::Corpus(Corpus&&) noexcept = default;
Corpus& Corpus::operator=(Corpus&&) noexcept = default;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string folder_of(const fs::path& root, const fs::path& file) {
  fs::path rel = fs::relative(file.parent_path(), root);
  std::string s = rel.generic_string();
  return s == "." ? std::string() : s;
}

}  // namespace

fs::path Corpus::default_index_path(const fs::path& root) {
  return root / ".clonevet" / "index.json";
}

std::size_t Corpus::method_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [k, e] : files_) n += e.methods.size();
  return n;
}

void Corpus::add_entry(FileEntry entry) {
  auto key = std::make_pair(entry.file->folder_name, entry.file->file_name);
  files_[key] = std::move(entry);
}

void Corpus::add_file(java::SourceFile file) {
  FileEntry e;
  e.digest = sha256_hex(file.content);
  auto shared = std::make_shared<const java::SourceFile>(std::move(file));
  e.file = shared;
  std::vector<std::string> diags;
  try {
    e.methods = java::extract_methods(shared, &diags);
  } catch (const std::exception& ex) {
    diagnostics_.push_back(shared->folder_name + "/" + shared->file_name +
                           ": skipped: " + ex.what());
  }
  for (auto& d : diags) {
    diagnostics_.push_back(shared->folder_name + "/" + shared->file_name + ": " + d);
  }
  add_entry(std::move(e));
}

Corpus Corpus::from_files(std::vector<java::SourceFile> files) {
  Corpus c;
  for (auto& f : files) c.add_file(std::move(f));
  return c;
}

Corpus Corpus::ingest(const fs::path& root, int jobs) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::FileNotFound, "corpus root is not a directory: " + root.string());
  }
  std::vector<fs::path> paths;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw Error(ErrorCode::FileNotFound, "cannot read " + root.string() + ": " + ec.message());
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    if (it->is_directory() && it->path().filename() == ".clonevet") {
      it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file() && it->path().extension() == ".java") paths.push_back(it->path());
  }
  std::sort(paths.begin(), paths.end());

  struct Slot {
    FileEntry entry;
    std::vector<std::string> diags;
  };
  std::vector<Slot> slots(paths.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < paths.size();) {
      Slot& s = slots[i];
      java::SourceFile f;
      f.corpus_root = root;
      f.folder_name = folder_of(root, paths[i]);
      f.file_name = paths[i].filename().string();
      const std::string label = f.folder_name + "/" + f.file_name;
      try {
        f.content = read_file(paths[i]);
      } catch (const std::exception& ex) {
        s.diags.push_back(label + ": skipped: " + ex.what());
        continue;
      }
      s.entry.digest = sha256_hex(f.content);
      auto shared = std::make_shared<const java::SourceFile>(std::move(f));
      s.entry.file = shared;
      std::vector<std::string> d;
      try {
        s.entry.methods = java::extract_methods(shared, &d);
      } catch (const std::exception& ex) {
        s.diags.push_back(label + ": skipped: " + ex.what());
      }
      for (auto& x : d) s.diags.push_back(label + ": " + x);
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(paths.size())));
  std::vector<std::thread> threads;
  for (int t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  Corpus c;
  c.root_ = root;
  for (auto& s : slots) {
    for (auto& d : s.diags) c.diagnostics_.push_back(std::move(d));
    if (s.entry.file) c.add_entry(std::move(s.entry));
  }
  return c;
}

std::string Corpus::index_json() const {
  json files = json::array();
  for (const auto& [key, e] : files_) {
    json methods = json::array();
    for (const auto& m : e.methods) {
      methods.push_back({{"start_line", m.start_line},
                         {"end_line", m.end_line},
                         {"tokens", m.language_token_count}});
    }
    files.push_back({{"folder", key.first},
                     {"file", key.second},
                     {"sha256", e.digest},
                     {"methods", std::move(methods)}});
  }
  json doc = {{"format", "clonevet-index"},
              {"version", 1},
              {"method_count", method_count()},
              {"files", std::move(files)},
              {"diagnostics", diagnostics_}};
  return doc.dump(2) + "\n";
}

void Corpus::save_index(const fs::path& index_path) const {
  std::error_code ec;
  if (index_path.has_parent_path()) fs::create_directories(index_path.parent_path(), ec);
  std::ofstream out(index_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::StorageError, "cannot write " + index_path.string());
  out << index_json();
}

Corpus Corpus::load_index(const fs::path& index_path, const fs::path& root) {
  json doc;
  try {
    doc = json::parse(read_file(index_path));
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::StorageError, "corrupt index " + index_path.string() + ": " + ex.what());
  }
  if (doc.value("format", "") != "clonevet-index") {
    throw Error(ErrorCode::StorageError, "not a corpus index: " + index_path.string());
  }
  Corpus c;
  c.root_ = root;
  for (const auto& jf : doc.at("files")) {
    java::SourceFile f;
    f.corpus_root = root;
    f.folder_name = jf.at("folder").get<std::string>();
    f.file_name = jf.at("file").get<std::string>();
    const fs::path p = f.folder_name.empty() ? root / f.file_name
                                             : root / f.folder_name / f.file_name;
    try {
      f.content = read_file(p);
    } catch (const Error&) {
      c.diagnostics_.push_back(f.folder_name + "/" + f.file_name + ": missing since indexing");
      continue;
    }
    // Indexed spans are only a cache of extraction; re-extracting keeps the
    // records (and their text) authoritative. Changed files get a note.
    if (sha256_hex(f.content) != jf.at("sha256").get<std::string>()) {
      c.diagnostics_.push_back(f.folder_name + "/" + f.file_name + ": changed since indexing");
    }
    c.add_file(std::move(f));
  }
  return c;
}

const java::MethodRecord& Corpus::locate_method(const MethodLocation& where) const {
  auto it = files_.find({where.folder, where.file});
  if (it == files_.end()) {
    throw Error(ErrorCode::FileNotFound, "no such file in corpus: " + where.folder + "/" + where.file);
  }
  const auto& methods = it->second.methods;
  const java::MethodRecord* m =
      java::best_span_match(std::span<const java::MethodRecord>(methods.data(), methods.size()),
                            where.start_line, where.end_line);
  if (m == nullptr) {
    throw Error(ErrorCode::NoMatchingMethod,
                "no method matches " + where.folder + "/" + where.file + ":" +
                    std::to_string(where.start_line) + "-" + std::to_string(where.end_line));
  }
  return *m;
}

std::shared_ptr<const AnalyzedMethod> Corpus::analyzed(const java::MethodRecord& record) const {
  const MethodLocation key = location_of(record);
  {
    std::lock_guard lock(cache_->mu);
    if (auto it = cache_->entries.find(key); it != cache_->entries.end()) return it->second;
  }
  auto a = AnalyzedMethod::make_shared(record);
  std::lock_guard lock(cache_->mu);
  return cache_->entries.emplace(key, std::move(a)).first->second;
}

std::shared_ptr<const AnalyzedMethod> Corpus::locate_analyzed(const MethodLocation& where) const {
  return analyzed(locate_method(where));
}

std::vector<const java::MethodRecord*> Corpus::all_methods() const {
  std::vector<const java::MethodRecord*> out;
  for (const auto& [k, e] : files_) {
    for (const auto& m : e.methods) out.push_back(&m);
  }
  return out;
}

}  // namespace clonevet
