#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "clonevet/analysis.hpp"
#include "clonevet/java/source.hpp"
#include "clonevet/pair_key.hpp"

namespace clonevet {

/// The source tree a study runs against: `<root>/<folder>/<file>.java`, with
/// every method extracted. Folder names are the path of the file's parent
/// relative to the root (e.g. "selected" or "a/b"); file names are the last
/// path component.
class Corpus {
 public:
  Corpus();
  ~Corpus();
  Corpus(Corpus&&) noexcept;
  Corpus& operator=(Corpus&&) noexcept;

  /// Walks `root` for *.java files and extracts methods, using up to `jobs`
  /// threads. Files that fail to lex or parse contribute no methods and a
  /// diagnostic.
  /// Throws Error(FileNotFound) if `root` is not a readable directory.
  static Corpus ingest(const std::filesystem::path& root, int jobs = 1);

  /// Builds a corpus from in-memory files (tests, service uploads).
  static Corpus from_files(std::vector<java::SourceFile> files);

  /// Reopens a corpus from an index written by save_index. Files whose
  /// content digest changed since indexing are re-extracted.
  static Corpus load_index(const std::filesystem::path& index_path,
                           const std::filesystem::path& root);

  /// Writes the method index as JSON.
  void save_index(const std::filesystem::path& index_path) const;
  std::string index_json() const;

  static std::filesystem::path default_index_path(const std::filesystem::path& root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::size_t file_count() const noexcept { return files_.size(); }
  std::size_t method_count() const noexcept;
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

  /// The method a (folder, file, start, end) reference denotes, per the span
  /// match rule. Throws Error(FileNotFound) or Error(NoMatchingMethod).
  const java::MethodRecord& locate_method(const MethodLocation& where) const;

  /// locate_method followed by analysis; analyses are cached and the cache
  /// is safe to use from several threads.
  std::shared_ptr<const AnalyzedMethod> locate_analyzed(const MethodLocation& where) const;
  std::shared_ptr<const AnalyzedMethod> analyzed(const java::MethodRecord& record) const;

  /// All methods, ordered by (folder, file, start_line).
  std::vector<const java::MethodRecord*> all_methods() const;

 private:
  struct FileEntry {
    std::shared_ptr<const java::SourceFile> file;
    std::string digest;
    std::vector<java::MethodRecord> methods;
  };
  struct Cache;

  void add_file(java::SourceFile file);
  void add_entry(FileEntry entry);

  std::filesystem::path root_;
  // Keyed by (folder, file).
  std::map<std::pair<std::string, std::string>, FileEntry> files_;
  std::vector<std::string> diagnostics_;
  std::unique_ptr<Cache> cache_;
};

}  // namespace clonevet
