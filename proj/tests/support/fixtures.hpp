#pragma once

// Corpora with known ground truth, shared by the unit suites and the
// acceptance binary.

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "clonevet/java/source.hpp"
#include "clonevet/pair_key.hpp"

namespace clonevet::testkit {

/// Families of one base method, two statement-added variants and a decoy.
/// The decoy keeps the base's calls but carry a block of extra arithmetic, so
/// it passes the Action Filter without being clones. Callee names carry a
/// family suffix, so pairs across families share no Action tokens.
struct FamilyFixture {
  std::vector<java::SourceFile> files;
  /// Two detectors that both report every base/variant pair plus their own
  /// noise pairs across families.
  std::vector<std::vector<PairKey>> tools;
  /// A third detector that also reports the decoy/base pair of every other family.
  std::vector<std::vector<PairKey>> unions;
  std::set<PairKey> clone_pairs;
  std::set<PairKey> decoy_pairs;
};
FamilyFixture make_family_fixture(std::uint64_t seed, int families);

/// A corpus of 30 methods on disk with a 20-pair detector CSV, a seed label
/// file and a labels file. By construction 3 pairs are Type I, 3 are Type II,
/// 2 are settled by the seed labels (one true, one false) and 12 need
/// verdicts, of which 9 are clones by majority.
struct DeskStudy {
  std::filesystem::path corpus;
  std::filesystem::path detector_csv;
  std::filesystem::path seed_csv;
  std::filesystem::path labels_csv;
  /// labels_csv without its last row.
  std::filesystem::path partial_labels_csv;
  int sample = 20;
  int auto_t1 = 3;
  int auto_t2 = 3;
  int known = 2;
  int manual = 12;
  int tp = 16;
  int fp = 4;
};
DeskStudy make_desk_study(const std::filesystem::path& dir, std::uint64_t seed = 1);

/// CSV line for a pair: eight key columns.
std::string key_columns(const PairKey& key);

/// Fresh, empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

}  // namespace clonevet::testkit
