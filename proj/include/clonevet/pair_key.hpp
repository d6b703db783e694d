#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include "clonevet/rational.hpp"

namespace clonevet {

/// One side of a reported pair: where the method lives in the corpus.
struct MethodLocation {
  std::string folder;
  std::string file;
  int start_line = 0;
  int end_line = 0;

  auto operator<=>(const MethodLocation&) const = default;
  bool operator==(const MethodLocation&) const = default;
};

/// Order-insensitive identity of a pair: the two endpoints sorted
/// lexicographically by (folder, file, start_line, end_line).
class PairKey {
 public:
  PairKey() = default;
  PairKey(MethodLocation a, MethodLocation b);

  const MethodLocation& first() const noexcept { return first_; }
  const MethodLocation& second() const noexcept { return second_; }

  /// "folder,file,start,end,folder,file,start,end"
  std::string to_string() const;

  auto operator<=>(const PairKey&) const = default;
  bool operator==(const PairKey&) const = default;

 private:
  MethodLocation first_;
  MethodLocation second_;
};

enum class CloneType { T1, T2, T3, VST3, ST3, MT3, WT3_4, T4 };

const char* to_string(CloneType type) noexcept;
/// Accepts the names produced by to_string ("T1", "VST3", "WT3_4", ...) and
/// "WT3/4". Returns nullopt for anything else.
std::optional<CloneType> parse_clone_type(std::string_view text);

/// T3 and its four similarity bands.
bool is_type3_family(CloneType type) noexcept;

/// VST3 [0.9,1.0], ST3 [0.7,0.9), MT3 [0.5,0.7), WT3_4 [0,0.5).
CloneType type3_subcategory(const Rational& similarity);

}  // namespace clonevet
