#include "clonevet/pair_key.hpp"

#include <utility>

namespace clonevet {

PairKey::PairKey(MethodLocation a, MethodLocation b) {
  if (b < a) std::swap(a, b);
  first_ = std::move(a);
  second_ = std::move(b);
}

std::string PairKey::to_string() const {
  auto side = [](const MethodLocation& m) {
    return m.folder + "," + m.file + "," + std::to_string(m.start_line) + "," +
           std::to_string(m.end_line);
  };
  return side(first_) + "," + side(second_);
}

const char* to_string(CloneType type) noexcept {
  switch (type) {
    case CloneType::T1: return "T1";
    case CloneType::T2: return "T2";
    case CloneType::T3: return "T3";
    case CloneType::VST3: return "VST3";
    case CloneType::ST3: return "ST3";
    case CloneType::MT3: return "MT3";
    case CloneType::WT3_4: return "WT3_4";
    case CloneType::T4: return "T4";
  }
  return "?";
}

std::optional<CloneType> parse_clone_type(std::string_view text) {
  if (text == "T1") return CloneType::T1;
  if (text == "T2") return CloneType::T2;
  if (text == "T3") return CloneType::T3;
  if (text == "VST3") return CloneType::VST3;
  if (text == "ST3") return CloneType::ST3;
  if (text == "MT3") return CloneType::MT3;
  if (text == "WT3_4" || text == "WT3/4") return CloneType::WT3_4;
  if (text == "T4") return CloneType::T4;
  return std::nullopt;
}

bool is_type3_family(CloneType type) noexcept {
  return type == CloneType::T3 || type == CloneType::VST3 ||
         type == CloneType::ST3 || type == CloneType::MT3 ||
         type == CloneType::WT3_4;
}

CloneType type3_subcategory(const Rational& similarity) {
  if (similarity >= Rational(9, 10)) return CloneType::VST3;
  if (similarity >= Rational(7, 10)) return CloneType::ST3;
  if (similarity >= Rational(5, 10)) return CloneType::MT3;
  return CloneType::WT3_4;
}

}  // namespace clonevet
