#pragma once

#include <array>
#include <string_view>

#include "clonevet/java/summary.hpp"
#include "clonevet/rational.hpp"

namespace clonevet::metrics {

/// Version of the counting rules in docs/metric-dictionary.md. Trained models
/// record it and refuse to load against a different one.
inline constexpr std::string_view kMetricDictionaryVersion = "clonevet-metrics/1";

inline constexpr std::size_t kMetricCount = 24;

/// Metric symbols in canonical feature order.
inline constexpr std::array<std::string_view, kMetricCount> kMetricNames = {
    "XMET", "VREF", "VDEC",   "NOS",    "NOPR",   "NOA",    "NEXP",   "NAND",
    "MDN",  "LOOP", "LMET",   "HVOC",   "HEFF",   "HDIF",   "EXCT",   "EXCR",
    "CREF", "COMP", "CAST",   "NBLTRL", "NCLTRL", "NSLTRL", "NNLTRL", "NNULLTRL"};

struct MetricsVector {
  int XMET = 0;   // external methods called
  int VREF = 0;   // variables referenced
  int VDEC = 0;   // variables declared
  int NOS = 0;    // statements
  int NOPR = 0;   // operators
  int NOA = 0;    // arguments
  int NEXP = 0;   // expressions
  int NAND = 0;   // operands
  int MDN = 0;    // maximum depth of nesting
  int LOOP = 0;   // loops
  int LMET = 0;   // local methods called
  int HVOC = 0;   // Halstead vocabulary
  double HEFF = 0;    // Halstead effort
  Rational HDIF;      // Halstead difficulty
  int EXCT = 0;   // exceptions thrown
  int EXCR = 0;   // exceptions referenced
  int CREF = 0;   // classes referenced
  int COMP = 0;   // cyclomatic complexity
  int CAST = 0;   // class casts
  int NBLTRL = 0;
  int NCLTRL = 0;
  int NSLTRL = 0;
  int NNLTRL = 0;
  int NNULLTRL = 0;

  /// Values in kMetricNames order.
  std::array<double, kMetricCount> values() const;

  bool operator==(const MetricsVector&) const = default;
};

MetricsVector compute_metrics(const java::MethodSummary& summary);

/// Exact equality on all 24 fields.
inline bool metrics_equal(const MetricsVector& a, const MetricsVector& b) {
  return a == b;
}

}  // namespace clonevet::metrics
