#include "clonevet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace clonevet::metrics {

using java::StatementKind;

std::array<double, kMetricCount> MetricsVector::values() const {
  return {static_cast<double>(XMET),   static_cast<double>(VREF),
          static_cast<double>(VDEC),   static_cast<double>(NOS),
          static_cast<double>(NOPR),   static_cast<double>(NOA),
          static_cast<double>(NEXP),   static_cast<double>(NAND),
          static_cast<double>(MDN),    static_cast<double>(LOOP),
          static_cast<double>(LMET),   static_cast<double>(HVOC),
          HEFF,                        HDIF.to_double(),
          static_cast<double>(EXCT),   static_cast<double>(EXCR),
          static_cast<double>(CREF),   static_cast<double>(COMP),
          static_cast<double>(CAST),   static_cast<double>(NBLTRL),
          static_cast<double>(NCLTRL), static_cast<double>(NSLTRL),
          static_cast<double>(NNLTRL), static_cast<double>(NNULLTRL)};
}

namespace {

struct TreeCounts {
  int statements = 0;
  int loops = 0;
  int max_depth = 0;
  int decisions = 0;
};

void walk(const java::Statement& st, int depth, TreeCounts& c) {
  const bool counted = java::is_counted(st.kind);
  if (counted) {
    ++c.statements;
    c.max_depth = std::max(c.max_depth, depth);
  }
  switch (st.kind) {
    case StatementKind::For:
    case StatementKind::ForEach:
    case StatementKind::While:
    case StatementKind::Do:
      ++c.loops;
      ++c.decisions;
      break;
    case StatementKind::If:
    case StatementKind::Catch:
      ++c.decisions;
      break;
    case StatementKind::SwitchCase:
      c.decisions += static_cast<int>(st.case_labels);
      break;
    default:
      break;
  }
  const int child_depth =
      depth + ((counted && st.kind != StatementKind::Labeled) ? 1 : 0);
  for (const java::Statement& child : st.children) walk(child, child_depth, c);
}

template <class T>
int distinct(const std::vector<T>& v) {
  return static_cast<int>(std::set<T>(v.begin(), v.end()).size());
}

}  // namespace

MetricsVector compute_metrics(const java::MethodSummary& s) {
  MetricsVector m;
  TreeCounts tree;
  for (const java::Statement& st : s.statements) walk(st, 0, tree);

  for (const java::CallSite& call : s.call_sites) {
    if (call.receiver == java::ReceiverCategory::Local) ++m.LMET;
    else ++m.XMET;
  }
  m.VREF = static_cast<int>(s.referenced_variables.size());
  m.VDEC = static_cast<int>(s.declared_variables.size());
  m.NOS = tree.statements;
  m.NOPR = static_cast<int>(s.operators.size());
  m.NOA = static_cast<int>(s.parameters.size());
  m.NEXP = static_cast<int>(s.expressions.size());
  m.NAND = static_cast<int>(s.operands.size());
  m.MDN = tree.max_depth;
  m.LOOP = tree.loops;

  const int n1 = distinct(s.operators);
  const int n2 = distinct(s.operands);
  const int N1 = m.NOPR;
  const int N2 = m.NAND;
  m.HVOC = n1 + n2;
  if (n2 > 0) {
    m.HDIF = Rational(static_cast<std::int64_t>(n1) * N2, 2LL * n2);
    const int vocabulary = n1 + n2;
    const double volume =
        vocabulary > 0 ? (N1 + N2) * std::log2(static_cast<double>(vocabulary)) : 0.0;
    m.HEFF = m.HDIF.to_double() * volume;
  }

  m.EXCT = distinct(s.thrown_exception_types);
  m.EXCR = distinct(s.referenced_exception_types);
  m.CREF = distinct(s.referenced_classes);

  int logical = 0;
  for (const std::string& op : s.operators) {
    if (op == "&&" || op == "||" || op == "?") ++logical;
  }
  m.COMP = 1 + tree.decisions + logical;
  m.CAST = static_cast<int>(s.casts.size());
  m.NBLTRL = s.literals.boolean;
  m.NCLTRL = s.literals.character;
  m.NSLTRL = s.literals.string;
  m.NNLTRL = s.literals.numeric;
  m.NNULLTRL = s.literals.null;
  return m;
}

}  // namespace clonevet::metrics
