#include "fixtures.hpp"

#include <fstream>
#include <map>
#include <random>
#include <set>

#include "clonevet/csv.hpp"
#include "generator.hpp"

namespace fs = std::filesystem;

namespace clonevet::testkit {

namespace {

const std::set<std::string> kCallees = {"weigh", "max",       "count",         "append",
                                        "add",   "log",       "notifyAll",     "ensureCapacity"};

GenMethod suffix_calls(GenMethod m, const std::string& suffix) {
  auto fix = [&](std::vector<Tok>& toks) {
    for (Tok& t : toks)
      if (t.tag == Tag::Plain && kCallees.count(t.text)) t.text += suffix;
  };
  fix(m.header);
  for (auto& s : m.body) {
    fix(s.toks);
    for (auto& c : s.calls)
      if (kCallees.count(c)) c += suffix;
  }
  return m;
}

GenMethod rename(GenMethod m, const std::string& name) {
  m.header[2].text = name;
  return m;
}

// Extra arithmetic without calls, inserted before the return statement.
GenMethod with_decoy_block(GenMethod m, std::mt19937_64& rng) {
  const int blocks = 4 + static_cast<int>(rng() % 5);
  std::vector<Statement> extra;
  for (int k = 0; k < blocks; ++k) {
    Statement s;
    const std::string w = "w" + std::to_string(k);
    switch (k % 3) {
      case 0:
        s.toks = {{"total"}, {"="}, {"total"}, {"*"}, {"3", Tag::IntLiteral}, {"+"},
                  {std::to_string(11 + k), Tag::IntLiteral}, {";"}};
        break;
      case 1:
        s.toks = {{"for"}, {"("}, {"int"}, {w, Tag::Variable}, {"="}, {"0", Tag::IntLiteral}, {";"},
                  {w, Tag::Variable}, {"<"}, {"5", Tag::IntLiteral}, {";"}, {w, Tag::Variable}, {"++"},
                  {")"}, {"{"}, {"if"}, {"("}, {w, Tag::Variable}, {">"}, {"1", Tag::IntLiteral}, {")"},
                  {"{"}, {"total"}, {"-="}, {w, Tag::Variable}, {";"}, {"}"}, {"}"}};
        break;
      default:
        s.toks = {{"total"}, {"^="}, {std::to_string(40 + k), Tag::IntLiteral}, {";"}};
        break;
    }
    extra.push_back(s);
  }
  m.body.insert(m.body.end() - 1, extra.begin(), extra.end());
  return m;
}

MethodLocation loc(const std::string& folder, const std::string& file, std::pair<int, int> span) {
  return MethodLocation{folder, file, span.first, span.second};
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

std::string key_columns(const PairKey& key) {
  auto side = [](const MethodLocation& l) {
    return csv::escape_field(l.folder) + "," + csv::escape_field(l.file) + "," +
           std::to_string(l.start_line) + "," + std::to_string(l.end_line);
  };
  return side(key.first()) + "," + side(key.second());
}

fs::path temp_dir(const std::string& tag) {
  std::random_device rd;
  const fs::path p = fs::temp_directory_path() /
                     ("clonevet-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

FamilyFixture make_family_fixture(std::uint64_t seed, int families) {
  FamilyFixture fx;
  Generator gen(seed);
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  fx.tools.resize(2);
  fx.unions.resize(1);
  std::vector<std::vector<MethodLocation>> members;
  for (int f = 0; f < families; ++f) {
    const std::string sfx = "F" + std::to_string(f);
    const GenMethod base = suffix_calls(gen.base_method("fam" + sfx), sfx);
    const GenMethod v1 = rename(gen.add_statement(base), "fam" + sfx + "a");
    const GenMethod v2 = rename(gen.add_statement(gen.add_statement(base)), "fam" + sfx + "b");
    const GenMethod decoy = rename(with_decoy_block(base, rng), "fam" + sfx + "d");
    const std::string file = "Family" + std::to_string(f) + ".java";
    const ClassFile cf =
        make_class("Family" + std::to_string(f), {base.text(), gen.layout_variant(v1), v2.text(), decoy.text()});
    fx.files.push_back(java::SourceFile{"", "fam", file, cf.content});
    std::vector<MethodLocation> m;
    for (const auto& span : cf.spans) m.push_back(loc("fam", file, span));
    members.push_back(m);
    for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
      const PairKey k(m[i], m[j]);
      fx.clone_pairs.insert(k);
      fx.tools[0].push_back(k);
      fx.tools[1].push_back(k);
    }
    for (int i = 0; i < 3; ++i) fx.decoy_pairs.insert(PairKey(m[i], m[3]));
  }
  for (int f = 0; f + 1 < families; ++f) {
    fx.tools[0].emplace_back(members[f][0], members[f + 1][0]);
    fx.tools[1].emplace_back(members[f][1], members[f + 1][3]);
  }
  for (int f = 0; f < families; f += 2) fx.unions[0].emplace_back(members[f][0], members[f][3]);
  return fx;
}

DeskStudy make_desk_study(const fs::path& dir, std::uint64_t seed) {
  DeskStudy d;
  d.corpus = dir / "corpus";
  d.detector_csv = dir / "detector.csv";
  d.seed_csv = dir / "seed.csv";
  d.labels_csv = dir / "labels.csv";
  d.partial_labels_csv = dir / "labels_partial.csv";
  Generator gen(seed);

  struct Slot {
    std::string folder, file;
    std::vector<std::string> texts;
  };
  std::vector<Slot> files = {{"alpha", "Alpha.java", {}}, {"alpha", "Beta.java", {}},
                             {"beta/inner", "Gamma.java", {}}, {"gamma", "Delta.java", {}},
                             {"gamma", "Epsilon.java", {}}};
  // Each method gets a (file, index) slot; filled round robin.
  std::vector<std::pair<int, int>> where;
  auto add = [&](const std::string& text) {
    const int f = static_cast<int>(where.size() % files.size());
    files[f].texts.push_back(text);
    where.emplace_back(f, static_cast<int>(files[f].texts.size() - 1));
    return static_cast<int>(where.size() - 1);
  };
  std::vector<std::pair<int, int>> t1, t2, kb, manual;
  for (int i = 0; i < 3; ++i) {
    const auto m = gen.base_method("typeOne" + std::to_string(i));
    t1.emplace_back(add(m.text()), add(gen.layout_variant(m)));
  }
  for (int i = 0; i < 3; ++i) {
    const auto m = gen.base_method("typeTwo" + std::to_string(i));
    t2.emplace_back(add(m.text()), add(gen.alpha_rename(m).text()));
  }
  for (int i = 0; i < 2; ++i) {
    const int a = add(gen.base_method("known" + std::to_string(i)).text());
    const int b = add(gen.base_method("knownOther" + std::to_string(i)).text());
    kb.emplace_back(a, b);
  }
  std::vector<int> bases, variants;
  for (int i = 0; i < 6; ++i) {
    const auto m = gen.base_method("manual" + std::to_string(i));
    bases.push_back(add(m.text()));
    variants.push_back(add(rename(gen.add_statement(m), "manualVariant" + std::to_string(i)).text()));
    manual.emplace_back(bases.back(), variants.back());
  }
  for (int i = 0; i < 6; ++i) manual.emplace_back(variants[i], bases[(i + 1) % 6]);
  add(gen.base_method("unused0").text());
  add(gen.base_method("unused1").text());

  std::vector<std::vector<std::pair<int, int>>> spans(files.size());
  for (std::size_t f = 0; f < files.size(); ++f) {
    const ClassFile cf =
        make_class(fs::path(files[f].file).stem().string(), files[f].texts);
    spans[f] = cf.spans;
    write(d.corpus / files[f].folder / files[f].file, cf.content);
  }
  auto location = [&](int id) {
    const auto [f, i] = where[id];
    return loc(files[f].folder, files[f].file, spans[f][i]);
  };
  auto key = [&](std::pair<int, int> p) { return PairKey(location(p.first), location(p.second)); };
  // Detector rows keep the reported order (left then right).
  auto row = [&](std::pair<int, int> p) {
    const MethodLocation a = location(p.first), b = location(p.second);
    return a.folder + "," + a.file + "," + std::to_string(a.start_line) + "," +
           std::to_string(a.end_line) + "," + b.folder + "," + b.file + "," +
           std::to_string(b.start_line) + "," + std::to_string(b.end_line);
  };

  std::string detector = std::string(csv::kUploadHeader) + "\n";
  for (const auto* group : {&t1, &t2, &kb, &manual})
    for (const auto& p : *group) detector += row(p) + "\n";
  write(d.detector_csv, detector);

  std::string seedfile = "folder_1,file_1,start_1,end_1,folder_2,file_2,start_2,end_2,label,clone_type,similarity\n";
  seedfile += key_columns(key(kb[0])) + ",true,T4,\n";
  seedfile += key_columns(key(kb[1])) + ",false,,\n";
  write(d.seed_csv, seedfile);

  const std::vector<std::string> verdicts = {"true", "true", "true",           "true",
                                             "true", "true", "true",           "true",
                                             "true;true;false", "true;false", "false", "false"};
  std::string labels = "folder_name_1,file_name_1,start_line_1,end_line_1,folder_name_2,file_name_2,"
                       "start_line_2,end_line_2,verdict\n";
  std::string partial = labels;
  for (std::size_t i = 0; i < manual.size(); ++i) {
    const std::string line = row(manual[i]) + "," + verdicts[i] + "\n";
    labels += line;
    if (i + 1 < manual.size()) partial += line;
  }
  write(d.labels_csv, labels);
  write(d.partial_labels_csv, partial);
  return d;
}

}  // namespace clonevet::testkit
