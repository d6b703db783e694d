#include <gtest/gtest.h>

#include <fstream>
#include <json.hpp>

#include "clonevet/corpus.hpp"
#include "clonevet/csv.hpp"
#include "clonevet/error.hpp"
#include "clonevet/study.hpp"
#include "fixtures.hpp"
#include "generator.hpp"

using namespace clonevet;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

class CorpusDir : public ::testing::Test {
 protected:
  void SetUp() override {
    root = testkit::temp_dir("corpus");
    write(root / "sel" / "A.java",
          "class A {\n  int a() { return 1; }\n  void b(int x) {\n    x++;\n  }\n}\n");
    write(root / "sel" / "sub" / "B.java", "class B {\n  void c() { go(); }\n}\n");
    write(root / "C.java", "class C { void d() {} }\n");
    write(root / "bad" / "Broken.java", "class X { void f() { String s = \"oops; } }\n");
    write(root / "sel" / "notes.txt", "ignored");
  }
  void TearDown() override { fs::remove_all(root); }
  fs::path root;
};

}  // namespace

TEST_F(CorpusDir, IngestAndLocate) {
  const Corpus c = Corpus::ingest(root, 2);
  EXPECT_EQ(c.file_count(), 4u);  // the broken file is kept without methods
  EXPECT_EQ(c.method_count(), 4u);
  ASSERT_EQ(c.diagnostics().size(), 1u);
  EXPECT_NE(c.diagnostics()[0].find("Broken.java"), std::string::npos);

  const auto& m = c.locate_method({"sel", "A.java", 3, 5});
  EXPECT_EQ(m.start_line, 3);
  EXPECT_EQ(m.end_line, 5);
  EXPECT_EQ(c.locate_method({"sel/sub", "B.java", 2, 2}).folder_name(), "sel/sub");
  EXPECT_EQ(c.locate_method({"", "C.java", 1, 1}).file_name(), "C.java");
  try {
    c.locate_method({"sel", "Missing.java", 1, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FileNotFound);
  }
  try {
    c.locate_method({"bad", "Broken.java", 1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoMatchingMethod);
  }
  try {
    c.locate_method({"sel", "A.java", 7, 40});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoMatchingMethod);
  }
  const auto a1 = c.locate_analyzed({"sel", "A.java", 3, 5});
  const auto a2 = c.locate_analyzed({"sel", "A.java", 3, 5});
  EXPECT_EQ(a1.get(), a2.get());
  EXPECT_EQ(a1->location, (MethodLocation{"sel", "A.java", 3, 5}));

  const auto all = c.all_methods();
  ASSERT_EQ(all.size(), 4u);
  EXPECT_EQ(all[0]->file_name(), "C.java");
  try {
    Corpus::ingest(root / "nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FileNotFound);
  }
}

TEST_F(CorpusDir, ParallelIngestMatchesSerial) {
  EXPECT_EQ(Corpus::ingest(root, 1).index_json(), Corpus::ingest(root, 4).index_json());
}

TEST_F(CorpusDir, IndexRoundTripAndRefresh) {
  const Corpus c = Corpus::ingest(root);
  const fs::path idx = Corpus::default_index_path(root);
  EXPECT_EQ(idx, root / ".clonevet" / "index.json");
  c.save_index(idx);
  const auto j = nlohmann::json::parse(c.index_json());
  EXPECT_EQ(j["format"], "clonevet-index");
  EXPECT_EQ(j["method_count"], 4);

  const Corpus again = Corpus::load_index(idx, root);
  EXPECT_EQ(again.method_count(), 4u);
  EXPECT_EQ(Corpus::ingest(root).index_json(), again.index_json());

  write(root / "sel" / "A.java", "class A {\n  int a() { return 2; }\n}\n");
  const Corpus changed = Corpus::load_index(idx, root);
  EXPECT_EQ(changed.method_count(), 3u);
  EXPECT_EQ(changed.locate_method({"sel", "A.java", 2, 2}).text, "int a() { return 2; }");
}

TEST(Csv, ReadRows) {
  const auto rows = csv::read_rows("\xEF\xBB\xBF" "a, b ,\"c,\"\"d\"\"\"\r\n\n x ,y\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].fields, (std::vector<std::string>{"a", "b", "c,\"d\""}));
  EXPECT_EQ(rows[1].line, 3);
  EXPECT_EQ(rows[1].fields, (std::vector<std::string>{"x", "y"}));
  try {
    csv::read_rows("a,\"b\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedCSV);
  }
  EXPECT_EQ(csv::escape_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::escape_field("plain"), "plain");
}

TEST(Csv, ParseUpload) {
  const auto rows = csv::parse_upload(std::string(csv::kUploadHeader) + "\nf,A.java,1,5,g,B.java,2,9\n");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].left, (MethodLocation{"f", "A.java", 1, 5}));
  EXPECT_EQ(rows[0].line, 2);
  EXPECT_EQ(csv::parse_upload("f,A.java,1,5,g,B.java,2,9\n").size(), 1u);
  for (const char* bad : {"f,A.java,1,5,g,B.java,2\n", "f,A.java,x,5,g,B.java,2,9\n",
                          "f,A.java,5,1,g,B.java,2,9\n", "f,A.java,0,1,g,B.java,2,9\n"}) {
    try {
      csv::parse_upload(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedCSV);
      EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
    }
  }
}

TEST(Prepare, FiltersDuplicatesAndUnlocated) {
  testkit::Generator gen(3);
  std::vector<std::string> texts;
  for (int i = 0; i < 3; ++i) texts.push_back(gen.base_method("m" + std::to_string(i)).text());
  texts.push_back("void tiny() { }");
  const auto cf = testkit::make_class("K", texts);
  const Corpus corpus = Corpus::from_files({java::SourceFile{"", "k", "K.java", cf.content}});
  auto at = [&](int i) { return MethodLocation{"k", "K.java", cf.spans[i].first, cf.spans[i].second}; };
  std::vector<csv::UploadRow> rows = {
      {2, at(0), at(1)},
      {3, at(1), at(0)},                                  // duplicate key
      {4, at(0), at(3)},                                  // below min tokens
      {5, at(2), MethodLocation{"k", "Gone.java", 1, 9}},  // unlocated
      {6, at(1), at(2)},
  };
  const auto p = study::prepare_pairs(rows, corpus, 50);
  EXPECT_EQ(p.uploaded, 5u);
  EXPECT_EQ(p.duplicates, 1u);
  EXPECT_EQ(p.below_min_tokens, 1u);
  EXPECT_EQ(p.unlocated, 1u);
  ASSERT_EQ(p.pairs.size(), 3u);
  for (std::size_t i = 1; i < p.pairs.size(); ++i) EXPECT_LT(p.pairs[i - 1].key, p.pairs[i].key);
  bool saw_placeholder = false;
  for (const auto& pair : p.pairs)
    if (!pair.left->lexed() || !pair.right->lexed()) saw_placeholder = true;
  EXPECT_TRUE(saw_placeholder);
}

TEST(Labels, Parse) {
  const auto v = study::parse_labels(
      "folder_name_1,file_name_1,start_line_1,end_line_1,folder_name_2,file_name_2,start_line_2,end_line_2,verdict\n"
      "a,A.java,1,2,b,B.java,3,4,true\n"
      "b,B.java,3,4,a,A.java,1,2,false\n"
      "c,C.java,1,2,d,D.java,3,4,TP;FP;1\n");
  const PairKey k1({"a", "A.java", 1, 2}, {"b", "B.java", 3, 4});
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v.at(k1), (std::vector<bool>{true, false}));
  EXPECT_EQ(v.at(PairKey({"c", "C.java", 1, 2}, {"d", "D.java", 3, 4})), (std::vector<bool>{true, false, true}));
  EXPECT_THROW(study::parse_labels("a,A.java,1,2,b,B.java,3,4,perhaps\n"), Error);
  EXPECT_THROW(study::parse_labels("a,A.java,1,2,b,B.java,3,4\n"), Error);
}
