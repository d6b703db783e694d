// clonevet: offline driver for corpus ingestion, pair resolution, precision
// studies, training-set curation, model training and the study service.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "clonevet/classifier/curation.hpp"
#include "clonevet/classifier/model.hpp"
#include "clonevet/corpus.hpp"
#include "clonevet/csv.hpp"
#include "clonevet/error.hpp"
#include "clonevet/http.hpp"
#include "clonevet/knowledge.hpp"
#include "clonevet/service.hpp"
#include "clonevet/stats.hpp"
#include "clonevet/study.hpp"

namespace fs = std::filesystem;
using namespace clonevet;

namespace {

enum Exit { kOk = 0, kUserError = 1, kInternalError = 2 };

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path);
  out << text;
}

struct Options {
  std::string corpus;
  std::string index;
  std::string kb;
  std::string model;
  std::string csv;
  std::string labels;
  std::string output;
  std::string format;
  int min_tokens = 50;
  std::string theta_t3 = "0.9";
  double cutoff = 0.5;
  std::string confidence = "0.95";
  std::string margin = "0.05";
  std::int64_t sample_target = 400;
  std::int64_t population = 0;
  std::uint64_t seed = 0;
  int jobs = 1;
  // curate / train
  std::vector<std::string> tools;
  std::vector<std::string> unions;
  std::string theta = "0.9";
  std::string training_set;
  std::string kind = "feedforward";
  int epochs = 400;
  int hidden = 16;
  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
};

Corpus open_corpus(const Options& o) {
  if (o.corpus.empty()) throw Error(ErrorCode::InvalidParameter, "--corpus is required");
  const fs::path root(o.corpus);
  if (!fs::is_directory(root)) throw Error(ErrorCode::FileNotFound, "corpus root is not a directory: " + o.corpus);
  const fs::path index = o.index.empty() ? Corpus::default_index_path(root) : fs::path(o.index);
  if (fs::exists(index)) return Corpus::load_index(index, root);
  return Corpus::ingest(root, o.jobs);
}

std::unique_ptr<knowledge::KnowledgeStore> open_kb(const Options& o) {
  return std::make_unique<knowledge::KnowledgeStore>(o.kb.empty() ? ":memory:" : o.kb);
}

std::shared_ptr<const classifier::Classifier> open_model(const Options& o) {
  if (o.model.empty()) return nullptr;
  try {
    return std::make_shared<classifier::ClassifierModel>(classifier::ClassifierModel::load(o.model));
  } catch (const Error& e) {
    std::cerr << "warning: " << e.what() << "; Type III pairs stay undecided\n";
    return nullptr;
  }
}

study::StudyConfig study_config(const Options& o) {
  study::StudyConfig c;
  c.pipeline.min_tokens = o.min_tokens;
  c.pipeline.theta_t3 = Rational::parse(o.theta_t3);
  c.pipeline.classifier_cutoff = o.cutoff;
  c.confidence = Rational::parse(o.confidence);
  c.margin = Rational::parse(o.margin);
  c.sample_target = o.sample_target;
  c.seed = o.seed;
  c.jobs = o.jobs;
  c.validate();
  return c;
}

void print_diagnostics(const std::vector<std::string>& diags) {
  for (const auto& d : diags) std::cerr << "note: " << d << "\n";
}

int cmd_ingest(const Options& o) {
  if (o.corpus.empty()) throw Error(ErrorCode::InvalidParameter, "--corpus is required");
  const Corpus c = Corpus::ingest(o.corpus, o.jobs);
  print_diagnostics(c.diagnostics());
  const fs::path index = o.index.empty() ? Corpus::default_index_path(o.corpus) : fs::path(o.index);
  c.save_index(index);
  if (c.method_count() == 0) std::cerr << "warning: no methods found under " << o.corpus << "\n";
  std::cout << "indexed " << c.file_count() << " files, " << c.method_count() << " methods -> "
            << index.string() << "\n";
  return kOk;
}

int cmd_resolve(const Options& o) {
  const study::StudyConfig cfg = study_config(o);
  const Corpus corpus = open_corpus(o);
  const auto rows = csv::parse_upload(read_text(o.csv));
  study::PreparedPairs prepared = study::prepare_pairs(rows, corpus, cfg.pipeline.min_tokens);
  print_diagnostics(prepared.diagnostics);
  auto kb = open_kb(o);
  auto snapshot = kb->snapshot();
  auto model = open_model(o);
  const auto outcomes = pipeline::resolve_all(prepared.pairs, snapshot.get(), model.get(), cfg.pipeline, cfg.jobs);
  std::map<pipeline::ResolutionStatus, std::size_t> counts;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    prepared.pairs[i].resolution = outcomes[i];
    ++counts[outcomes[i].status];
  }
  write_text(o.output, o.format == "table" ? study::outcomes_table(prepared.pairs)
                                           : study::outcomes_csv(prepared.pairs));
  std::cerr << "pairs: " << rows.size() << " uploaded, " << prepared.below_min_tokens << " below "
            << cfg.pipeline.min_tokens << " tokens, " << prepared.pairs.size() << " resolved\n";
  for (const auto& [status, n] : counts) std::cerr << "  " << pipeline::to_string(status) << ": " << n << "\n";
  return kOk;
}

int cmd_study(const Options& o) {
  const study::StudyConfig cfg = study_config(o);
  const Corpus corpus = open_corpus(o);
  const auto rows = csv::parse_upload(read_text(o.csv));
  const study::PreparedPairs prepared = study::prepare_pairs(rows, corpus, cfg.pipeline.min_tokens);
  print_diagnostics(prepared.diagnostics);
  auto kb = open_kb(o);
  auto snapshot = kb->snapshot();
  auto model = open_model(o);
  const study::StudyRun run = study::sample_and_resolve(prepared, snapshot.get(), model.get(), cfg);
  const auto votes = o.labels.empty() ? std::map<PairKey, std::vector<bool>>{}
                                      : study::parse_labels(read_text(o.labels));
  std::vector<std::string> missing;
  for (const auto& p : run.sample) {
    if (p.resolution->status == pipeline::ResolutionStatus::Manual && !votes.count(p.key)) {
      missing.push_back(p.key.to_string());
    }
  }
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " manual pair(s) have no verdict in the labels file:";
    for (const auto& m : missing) msg += "\n  " + m;
    throw Error(ErrorCode::MissingVerdict, msg);
  }
  const stats::PrecisionReport report = study::report_for(run, votes);
  if (o.format == "json") {
    write_text(o.output, report.to_json());
  } else if (o.format == "table") {
    write_text(o.output, report.to_table());
  } else {
    write_text(o.output, report.to_table() + "\n" + report.to_json());
  }
  return kOk;
}

int cmd_curate(const Options& o) {
  const Corpus corpus = open_corpus(o);
  auto read_pairs = [](const std::string& path) {
    std::vector<PairKey> keys;
    for (const auto& r : csv::parse_upload(read_text(path))) keys.push_back(r.key());
    return keys;
  };
  std::vector<std::vector<PairKey>> tools, unions;
  for (const auto& t : o.tools) tools.push_back(read_pairs(t));
  for (const auto& u : o.unions) unions.push_back(read_pairs(u));
  classifier::CurationConfig cfg;
  cfg.theta = Rational::parse(o.theta);
  cfg.seed = o.seed;
  cfg.min_tokens = o.min_tokens;
  classifier::TrainingSet set;
  try {
    set = classifier::curate_training_set(tools, unions, corpus, cfg);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EmptyIntersection) {
      std::cerr << "hint: pass at least two --tool files whose outputs overlap\n";
    }
    throw;
  }
  if (o.output.empty()) throw Error(ErrorCode::InvalidParameter, "--output is required");
  classifier::save_training_set(set, o.output);
  std::cout << classifier::curation_stats_table(set.stats);
  return kOk;
}

int cmd_train(const Options& o) {
  if (o.training_set.empty() || o.output.empty()) {
    throw Error(ErrorCode::InvalidParameter, "--training-set and --output are required");
  }
  const classifier::TrainingSet set = classifier::load_training_set(o.training_set);
  classifier::Hyperparameters hp;
  auto kind = classifier::parse_model_kind(o.kind);
  if (!kind) throw Error(ErrorCode::InvalidParameter, "unknown model kind " + o.kind);
  hp.kind = *kind;
  hp.seed = o.seed;
  hp.epochs = o.epochs;
  hp.hidden_units = o.hidden;
  hp.cutoff = o.cutoff;
  const classifier::ClassifierModel model = classifier::train(set.labeled(), hp);
  model.save(o.output);
  const auto& m = model.heldout;
  std::cout << "model " << o.output << " sha256 " << model.digest() << "\n"
            << "train rows " << m.train_rows << ", held-out rows " << m.heldout_rows << "\n"
            << "held-out precision " << (m.precision ? std::to_string(*m.precision) : "n/a")
            << ", recall " << (m.recall ? std::to_string(*m.recall) : "n/a") << "\n";
  return kOk;
}

int cmd_serve(const Options& o) {
  auto corpus = std::make_shared<const Corpus>(open_corpus(o));
  if (o.kb.empty()) throw Error(ErrorCode::InvalidParameter, "--kb is required for serve");
  auto kb = std::make_shared<knowledge::KnowledgeStore>(o.kb);
  service::Service svc(kb, corpus, open_model(o));
  std::cerr << "serving " << corpus->method_count() << " methods on http://" << o.host << ":" << o.port << "\n";
  if (!service::serve(svc, o.host, o.port)) {
    throw Error(ErrorCode::InvalidParameter, "cannot listen on " + o.host + ":" + std::to_string(o.port));
  }
  return kOk;
}

int cmd_import_seed(const Options& o) {
  if (o.kb.empty()) throw Error(ErrorCode::InvalidParameter, "--kb is required");
  knowledge::KnowledgeStore kb(o.kb);
  const auto r = kb.import_seed(o.csv);
  for (const auto& e : r.errors) std::cerr << "skipped " << e << "\n";
  std::cout << "imported " << r.imported << " rows, " << r.malformed << " malformed\n";
  return kOk;
}

int cmd_export_labels(const Options& o) {
  if (o.kb.empty()) throw Error(ErrorCode::InvalidParameter, "--kb is required");
  knowledge::KnowledgeStore kb(o.kb);
  write_text(o.output, kb.export_labels());
  return kOk;
}

int cmd_sample_size(const Options& o) {
  std::optional<std::int64_t> pop;
  if (o.population > 0) pop = o.population;
  std::cout << stats::required_sample_size(Rational::parse(o.confidence), Rational::parse(o.margin), pop) << "\n";
  return kOk;
}

int exit_code_for(ErrorCode code) {
  return code == ErrorCode::StorageError ? kInternalError : kUserError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clonevet: semi-automated precision studies for clone detectors"};
  app.require_subcommand(1);
  Options o;

  auto corpus_opts = [&](CLI::App* c) {
    c->add_option("--corpus", o.corpus, "Corpus root (<root>/<folder>/<file>.java)");
    c->add_option("--index", o.index, "Method index (default <corpus>/.clonevet/index.json)");
    c->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto pipeline_opts = [&](CLI::App* c) {
    c->add_option("--kb", o.kb, "Knowledge base (SQLite file)");
    c->add_option("--model", o.model, "Classifier model file");
    c->add_option("--min-tokens", o.min_tokens, "Minimum tokens per method")->capture_default_str();
    c->add_option("--theta-t3", o.theta_t3, "Action Filter threshold for Type III")->capture_default_str();
    c->add_option("--cutoff", o.cutoff, "Classifier probability cutoff")->capture_default_str();
  };

  auto* ingest = app.add_subcommand("ingest", "Extract methods and write the corpus index");
  corpus_opts(ingest);

  auto* resolve = app.add_subcommand("resolve", "Resolve every uploaded pair and list outcomes");
  corpus_opts(resolve);
  pipeline_opts(resolve);
  resolve->add_option("--csv", o.csv, "Detector output (8-column CSV)")->required();
  resolve->add_option("--output", o.output, "Output file (default stdout)");
  resolve->add_option("--format", o.format, "csv or table")->check(CLI::IsMember({"csv", "table"}));

  auto* study_cmd = app.add_subcommand("study", "Sample, resolve and report precision");
  corpus_opts(study_cmd);
  pipeline_opts(study_cmd);
  study_cmd->add_option("--csv", o.csv, "Detector output (8-column CSV)")->required();
  study_cmd->add_option("--labels", o.labels, "Verdicts for manual pairs");
  study_cmd->add_option("--confidence", o.confidence)->capture_default_str();
  study_cmd->add_option("--margin", o.margin)->capture_default_str();
  study_cmd->add_option("--sample-target", o.sample_target)->capture_default_str();
  study_cmd->add_option("--seed", o.seed)->capture_default_str();
  study_cmd->add_option("--output", o.output, "Output file (default stdout)");
  study_cmd->add_option("--format", o.format, "json, table or both")->check(CLI::IsMember({"json", "table", "both"}));

  auto* curate = app.add_subcommand("curate", "Build a training set from tool outputs");
  corpus_opts(curate);
  curate->add_option("--tool", o.tools, "Tool output to intersect (repeat)")->required();
  curate->add_option("--union", o.unions, "Tool output excluded from negatives (repeat)");
  curate->add_option("--theta", o.theta, "Action Filter threshold")->capture_default_str();
  curate->add_option("--min-tokens", o.min_tokens)->capture_default_str();
  curate->add_option("--seed", o.seed)->capture_default_str();
  curate->add_option("--output", o.output, "Training-set file")->required();

  auto* train_cmd = app.add_subcommand("train", "Train a Type III classifier");
  train_cmd->add_option("--training-set", o.training_set)->required();
  train_cmd->add_option("--output", o.output, "Model file")->required();
  train_cmd->add_option("--kind", o.kind, "feedforward or logistic")->capture_default_str();
  train_cmd->add_option("--seed", o.seed)->capture_default_str();
  train_cmd->add_option("--epochs", o.epochs)->capture_default_str();
  train_cmd->add_option("--hidden", o.hidden)->capture_default_str();
  train_cmd->add_option("--cutoff", o.cutoff)->capture_default_str();

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP study service");
  corpus_opts(serve_cmd);
  serve_cmd->add_option("--kb", o.kb, "Knowledge base (SQLite file)")->required();
  serve_cmd->add_option("--model", o.model);
  serve_cmd->add_option("--host", o.host)->capture_default_str();
  serve_cmd->add_option("--port", o.port)->capture_default_str();

  auto* seed_cmd = app.add_subcommand("import-seed", "Import seed labels into the knowledge base");
  seed_cmd->add_option("--kb", o.kb)->required();
  seed_cmd->add_option("--csv", o.csv, "Seed file")->required();

  auto* export_cmd = app.add_subcommand("export-labels", "Write every final label as CSV");
  export_cmd->add_option("--kb", o.kb)->required();
  export_cmd->add_option("--output", o.output);

  auto* size_cmd = app.add_subcommand("sample-size", "Minimum sample size for a study");
  size_cmd->add_option("--confidence", o.confidence)->capture_default_str();
  size_cmd->add_option("--margin", o.margin)->capture_default_str();
  size_cmd->add_option("--population", o.population, "Population size (0 = unbounded)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUserError;
  }

  try {
    if (*ingest) return cmd_ingest(o);
    if (*resolve) return cmd_resolve(o);
    if (*study_cmd) return cmd_study(o);
    if (*curate) return cmd_curate(o);
    if (*train_cmd) return cmd_train(o);
    if (*serve_cmd) return cmd_serve(o);
    if (*seed_cmd) return cmd_import_seed(o);
    if (*export_cmd) return cmd_export_labels(o);
    if (*size_cmd) return cmd_sample_size(o);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}
