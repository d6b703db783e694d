#include "clonevet/classifier/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "clonevet/digest.hpp"
#include "clonevet/error.hpp"
#include "clonevet/random.hpp"

namespace clonevet::classifier {

using nlohmann::json;

const char* to_string(ModelKind kind) noexcept {
  return kind == ModelKind::Feedforward ? "feedforward" : "logistic";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
  if (text == "feedforward") return ModelKind::Feedforward;
  if (text == "logistic") return ModelKind::Logistic;
  return std::nullopt;
}

namespace {

constexpr std::size_t F = kFeatureCount;

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Network state used both for training and prediction.
struct Net {
  ModelKind kind;
  std::size_t hidden;
  std::vector<double> w1, b1, w2;
  double b2 = 0;

  // Returns the output logit; fills `h` with hidden activations.
  double forward(const double* z, std::vector<double>& h) const {
    if (kind == ModelKind::Logistic) {
      double s = b2;
      for (std::size_t j = 0; j < F; ++j) s += w1[j] * z[j];
      return s;
    }
    h.resize(hidden);
    double out = b2;
    for (std::size_t k = 0; k < hidden; ++k) {
      double s = b1[k];
      const double* row = &w1[k * F];
      for (std::size_t j = 0; j < F; ++j) s += row[j] * z[j];
      h[k] = std::tanh(s);
      out += w2[k] * h[k];
    }
    return out;
  }
};

Net net_of(const ClassifierModel& m) {
  Net n;
  n.kind = m.kind;
  n.hidden = m.b1.size();
  n.w1 = m.w1;
  n.b1 = m.b1;
  n.w2 = m.w2;
  n.b2 = m.b2;
  return n;
}

void scale(const FeatureVector& x, const FeatureVector& mean, const FeatureVector& sd, double* z) {
  for (std::size_t j = 0; j < F; ++j) z[j] = (x[j] - mean[j]) / sd[j];
}

// Adam over a flat parameter vector.
struct Adam {
  double lr;
  std::vector<double> m, v;
  int t = 0;
  explicit Adam(std::size_t n, double lr_) : lr(lr_), m(n, 0.0), v(n, 0.0) {}
  void step(std::vector<double*>& params, const std::vector<double>& grad) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++t;
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      m[i] = b1 * m[i] + (1 - b1) * grad[i];
      v[i] = b2 * v[i] + (1 - b2) * grad[i] * grad[i];
      *params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
};

std::string fingerprint(const std::vector<LabeledRow>& rows, const Hyperparameters& hp) {
  std::string buf;
  char tmp[40];
  for (const LabeledRow& r : rows) {
    for (double x : r.features) {
      std::snprintf(tmp, sizeof tmp, "%.17g,", x);
      buf += tmp;
    }
    buf += r.clone ? "1\n" : "0\n";
  }
  std::snprintf(tmp, sizeof tmp, "%d/%d/", hp.hidden_units, hp.epochs);
  buf += to_string(hp.kind);
  buf += tmp;
  for (double x : {hp.learning_rate, hp.l2, hp.holdout_fraction, hp.cutoff}) {
    std::snprintf(tmp, sizeof tmp, "%.17g/", x);
    buf += tmp;
  }
  buf += std::to_string(hp.seed);
  return sha256_hex(buf);
}

}  // namespace

double ClassifierModel::predict(const FeatureVector& features) const {
  double z[F];
  scale(features, mean, stddev, z);
  std::vector<double> h;
  return sigmoid(net_of(*this).forward(z, h));
}

ClassifierModel train(const std::vector<LabeledRow>& rows, const Hyperparameters& hp) {
  if (rows.size() < std::max<std::size_t>(hp.min_rows, 2)) {
    throw Error(ErrorCode::DegenerateData,
                "need at least " + std::to_string(std::max<std::size_t>(hp.min_rows, 2)) +
                    " rows, got " + std::to_string(rows.size()));
  }
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < rows.size(); ++i) (rows[i].clone ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) {
    throw Error(ErrorCode::DegenerateData, "training data has a single class");
  }
  if (hp.kind == ModelKind::Feedforward && hp.hidden_units < 1) {
    throw Error(ErrorCode::InvalidParameter, "hidden_units must be positive");
  }
  if (hp.epochs < 1 || !(hp.learning_rate > 0) || !(hp.holdout_fraction >= 0 && hp.holdout_fraction < 1)) {
    throw Error(ErrorCode::InvalidParameter, "invalid training hyperparameters");
  }

  Rng rng(hp.seed);
  // Stratified split: each class contributes floor(n * fraction) held-out
  // rows, at least one when the class has two or more.
  std::vector<std::size_t> train_idx, held_idx;
  for (auto* cls : {&pos, &neg}) {
    std::vector<std::size_t> v = *cls;
    rng.shuffle(v);
    std::size_t k = static_cast<std::size_t>(std::floor(static_cast<double>(v.size()) * hp.holdout_fraction));
    if (hp.holdout_fraction > 0 && k == 0 && v.size() >= 2) k = 1;
    held_idx.insert(held_idx.end(), v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k));
    train_idx.insert(train_idx.end(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(held_idx.begin(), held_idx.end());

  ClassifierModel model;
  model.kind = hp.kind;
  model.metric_dictionary_version = std::string(metrics::kMetricDictionaryVersion);
  model.hyperparameters = hp;
  model.training_fingerprint = fingerprint(rows, hp);

  const double n = static_cast<double>(train_idx.size());
  for (std::size_t j = 0; j < F; ++j) {
    double s = 0;
    for (std::size_t i : train_idx) s += rows[i].features[j];
    const double mu = s / n;
    double v = 0;
    for (std::size_t i : train_idx) v += (rows[i].features[j] - mu) * (rows[i].features[j] - mu);
    const double sd = std::sqrt(v / n);
    model.mean[j] = mu;
    model.stddev[j] = sd > 1e-12 ? sd : 1.0;
  }

  std::vector<std::array<double, F>> z(train_idx.size());
  std::vector<double> y(train_idx.size());
  for (std::size_t r = 0; r < train_idx.size(); ++r) {
    scale(rows[train_idx[r]].features, model.mean, model.stddev, z[r].data());
    y[r] = rows[train_idx[r]].clone ? 1.0 : 0.0;
  }

  Net net;
  net.kind = hp.kind;
  if (hp.kind == ModelKind::Logistic) {
    net.hidden = 0;
    net.w1.assign(F, 0.0);
  } else {
    const std::size_t H = static_cast<std::size_t>(hp.hidden_units);
    net.hidden = H;
    const double a1 = std::sqrt(6.0 / static_cast<double>(F + H));
    const double a2 = std::sqrt(6.0 / static_cast<double>(H + 1));
    net.w1.resize(H * F);
    for (double& w : net.w1) w = (2 * rng.uniform01() - 1) * a1;
    net.b1.assign(H, 0.0);
    net.w2.resize(H);
    for (double& w : net.w2) w = (2 * rng.uniform01() - 1) * a2;
  }

  std::vector<double*> params;
  for (double& w : net.w1) params.push_back(&w);
  for (double& w : net.b1) params.push_back(&w);
  for (double& w : net.w2) params.push_back(&w);
  params.push_back(&net.b2);
  Adam opt(params.size(), hp.learning_rate);
  std::vector<double> grad(params.size());
  const std::size_t off_b1 = net.w1.size();
  const std::size_t off_w2 = off_b1 + net.b1.size();
  const std::size_t off_b2 = off_w2 + net.w2.size();

  auto loss_and_grad = [&](bool want_grad) {
    if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
    std::vector<double> h;
    double loss = 0;
    for (std::size_t r = 0; r < z.size(); ++r) {
      const double logit = net.forward(z[r].data(), h);
      // Numerically stable binary cross-entropy on the logit.
      loss += std::max(logit, 0.0) - logit * y[r] + std::log1p(std::exp(-std::abs(logit)));
      if (!want_grad) continue;
      const double d = (sigmoid(logit) - y[r]) / n;
      grad[off_b2] += d;
      if (hp.kind == ModelKind::Logistic) {
        for (std::size_t j = 0; j < F; ++j) grad[j] += d * z[r][j];
        continue;
      }
      for (std::size_t k = 0; k < net.hidden; ++k) {
        grad[off_w2 + k] += d * h[k];
        const double dpre = d * net.w2[k] * (1 - h[k] * h[k]);
        grad[off_b1 + k] += dpre;
        double* g = &grad[k * F];
        for (std::size_t j = 0; j < F; ++j) g[j] += dpre * z[r][j];
      }
    }
    loss /= n;
    double reg = 0;
    for (std::size_t i = 0; i < net.w1.size(); ++i) {
      reg += net.w1[i] * net.w1[i];
      if (want_grad) grad[i] += hp.l2 * net.w1[i];
    }
    for (std::size_t k = 0; k < net.w2.size(); ++k) {
      reg += net.w2[k] * net.w2[k];
      if (want_grad) grad[off_w2 + k] += hp.l2 * net.w2[k];
    }
    return loss + 0.5 * hp.l2 * reg;
  };

  const double initial = loss_and_grad(false);
  for (int e = 0; e < hp.epochs; ++e) {
    loss_and_grad(true);
    opt.step(params, grad);
  }
  const double final_loss = loss_and_grad(false);
  const bool finite = std::isfinite(final_loss) &&
                      std::all_of(params.begin(), params.end(), [](double* p) { return std::isfinite(*p); });
  if (!finite || final_loss > initial) {
    throw Error(ErrorCode::NonConvergence, "training did not converge: loss " +
                                               std::to_string(initial) + " -> " +
                                               std::to_string(final_loss));
  }

  model.w1 = net.w1;
  model.b1 = net.b1;
  model.w2 = net.w2;
  model.b2 = net.b2;

  HeldOutMetrics& m = model.heldout;
  m.train_rows = train_idx.size();
  m.heldout_rows = held_idx.size();
  m.initial_loss = initial;
  m.final_loss = final_loss;
  for (std::size_t i : held_idx) {
    const bool predicted = model.predict(rows[i].features) >= hp.cutoff;
    if (predicted && rows[i].clone) ++m.tp;
    else if (predicted) ++m.fp;
    else if (rows[i].clone) ++m.fn;
    else ++m.tn;
  }
  if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  if (m.tp + m.fn > 0) m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  return model;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedModel, "malformed model: " + what);
}

}  // namespace

std::string ClassifierModel::to_json() const {
  const Hyperparameters& hp = hyperparameters;
  json doc;
  doc["format"] = "clonevet-model";
  doc["format_version"] = 1;
  doc["kind"] = to_string(kind);
  doc["metric_dictionary_version"] = metric_dictionary_version;
  doc["feature_names"] = feature_names();
  doc["seed"] = hp.seed;
  doc["training_fingerprint"] = training_fingerprint;
  doc["scaling"] = {{"mean", mean}, {"stddev", stddev}};
  doc["hyperparameters"] = {{"hidden_units", hp.hidden_units},
                            {"epochs", hp.epochs},
                            {"learning_rate", hp.learning_rate},
                            {"l2", hp.l2},
                            {"holdout_fraction", hp.holdout_fraction},
                            {"min_rows", hp.min_rows},
                            {"cutoff", hp.cutoff}};
  doc["metadata"] = {{"train_rows", heldout.train_rows},
                     {"heldout_rows", heldout.heldout_rows},
                     {"heldout_tp", heldout.tp},
                     {"heldout_fp", heldout.fp},
                     {"heldout_tn", heldout.tn},
                     {"heldout_fn", heldout.fn},
                     {"heldout_precision", optional_number(heldout.precision)},
                     {"heldout_recall", optional_number(heldout.recall)},
                     {"initial_loss", heldout.initial_loss},
                     {"final_loss", heldout.final_loss}};
  doc["parameters"] = {{"w1", w1}, {"b1", b1}, {"w2", w2}, {"b2", b2}};
  return doc.dump(1) + "\n";
}

ClassifierModel ClassifierModel::from_json(std::string_view text, std::string_view expected_version) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  ClassifierModel m;
  try {
    if (doc.at("format").get<std::string>() != "clonevet-model") malformed("not a model file");
    if (doc.at("format_version").get<int>() != 1) malformed("unsupported format_version");
    m.metric_dictionary_version = doc.at("metric_dictionary_version").get<std::string>();
    if (m.metric_dictionary_version != expected_version) {
      throw Error(ErrorCode::VersionMismatch,
                  "model was trained with metric dictionary '" + m.metric_dictionary_version +
                      "' but this build uses '" + std::string(expected_version) + "'");
    }
    auto kind = parse_model_kind(doc.at("kind").get<std::string>());
    if (!kind) malformed("unknown kind");
    m.kind = *kind;
    Hyperparameters& hp = m.hyperparameters;
    hp.kind = m.kind;
    hp.seed = doc.at("seed").get<std::uint64_t>();
    const json& h = doc.at("hyperparameters");
    hp.hidden_units = h.at("hidden_units").get<int>();
    hp.epochs = h.at("epochs").get<int>();
    hp.learning_rate = h.at("learning_rate").get<double>();
    hp.l2 = h.at("l2").get<double>();
    hp.holdout_fraction = h.at("holdout_fraction").get<double>();
    hp.min_rows = h.at("min_rows").get<std::size_t>();
    hp.cutoff = h.at("cutoff").get<double>();
    m.training_fingerprint = doc.at("training_fingerprint").get<std::string>();
    const auto mean = doc.at("scaling").at("mean").get<std::vector<double>>();
    const auto sd = doc.at("scaling").at("stddev").get<std::vector<double>>();
    if (mean.size() != F || sd.size() != F) malformed("scaling must have 48 entries");
    std::copy(mean.begin(), mean.end(), m.mean.begin());
    std::copy(sd.begin(), sd.end(), m.stddev.begin());
    if (std::any_of(sd.begin(), sd.end(), [](double s) { return !(s > 0); })) {
      malformed("non-positive stddev");
    }
    const json& md = doc.at("metadata");
    HeldOutMetrics& ho = m.heldout;
    ho.train_rows = md.at("train_rows").get<std::size_t>();
    ho.heldout_rows = md.at("heldout_rows").get<std::size_t>();
    ho.tp = md.at("heldout_tp").get<std::size_t>();
    ho.fp = md.at("heldout_fp").get<std::size_t>();
    ho.tn = md.at("heldout_tn").get<std::size_t>();
    ho.fn = md.at("heldout_fn").get<std::size_t>();
    if (!md.at("heldout_precision").is_null()) ho.precision = md["heldout_precision"].get<double>();
    if (!md.at("heldout_recall").is_null()) ho.recall = md["heldout_recall"].get<double>();
    ho.initial_loss = md.at("initial_loss").get<double>();
    ho.final_loss = md.at("final_loss").get<double>();
    const json& p = doc.at("parameters");
    m.w1 = p.at("w1").get<std::vector<double>>();
    m.b1 = p.at("b1").get<std::vector<double>>();
    m.w2 = p.at("w2").get<std::vector<double>>();
    m.b2 = p.at("b2").get<double>();
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  const bool shape_ok =
      m.kind == ModelKind::Logistic
          ? m.w1.size() == F && m.b1.empty() && m.w2.empty()
          : !m.b1.empty() && m.w1.size() == m.b1.size() * F && m.w2.size() == m.b1.size();
  if (!shape_ok) malformed("parameter shapes do not match kind");
  return m;
}

void ClassifierModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::StorageError, "cannot write " + path.string());
  out << to_json();
}

ClassifierModel ClassifierModel::load(const std::filesystem::path& path, std::string_view expected_version) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ModelUnavailable, "cannot read model " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), expected_version);
}

std::string ClassifierModel::digest() const { return sha256_hex(to_json()); }

}  // namespace clonevet::classifier
