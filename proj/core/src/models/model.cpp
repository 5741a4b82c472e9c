#include "dmpred/models/model.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "dmpred/neuro/adam.hpp"
#include "dmpred/neuro/serialize.hpp"

namespace dmpred {
namespace {

constexpr std::size_t kPredictChunk = 256;
constexpr const char* kFormat = "dmpred-model";

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), purpose};
  return std::mt19937_64(seq);
}

double rmse100(const std::vector<Prediction>& preds, std::span<const PrefixExample> gold) {
  double s = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double d = preds[i].choice_rate - gold[i].choice_rate;
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(preds.size())) * 100.0;
}

void check_prefixes(std::span<const PrefixExample> examples, ModelVariant v, const char* what) {
  for (const auto& ex : examples) {
    if (ex.prefix_size < min_prefix(v)) {
      throw ValidationError(std::string(what) + " example " + ex.pair_id + " has prefix size " +
                            std::to_string(ex.prefix_size) + ", which " + std::string(to_string(v)) +
                            " does not accept");
    }
  }
}

std::vector<std::string> merge_ids(std::span<const PrefixExample> a, std::span<const PrefixExample> b) {
  std::set<std::string> ids;
  for (auto span : {a, b})
    for (const auto& ex : span) ids.insert(ex.shown_reviews.begin(), ex.shown_reviews.end());
  return {ids.begin(), ids.end()};
}

Standardizer fit_standardizer(const ModelConfig& config, std::span<const PrefixExample> train,
                              const FeatureSources& sources) {
  if (!uses_dnn(config.textual)) return {};
  if (sources.embeddings == nullptr) {
    throw ValidationError("textual source " + std::string(to_string(config.textual)) + " needs embeddings");
  }
  const auto ids = review_ids_of(train);
  return Standardizer::fit(*sources.embeddings, ids);
}

std::vector<nn::Matrix> snapshot(const nn::ParamList& params) {
  std::vector<nn::Matrix> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.tensor.value());
  return out;
}

void restore(nn::ParamList& params, const std::vector<nn::Matrix>& values) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i].tensor.mutable_value() = values[i];
}

}  // namespace

double clip_rate(double raw) { return std::clamp(raw, 0.0, 1.0); }

std::vector<std::string> review_ids_of(std::span<const PrefixExample> examples) {
  return merge_ids(examples, {});
}

double TrainedModel::best_dev_rmse() const {
  for (const auto& r : log_)
    if (r.epoch == best_epoch_) return r.dev_rmse;
  return std::numeric_limits<double>::quiet_NaN();
}

FeatureBank TrainedModel::feature_bank(std::span<const std::string> review_ids, const FeatureSources& sources) const {
  if (uses_dnn(config_.textual) && sources.embeddings == nullptr) {
    throw ValidationError("textual source " + std::string(to_string(config_.textual)) + " needs embeddings");
  }
  if (uses_hc(config_.textual) && sources.hc == nullptr) {
    throw ValidationError("textual source " + std::string(to_string(config_.textual)) + " needs HC features");
  }
  return FeatureBank::build(config_.textual, review_ids, sources.hc, sources.embeddings, &standardizer_);
}

TrainedModel train_svr(std::span<const PrefixExample> train, const FeatureSources& sources,
                       const ModelConfig& config) {
  config.validate();
  if (config.variant != ModelVariant::SvmCr) throw ValidationError("train_svr needs the svm-cr variant");
  if (train.empty()) throw ValidationError("empty training set");
  TrainedModel m;
  m.config_ = config;
  m.standardizer_ = fit_standardizer(config, train, sources);
  const auto ids = review_ids_of(train);
  const FeatureBank bank = m.feature_bank(ids, sources);

  std::vector<std::vector<double>> x;
  std::vector<double> y;
  x.reserve(train.size());
  for (const auto& ex : train) {
    x.push_back(svm_representation(ex, bank, config.behavioral));
    y.push_back(ex.choice_rate);
  }
  m.input_dim_ = x.front().size();
  SvrParams p;
  p.kernel = config.kernel;
  p.c = config.svr_c;
  p.epsilon = config.svr_epsilon;
  p.tolerance = config.svr_tolerance;
  m.svr_ = SvrModel::train(x, y, p);
  return m;
}

TrainedModel train_neural(std::span<const PrefixExample> train, std::span<const PrefixExample> dev,
                          const FeatureSources& sources, const ModelConfig& config, const TrainOptions& options) {
  config.validate();
  if (!is_neural(config.variant)) throw ValidationError("train_neural needs a neural variant");
  if (train.empty()) throw ValidationError("empty training set");
  if (dev.empty()) throw ValidationError("empty dev set");
  check_prefixes(train, config.variant, "training");
  check_prefixes(dev, config.variant, "dev");

  TrainedModel m;
  m.config_ = config;
  m.standardizer_ = fit_standardizer(config, train, sources);
  const auto ids = merge_ids(train, dev);
  const FeatureBank bank = m.feature_bank(ids, sources);
  m.input_dim_ = sequence_dim(bank.textual_dim(), config.behavioral);
  m.net_ = std::make_shared<NeuralNet>(config, m.input_dim_);

  std::vector<TrialFeatureSeq> seqs;
  seqs.reserve(train.size());
  for (const auto& ex : train) seqs.push_back(sequence_representation(ex, bank, config.behavioral));
  std::vector<TrialFeatureSeq> dev_seqs;
  dev_seqs.reserve(dev.size());
  for (const auto& ex : dev) dev_seqs.push_back(sequence_representation(ex, bank, config.behavioral));

  // One batch per decision-maker, in order of first appearance.
  std::vector<std::vector<std::size_t>> batches;
  std::map<std::string, std::size_t, std::less<>> slot;
  for (std::size_t i = 0; i < train.size(); ++i) {
    auto [it, fresh] = slot.try_emplace(train[i].pair_id, batches.size());
    if (fresh) batches.emplace_back();
    batches[it->second].push_back(i);
  }

  auto params = m.net_->params();
  nn::AdamOptions adam_opt;
  adam_opt.lr = config.learning_rate;
  nn::Adam adam(params, adam_opt);
  auto shuffle_rng = stream(config.seed, 1);
  auto dropout_rng = stream(config.seed, 2);
  nn::ForwardContext ctx{true, &dropout_rng, config.dropout};

  // training objective on dev, eval mode; breaks dev-RMSE ties
  auto dev_objective = [&] {
    nn::NoGradGuard guard;
    const nn::ForwardContext eval_ctx{};
    double total = 0.0;
    for (std::size_t start = 0; start < dev.size(); start += kPredictChunk) {
      const std::size_t end = std::min(dev.size(), start + kPredictChunk);
      std::vector<const TrialFeatureSeq*> batch;
      std::vector<const PrefixExample*> exs;
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(&dev_seqs[i]);
        exs.push_back(&dev[i]);
      }
      total += m.net_->loss(m.net_->forward(batch, eval_ctx), exs).item() * static_cast<double>(end - start);
    }
    return total / static_cast<double>(dev.size());
  };
  auto record = [&](int epoch, double loss) {
    const double r = rmse100(predict(m, dev, bank), dev);
    m.log_.push_back({epoch, loss, r, dev_objective()});
    if (options.on_epoch) options.on_epoch(m.log_.back());
    return m.log_.back();
  };

  EpochRecord best = record(0, 0.0);
  auto best_values = snapshot(params);
  int stale = 0;
  std::vector<std::size_t> order(batches.size());
  for (int epoch = 1; epoch <= config.max_epochs && stale < config.patience; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double total = 0.0;
    for (std::size_t b : order) {
      std::vector<const TrialFeatureSeq*> batch;
      std::vector<const PrefixExample*> exs;
      for (std::size_t i : batches[b]) {
        batch.push_back(&seqs[i]);
        exs.push_back(&train[i]);
      }
      adam.zero_grad();
      const auto out = m.net_->forward(batch, ctx);
      const auto loss = m.net_->loss(out, exs);
      nn::backward(loss);
      adam.step();
      total += loss.item();
    }
    const EpochRecord r = record(epoch, total / static_cast<double>(order.size()));
    if (r.dev_rmse < best.dev_rmse || (r.dev_rmse == best.dev_rmse && r.dev_loss < best.dev_loss)) {
      best = r;
      m.best_epoch_ = epoch;
      best_values = snapshot(params);
      stale = 0;
    } else {
      ++stale;
    }
  }
  restore(params, best_values);
  return m;
}

TrainedModel train_model(std::span<const PrefixExample> train, std::span<const PrefixExample> dev,
                         const FeatureSources& sources, const ModelConfig& config, const TrainOptions& options) {
  if (config.variant == ModelVariant::SvmCr) return train_svr(train, sources, config);
  return train_neural(train, dev, sources, config, options);
}

std::vector<Prediction> predict(const TrainedModel& model, std::span<const PrefixExample> examples,
                                const FeatureSources& sources) {
  const auto ids = review_ids_of(examples);
  return predict(model, examples, model.feature_bank(ids, sources));
}

std::vector<Prediction> predict(const TrainedModel& model, std::span<const PrefixExample> examples,
                                const FeatureBank& bank) {
  const ModelConfig& cfg = model.config();
  std::vector<Prediction> out(examples.size());
  if (const SvrModel* svr = model.svr()) {
    for (std::size_t i = 0; i < examples.size(); ++i) {
      const double raw = svr->predict(svm_representation(examples[i], bank, cfg.behavioral));
      out[i].raw_rate = raw;
      out[i].choice_rate = clip_rate(raw);
    }
    return out;
  }
  const NeuralNet* net = model.net();
  if (net == nullptr) throw ValidationError("model has no parameters");
  nn::NoGradGuard guard;
  const nn::ForwardContext ctx{};
  for (std::size_t start = 0; start < examples.size(); start += kPredictChunk) {
    const std::size_t end = std::min(examples.size(), start + kPredictChunk);
    std::vector<TrialFeatureSeq> seqs;
    std::vector<const TrialFeatureSeq*> batch;
    seqs.reserve(end - start);
    for (std::size_t i = start; i < end; ++i) seqs.push_back(sequence_representation(examples[i], bank, cfg.behavioral));
    for (const auto& s : seqs) batch.push_back(&s);
    const auto res = net->forward(batch, ctx);
    std::size_t row = 0;
    for (std::size_t i = start; i < end; ++i) {
      Prediction& p = out[i];
      const std::size_t len = res.lengths[i - start];
      if (has_trial_head(cfg.variant)) {
        for (std::size_t k = 0; k < len; ++k, ++row) {
          const double prob = res.trial_probs.value()(row, 0);
          p.probabilities.push_back(prob);
          p.decisions.push_back(prob >= 0.5 ? 1 : 0);
        }
      }
      if (has_rate_head(cfg.variant)) {
        p.raw_rate = res.rates.value()(i - start, 0);
        p.choice_rate = clip_rate(*p.raw_rate);
      } else {
        double hotels = 0.0;
        for (int d : p.decisions) hotels += d;
        p.choice_rate = hotels / static_cast<double>(len);
      }
    }
  }
  return out;
}

TrialPredictions predict_trials(const TrainedModel& model, const PrefixExample& example,
                                const FeatureSources& sources) {
  if (!has_trial_head(model.config().variant)) {
    throw ValidationError(std::string(to_string(model.config().variant)) + " does not predict per-trial decisions");
  }
  auto p = predict(model, std::span(&example, 1), sources);
  return {std::move(p[0].probabilities), std::move(p[0].decisions)};
}

double predict_choice_rate(const TrainedModel& model, const PrefixExample& example, const FeatureSources& sources) {
  return predict(model, std::span(&example, 1), sources)[0].choice_rate;
}

nlohmann::json TrainedModel::manifest() const {
  nlohmann::json j;
  j["format"] = kFormat;
  j["kind"] = svr_ ? "svr" : "neural";
  j["config"] = config_.to_json();
  j["seed"] = config_.seed;
  j["grid_cell"] = config_.grid_key();
  j["input_dim"] = input_dim_;
  j["best_epoch"] = best_epoch_;
  const double r = best_dev_rmse();
  j["dev_rmse"] = std::isnan(r) ? nlohmann::json(nullptr) : nlohmann::json(r);
  auto& log = j["log"] = nlohmann::json::array();
  for (const auto& e : log_) log.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"dev_rmse", e.dev_rmse}, {"dev_loss", e.dev_loss}});
  return j;
}

void TrainedModel::save(const std::filesystem::path& path) const {
  nlohmann::json j = manifest();
  j["standardizer"] = {{"mean", standardizer_.mean}, {"scale", standardizer_.scale}};
  nn::ParamList params;
  if (svr_) {
    j["svr"] = {{"gamma", svr_->gamma()}, {"rho", svr_->rho()}, {"kernel", svr_->kernel_spec().str()},
                {"support", svr_->support_size()}};
    nn::Matrix sv(svr_->support_size(), input_dim_);
    for (std::size_t i = 0; i < svr_->support_size(); ++i)
      std::copy(svr_->support_vectors()[i].begin(), svr_->support_vectors()[i].end(), &sv.data[i * input_dim_]);
    nn::Matrix coef(1, svr_->support_size(), svr_->dual_coefficients());
    params.push_back({"svr.support", nn::constant(std::move(sv))});
    params.push_back({"svr.coef", nn::constant(std::move(coef))});
  } else if (net_) {
    params = net_->params();
  } else {
    throw ValidationError("cannot save an untrained model");
  }
  nn::write_param_file(path, j.dump(), params);
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  const nn::ParamFile file = nn::read_param_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(file.config);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": model header is not JSON: " + e.what());
  }
  if (j.value("format", "") != kFormat) throw ParseError(path.string() + ": not a model file");
  TrainedModel m;
  try {
    m.config_ = ModelConfig::from_json(j.at("config"));
    m.input_dim_ = j.at("input_dim").get<std::size_t>();
    m.best_epoch_ = j.at("best_epoch").get<int>();
    for (const auto& e : j.at("log"))
      m.log_.push_back({e.at("epoch").get<int>(), e.at("train_loss").get<double>(), e.at("dev_rmse").get<double>(),
                        e.at("dev_loss").get<double>()});
    m.standardizer_.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
    m.standardizer_.scale = j.at("standardizer").at("scale").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": bad model header: " + e.what());
  }
  if (j.at("kind") == "svr") {
    const nn::Matrix* sv = nullptr;
    const nn::Matrix* coef = nullptr;
    for (const auto& t : file.tensors) {
      if (t.name == "svr.support") sv = &t.value;
      if (t.name == "svr.coef") coef = &t.value;
    }
    const auto n = j.at("svr").at("support").get<std::size_t>();
    if (!sv || !coef || sv->rows != n || sv->cols != m.input_dim_ || coef->cols != n) {
      throw ParseError(path.string() + ": SVR tensors missing or malformed");
    }
    std::vector<std::vector<double>> rows(n);
    for (std::size_t i = 0; i < n; ++i)
      rows[i].assign(sv->data.begin() + static_cast<long>(i * m.input_dim_),
                     sv->data.begin() + static_cast<long>((i + 1) * m.input_dim_));
    m.svr_ = SvrModel::from_parts(m.config_.kernel, j.at("svr").at("gamma").get<double>(),
                                  j.at("svr").at("rho").get<double>(), std::move(rows), coef->data);
  } else {
    m.net_ = std::make_shared<NeuralNet>(m.config_, m.input_dim_);
    nn::load_into(file, m.net_->params());
  }
  return m;
}

}  // namespace dmpred
