#include <gtest/gtest.h>

#include <cmath>

#include "dmpred/models/model.hpp"
#include "dmpred/simulator.hpp"
#include "fixtures.hpp"

namespace dmpred {
namespace {

struct Fixture {
  Dataset data;
  HCTable hc;
  EmbeddingTable emb;
  std::vector<PrefixExample> train, dev;
};

Fixture make_fixture(const std::string& dm = "feature:13", int pairs = 12) {
  sim::SimConfig cfg;
  cfg.n_pairs = pairs;
  cfg.seed = 31;
  cfg.dm = sim::DmPolicy::parse(dm);
  Fixture f{sim::generate_dataset(cfg), {}, {}, {}, {}};
  f.hc = hc_feature_table(f.data, Lexicon::defaults());
  f.emb = sim::simulated_embeddings(f.data.hotels(), 6, 2);
  const auto all = expand_games(f.data.games());
  const std::size_t cut = static_cast<std::size_t>(pairs - pairs / 4) * 10;
  f.train.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(cut));
  f.dev.assign(all.begin() + static_cast<std::ptrdiff_t>(cut), all.end());
  return f;
}

ModelConfig small(ModelVariant v) {
  ModelConfig c;
  c.variant = v;
  c.hidden = 8;
  c.model_dim = 8;
  c.heads = 2;
  c.transformer_layers = 1;
  c.max_epochs = 3;
  c.seed = 5;
  return c;
}

std::vector<PrefixExample> drop_empty_prefix(const std::vector<PrefixExample>& ex) {
  std::vector<PrefixExample> out;
  for (const auto& e : ex)
    if (e.prefix_size > 0) out.push_back(e);
  return out;
}

TEST(Config, JsonRoundTripAndValidation) {
  auto c = small(ModelVariant::LstmTrcr);
  c.loss = {2, 2, 1};
  c.kernel = KernelSpec::parse("poly5");
  const auto back = ModelConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  c.dropout = 1.5;
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_EQ(min_prefix(ModelVariant::TransformerCr), 1);
  EXPECT_EQ(min_prefix(ModelVariant::LstmCr), 0);
  for (auto v : all_variants()) EXPECT_EQ(parse_model_variant(to_string(v)), v);
}

TEST(Config, GridCoversAxes) {
  const auto g = hyperparameter_grid(small(ModelVariant::SvmCr));
  EXPECT_GE(g.size(), 3u);
  GridOverrides o;
  o.hidden = {4, 8};
  o.dropout = {0.0};
  o.lstm_layers = {1};
  EXPECT_EQ(hyperparameter_grid(small(ModelVariant::LstmTr), o).size(), 2u);
}

TEST(Train, ZeroEpochsRecordsInitialDevRmse) {
  const auto f = make_fixture();
  auto c = small(ModelVariant::LstmCr);
  c.max_epochs = 0;
  const auto m = train_neural(f.train, f.dev, {&f.hc, nullptr}, c);
  ASSERT_EQ(m.log().size(), 1u);
  EXPECT_EQ(m.log()[0].epoch, 0);
  EXPECT_EQ(m.best_epoch(), 0);
  EXPECT_TRUE(std::isfinite(m.best_dev_rmse()));
  EXPECT_GT(m.best_dev_rmse(), 0.0);
}

TEST(Train, DeterministicLogs) {
  const auto f = make_fixture();
  auto c = small(ModelVariant::LstmTrcr);
  c.dropout = 0.2;
  const auto a = train_neural(f.train, f.dev, {&f.hc, nullptr}, c);
  const auto b = train_neural(f.train, f.dev, {&f.hc, nullptr}, c);
  ASSERT_EQ(a.log().size(), b.log().size());
  for (std::size_t i = 0; i < a.log().size(); ++i) {
    EXPECT_EQ(a.log()[i].train_loss, b.log()[i].train_loss);
    EXPECT_EQ(a.log()[i].dev_rmse, b.log()[i].dev_rmse);
  }
}

TEST(Train, TransformerRejectsEmptyPrefix) {
  const auto f = make_fixture();
  EXPECT_THROW(train_neural(f.train, f.dev, {&f.hc, nullptr}, small(ModelVariant::TransformerTr)), ValidationError);
  const auto m = train_neural(drop_empty_prefix(f.train), drop_empty_prefix(f.dev), {&f.hc, nullptr},
                              small(ModelVariant::TransformerTrcr));
  EXPECT_EQ(m.log().size(), 4u);
  EXPECT_EQ(drop_empty_prefix(f.train).size() * 10, f.train.size() * 9);
}

TEST(Train, RejectsEmptySets) {
  const auto f = make_fixture();
  EXPECT_THROW(train_neural({}, f.dev, {&f.hc, nullptr}, small(ModelVariant::LstmTr)), ValidationError);
  EXPECT_THROW(train_neural(f.train, {}, {&f.hc, nullptr}, small(ModelVariant::LstmTr)), ValidationError);
  EXPECT_THROW(train_neural(f.train, f.dev, {&f.hc, nullptr}, small(ModelVariant::SvmCr)), ValidationError);
}

TEST(Train, BestEpochMatchesMinimumDevRmse) {
  const auto f = make_fixture("repeat:0.85", 16);
  auto c = small(ModelVariant::LstmCr);
  c.max_epochs = 6;
  const auto m = train_neural(f.train, f.dev, {&f.hc, nullptr}, c);
  double best = m.log()[0].dev_rmse;
  for (const auto& r : m.log()) best = std::min(best, r.dev_rmse);
  EXPECT_EQ(m.best_dev_rmse(), best);
  const auto& chosen = m.log()[static_cast<std::size_t>(m.best_epoch())];
  for (const auto& r : m.log())
    if (r.dev_rmse == chosen.dev_rmse) EXPECT_GE(r.dev_loss, chosen.dev_loss);
  // The restored checkpoint scores exactly its logged dev RMSE.
  const auto preds = predict(m, f.dev, FeatureSources{&f.hc, nullptr});
  double se = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) se += std::pow(preds[i].choice_rate - f.dev[i].choice_rate, 2);
  EXPECT_NEAR(100 * std::sqrt(se / static_cast<double>(preds.size())), best, 1e-9);
}

TEST(Train, DevRmseTiesGoToLowerDevLoss) {
  // Perfectly learnable rule: dev RMSE of thresholded decisions hits 0 early
  // and stays there, so later epochs differ only in dev loss.
  const auto f = make_fixture("always-hotel", 12);
  auto c = small(ModelVariant::LstmTr);
  c.max_epochs = 8;
  const auto m = train_neural(f.train, f.dev, {&f.hc, nullptr}, c);
  int zeros = 0;
  for (const auto& r : m.log()) zeros += r.dev_rmse == 0.0;
  ASSERT_GE(zeros, 2);
  const auto& chosen = m.log()[static_cast<std::size_t>(m.best_epoch())];
  EXPECT_EQ(chosen.dev_rmse, 0.0);
  for (const auto& r : m.log())
    if (r.dev_rmse == 0.0) EXPECT_GE(r.dev_loss, chosen.dev_loss);
}

TEST(Predict, ShapesAndRanges) {
  const auto f = make_fixture();
  const FeatureSources src{&f.hc, &f.emb};
  auto c = small(ModelVariant::LstmTrcr);
  c.textual = TextualSource::HcDnn;
  const auto m = train_neural(f.train, f.dev, src, c);
  const auto preds = predict(m, f.dev, src);
  ASSERT_EQ(preds.size(), f.dev.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    EXPECT_EQ(preds[i].probabilities.size(), static_cast<std::size_t>(f.dev[i].suffix_size()));
    for (double p : preds[i].probabilities) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
    EXPECT_TRUE(preds[i].raw_rate.has_value());  // both heads in one pass
    EXPECT_GE(preds[i].choice_rate, 0.0);
    EXPECT_LE(preds[i].choice_rate, 1.0);
  }
  const auto& last = f.dev[9];
  ASSERT_EQ(last.prefix_size, 9);
  EXPECT_EQ(predict_trials(m, last, src).probabilities.size(), 1u);
}

TEST(Predict, TrRateIsDecisionMean) {
  const auto f = make_fixture();
  const FeatureSources src{&f.hc, nullptr};
  const auto m = train_neural(f.train, f.dev, src, small(ModelVariant::LstmTr));
  const auto preds = predict(m, f.dev, src);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    int hotel = 0;
    for (std::size_t k = 0; k < preds[i].decisions.size(); ++k) {
      EXPECT_EQ(preds[i].decisions[k], preds[i].probabilities[k] >= 0.5);
      hotel += preds[i].decisions[k];
    }
    EXPECT_NEAR(preds[i].choice_rate * f.dev[i].suffix_size(), hotel, 1e-9);
    EXPECT_NEAR(predict_choice_rate(m, f.dev[i], src), preds[i].choice_rate, 1e-12);
  }
}

TEST(Predict, BatchInvariant) {
  const auto f = make_fixture();
  const FeatureSources src{&f.hc, nullptr};
  for (auto v : {ModelVariant::LstmTrcr, ModelVariant::TransformerTrcr}) {
    const auto tr = is_transformer(v) ? drop_empty_prefix(f.train) : f.train;
    const auto dv = is_transformer(v) ? drop_empty_prefix(f.dev) : f.dev;
    const auto m = train_neural(tr, dv, src, small(v));
    const auto all = predict(m, dv, src);
    for (std::size_t i = 0; i < dv.size(); i += 7) {
      const auto one = predict(m, std::span(&dv[i], 1), src);
      EXPECT_NEAR(one[0].raw_rate.value(), all[i].raw_rate.value(), 1e-12);
      for (std::size_t k = 0; k < one[0].probabilities.size(); ++k)
        EXPECT_NEAR(one[0].probabilities[k], all[i].probabilities[k], 1e-12);
    }
  }
}

TEST(Predict, CrModelHasNoTrialHead) {
  const auto f = make_fixture();
  const FeatureSources src{&f.hc, nullptr};
  const auto m = train_neural(f.train, f.dev, src, small(ModelVariant::LstmCr));
  EXPECT_THROW(predict_trials(m, f.dev[0], src), ValidationError);
  EXPECT_TRUE(predict(m, f.dev, src)[0].probabilities.empty());
}

TEST(Predict, ClipRule) {
  EXPECT_EQ(clip_rate(1.3), 1.0);
  EXPECT_EQ(clip_rate(-0.2), 0.0);
  EXPECT_EQ(clip_rate(0.42), 0.42);
}

TEST(SaveLoad, NeuralRoundTrip) {
  const auto f = make_fixture();
  const FeatureSources src{&f.hc, &f.emb};
  auto c = small(ModelVariant::TransformerTrcr);
  c.textual = TextualSource::Dnn;
  const auto tr = drop_empty_prefix(f.train), dv = drop_empty_prefix(f.dev);
  const auto m = train_neural(tr, dv, src, c);
  const auto dir = testing::scratch_dir("model_rt");
  m.save(dir / "m.bin");
  const auto back = TrainedModel::load(dir / "m.bin");
  EXPECT_EQ(back.config().to_json(), m.config().to_json());
  EXPECT_EQ(back.best_epoch(), m.best_epoch());
  const auto a = predict(m, dv, src), b = predict(back, dv, src);
  for (std::size_t i = 0; i < a.size(); ++i) {
    // float32 parameters on disk
    EXPECT_NEAR(a[i].raw_rate.value(), b[i].raw_rate.value(), 1e-4);
    EXPECT_EQ(back.manifest()["kind"], m.manifest()["kind"]);
  }
}

TEST(SaveLoad, SvrRoundTrip) {
  const auto f = make_fixture();
  const FeatureSources src{&f.hc, nullptr};
  const auto m = train_svr(f.train, src, small(ModelVariant::SvmCr));
  const auto dir = testing::scratch_dir("svr_rt");
  m.save(dir / "m.bin");
  const auto back = TrainedModel::load(dir / "m.bin");
  const auto a = predict(m, f.dev, src), b = predict(back, f.dev, src);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].raw_rate.value(), b[i].raw_rate.value(), 1e-5);
}

TEST(Svm, FitsOwnTrainingLabelsWithinEpsilon) {
  const auto f = make_fixture("always-hotel");
  const FeatureSources src{&f.hc, nullptr};
  const auto m = train_svr(f.train, src, small(ModelVariant::SvmCr));
  for (const auto& p : predict(m, f.train, src)) EXPECT_NEAR(p.raw_rate.value(), 1.0, 0.1 + 1e-6);
}

}  // namespace
}  // namespace dmpred
