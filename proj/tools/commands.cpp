#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "dmpred/csv.hpp"
#include "dmpred/dataset_io.hpp"
#include "dmpred/eval/cv.hpp"
#include "dmpred/features.hpp"
#include "dmpred/lexicon.hpp"
#include "dmpred/models/model.hpp"
#include "dmpred/neuro/serialize.hpp"
#include "dmpred/simulator.hpp"

#ifndef DMPRED_VERSION
#define DMPRED_VERSION "unknown"
#endif

namespace dmpred::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t require_seed(const Globals& g, const char* command) {
  if (!g.seed) throw UsageError(std::string(command) + " is stochastic and needs --seed");
  return *g.seed;
}

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  if (!fs::is_regular_file(path)) throw UsageError(std::string(flag) + ": no such file '" + path + "'");
}

void optional_file(const std::string& path, const char* flag) {
  if (!path.empty()) require_file(path, flag);
}

fs::path prepare_out(const Globals& g) {
  std::error_code ec;
  fs::create_directories(g.out, ec);
  if (ec || !fs::is_directory(g.out)) throw UsageError("--out: cannot create directory '" + g.out.string() + "'");
  return g.out;
}

bool parse_on_off(const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw UsageError("--behavioral expects on or off, got '" + v + "'");
}

nn::LossWeights parse_loss(const std::string& text) {
  nn::LossWeights w;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &w.alpha, &w.beta, &w.gamma, &tail) != 3) {
    throw UsageError("loss weights must look like 'alpha,beta,gamma', got '" + text + "'");
  }
  return w;
}

std::string loss_str(const nn::LossWeights& w) {
  std::ostringstream o;
  o << w.alpha << ',' << w.beta << ',' << w.gamma;
  return o.str();
}

json to_json(const FeatureFlags& f) {
  return {{"lexicon", f.lexicon}, {"overrides", f.overrides}, {"embeddings", f.embeddings}};
}

ModelConfig to_config(const ModelFlags& m, std::uint64_t seed) {
  ModelConfig c;
  c.variant = parse_model_variant(m.variant);
  c.textual = parse_textual_source(m.textual);
  c.behavioral = parse_on_off(m.behavioral);
  c.hidden = m.hidden;
  c.lstm_layers = m.lstm_layers;
  c.transformer_layers = m.transformer_layers;
  c.ff_multiplier = m.ff_multiplier;
  c.model_dim = m.model_dim;
  c.heads = m.heads;
  c.dropout = m.dropout;
  c.loss = parse_loss(m.loss);
  c.max_epochs = m.epochs;
  c.patience = m.patience;
  c.learning_rate = m.lr;
  c.kernel = KernelSpec::parse(m.kernel);
  c.svr_c = m.svr_c;
  c.svr_epsilon = m.svr_epsilon;
  c.seed = seed;
  c.validate();
  return c;
}

// Features for every review of `hotels`, overrides winning over detectors.
struct LoadedFeatures {
  HCTable hc;
  std::optional<EmbeddingTable> embeddings;
  std::set<std::string> overridden;

  FeatureSources sources() const { return {&hc, embeddings ? &*embeddings : nullptr}; }
};

void check_feature_files(const FeatureFlags& f) {
  optional_file(f.lexicon, "--lexicon");
  optional_file(f.overrides, "--overrides");
  optional_file(f.embeddings, "--embeddings");
}

LoadedFeatures load_features(const FeatureFlags& f, const std::vector<const std::vector<Hotel>*>& stores,
                             bool need_dnn) {
  if (need_dnn && f.embeddings.empty()) throw UsageError("textual source includes DNN but --embeddings is missing");
  LoadedFeatures out;
  const Lexicon lexicon = f.lexicon.empty() ? Lexicon::defaults() : Lexicon::load(f.lexicon);
  const HCTable overrides = f.overrides.empty() ? HCTable{} : load_feature_overrides(f.overrides);
  for (const auto* hotels : stores)
    for (const auto& h : *hotels)
      for (const auto& r : h.reviews) {
        auto it = overrides.find(r.review_id);
        if (it != overrides.end()) out.overridden.insert(r.review_id);
        out.hc.insert_or_assign(r.review_id, it != overrides.end() ? it->second : hand_crafted_features(r, lexicon));
      }
  if (!f.embeddings.empty()) out.embeddings = load_embeddings(f.embeddings);
  return out;
}

void write_predictions(const fs::path& path, std::span<const PrefixExample> examples,
                       std::span<const Prediction> preds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "pair_id,prefix_size,trial,gold_label,probability,decision,gold_rate,pred_rate\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    for (int k = 0; k < ex.suffix_size(); ++k) {
      const auto ku = static_cast<std::size_t>(k);
      csv::write_row(out, {ex.pair_id, std::to_string(ex.prefix_size), std::to_string(ex.suffix_trial_index(k)),
                           std::to_string(ex.suffix_labels[ku]),
                           preds[i].probabilities.empty() ? "" : num(preds[i].probabilities[ku]),
                           preds[i].decisions.empty() ? "" : std::to_string(preds[i].decisions[ku]),
                           num(ex.choice_rate), num(preds[i].choice_rate)});
    }
  }
}

std::vector<eval::Outcome> read_predictions(const fs::path& path) {
  csv::Table t(path, csv::read_file(path));
  const auto c_pair = t.column("pair_id"), c_pr = t.column("prefix_size"), c_trial = t.column("trial"),
             c_gold = t.column("gold_label"), c_dec = t.column("decision"), c_grate = t.column("gold_rate"),
             c_prate = t.column("pred_rate");
  std::vector<eval::Outcome> out;
  std::map<std::pair<std::string, int>, std::size_t> index;
  for (std::size_t i = 0; i < t.size(); ++i) {
    try {
      const std::string pair = t.cell(i, c_pair);
      const int pr = std::stoi(t.cell(i, c_pr));
      auto [it, fresh] = index.try_emplace({pair, pr}, out.size());
      if (fresh) {
        out.push_back({pair, pr, {}, {}, std::stod(t.cell(i, c_grate)), std::stod(t.cell(i, c_prate))});
      }
      auto& o = out[it->second];
      if (std::stoi(t.cell(i, c_trial)) != pr + 1 + static_cast<int>(o.gold_labels.size())) {
        throw ParseError("trial rows out of order");
      }
      o.gold_labels.push_back(std::stoi(t.cell(i, c_gold)));
      if (!t.cell(i, c_dec).empty()) o.pred_labels.push_back(std::stoi(t.cell(i, c_dec)));
    } catch (const std::logic_error& e) {
      throw ParseError(t.where(i) + ": bad number (" + e.what() + ")");
    } catch (const ParseError& e) {
      throw ParseError(t.where(i) + ": " + e.what());
    }
  }
  return out;
}

void print_report(const std::string& name, const eval::MetricReport& r) {
  std::printf("%-34s", name.c_str());
  if (r.accuracy) std::printf(" acc %6.2f  macroF1 %6.2f", *r.accuracy, r.trial_f1->macro);
  else std::printf(" %29s", "");
  std::printf("  rmse %6.2f  binF1 %6.2f\n", r.rmse, r.bin_f1.macro);
}

}  // namespace

void write_manifest(const Globals& g, const std::string& command, const json& args,
                    const std::vector<std::string>& outputs) {
  json m;
  m["command"] = command;
  m["version"] = DMPRED_VERSION;
  m["seed"] = g.seed ? json(*g.seed) : json(nullptr);
  m["jobs"] = g.jobs;
  m["args"] = args;
  m["config_digest"] = nn::fnv1a64(args.dump());
  m["outputs"] = outputs;
  eval::write_json(m, g.out / (command + "_manifest.json"));
}

void run_simulate(const Globals& g, const SimulateArgs& a) {
  if (a.pairs < 1) throw UsageError("--pairs must be at least 1");
  sim::SimConfig cfg;
  cfg.n_pairs = a.pairs;
  cfg.seed = require_seed(g, "simulate");
  cfg.expert = sim::ExpertPolicy::parse(a.expert);
  cfg.dm = sim::DmPolicy::parse(a.dm);
  cfg.split = parse_split_tag(a.split);
  cfg.validate();
  const fs::path out = prepare_out(g);
  const Dataset d = sim::generate_dataset(cfg, g.jobs);
  save_dataset(d, out / "games.csv", out / "reviews.csv");
  std::vector<std::string> outputs = {"games.csv", "reviews.csv"};
  if (a.embedding_dim > 0) {
    save_embeddings(sim::simulated_embeddings(d.hotels(), static_cast<std::size_t>(a.embedding_dim), cfg.seed),
                    out / "embeddings.csv");
    outputs.push_back("embeddings.csv");
  }

  std::array<double, kTrialsPerGame> per_trial{};
  double hotels = 0;
  for (const auto& game : d.games())
    for (const auto& t : game.trials) {
      const double h = t.decision == Decision::Hotel ? 1.0 : 0.0;
      hotels += h;
      per_trial[static_cast<std::size_t>(t.index - 1)] += h;
    }
  const double n = static_cast<double>(d.games().size());
  std::printf("games %zu  hotel rate %.3f\nper-trial hotel rate:", d.games().size(),
              hotels / (n * kTrialsPerGame));
  for (double v : per_trial) std::printf(" %.3f", v / n);
  std::printf("\n");
  write_manifest(g, "simulate",
                 {{"pairs", a.pairs},
                  {"expert", cfg.expert.str()},
                  {"dm", cfg.dm.str()},
                  {"split", std::string(to_string(cfg.split))},
                  {"embedding_dim", a.embedding_dim}},
                 outputs);
}

void run_featurize(const Globals& g, const FeaturizeArgs& a) {
  require_file(a.reviews, "--reviews");
  check_feature_files(a.features);
  const TextualSource source = parse_textual_source(a.textual);
  const auto hotels = load_hotels(a.reviews);
  const auto feats = load_features(a.features, {&hotels}, uses_dnn(source));
  const fs::path out = prepare_out(g);
  std::vector<std::string> order, outputs;
  for (const auto& h : hotels)
    for (const auto& r : h.reviews) order.push_back(r.review_id);

  if (uses_hc(source)) {
    save_feature_table(feats.hc, order, out / "hc_features.csv");
    std::ofstream flags(out / "hc_sources.csv", std::ios::binary);
    flags << "review_id,source\n";
    for (const auto& id : order) flags << id << ',' << (feats.overridden.contains(id) ? "override" : "detector") << '\n';
    outputs.insert(outputs.end(), {"hc_features.csv", "hc_sources.csv"});
    std::printf("hc features: %zu reviews x %zu features (%zu overridden)\n", order.size(), kHandCraftedDim,
                feats.overridden.size());
  }
  if (uses_dnn(source)) {
    for (const auto& id : order) (void)feats.embeddings->at(id);  // every review must have a vector
    const Standardizer st = Standardizer::fit(*feats.embeddings, order);
    std::ofstream stats(out / "embedding_stats.csv", std::ios::binary);
    stats << "coordinate,mean,scale\n";
    char buf[96];
    for (std::size_t i = 0; i < st.mean.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, st.mean[i], st.scale[i]);
      stats << buf;
    }
    outputs.push_back("embedding_stats.csv");
    std::printf("embeddings: %zu reviews x %zu dims\n", order.size(), feats.embeddings->dim());
  }
  write_manifest(g, "featurize", {{"reviews", a.reviews}, {"textual", a.textual}, {"features", to_json(a.features)}},
                 outputs);
}

void run_train(const Globals& g, const TrainArgs& a) {
  require_file(a.games, "--games");
  require_file(a.reviews, "--reviews");
  optional_file(a.dev_games, "--dev-games");
  check_feature_files(a.features);
  const std::uint64_t seed = require_seed(g, "train");
  const ModelConfig cfg = to_config(a.model, seed);
  const fs::path out = prepare_out(g);

  const auto hotels = load_hotels(a.reviews);
  const Dataset data = load_dataset(a.games, hotels);
  const auto feats = load_features(a.features, {&hotels}, uses_dnn(cfg.textual));
  const int mp = min_prefix(cfg.variant);
  std::vector<PrefixExample> train, dev;
  if (!a.dev_games.empty()) {
    train = expand_games(data.games(), mp);
    dev = expand_games(load_dataset(a.dev_games, hotels).games(), mp);
  } else if (cfg.variant != ModelVariant::SvmCr) {
    if (!(a.dev_fraction > 0.0 && a.dev_fraction < 1.0)) throw UsageError("--dev-fraction must be in (0, 1)");
    std::vector<std::string> pairs;
    for (const auto& game : data.games()) pairs.push_back(game.pair_id);
    std::mt19937_64 rng(seed);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const auto n_dev = std::max<std::size_t>(1, static_cast<std::size_t>(a.dev_fraction * pairs.size()));
    if (n_dev >= pairs.size()) throw UsageError("not enough pairs for a dev split");
    pairs.resize(n_dev);
    const auto all = expand_games(data.games(), mp);
    train = eval::select_pairs(all, pairs, false);
    dev = eval::select_pairs(all, pairs, true);
  } else {
    train = expand_games(data.games(), mp);
  }

  TrainOptions opts;
  opts.on_epoch = [](const EpochRecord& e) {
    std::printf("epoch %3d  loss %.6f  dev rmse %.4f  dev loss %.6f\n", e.epoch, e.train_loss, e.dev_rmse, e.dev_loss);
    std::fflush(stdout);
  };
  const TrainedModel model = train_model(train, dev, feats.sources(), cfg, opts);
  model.save(out / "model.bin");
  eval::write_json(model.manifest(), out / "model.json");
  std::printf("trained %s on %zu examples; best epoch %d\n", eval::run_name(cfg).c_str(), train.size(),
              model.best_epoch());
  write_manifest(g, "train",
                 {{"games", a.games},
                  {"reviews", a.reviews},
                  {"dev_games", a.dev_games},
                  {"dev_fraction", a.dev_fraction},
                  {"features", to_json(a.features)},
                  {"model", cfg.to_json()}},
                 {"model.bin", "model.json"});
}

void run_evaluate(const Globals& g, const EvaluateArgs& a) {
  require_file(a.model, "--model");
  require_file(a.games, "--games");
  require_file(a.reviews, "--reviews");
  check_feature_files(a.features);
  const TrainedModel model = TrainedModel::load(a.model);
  const fs::path out = prepare_out(g);
  const auto hotels = load_hotels(a.reviews);
  const Dataset data = load_dataset(a.games, hotels);
  const auto feats = load_features(a.features, {&hotels}, uses_dnn(model.config().textual));
  const auto examples = expand_games(data.games(), min_prefix(model.config().variant));
  const auto preds = predict(model, examples, feats.sources());
  write_predictions(out / "predictions.csv", examples, preds);

  const auto outcomes = eval::outcomes_of(examples, preds);
  const auto report = eval::compute_report(outcomes);
  const auto ablation = eval::ablation_report(outcomes);
  eval::write_json({{"model", eval::run_name(model.config())},
                    {"report", eval::to_json(report)},
                    {"ablation", eval::to_json(ablation)}},
                   out / "metrics.json");
  print_report(eval::run_name(model.config()), report);
  write_manifest(g, "evaluate",
                 {{"model", a.model}, {"games", a.games}, {"reviews", a.reviews}, {"features", to_json(a.features)}},
                 {"predictions.csv", "metrics.json"});
}

void run_cv(const Globals& g, const CvArgs& a) {
  require_file(a.train_games, "--train-games");
  require_file(a.train_reviews, "--train-reviews");
  require_file(a.test_games, "--test-games");
  require_file(a.test_reviews, "--test-reviews");
  check_feature_files(a.features);
  const std::uint64_t seed = require_seed(g, "cv");
  if (a.baselines_only && !a.variants.empty()) throw UsageError("--baselines-only conflicts with --variant");
  if (!a.baselines_only && a.variants.empty()) throw UsageError("give at least one --variant or --baselines-only");
  if (a.baselines_only && a.no_baselines) throw UsageError("--baselines-only conflicts with --no-baselines");

  GridOverrides ov;
  ov.hidden = a.grid_hidden;
  ov.lstm_layers = a.grid_lstm_layers;
  ov.transformer_layers = a.grid_transformer_layers;
  ov.ff_multiplier = a.grid_ff;
  ov.dropout = a.grid_dropout;
  for (const auto& k : a.grid_kernel) ov.kernel.push_back(KernelSpec::parse(k));
  for (const auto& l : a.grid_loss) ov.loss.push_back(parse_loss(l));

  std::vector<std::vector<ModelConfig>> grids;
  bool need_dnn = false;
  for (const auto& v : a.variants)
    for (const auto& t : a.textual)
      for (const auto& b : a.behavioral) {
        ModelFlags m = a.model;
        m.variant = v;
        m.textual = t;
        m.behavioral = b;
        const ModelConfig base = to_config(m, seed);
        need_dnn = need_dnn || uses_dnn(base.textual);
        grids.push_back(a.no_grid ? std::vector<ModelConfig>{base} : hyperparameter_grid(base, ov));
      }

  const fs::path out = prepare_out(g);
  const auto tv_hotels = load_hotels(a.train_reviews);
  const auto te_hotels = load_hotels(a.test_reviews);
  const Dataset tv = load_dataset(a.train_games, tv_hotels, SplitTag::TrainValidation);
  const Dataset te = load_dataset(a.test_games, te_hotels, SplitTag::Test);
  const auto feats = load_features(a.features, {&tv_hotels, &te_hotels}, need_dnn);

  eval::CvOptions opts;
  opts.folds = a.folds;
  opts.seed = seed;
  opts.jobs = g.jobs;
  opts.baselines = !a.no_baselines;
  opts.ewg_draws = a.ewg_draws;
  const auto result = eval::six_fold_cv(tv, te, grids, feats.sources(), opts);

  eval::write_json(eval::metrics_json(result), out / "metrics.json");
  eval::write_ablation_outputs(result.runs, out / "ablation");
  std::vector<std::string> outputs = {"metrics.json", "ablation/"};
  if (a.save_models) {
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
      const auto& run = result.runs[r];
      if (run.baseline) continue;
      for (const auto& f : run.folds) {
        const fs::path dir = out / "models" / ("run" + std::to_string(r)) / ("fold" + std::to_string(f.fold));
        fs::create_directories(dir);
        f.model->save(dir / "model.bin");
        eval::write_json(f.model->manifest(), dir / "model.json");
      }
    }
    outputs.push_back("models/");
  }
  for (const auto& r : result.runs) print_report(r.name, r.mean);

  json args = {{"train_games", a.train_games},
               {"train_reviews", a.train_reviews},
               {"test_games", a.test_games},
               {"test_reviews", a.test_reviews},
               {"variants", a.variants},
               {"textual", a.textual},
               {"behavioral", a.behavioral},
               {"baselines", opts.baselines},
               {"no_grid", a.no_grid},
               {"folds", a.folds},
               {"ewg_draws", a.ewg_draws},
               {"features", to_json(a.features)}};
  json cells = json::array();
  for (const auto& grid : grids) cells.push_back(grid.size());
  args["grid_sizes"] = cells;
  std::vector<std::string> losses;
  for (const auto& l : ov.loss) losses.push_back(loss_str(l));
  args["grid_loss"] = losses;
  write_manifest(g, "cv", args, outputs);
}

void run_ablate(const Globals& g, const AblateArgs& a) {
  if (a.predictions.empty()) throw UsageError("--predictions is required");
  std::vector<eval::RunResult> runs;
  json sources = json::array();
  for (const auto& spec : a.predictions) {
    const auto eq = spec.find('=');
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    const std::string name = eq == std::string::npos ? fs::path(path).stem().string() : spec.substr(0, eq);
    require_file(path, "--predictions");
    const auto outcomes = read_predictions(path);
    eval::RunResult r;
    r.name = name;
    r.mean = eval::compute_report(outcomes);
    r.mean_ablation = eval::ablation_report(outcomes);
    runs.push_back(std::move(r));
    sources.push_back({{"name", name}, {"path", path}});
  }
  const fs::path out = prepare_out(g);
  eval::write_ablation_outputs(runs, out);
  for (const auto& r : runs) print_report(r.name, r.mean);
  write_manifest(g, "ablate", {{"predictions", sources}}, {"ablation.csv", "*.svg"});
}

}  // namespace dmpred::cli
