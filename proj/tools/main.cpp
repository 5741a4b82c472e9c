#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "commands.hpp"
#include "dmpred/parallel.hpp"

namespace {

using namespace dmpred::cli;

void add_feature_flags(CLI::App* cmd, FeatureFlags& f) {
  cmd->add_option("--lexicon", f.lexicon, "Lexicon file (default: built-in)");
  cmd->add_option("--overrides", f.overrides, "Hand-labelled HC feature rows (review_id,f1..f42)");
  cmd->add_option("--embeddings", f.embeddings, "Review embedding file (needed for dnn sources)");
}

void add_model_flags(CLI::App* cmd, ModelFlags& m, bool variant) {
  if (variant) cmd->add_option("--variant", m.variant, "svm-cr, lstm-tr, lstm-cr, lstm-trcr, transformer-tr, ...");
  if (variant) {
    cmd->add_option("--textual", m.textual, "hc, dnn or hc+dnn");
    cmd->add_option("--behavioral", m.behavioral, "on or off");
  }
  cmd->add_option("--hidden", m.hidden, "LSTM hidden size");
  cmd->add_option("--lstm-layers", m.lstm_layers, "Stacked LSTM layers");
  cmd->add_option("--transformer-layers", m.transformer_layers, "Encoder and decoder layers");
  cmd->add_option("--ff-multiplier", m.ff_multiplier, "Transformer feed-forward width / model width");
  cmd->add_option("--model-dim", m.model_dim, "Transformer model width");
  cmd->add_option("--heads", m.heads, "Attention heads");
  cmd->add_option("--dropout", m.dropout, "Dropout rate");
  cmd->add_option("--loss", m.loss, "TRCR loss weights alpha,beta,gamma");
  cmd->add_option("--epochs", m.epochs, "Maximum epochs");
  cmd->add_option("--patience", m.patience, "Early-stopping patience");
  cmd->add_option("--lr", m.lr, "Adam learning rate");
  cmd->add_option("--kernel", m.kernel, "SVR kernel: rbf, linear, poly<d>");
  cmd->add_option("--svr-c", m.svr_c, "SVR box constraint");
  cmd->add_option("--svr-epsilon", m.svr_epsilon, "SVR tube width");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision prediction for repeated language-based persuasion games"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI file with flag values; command-line flags win");

  Globals g;
  g.jobs = dmpred::default_jobs();
  std::uint64_t seed = 0;
  std::string out = ".";
  auto* seed_opt = app.add_option("--seed", seed, "Seed for every stochastic step")->group("Global");
  app.add_option("--out", out, "Output directory")->group("Global");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber)->group("Global");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Generate synthetic games and reviews");
  c_sim->add_option("--pairs", sim.pairs, "Number of games")->check(CLI::Range(1, 1000000));
  c_sim->add_option("--expert", sim.expert, "highest, median, random, threshold:<score>");
  c_sim->add_option("--dm", sim.dm, "always-hotel, feature:<k>, match:<p>, repeat:<s>");
  c_sim->add_option("--split", sim.split, "train_validation or test");
  c_sim->add_option("--embedding-dim", sim.embedding_dim, "Also write simulated review embeddings of this width");

  FeaturizeArgs feat;
  auto* c_feat = app.add_subcommand("featurize", "Compute textual feature matrices");
  c_feat->add_option("--reviews", feat.reviews, "reviews.csv")->required();
  c_feat->add_option("--textual", feat.textual, "hc, dnn or hc+dnn");
  add_feature_flags(c_feat, feat.features);

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train one model");
  c_train->add_option("--games", train.games, "Training games.csv")->required();
  c_train->add_option("--reviews", train.reviews, "reviews.csv")->required();
  c_train->add_option("--dev-games", train.dev_games, "Dev games.csv (default: hold out a seeded fraction)");
  c_train->add_option("--dev-fraction", train.dev_fraction, "Fraction of pairs held out for early stopping");
  add_feature_flags(c_train, train.features);
  add_model_flags(c_train, train.model, true);

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "Score a trained model on a dataset");
  c_eval->add_option("--model", ev.model, "model.bin from train")->required();
  c_eval->add_option("--games", ev.games, "games.csv")->required();
  c_eval->add_option("--reviews", ev.reviews, "reviews.csv")->required();
  add_feature_flags(c_eval, ev.features);

  CvArgs cv;
  auto* c_cv = app.add_subcommand("cv", "Six-fold cross-validation with grid search");
  c_cv->add_option("--train-games", cv.train_games, "Train-validation games.csv")->required();
  c_cv->add_option("--train-reviews", cv.train_reviews, "Train-validation reviews.csv")->required();
  c_cv->add_option("--test-games", cv.test_games, "Test games.csv")->required();
  c_cv->add_option("--test-reviews", cv.test_reviews, "Test reviews.csv")->required();
  c_cv->add_option("--variant", cv.variants, "Model variant (repeatable)");
  c_cv->add_option("--textual", cv.textual, "Textual source (repeatable)");
  c_cv->add_option("--behavioral", cv.behavioral, "on / off (repeatable)");
  c_cv->add_flag("--baselines-only", cv.baselines_only, "Only AVG, MED, MVC and EWG");
  c_cv->add_flag("--no-baselines", cv.no_baselines, "Skip the baselines");
  c_cv->add_flag("--no-grid", cv.no_grid, "Train only the base configuration");
  c_cv->add_option("--folds", cv.folds, "Number of folds")->check(CLI::Range(2, 1000));
  c_cv->add_option("--ewg-draws", cv.ewg_draws, "EWG Monte Carlo draws")->check(CLI::PositiveNumber);
  c_cv->add_option("--grid-hidden", cv.grid_hidden, "Override the hidden-size axis");
  c_cv->add_option("--grid-lstm-layers", cv.grid_lstm_layers, "Override the LSTM layer axis");
  c_cv->add_option("--grid-transformer-layers", cv.grid_transformer_layers, "Override the Transformer layer axis");
  c_cv->add_option("--grid-ff", cv.grid_ff, "Override the feed-forward multiplier axis");
  c_cv->add_option("--grid-dropout", cv.grid_dropout, "Override the dropout axis");
  c_cv->add_option("--grid-kernel", cv.grid_kernel, "Override the SVR kernel axis");
  c_cv->add_option("--grid-loss", cv.grid_loss, "Override the TRCR loss-weight axis (alpha,beta,gamma)");
  c_cv->add_flag("--save-models", cv.save_models, "Write the selected per-fold models");
  add_feature_flags(c_cv, cv.features);
  add_model_flags(c_cv, cv.model, false);

  AblateArgs abl;
  auto* c_abl = app.add_subcommand("ablate", "Prefix-size and trial-number slices from prediction files");
  c_abl->add_option("--predictions", abl.predictions, "[name=]predictions.csv (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (seed_opt->count() > 0) g.seed = seed;
  g.out = out;
  try {
    if (*c_sim) run_simulate(g, sim);
    else if (*c_feat) run_featurize(g, feat);
    else if (*c_train) run_train(g, train);
    else if (*c_eval) run_evaluate(g, ev);
    else if (*c_cv) run_cv(g, cv);
    else if (*c_abl) run_ablate(g, abl);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
