#include "dmpred/eval/cv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "dmpred/parallel.hpp"

namespace dmpred::eval {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_run_grid(const std::vector<ModelConfig>& grid) {
  if (grid.empty()) throw ValidationError("empty hyper-parameter grid");
  const auto& a = grid.front();
  for (const auto& c : grid) {
    c.validate();
    if (c.variant != a.variant || c.textual != a.textual || c.behavioral != a.behavioral) {
      throw ValidationError("grid mixes model variants or feature configurations: " + run_name(a) + " vs " +
                            run_name(c));
    }
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// (key, value) series of one run for a slice/metric pair.
std::vector<std::pair<int, double>> series(const RunResult& run, const std::string& slice, const std::string& metric) {
  std::vector<std::pair<int, double>> out;
  if (slice == "prefix") {
    for (const auto& s : run.mean_ablation.by_prefix) {
      const auto& r = s.report;
      std::optional<double> v;
      if (metric == "accuracy") v = r.accuracy;
      else if (metric == "macro_f1" && r.trial_f1) v = r.trial_f1->macro;
      else if (metric == "rmse") v = r.rmse;
      else if (metric == "bin_macro_f1") v = r.bin_f1.macro;
      if (v) out.emplace_back(s.prefix_size, *v);
    }
  } else if (slice == "trial") {
    for (const auto& s : run.mean_ablation.by_trial) {
      std::optional<double> v;
      if (metric == "accuracy") v = s.accuracy;
      else if (metric == "macro_f1" && s.trial_f1) v = s.trial_f1->macro;
      else if (metric == "gold_hotel_fraction") v = s.gold_hotel_fraction;
      if (v) out.emplace_back(s.trial, *v);
    }
  } else {
    throw ValidationError("unknown ablation slice '" + slice + "'");
  }
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> make_folds(std::span<const std::string> pair_ids, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("need at least two folds");
  std::vector<std::string> ids(pair_ids.begin(), pair_ids.end());
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw ValidationError("duplicate pair ids");
  if (ids.size() < static_cast<std::size_t>(k)) {
    throw ValidationError(std::to_string(ids.size()) + " pairs cannot fill " + std::to_string(k) + " folds");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<std::vector<std::string>> folds(static_cast<std::size_t>(k));
  const std::size_t base = ids.size() / folds.size(), extra = ids.size() % folds.size();
  std::size_t at = 0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const std::size_t n = base + (f < extra ? 1 : 0);
    folds[f].assign(ids.begin() + static_cast<long>(at), ids.begin() + static_cast<long>(at + n));
    std::sort(folds[f].begin(), folds[f].end());
    at += n;
  }
  return folds;
}

std::vector<PrefixExample> select_pairs(std::span<const PrefixExample> examples, std::span<const std::string> pairs,
                                        bool keep) {
  const std::set<std::string, std::less<>> set(pairs.begin(), pairs.end());
  std::vector<PrefixExample> out;
  for (const auto& ex : examples)
    if (set.contains(ex.pair_id) == keep) out.push_back(ex);
  return out;
}

std::vector<Outcome> outcomes_of(std::span<const PrefixExample> examples, std::span<const Prediction> predictions) {
  if (examples.size() != predictions.size()) throw ValidationError("predictions do not align with examples");
  std::vector<Outcome> out;
  out.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    out.push_back({ex.pair_id, ex.prefix_size, ex.suffix_labels, predictions[i].decisions, ex.choice_rate,
                   predictions[i].choice_rate});
  }
  return out;
}

std::string run_name(const ModelConfig& c) {
  return std::string(to_string(c.variant)) + "/" + std::string(to_string(c.textual)) + "/" +
         (c.behavioral ? "behavioral" : "no-behavioral");
}

CvResult six_fold_cv(const Dataset& train_validation, const Dataset& test,
                     const std::vector<std::vector<ModelConfig>>& grids, const FeatureSources& sources,
                     const CvOptions& options) {
  for (const auto& g : grids) check_run_grid(g);
  CvResult result;
  std::vector<std::string> pairs;
  for (const auto& g : train_validation.games()) pairs.push_back(g.pair_id);
  result.folds = make_folds(pairs, options.folds, options.seed);
  if (test.games().empty()) throw ValidationError("empty test set");
  const std::size_t k = result.folds.size();

  if (options.baselines) {
    const auto all = expand_games(train_validation.games(), 0);
    const auto test_ex = expand_games(test.games(), 0);
    std::vector<RunResult> runs(4);
    runs[0].name = "AVG";
    runs[1].name = "MED";
    runs[2].name = "MVC";
    runs[3].name = "EWG";
    for (auto& r : runs) {
      r.baseline = true;
      r.folds.resize(k);
    }
    parallel_for(k, options.jobs, [&](std::size_t f) {
      const auto train = select_pairs(all, result.folds[f], false);
      std::vector<double> rates;
      for (const auto& ex : train) rates.push_back(ex.choice_rate);
      const std::vector<std::vector<Outcome>> outs = {constant_rate_outcomes(test_ex, avg_baseline(rates)),
                                                      constant_rate_outcomes(test_ex, med_baseline(rates)),
                                                      constant_label_outcomes(test_ex, mvc_baseline(train))};
      for (std::size_t b = 0; b < outs.size(); ++b) {
        runs[b].folds[f] = {static_cast<int>(f), train.size(), 0, kNaN, compute_report(outs[b]),
                            ablation_report(outs[b]), nullptr};
      }
      runs[3].folds[f] = {static_cast<int>(f), train.size(), 0, kNaN,
                          ewg_baseline(train, test_ex, options.ewg_draws, options.seed * 1000003ULL + f), {}, nullptr};
    });
    for (auto& r : runs) {
      std::vector<MetricReport> reps;
      std::vector<AblationReport> abl;
      for (const auto& f : r.folds) {
        reps.push_back(f.test);
        abl.push_back(f.ablation);
      }
      r.mean = mean_report(reps);
      r.mean_ablation = mean_ablation(abl);
      result.runs.push_back(std::move(r));
    }
  }

  // One task per (run, cell, fold).
  struct Task {
    std::size_t run, cell, fold;
  };
  std::vector<Task> tasks;
  std::vector<std::vector<PrefixExample>> examples(grids.size());
  for (std::size_t r = 0; r < grids.size(); ++r) {
    examples[r] = expand_games(train_validation.games(), min_prefix(grids[r].front().variant));
    for (std::size_t c = 0; c < grids[r].size(); ++c)
      for (std::size_t f = 0; f < k; ++f) tasks.push_back({r, c, f});
  }
  std::vector<std::shared_ptr<const TrainedModel>> models(tasks.size());
  std::vector<double> dev_rmse(tasks.size());
  std::vector<std::size_t> n_train(tasks.size()), n_dev(tasks.size());
  parallel_for(tasks.size(), options.jobs, [&](std::size_t t) {
    const auto& task = tasks[t];
    const auto train = select_pairs(examples[task.run], result.folds[task.fold], false);
    const auto dev = select_pairs(examples[task.run], result.folds[task.fold], true);
    auto m = std::make_shared<TrainedModel>(train_model(train, dev, sources, grids[task.run][task.cell]));
    double r = m->best_dev_rmse();
    if (std::isnan(r)) {
      // SVR: score the held-out fold directly.
      const auto pred = predict(*m, dev, sources);
      std::vector<double> p, g;
      for (std::size_t i = 0; i < dev.size(); ++i) {
        p.push_back(pred[i].choice_rate);
        g.push_back(dev[i].choice_rate);
      }
      r = rmse(p, g);
    }
    models[t] = std::move(m);
    dev_rmse[t] = r;
    n_train[t] = train.size();
    n_dev[t] = dev.size();
  });

  std::size_t t0 = 0;
  for (std::size_t r = 0; r < grids.size(); ++r) {
    RunResult run;
    run.name = run_name(grids[r].front());
    for (std::size_t c = 0; c < grids[r].size(); ++c) {
      GridCell cell;
      cell.config = grids[r][c];
      for (std::size_t f = 0; f < k; ++f) cell.dev_rmse.push_back(dev_rmse[t0 + c * k + f]);
      double s = 0.0;
      for (double v : cell.dev_rmse) s += v;
      cell.mean_dev_rmse = s / static_cast<double>(k);
      if (run.grid.empty() || cell.mean_dev_rmse < run.grid[run.selected].mean_dev_rmse) run.selected = c;
      run.grid.push_back(std::move(cell));
    }
    const auto test_ex = expand_games(test.games(), min_prefix(grids[r].front().variant));
    run.folds.resize(k);
    parallel_for(k, options.jobs, [&](std::size_t f) {
      const std::size_t t = t0 + run.selected * k + f;
      const auto outs = outcomes_of(test_ex, predict(*models[t], test_ex, sources));
      run.folds[f] = {static_cast<int>(f), n_train[t], n_dev[t], dev_rmse[t], compute_report(outs),
                      ablation_report(outs), models[t]};
    });
    std::vector<MetricReport> reps;
    std::vector<AblationReport> abl;
    for (const auto& f : run.folds) {
      reps.push_back(f.test);
      abl.push_back(f.ablation);
    }
    run.mean = mean_report(reps);
    run.mean_ablation = mean_ablation(abl);
    result.runs.push_back(std::move(run));
    t0 += grids[r].size() * k;
  }
  return result;
}

nlohmann::json metrics_json(const CvResult& result) {
  nlohmann::json j;
  j["folds"] = result.folds;
  auto& runs = j["runs"] = nlohmann::json::array();
  for (const auto& r : result.runs) {
    nlohmann::json jr = {{"name", r.name}, {"baseline", r.baseline}};
    jr["mean"] = to_json(r.mean);
    jr["mean_ablation"] = to_json(r.mean_ablation);
    if (!r.baseline) {
      jr["selected"] = r.grid[r.selected].config.grid_key();
      jr["selected_config"] = r.grid[r.selected].config.to_json();
      auto& grid = jr["grid"] = nlohmann::json::array();
      for (const auto& c : r.grid)
        grid.push_back({{"cell", c.config.grid_key()}, {"dev_rmse", c.dev_rmse}, {"mean_dev_rmse", c.mean_dev_rmse}});
    }
    auto& folds = jr["folds"] = nlohmann::json::array();
    for (const auto& f : r.folds) {
      nlohmann::json jf = {{"fold", f.fold},
                           {"train_examples", f.train_examples},
                           {"dev_examples", f.dev_examples},
                           {"test", to_json(f.test)}};
      jf["dev_rmse"] = std::isnan(f.dev_rmse) ? nlohmann::json(nullptr) : nlohmann::json(f.dev_rmse);
      if (f.model) jf["best_epoch"] = f.model->best_epoch();
      folds.push_back(std::move(jf));
    }
    runs.push_back(std::move(jr));
  }
  return j;
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_ablation_csv(std::span<const RunResult> runs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "run,slice,key,metric,value\n";
  for (const auto& r : runs) {
    for (const std::string metric : {"accuracy", "macro_f1", "rmse", "bin_macro_f1"})
      for (const auto& [key, v] : series(r, "prefix", metric))
        out << r.name << ",prefix," << key << ',' << metric << ',' << fmt(v) << '\n';
    for (const std::string metric : {"accuracy", "macro_f1", "gold_hotel_fraction"})
      for (const auto& [key, v] : series(r, "trial", metric))
        out << r.name << ",trial," << key << ',' << metric << ',' << fmt(v) << '\n';
  }
}

std::string ablation_svg(std::span<const RunResult> runs, const std::string& slice, const std::string& metric) {
  constexpr double W = 720, H = 440, L = 60, R = 200, T = 40, B = 50;
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::vector<std::pair<std::string, std::vector<std::pair<int, double>>>> all;
  double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
  int xlo = slice == "trial" ? 1 : 0, xhi = slice == "trial" ? 10 : 9;
  for (const auto& r : runs) {
    auto s = series(r, slice, metric);
    if (s.empty()) continue;
    for (const auto& [x, y] : s) {
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
    all.emplace_back(r.name, std::move(s));
  }
  if (all.empty()) ylo = 0, yhi = 100;
  const double pad = std::max(1.0, (yhi - ylo) * 0.1);
  ylo = std::max(0.0, std::floor(ylo - pad));
  yhi = std::ceil(yhi + pad);
  auto px = [&](double x) { return L + (x - xlo) / (xhi - xlo) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ylo) / (yhi - ylo) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(metric)
    << " by " << (slice == "trial" ? "trial number" : "prefix size") << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int x = xlo; x <= xhi; ++x) {
    o << "<text x=\"" << px(x) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << x << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double y = ylo + (yhi - ylo) * i / 5.0;
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << fmt(std::round(y * 10) / 10)
      << "</text>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << py(y) << "\" x2=\"" << W - R << "\" y2=\"" << py(y)
      << "\" stroke=\"#e0e0e0\"/>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
    << (slice == "trial" ? "trial number" : "prefix size") << "</text>\n";
  for (std::size_t i = 0; i < all.size(); ++i) {
    const char* color = palette[i % std::size(palette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : all[i].second) o << px(x) << ',' << py(y) << ' ';
    o << "\"/>\n";
    for (const auto& [x, y] : all[i].second)
      o << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    const double ly = T + 16.0 * static_cast<double>(i);
    o << "<rect x=\"" << W - R + 10 << "\" y=\"" << ly - 8 << "\" width=\"10\" height=\"10\" fill=\"" << color
      << "\"/>\n";
    o << "<text x=\"" << W - R + 26 << "\" y=\"" << ly + 1 << "\">" << xml_escape(all[i].first) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_ablation_outputs(std::span<const RunResult> runs, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_ablation_csv(runs, dir / "ablation.csv");
  const std::vector<std::pair<std::string, std::string>> charts = {
      {"prefix", "accuracy"}, {"prefix", "macro_f1"}, {"prefix", "rmse"}, {"prefix", "bin_macro_f1"},
      {"trial", "accuracy"},  {"trial", "macro_f1"},  {"trial", "gold_hotel_fraction"}};
  for (const auto& [slice, metric] : charts) {
    std::ofstream out(dir / (slice + "_" + metric + ".svg"), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write charts into " + dir.string());
    out << ablation_svg(runs, slice, metric);
  }
}

}  // namespace dmpred::eval
