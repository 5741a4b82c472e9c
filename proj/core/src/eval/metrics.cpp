#include "dmpred/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace dmpred::eval {
namespace {

constexpr int kBins = 4;

template <class T>
void check_aligned(std::span<const T> pred, std::span<const T> gold, const char* what) {
  if (pred.size() != gold.size()) {
    throw ValidationError(std::string(what) + ": " + std::to_string(pred.size()) + " predictions for " +
                          std::to_string(gold.size()) + " gold values");
  }
  if (gold.empty()) throw ValidationError(std::string(what) + ": empty input");
}

// Confusion counts -> per-class F1 (x100).
F1Report f1_from_counts(const std::vector<double>& tp, const std::vector<double>& pred_n,
                        const std::vector<double>& gold_n) {
  F1Report r;
  for (std::size_t c = 0; c < tp.size(); ++c) {
    double f = 0.0;
    if (tp[c] > 0.0) {
      const double p = tp[c] / pred_n[c], rc = tp[c] / gold_n[c];
      f = 2.0 * p * rc / (p + rc);
    }
    r.per_class.push_back(f * 100.0);
  }
  double s = 0.0;
  for (double v : r.per_class) s += v;
  r.macro = s / static_cast<double>(r.per_class.size());
  return r;
}

F1Report mean_f1(const std::vector<const F1Report*>& xs) {
  F1Report r;
  r.per_class.assign(xs.front()->per_class.size(), 0.0);
  for (const auto* x : xs) {
    r.macro += x->macro;
    for (std::size_t c = 0; c < r.per_class.size(); ++c) r.per_class[c] += x->per_class[c];
  }
  const auto n = static_cast<double>(xs.size());
  r.macro /= n;
  for (double& v : r.per_class) v /= n;
  return r;
}

std::vector<double> pooled_labels(std::span<const PrefixExample> examples) {
  std::vector<double> out;
  for (const auto& ex : examples)
    for (int l : ex.suffix_labels) out.push_back(l);
  return out;
}

}  // namespace

int bin_of(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ValidationError("choice rate " + std::to_string(rate) + " outside [0, 1]");
  if (rate < 0.25) return 1;
  if (rate < 0.5) return 2;
  if (rate < 0.75) return 3;
  return 4;
}

double per_trial_accuracy(std::span<const int> pred, std::span<const int> gold) {
  check_aligned(pred, gold, "accuracy");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hit += pred[i] == gold[i];
  return 100.0 * static_cast<double>(hit) / static_cast<double>(gold.size());
}

F1Report macro_f1(std::span<const int> pred, std::span<const int> gold, int n_classes) {
  check_aligned(pred, gold, "macro F1");
  const auto k = static_cast<std::size_t>(n_classes);
  std::vector<double> tp(k), pn(k), gn(k);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (pred[i] < 0 || pred[i] >= n_classes || gold[i] < 0 || gold[i] >= n_classes) {
      throw ValidationError("macro F1: label outside 0.." + std::to_string(n_classes - 1));
    }
    pn[static_cast<std::size_t>(pred[i])] += 1;
    gn[static_cast<std::size_t>(gold[i])] += 1;
    if (pred[i] == gold[i]) tp[static_cast<std::size_t>(gold[i])] += 1;
  }
  return f1_from_counts(tp, pn, gn);
}

double rmse(std::span<const double> pred, std::span<const double> gold) {
  check_aligned(pred, gold, "RMSE");
  double s = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) s += (pred[i] - gold[i]) * (pred[i] - gold[i]);
  return 100.0 * std::sqrt(s / static_cast<double>(gold.size()));
}

F1Report bin_macro_f1(std::span<const double> pred, std::span<const double> gold) {
  check_aligned(pred, gold, "bin macro F1");
  std::vector<int> p, g;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    p.push_back(bin_of(pred[i]) - 1);
    g.push_back(bin_of(gold[i]) - 1);
  }
  return macro_f1(p, g, kBins);
}

MetricReport compute_report(std::span<const Outcome> outcomes) {
  if (outcomes.empty()) throw ValidationError("no outcomes to score");
  MetricReport r;
  r.examples = outcomes.size();
  bool labelled = true;
  std::vector<int> pl, gl;
  std::vector<double> pr, gr;
  for (const auto& o : outcomes) {
    r.trials += o.gold_labels.size();
    if (o.pred_labels.empty()) labelled = false;
    else if (o.pred_labels.size() != o.gold_labels.size())
      throw ValidationError("outcome for " + o.pair_id + " has misaligned trial predictions");
    pl.insert(pl.end(), o.pred_labels.begin(), o.pred_labels.end());
    gl.insert(gl.end(), o.gold_labels.begin(), o.gold_labels.end());
    pr.push_back(o.pred_rate);
    gr.push_back(o.gold_rate);
  }
  if (labelled) {
    r.accuracy = per_trial_accuracy(pl, gl);
    r.trial_f1 = macro_f1(pl, gl);
  }
  r.rmse = rmse(pr, gr);
  r.bin_f1 = bin_macro_f1(pr, gr);
  return r;
}

AblationReport ablation_report(std::span<const Outcome> outcomes) {
  AblationReport out;
  std::map<int, std::vector<Outcome>> by_pr;
  for (const auto& o : outcomes) by_pr[o.prefix_size].push_back(o);
  for (const auto& [pr, group] : by_pr) out.by_prefix.push_back({pr, compute_report(group)});

  struct Acc {
    std::vector<int> pred, gold;
    bool labelled = true;
  };
  std::map<int, Acc> by_trial;
  for (const auto& o : outcomes)
    for (std::size_t k = 0; k < o.gold_labels.size(); ++k) {
      auto& a = by_trial[o.prefix_size + 1 + static_cast<int>(k)];
      a.gold.push_back(o.gold_labels[k]);
      if (o.pred_labels.empty()) a.labelled = false;
      else a.pred.push_back(o.pred_labels[k]);
    }
  for (const auto& [t, a] : by_trial) {
    TrialSlice s;
    s.trial = t;
    s.count = a.gold.size();
    double h = 0.0;
    for (int g : a.gold) h += g;
    s.gold_hotel_fraction = 100.0 * h / static_cast<double>(s.count);
    if (a.labelled) {
      s.accuracy = per_trial_accuracy(a.pred, a.gold);
      s.trial_f1 = macro_f1(a.pred, a.gold);
    }
    out.by_trial.push_back(std::move(s));
  }
  return out;
}

MetricReport mean_report(std::span<const MetricReport> reports) {
  if (reports.empty()) throw ValidationError("no reports to average");
  MetricReport r;
  const auto n = static_cast<double>(reports.size());
  double ex = 0, tr = 0, acc = 0;
  bool labelled = true;
  std::vector<const F1Report*> tf, bf;
  for (const auto& x : reports) {
    ex += static_cast<double>(x.examples);
    tr += static_cast<double>(x.trials);
    r.rmse += x.rmse / n;
    bf.push_back(&x.bin_f1);
    if (x.accuracy && x.trial_f1) {
      acc += *x.accuracy;
      tf.push_back(&*x.trial_f1);
    } else {
      labelled = false;
    }
  }
  r.examples = static_cast<std::size_t>(std::lround(ex / n));
  r.trials = static_cast<std::size_t>(std::lround(tr / n));
  r.bin_f1 = mean_f1(bf);
  if (labelled) {
    r.accuracy = acc / n;
    r.trial_f1 = mean_f1(tf);
  }
  return r;
}

AblationReport mean_ablation(std::span<const AblationReport> reports) {
  AblationReport out;
  std::map<int, std::vector<MetricReport>> pr;
  std::map<int, std::vector<const TrialSlice*>> tr;
  for (const auto& r : reports) {
    for (const auto& s : r.by_prefix) pr[s.prefix_size].push_back(s.report);
    for (const auto& s : r.by_trial) tr[s.trial].push_back(&s);
  }
  for (const auto& [k, v] : pr) out.by_prefix.push_back({k, mean_report(v)});
  for (const auto& [k, v] : tr) {
    TrialSlice s;
    s.trial = k;
    const auto n = static_cast<double>(v.size());
    double count = 0, acc = 0;
    bool labelled = true;
    std::vector<const F1Report*> f;
    for (const auto* x : v) {
      count += static_cast<double>(x->count);
      s.gold_hotel_fraction += x->gold_hotel_fraction / n;
      if (x->accuracy) {
        acc += *x->accuracy;
        f.push_back(&*x->trial_f1);
      } else {
        labelled = false;
      }
    }
    s.count = static_cast<std::size_t>(std::lround(count / n));
    if (labelled) {
      s.accuracy = acc / n;
      s.trial_f1 = mean_f1(f);
    }
    out.by_trial.push_back(std::move(s));
  }
  return out;
}

nlohmann::json to_json(const F1Report& r) { return {{"macro", r.macro}, {"per_class", r.per_class}}; }

nlohmann::json to_json(const MetricReport& r) {
  nlohmann::json j = {{"examples", r.examples}, {"trials", r.trials}, {"rmse", r.rmse}, {"bin_f1", to_json(r.bin_f1)}};
  j["accuracy"] = r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json(nullptr);
  j["trial_f1"] = r.trial_f1 ? to_json(*r.trial_f1) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const AblationReport& r) {
  nlohmann::json pr = nlohmann::json::array(), tr = nlohmann::json::array();
  for (const auto& s : r.by_prefix) pr.push_back({{"prefix_size", s.prefix_size}, {"report", to_json(s.report)}});
  for (const auto& s : r.by_trial) {
    tr.push_back({{"trial", s.trial},
                  {"count", s.count},
                  {"gold_hotel_fraction", s.gold_hotel_fraction},
                  {"accuracy", s.accuracy ? nlohmann::json(*s.accuracy) : nlohmann::json(nullptr)},
                  {"trial_f1", s.trial_f1 ? to_json(*s.trial_f1) : nlohmann::json(nullptr)}});
  }
  return {{"by_prefix", pr}, {"by_trial", tr}};
}

double avg_baseline(std::span<const double> train_rates) {
  if (train_rates.empty()) throw ValidationError("AVG baseline needs training labels");
  double s = 0.0;
  for (double v : train_rates) s += v;
  return s / static_cast<double>(train_rates.size());
}

double med_baseline(std::span<const double> train_rates) {
  if (train_rates.empty()) throw ValidationError("MED baseline needs training labels");
  std::vector<double> v(train_rates.begin(), train_rates.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

double hotel_frequency(std::span<const PrefixExample> examples) {
  const auto labels = pooled_labels(examples);
  if (labels.empty()) throw ValidationError("no suffix labels");
  double s = 0.0;
  for (double l : labels) s += l;
  return s / static_cast<double>(labels.size());
}

int mvc_baseline(std::span<const PrefixExample> train) {
  if (train.empty()) throw ValidationError("MVC baseline needs training examples");
  return hotel_frequency(train) >= 0.5 ? 1 : 0;
}

std::vector<Outcome> constant_rate_outcomes(std::span<const PrefixExample> test, double rate) {
  std::vector<Outcome> out;
  for (const auto& ex : test) out.push_back({ex.pair_id, ex.prefix_size, ex.suffix_labels, {}, ex.choice_rate, rate});
  return out;
}

std::vector<Outcome> constant_label_outcomes(std::span<const PrefixExample> test, int label) {
  std::vector<Outcome> out;
  for (const auto& ex : test) {
    out.push_back({ex.pair_id, ex.prefix_size, ex.suffix_labels, std::vector<int>(ex.suffix_labels.size(), label),
                   ex.choice_rate, static_cast<double>(label)});
  }
  return out;
}

double ewg_expected_accuracy(double p, double q) { return 100.0 * (p * q + (1.0 - p) * (1.0 - q)); }

MetricReport ewg_baseline(std::span<const PrefixExample> train, std::span<const PrefixExample> test, int draws,
                          std::uint64_t seed) {
  if (train.empty()) throw ValidationError("EWG baseline needs training examples");
  return ewg_report(hotel_frequency(train), test, draws, seed);
}

MetricReport ewg_report(double p, std::span<const PrefixExample> test, int draws, std::uint64_t seed) {
  if (test.empty()) throw ValidationError("EWG baseline needs test examples");
  if (draws < 1) throw ValidationError("EWG needs at least one draw");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("EWG probability outside [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<int> gold;
  std::vector<double> gold_rates;
  std::vector<int> gold_bins;
  for (const auto& ex : test) {
    gold.insert(gold.end(), ex.suffix_labels.begin(), ex.suffix_labels.end());
    gold_rates.push_back(ex.choice_rate);
    gold_bins.push_back(bin_of(ex.choice_rate) - 1);
  }
  std::vector<MetricReport> reports;
  reports.reserve(static_cast<std::size_t>(draws));
  std::vector<double> tp(2), pn(2), gn(2), btp(kBins), bpn(kBins), bgn(kBins);
  for (int g : gold) gn[static_cast<std::size_t>(g)] += 1;
  for (int b : gold_bins) bgn[static_cast<std::size_t>(b)] += 1;
  for (int d = 0; d < draws; ++d) {
    std::fill(tp.begin(), tp.end(), 0.0);
    std::fill(pn.begin(), pn.end(), 0.0);
    std::fill(btp.begin(), btp.end(), 0.0);
    std::fill(bpn.begin(), bpn.end(), 0.0);
    std::size_t row = 0, hits = 0;
    double sq = 0.0;
    for (std::size_t e = 0; e < test.size(); ++e) {
      const std::size_t len = test[e].suffix_labels.size();
      double hotels = 0.0;
      for (std::size_t k = 0; k < len; ++k, ++row) {
        const int label = unit(rng) < p ? 1 : 0;
        hotels += label;
        pn[static_cast<std::size_t>(label)] += 1;
        if (label == gold[row]) {
          ++hits;
          tp[static_cast<std::size_t>(label)] += 1;
        }
      }
      const double rate = hotels / static_cast<double>(len);
      sq += (rate - gold_rates[e]) * (rate - gold_rates[e]);
      const int b = bin_of(rate) - 1;
      bpn[static_cast<std::size_t>(b)] += 1;
      if (b == gold_bins[e]) btp[static_cast<std::size_t>(b)] += 1;
    }
    MetricReport r;
    r.examples = test.size();
    r.trials = gold.size();
    r.accuracy = 100.0 * static_cast<double>(hits) / static_cast<double>(gold.size());
    r.trial_f1 = f1_from_counts(tp, pn, gn);
    r.rmse = 100.0 * std::sqrt(sq / static_cast<double>(test.size()));
    r.bin_f1 = f1_from_counts(btp, bpn, bgn);
    reports.push_back(std::move(r));
  }
  return mean_report(reports);
}

}  // namespace dmpred::eval
