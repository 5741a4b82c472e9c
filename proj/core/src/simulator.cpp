#include "dmpred/simulator.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>

#include "dmpred/features.hpp"
#include "dmpred/parallel.hpp"

namespace dmpred::sim {
namespace {

using Tenths = std::array<int, kReviewsPerHotel>;

constexpr std::array<Tenths, 10> kTrainScores = {{
    {25, 33, 33, 38, 42, 58, 63},
    {33, 33, 63, 79, 83, 83, 92},
    {50, 58, 71, 75, 83, 88, 96},
    {54, 58, 71, 83, 92, 100, 100},
    {58, 63, 75, 88, 88, 96, 100},
    {54, 71, 75, 83, 100, 100, 100},
    {63, 83, 88, 92, 100, 100, 100},
    {79, 88, 92, 92, 96, 96, 100},
    {92, 92, 96, 96, 96, 96, 100},
    {96, 96, 96, 96, 100, 100, 100},
}};

constexpr std::array<Tenths, 10> kTestScores = {{
    {38, 38, 38, 42, 46, 54, 63},
    {42, 42, 63, 67, 71, 83, 100},
    {50, 58, 75, 83, 88, 88, 100},
    {58, 67, 75, 79, 79, 96, 100},
    {58, 75, 75, 83, 88, 88, 96},
    {50, 71, 83, 83, 96, 100, 100},
    {63, 83, 88, 88, 100, 100, 100},
    {79, 79, 83, 92, 100, 100, 100},
    {88, 96, 96, 96, 100, 100, 100},
    {88, 96, 96, 96, 100, 100, 100},
}};

// Word pools for the synthetic reviews. Adjectives are drawn from the
// sentiment groups so the intensity features respond to the score.
constexpr std::array<std::string_view, 10> kPositiveNouns = {
    "pool", "breakfast", "location", "room", "staff", "decor", "price", "view", "shower", "metro station"};
constexpr std::array<std::array<std::string_view, 8>, 3> kPositiveAdjectives = {{
    {"good", "clean", "nice", "comfortable", "friendly", "quiet", "helpful", "spacious"},
    {"great", "very good", "really nice", "huge", "impressive", "brilliant", "warm", "highly rated"},
    {"perfect", "excellent", "amazing", "fantastic", "superb", "outstanding", "stunning", "spotless"},
}};
constexpr std::array<std::string_view, 10> kNegativeNouns = {
    "room", "breakfast", "staff", "shower", "price", "wifi", "air conditioning", "location", "bed", "lift"};
constexpr std::array<std::array<std::string_view, 5>, 3> kNegativeAdjectives = {{
    {"small", "noisy", "old", "basic", "outdated"},
    {"too small", "very noisy", "really bad", "poor", "too expensive"},
    {"awful", "terrible", "disgusting", "shockingly bad", "completely broken"},
}};
constexpr std::array<std::string_view, 3> kPositiveSummaries = {
    "I would recommend this hotel to anyone.", "We will be back.", "Would stay here again."};
constexpr std::array<std::string_view, 3> kNegativeSummaries = {
    "Would not recommend.", "This hotel does not deserve its stars.", "Never again."};
constexpr std::array<std::string_view, 4> kEmptyNegatives = {"", ".", "Nothing.", "Nothing to complain about."};

template <class Pool>
std::string_view pick(const Pool& pool, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
  return pool[d(rng)];
}

bool coin(std::mt19937_64& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

int intensity_group(std::mt19937_64& rng, double strength) {
  const double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (r < strength * strength) return 2;
  if (r < strength) return 1;
  return 0;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string sentence(std::mt19937_64& rng, std::string_view noun, std::string_view adj) {
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: return "The " + std::string(noun) + " was " + std::string(adj) + ".";
    case 1: return capitalize(std::string(adj)) + " " + std::string(noun) + ".";
    default: return "We found the " + std::string(noun) + " " + std::string(adj) + ".";
  }
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

Review synth_review(SplitTag split, int hotel, int slot, Score score) {
  std::seed_seq seq{0x5eed'0001u, static_cast<unsigned>(split), static_cast<unsigned>(hotel),
                    static_cast<unsigned>(slot)};
  std::mt19937_64 rng(seq);
  const double u = (score.value() - kMinScore) / (kMaxScore - kMinScore);
  const double v = 1.0 - u;

  std::vector<std::string> pos;
  const int n_pos = 1 + std::binomial_distribution<int>(3, u)(rng);
  for (int i = 0; i < n_pos; ++i) {
    pos.push_back(sentence(rng, pick(kPositiveNouns, rng), pick(kPositiveAdjectives[intensity_group(rng, u)], rng)));
  }
  if (coin(rng, 0.15 + 0.6 * u)) pos.emplace_back(pick(kPositiveSummaries, rng));

  std::vector<std::string> neg;
  const int n_neg = std::binomial_distribution<int>(3, v)(rng);
  for (int i = 0; i < n_neg; ++i) {
    neg.push_back(sentence(rng, pick(kNegativeNouns, rng), pick(kNegativeAdjectives[intensity_group(rng, v)], rng)));
  }
  if (n_neg > 0 && coin(rng, 0.5 * v)) neg.emplace_back(pick(kNegativeSummaries, rng));
  if (neg.empty()) neg.emplace_back(pick(kEmptyNegatives, rng));

  Review r;
  const std::string prefix = split == SplitTag::Test ? "te" : "tv";
  char hotel_id[16];
  std::snprintf(hotel_id, sizeof hotel_id, "%s-h%02d", prefix.c_str(), hotel + 1);
  r.hotel_id = hotel_id;
  r.review_id = r.hotel_id + "-r" + std::to_string(slot + 1);
  r.positive_text = join(pos);
  r.negative_text = join(neg);
  r.positive_shown_first = coin(rng, 0.5);
  r.score = score;
  return r;
}

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw ValidationError("bad number '" + std::string(text) + "' in " + std::string(what));
  }
  return v;
}

std::string number_str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::size_t pick_review(const ExpertPolicy& policy, const Hotel& hotel, std::mt19937_64& rng) {
  const auto& rs = hotel.reviews;
  std::vector<std::size_t> idx(rs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rs[a].score < rs[b].score; });
  switch (policy.kind) {
    case ExpertPolicy::Kind::HighestScore: return idx.back();
    case ExpertPolicy::Kind::MedianScore: return idx[idx.size() / 2];
    case ExpertPolicy::Kind::RandomReview: return std::uniform_int_distribution<std::size_t>(0, rs.size() - 1)(rng);
    case ExpertPolicy::Kind::ScoreThreshold: {
      std::vector<std::size_t> ok;
      for (std::size_t i : idx) {
        if (rs[i].score.value() >= policy.threshold - kTolerance) ok.push_back(i);
      }
      if (ok.empty()) return idx.back();
      return ok[std::uniform_int_distribution<std::size_t>(0, ok.size() - 1)(rng)];
    }
  }
  return idx.back();
}

}  // namespace

ExpertPolicy ExpertPolicy::parse(std::string_view text) {
  ExpertPolicy p;
  if (text == "highest") p.kind = Kind::HighestScore;
  else if (text == "median") p.kind = Kind::MedianScore;
  else if (text == "random") p.kind = Kind::RandomReview;
  else if (text.starts_with("threshold:")) {
    p.kind = Kind::ScoreThreshold;
    p.threshold = parse_number(text.substr(10), "expert policy");
  } else {
    throw ValidationError("unknown expert policy '" + std::string(text) +
                          "' (expected highest, median, random or threshold:<score>)");
  }
  return p;
}

std::string ExpertPolicy::str() const {
  switch (kind) {
    case Kind::HighestScore: return "highest";
    case Kind::MedianScore: return "median";
    case Kind::RandomReview: return "random";
    case Kind::ScoreThreshold: return "threshold:" + number_str(threshold);
  }
  return "random";
}

DmPolicy DmPolicy::parse(std::string_view text) {
  DmPolicy p;
  if (text == "always-hotel") {
    p.kind = Kind::AlwaysHotel;
  } else if (text.starts_with("feature:")) {
    p.kind = Kind::FeatureRule;
    const double k = parse_number(text.substr(8), "decision-maker policy");
    p.feature = static_cast<int>(k);
    if (p.feature != k) throw ValidationError("feature index must be an integer");
  } else if (text.starts_with("match:")) {
    p.kind = Kind::ProbabilityMatch;
    p.base_rate = parse_number(text.substr(6), "decision-maker policy");
  } else if (text.starts_with("repeat:")) {
    p.kind = Kind::ReactiveRepeat;
    p.stick_prob = parse_number(text.substr(7), "decision-maker policy");
  } else {
    throw ValidationError("unknown decision-maker policy '" + std::string(text) +
                          "' (expected always-hotel, feature:<k>, match:<p> or repeat:<s>)");
  }
  p.validate();
  return p;
}

std::string DmPolicy::str() const {
  switch (kind) {
    case Kind::AlwaysHotel: return "always-hotel";
    case Kind::FeatureRule: return "feature:" + std::to_string(feature);
    case Kind::ProbabilityMatch: return "match:" + number_str(base_rate);
    case Kind::ReactiveRepeat: return "repeat:" + number_str(stick_prob);
  }
  return "always-hotel";
}

void DmPolicy::validate() const {
  if (kind == Kind::FeatureRule && (feature < 1 || feature > static_cast<int>(kHandCraftedDim))) {
    throw ValidationError("feature rule index " + std::to_string(feature) + " outside 1..42");
  }
  if (kind == Kind::ProbabilityMatch && !(base_rate >= 0.0 && base_rate <= 1.0)) {
    throw ValidationError("probability-match base rate must lie in [0, 1]");
  }
  if (kind == Kind::ReactiveRepeat && !(stick_prob >= 0.0 && stick_prob <= 1.0)) {
    throw ValidationError("repeat probability must lie in [0, 1]");
  }
}

void SimConfig::validate() const {
  if (n_pairs < 1) throw ValidationError("number of pairs must be at least 1");
  dm.validate();
  if (!hotels.empty() && hotels.size() != static_cast<std::size_t>(kTrialsPerGame)) {
    throw ValidationError("simulation needs exactly 10 hotels, got " + std::to_string(hotels.size()));
  }
  for (const auto& h : hotels) validate_hotel(h);
}

std::vector<std::vector<Score>> builtin_score_sets(SplitTag split) {
  const auto& src = split == SplitTag::Test ? kTestScores : kTrainScores;
  std::vector<std::vector<Score>> out;
  for (const auto& h : src) {
    std::vector<Score> s;
    for (int t : h) s.push_back(Score::from_tenths(t));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Hotel> builtin_hotels(SplitTag split) {
  const auto scores = builtin_score_sets(split);
  std::vector<Hotel> hotels;
  for (std::size_t h = 0; h < scores.size(); ++h) {
    Hotel hotel;
    for (std::size_t r = 0; r < scores[h].size(); ++r) {
      hotel.reviews.push_back(synth_review(split, static_cast<int>(h), static_cast<int>(r), scores[h][r]));
    }
    hotel.hotel_id = hotel.reviews.front().hotel_id;
    hotels.push_back(std::move(hotel));
  }
  return hotels;
}

std::mt19937_64 game_rng(std::uint64_t seed, std::uint64_t pair_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(pair_index), static_cast<std::uint32_t>(pair_index >> 32)};
  return std::mt19937_64(seq);
}

GameRecord simulate_game(const SimConfig& config, const std::vector<Hotel>& hotels, int pair_index) {
  if (hotels.size() != static_cast<std::size_t>(kTrialsPerGame)) {
    throw ValidationError("simulation needs exactly 10 hotels");
  }
  auto rng = game_rng(config.seed, static_cast<std::uint64_t>(pair_index));
  std::array<std::size_t, kTrialsPerGame> order{};
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  GameRecord game;
  const std::string prefix =
      config.pair_prefix.empty() ? (config.split == SplitTag::Test ? "te" : "tv") : config.pair_prefix;
  char id[32];
  std::snprintf(id, sizeof id, "%s%04d", prefix.c_str(), pair_index + 1);
  game.pair_id = id;
  game.split = config.split;

  Decision previous = Decision::StayHome;
  for (int t = 0; t < kTrialsPerGame; ++t) {
    const Hotel& hotel = hotels[order[t]];
    const Review& shown = hotel.reviews[pick_review(config.expert, hotel, rng)];
    Decision d = Decision::Hotel;
    switch (config.dm.kind) {
      case DmPolicy::Kind::AlwaysHotel: break;
      case DmPolicy::Kind::FeatureRule:
        d = hand_crafted_features(shown).get(config.dm.feature) ? Decision::Hotel : Decision::StayHome;
        break;
      case DmPolicy::Kind::ProbabilityMatch:
        d = coin(rng, config.dm.base_rate) ? Decision::Hotel : Decision::StayHome;
        break;
      case DmPolicy::Kind::ReactiveRepeat:
        if (t == 0) {
          d = coin(rng, 0.5) ? Decision::Hotel : Decision::StayHome;
        } else {
          const bool stay_same = coin(rng, config.dm.stick_prob);
          d = stay_same ? previous : (previous == Decision::Hotel ? Decision::StayHome : Decision::Hotel);
        }
        break;
    }
    previous = d;
    const Score rs = hotel.reviews[std::uniform_int_distribution<std::size_t>(0, hotel.reviews.size() - 1)(rng)].score;
    game.trials.push_back(make_trial(t + 1, hotel.hotel_id, shown.review_id, d, rs));
  }
  return game;
}

GameRecord simulate_game(const SimConfig& config, int pair_index) {
  return simulate_game(config, config.hotels.empty() ? builtin_hotels(config.split) : config.hotels, pair_index);
}

Dataset generate_dataset(const SimConfig& config, int jobs) {
  config.validate();
  auto hotels = config.hotels.empty() ? builtin_hotels(config.split) : config.hotels;
  std::vector<GameRecord> games(static_cast<std::size_t>(config.n_pairs));
  parallel_for(games.size(), jobs,
               [&](std::size_t i) { games[i] = simulate_game(config, hotels, static_cast<int>(i)); });
  return Dataset::build(config.split, std::move(hotels), std::move(games));
}

EmbeddingTable simulated_embeddings(const std::vector<Hotel>& hotels, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw ValidationError("embedding dimension must be positive");
  std::mt19937_64 rng = game_rng(seed, 0xe3bedull);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> proj(dim * kHandCraftedDim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(kHandCraftedDim));
  for (double& w : proj) w = normal(rng) * scale;

  EmbeddingTable table(dim);
  for (const auto& h : hotels) {
    for (const auto& r : h.reviews) {
      const auto hc = hand_crafted_features(r).as_doubles();
      std::vector<double> v(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < kHandCraftedDim; ++j) acc += proj[i * kHandCraftedDim + j] * hc[j];
        v[i] = acc + 0.1 * normal(rng);
      }
      table.add(r.review_id, std::move(v));
    }
  }
  return table;
}

}  // namespace dmpred::sim
