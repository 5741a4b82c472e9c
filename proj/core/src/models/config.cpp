#include "dmpred/models/config.hpp"

#include <cstdio>

namespace dmpred {
namespace {

struct VariantName {
  ModelVariant v;
  std::string_view name;
};

constexpr VariantName kVariantNames[] = {
    {ModelVariant::SvmCr, "svm-cr"},
    {ModelVariant::LstmTr, "lstm-tr"},
    {ModelVariant::LstmCr, "lstm-cr"},
    {ModelVariant::LstmTrcr, "lstm-trcr"},
    {ModelVariant::TransformerTr, "transformer-tr"},
    {ModelVariant::TransformerCr, "transformer-cr"},
    {ModelVariant::TransformerTrcr, "transformer-trcr"},
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

template <class T>
std::vector<T> or_default(const std::vector<T>& given, std::vector<T> fallback) {
  return given.empty() ? fallback : given;
}

}  // namespace

std::string_view to_string(ModelVariant v) {
  for (const auto& n : kVariantNames) {
    if (n.v == v) return n.name;
  }
  return "?";
}

ModelVariant parse_model_variant(std::string_view text) {
  for (const auto& n : kVariantNames) {
    if (n.name == text) return n.v;
  }
  throw ValidationError("unknown model variant '" + std::string(text) + "'");
}

const std::vector<ModelVariant>& all_variants() {
  static const std::vector<ModelVariant> v = {ModelVariant::SvmCr,         ModelVariant::LstmTr,
                                              ModelVariant::LstmCr,        ModelVariant::LstmTrcr,
                                              ModelVariant::TransformerTr, ModelVariant::TransformerCr,
                                              ModelVariant::TransformerTrcr};
  return v;
}

bool is_neural(ModelVariant v) { return v != ModelVariant::SvmCr; }

bool is_transformer(ModelVariant v) {
  return v == ModelVariant::TransformerTr || v == ModelVariant::TransformerCr || v == ModelVariant::TransformerTrcr;
}

bool has_trial_head(ModelVariant v) {
  return v == ModelVariant::LstmTr || v == ModelVariant::LstmTrcr || v == ModelVariant::TransformerTr ||
         v == ModelVariant::TransformerTrcr;
}

bool has_rate_head(ModelVariant v) {
  return !has_trial_head(v) || v == ModelVariant::LstmTrcr || v == ModelVariant::TransformerTrcr;
}

int min_prefix(ModelVariant v) { return is_transformer(v) ? 1 : 0; }

KernelSpec KernelSpec::parse(std::string_view text) {
  KernelSpec k;
  if (text == "rbf") {
    k.kind = KernelKind::Rbf;
  } else if (text == "linear") {
    k.kind = KernelKind::Linear;
  } else if (text.starts_with("poly")) {
    k.kind = KernelKind::Poly;
    const std::string d(text.substr(4));
    try {
      std::size_t used = 0;
      k.degree = std::stoi(d, &used);
      if (used != d.size() || k.degree < 1) throw std::invalid_argument(d);
    } catch (const std::exception&) {
      throw ValidationError("bad polynomial kernel '" + std::string(text) + "' (expected e.g. poly3)");
    }
  } else {
    throw ValidationError("unknown kernel '" + std::string(text) + "' (expected rbf, linear or poly<degree>)");
  }
  return k;
}

std::string KernelSpec::str() const {
  switch (kind) {
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Linear: return "linear";
    case KernelKind::Poly: return "poly" + std::to_string(degree);
  }
  return "rbf";
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& m) { throw ValidationError(m); };
  if (hidden < 1) fail("hidden size must be positive");
  if (lstm_layers < 1) fail("LSTM layer count must be positive");
  if (transformer_layers < 1) fail("transformer layer count must be positive");
  if (!(ff_multiplier > 0.0)) fail("feed-forward multiplier must be positive");
  if (model_dim < 1 || heads < 1 || model_dim % heads != 0) fail("model width must be a positive multiple of heads");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (loss.alpha < 0 || loss.beta < 0 || loss.gamma < 0) fail("loss weights must be non-negative");
  if (max_epochs < 0) fail("epoch budget must be non-negative");
  if (patience < 1) fail("patience must be positive");
  if (!(learning_rate > 0.0)) fail("learning rate must be positive");
  if (!(svr_c > 0.0)) fail("SVR C must be positive");
  if (svr_epsilon < 0.0) fail("SVR epsilon must be non-negative");
  if (!(svr_tolerance > 0.0)) fail("SVR tolerance must be positive");
}

std::string ModelConfig::grid_key() const {
  switch (variant) {
    case ModelVariant::SvmCr: return "kernel=" + kernel.str();
    case ModelVariant::LstmTr:
    case ModelVariant::LstmCr:
      return "hidden=" + std::to_string(hidden) + ",layers=" + std::to_string(lstm_layers) + ",dropout=" + num(dropout);
    case ModelVariant::LstmTrcr:
      return "hidden=" + std::to_string(hidden) + ",layers=" + std::to_string(lstm_layers) + ",dropout=" +
             num(dropout) + ",loss=" + num(loss.alpha) + "/" + num(loss.beta) + "/" + num(loss.gamma);
    case ModelVariant::TransformerTr:
    case ModelVariant::TransformerCr:
      return "layers=" + std::to_string(transformer_layers) + ",ff=" + num(ff_multiplier) + ",dropout=" + num(dropout);
    case ModelVariant::TransformerTrcr:
      return "layers=" + std::to_string(transformer_layers) + ",ff=" + num(ff_multiplier) + ",dropout=" +
             num(dropout) + ",loss=" + num(loss.alpha) + "/" + num(loss.beta) + "/" + num(loss.gamma);
  }
  return "";
}

nlohmann::json ModelConfig::to_json() const {
  return nlohmann::json{
      {"variant", std::string(to_string(variant))},
      {"textual", std::string(to_string(textual))},
      {"behavioral", behavioral},
      {"hidden", hidden},
      {"lstm_layers", lstm_layers},
      {"transformer_layers", transformer_layers},
      {"ff_multiplier", ff_multiplier},
      {"model_dim", model_dim},
      {"heads", heads},
      {"dropout", dropout},
      {"loss", {loss.alpha, loss.beta, loss.gamma}},
      {"max_epochs", max_epochs},
      {"patience", patience},
      {"learning_rate", learning_rate},
      {"kernel", kernel.str()},
      {"svr_c", svr_c},
      {"svr_epsilon", svr_epsilon},
      {"svr_tolerance", svr_tolerance},
      {"seed", seed},
  };
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    c.variant = parse_model_variant(j.at("variant").get<std::string>());
    c.textual = parse_textual_source(j.at("textual").get<std::string>());
    c.behavioral = j.at("behavioral").get<bool>();
    c.hidden = j.at("hidden").get<int>();
    c.lstm_layers = j.at("lstm_layers").get<int>();
    c.transformer_layers = j.at("transformer_layers").get<int>();
    c.ff_multiplier = j.at("ff_multiplier").get<double>();
    c.model_dim = j.at("model_dim").get<int>();
    c.heads = j.at("heads").get<int>();
    c.dropout = j.at("dropout").get<double>();
    const auto& l = j.at("loss");
    c.loss = {l.at(0).get<double>(), l.at(1).get<double>(), l.at(2).get<double>()};
    c.max_epochs = j.at("max_epochs").get<int>();
    c.patience = j.at("patience").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.kernel = KernelSpec::parse(j.at("kernel").get<std::string>());
    c.svr_c = j.at("svr_c").get<double>();
    c.svr_epsilon = j.at("svr_epsilon").get<double>();
    c.svr_tolerance = j.at("svr_tolerance").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

std::vector<ModelConfig> hyperparameter_grid(const ModelConfig& base, const GridOverrides& o) {
  std::vector<ModelConfig> grid;
  const auto dropouts = or_default(o.dropout, {0.0, 0.1, 0.2, 0.3});
  const bool joint = base.variant == ModelVariant::LstmTrcr || base.variant == ModelVariant::TransformerTrcr;
  const auto losses = joint ? or_default(o.loss, nn::loss_weight_grid()) : std::vector<nn::LossWeights>{base.loss};
  if (base.variant == ModelVariant::SvmCr) {
    for (const auto& k : or_default(o.kernel, {KernelSpec::parse("rbf"), KernelSpec::parse("linear"),
                                               KernelSpec::parse("poly3"), KernelSpec::parse("poly5"),
                                               KernelSpec::parse("poly8")})) {
      ModelConfig c = base;
      c.kernel = k;
      grid.push_back(c);
    }
  } else if (is_transformer(base.variant)) {
    for (int layers : or_default(o.transformer_layers, {3, 4, 5, 6}))
      for (double ff : or_default(o.ff_multiplier, {0.5, 1.0, 2.0}))
        for (double d : dropouts)
          for (const auto& w : losses) {
            ModelConfig c = base;
            c.transformer_layers = layers;
            c.ff_multiplier = ff;
            c.dropout = d;
            c.loss = w;
            grid.push_back(c);
          }
  } else {
    for (int hidden : or_default(o.hidden, {50, 80, 100, 200}))
      for (int layers : or_default(o.lstm_layers, {1, 2, 3}))
        for (double d : dropouts)
          for (const auto& w : losses) {
            ModelConfig c = base;
            c.hidden = hidden;
            c.lstm_layers = layers;
            c.dropout = d;
            c.loss = w;
            grid.push_back(c);
          }
  }
  for (const auto& c : grid) c.validate();
  return grid;
}

}  // namespace dmpred
