#include "commands.hpp"

#include <iostream>
#include <optional>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "rsa/error.hpp"
#include "rsa/ingest.hpp"
#include "rsa/io.hpp"
#include "rsa/lingfeat.hpp"
#include "rsa/orders.hpp"
#include "rsa/rdm.hpp"
#include "rsa/synth.hpp"

namespace rsa::cli {

void warn(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::ordered_json{{"warning", kind}, {"message", message}}.dump() << '\n';
}

namespace {

void report_constant_rows(const Rdm& rdm) {
  const auto& rows = rdm.constant_conditions();
  if (rows.empty()) return;
  std::string ids;
  for (std::size_t i : rows) {
    if (!ids.empty()) ids += ',';
    ids += rdm.conditions().id(i);
  }
  warn("constant pattern",
       fmt::format("{} condition(s) with constant patterns in {}; their correlation distances use the "
                   "fallback {}: {}",
                   rows.size(), rdm.label(), kConstantFallbackDistance, ids));
}

}  // namespace

RunRecord cmd_rdm(const RdmOptions& options) {
  RunRecord record;
  if (options.activations.empty() == options.pooled.empty()) {
    throw ValidationError("pass exactly one of --activations or --pooled");
  }
  std::optional<ActivityMatrix> matrix;
  if (!options.activations.empty()) {
    record.inputs.push_back(options.activations);
    auto records = read_activations(options.activations);
    LayerId layer;
    if (!options.layer.empty()) {
      layer = LayerId::parse(options.layer);
    } else {
      const auto layers = layers_of(records);
      if (layers.size() != 1) {
        throw ValidationError(fmt::format("activation file holds {} layers; pass --layer", layers.size()));
      }
      layer = layers.front();
    }
    std::erase_if(records, [&](const TokenActivations& r) { return r.layer != layer; });
    if (records.empty()) throw ValidationError(fmt::format("no records for layer '{}'", layer.to_string()));
    matrix = build_activity_matrix(records, conditions_of(records));
  } else {
    record.inputs.push_back(options.pooled);
    const LayerId layer = options.layer.empty() ? LayerId{"pooled", 0} : LayerId::parse(options.layer);
    matrix = read_pooled(options.pooled, layer);
  }
  if (!options.write_pooled.empty()) {
    write_pooled(options.write_pooled, *matrix);
    record.outputs.push_back(options.write_pooled);
  }

  const Measure measure = parse_measure(options.metric);
  if (options.ridge < 0.0) throw ValidationError("--ridge must be >= 0");
  std::optional<CovarianceEstimate> cov;
  if (measure == Measure::mahalanobis) cov = estimate_covariance(*matrix, options.ridge);
  const Rdm rdm = build_rdm(*matrix, measure, cov);
  report_constant_rows(rdm);
  write_rdm(options.out, rdm);
  record.outputs.push_back(options.out);
  return record;
}

RunRecord cmd_rsm(const RsmOptions& options) {
  RunRecord record;
  std::vector<Rdm> rdms;
  for (const auto& file : options.rdms) {
    rdms.push_back(read_rdm(file));
    record.inputs.push_back(file);
  }
  write_rsm(options.out, rsm(rdms, stats::parse_correlation_method(options.stat)));
  record.outputs.push_back(options.out);
  return record;
}

RunRecord cmd_disagree(const DisagreeOptions& options) {
  RunRecord record{{options.rdm_a, options.rdm_b}, {}};
  const Rdm a = read_rdm(options.rdm_a);
  const Rdm b = read_rdm(options.rdm_b);
  AgreementOptions agreement;
  agreement.statistic = stats::parse_correlation_method(options.stat);
  if (agreement.statistic == stats::CorrelationMethod::pearson) {
    throw ValidationError("row statistic must be kendall_a or spearman");
  }
  agreement.include_self = options.include_self;
  write_disagreement(options.out, per_condition_agreement(a, b, agreement));
  record.outputs.push_back(options.out);
  return record;
}

RunRecord cmd_third(const ThirdOptions& options) {
  RunRecord record;
  if (!options.labels.empty() && options.labels.size() != options.disagreements.size()) {
    throw ValidationError("--label must be given once per --disagreement");
  }
  std::vector<DisagreementVector> vectors;
  for (std::size_t k = 0; k < options.disagreements.size(); ++k) {
    const auto& file = options.disagreements[k];
    const std::string label = options.labels.empty() ? file.stem().string() : options.labels[k];
    vectors.push_back(read_disagreement(file, label));
    record.inputs.push_back(file);
  }
  std::vector<FeatureVector> features;
  for (const auto& file : options.features) {
    features.push_back(read_feature(file));
    record.inputs.push_back(file);
  }
  const std::size_t n_tests =
      options.n_tests > 0 ? options.n_tests : vectors.size() * features.size();

  std::optional<PermutationSettings> permutation;
  if (options.permutations > 0) permutation = PermutationSettings{options.seed, options.permutations};

  std::vector<ReportRow> rows;
  for (const auto& vector : vectors) {
    for (const auto& feature : features) {
      const auto report = third_order(vector, feature.aligned_to(vector.conditions), n_tests, permutation);
      for (auto& row : report_rows(report)) rows.push_back(std::move(row));
    }
  }
  io::write_text(options.out, format_report(rows));
  record.outputs.push_back(options.out);
  return record;
}

namespace {

std::vector<Sentence> sentences_from(const FeatureOptions& options, RunRecord& record) {
  if (options.trees.empty() == options.sentences.empty()) {
    throw ValidationError("pass exactly one of --trees or --sentences");
  }
  std::vector<Sentence> out;
  if (!options.trees.empty()) {
    record.inputs.push_back(options.trees);
    for (auto& [id, tree] : read_trees(options.trees)) out.push_back(Sentence{id, tree.words()});
  } else {
    record.inputs.push_back(options.sentences);
    out = read_sentences(options.sentences);
  }
  if (options.strip_punct) {
    for (auto& sentence : out) sentence.words = strip_punctuation(sentence.words);
  }
  return out;
}

ConditionSet ids_of(const auto& items) {
  std::vector<std::string> ids;
  for (const auto& item : items) ids.push_back(item.id);
  return ConditionSet(std::move(ids));
}

}  // namespace

RunRecord cmd_features(const FeatureOptions& options) {
  RunRecord record;
  FeatureVector feature;
  if (options.kind == "yngve") {
    if (options.trees.empty()) throw ValidationError("yngve needs --trees");
    record.inputs.push_back(options.trees);
    auto trees = read_trees(options.trees);
    std::vector<double> values;
    for (auto& item : trees) {
      if (options.strip_punct) item.tree = item.tree.without_punctuation();
      values.push_back(yngve_sentence_score(item.tree));
    }
    feature = FeatureVector{ids_of(trees), std::move(values), "yngve"};
  } else if (options.kind == "logfreq" || options.kind == "senses") {
    if (options.lexicon.empty()) throw ValidationError(fmt::format("{} needs --lexicon", options.kind));
    const auto sentences = sentences_from(options, record);
    record.inputs.push_back(options.lexicon);
    auto table = read_lexicon_values(options.lexicon);
    const bool frequency = options.kind == "logfreq";
    const Lexicon lexicon = frequency ? Lexicon::frequencies(std::move(table)) : Lexicon::senses(std::move(table));
    std::vector<double> values;
    for (const auto& sentence : sentences) {
      try {
        values.push_back(frequency ? avg_log_frequency(sentence.words, lexicon)
                                   : avg_senses(sentence.words, lexicon));
      } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("sentence '{}': {}", sentence.id, e.what()));
      }
    }
    feature = FeatureVector{ids_of(sentences), std::move(values), options.kind};
  } else if (options.kind == "fixation") {
    if (options.fixations.empty()) throw ValidationError("fixation needs --fixations");
    record.inputs.push_back(options.fixations);
    const FixationMeasure measure = parse_fixation_measure(options.measure);
    auto tables = read_fixations(options.fixations);
    std::erase_if(tables, [&](const TokenFixationTable& t) { return t.measure != measure; });
    if (tables.empty()) {
      throw ValidationError(fmt::format("no '{}' rows in fixation file", options.measure));
    }
    std::vector<std::string> ids;
    for (const auto& table : tables) ids.push_back(table.condition_id);
    feature = build_feature_vector(tables, ConditionSet(std::move(ids)), parse_skip_policy(options.skip_policy));
  } else {
    throw ValidationError(fmt::format("unknown feature '{}'", options.kind));
  }
  write_feature(options.out, feature);
  record.outputs.push_back(options.out);
  return record;
}

namespace {

std::vector<PairValue> select_pairs(const PairSelection& selection, RunRecord& record) {
  if (selection.report.empty() == selection.values.empty()) {
    throw ValidationError("pass exactly one of --report or --values");
  }
  std::vector<PairValue> values;
  if (!selection.report.empty()) {
    record.inputs.push_back(selection.report);
    if (selection.form != "agreement" && selection.form != "disagreement") {
      throw ValidationError("--form must be agreement or disagreement");
    }
    std::set<std::string> targets;
    const auto rows = read_report(selection.report);
    for (const auto& row : rows) {
      if (row.form == selection.form && (selection.target.empty() || row.target == selection.target)) {
        targets.insert(row.target);
        values.push_back(PairValue{LayerPair::parse(row.pair), row.report.coefficient});
      }
    }
    if (targets.size() > 1) {
      throw ValidationError(fmt::format("report holds {} targets; pass --target", targets.size()));
    }
  } else {
    record.inputs.push_back(selection.values);
    values = read_pair_values(selection.values);
  }

  std::string model = selection.model;
  if (model.empty()) {
    std::set<std::string> models;
    for (const auto& [pair, value] : values) {
      if (pair.same_model()) models.insert(pair.first.model);
    }
    if (models.size() > 1) throw ValidationError(fmt::format("input spans {} models; pass --model", models.size()));
    if (!models.empty()) model = *models.begin();
  }
  std::erase_if(values, [&](const PairValue& v) { return !v.pair.same_model() || v.pair.first.model != model; });
  if (values.empty()) throw ValidationError("no same-model pairs selected");

  const LayerOrder order = parse_layer_order(selection.layer_order);
  for (auto& [pair, value] : values) {
    pair = LayerPair::make(to_top_down(pair.first, selection.n_layers, order),
                           to_top_down(pair.second, selection.n_layers, order));
  }
  return values;
}

std::string optional_number(const std::optional<double>& value) {
  return value ? io::format_number(*value, io::kReportDigits) : std::string{};
}

}  // namespace

RunRecord cmd_anova(const GridOptions& options) {
  RunRecord record;
  const auto values = select_pairs(options.selection, record);
  std::vector<double> numbers;
  std::vector<LayerPair> pairs;
  for (const auto& [pair, value] : values) {
    pairs.push_back(pair);
    numbers.push_back(value);
  }
  const auto result = group_anova(numbers, pairs, options.selection.n_layers);
  for (const auto& warning : result.table.warnings) warn("anova", warning);

  const auto digits = io::kReportDigits;
  std::string out = "term\tss\tdf\tms\tF\tp\n";
  for (const auto& row : result.table.terms) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", row.term, io::format_number(row.ss, digits), row.df,
                       io::format_number(row.ms, digits), optional_number(row.f), optional_number(row.p));
  }
  const auto& residual = result.table.residual;
  out += fmt::format("residual\t{}\t{}\t{}\t\t\n", io::format_number(residual.ss, digits), residual.df,
                     io::format_number(residual.ms, digits));
  out += "\ngroup\tcount\tmean\tstddev\n";
  for (const auto& group : result.groups) {
    out += fmt::format("{}\t{}\t{}\t{}\n", to_string(group.group), group.count,
                       io::format_number(group.mean, digits), io::format_number(group.stddev, digits));
  }
  out += fmt::format("excluded\t{}\t\t\n", result.excluded);
  io::write_text(options.out, out);
  record.outputs.push_back(options.out);
  return record;
}

RunRecord cmd_heatmap(const GridOptions& options) {
  RunRecord record;
  const auto values = select_pairs(options.selection, record);
  write_heatmap(options.out, heatmap_grid(values, options.selection.n_layers));
  record.outputs.push_back(options.out);
  return record;
}

RunRecord cmd_synth(const SynthOptions& options) {
  RunRecord record;
  if (options.out_dir.empty()) throw ValidationError("synth needs --out-dir");
  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", options.out_dir.string(), ec.message()));

  if (options.kind == "bands") {
    synth::BandSpec spec;
    spec.seed = options.seed;
    spec.n_layers = options.n_layers;
    spec.base = options.base;
    spec.middle_shift = options.middle_shift;
    spec.noise_sd = options.noise_sd;
    spec.model = options.model;
    const path file = options.out_dir / "band_values.csv";
    write_pair_values(file, synth::band_values(spec));
    record.outputs.push_back(file);
    return record;
  }
  if (options.kind != "activations") throw ValidationError(fmt::format("unknown synth kind '{}'", options.kind));

  synth::SynthSpec spec;
  spec.seed = options.seed;
  spec.conditions = options.n;
  spec.dims = options.h;
  spec.layers = options.layers;
  spec.noise_gain = options.noise_gain;
  spec.model = options.model;
  if (options.difficulty == "linear") {
    spec.difficulty = synth::linear_difficulty(options.n);
  } else if (options.difficulty == "random") {
    spec.difficulty = synth::random_difficulty(options.seed, options.n);
  } else if (options.difficulty == "constant") {
    spec.difficulty.assign(options.n, 0.5);
  } else {
    throw ValidationError(fmt::format("unknown difficulty profile '{}'", options.difficulty));
  }
  spec.drift_profile = options.drift;

  const auto dataset = synth::generate(spec);
  const path activations = options.out_dir / "activations.jsonl";
  const path difficulty = options.out_dir / "difficulty.csv";
  write_activations(activations, synth::to_token_records(dataset));
  write_feature(difficulty, dataset.difficulty);
  record.outputs = {activations, difficulty};
  return record;
}

}  // namespace rsa::cli
