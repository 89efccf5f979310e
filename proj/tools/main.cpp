#include <cstdlib>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "manifest.hpp"
#include "rsa/error.hpp"
#include "rsa/parallel.hpp"

#ifndef RSA_VERSION
#define RSA_VERSION "0.0.0"
#endif

namespace {

using namespace rsa::cli;

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << nlohmann::ordered_json{{"error", kind}, {"message", message}}.dump() << '\n';
  return code;
}

// Option values as parsed (or their defaults), keyed by long name.
void collect_config(const CLI::App* app, const std::string& prefix,
                    std::map<std::string, std::vector<std::string>>& config) {
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = prefix + opt->get_lnames().front();
    if (name.ends_with("help")) continue;
    if (opt->count() > 0) {
      config[name] = opt->results();
    } else if (!opt->get_default_str().empty()) {
      config[name] = {opt->get_default_str()};
    }
  }
}

void add_selection(CLI::App* cmd, PairSelection& s) {
  auto* report = cmd->add_option("--report", s.report, "Third-order report TSV");
  cmd->add_option("--values", s.values, "Per-pair values CSV (pair,value)")->excludes(report);
  cmd->add_option("--form", s.form, "Report rows to use: agreement or disagreement");
  cmd->add_option("--target", s.target, "Report target (feature) to use");
  cmd->add_option("--model", s.model, "Model tag to select");
  cmd->add_option("--n-layers", s.n_layers, "Number of layers of the model");
  cmd->add_option("--layer-order", s.layer_order, "Producer numbering: top-down or bottom-up");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Representational similarity analysis toolkit", "rsa"};
  app.set_version_flag("--version", RSA_VERSION);
  app.set_config("--config", "", "TOML/INI file with option values; flags take precedence");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();

  unsigned threads = 0;
  bool manifest = false;
  app.add_option("--threads", threads, "Worker thread cap (0: all cores)")->envname("RSA_THREADS");
  app.add_flag("--manifest", manifest, "Write <output>.manifest.json beside every output");

  RdmOptions rdm_opts;
  auto* rdm = app.add_subcommand("rdm", "Build an RDM from activations or a pooled matrix");
  rdm->add_option("--activations", rdm_opts.activations, "Per-token activations (JSON lines)");
  rdm->add_option("--pooled", rdm_opts.pooled, "Pooled matrix CSV (id,d0,...)");
  rdm->add_option("--layer", rdm_opts.layer, "Layer id <model>:<index>");
  rdm->add_option("--metric", rdm_opts.metric, "correlation, euclidean or mahalanobis");
  rdm->add_option("--ridge", rdm_opts.ridge, "Covariance ridge coefficient for mahalanobis");
  rdm->add_option("--write-pooled", rdm_opts.write_pooled, "Also write the pooled matrix here");
  rdm->add_option("--out", rdm_opts.out, "Output RDM CSV")->required();

  RsmOptions rsm_opts;
  auto* rsm = app.add_subcommand("rsm", "Correlate whole RDMs");
  rsm->add_option("--rdm", rsm_opts.rdms, "RDM CSV (repeat)")->required();
  rsm->add_option("--stat", rsm_opts.stat, "kendall_a, spearman or pearson");
  rsm->add_option("--out", rsm_opts.out, "Output RSM CSV")->required();

  DisagreeOptions disagree_opts;
  auto* disagree = app.add_subcommand("disagree", "Per-condition agreement between two RDMs");
  disagree->add_option("--rdm-a", disagree_opts.rdm_a, "First RDM CSV")->required();
  disagree->add_option("--rdm-b", disagree_opts.rdm_b, "Second RDM CSV")->required();
  disagree->add_option("--stat", disagree_opts.stat, "kendall_a or spearman");
  disagree->add_flag("--include-self", disagree_opts.include_self, "Keep each row's own zero cell");
  disagree->add_option("--out", disagree_opts.out, "Output CSV (id,agreement,disagreement)")->required();

  ThirdOptions third_opts;
  auto* third = app.add_subcommand("third", "Correlate disagreement vectors with features");
  third->add_option("--disagreement", third_opts.disagreements, "Disagreement CSV (repeat)")->required();
  third->add_option("--label", third_opts.labels, "Pair label per disagreement file, <m>:<i>-<m>:<j>");
  third->add_option("--feature", third_opts.features, "Feature CSV (repeat)")->required();
  third->add_option("--n-tests", third_opts.n_tests, "Bonferroni test count (0: number of tests run)");
  third->add_option("--permutations", third_opts.permutations, "Permutation draws for p (0: t approximation)");
  third->add_option("--seed", third_opts.seed, "Permutation seed");
  third->add_option("--out", third_opts.out, "Output report TSV")->required();

  FeatureOptions feature_opts;
  auto* features = app.add_subcommand("features", "Sentence-level feature vectors");
  features->require_subcommand(1);
  for (const char* kind : {"yngve", "logfreq", "senses", "fixation"}) {
    auto* sub = features->add_subcommand(kind);
    sub->callback([&feature_opts, kind] { feature_opts.kind = kind; });
    sub->add_option("--out", feature_opts.out, "Output feature CSV (id,value)")->required();
    const std::string k = kind;
    if (k == "fixation") {
      sub->add_option("--fixations", feature_opts.fixations, "Fixation CSV")->required();
      sub->add_option("--measure", feature_opts.measure, "total_fixation or first_pass");
      sub->add_option("--skip-policy", feature_opts.skip_policy, "zero or exclude");
      continue;
    }
    sub->add_option("--trees", feature_opts.trees, "Bracketed trees, one per line");
    sub->add_flag("--strip-punct", feature_opts.strip_punct, "Drop punctuation words");
    if (k != "yngve") {
      sub->add_option("--sentences", feature_opts.sentences, "Sentences TSV (id<TAB>words)");
      sub->add_option("--lexicon", feature_opts.lexicon, "Lexicon TSV (word<TAB>value)")->required();
    }
  }

  GridOptions anova_opts;
  auto* anova = app.add_subcommand("anova", "Layer-group x adjacency ANOVA over per-pair values");
  add_selection(anova, anova_opts.selection);
  anova->add_option("--out", anova_opts.out, "Output ANOVA TSV")->required();

  GridOptions heatmap_opts;
  auto* heatmap = app.add_subcommand("heatmap", "Layer x layer grid of per-pair values");
  add_selection(heatmap, heatmap_opts.selection);
  heatmap->add_option("--out", heatmap_opts.out, "Output grid CSV")->required();

  SynthOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "Generate synthetic data with planted structure");
  synth->add_option("--kind", synth_opts.kind, "activations or bands");
  synth->add_option("--seed", synth_opts.seed, "Generator seed");
  synth->add_option("--conditions", synth_opts.n, "Conditions");
  synth->add_option("--dims", synth_opts.h, "Dimensions per pattern");
  synth->add_option("--layers", synth_opts.layers, "Layers");
  synth->add_option("--noise-gain", synth_opts.noise_gain, "Noise gain");
  synth->add_option("--drift", synth_opts.drift, "Per-layer drift (comma separated)")->delimiter(',');
  synth->add_option("--difficulty", synth_opts.difficulty, "linear, random or constant");
  synth->add_option("--model", synth_opts.model, "Model tag of generated layers");
  synth->add_option("--n-layers", synth_opts.n_layers, "Layers for --kind bands");
  synth->add_option("--base", synth_opts.base, "Base value for --kind bands");
  synth->add_option("--middle-shift", synth_opts.middle_shift, "Middle-band shift for --kind bands");
  synth->add_option("--noise-sd", synth_opts.noise_sd, "Noise sd for --kind bands");
  synth->add_option("--out-dir", synth_opts.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what(), 2);
  }

  rsa::parallel::set_thread_limit(threads);

  try {
    RunRecord record;
    std::string command;
    const CLI::App* active = nullptr;
    if (rdm->parsed()) {
      record = cmd_rdm(rdm_opts), command = "rdm", active = rdm;
    } else if (rsm->parsed()) {
      record = cmd_rsm(rsm_opts), command = "rsm", active = rsm;
    } else if (disagree->parsed()) {
      record = cmd_disagree(disagree_opts), command = "disagree", active = disagree;
    } else if (third->parsed()) {
      record = cmd_third(third_opts), command = "third", active = third;
    } else if (features->parsed()) {
      record = cmd_features(feature_opts), command = "features " + feature_opts.kind;
      active = features->get_subcommand(feature_opts.kind);
    } else if (anova->parsed()) {
      record = cmd_anova(anova_opts), command = "anova", active = anova;
    } else if (heatmap->parsed()) {
      record = cmd_heatmap(heatmap_opts), command = "heatmap", active = heatmap;
    } else {
      record = cmd_synth(synth_opts), command = "synth", active = synth;
    }
    if (manifest) {
      std::map<std::string, std::vector<std::string>> config;
      collect_config(active, "", config);
      write_manifests(command, config, record);
    }
  } catch (const rsa::IoError& e) {
    return fail("io", e.what(), 1);
  } catch (const rsa::ValidationError& e) {
    return fail("validation", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
