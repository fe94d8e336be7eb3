// Copyright 2025 The convqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "convqa/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "convqa/corpus.hpp"
#include "convqa/embedding.hpp"
#include "convqa/ensemble.hpp"
#include "convqa/errors.hpp"
#include "convqa/filter.hpp"
#include "convqa/metrics.hpp"
#include "convqa/parallel.hpp"
#include "convqa/textproc.hpp"

namespace convqa::cli {

namespace {

using nlohmann::json;

constexpr const char* kFooter =
    "Exit codes:\n"
    "  0  success\n"
    "  1  I/O or unexpected error\n"
    "  2  schema violation in an input file\n"
    "  3  sample-id mismatch between files\n"
    "  4  test-split samples in a merge (override with --allow-test)\n"
    "  5  missing prediction or missing gold answer\n"
    "  6  embedding provider failure\n"
    "  7  invalid configuration or flags\n";

// Everything result-affecting that a subcommand resolved, echoed into each
// output's metadata header. Worker count and credentials stay out: the
// former must not break byte-identity across --workers values, the latter
// must not leak.
json make_meta(const std::string& command, json config) {
  return json{{"_meta",
               {{"tool", "convqa"},
                {"version", std::string(kToolVersion)},
                {"command", command},
                {"config", std::move(config)}}}};
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out << content;
  if (!out) {
    throw IoError("failed writing " + path);
  }
}

void write_jsonl_file(const std::string& path, const json& meta,
                      const std::vector<json>& records) {
  std::ostringstream buffer;
  buffer << meta.dump() << '\n';
  for (const json& record : records) {
    buffer << record.dump() << '\n';
  }
  write_text_file(path, buffer.str());
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

// Embedding-provider flags shared by filter / ensemble / embed.
struct ProviderFlags {
  std::string kind = "localhash";
  int dimension = 1024;
  std::string base_url;
  std::string model;
  int batch_size = 16;
  int max_retries = 3;
  long timeout_ms = 30000;
  std::string api_key_env = "EMBED_API_KEY";

  void add_to(CLI::App* sub) {
    sub->add_option("--provider", kind, "Embedding provider: localhash|http")
        ->capture_default_str();
    sub->add_option("--dimension", dimension,
                    "Vector dimension (localhash; for http, 0 accepts the server's)")
        ->capture_default_str();
    sub->add_option("--base-url", base_url, "Embedding service base URL (http provider)");
    sub->add_option("--model", model, "Embedding model name sent to the service");
    sub->add_option("--batch-size", batch_size, "Texts per embedding request")
        ->capture_default_str();
    sub->add_option("--max-retries", max_retries, "Retries per failed request")
        ->capture_default_str();
    sub->add_option("--timeout-ms", timeout_ms, "Request timeout in milliseconds")
        ->capture_default_str();
    sub->add_option("--api-key-env", api_key_env,
                    "Environment variable holding the service API key")
        ->capture_default_str();
  }

  embedding::ProviderConfig to_config() const {
    embedding::ProviderConfig cfg;
    cfg.kind = embedding::provider_kind_from_string(kind);
    cfg.dimension = dimension;
    cfg.base_url = base_url;
    cfg.model_name = model;
    cfg.batch_size = batch_size;
    cfg.max_retries = max_retries;
    cfg.timeout = std::chrono::milliseconds(timeout_ms);
    cfg.api_key_env = api_key_env;
    cfg.validate();
    return cfg;
  }

  json to_json() const {
    return json{{"provider", kind},     {"dimension", dimension},
                {"base_url", base_url}, {"model", model},
                {"batch_size", batch_size}, {"max_retries", max_retries},
                {"timeout_ms", timeout_ms}, {"api_key_env", api_key_env}};
  }
};

// Negative values disable a threshold side.
std::optional<double> band_value(double v) {
  if (v < 0.0) {
    return std::nullopt;
  }
  return v;
}

json band_to_json(const filter::ThresholdBand& band) {
  json j;
  j["tau_high"] = band.tau_high ? json(*band.tau_high) : json(nullptr);
  j["tau_low"] = band.tau_low ? json(*band.tau_low) : json(nullptr);
  return j;
}

struct Invocation {
  // Globals (flag > env > config file > built-in default, via CLI11).
  unsigned workers = 0;
  double beta = 1.0;
  std::string template_id = "plain";

  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

int map_exception_to_exit(std::ostream& err) {
  try {
    throw;
  } catch (const SchemaViolation& e) {
    err << "schema error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const DuplicateSampleId& e) {
    err << "schema error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const MissingHypothesis& e) {
    err << "sample-id mismatch: " << e.what() << '\n';
    return kExitIdMismatch;
  } catch (const UnknownSampleId& e) {
    err << "sample-id mismatch: " << e.what() << '\n';
    return kExitIdMismatch;
  } catch (const SampleIdMismatch& e) {
    err << "sample-id mismatch: " << e.what() << '\n';
    return kExitIdMismatch;
  } catch (const TestSplitRejected& e) {
    err << "merge rejected: " << e.what() << '\n';
    return kExitTestSplit;
  } catch (const MissingPrediction& e) {
    err << "missing data: " << e.what() << '\n';
    return kExitMissingData;
  } catch (const MissingGoldAnswer& e) {
    err << "missing data: " << e.what() << '\n';
    return kExitMissingData;
  } catch (const HttpError& e) {
    err << "provider error: " << e.what() << '\n';
    return kExitProvider;
  } catch (const DimensionMismatch& e) {
    err << "provider error: " << e.what() << '\n';
    return kExitProvider;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

// --- subcommands ---

struct PrepareArgs {
  std::string in;
  std::string out;
  std::string mode = "multi";
  std::string split = "train";
};

int cmd_prepare(const Invocation& inv, const PrepareArgs& args) {
  const corpus::Split split = corpus::split_from_string(args.split);
  const corpus::PromptMode mode = corpus::prompt_mode_from_string(args.mode);
  const corpus::PromptTemplate tpl = corpus::PromptTemplate::by_id(inv.template_id);

  const std::vector<corpus::Sample> samples = corpus::load_jsonl(args.in, split);
  std::vector<json> records(samples.size());
  parallel_for(samples.size(), inv.workers, [&](std::size_t i) {
    records[i] = corpus::prompt_record_to_json(corpus::assemble_prompt(samples[i], mode, tpl));
  });

  const json meta = make_meta("prepare", json{{"in", args.in},
                                              {"out", args.out},
                                              {"mode", args.mode},
                                              {"split", args.split},
                                              {"template", inv.template_id}});
  write_jsonl_file(args.out, meta, records);
  *inv.out << "wrote " << records.size() << " prompt records to " << args.out << '\n';
  return kExitOk;
}

struct EvaluateArgs {
  std::string refs;
  std::string hyps;
  std::string out;
  bool strict_tokens = false;
  bool kr_word_boundary = false;
};

int cmd_evaluate(const Invocation& inv, const EvaluateArgs& args) {
  const std::vector<corpus::Sample> refs = corpus::load_jsonl(args.refs, corpus::Split::Eval);
  const std::vector<corpus::Prediction> hyps = corpus::load_predictions(args.hyps);

  metrics::EvaluateOptions opts;
  opts.beta = inv.beta;
  opts.workers = inv.workers;
  opts.norm.compatibility_fold = !args.strict_tokens;
  opts.keywords.word_boundary = args.kr_word_boundary;
  const metrics::MetricReport report = metrics::evaluate_corpus(refs, hyps, opts);

  json j = metrics::report_to_json(report);
  j["meta"] = make_meta("evaluate", json{{"refs", args.refs},
                                         {"hyps", args.hyps},
                                         {"out", args.out},
                                         {"beta", inv.beta},
                                         {"strict_tokens", args.strict_tokens},
                                         {"kr_word_boundary", args.kr_word_boundary}})["_meta"];
  write_json_file(args.out, j);

  *inv.out << "W-ROUGE-L: " << report.w_rouge_l_f << '\n'
           << "C-ROUGE-L: " << report.c_rouge_l_f << '\n'
           << "KR: " << report.kr << '\n';
  return kExitOk;
}

struct FilterArgs {
  std::string in;
  std::string out;
  std::string report;
  std::string split = "train";
  std::string action = "report";
  bool embed_with_history = false;
  double tau_cos_high = 0.95;
  double tau_cos_low = 0.05;
  double tau_word_high = 0.90;
  double tau_word_low = -1.0;
  double tau_char_high = 0.90;
  double tau_char_low = -1.0;
  ProviderFlags provider;
};

int cmd_filter(const Invocation& inv, const FilterArgs& args) {
  filter::FilterConfig cfg;
  cfg.cosine = {band_value(args.tau_cos_high), band_value(args.tau_cos_low)};
  cfg.word_rouge = {band_value(args.tau_word_high), band_value(args.tau_word_low)};
  cfg.char_rouge = {band_value(args.tau_char_high), band_value(args.tau_char_low)};
  cfg.embed_with_history = args.embed_with_history;
  if (args.action == "report") {
    cfg.action = filter::FilterConfig::Action::ReportOnly;
  } else if (args.action == "drop") {
    cfg.action = filter::FilterConfig::Action::Drop;
  } else {
    throw ConfigError("unknown action \"" + args.action + "\" (expected report|drop)");
  }
  cfg.validate();
  if (cfg.action == filter::FilterConfig::Action::Drop && args.out.empty()) {
    throw ConfigError("--action drop requires --out");
  }
  const embedding::ProviderConfig provider = args.provider.to_config();

  const corpus::Split split = corpus::split_from_string(args.split);
  const std::vector<corpus::Sample> samples = corpus::load_jsonl(args.in, split);

  std::vector<std::vector<filter::DocScorecard>> per_sample(samples.size());
  parallel_for(samples.size(), inv.workers, [&](std::size_t i) {
    if (!samples[i].documents.empty()) {
      per_sample[i] = filter::score_documents(samples[i], cfg, provider);
    }
  });
  std::vector<filter::DocScorecard> cards;
  for (std::vector<filter::DocScorecard>& sample_cards : per_sample) {
    cards.insert(cards.end(), std::make_move_iterator(sample_cards.begin()),
                 std::make_move_iterator(sample_cards.end()));
  }

  const filter::FilterResult result = filter::apply_filter(samples, cards, cfg);

  const json config{{"in", args.in},
                    {"out", args.out},
                    {"report", args.report},
                    {"split", args.split},
                    {"action", args.action},
                    {"embed_with_history", args.embed_with_history},
                    {"thresholds",
                     {{"cosine", band_to_json(cfg.cosine)},
                      {"word_rouge_l", band_to_json(cfg.word_rouge)},
                      {"char_rouge_l", band_to_json(cfg.char_rouge)}}},
                    {"provider", args.provider.to_json()}};

  json report_json = filter::report_to_json(result.report);
  report_json["meta"] = make_meta("filter", config)["_meta"];
  write_json_file(args.report, report_json);

  if (cfg.action == filter::FilterConfig::Action::Drop) {
    std::vector<json> lines;
    lines.reserve(result.kept.size());
    for (const corpus::Sample& s : result.kept) {
      lines.push_back(corpus::sample_to_json(s));
    }
    write_jsonl_file(args.out, make_meta("filter", config), lines);
  }

  *inv.out << "flagged " << result.report.n_flagged << " documents (dropped "
           << result.report.n_dropped << ")\n";
  return kExitOk;
}

struct MergeArgs {
  std::string train;
  std::string eval;
  std::string preds;
  std::string out;
  std::string eval_split = "eval";
  bool allow_test = false;
};

int cmd_merge(const Invocation& inv, const MergeArgs& args) {
  const std::vector<corpus::Sample> train = corpus::load_jsonl(args.train, corpus::Split::Train);
  const std::vector<corpus::Sample> evals =
      corpus::load_jsonl(args.eval, corpus::split_from_string(args.eval_split));
  const std::vector<corpus::Prediction> preds = corpus::load_predictions(args.preds);

  corpus::MergeOptions opts;
  opts.allow_test = args.allow_test;
  const std::vector<corpus::Sample> merged =
      corpus::merge_pseudo_labels(train, evals, preds, opts);

  std::vector<json> lines;
  lines.reserve(merged.size());
  std::size_t n_pseudo = 0;
  for (const corpus::Sample& s : merged) {
    n_pseudo += s.pseudo ? 1 : 0;
    lines.push_back(corpus::sample_to_json(s));
  }
  const json meta = make_meta("merge", json{{"train", args.train},
                                            {"eval", args.eval},
                                            {"preds", args.preds},
                                            {"out", args.out},
                                            {"eval_split", args.eval_split},
                                            {"allow_test", args.allow_test}});
  write_jsonl_file(args.out, meta, lines);
  *inv.out << "merged " << merged.size() << " samples (" << n_pseudo << " pseudo-labeled)\n";
  return kExitOk;
}

struct EnsembleArgs {
  std::vector<std::string> inputs;
  std::string out;
  std::string decisions;
  std::string quantizer = "emb_a_s";
  bool sweep = false;
  ProviderFlags provider;
};

int cmd_ensemble(const Invocation& inv, const EnsembleArgs& args) {
  ensemble::EnsembleOptions opts;
  opts.quantizer = ensemble::quantizer_from_string(args.quantizer);
  opts.workers = inv.workers;
  opts.source_labels = args.inputs;
  if (opts.quantizer == ensemble::Quantizer::EmbAS) {
    opts.provider = args.provider.to_config();
  }

  std::vector<std::vector<corpus::Prediction>> files;
  files.reserve(args.inputs.size());
  for (const std::string& path : args.inputs) {
    files.push_back(corpus::load_predictions(path));
  }

  const json config{{"inputs", args.inputs},
                    {"out", args.out},
                    {"decisions", args.decisions},
                    {"quantizer", args.quantizer},
                    {"sweep", args.sweep},
                    {"provider", args.provider.to_json()}};

  auto write_selection = [&](const ensemble::CorpusEnsembleResult& result,
                             const std::string& out_path) {
    std::vector<json> lines;
    lines.reserve(result.selections.size());
    for (const corpus::Prediction& p : result.selections) {
      lines.push_back(json{{"sample_id", p.sample_id}, {"answer", p.answer}});
    }
    write_jsonl_file(out_path, make_meta("ensemble", config), lines);
  };

  const ensemble::CorpusEnsembleResult result = ensemble::ensemble_corpus(files, opts);
  write_selection(result, args.out);

  std::string decisions_path = args.decisions;
  if (decisions_path.empty()) {
    decisions_path = args.out + ".decisions.jsonl";
  }
  std::vector<json> decision_lines;
  decision_lines.reserve(result.decisions.size());
  for (const ensemble::EnsembleDecision& d : result.decisions) {
    decision_lines.push_back(ensemble::decision_to_json(d));
  }
  write_jsonl_file(decisions_path, make_meta("ensemble", config), decision_lines);

  if (args.sweep) {
    // Prefix-subset sweep: how the decision changes as candidates accrue.
    for (std::size_t m = 1; m <= files.size(); ++m) {
      ensemble::EnsembleOptions sub_opts = opts;
      sub_opts.source_labels.assign(args.inputs.begin(), args.inputs.begin() + m);
      const std::span<const std::vector<corpus::Prediction>> prefix(files.data(), m);
      write_selection(ensemble::ensemble_corpus(prefix, sub_opts),
                      args.out + ".m" + std::to_string(m));
    }
  }

  *inv.out << "selected " << result.selections.size() << " answers from " << files.size()
           << " candidate files\n";
  return kExitOk;
}

struct EmbedArgs {
  std::string in;
  std::string out;
  ProviderFlags provider;
};

int cmd_embed(const Invocation& inv, const EmbedArgs& args) {
  const embedding::ProviderConfig provider = args.provider.to_config();
  const std::vector<std::string> texts = read_lines(args.in);
  const std::vector<embedding::EmbeddingVector> vectors =
      embedding::embed_texts(texts, provider);

  std::vector<json> lines;
  lines.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    std::vector<double> values(vectors[i].values.data(),
                               vectors[i].values.data() + vectors[i].values.size());
    lines.push_back(json{{"index", i}, {"embedding", values}});
  }
  const json meta = make_meta(
      "embed", json{{"in", args.in}, {"out", args.out}, {"provider", args.provider.to_json()}});
  write_jsonl_file(args.out, meta, lines);

  *inv.out << "embedded " << vectors.size() << " texts ("
           << (vectors.empty() ? 0 : vectors.front().values.size()) << " dimensions)\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Invocation inv;
  inv.out = &out;
  inv.err = &err;

  CLI::App app{"convqa: conversational multi-doc QA pipeline toolkit"};
  app.require_subcommand(1);
  app.footer(kFooter);
  app.set_version_flag("--version", "convqa " + std::string(kToolVersion));
  app.set_config("--config", "", "TOML config file (flag > env > config > default)");

  app.add_option("--workers", inv.workers,
                 "Worker threads for per-sample fan-out (0 = available parallelism)")
      ->envname("CONVQA_WORKERS")
      ->capture_default_str();
  app.add_option("--beta", inv.beta, "ROUGE-L f-measure beta")
      ->envname("CONVQA_BETA")
      ->capture_default_str();
  app.add_option("--template", inv.template_id, "Prompt template: plain|chat")
      ->envname("CONVQA_TEMPLATE")
      ->capture_default_str();

  PrepareArgs prepare_args;
  CLI::App* prepare = app.add_subcommand("prepare", "Assemble prompts with loss-mask spans");
  prepare->fallthrough();
  prepare->footer(kFooter);
  prepare->add_option("--in", prepare_args.in, "Input dataset JSONL")->required();
  prepare->add_option("--out", prepare_args.out, "Output prompt-record JSONL")->required();
  prepare->add_option("--mode", prepare_args.mode, "Loss-mask mode: single|multi")
      ->capture_default_str();
  prepare->add_option("--split", prepare_args.split, "Dataset split: train|eval|test")
      ->capture_default_str();

  EvaluateArgs evaluate_args;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Score hypotheses (W-ROUGE-L, C-ROUGE-L, KR)");
  evaluate->fallthrough();
  evaluate->footer(kFooter);
  evaluate->add_option("--refs", evaluate_args.refs, "Reference dataset JSONL (gold answers)")
      ->required();
  evaluate->add_option("--hyps", evaluate_args.hyps, "Hypothesis prediction JSONL")->required();
  evaluate->add_option("--out", evaluate_args.out, "Metric report JSON")->required();
  evaluate->add_flag("--strict-tokens", evaluate_args.strict_tokens,
                     "Disable NFKC + case-fold normalization");
  evaluate->add_flag("--kr-word-boundary", evaluate_args.kr_word_boundary,
                     "Require word boundaries around keyword matches");

  FilterArgs filter_args;
  CLI::App* filter_cmd =
      app.add_subcommand("filter", "Screen noisy documents by dual thresholds");
  filter_cmd->fallthrough();
  filter_cmd->footer(kFooter);
  filter_cmd->add_option("--in", filter_args.in, "Input dataset JSONL")->required();
  filter_cmd->add_option("--report", filter_args.report, "Filter report JSON")->required();
  filter_cmd->add_option("--out", filter_args.out, "Filtered dataset JSONL (drop action)");
  filter_cmd->add_option("--split", filter_args.split, "Dataset split: train|eval|test")
      ->capture_default_str();
  filter_cmd->add_option("--action", filter_args.action, "report | drop")
      ->capture_default_str();
  filter_cmd->add_flag("--embed-with-history", filter_args.embed_with_history,
                       "Threshold the cosine of question+history instead of question alone");
  filter_cmd
      ->add_option("--tau-cos-high", filter_args.tau_cos_high, "Cosine high threshold")
      ->capture_default_str();
  filter_cmd
      ->add_option("--tau-cos-low", filter_args.tau_cos_low,
                   "Cosine low threshold (negative disables)")
      ->capture_default_str();
  filter_cmd
      ->add_option("--tau-word-high", filter_args.tau_word_high, "Word ROUGE-L high threshold")
      ->capture_default_str();
  filter_cmd
      ->add_option("--tau-word-low", filter_args.tau_word_low,
                   "Word ROUGE-L low threshold (negative disables)")
      ->capture_default_str();
  filter_cmd
      ->add_option("--tau-char-high", filter_args.tau_char_high, "Char ROUGE-L high threshold")
      ->capture_default_str();
  filter_cmd
      ->add_option("--tau-char-low", filter_args.tau_char_low,
                   "Char ROUGE-L low threshold (negative disables)")
      ->capture_default_str();
  filter_args.provider.add_to(filter_cmd);

  MergeArgs merge_args;
  CLI::App* merge = app.add_subcommand("merge", "Merge pseudo-labeled eval data into train");
  merge->fallthrough();
  merge->footer(kFooter);
  merge->add_option("--train", merge_args.train, "Training dataset JSONL")->required();
  merge->add_option("--eval", merge_args.eval, "Eval dataset JSONL")->required();
  merge->add_option("--preds", merge_args.preds, "Predictions for the eval set (JSONL)")
      ->required();
  merge->add_option("--out", merge_args.out, "Merged dataset JSONL")->required();
  merge->add_option("--eval-split", merge_args.eval_split,
                    "Split of the --eval file: eval|test")
      ->capture_default_str();
  merge->add_flag("--allow-test", merge_args.allow_test,
                  "Permit test-split samples in the merge");

  EnsembleArgs ensemble_args;
  CLI::App* ensemble_cmd =
      app.add_subcommand("ensemble", "Consensus-select answers from candidate files");
  ensemble_cmd->fallthrough();
  ensemble_cmd->footer(kFooter);
  ensemble_cmd->add_option("--inputs", ensemble_args.inputs, "Candidate prediction JSONL files")
      ->required()
      ->expected(-1);
  ensemble_cmd->add_option("--out", ensemble_args.out, "Selected answers JSONL")->required();
  ensemble_cmd->add_option("--decisions", ensemble_args.decisions,
                           "Decisions sidecar JSONL (default <out>.decisions.jsonl)");
  ensemble_cmd
      ->add_option("--quantizer", ensemble_args.quantizer,
                   "Similarity quantizer: emb_a_s|word_a_f|char_a_f")
      ->capture_default_str();
  ensemble_cmd->add_flag("--sweep", ensemble_args.sweep,
                         "Also write selections for every prefix subset of inputs");
  ensemble_args.provider.add_to(ensemble_cmd);

  EmbedArgs embed_args;
  CLI::App* embed = app.add_subcommand("embed", "Embed texts, one per input line");
  embed->fallthrough();
  embed->footer(kFooter);
  embed->add_option("--in", embed_args.in, "Input text file, one text per line")->required();
  embed->add_option("--out", embed_args.out, "Embedding JSONL")->required();
  embed_args.provider.add_to(embed);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("convqa");
  for (const std::string& arg : args) {
    argv.push_back(arg.c_str());
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    // Keep the documented code for usage errors; --help/--version exit 0.
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (prepare->parsed()) return cmd_prepare(inv, prepare_args);
    if (evaluate->parsed()) return cmd_evaluate(inv, evaluate_args);
    if (filter_cmd->parsed()) return cmd_filter(inv, filter_args);
    if (merge->parsed()) return cmd_merge(inv, merge_args);
    if (ensemble_cmd->parsed()) return cmd_ensemble(inv, ensemble_args);
    if (embed->parsed()) return cmd_embed(inv, embed_args);
    err << "no subcommand\n";
    return kExitConfig;
  } catch (...) {
    return map_exception_to_exit(err);
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
  for (int i = 1; i < argc; ++i) {
    args.emplace_back(argv[i]);
  }
  return run(args, std::cout, std::cerr);
}

}  // namespace convqa::cli
