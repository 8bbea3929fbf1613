// silver -- joint-embedding similarity scoring for sign-language generation,
// baseline text metrics, and the statistical analyses that compare them.
//
// Subcommands:
//   score         per-record similarity scores from an SLVE embedding file
//   analyze       correct-vs-random | reorder | prosody | retrieval
//   text-metrics  per-sentence BLEU / ROUGE rows for two plain-text files
//   kde-export    density curves for score dumps, for external plotting
//   synth         synthetic paired-embedding generator
//
// Exit codes: 0 ok, 2 input error, 3 a requested metric was entirely
// undefined. On failure nothing is written to stdout and a single diagnostic
// line goes to stderr.

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "silver/silver.hpp"

namespace {

using namespace silver;

struct MetricUndefinedError : Error {
  using Error::Error;
};

std::uint64_t item_seed(std::uint64_t seed, std::size_t index) {
  return seed ^ (0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1));
}

std::string file_digest(const std::string& path) {
  return to_hex64(fnv1a64(io::detail::read_file(path)));
}

// ---------------------------------------------------------------------------
// Shared analysis state: items joined across the embedding and corpus inputs.

struct AnalysisInputs {
  std::string embeddings_path;
  std::string corpus_path;
  std::string prosody_path;

  Tokenizer tokenizer = Tokenizer::Whitespace;
  Smoothing smoothing = Smoothing::Epsilon;
  std::size_t max_n = 4;
  double weight = 3.5;
  double temperature = 1.0;
  Direction direction = Direction::VideoToText;
  std::uint64_t seed = 42;
  std::uint64_t shuffle_seed = 42;
  bool normalize = true;
  std::vector<std::string> metric_filter;
  std::string format = "table";
  std::string dump_scores_path;
};

struct Items {
  std::vector<std::string> ids;
  // Normalized embedding matrices, parallel to ids (empty when no embeddings).
  std::vector<Matrix> clips;
  std::vector<Matrix> tokens;
  // Tokenized corpus text, parallel to ids; nullopt when untokenizable.
  std::vector<std::optional<TokenList>> ref_tokens;
  std::vector<std::optional<TokenList>> hyp_tokens;
  std::vector<std::optional<TokenList>> reordered_tokens;  // from the corpus file
  bool has_embeddings = false;
  bool has_corpus = false;

  std::size_t size() const { return ids.size(); }
};

std::optional<TokenList> try_tokenize(const std::string& text, Tokenizer mode) {
  try {
    return tokenize(text, mode);
  } catch (const EmptySentenceError&) {
    return std::nullopt;
  }
}

Items join_items(const std::vector<io::EmbeddingRecord>& records,
                 const std::vector<io::CorpusRecord>& corpus, Tokenizer tokenizer) {
  Items items;
  items.has_embeddings = !records.empty();
  items.has_corpus = !corpus.empty();
  std::map<std::string, const io::CorpusRecord*> corpus_by_id;
  for (const auto& rec : corpus) corpus_by_id[rec.id] = &rec;

  auto add_corpus_side = [&](const io::CorpusRecord& rec) {
    items.ref_tokens.push_back(try_tokenize(rec.reference, tokenizer));
    items.hyp_tokens.push_back(try_tokenize(rec.hypothesis, tokenizer));
    items.reordered_tokens.push_back(rec.reordered_hypothesis
                                         ? try_tokenize(*rec.reordered_hypothesis, tokenizer)
                                         : std::nullopt);
  };

  if (items.has_embeddings) {
    for (const auto& rec : records) {
      if (items.has_corpus) {
        auto it = corpus_by_id.find(rec.id);
        if (it == corpus_by_id.end()) continue;  // intersection, embedding order
        add_corpus_side(*it->second);
      }
      items.ids.push_back(rec.id);
      items.clips.push_back(l2_normalize_rows(rec.clips.values));
      items.tokens.push_back(l2_normalize_rows(rec.tokens.values));
    }
  } else {
    for (const auto& rec : corpus) {
      items.ids.push_back(rec.id);
      add_corpus_side(rec);
    }
  }
  return items;
}

// ---------------------------------------------------------------------------
// Metric registry. Each metric scores an (output item, reference item) pair;
// undefined scores surface as nullopt and are dropped pairwise upstream.

struct MetricDef {
  std::string name;
  std::function<std::optional<double>(std::size_t, std::size_t)> pair_score;
  // Self-score with the reordered hypothesis (text) or reordered token rows
  // (embeddings); used by the reorder analysis.
  std::function<std::optional<double>(std::size_t)> reordered_score;
};

std::vector<MetricDef> build_metrics(const Items& items, const AnalysisInputs& opts) {
  std::vector<MetricDef> metrics;

  if (items.has_embeddings) {
    auto silver_z = [&items, &opts](std::size_t a, std::size_t b) -> std::optional<double> {
      const Matrix e = similarity_matrix(items.clips[a], items.tokens[b]);
      return z_similarity(softmax_reweight(e, opts.direction, opts.temperature), opts.direction);
    };
    auto silver_reordered = [&items, &opts](std::size_t i) -> std::optional<double> {
      const Matrix shuffled = shuffle_rows(items.tokens[i], item_seed(opts.shuffle_seed, i));
      const Matrix e = similarity_matrix(items.clips[i], shuffled);
      return z_similarity(softmax_reweight(e, opts.direction, opts.temperature), opts.direction);
    };
    metrics.push_back({"silverscore", silver_z, silver_reordered});

    auto greedy_f1 = [&items](std::size_t a, std::size_t b) -> std::optional<double> {
      return greedy_match(items.clips[a], items.tokens[b]).f1;
    };
    auto greedy_reordered = [&items, &opts](std::size_t i) -> std::optional<double> {
      const Matrix shuffled = shuffle_rows(items.tokens[i], item_seed(opts.shuffle_seed, i));
      return greedy_match(items.clips[i], shuffled).f1;
    };
    metrics.push_back({"greedy-match", greedy_f1, greedy_reordered});
  }

  if (items.has_corpus) {
    auto reordered_hyp = [&items, &opts](std::size_t i) -> std::optional<TokenList> {
      if (items.reordered_tokens[i]) return items.reordered_tokens[i];
      if (!items.hyp_tokens[i]) return std::nullopt;
      try {
        return shuffle_reorder(*items.hyp_tokens[i], item_seed(opts.shuffle_seed, i));
      } catch (const TooShortError&) {
        return std::nullopt;
      }
    };
    for (std::size_t n = 1; n <= opts.max_n; ++n) {
      auto pair = [&items, &opts, n](std::size_t a, std::size_t b) -> std::optional<double> {
        if (!items.hyp_tokens[a] || !items.ref_tokens[b]) return std::nullopt;
        return bleu(*items.hyp_tokens[a], {*items.ref_tokens[b]}, n, opts.smoothing).value;
      };
      auto reordered = [&items, &opts, n, reordered_hyp](std::size_t i) -> std::optional<double> {
        const auto hyp = reordered_hyp(i);
        if (!hyp || !items.ref_tokens[i]) return std::nullopt;
        return bleu(*hyp, {*items.ref_tokens[i]}, n, opts.smoothing).value;
      };
      metrics.push_back({"bleu-" + std::to_string(n), pair, reordered});
    }
    auto rouge_pair = [&items](std::size_t a, std::size_t b) -> std::optional<double> {
      if (!items.hyp_tokens[a] || !items.ref_tokens[b]) return std::nullopt;
      return rouge_l(*items.hyp_tokens[a], *items.ref_tokens[b]).f1;
    };
    auto rouge_reordered = [&items, &opts, reordered_hyp](std::size_t i) -> std::optional<double> {
      const auto hyp = reordered_hyp(i);
      if (!hyp || !items.ref_tokens[i]) return std::nullopt;
      return rouge_l(*hyp, *items.ref_tokens[i]).f1;
    };
    metrics.push_back({"rouge-l", rouge_pair, rouge_reordered});
  }

  if (!opts.metric_filter.empty()) {
    std::vector<MetricDef> filtered;
    for (const auto& want : opts.metric_filter) {
      bool found = false;
      for (auto& m : metrics) {
        if (m.name == want) {
          filtered.push_back(m);
          found = true;
          break;
        }
      }
      if (!found) {
        throw Error("unknown or unavailable metric '" + want + "' (check inputs)");
      }
    }
    return filtered;
  }
  return metrics;
}

ReportFormat parse_format(const std::string& name) {
  if (name == "table") return ReportFormat::Table;
  if (name == "delimited") return ReportFormat::Delimited;
  return ReportFormat::Structured;
}

void echo_common_options(AnalysisReport& rep, const AnalysisInputs& opts, bool with_pairing) {
  if (with_pairing) rep.options.emplace_back("seed", std::to_string(opts.seed));
  rep.options.emplace_back("normalize", opts.normalize ? "true" : "false");
  rep.options.emplace_back("direction", to_string(opts.direction));
  rep.options.emplace_back("temperature", fmt_sig4(opts.temperature));
  if (opts.corpus_path.empty()) return;
  rep.options.emplace_back("tokenizer",
                           opts.tokenizer == Tokenizer::Whitespace ? "whitespace" : "character");
  rep.options.emplace_back("smoothing",
                           opts.smoothing == Smoothing::Epsilon ? "epsilon" : "none");
  rep.options.emplace_back("max-n", std::to_string(opts.max_n));
}

struct LoadedData {
  std::vector<io::EmbeddingRecord> records;
  std::vector<io::CorpusRecord> corpus;
  std::vector<ProsodyAnnotation> annotations;
  std::vector<InputDigest> digests;
};

LoadedData load_inputs(const AnalysisInputs& opts) {
  LoadedData data;
  if (!opts.embeddings_path.empty()) {
    data.records = io::load_embeddings(opts.embeddings_path);
    data.digests.push_back({opts.embeddings_path, file_digest(opts.embeddings_path)});
  }
  if (!opts.corpus_path.empty()) {
    data.corpus = io::load_corpus(opts.corpus_path);
    data.digests.push_back({opts.corpus_path, file_digest(opts.corpus_path)});
  }
  if (!opts.prosody_path.empty()) {
    data.annotations = io::load_prosody(opts.prosody_path);
    data.digests.push_back({opts.prosody_path, file_digest(opts.prosody_path)});
  }
  return data;
}

void maybe_dump_scores(const AnalysisInputs& opts, const std::vector<ScoreDistribution>& dists) {
  if (!opts.dump_scores_path.empty()) io::save_scores(dists, opts.dump_scores_path);
}

// ---------------------------------------------------------------------------
// analyze correct-vs-random / reorder

std::string run_paired_analysis(const AnalysisInputs& opts, bool reorder_mode) {
  const LoadedData data = load_inputs(opts);
  Items items = join_items(data.records, data.corpus, opts.tokenizer);
  if (items.size() < 2) {
    throw Error("need at least 2 joined items, got " + std::to_string(items.size()));
  }
  const auto metrics = build_metrics(items, opts);
  if (metrics.empty()) throw Error("no metrics computable from the given inputs");

  AnalysisReport rep;
  rep.command = reorder_mode ? "analyze reorder" : "analyze correct-vs-random";
  rep.inputs = data.digests;
  rep.first_condition = reorder_mode ? "original" : "correct";
  rep.second_condition = reorder_mode ? "reordered" : "random";
  echo_common_options(rep, opts, !reorder_mode);
  if (reorder_mode) rep.options.emplace_back("shuffle-seed", std::to_string(opts.shuffle_seed));

  std::optional<PairingPlan> plan;
  if (!reorder_mode) plan = derangement(items.size(), opts.seed);

  std::vector<ScoreDistribution> dumps;
  for (const auto& metric : metrics) {
    PairedScores paired;
    if (reorder_mode) {
      paired = assemble_paired(
          items.size(), [&](std::size_t i) { return metric.pair_score(i, i); },
          [&](std::size_t i) { return metric.reordered_score(i); });
    } else {
      paired = assemble_paired(
          items.size(), [&](std::size_t i) { return metric.pair_score(i, i); },
          [&](std::size_t i) { return metric.pair_score(i, plan->mapping[i]); });
    }
    if (paired.first.empty()) {
      throw MetricUndefinedError("metric " + metric.name + ": all " +
                                 std::to_string(items.size()) + " items undefined");
    }
    ScoreDistribution first{metric.name, rep.first_condition, paired.first, paired.dropped};
    ScoreDistribution second{metric.name, rep.second_condition, paired.second, paired.dropped};
    SeparabilityResult result;
    try {
      result = discrimination_analysis(first, second, opts.normalize);
    } catch (const DegenerateRangeError& e) {
      throw DegenerateRangeError("metric " + metric.name + ": " + e.what());
    } catch (const DegenerateSampleError& e) {
      throw DegenerateSampleError("metric " + metric.name + ": " + e.what());
    }
    rep.separability.push_back({metric.name, result, paired.dropped});
    dumps.push_back(std::move(first));
    dumps.push_back(std::move(second));
  }
  maybe_dump_scores(opts, dumps);
  return render(rep, parse_format(opts.format));
}

// ---------------------------------------------------------------------------
// analyze prosody

std::string run_prosody_analysis(const AnalysisInputs& opts) {
  const LoadedData data = load_inputs(opts);
  Items items = join_items(data.records, data.corpus, opts.tokenizer);
  if (items.size() < 3) {
    throw Error("need at least 3 joined items for correlation, got " +
                std::to_string(items.size()));
  }
  const auto metrics = build_metrics(items, opts);
  if (metrics.empty()) throw Error("no metrics computable from the given inputs");

  std::map<std::string, const ProsodyAnnotation*> by_id;
  for (const auto& a : data.annotations) by_id[a.sentence_id] = &a;

  AnalysisReport rep;
  rep.command = "analyze prosody";
  rep.inputs = data.digests;
  echo_common_options(rep, opts, false);

  // Category bookkeeping over every analyzed item.
  rep.has_categories = true;
  for (const auto& id : items.ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw MissingAnnotationError("no prosody annotation for sentence " + id);
    }
    ++rep.category_counts[static_cast<std::size_t>(it->second->category)].count;
  }
  for (auto& cat : rep.category_counts) {
    cat.percent = 100.0 * static_cast<double>(cat.count) / static_cast<double>(items.size());
  }

  std::vector<ScoreDistribution> dumps;
  for (const auto& metric : metrics) {
    std::vector<ScoredSentence> scored;
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto v = metric.pair_score(i, i);
      if (!v) {
        ++dropped;
        continue;
      }
      scored.push_back({items.ids[i], *v});
    }
    if (scored.empty()) {
      throw MetricUndefinedError("metric " + metric.name + ": all " +
                                 std::to_string(items.size()) + " items undefined");
    }
    auto report = prosody_analysis(scored, data.annotations);
    rep.prosody.push_back({metric.name, std::move(report), dropped});
    ScoreDistribution dist{metric.name, "correct", {}, dropped};
    for (const auto& s : scored) dist.values.push_back(s.score);
    dumps.push_back(std::move(dist));
  }
  maybe_dump_scores(opts, dumps);
  return render(rep, parse_format(opts.format));
}

// ---------------------------------------------------------------------------
// analyze retrieval

std::string run_retrieval_analysis(const AnalysisInputs& opts, std::vector<std::size_t> ks,
                                   const std::string& retrieval_direction,
                                   const std::string& heatmap_path) {
  const LoadedData data = load_inputs(opts);
  if (data.records.size() < 2) {
    throw Error("need at least 2 embedding records, got " + std::to_string(data.records.size()));
  }
  std::vector<Matrix> clips, tokens;
  clips.reserve(data.records.size());
  tokens.reserve(data.records.size());
  for (const auto& rec : data.records) {
    clips.push_back(l2_normalize_rows(rec.clips.values));
    tokens.push_back(l2_normalize_rows(rec.tokens.values));
  }
  // sim(i, j): text query i against video j.
  const std::size_t n = data.records.size();
  Matrix sim(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Matrix e = similarity_matrix(clips[j], tokens[i]);
      sim(i, j) =
          z_similarity(softmax_reweight(e, opts.direction, opts.temperature), opts.direction);
    }
  }

  AnalysisReport rep;
  rep.command = "analyze retrieval";
  rep.inputs = data.digests;
  echo_common_options(rep, opts, false);
  std::string ks_echo;
  for (std::size_t k : ks) ks_echo += (ks_echo.empty() ? "" : ",") + std::to_string(k);
  rep.options.emplace_back("ks", ks_echo);
  rep.options.emplace_back("retrieval-direction", retrieval_direction);

  if (retrieval_direction == "t2v" || retrieval_direction == "both") {
    rep.recall.push_back(recall_at_k(sim, ks, Direction::TextToVideo));
  }
  if (retrieval_direction == "v2t" || retrieval_direction == "both") {
    rep.recall.push_back(recall_at_k(sim, ks, Direction::VideoToText));
  }

  if (!heatmap_path.empty()) {
    std::vector<std::string> ids;
    for (const auto& rec : data.records) ids.push_back(rec.id);
    io::save_heatmap(sim, ids, ids, heatmap_path);
  }
  return render(rep, parse_format(opts.format));
}

// ---------------------------------------------------------------------------
// score

std::string run_score(const AnalysisInputs& opts) {
  const auto records = io::load_embeddings(opts.embeddings_path);
  std::string out;
  for (const auto& rec : records) {
    const auto s =
        silver_score(rec.clips, rec.tokens, {opts.weight, opts.temperature, opts.direction});
    out += rec.id;
    out += '\t';
    out += fmt_full(s.z);
    out += '\t';
    out += fmt_full(s.scaled);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// text-metrics

std::vector<std::string> read_lines(const std::string& path) {
  const std::string bytes = io::detail::read_file(path);
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(bytes);
  while (std::getline(in, line)) lines.push_back(io::detail::strip_cr(line));
  return lines;
}

std::string run_text_metrics(const std::string& refs_path, const std::string& hyps_path,
                             const AnalysisInputs& opts) {
  const auto refs = read_lines(refs_path);
  const auto hyps = read_lines(hyps_path);
  if (refs.size() != hyps.size()) {
    throw Error("line count mismatch: " + std::to_string(refs.size()) + " references vs " +
                std::to_string(hyps.size()) + " hypotheses");
  }
  std::string out = "# sentence";
  for (std::size_t n = 1; n <= opts.max_n; ++n) out += "\tbleu-" + std::to_string(n);
  out += "\trouge-l\n";
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto ref = try_tokenize(refs[i], opts.tokenizer);
    const auto hyp = try_tokenize(hyps[i], opts.tokenizer);
    out += std::to_string(i + 1);
    if (ref && hyp) {
      for (std::size_t n = 1; n <= opts.max_n; ++n) {
        const auto sub = bleu(*hyp, {*ref}, n, opts.smoothing);
        out += '\t';
        out += sub.value ? fmt_full(*sub.value) : "undefined";
      }
      const auto rl = rouge_l(*hyp, *ref);
      out += '\t';
      out += fmt_full(rl.f1);
    } else {
      for (std::size_t n = 0; n <= opts.max_n; ++n) out += "\tundefined";
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// kde-export

std::string run_kde_export(const std::string& scores_path, const std::string& out_path,
                           std::optional<double> bandwidth, std::size_t grid_size) {
  const auto dists = io::load_scores(scores_path);
  if (dists.empty()) throw Error(scores_path + ": no scores");
  std::vector<std::pair<ScoreDistribution, DensityCurve>> curves;
  for (const auto& dist : dists) {
    curves.emplace_back(dist, gaussian_kde(dist.values, bandwidth, grid_size));
  }
  io::save_density_curves(curves, out_path);
  return "wrote " + std::to_string(curves.size()) + " curves to " + out_path + "\n";
}

// ---------------------------------------------------------------------------
// synth

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    const auto v = static_cast<std::size_t>(std::stoull(text));
    return {v, v};
  }
  return {static_cast<std::size_t>(std::stoull(text.substr(0, colon))),
          static_cast<std::size_t>(std::stoull(text.substr(colon + 1)))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SiLVERScore: joint-embedding evaluation for sign-language generation"};
  app.require_subcommand(1);

  AnalysisInputs opts;
  std::string refs_path, hyps_path, scores_path, out_path, heatmap_path;
  std::string retrieval_direction = "t2v";
  std::string direction_name = "v2t";
  std::string tokenizer_name = "whitespace";
  std::string smoothing_name = "epsilon";
  std::vector<std::size_t> ks{1, 5, 10};
  double bandwidth = 0.0;
  std::size_t grid_size = 512;
  std::string clips_range = "3:10", tokens_range = "3:10";
  io::SynthesisConfig synth_cfg;
  std::string pairing_out;

  auto add_embedding_opts = [&](CLI::App* cmd, bool required) {
    auto* o = cmd->add_option("--embeddings", opts.embeddings_path, "SLVE or JSONL embedding file");
    if (required) o->required();
    cmd->add_option("--direction", direction_name, "aggregation direction (v2t|t2v)")
        ->check(CLI::IsMember({"v2t", "t2v"}));
    cmd->add_option("--temperature", opts.temperature, "softmax temperature")
        ->check(CLI::PositiveNumber);
  };
  auto add_corpus_opts = [&](CLI::App* cmd) {
    cmd->add_option("--corpus", opts.corpus_path,
                    "TSV corpus: id, reference, hypothesis[, reordered]");
    cmd->add_option("--tokenizer", tokenizer_name, "whitespace|character")
        ->check(CLI::IsMember({"whitespace", "character"}));
    cmd->add_option("--smoothing", smoothing_name, "epsilon|none")
        ->check(CLI::IsMember({"epsilon", "none"}));
    cmd->add_option("--max-n", opts.max_n, "highest BLEU order")->check(CLI::Range(1, 4));
  };
  auto add_report_opts = [&](CLI::App* cmd) {
    cmd->add_option("--format", opts.format, "table|delimited|structured")
        ->check(CLI::IsMember({"table", "delimited", "structured"}));
    cmd->add_option("--metrics", opts.metric_filter, "metric subset to analyze")->delimiter(',');
    cmd->add_option("--dump-scores", opts.dump_scores_path, "write per-item scores to this TSV");
    cmd->add_flag("--normalize,!--no-normalize", opts.normalize,
                  "min-max normalize pooled scores before overlap/AUC");
  };

  auto* score_cmd = app.add_subcommand("score", "per-record similarity scores");
  add_embedding_opts(score_cmd, true);
  score_cmd->add_option("--weight", opts.weight, "scaling weight")->check(CLI::PositiveNumber);

  auto* analyze = app.add_subcommand("analyze", "statistical analyses");
  analyze->require_subcommand(1);

  auto* cvr = analyze->add_subcommand("correct-vs-random",
                                      "discrimination between aligned and deranged pairs");
  add_embedding_opts(cvr, false);
  add_corpus_opts(cvr);
  add_report_opts(cvr);
  cvr->add_option("--seed", opts.seed, "derangement seed");

  auto* reorder = analyze->add_subcommand("reorder", "robustness to word reordering");
  add_embedding_opts(reorder, false);
  add_corpus_opts(reorder);
  add_report_opts(reorder);
  reorder->add_option("--shuffle-seed", opts.shuffle_seed,
                      "seed for fallback shuffles when the corpus has no reordered column");

  auto* prosody = analyze->add_subcommand("prosody", "prosody-stratified score analysis");
  add_embedding_opts(prosody, false);
  add_corpus_opts(prosody);
  add_report_opts(prosody);
  prosody->add_option("--prosody", opts.prosody_path, "token-intensity annotation file")
      ->required();

  auto* retrieval = analyze->add_subcommand("retrieval", "cross-modal recall@k");
  add_embedding_opts(retrieval, true);
  add_report_opts(retrieval);
  retrieval->add_option("--ks", ks, "recall cutoffs")->delimiter(',');
  retrieval->add_option("--retrieval-direction", retrieval_direction, "t2v|v2t|both")
      ->check(CLI::IsMember({"t2v", "v2t", "both"}));
  retrieval->add_option("--heatmap", heatmap_path, "export the similarity grid to this file");

  auto* text_cmd = app.add_subcommand("text-metrics", "per-sentence BLEU / ROUGE rows");
  text_cmd->add_option("--refs", refs_path, "reference sentences, one per line")->required();
  text_cmd->add_option("--hyps", hyps_path, "hypothesis sentences, one per line")->required();
  text_cmd->add_option("--tokenizer", tokenizer_name, "whitespace|character")
      ->check(CLI::IsMember({"whitespace", "character"}));
  text_cmd->add_option("--smoothing", smoothing_name, "epsilon|none")
      ->check(CLI::IsMember({"epsilon", "none"}));
  text_cmd->add_option("--max-n", opts.max_n, "highest BLEU order")->check(CLI::Range(1, 4));

  auto* kde_cmd = app.add_subcommand("kde-export", "density curves for score dumps");
  kde_cmd->add_option("--scores", scores_path, "metric<TAB>condition<TAB>value file")->required();
  kde_cmd->add_option("--out", out_path, "output curve file")->required();
  auto* bw_opt =
      kde_cmd->add_option("--bandwidth", bandwidth, "fixed KDE bandwidth")->check(CLI::PositiveNumber);
  kde_cmd->add_option("--grid", grid_size, "grid points")->check(CLI::Range(2, 100000));

  auto* synth_cmd = app.add_subcommand("synth", "synthetic paired embeddings");
  synth_cmd->add_option("--n", synth_cfg.n, "record count")->required();
  synth_cmd->add_option("--dim", synth_cfg.dim, "embedding dimension");
  synth_cmd->add_option("--clips", clips_range, "clip-row range lo:hi");
  synth_cmd->add_option("--tokens", tokens_range, "token-row range lo:hi");
  synth_cmd->add_option("--sigma", synth_cfg.noise_sigma, "noise scale")
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--seed", synth_cfg.seed, "generator seed");
  synth_cmd->add_option("--out", out_path, "output SLVE file")->required();
  synth_cmd->add_option("--pairing-out", pairing_out, "ground-truth pairing sidecar");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "silver: " << e.what() << "\n";
    return 2;
  }

  opts.direction = direction_name == "t2v" ? Direction::TextToVideo : Direction::VideoToText;
  opts.tokenizer = tokenizer_name == "character" ? Tokenizer::Character : Tokenizer::Whitespace;
  opts.smoothing = smoothing_name == "none" ? Smoothing::None : Smoothing::Epsilon;

  try {
    std::string output;
    if (score_cmd->parsed()) {
      output = run_score(opts);
    } else if (analyze->parsed()) {
      if (cvr->parsed() || reorder->parsed()) {
        if (opts.embeddings_path.empty() && opts.corpus_path.empty()) {
          throw Error("this analysis needs --embeddings and/or --corpus");
        }
        output = run_paired_analysis(opts, reorder->parsed());
      } else if (prosody->parsed()) {
        if (opts.embeddings_path.empty() && opts.corpus_path.empty()) {
          throw Error("prosody needs --embeddings and/or --corpus");
        }
        output = run_prosody_analysis(opts);
      } else {
        output = run_retrieval_analysis(opts, ks, retrieval_direction, heatmap_path);
      }
    } else if (text_cmd->parsed()) {
      output = run_text_metrics(refs_path, hyps_path, opts);
    } else if (kde_cmd->parsed()) {
      output = run_kde_export(scores_path, out_path,
                              bw_opt->count() ? std::optional<double>(bandwidth) : std::nullopt,
                              grid_size);
    } else if (synth_cmd->parsed()) {
      synth_cfg.clips_range = parse_range(clips_range);
      synth_cfg.tokens_range = parse_range(tokens_range);
      const auto data = io::generate_synthetic(synth_cfg);
      io::save_embeddings(data.records, out_path);
      const std::string pairing_path =
          pairing_out.empty() ? out_path + ".pairing.tsv" : pairing_out;
      io::save_pairing(data.ground_truth_pairing, pairing_path);
      output = "wrote " + std::to_string(data.records.size()) + " records to " + out_path +
               " (pairing: " + pairing_path + ")\n";
    }
    std::cout << output;
  } catch (const MetricUndefinedError& e) {
    std::cerr << "silver: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "silver: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
