// Command-line pipeline driver: synthetic corpus generation, classifier
// training, PR-curve evaluation, and conversation-level concept extraction.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "medtag/attn_extractor.hpp"
#include "medtag/checkpoint.hpp"
#include "medtag/config.hpp"
#include "medtag/corpus.hpp"
#include "medtag/dictionary.hpp"
#include "medtag/eval.hpp"
#include "medtag/extract.hpp"
#include "medtag/generator.hpp"
#include "medtag/train.hpp"

namespace {

using namespace medtag;

ConceptDictionary load_dictionary(const std::string& path) {
  return path.empty() ? ConceptDictionary::builtin() : ConceptDictionary::load(path);
}

std::unique_ptr<TextEncoder> make_encoder(const RunConfig& cfg, int text_dim,
                                          const std::vector<Conversation>& corpus) {
  if (cfg.embeddings_path.empty()) {
    return std::make_unique<HashedTextEncoder>(text_dim);
  }
  auto emb = std::make_unique<PrecomputedEmbeddings>(PrecomputedEmbeddings::load(cfg.embeddings_path));
  emb->validate_coverage(corpus);
  if (emb->dim() != text_dim) {
    throw DataError("precomputed embeddings have dim " + std::to_string(emb->dim()) +
                    " but text_dim is " + std::to_string(text_dim));
  }
  return emb;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
  if (!out) throw DataError("failed while writing file: " + path);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += "\"\"";
    else q.push_back(c);
  }
  q += "\"";
  return q;
}

// ---------------------------------------------------------------------------

int cmd_gen_data(const std::string& out_path, int n_convs, uint64_t seed,
                 const std::string& profile_path, const std::string& stats_csv) {
  RunConfig cfg;
  if (!profile_path.empty()) cfg = load_run_config(profile_path);
  const ConceptDictionary dict = load_dictionary(cfg.dictionary_path);
  const auto convs = synth_generate(cfg.generator, n_convs, seed, dict);
  write_corpus(convs, out_path);
  const CorpusStats stats = compute_stats(convs);
  const std::string csv = stats_to_csv(stats);
  std::cout << csv;
  if (!stats_csv.empty()) write_text_file(stats_csv, csv);
  return 0;
}

int cmd_train(const std::string& corpus_path, const std::string& val_path,
              const std::string& config_path, const std::string& out_dir,
              const std::vector<std::string>& ablate, std::optional<uint64_t> seed,
              std::optional<int> threads) {
  RunConfig cfg;
  if (!config_path.empty()) cfg = load_run_config(config_path);
  if (seed) cfg.train.seed = *seed;
  if (threads) cfg.train.threads = *threads;
  for (const auto& a : ablate) {
    if (a == "no-hierarchy") cfg.train.ablation.no_hierarchy = true;
    else if (a == "plain-bilstm") cfg.train.ablation.plain_bilstm = true;
    else if (a == "no-context") cfg.train.ablation.no_context = true;
    else throw UsageError("unknown ablation: " + a + " (expected no-hierarchy, plain-bilstm or no-context)");
  }
  cfg.train.validate();
  cfg.features.validate();

  const auto train_convs = parse_corpus(corpus_path);
  const auto val_convs = parse_corpus(val_path);
  const ConceptDictionary dict = load_dictionary(cfg.dictionary_path);
  std::vector<Conversation> all = train_convs;
  all.insert(all.end(), val_convs.begin(), val_convs.end());
  const auto encoder = make_encoder(cfg, cfg.features.text_dim, all);

  const int semantic_rows = std::max(1, dict.semantic_type_count());
  Model model = make_model(cfg.features, cfg.train.hidden_dim, semantic_rows, cfg.train.beta,
                           cfg.train.ablation, cfg.train.seed);

  const auto train_prep = prepare_corpus(train_convs, cfg.features, *encoder, dict, cfg.jaccard_min);
  const auto val_prep = prepare_corpus(val_convs, cfg.features, *encoder, dict, cfg.jaccard_min);
  TrainResult result = train_model(std::move(model), train_prep, val_prep, cfg.train);

  std::filesystem::create_directories(out_dir);
  const auto ckpt = (std::filesystem::path(out_dir) / "checkpoint.bin").string();
  save_model(result.model, ckpt);
  write_text_file((std::filesystem::path(out_dir) / "train_report.csv").string(),
                  train_report_csv(result.report));
  std::cout << "best_epoch " << result.report.best_epoch << "\n"
            << "best_val_auc " << format_float(result.report.best_val_auc) << "\n"
            << "checkpoint " << ckpt << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& corpus_path,
             const std::string& config_path, const std::string& out_dir) {
  RunConfig cfg;
  if (!config_path.empty()) cfg = load_run_config(config_path);
  Model model = load_model(checkpoint_path);
  const auto convs = parse_corpus(corpus_path);
  const ConceptDictionary dict = load_dictionary(cfg.dictionary_path);
  if (dict.semantic_type_count() > model.semantic_rows) {
    throw DataError("dictionary uses " + std::to_string(dict.semantic_type_count()) +
                    " semantic types but the checkpoint was trained with " +
                    std::to_string(model.semantic_rows));
  }
  const auto encoder = make_encoder(cfg, model.feat.text_dim, convs);
  const auto prep = prepare_corpus(convs, model.feat, *encoder, dict, cfg.jaccard_min);

  std::vector<std::array<double, 3>> fine;
  std::vector<FineLabelSet> gold;
  for (const auto& conv : prep) {
    const UtteranceProbs probs = predict_probs(model, conv, cfg.train.window_len, cfg.mr_union);
    fine.insert(fine.end(), probs.fine.begin(), probs.fine.end());
    gold.insert(gold.end(), conv.gold.begin(), conv.gold.end());
  }
  const MeanPrAuc auc = export_pr_curves(fine, gold, out_dir);
  for (Task t : auc.skipped) {
    std::cerr << "warning: no positive " << task_name(t) << " utterances; class skipped\n";
  }
  std::cout << "mean_pr_auc " << format_float(auc.mean) << "\n";
  return 0;
}

FilterMode parse_mode(const std::string& mode) {
  if (mode == "all-text") return FilterMode::AllText;
  if (mode == "mr") return FilterMode::MR;
  if (mode == "category") return FilterMode::Category;
  if (mode == "oracle-mr") return FilterMode::OracleMR;
  if (mode == "oracle-category") return FilterMode::OracleCategory;
  throw UsageError("unknown filter mode: " + mode);
}

int cmd_extract(const std::string& checkpoint_path, const std::string& corpus_path,
                const std::string& dict_path, const std::string& config_path,
                const std::string& task_str, const std::string& mode_str, double tau,
                bool sweep, const std::string& out_dir) {
  RunConfig cfg;
  if (!config_path.empty()) cfg = load_run_config(config_path);
  if (!dict_path.empty()) cfg.dictionary_path = dict_path;

  std::string task_upper = task_str;
  for (auto& c : task_upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  const Task task = parse_task(task_upper);
  const FilterMode mode = parse_mode(mode_str);
  if (tau < 0.0 || tau > 1.0) throw UsageError("--tau must be in [0,1]");

  const auto convs = parse_corpus(corpus_path);
  const ConceptDictionary dict = load_dictionary(cfg.dictionary_path);
  const ExtractionLabelMap& map = ExtractionLabelMap::builtin();

  const bool needs_model = sweep || mode == FilterMode::MR || mode == FilterMode::Category;
  std::vector<UtteranceProbs> probs(convs.size());
  if (needs_model) {
    if (checkpoint_path.empty()) {
      throw UsageError("--checkpoint is required for model-based filtering");
    }
    Model model = load_model(checkpoint_path);
    if (dict.semantic_type_count() > model.semantic_rows) {
      throw DataError("dictionary uses " + std::to_string(dict.semantic_type_count()) +
                      " semantic types but the checkpoint was trained with " +
                      std::to_string(model.semantic_rows));
    }
    const auto encoder = make_encoder(cfg, model.feat.text_dim, convs);
    const auto prep = prepare_corpus(convs, model.feat, *encoder, dict, cfg.jaccard_min);
    for (size_t i = 0; i < prep.size(); ++i) {
      probs[i] = predict_probs(model, prep[i], cfg.train.window_len, cfg.mr_union);
    }
  }

  std::filesystem::create_directories(out_dir);
  if (sweep) {
    std::vector<double> taus;
    for (int i = 0; i < 20; ++i) taus.push_back(0.05 * i);
    const SweepResult result = threshold_sweep(convs, probs, dict, map, task, taus, cfg.jaccard_min);
    write_text_file((std::filesystem::path(out_dir) / "sweep.csv").string(), sweep_to_csv(result));
    const SweepRow& best = result.rows[result.best_row];
    std::cout << "best mode=" << filter_mode_name(best.mode) << " tau=" << format_float(best.tau)
              << " micro_f1=" << format_float(best.micro_f1)
              << " macro_f1=" << format_float(best.macro_f1) << "\n";
    return 0;
  }

  FilterSpec spec{mode, task, tau};
  std::vector<std::set<std::string>> preds, gold;
  std::string predictions;
  for (size_t i = 0; i < convs.size(); ++i) {
    const auto subset = filter_utterances(convs[i], needs_model ? &probs[i] : nullptr, spec);
    auto labels = extract_labels(convs[i], subset, dict, map, task, cfg.jaccard_min);
    nlohmann::ordered_json j;
    j["id"] = convs[i].id;
    auto& arr = j["labels"] = nlohmann::ordered_json::array();
    for (const auto& l : labels) arr.push_back(l);
    predictions += j.dump();
    predictions += '\n';
    preds.push_back(std::move(labels));
    gold.push_back(convs[i].gold_extraction[static_cast<int>(task)]);
  }
  write_text_file((std::filesystem::path(out_dir) / "predictions.jsonl").string(), predictions);

  const ExtractionScore score = extraction_f1(preds, gold, map, task);
  std::string score_csv = "metric,value\n";
  score_csv += "micro_f1," + format_float(score.micro_f1) + "\n";
  score_csv += "macro_f1," + format_float(score.macro_f1) + "\n";
  write_text_file((std::filesystem::path(out_dir) / "score.csv").string(), score_csv);

  std::string per_label = "label,precision,recall,f1\n";
  for (const auto& ls : score.per_label) {
    per_label += csv_quote(ls.label) + ',' + format_float(ls.precision) + ',' +
                 format_float(ls.recall) + ',' + format_float(ls.f1) + '\n';
  }
  write_text_file((std::filesystem::path(out_dir) / "per_label.csv").string(), per_label);

  std::cout << "micro_f1 " << format_float(score.micro_f1) << "\n"
            << "macro_f1 " << format_float(score.macro_f1) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conversation utterance tagging and concept extraction pipeline"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic conversation corpus");
  std::string gen_out, gen_profile, gen_stats_csv;
  int gen_n_convs = 300;
  uint64_t gen_seed = 1;
  gen->add_option("--out", gen_out, "Output corpus JSONL path")->required();
  gen->add_option("--n-convs", gen_n_convs, "Number of conversations")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--profile", gen_profile, "Config file with a [generator] section");
  gen->add_option("--stats-csv", gen_stats_csv, "Also write the printed stats to this CSV");

  // train
  auto* tr = app.add_subcommand("train", "Train the utterance classifier");
  std::string tr_corpus, tr_val, tr_config, tr_out;
  std::vector<std::string> tr_ablate;
  std::optional<uint64_t> tr_seed;
  std::optional<int> tr_threads;
  tr->add_option("--corpus", tr_corpus, "Training corpus JSONL")->required();
  tr->add_option("--val", tr_val, "Validation corpus JSONL")->required();
  tr->add_option("--config", tr_config, "Config file");
  tr->add_option("--out", tr_out, "Output directory")->required();
  tr->add_option("--ablate", tr_ablate,
                 "Ablations: no-hierarchy, plain-bilstm, no-context (repeatable)");
  tr->add_option("--seed", tr_seed, "Override the training seed (default 13)");
  tr->add_option("--threads", tr_threads, "Worker thread cap (default 1)");

  // eval
  auto* ev = app.add_subcommand("eval", "Export PR curves and print mean PR-AUC");
  std::string ev_ckpt, ev_corpus, ev_config, ev_out;
  ev->add_option("--checkpoint", ev_ckpt, "Model checkpoint")->required();
  ev->add_option("--corpus", ev_corpus, "Corpus JSONL")->required();
  ev->add_option("--config", ev_config, "Config file");
  ev->add_option("--out", ev_out, "Output directory")->required();

  // extract
  auto* ex = app.add_subcommand("extract", "Conversation-level concept extraction");
  std::string ex_ckpt, ex_corpus, ex_dict, ex_config, ex_task, ex_mode = "all-text", ex_out;
  double ex_tau = 0.5;
  bool ex_sweep = false;
  ex->add_option("--checkpoint", ex_ckpt, "Model checkpoint (needed for mr/category modes)");
  ex->add_option("--corpus", ex_corpus, "Corpus JSONL")->required();
  ex->add_option("--dict", ex_dict, "Concept dictionary TSV (default: builtin)");
  ex->add_option("--config", ex_config, "Config file");
  ex->add_option("--task", ex_task, "Extraction task: sym, med or com")->required();
  ex->add_option("--mode", ex_mode,
                 "Filtering: all-text, mr, category, oracle-mr, oracle-category")
      ->capture_default_str();
  ex->add_option("--tau", ex_tau, "Probability threshold for mr/category modes")
      ->capture_default_str();
  ex->add_flag("--sweep", ex_sweep, "Sweep thresholds for mr and category modes");
  ex->add_option("--out", ex_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return cmd_gen_data(gen_out, gen_n_convs, gen_seed, gen_profile, gen_stats_csv);
    if (tr->parsed()) return cmd_train(tr_corpus, tr_val, tr_config, tr_out, tr_ablate, tr_seed, tr_threads);
    if (ev->parsed()) return cmd_eval(ev_ckpt, ev_corpus, ev_config, ev_out);
    if (ex->parsed()) {
      return cmd_extract(ex_ckpt, ex_corpus, ex_dict, ex_config, ex_task, ex_mode, ex_tau,
                         ex_sweep, ex_out);
    }
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const medtag::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const medtag::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const medtag::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
