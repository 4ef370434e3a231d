// Copyright 2026 The Praisetag Authors.
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

#include "cli.h"

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "httplib.h"

#include "praisetag/adapter.h"
#include "praisetag/dataset.h"
#include "praisetag/error.h"
#include "praisetag/feedback.h"
#include "praisetag/report.h"
#include "praisetag/service.h"
#include "praisetag/tagging.h"
#include "praisetag/tokenizer.h"

namespace praisetag::cli {
namespace {

// Thrown for bad flag combinations detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

Corpus read_corpus(const std::string& path, Streams& io) {
  if (path == "-") return read_jsonl(io.in, "stdin");
  if (!std::filesystem::is_regular_file(path)) throw Error(ErrorCode::kIo, "no such file: " + path);
  return load_jsonl(path);
}

// Writes to `path`, or to stdout for "-".
void write_output(const std::string& path, Streams& io, const std::function<void(std::ostream&)>& fn) {
  if (path == "-") {
    fn(io.out);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + path);
  fn(file);
}

std::string format_from(const std::string& format) {
  if (format != "json" && format != "text") throw UsageError("--format must be json or text");
  return format;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  Streams io{in, out, err};
  CLI::App app{"Praise tagging, feedback and evaluation toolkit", "praisetag"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // tag
  std::string tag_in, tag_out = "-", tag_tagger = "lexicon", tag_adapter, tag_lexicon;
  int tag_timeout_ms = static_cast<int>(kDefaultAdapterTimeout.count());
  auto* tag_cmd = app.add_subcommand("tag", "Tag responses and write prediction JSONL");
  tag_cmd->add_option("--in", tag_in, "Responses JSONL (- for stdin)")->required();
  tag_cmd->add_option("--out", tag_out, "Prediction JSONL (- for stdout)");
  tag_cmd->add_option("--tagger", tag_tagger, "lexicon or external")
      ->check(CLI::IsMember({"lexicon", "external"}));
  tag_cmd->add_option("--adapter", tag_adapter, "Adapter endpoint (stdio:..., tcp://..., http://...)");
  tag_cmd->add_option("--lexicon", tag_lexicon, "Lexicon JSON file");
  tag_cmd->add_option("--timeout-ms", tag_timeout_ms, "Adapter timeout")->check(CLI::PositiveNumber);

  // eval
  std::string eval_gold, eval_format = "text", eval_average = "micro";
  std::vector<std::string> eval_preds;
  double eval_tau = kDefaultTau;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against gold annotations");
  eval_cmd->add_option("--gold", eval_gold, "Gold corpus JSONL")->required();
  eval_cmd->add_option("--pred", eval_preds, "Prediction JSONL; repeat for several runs")->required();
  eval_cmd->add_option("--tau", eval_tau, "IoU threshold for partial matches");
  eval_cmd->add_option("--format", eval_format, "json or text");
  eval_cmd->add_option("--average", eval_average, "Headline averaging in text output")
      ->check(CLI::IsMember({"micro", "macro"}));

  // split
  std::string split_in, split_ratios = "0.7,0.1,0.2", split_out_dir;
  std::uint64_t split_seed = 0;
  bool split_stratify = false;
  auto* split_cmd = app.add_subcommand("split", "Split a corpus into train/validation/test");
  split_cmd->add_option("--in", split_in, "Corpus JSONL")->required();
  split_cmd->add_option("--ratios", split_ratios, "train,validation,test");
  split_cmd->add_option("--seed", split_seed, "Shuffle seed");
  split_cmd->add_flag("--stratify", split_stratify, "Split within each praise label combination");
  split_cmd->add_option("--out-dir", split_out_dir, "Output directory (default: next to input)");

  // stats
  std::string stats_in, stats_format = "text";
  auto* stats_cmd = app.add_subcommand("stats", "BIO tag distribution of a corpus");
  stats_cmd->add_option("--in", stats_in, "Corpus JSONL (- for stdin)")->required();
  stats_cmd->add_option("--format", stats_format, "json or text");

  // convert
  std::string convert_in, convert_to, convert_out = "-";
  auto* convert_cmd = app.add_subcommand("convert", "Convert between JSONL and CoNLL");
  convert_cmd->add_option("--in", convert_in, "Input file (- for stdin)")->required();
  convert_cmd->add_option("--to", convert_to, "conll (from JSONL) or jsonl (from CoNLL)")
      ->required()
      ->check(CLI::IsMember({"conll", "jsonl"}));
  convert_cmd->add_option("--out", convert_out, "Output file (- for stdout)");

  // feedback
  std::string fb_text, fb_tagger = "lexicon", fb_adapter, fb_templates, fb_lexicon, fb_format = "text";
  double fb_threshold = 0.5;
  auto* fb_cmd = app.add_subcommand("feedback", "Render explanatory feedback for one response");
  fb_cmd->add_option("--text", fb_text, "Tutor response")->required();
  fb_cmd->add_option("--tagger", fb_tagger, "lexicon or external")
      ->check(CLI::IsMember({"lexicon", "external"}));
  fb_cmd->add_option("--adapter", fb_adapter, "Adapter endpoint");
  fb_cmd->add_option("--templates", fb_templates, "Template JSON file");
  fb_cmd->add_option("--lexicon", fb_lexicon, "Lexicon JSON file");
  fb_cmd->add_option("--threshold", fb_threshold, "Confidence threshold for hedging")
      ->check(CLI::Range(0.0, 1.0));
  fb_cmd->add_option("--format", fb_format, "json or text");

  // serve
  std::string serve_config;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--config", serve_config, "Service config JSON")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*tag_cmd) {
      if (tag_tagger == "external" && tag_adapter.empty()) throw UsageError("--tagger external needs --adapter");
      const Corpus corpus = read_corpus(tag_in, io);
      const Lexicon lexicon = tag_lexicon.empty() ? Lexicon::default_lexicon() : Lexicon::load(tag_lexicon);
      std::unique_ptr<AdapterHandle> adapter;
      if (tag_tagger == "external") {
        adapter = std::make_unique<AdapterHandle>(connect_endpoint(tag_adapter),
                                                  std::chrono::milliseconds(tag_timeout_ms));
      }
      std::vector<Prediction> predictions;
      for (const auto& response : corpus.responses) {
        predictions.push_back(adapter ? external_tag(response.text(), response.tokens(), *adapter, response.id())
                                      : lexicon_tag(response.tokens(), lexicon, response.id()));
      }
      write_output(tag_out, io, [&](std::ostream& os) { write_predictions(predictions, os); });
      return kOk;
    }

    if (*eval_cmd) {
      format_from(eval_format);
      const Corpus gold = read_corpus(eval_gold, io);
      std::vector<std::vector<Prediction>> sets;
      for (const auto& path : eval_preds) {
        if (!std::filesystem::is_regular_file(path)) throw Error(ErrorCode::kIo, "no such file: " + path);
        sets.push_back(load_predictions(path));
      }
      if (!(eval_tau > 0.0 && eval_tau <= 1.0)) throw UsageError("--tau must be in (0, 1]");
      const MultiRunReport report = evaluate_runs(gold, sets, eval_tau);
      if (eval_format == "json") {
        out << to_json(report).dump(2, ' ', false, ojson::error_handler_t::replace) << '\n';
      } else {
        out << format_text(report, eval_average == "macro" ? Averaging::kMacro : Averaging::kMicro);
      }
      return kOk;
    }

    if (*split_cmd) {
      SplitConfig config;
      config.seed = split_seed;
      config.stratify = split_stratify;
      std::istringstream parts(split_ratios);
      std::string piece;
      std::size_t k = 0;
      while (std::getline(parts, piece, ',')) {
        if (k >= 3) throw UsageError("--ratios takes exactly three values");
        try {
          config.ratios[k++] = std::stod(piece);
        } catch (const std::exception&) {
          throw UsageError("bad ratio \"" + piece + "\"");
        }
      }
      if (k != 3) throw UsageError("--ratios takes exactly three values");
      try {
        config.validate();
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      const Corpus corpus = read_corpus(split_in, io);
      const CorpusSplit split = split_dataset(corpus, config);
      const std::filesystem::path dir =
          split_out_dir.empty() ? std::filesystem::path(split_in).parent_path() : std::filesystem::path(split_out_dir);
      if (!dir.empty()) std::filesystem::create_directories(dir);
      for (const Corpus* part : {&split.train, &split.validation, &split.test}) {
        const auto path = dir / (part->name + ".jsonl");
        save_jsonl(*part, path);
        out << path.string() << '\t' << part->responses.size() << '\n';
      }
      return kOk;
    }

    if (*stats_cmd) {
      format_from(stats_format);
      const Corpus corpus = read_corpus(stats_in, io);
      const TagDistribution dist = compute_stats(corpus);
      if (stats_format == "json") {
        out << to_json(dist, corpus.name).dump(2) << '\n';
      } else {
        out << format_text(dist, corpus.name);
      }
      return kOk;
    }

    if (*convert_cmd) {
      Corpus corpus;
      if (convert_to == "conll") {
        corpus = read_corpus(convert_in, io);
      } else if (convert_in == "-") {
        corpus = read_conll(io.in, "stdin");
      } else {
        if (!std::filesystem::is_regular_file(convert_in)) throw Error(ErrorCode::kIo, "no such file: " + convert_in);
        corpus = import_conll(convert_in);
      }
      write_output(convert_out, io, [&](std::ostream& os) {
        if (convert_to == "conll") {
          write_conll(corpus, os);
        } else {
          write_jsonl(corpus, os);
        }
      });
      return kOk;
    }

    if (*fb_cmd) {
      format_from(fb_format);
      if (fb_tagger == "external" && fb_adapter.empty()) throw UsageError("--tagger external needs --adapter");
      FeedbackConfig config;
      config.confidence_threshold = fb_threshold;
      if (!fb_templates.empty()) config.templates = load_templates(fb_templates);
      config.validate();
      const TokenSequence tokens = tokenize(fb_text);
      Prediction prediction;
      if (fb_tagger == "external") {
        AdapterHandle adapter(connect_endpoint(fb_adapter));
        prediction = external_tag(fb_text, tokens, adapter);
      } else {
        const Lexicon lexicon = fb_lexicon.empty() ? Lexicon::default_lexicon() : Lexicon::load(fb_lexicon);
        prediction = lexicon_tag(tokens, lexicon);
      }
      const FeedbackMessage message = render_feedback(fb_text, tokens, prediction, config);
      if (fb_format == "json") {
        ojson doc = to_json(message);
        doc["tagger_id"] = prediction.tagger_id;
        out << doc.dump(2, ' ', false, ojson::error_handler_t::replace) << '\n';
      } else {
        for (const auto& item : message.items) out << item.text << '\n';
      }
      return kOk;
    }

    if (*serve_cmd) {
      ServiceConfig config = ServiceConfig::load(serve_config);
      config.apply_env();
      config.validate();
      const Service service(config);
      httplib::Server server;
      err << "praisetag: listening on " << config.host << ':' << config.port << '\n';
      if (!service.listen(server)) {
        err << "praisetag: cannot bind " << config.host << ':' << config.port << '\n';
        return kDataError;
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "praisetag: " << e.what() << '\n';
    return kUsage;
  } catch (const AdapterError& e) {
    err << "praisetag: adapter " << adapter_error_kind_name(e.kind()) << " error: " << e.what() << '\n';
    return kAdapterError;
  } catch (const Error& e) {
    err << "praisetag: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "praisetag: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace praisetag::cli
