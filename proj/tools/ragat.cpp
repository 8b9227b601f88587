#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ragat/checkpoint.hpp"
#include "ragat/corpusgen.hpp"
#include "ragat/training.hpp"

namespace fs = std::filesystem;
using namespace ragat;

namespace {

// Exit codes: 0 success, 1 config error, 2 data error, 3 numeric failure.
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

RunConfig load_config_or_default(const std::string& config_path) {
    if (config_path.empty()) return RunConfig{};
    return RunConfig::load(config_path);
}

int cmd_train(const std::string& config_path, const std::string& data_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override) {
    RunConfig config = load_config_or_default(config_path);
    if (seed_override) config.seed = *seed_override;
    config.validate();

    const auto raw = load_dataset(data_path);
    if (raw.size() < 2) throw DataError("dataset too small to split: " + data_path);
    auto [train_raw, test_raw] = split(raw, config.train_ratio, config.seed);

    // Vocabulary from the training split only; the test split never leaks in.
    const Vocabulary vocab =
        build_vocab(train_raw, tokenizer_mode_from_string(config.tokenizer), config.min_freq, config.max_vocab);

    const auto train_set = prepare_examples(train_raw, vocab, config);
    const auto test_set = prepare_examples(test_raw, vocab, config);

    ModelParams params = init_params(config, vocab.size(), config.seed);
    FitResult fitted = fit(std::move(params), train_set, test_set, config);

    fs::create_directories(out_dir);
    Checkpoint ckpt{config, vocab, fitted.best_params};
    ckpt.save((fs::path(out_dir) / "model.ckpt").string());
    vocab.save((fs::path(out_dir) / "vocab.tsv").string());
    config.save((fs::path(out_dir) / "config.json").string());
    {
        std::ofstream log_out(fs::path(out_dir) / "trainlog.tsv", std::ios::binary);
        log_out << fitted.log.to_tsv();
    }

    const MetricsReport report = evaluate(fitted.best_params, test_set, config);
    const std::string report_text = format_report(report);
    {
        std::ofstream report_out(fs::path(out_dir) / "report.txt", std::ios::binary);
        report_out << report_text;
    }
    std::cout << fitted.log.to_tsv();
    std::cout << report_text;
    return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_path, bool tsv) {
    const Checkpoint ckpt = Checkpoint::load(checkpoint_path);
    const auto raw = load_dataset(data_path);
    if (raw.empty()) throw DataError("dataset file is empty: " + data_path);
    const auto prepared = prepare_examples(raw, ckpt.vocab, ckpt.config);
    const MetricsReport report = evaluate(ckpt.params, prepared, ckpt.config);
    std::cout << (tsv ? format_report_tsv(report) : format_report(report));
    return 0;
}

int cmd_predict(const std::string& checkpoint_path, const std::string& text) {
    const Checkpoint ckpt = Checkpoint::load(checkpoint_path);
    const auto tokens = tokenize(text, tokenizer_mode_from_string(ckpt.config.tokenizer));
    EncodedExample enc = encode(tokens, ckpt.vocab, ckpt.config.max_len);
    const Adjacency adj = normalize(build_cooccurrence(enc, ckpt.config.window),
                                    adjacency_mode_from_string(ckpt.config.adjacency_mode));
    Rng rng(0);
    Tape tape;
    const ForwardResult res =
        forward(tape, enc, adj, ckpt.params, ckpt.config, /*training=*/false, rng);
    std::cout << "label=" << res.pred << std::fixed << std::setprecision(4)
              << " p_non_rumor=" << res.probs.at(0) << " p_rumor=" << res.probs.at(1) << "\n";
    return 0;
}

int cmd_inspect_graph(const std::string& config_path, const std::string& text) {
    const RunConfig config = load_config_or_default(config_path);
    const auto tokens = tokenize(text, tokenizer_mode_from_string(config.tokenizer));
    // Adjacency depends only on positions, so token ids are irrelevant here.
    EncodedExample enc;
    enc.true_len = std::min<int>(config.max_len, static_cast<int>(tokens.size()));
    enc.ids.assign(static_cast<std::size_t>(config.max_len), Vocabulary::kPadId);
    enc.mask.assign(static_cast<std::size_t>(config.max_len), 0);
    for (int i = 0; i < enc.true_len; ++i) {
        enc.ids[static_cast<std::size_t>(i)] = Vocabulary::kUnkId;
        enc.mask[static_cast<std::size_t>(i)] = 1;
    }
    const Adjacency adj = build_cooccurrence(enc, config.window);

    bool any = false;
    const int L = adj.matrix.rows();
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            if (adj.matrix.at(i, j) == 0.0) continue;
            std::cout << i << "(" << tokens[static_cast<std::size_t>(i)] << ") -> " << j << "("
                      << tokens[static_cast<std::size_t>(j)] << ")\n";
            any = true;
        }
    }
    if (!any) std::cout << "no edges\n";
    return 0;
}

int cmd_gen_corpus(const std::string& out_path, int n_per_class, std::uint64_t seed) {
    generate_corpus(out_path, n_per_class, seed);
    std::cout << "wrote " << 2 * n_per_class << " examples to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RAGAT multi-granular rumor classifier"};
    app.require_subcommand(1);

    std::string config_path, data_path, out_dir = "out", checkpoint_path, text, corpus_out;
    std::optional<std::uint64_t> seed_opt;
    int n_per_class = 100;
    bool tsv = false;

    auto* train = app.add_subcommand("train", "train a model and write checkpoint + reports");
    train->add_option("--config", config_path, "config JSON path (defaults used when omitted)");
    train->add_option("--data", data_path, "dataset file")->required();
    train->add_option("--out", out_dir, "output directory");
    train->add_option("--seed", seed_opt, "override the config seed");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset file");
    eval->add_option("--checkpoint", checkpoint_path, "checkpoint path")->required();
    eval->add_option("--data", data_path, "dataset file")->required();
    eval->add_flag("--tsv", tsv, "machine-readable tab-separated output");

    auto* predict = app.add_subcommand("predict", "classify a single text");
    predict->add_option("--checkpoint", checkpoint_path, "checkpoint path")->required();
    predict->add_option("--text", text, "input text")->required();

    auto* inspect = app.add_subcommand("inspect-graph", "print the co-occurrence edge list for a text");
    inspect->add_option("--config", config_path, "config JSON path (defaults used when omitted)");
    inspect->add_option("--text", text, "input text")->required();

    auto* gen = app.add_subcommand("gen-corpus", "write a synthetic separable dataset");
    gen->add_option("--out", corpus_out, "output file path")->required();
    gen->add_option("--n-per-class", n_per_class, "examples per class");
    gen->add_option("--seed", seed_opt, "generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(config_path, data_path, out_dir, seed_opt);
        if (eval->parsed()) return cmd_eval(checkpoint_path, data_path, tsv);
        if (predict->parsed()) return cmd_predict(checkpoint_path, text);
        if (inspect->parsed()) return cmd_inspect_graph(config_path, text);
        if (gen->parsed()) return cmd_gen_corpus(corpus_out, n_per_class, seed_opt.value_or(42));
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const EmptyInputError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const ValueError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
