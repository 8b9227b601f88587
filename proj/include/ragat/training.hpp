#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ragat/classifier.hpp"
#include "ragat/evaluation.hpp"

namespace ragat {

// Example ready for the model: fixed-length encoding plus its adjacency.
struct PreparedExample {
    EncodedExample enc;
    Adjacency adj;
};

// Tokenize, encode and build adjacencies for a raw split.
std::vector<PreparedExample> prepare_examples(const std::vector<RawExample>& raw,
                                              const Vocabulary& vocab, const RunConfig& config);

// First/second moment buffers mirroring the parameter set.
struct AdamState {
    struct Moments {
        std::vector<double> m, v;
    };
    std::map<std::string, Moments> moments;
    long long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState for_params(const ModelParams& params);
};

// Bias-corrected Adam update from the gradients currently stored on the
// parameters. The PAD embedding row is never updated.
void adam_step(ModelParams& params, AdamState& state, double lr);

// lr0 * gamma^epoch_index.
double decay_lr(double lr0, int epoch_index, double gamma);

// One pass over seeded-shuffled batches; returns the epoch mean loss.
double train_epoch(ModelParams& params, AdamState& state, const std::vector<PreparedExample>& train_set,
                   const RunConfig& config, int epoch_index);

// Inference-mode evaluation over a prepared set.
MetricsReport evaluate(const ModelParams& params, const std::vector<PreparedExample>& examples,
                       const RunConfig& config);

struct EpochRecord {
    int epoch = 0;  // 1-based
    double lr = 0.0;
    double mean_loss = 0.0;
    double train_accuracy = 0.0;
    double val_accuracy = 0.0;
    double val_macro_f1 = 0.0;
};

struct TrainLog {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;
    double best_val_macro_f1 = 0.0;

    std::string to_tsv() const;
};

struct FitResult {
    ModelParams best_params;
    TrainLog log;
};

// Epoch loop with exponential lr decay and early stopping on validation
// macro-F1 (no improvement > 1e-6 for `patience` consecutive epochs).
// Returns the best checkpoint, not the last. `val_metric` overrides the
// monitored metric; by default it is macro-F1 on `val_set`.
FitResult fit(ModelParams params, const std::vector<PreparedExample>& train_set,
              const std::vector<PreparedExample>& val_set, const RunConfig& config,
              const std::function<double(const ModelParams&)>& val_metric = nullptr);

}  // namespace ragat
