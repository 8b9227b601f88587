#include "ragat/training.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace ragat {

std::vector<PreparedExample> prepare_examples(const std::vector<RawExample>& raw,
                                              const Vocabulary& vocab, const RunConfig& config) {
    const TokenizerMode mode = tokenizer_mode_from_string(config.tokenizer);
    const AdjacencyMode adj_mode = adjacency_mode_from_string(config.adjacency_mode);
    std::vector<PreparedExample> out;
    out.reserve(raw.size());
    for (const RawExample& ex : raw) {
        PreparedExample prep;
        prep.enc = encode(tokenize(ex.text, mode), vocab, config.max_len);
        prep.enc.label = ex.label;
        prep.adj = normalize(build_cooccurrence(prep.enc, config.window), adj_mode);
        out.push_back(std::move(prep));
    }
    return out;
}

AdamState AdamState::for_params(const ModelParams& params) {
    AdamState state;
    for (const auto& [name, t] : params.named_entries()) {
        state.moments[name] = Moments{std::vector<double>(t.size(), 0.0), std::vector<double>(t.size(), 0.0)};
    }
    return state;
}

void adam_step(ModelParams& params, AdamState& state, double lr) {
    ++state.step;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    for (auto& [name, tensor] : params.named_entries()) {
        auto it = state.moments.find(name);
        if (it == state.moments.end()) throw StateError("adam_step: no state for parameter " + name);
        auto& mom = it->second;
        Tensor t = tensor;
        if (!t.has_grad()) throw StateError("adam_step: parameter " + name + " has no gradient");
        if (mom.m.size() != t.size()) {
            throw StateError("adam_step: state shape mismatch for parameter " + name);
        }
        const auto& g = t.grad();
        auto& vals = t.values();

        // PAD embedding row stays zero.
        std::size_t start = 0;
        if (name == "embedding" || name == "embedding_gcn") start = static_cast<std::size_t>(t.cols());

        for (std::size_t i = start; i < t.size(); ++i) {
            mom.m[i] = state.beta1 * mom.m[i] + (1.0 - state.beta1) * g[i];
            mom.v[i] = state.beta2 * mom.v[i] + (1.0 - state.beta2) * g[i] * g[i];
            const double m_hat = mom.m[i] / bc1;
            const double v_hat = mom.v[i] / bc2;
            vals[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
        }
    }
}

double decay_lr(double lr0, int epoch_index, double gamma) {
    if (epoch_index < 0) throw ValueError("decay_lr: epoch_index must be >= 0");
    return lr0 * std::pow(gamma, static_cast<double>(epoch_index));
}

double train_epoch(ModelParams& params, AdamState& state, const std::vector<PreparedExample>& train_set,
                   const RunConfig& config, int epoch_index) {
    if (train_set.empty()) throw ContractError("train_epoch: empty training set");

    const double lr = decay_lr(config.lr, epoch_index, config.lr_decay);
    // Decorrelated per-epoch streams, both derived from the run seed.
    Rng dropout_rng(config.seed + 1000003ull * static_cast<std::uint64_t>(epoch_index + 1));
    const std::uint64_t shuffle_seed = config.seed + 7919ull * static_cast<std::uint64_t>(epoch_index + 1);
    const auto batch_indices = batches(train_set.size(), config.batch_size, /*shuffle=*/true, shuffle_seed);

    double loss_sum = 0.0;
    std::size_t n_examples = 0;
    std::size_t batch_no = 0;
    for (const auto& batch : batch_indices) {
        Tape tape;
        params.zero_grads();
        std::vector<Tensor> losses;
        losses.reserve(batch.size());
        for (std::size_t idx : batch) {
            const PreparedExample& ex = train_set[idx];
            ForwardResult res = forward(tape, ex.enc, ex.adj, params, config, /*training=*/true, dropout_rng);
            losses.push_back(res.loss);
        }
        Tensor batch_loss = reduce(tape, ReduceOp::Mean, concat_vec(tape, losses), 0);
        if (!std::isfinite(batch_loss.at(0))) {
            throw NumericError("train_epoch: non-finite loss in batch " + std::to_string(batch_no));
        }
        tape.backward(batch_loss);
        adam_step(params, state, lr);

        loss_sum += batch_loss.at(0) * static_cast<double>(batch.size());
        n_examples += batch.size();
        ++batch_no;
    }
    return loss_sum / static_cast<double>(n_examples);
}

MetricsReport evaluate(const ModelParams& params, const std::vector<PreparedExample>& examples,
                       const RunConfig& config) {
    if (examples.empty()) throw ContractError("evaluate: empty example set");
    Rng unused_rng(0);
    std::vector<int> preds, labels;
    preds.reserve(examples.size());
    labels.reserve(examples.size());
    for (const PreparedExample& ex : examples) {
        Tape tape;
        ForwardResult res = forward(tape, ex.enc, ex.adj, params, config, /*training=*/false, unused_rng);
        preds.push_back(res.pred);
        labels.push_back(ex.enc.label);
    }
    return compute_metrics(confusion(preds, labels));
}

std::string TrainLog::to_tsv() const {
    std::ostringstream os;
    os << std::setprecision(10);
    for (const EpochRecord& r : epochs) {
        os << r.epoch << '\t' << r.lr << '\t' << r.mean_loss << '\t' << r.train_accuracy << '\t'
           << r.val_accuracy << '\t' << r.val_macro_f1 << '\n';
    }
    return os.str();
}

FitResult fit(ModelParams params, const std::vector<PreparedExample>& train_set,
              const std::vector<PreparedExample>& val_set, const RunConfig& config,
              const std::function<double(const ModelParams&)>& val_metric) {
    if (train_set.empty() || val_set.empty()) throw ContractError("fit: train and validation sets must be non-empty");

    constexpr double kImprovement = 1e-6;
    AdamState state = AdamState::for_params(params);
    FitResult result;
    result.best_params = params.clone();
    double best_f1 = -std::numeric_limits<double>::infinity();
    int epochs_without_improvement = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        EpochRecord rec;
        rec.epoch = epoch + 1;
        rec.lr = decay_lr(config.lr, epoch, config.lr_decay);
        rec.mean_loss = train_epoch(params, state, train_set, config, epoch);

        const MetricsReport train_metrics = evaluate(params, train_set, config);
        const MetricsReport val_metrics = evaluate(params, val_set, config);
        rec.train_accuracy = train_metrics.accuracy;
        rec.val_accuracy = val_metrics.accuracy;
        rec.val_macro_f1 = val_metric ? val_metric(params) : val_metrics.macro_f1;
        result.log.epochs.push_back(rec);

        if (rec.val_macro_f1 > best_f1 + kImprovement) {
            best_f1 = rec.val_macro_f1;
            result.best_params = params.clone();
            result.log.best_epoch = rec.epoch;
            epochs_without_improvement = 0;
        } else {
            ++epochs_without_improvement;
            if (epochs_without_improvement >= config.patience) break;
        }
    }
    result.log.best_val_macro_f1 = best_f1;
    return result;
}

}  // namespace ragat
