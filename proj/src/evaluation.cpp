#include "ragat/evaluation.hpp"

#include <iomanip>
#include <sstream>

#include "ragat/errors.hpp"

namespace ragat {

ConfusionCounts::View ConfusionCounts::view(int positive_class) const {
    if (positive_class != 0 && positive_class != 1) {
        throw ContractError("confusion view: class must be 0 or 1");
    }
    const int p = positive_class, o = 1 - positive_class;
    View v;
    v.tp = counts[p][p];
    v.fp = counts[o][p];
    v.fn = counts[p][o];
    v.tn = counts[o][o];
    return v;
}

ConfusionCounts confusion(const std::vector<int>& preds, const std::vector<int>& labels) {
    if (preds.size() != labels.size()) {
        throw ContractError("confusion: preds length " + std::to_string(preds.size()) +
                            " != labels length " + std::to_string(labels.size()));
    }
    if (preds.empty()) throw ContractError("confusion: empty input");
    ConfusionCounts c;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if ((preds[i] != 0 && preds[i] != 1) || (labels[i] != 0 && labels[i] != 1)) {
            throw ContractError("confusion: labels must be 0 or 1, got pred " + std::to_string(preds[i]) +
                                " label " + std::to_string(labels[i]) + " at index " + std::to_string(i));
        }
        ++c.counts[labels[i]][preds[i]];
    }
    c.total = static_cast<long long>(preds.size());
    return c;
}

MetricsReport compute_metrics(const ConfusionCounts& c) {
    if (c.total < 1) throw ContractError("compute_metrics: empty confusion counts");
    auto ratio = [](long long num, long long den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    MetricsReport r;
    r.total = c.total;
    for (int cls = 0; cls < 2; ++cls) {
        const auto v = c.view(cls);
        r.precision[cls] = ratio(v.tp, v.tp + v.fp);
        r.recall[cls] = ratio(v.tp, v.tp + v.fn);
        const double pr_sum = r.precision[cls] + r.recall[cls];
        r.f1[cls] = pr_sum == 0.0 ? 0.0 : 2.0 * r.precision[cls] * r.recall[cls] / pr_sum;
        r.support[cls] = v.tp + v.fn;
    }
    const auto v0 = c.view(0);
    r.accuracy = ratio(v0.tp + v0.tn, c.total);
    r.macro_precision = (r.precision[0] + r.precision[1]) / 2.0;
    r.macro_recall = (r.recall[0] + r.recall[1]) / 2.0;
    r.macro_f1 = (r.f1[0] + r.f1[1]) / 2.0;
    return r;
}

std::string format_report(const MetricsReport& r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << std::setw(12) << "" << std::setw(12) << "precision" << std::setw(12) << "recall"
       << std::setw(12) << "f1" << std::setw(12) << "support" << "\n";
    const char* names[2] = {"non-rumor", "rumor"};
    for (int cls = 0; cls < 2; ++cls) {
        os << std::setw(12) << names[cls] << std::setw(12) << r.precision[cls] << std::setw(12)
           << r.recall[cls] << std::setw(12) << r.f1[cls] << std::setw(12) << r.support[cls] << "\n";
    }
    os << "\n";
    os << std::setw(12) << "accuracy" << std::setw(12) << r.accuracy << std::setw(12) << ""
       << std::setw(12) << "" << std::setw(12) << r.total << "\n";
    os << std::setw(12) << "macro avg" << std::setw(12) << r.macro_precision << std::setw(12)
       << r.macro_recall << std::setw(12) << r.macro_f1 << std::setw(12) << r.total << "\n";
    return os.str();
}

std::string format_report_tsv(const MetricsReport& r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << r.accuracy << '\t' << r.macro_precision << '\t' << r.macro_recall << '\t' << r.macro_f1;
    for (int cls = 0; cls < 2; ++cls) {
        os << '\t' << r.precision[cls] << '\t' << r.recall[cls] << '\t' << r.f1[cls] << '\t'
           << r.support[cls];
    }
    os << '\n';
    return os.str();
}

}  // namespace ragat
