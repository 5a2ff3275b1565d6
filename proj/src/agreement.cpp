#include "mbias/agreement.hpp"

#include "mbias/error.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mbias {

ReliabilityMatrix::ReliabilityMatrix(std::size_t items, std::size_t raters, std::vector<std::string> alphabet)
    : items_(items), raters_(raters), alphabet_(std::move(alphabet)), cells_(items * raters) {}

void ReliabilityMatrix::set(std::size_t item, std::size_t rater, std::optional<int> label) {
    if (item >= items_ || rater >= raters_) throw DataError("reliability matrix index out of range");
    if (label && (*label < 0 || static_cast<std::size_t>(*label) >= alphabet_.size())) {
        throw DataError("label code " + std::to_string(*label) + " outside the declared alphabet");
    }
    cells_[item * raters_ + rater] = label;
}

std::size_t ReliabilityMatrix::pairable_count(std::size_t item) const {
    const auto begin = cells_.begin() + static_cast<std::ptrdiff_t>(item * raters_);
    return static_cast<std::size_t>(
        std::count_if(begin, begin + static_cast<std::ptrdiff_t>(raters_), [](const auto& c) { return c.has_value(); }));
}

std::vector<int> ReliabilityMatrix::values(std::size_t item) const {
    std::vector<int> out;
    for (std::size_t r = 0; r < raters_; ++r) {
        if (const auto v = at(item, r)) out.push_back(*v);
    }
    return out;
}

ReliabilityMatrix reliability_from_gold(const GoldStore& store, LabelKind kind) {
    std::set<std::string> rater_ids;
    for (const auto& a : store.annotations()) rater_ids.insert(a.rater_id);
    std::map<std::string, std::size_t> rater_index;
    for (const auto& id : rater_ids) rater_index.emplace(id, rater_index.size());

    std::vector<std::string> alphabet;
    if (kind == LabelKind::Bias) {
        alphabet = {"Biased", "NonBiased"};
    } else {
        alphabet = {"Opinionated", "Factual", "Mixed"};
    }
    ReliabilityMatrix m(store.sentences().size(), rater_ids.size(), std::move(alphabet));
    for (std::size_t i = 0; i < store.sentences().size(); ++i) {
        for (const auto* a : store.annotations_for(store.sentences()[i].id)) {
            const int code = kind == LabelKind::Bias ? static_cast<int>(a->sentence_label)
                                                     : static_cast<int>(a->opinion_label);
            m.set(i, rater_index.at(a->rater_id), code);
        }
    }
    return m;
}

namespace {

AlphaResult finish_alpha(AlphaResult r, AgreementOptions options) {
    if (r.n < 2.0) throw DataError("krippendorff alpha: fewer than two pairable values");
    if (r.expected_disagreement == 0.0) {
        if (!options.degenerate_as_one) {
            throw UndefinedStatistic("krippendorff alpha undefined: all pairable values share one label");
        }
        r.alpha = 1.0;
        return r;
    }
    r.alpha = 1.0 - r.observed_disagreement / r.expected_disagreement;
    return r;
}

}  // namespace

AlphaResult krippendorff_alpha(const ReliabilityMatrix& m, AgreementOptions options) {
    const std::size_t k = m.alphabet().size();
    std::vector<double> coincidence(k * k, 0.0);
    // Row sums of the coincidence matrix are the value counts n_c over
    // pairable units; kept as integers so n is exact.
    std::vector<std::size_t> marginal(k, 0);
    AlphaResult r;
    std::vector<int> counts(k);
    for (std::size_t u = 0; u < m.items(); ++u) {
        const auto vals = m.values(u);
        const auto mu = vals.size();
        if (mu < 2) continue;
        ++r.items_used;
        std::fill(counts.begin(), counts.end(), 0);
        for (const int v : vals) ++counts[static_cast<std::size_t>(v)];
        for (std::size_t c = 0; c < k; ++c) marginal[c] += static_cast<std::size_t>(counts[c]);
        const double w = 1.0 / static_cast<double>(mu - 1);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t d = 0; d < k; ++d) {
                // ordered pairs of distinct raters: n_c * n_d, or n_c * (n_c - 1) on the diagonal
                const double pairs = c == d ? static_cast<double>(counts[c]) * (counts[c] - 1)
                                            : static_cast<double>(counts[c]) * counts[d];
                coincidence[c * k + d] += pairs * w;
            }
        }
    }

    double disagreeing = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t d = 0; d < k; ++d) {
            if (c != d) disagreeing += coincidence[c * k + d];
        }
        r.n += static_cast<double>(marginal[c]);
    }
    if (r.n < 2.0) return finish_alpha(r, options);

    double chance = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t d = 0; d < k; ++d) {
            if (c != d) chance += static_cast<double>(marginal[c]) * static_cast<double>(marginal[d]);
        }
    }
    r.observed_disagreement = disagreeing / r.n;
    r.expected_disagreement = chance / (r.n * (r.n - 1.0));
    return finish_alpha(r, options);
}

AlphaResult alpha_oracle(const ReliabilityMatrix& m, AgreementOptions options) {
    AlphaResult r;
    std::vector<int> pooled;
    double observed = 0.0;
    for (std::size_t u = 0; u < m.items(); ++u) {
        const auto vals = m.values(u);
        if (vals.size() < 2) continue;
        ++r.items_used;
        const double w = 1.0 / static_cast<double>(vals.size() - 1);
        for (std::size_t i = 0; i < vals.size(); ++i) {
            for (std::size_t j = 0; j < vals.size(); ++j) {
                if (i != j && vals[i] != vals[j]) observed += w;
            }
        }
        pooled.insert(pooled.end(), vals.begin(), vals.end());
    }
    r.n = static_cast<double>(pooled.size());
    if (pooled.size() < 2) return finish_alpha(r, options);

    double expected = 0.0;
    for (std::size_t a = 0; a < pooled.size(); ++a) {
        for (std::size_t b = 0; b < pooled.size(); ++b) {
            if (a != b && pooled[a] != pooled[b]) expected += 1.0;
        }
    }
    r.observed_disagreement = observed / r.n;
    r.expected_disagreement = expected / (r.n * (r.n - 1.0));
    return finish_alpha(r, options);
}

KappaResult fleiss_kappa(const ReliabilityMatrix& m, AgreementOptions options) {
    if (m.items() == 0) throw DataError("fleiss kappa: no items");
    const std::size_t k = m.alphabet().size();
    const std::size_t raters = m.pairable_count(0);
    if (raters < 2) throw DataError("fleiss kappa: items need at least two ratings");

    KappaResult r;
    r.items = m.items();
    r.raters_per_item = raters;
    std::vector<double> totals(k, 0.0);
    double sum_agreement = 0.0;
    const double n = static_cast<double>(raters);
    for (std::size_t u = 0; u < m.items(); ++u) {
        const auto vals = m.values(u);
        if (vals.size() != raters) {
            throw DataError("fleiss kappa requires complete data: item " + std::to_string(u) + " has " +
                            std::to_string(vals.size()) + " ratings, expected " + std::to_string(raters));
        }
        std::vector<double> counts(k, 0.0);
        for (const int v : vals) counts[static_cast<std::size_t>(v)] += 1.0;
        double sq = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            sq += counts[c] * counts[c];
            totals[c] += counts[c];
        }
        sum_agreement += (sq - n) / (n * (n - 1.0));
    }
    const double items = static_cast<double>(m.items());
    r.mean_agreement = sum_agreement / items;
    for (const double t : totals) {
        const double p = t / (items * n);
        r.chance_agreement += p * p;
    }
    if (r.chance_agreement >= 1.0) {
        if (!options.degenerate_as_one) {
            throw UndefinedStatistic("fleiss kappa undefined: all ratings share one label");
        }
        r.kappa = 1.0;
        return r;
    }
    r.kappa = (r.mean_agreement - r.chance_agreement) / (1.0 - r.chance_agreement);
    return r;
}

nlohmann::ordered_json to_json(const AlphaResult& r) {
    nlohmann::ordered_json obj;
    obj["alpha"] = r.alpha;
    obj["n"] = r.n;
    obj["D_o"] = r.observed_disagreement;
    obj["D_e"] = r.expected_disagreement;
    obj["items_used"] = r.items_used;
    return obj;
}

nlohmann::ordered_json to_json(const KappaResult& r) {
    nlohmann::ordered_json obj;
    obj["kappa"] = r.kappa;
    obj["P_bar"] = r.mean_agreement;
    obj["P_e"] = r.chance_agreement;
    obj["items"] = r.items;
    obj["raters_per_item"] = r.raters_per_item;
    return obj;
}

}  // namespace mbias
