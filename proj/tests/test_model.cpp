#include "mbias/error.hpp"
#include "mbias/experiment.hpp"
#include "mbias/model.hpp"
#include "mbias/rng.hpp"
#include "mbias/synthetic.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace mbias;

namespace {

TrainConfig small_config(int dim, Encoder enc = Encoder::MeanPool) {
    TrainConfig cfg;
    cfg.embed_dim = dim;
    cfg.encoder = enc;
    return cfg;
}

ModelParams random_params(Rng& rng, std::size_t vocab, std::size_t dim, double scale) {
    ModelParams p(vocab, dim);
    for (auto& x : p.data()) x = uniform(rng, -scale, scale);
    return p;
}

std::vector<LabeledSequence> random_batch(Rng& rng, std::size_t vocab, std::size_t size) {
    std::vector<LabeledSequence> batch(size);
    for (auto& seq : batch) {
        const auto len = uniform_index(rng, 7);  // may be empty
        for (std::size_t i = 0; i < len; ++i) seq.tokens.push_back(static_cast<int>(uniform_index(rng, vocab)));
        seq.label = static_cast<int>(uniform_index(rng, 2));
    }
    return batch;
}

// Central differences on every component; returns the largest relative
// error |a - n| / max(|a|, |n|, floor).
double max_fd_error(std::span<const LabeledSequence> batch, const ModelParams& p, const TrainConfig& cfg) {
    constexpr double step = 1e-5;
    constexpr double floor = 1e-6;
    const auto analytic = gradients(batch, p, cfg);
    auto probe = p;
    double worst = 0.0;
    for (std::size_t i = 0; i < p.data().size(); ++i) {
        const double x = p.data()[i];
        probe.data()[i] = x + step;
        const double up = loss(batch, probe, cfg);
        probe.data()[i] = x - step;
        const double down = loss(batch, probe, cfg);
        probe.data()[i] = x;
        const double numeric = (up - down) / (2.0 * step);
        const double a = analytic.data()[i];
        worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor}));
    }
    return worst;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_SUITE("model") {

TEST_CASE("zero parameters give uniform probabilities and ln 2 loss") {
    for (auto enc : {Encoder::MeanPool, Encoder::SelfAttention}) {
        const auto cfg = small_config(4, enc);
        const ModelParams p(6, 4);
        const auto probs = forward(std::vector<int>{2, 3, 5}, p, cfg);
        CHECK(probs[0] == 0.5);
        CHECK(probs[1] == 0.5);
        const std::vector<LabeledSequence> batch = {{{2}, 1}, {{3, 4}, 0}, {{}, 1}};
        CHECK(loss(batch, p, cfg) == std::log(2.0));
    }
}

TEST_CASE("single token under mean pooling uses its embedding") {
    Rng rng(2);
    const auto cfg = small_config(3);
    auto p = random_params(rng, 5, 3, 1.0);
    for (std::size_t j = 0; j < 3; ++j) p.query()[j] = 0.0;
    const auto e = p.embedding(4);
    double z[2];
    for (int k = 0; k < 2; ++k) {
        z[k] = p.head_bias()[static_cast<std::size_t>(k)];
        for (std::size_t j = 0; j < 3; ++j) z[k] += p.head_row(k)[j] * e[j];
    }
    CHECK(forward(std::vector<int>{4}, p, cfg)[1] == doctest::Approx(sigmoid(z[1] - z[0])).epsilon(1e-14));
}

TEST_CASE("hand-set d=2 fixture") {
    ModelParams p(3, 2);
    p.embedding(0)[0] = 1.0;  // UNK = (1, 0)
    p.embedding(2)[1] = 2.0;  // token 2 = (0, 2)
    p.head_row(0)[0] = 1.0;
    p.head_row(1)[1] = 1.0;
    p.head_bias()[1] = 0.5;
    const std::vector<int> tokens = {0, 2, Vocabulary::kPad};

    // Mean pooling: h = (0.5, 1), z = (0.5, 1.5).
    const auto mean = forward(tokens, p, small_config(2));
    CHECK(mean[1] == doctest::Approx(sigmoid(1.0)).epsilon(1e-14));
    CHECK(std::abs(mean[0] + mean[1] - 1.0) < 1e-15);

    // Attention with q = (1, 1): scores 1/sqrt2 and 2/sqrt2.
    p.query()[0] = 1.0;
    p.query()[1] = 1.0;
    const double a2 = sigmoid(2.0 / std::sqrt(2.0) - 1.0 / std::sqrt(2.0));
    const double h0 = 1.0 - a2;
    const double h1 = 2.0 * a2;
    const auto att = forward(tokens, p, small_config(2, Encoder::SelfAttention));
    CHECK(att[1] == doctest::Approx(sigmoid(h1 + 0.5 - h0)).epsilon(1e-14));
}

TEST_CASE("empty and all-PAD sequences use the PAD embedding") {
    ModelParams p(3, 1);
    p.embedding(Vocabulary::kPad)[0] = 1.0;
    p.head_row(1)[0] = 2.0;
    const auto cfg = small_config(1);
    CHECK(forward(std::vector<int>{}, p, cfg)[1] == doctest::Approx(sigmoid(2.0)).epsilon(1e-14));
    CHECK(forward(std::vector<int>{1, 1}, p, cfg) == forward(std::vector<int>{}, p, cfg));
    CHECK_THROWS_AS(forward(std::vector<int>{3}, p, cfg), DataError);
    CHECK_THROWS_AS(forward(std::vector<int>{0}, p, small_config(2)), DataError);
}

TEST_CASE("loss of a two-sample batch") {
    ModelParams p(4, 2);
    p.embedding(2)[0] = 1.0;
    p.embedding(3)[1] = 1.0;
    p.head_row(1)[0] = std::log(9.0);  // p(biased) = 0.9
    p.head_row(1)[1] = std::log(4.0);  // p(biased) = 0.8
    const std::vector<LabeledSequence> batch = {{{2}, 1}, {{3}, 1}};
    const double expected = (-std::log(0.9) - std::log(0.8)) / 2.0;
    CHECK(std::abs(loss(batch, p, small_config(2)) - expected) < 1e-12);
    CHECK(std::abs(expected - 0.164252) < 1e-6);
    CHECK_THROWS_AS(loss(std::span<const LabeledSequence>{}, p, small_config(2)), DataError);
    CHECK_THROWS_AS(loss(std::vector<LabeledSequence>{{{2}, 2}}, p, small_config(2)), DataError);

    // Confident correct prediction contributes (almost) nothing.
    p.head_row(1)[0] = 50.0;
    CHECK(loss(std::vector<LabeledSequence>{{{2}, 1}}, p, small_config(2)) < 1e-20);
}

TEST_CASE("probabilities normalize and loss is non-negative") {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const auto enc = trial % 2 ? Encoder::SelfAttention : Encoder::MeanPool;
        const auto p = random_params(rng, 12, 5, 3.0);
        const auto batch = random_batch(rng, 12, 4);
        for (const auto& seq : batch) {
            const auto probs = forward(seq.tokens, p, small_config(5, enc));
            CHECK(std::abs(probs[0] + probs[1] - 1.0) < 1e-12);
        }
        CHECK(loss(batch, p, small_config(5, enc)) >= 0.0);
    }
}

TEST_CASE("analytic gradients match central differences") {
    Rng rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto enc = trial % 2 ? Encoder::SelfAttention : Encoder::MeanPool;
        const auto vocab = 2 + uniform_index(rng, 49);
        const auto dim = 1 + uniform_index(rng, 8);
        const auto p = random_params(rng, vocab, dim, 0.5);
        const auto batch = random_batch(rng, vocab, 1 + uniform_index(rng, 6));
        worst = std::max(worst, max_fd_error(batch, p, small_config(static_cast<int>(dim), enc)));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("tokens absent from the batch get zero gradient") {
    Rng rng(3);
    for (auto enc : {Encoder::MeanPool, Encoder::SelfAttention}) {
        const auto p = random_params(rng, 10, 3, 0.5);
        const std::vector<LabeledSequence> batch = {{{2, 3, 3}, 1}, {{5}, 0}};
        const auto g = gradients(batch, p, small_config(3, enc));
        for (std::size_t t = 0; t < 10; ++t) {
            if (t == 2 || t == 3 || t == 5) continue;
            for (double x : g.embedding(t)) CHECK(x == 0.0);
        }
        bool any = false;
        for (double x : g.embedding(3)) any = any || x != 0.0;
        CHECK(any);
    }
}

TEST_CASE("symmetric two-class fixture is a stationary point") {
    Rng rng(4);
    auto p = random_params(rng, 6, 3, 0.5);
    for (int k = 0; k < 2; ++k) {
        for (auto& w : p.head_row(k)) w = 0.0;
        p.head_bias()[static_cast<std::size_t>(k)] = 0.0;
    }
    const std::vector<LabeledSequence> batch = {{{2, 4}, 0}, {{2, 4}, 1}};
    for (auto enc : {Encoder::MeanPool, Encoder::SelfAttention}) {
        const auto g = gradients(batch, p, small_config(3, enc));
        for (double x : g.data()) CHECK(x == 0.0);
    }
}

TEST_CASE("Adam step properties") {
    TrainConfig cfg = small_config(1);
    cfg.learning_rate = 0.01;
    ModelParams p(1, 1);  // 5 scalars
    const std::vector<double> g = {0.3, -2.0, 1e-3, -7.5, 0.0};
    ModelParams grad(1, 1);
    std::copy(g.begin(), g.end(), grad.data().begin());
    AdamState state;
    const auto before = p;
    adam_step(p, grad, state, cfg);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double delta = p.data()[i] - before.data()[i];
        const double expected = g[i] == 0.0 ? 0.0 : -cfg.learning_rate * (g[i] > 0 ? 1.0 : -1.0);
        CHECK(std::abs(delta - expected) < 1e-4 * cfg.learning_rate);
    }
    CHECK(state.step == 1);

    AdamState fresh;
    auto q = before;
    adam_step(q, ModelParams(1, 1), fresh, cfg);
    CHECK(q == before);

    grad.data()[2] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(adam_step(p, grad, state, cfg), doctest::Contains("head_weight[0][0]"), TrainingError);
}

TEST_CASE("Adam decreases a 1-D quadratic") {
    TrainConfig cfg = small_config(1);
    cfg.learning_rate = 0.1;
    ModelParams p(1, 1);
    AdamState state;
    auto f = [](double x) { return (x - 3.0) * (x - 3.0); };
    double prev = f(p.data()[0]);
    for (int step = 0; step < 2; ++step) {
        ModelParams g(1, 1);
        g.data()[0] = 2.0 * (p.data()[0] - 3.0);
        adam_step(p, g, state, cfg);
        const double now = f(p.data()[0]);
        CHECK(now < prev);
        prev = now;
    }
}

TEST_CASE("vocabulary ordering and encoding") {
    const std::vector<std::string> texts = {"b a c", "a b", "a d", "e"};
    const auto v = Vocabulary::build(texts, 2);
    CHECK(v.surfaces() == std::vector<std::string>{"<unk>", "<pad>", "a", "b"});
    CHECK(v.encode("A b zzz") == std::vector<int>{2, 3, Vocabulary::kUnk});
    CHECK(Vocabulary::build(texts, 1).surfaces().size() == 7);
    CHECK(Vocabulary::from_surfaces(v.surfaces()) == v);
    CHECK_THROWS_AS(Vocabulary::from_surfaces({"<unk>", "<pad>", "a", "a"}), DataError);
}

TEST_CASE("training config JSON") {
    TrainConfig cfg;
    cfg.learning_rate = 0.003;
    cfg.encoder = Encoder::SelfAttention;
    cfg.seed = 99;
    CHECK(train_config_from_json(to_json(cfg)) == cfg);
    CHECK(TrainConfig{}.learning_rate == 5e-5);
    CHECK_THROWS_AS(train_config_from_json(nlohmann::json{{"learnin_rate", 1.0}}), DataError);
    CHECK_THROWS_AS(train_config_from_json(nlohmann::json{{"patience", 0}}), DataError);
}

TEST_CASE("early stopping on a scripted loss schedule") {
    const std::vector<double> schedule = {0.6, 0.5, 0.55, 0.56, 0.4, 0.3};
    std::vector<double> params;  // stand-in parameters: the epoch that produced them
    double current = 0.0;
    const auto out = run_early_stopping(
        10, 2,
        [&](int epoch) {
            current = static_cast<double>(epoch);
            return schedule[static_cast<std::size_t>(epoch - 1)];
        },
        [&](int) { params = {current}; });
    CHECK(out.epochs_run == 4);
    CHECK(out.best_epoch == 2);
    CHECK(out.best_loss == 0.5);
    CHECK(params == std::vector<double>{2.0});
    CHECK(out.history == std::vector<double>{0.6, 0.5, 0.55, 0.56});
}

TEST_CASE("decreasing losses run to the epoch limit and keep the last") {
    int snapshots = 0;
    int last = 0;
    const auto out = run_early_stopping(
        7, 2, [](int epoch) { return 1.0 / epoch; }, [&](int epoch) { ++snapshots, last = epoch; });
    CHECK(out.epochs_run == 7);
    CHECK(out.best_epoch == 7);
    CHECK(snapshots == 7);
    CHECK(last == 7);
}

TEST_CASE("early stopping returns the minimum over random schedules") {
    Rng rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> schedule(12);
        for (auto& x : schedule) x = uniform01(rng);
        const int patience = 1 + static_cast<int>(uniform_index(rng, 3));
        int snap = 0;
        const auto out = run_early_stopping(
            12, patience, [&](int e) { return schedule[static_cast<std::size_t>(e - 1)]; },
            [&](int e) { snap = e; });
        CHECK(snap == out.best_epoch);
        const auto seen = std::span(schedule).first(static_cast<std::size_t>(out.epochs_run));
        CHECK(out.best_loss == *std::min_element(seen.begin(), seen.end()));
    }
}

TEST_CASE("pretraining and fine-tuning on a marker corpus") {
    const auto corpus = synthetic::marker_corpus({.n_items = 1200, .marker_rate = 1.0, .id_prefix = "w", .seed = 1});
    const auto held = synthetic::marker_corpus({.n_items = 200, .marker_rate = 1.0, .id_prefix = "t", .seed = 2});
    std::vector<std::string> texts;
    for (const auto& c : corpus) texts.push_back(c.text);
    const auto vocab = Vocabulary::build(texts, 2);
    const auto data = encode(corpus, vocab);

    TrainConfig cfg;
    cfg.embed_dim = 16;
    cfg.learning_rate = 0.02;
    cfg.pretrain_epochs = 6;
    cfg.batch_size = 32;
    const auto init = ModelParams::initialize(vocab.size(), 16, 5);

    cfg.pretrain_epochs = 0;
    CHECK(pretrain(data, init, cfg) == init);
    cfg.pretrain_epochs = 6;

    const auto p = pretrain(data, init, cfg);
    CHECK(pretrain(data, init, cfg) == p);  // bit-identical
    int marker_items = 0;
    double min_p = 1.0;
    for (const auto& h : held) {
        if (h.label != 1) continue;
        ++marker_items;
        min_p = std::min(min_p, predict(h.text, vocab, p, cfg).p_biased);
    }
    CHECK(marker_items > 50);
    CHECK(min_p > 0.9);

    const auto split = split_validation(corpus, 0.1, 3);
    const auto tr = encode(split.train, vocab);
    const auto va = encode(split.validation, vocab);
    const auto ft = finetune(tr, va, p, cfg);
    CHECK(finetune(tr, va, p, cfg).params == ft.params);
    CHECK(ft.stopping.best_epoch >= 1);
    CHECK(predict("Officials slammed the new budget plan.", vocab, ft.params, cfg).label == SentenceLabel::Biased);
    CHECK(predict("Officials discussed the new budget plan.", vocab, ft.params, cfg).label == SentenceLabel::NonBiased);
    CHECK_THROWS_AS(finetune({}, va, p, cfg), TrainingError);
    CHECK_THROWS_AS(finetune(tr, {}, p, cfg), TrainingError);
}

TEST_CASE("prediction tie rule and whitespace invariance") {
    const Vocabulary vocab = Vocabulary::from_surfaces({"<unk>", "<pad>", "radical"});
    const auto cfg = small_config(4);
    const ModelParams zero(3, 4);
    const auto tie = predict("Anything at all", vocab, zero, cfg);
    CHECK(tie.label == SentenceLabel::NonBiased);
    CHECK(tie.p_biased == 0.5);

    Rng rng(1);
    const auto p = random_params(rng, 3, 4, 1.0);
    CHECK(predict("a radical plan", vocab, p, cfg).p_biased == predict("a radical plan \t\n ", vocab, p, cfg).p_biased);
}

TEST_CASE("checkpoint round trip is bit-exact") {
    Rng rng(12);
    Checkpoint c;
    c.config.embed_dim = 3;
    c.config.learning_rate = 1.0 / 3.0;
    c.vocab = Vocabulary::from_surfaces({"<unk>", "<pad>", "x", "caf\xC3\xA9"});
    c.params = random_params(rng, 4, 3, 1.0);
    c.params.data()[0] = 1e-300;
    c.params.data()[1] = -0.1;
    testing::TempDir dir("ckpt");
    save_checkpoint(c, dir / "m.json");
    const auto back = load_checkpoint(dir / "m.json");
    CHECK(back == c);

    auto doc = to_json(c);
    doc["format"] = "other/9";
    CHECK_THROWS_AS(checkpoint_from_json(doc), DataError);
    doc = to_json(c);
    doc["params"].erase(0);
    CHECK_THROWS_AS(checkpoint_from_json(doc), DataError);
}

TEST_CASE("parameter layout descriptions") {
    const ModelParams p(3, 2);
    CHECK(p.data().size() == 3 * 2 + 2 + 4 + 2);
    CHECK(p.describe(5) == "embedding[2][1]");
    CHECK(p.describe(6) == "query[0]");
    CHECK(p.describe(8) == "head_weight[0][0]");
    CHECK(p.describe(13) == "head_bias[1]");
}

}  // TEST_SUITE
