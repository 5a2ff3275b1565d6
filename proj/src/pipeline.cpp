#include "mbias/pipeline.hpp"

#include "mbias/agreement.hpp"
#include "mbias/error.hpp"
#include "mbias/experiment.hpp"
#include "mbias/rng.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace mbias::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T v{};
    in >> v;
    if (in.fail() || !in.eof()) throw DataError("config key '" + key + "': cannot parse '" + value + "'");
    return v;
}

}  // namespace

std::map<std::string, std::string> parse_flat_config(std::string_view content) {
    std::map<std::string, std::string> values;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        auto nl = content.find('\n', pos);
        if (nl == std::string_view::npos) nl = content.size();
        std::string line(content.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;

        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        auto key = trim(std::string_view(line).substr(0, eq));
        auto value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw DataError("config line " + std::to_string(line_no) + ": empty key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        values[key] = value;
    }
    return values;
}

bool apply_train_setting(TrainConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "batch_size") cfg.batch_size = parse_number<int>(key, value);
    else if (key == "learning_rate") cfg.learning_rate = parse_number<double>(key, value);
    else if (key == "beta1") cfg.beta1 = parse_number<double>(key, value);
    else if (key == "beta2") cfg.beta2 = parse_number<double>(key, value);
    else if (key == "epsilon") cfg.epsilon = parse_number<double>(key, value);
    else if (key == "pretrain_epochs") cfg.pretrain_epochs = parse_number<int>(key, value);
    else if (key == "max_finetune_epochs") cfg.max_finetune_epochs = parse_number<int>(key, value);
    else if (key == "patience") cfg.patience = parse_number<int>(key, value);
    else if (key == "embed_dim") cfg.embed_dim = parse_number<int>(key, value);
    else if (key == "min_freq") cfg.min_freq = parse_number<int>(key, value);
    else if (key == "validation_fraction") cfg.validation_fraction = parse_number<double>(key, value);
    else if (key == "train_seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "encoder") {
        const auto e = parse_encoder(value);
        if (!e) throw DataError("config key 'encoder': unknown encoder '" + value + "'");
        cfg.encoder = *e;
    } else {
        return false;
    }
    return true;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
    const auto content = read_file(path);
    if (path.extension() == ".json") {
        try {
            return train_config_from_json(nlohmann::json::parse(content));
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(path.string() + ": " + e.what());
        }
    }
    TrainConfig cfg;
    for (const auto& [key, value] : parse_flat_config(content)) {
        if (key == "seed") {
            cfg.seed = parse_number<std::uint64_t>(key, value);
        } else if (!apply_train_setting(cfg, key, value)) {
            throw DataError(path.string() + ": unknown training config key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

void PipelineConfig::validate() const {
    auto require_path = [](const std::filesystem::path& p, const char* what) {
        if (!p.empty() && !std::filesystem::exists(p)) {
            throw DataError(std::string(what) + " path '" + p.string() + "' does not exist");
        }
    };
    if (gold.empty()) throw DataError("pipeline config: 'gold' is required");
    require_path(gold, "gold");
    require_path(headlines, "headlines");
    require_path(leanings, "leanings");
    require_path(lexicons, "lexicons");
    if (headlines.empty() != leanings.empty()) {
        throw DataError("pipeline config: 'headlines' and 'leanings' must be given together");
    }
    if (word_threshold && *word_threshold < 1) throw DataError("pipeline config: word_threshold must be >= 1");
    if (k < 2) throw DataError("pipeline config: k must be >= 2");
    if (workers < 1) throw DataError("pipeline config: workers must be >= 1");
    train.validate();
}

PipelineConfig pipeline_config_from(const std::map<std::string, std::string>& values,
                                    const std::filesystem::path& base_dir) {
    PipelineConfig cfg;
    auto resolve = [&](const std::string& v) {
        std::filesystem::path p(v);
        return p.is_relative() ? base_dir / p : p;
    };
    for (const auto& [key, value] : values) {
        if (key == "gold") cfg.gold = resolve(value);
        else if (key == "headlines") cfg.headlines = resolve(value);
        else if (key == "leanings") cfg.leanings = resolve(value);
        else if (key == "lexicons") cfg.lexicons = resolve(value);
        else if (key == "out_dir") cfg.out_dir = resolve(value);
        else if (key == "word_threshold") cfg.word_threshold = parse_number<int>(key, value);
        else if (key == "k") cfg.k = parse_number<int>(key, value);
        else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "workers") cfg.workers = parse_number<int>(key, value);
        else if (!apply_train_setting(cfg.train, key, value)) {
            throw DataError("unknown pipeline config key '" + key + "'");
        }
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Report

namespace {

constexpr const char* kReportSchema = "mbias.report/1";
constexpr const char* kAgreementAssumption =
    "computed over all raw rater votes; no sentences or votes excluded";

nlohmann::ordered_json agreement_json(const GoldStore& store, LabelKind kind) {
    try {
        return to_json(krippendorff_alpha(reliability_from_gold(store, kind)));
    } catch (const DataError& e) {
        return nlohmann::ordered_json{{"error", e.what()}};
    }
}

nlohmann::ordered_json gold_section(const GoldStore& store, std::span<const GoldLabel> labels) {
    nlohmann::ordered_json obj;
    obj["sentences"] = store.sentences().size();
    obj["annotations"] = store.annotations().size();
    obj["distribution"] = to_json(distribution(labels));
    obj["agreement"] = {{"bias", agreement_json(store, LabelKind::Bias)},
                        {"opinion", agreement_json(store, LabelKind::Opinion)},
                        {"assumption", kAgreementAssumption}};
    return obj;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
}

}  // namespace

nlohmann::ordered_json run_report(const PipelineConfig& cfg, std::ostream& diagnostics) {
    cfg.validate();
    const auto store = load_gold(cfg.gold);
    const auto labels = aggregate_store(store, cfg.word_threshold);

    nlohmann::ordered_json report;
    report["schema"] = kReportSchema;
    report["seed"] = cfg.seed;
    report["k"] = cfg.k;
    report["train_config"] = to_json(cfg.train);
    report["gold"] = gold_section(store, labels);

    std::set<SourceSet> sets;
    for (const auto& s : store.sentences()) sets.insert(s.source_set);
    if (sets.size() > 1) {
        nlohmann::ordered_json by_set;
        for (const auto set : sets) {
            const auto sub = store.filter(set);
            const auto sub_labels = aggregate_store(sub, cfg.word_threshold);
            by_set[std::string(to_string(set))] = gold_section(sub, sub_labels);
        }
        report["gold"]["by_source_set"] = std::move(by_set);
    }

    std::size_t excluded = 0;
    const auto items = labeled_gold(store, labels, &excluded);
    report["classification_items"] = items.size();
    report["excluded_no_agreement"] = excluded;

    if (!cfg.lexicons.empty()) {
        const auto lex = load_lexicons(cfg.lexicons);
        const auto trainer = make_baseline_trainer(lex);
        std::vector<int> preds, golds;
        for (const auto& item : items) golds.push_back(item.label);
        preds = trainer({}, items, 0);
        auto cv = cross_validate(items, trainer, cfg.k, cfg.seed, cfg.workers);
        cv.excluded_no_agreement = excluded;
        report["baseline"] = {{"lexicon_entries", lex.size()}, {"overall", to_json(f1(preds, golds))}, {"cv", to_json(cv)}};
    }

    std::vector<LabeledText> weak;
    if (!cfg.headlines.empty()) {
        const auto build = build_corpus(load_headlines(cfg.headlines), load_leanings(cfg.leanings), store.sentences());
        for (const auto& n : build.near_duplicates) {
            diagnostics << "warning: headline '" << n.headline_id << "' is a near duplicate of gold sentence '"
                        << n.sentence_id << "' (jaccard " << n.jaccard << ")\n";
        }
        report["distant"] = to_json(build);
        weak = labeled_weak(build.records);
        if (!cfg.out_dir.empty()) {
            std::filesystem::create_directories(cfg.out_dir);
            write_text(cfg.out_dir / "weak.jsonl", serialize_weak(build.records));
        }
    }

    nlohmann::ordered_json neural;
    auto finetune_only = cross_validate(items, make_neural_trainer(cfg.train, {}), cfg.k, cfg.seed, cfg.workers);
    finetune_only.excluded_no_agreement = excluded;
    neural["finetune_only"] = to_json(finetune_only);
    if (!weak.empty() && cfg.train.pretrain_epochs > 0) {
        auto two_stage = cross_validate(items, make_neural_trainer(cfg.train, weak), cfg.k, cfg.seed, cfg.workers);
        two_stage.excluded_no_agreement = excluded;
        neural["pretrain_finetune"] = to_json(two_stage);
        neural["macro_f1_gain"] = two_stage.macro_f1.mean - finetune_only.macro_f1.mean;
    }
    report["neural"] = std::move(neural);

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::string lines;
        for (const auto& l : labels) lines += to_json(l).dump() + "\n";
        write_text(cfg.out_dir / "gold_labels.jsonl", lines);
        write_text(cfg.out_dir / "report.json", report.dump(2) + "\n");
    }
    return report;
}

std::string render_table(const nlohmann::ordered_json& doc) {
    std::vector<std::pair<std::string, std::string>> rows;
    std::function<void(const nlohmann::ordered_json&, const std::string&)> walk = [&](const auto& node,
                                                                                      const std::string& prefix) {
        if (node.is_object() && !node.empty()) {
            for (const auto& [k, v] : node.items()) walk(v, prefix.empty() ? k : prefix + "." + k);
        } else if (node.is_array() && !node.empty() && (node.front().is_object() || node.front().is_array())) {
            for (std::size_t i = 0; i < node.size(); ++i) walk(node[i], prefix + "[" + std::to_string(i) + "]");
        } else if (node.is_string()) {
            rows.emplace_back(prefix, node.template get<std::string>());
        } else if (node.is_number_float()) {
            std::ostringstream s;
            s.precision(5);
            s << node.template get<double>();
            rows.emplace_back(prefix, s.str());
        } else {
            rows.emplace_back(prefix, node.dump());
        }
    };
    walk(doc, "");
    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.first.size());
    std::string out;
    for (const auto& [k, v] : rows) out += k + std::string(width - k.size() + 2, ' ') + v + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Command line

namespace {

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool pretty = false;
    bool quiet = false;
};

class Context {
public:
    Context(const Globals& g, std::ostream& out, std::ostream& err) : g_(g), out_(out), err_(err) {}

    /// Result document: to --out when the subcommand uses --out for it,
    /// otherwise stdout.
    void emit(const nlohmann::ordered_json& doc, bool to_out_file) const {
        const auto text = g_.pretty ? render_table(doc) : doc.dump() + "\n";
        if (to_out_file && !g_.out.empty()) {
            write_text(g_.out, g_.pretty ? doc.dump(2) + "\n" : text);
        } else {
            out_ << text;
        }
    }

    void warn(const std::string& msg) const {
        if (!g_.quiet) err_ << "warning: " << msg << "\n";
    }

    std::ostream& diagnostics() const { return g_.quiet ? null_ : err_; }

    const Globals& globals() const { return g_; }

private:
    const Globals& g_;
    std::ostream& out_;
    std::ostream& err_;
    mutable std::ostringstream null_;
};

GoldStore load_gold_with(const std::string& path, const std::string& format, const std::string& encoding) {
    std::optional<GoldFormat> fmt;
    if (!format.empty()) {
        fmt = parse_gold_format(format);
        if (!fmt) throw DataError("unknown gold format '" + format + "'");
    } else {
        fmt = std::filesystem::path(path).extension() == ".csv" ? GoldFormat::CSV : GoldFormat::JSONL;
    }
    const auto enc = parse_span_encoding(encoding);
    if (!enc) throw DataError("unknown span encoding '" + encoding + "'");
    return load_gold(path, *fmt, *enc);
}

TrainConfig train_config_for(const Globals& g, const std::string& explicit_path) {
    const auto& path = explicit_path.empty() ? g.config : explicit_path;
    TrainConfig cfg = path.empty() ? TrainConfig{} : load_train_config(path);
    if (g.seed) cfg.seed = *g.seed;
    cfg.validate();
    return cfg;
}

nlohmann::ordered_json history_json(const EarlyStoppingOutcome& s) {
    return {{"best_epoch", s.best_epoch}, {"epochs_run", s.epochs_run}, {"best_validation_loss", s.best_loss},
            {"validation_loss_history", s.history}};
}

void require_out(const Globals& g, const char* what) {
    if (g.out.empty()) throw CLI::RequiredError(std::string("--out (") + what + ")");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Media-bias data pipeline: label aggregation, agreement, distant corpus, classifier training"};
    app.name("mbias");
    app.require_subcommand(1);

    Globals g;
    app.add_option("--config", g.config, "Configuration file (flat key = value, or JSON for training configs)");
    app.add_option("--seed", g.seed, "Random seed; overrides config files");
    app.add_option("--out", g.out, "Output file");
    app.add_flag("--pretty", g.pretty, "Human-readable table instead of JSON");
    app.add_flag("--quiet", g.quiet, "Suppress diagnostics on stderr");

    std::string gold, format, encoding = "offsets";
    auto* ingest = app.add_subcommand("ingest", "Validate a gold file and write it back in canonical form");
    ingest->add_option("--gold", gold, "Gold sentences and annotations")->required();
    ingest->add_option("--format", format, "jsonl or csv (default: by extension)");
    ingest->add_option("--span-encoding", encoding, "offsets or tokens");

    std::optional<int> word_threshold;
    bool with_report = false;
    auto* aggregate = app.add_subcommand("aggregate", "Majority-vote gold labels and biased-word sets");
    aggregate->add_option("--gold", gold)->required();
    aggregate->add_option("--format", format);
    aggregate->add_option("--span-encoding", encoding);
    aggregate->add_option("--word-threshold", word_threshold, "Raters needed to mark a word (default 3, SG2 2)");
    aggregate->add_flag("--report", with_report, "Print the label distribution report");

    std::string label = "bias", metric = "alpha";
    bool degenerate_as_one = false;
    auto* agreement = app.add_subcommand("agreement", "Inter-annotator agreement");
    agreement->add_option("--gold", gold)->required();
    agreement->add_option("--format", format);
    agreement->add_option("--label", label)->check(CLI::IsMember({"bias", "opinion"}));
    agreement->add_option("--metric", metric)->check(CLI::IsMember({"alpha", "fleiss"}));
    agreement->add_flag("--degenerate-as-one", degenerate_as_one, "Report 1 when all values share one label");

    std::string lexicons;
    int k = 5;
    auto* baseline = app.add_subcommand("baseline", "Lexicon baseline predictions and evaluation");
    baseline->add_option("--gold", gold)->required();
    baseline->add_option("--format", format);
    baseline->add_option("--lexicons", lexicons, "Directory of *.txt word lists")->required();
    baseline->add_option("--k", k, "Folds for the cross-validated scores");

    std::string headlines, leanings;
    auto* distant = app.add_subcommand("build-distant", "Build the weakly labeled headline corpus");
    distant->add_option("--headlines", headlines)->required();
    distant->add_option("--leanings", leanings)->required();
    distant->add_option("--gold", gold)->required();
    distant->add_option("--format", format);

    std::string weak_path, model_config, init_path;
    auto* pretrain_cmd = app.add_subcommand("pretrain", "Pre-train on weak labels and write a checkpoint");
    pretrain_cmd->add_option("--weak", weak_path, "WeakRecord JSONL")->required();
    pretrain_cmd->add_option("--gold", gold, "Gold file whose text joins the vocabulary");
    pretrain_cmd->add_option("--format", format);

    auto* finetune_cmd = app.add_subcommand("finetune", "Fine-tune on aggregated gold labels");
    finetune_cmd->add_option("--gold", gold)->required();
    finetune_cmd->add_option("--format", format);
    finetune_cmd->add_option("--init", init_path, "Checkpoint to start from (keeps its vocabulary)");
    finetune_cmd->add_option("--word-threshold", word_threshold);

    int workers = 1;
    auto* evaluate = app.add_subcommand("evaluate", "Stratified k-fold cross-validation of the classifier");
    evaluate->add_option("--gold", gold)->required();
    evaluate->add_option("--format", format);
    evaluate->add_option("--model-config", model_config, "Training configuration file");
    evaluate->add_option("--k", k);
    evaluate->add_option("--weak", weak_path, "Weak corpus for pre-training (omit for fine-tune only)");
    evaluate->add_option("--workers", workers, "Folds trained in parallel");

    std::string model_path, text, input_path;
    auto* predict_cmd = app.add_subcommand("predict", "Classify sentences with a checkpoint");
    predict_cmd->add_option("--model", model_path)->required();
    auto* text_opt = predict_cmd->add_option("--text", text, "One sentence");
    auto* input_opt = predict_cmd->add_option("--input", input_path, "File with one sentence per line");
    text_opt->excludes(input_opt);

    auto* report = app.add_subcommand("report", "Run the whole pipeline from a config file");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    if (!args.empty() && !args.front().empty() && args.front().front() != '-') {
        const auto subs = app.get_subcommands({});
        const bool known = std::any_of(subs.begin(), subs.end(), [&](const CLI::App* s) { return s->get_name() == args.front(); });
        if (!known) {
            err << "error: unknown subcommand '" << args.front() << "'\n\n" << app.help();
            return 1;
        }
    }

    std::vector<std::string> argv_store = {"mbias"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    const Context ctx(g, out, err);
    try {
        if (*ingest) {
            const auto store = load_gold_with(gold, format, encoding);
            std::set<std::string> raters;
            std::map<std::string, std::size_t> by_set;
            for (const auto& a : store.annotations()) raters.insert(a.rater_id);
            for (const auto& s : store.sentences()) ++by_set[std::string(to_string(s.source_set))];
            if (!g.out.empty()) write_gold(store, g.out, GoldFormat::JSONL);
            ctx.emit({{"sentences", store.sentences().size()},
                      {"annotations", store.annotations().size()},
                      {"raters", raters.size()},
                      {"by_source_set", by_set}},
                     false);
        } else if (*aggregate) {
            if (word_threshold && *word_threshold < 1) throw DataError("--word-threshold must be >= 1");
            const auto store = load_gold_with(gold, format, encoding);
            const auto labels = aggregate_store(store, word_threshold);
            std::string lines;
            for (const auto& l : labels) lines += to_json(l).dump() + "\n";
            if (!g.out.empty()) write_text(g.out, lines);
            if (with_report) {
                ctx.emit(to_json(distribution(labels)), false);
            } else if (g.out.empty()) {
                out << lines;
            } else {
                ctx.emit({{"gold_labels", labels.size()}, {"out", g.out}}, false);
            }
        } else if (*agreement) {
            const auto store = load_gold_with(gold, format, encoding);
            const auto kind = label == "bias" ? LabelKind::Bias : LabelKind::Opinion;
            const auto matrix = reliability_from_gold(store, kind);
            nlohmann::ordered_json doc;
            doc["label"] = label;
            doc["metric"] = metric;
            const auto stats = metric == "alpha" ? to_json(krippendorff_alpha(matrix, {degenerate_as_one}))
                                                 : to_json(fleiss_kappa(matrix, {degenerate_as_one}));
            for (const auto& [key, value] : stats.items()) doc[key] = value;
            doc["items"] = matrix.items();
            doc["raters"] = matrix.raters();
            doc["assumption"] = kAgreementAssumption;
            ctx.emit(doc, true);
        } else if (*baseline) {
            const auto store = load_gold_with(gold, format, encoding);
            const auto lex = load_lexicons(lexicons);
            const auto labels = aggregate_store(store);
            std::size_t excluded = 0;
            const auto items = labeled_gold(store, labels, &excluded);
            std::string lines;
            std::vector<int> preds, golds;
            for (const auto& s : store.sentences()) {
                const auto tokens = tokenize(s.text);
                const auto mask = tag_words(tokens, lex);
                nlohmann::ordered_json hits = nlohmann::ordered_json::array();
                for (std::size_t i = 0; i < tokens.size(); ++i) {
                    if (mask[i]) hits.push_back(tokens[i].surface);
                }
                lines += nlohmann::ordered_json{{"sentence_id", s.id},
                                                {"prediction", to_string(classify_sentence(tokens, lex))},
                                                {"hits", hits}}
                             .dump() +
                         "\n";
            }
            for (const auto& item : items) golds.push_back(item.label);
            const auto trainer = make_baseline_trainer(lex);
            preds = trainer({}, items, 0);
            if (!g.out.empty()) write_text(g.out, lines);
            nlohmann::ordered_json doc{{"excluded_no_agreement", excluded}, {"overall", to_json(f1(preds, golds))}};
            auto cv = cross_validate(items, trainer, k, g.seed.value_or(0));
            cv.excluded_no_agreement = excluded;
            doc["cv"] = to_json(cv);
            ctx.emit(doc, false);
        } else if (*distant) {
            require_out(g, "weak corpus JSONL");
            const auto store = load_gold_with(gold, format, encoding);
            const auto build = build_corpus(load_headlines(headlines), load_leanings(leanings), store.sentences());
            for (const auto& n : build.near_duplicates) {
                ctx.warn("headline '" + n.headline_id + "' is a near duplicate of gold sentence '" + n.sentence_id + "'");
            }
            write_text(g.out, serialize_weak(build.records));
            ctx.emit(to_json(build), false);
        } else if (*pretrain_cmd) {
            require_out(g, "checkpoint");
            const auto cfg = train_config_for(g, "");
            const auto weak = labeled_weak(load_weak(weak_path));
            std::vector<std::string> texts;
            for (const auto& w : weak) texts.push_back(w.text);
            if (!gold.empty()) {
                for (const auto& s : load_gold_with(gold, format, encoding).sentences()) texts.push_back(s.text);
            }
            Checkpoint c;
            c.config = cfg;
            c.vocab = Vocabulary::build(texts, cfg.min_freq);
            c.params = pretrain(encode(weak, c.vocab),
                                ModelParams::initialize(c.vocab.size(), static_cast<std::size_t>(cfg.embed_dim), cfg.seed),
                                cfg);
            save_checkpoint(c, g.out);
            ctx.emit({{"weak_items", weak.size()},
                      {"vocab_size", c.vocab.size()},
                      {"pretrain_epochs", cfg.pretrain_epochs},
                      {"final_weak_loss", loss(encode(weak, c.vocab), c.params, cfg)}},
                     false);
        } else if (*finetune_cmd) {
            require_out(g, "checkpoint");
            const auto store = load_gold_with(gold, format, encoding);
            std::size_t excluded = 0;
            const auto items = labeled_gold(store, aggregate_store(store, word_threshold), &excluded);
            nlohmann::ordered_json doc;
            Checkpoint c;
            if (!init_path.empty()) {
                c = load_checkpoint(init_path);
                if (!g.config.empty()) {
                    const auto cfg = train_config_for(g, "");
                    if (cfg.embed_dim != c.config.embed_dim) throw DataError("config embed_dim differs from --init");
                    c.config = cfg;
                } else if (g.seed) {
                    c.config.seed = *g.seed;
                }
                const auto split = split_validation(items, c.config.validation_fraction, mix_seed(c.config.seed, 3));
                auto tuned = finetune(encode(split.train, c.vocab), encode(split.validation, c.vocab), c.params, c.config);
                c.params = std::move(tuned.params);
                doc = history_json(tuned.stopping);
                doc["n_train"] = split.train.size();
                doc["n_validation"] = split.validation.size();
            } else {
                auto model = train_model(items, {}, train_config_for(g, ""));
                c = std::move(model.checkpoint);
                doc = history_json(model.stopping);
                doc["n_train"] = model.n_train;
                doc["n_validation"] = model.n_validation;
            }
            doc["excluded_no_agreement"] = excluded;
            save_checkpoint(c, g.out);
            ctx.emit(doc, false);
        } else if (*evaluate) {
            const auto cfg = train_config_for(g, model_config);
            const auto store = load_gold_with(gold, format, encoding);
            std::size_t excluded = 0;
            const auto items = labeled_gold(store, aggregate_store(store), &excluded);
            std::vector<LabeledText> weak;
            if (!weak_path.empty()) weak = labeled_weak(load_weak(weak_path));
            const bool pretraining = !weak.empty() && cfg.pretrain_epochs > 0;
            auto cv = cross_validate(items, make_neural_trainer(cfg, weak), k, g.seed.value_or(cfg.seed), workers);
            cv.excluded_no_agreement = excluded;
            auto doc = to_json(cv);
            doc["model"] = pretraining ? "pretrain+finetune" : "finetune";
            doc["train_config"] = to_json(cfg);
            ctx.emit(doc, true);
        } else if (*predict_cmd) {
            const auto c = load_checkpoint(model_path);
            std::vector<std::string> texts;
            if (!input_path.empty()) {
                std::istringstream in(read_file(input_path));
                for (std::string line; std::getline(in, line);) {
                    if (!trim(line).empty()) texts.push_back(line);
                }
            } else if (*text_opt) {
                texts.push_back(text);
            } else {
                throw CLI::RequiredError("--text or --input");
            }
            std::string lines;
            for (const auto& t : texts) {
                const auto p = predict(t, c.vocab, c.params, c.config);
                lines += nlohmann::ordered_json{{"text", t}, {"label", to_string(p.label)}, {"p_biased", p.p_biased}}.dump() + "\n";
            }
            if (!g.out.empty()) write_text(g.out, lines);
            else out << lines;
        } else if (*report) {
            if (g.config.empty()) throw CLI::RequiredError("--config");
            const std::filesystem::path path(g.config);
            auto cfg = pipeline_config_from(parse_flat_config(read_file(path)), path.parent_path());
            if (g.seed) cfg.seed = *g.seed;
            ctx.emit(run_report(cfg, ctx.diagnostics()), true);
        }
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace mbias::cli
