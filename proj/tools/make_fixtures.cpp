// Regenerates the bundled synthetic fixtures under data/fixtures/.
//
//   make_fixtures <output-dir>

#include "mbias/distant.hpp"
#include "mbias/synthetic.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

void write(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixtures <output-dir>\n";
        return 1;
    }
    namespace syn = mbias::synthetic;
    const std::filesystem::path dir(argv[1]);
    std::filesystem::create_directories(dir / "lexicons");

    syn::GoldStoreSpec sg1;
    sg1.sentences = {.n_items = 120, .biased_fraction = 0.45, .marker_rate = 0.9, .id_prefix = "sg1-", .seed = 11};
    sg1.n_raters = 8;
    sg1.source_set = mbias::SourceSet::SG1;

    syn::GoldStoreSpec sg2;
    sg2.sentences = {.n_items = 80, .biased_fraction = 0.5, .marker_rate = 0.9, .id_prefix = "sg2-", .seed = 12};
    sg2.n_raters = 5;
    sg2.source_set = mbias::SourceSet::SG2_EXT;

    const auto a = syn::gold_store(sg1);
    const auto b = syn::gold_store(sg2);
    auto sentences = a.sentences();
    sentences.insert(sentences.end(), b.sentences().begin(), b.sentences().end());
    auto annotations = a.annotations();
    annotations.insert(annotations.end(), b.annotations().begin(), b.annotations().end());
    const auto gold = mbias::GoldStore::build(sentences, annotations);
    write(dir / "gold.jsonl", mbias::serialize_gold(gold, mbias::GoldFormat::JSONL));

    const std::vector<mbias::OutletLeaning> outlets = {
        {"left-daily", mbias::Leaning::Left},     {"right-herald", mbias::Leaning::Right},
        {"left-post", mbias::Leaning::Left},      {"wire-service", mbias::Leaning::Center},
        {"public-radio", mbias::Leaning::Center}, {"business-journal", mbias::Leaning::Center}};
    std::string leanings = "outlet,leaning\n";
    for (const auto& o : outlets) leanings += o.outlet + "," + std::string(mbias::to_string(o.leaning)) + "\n";
    write(dir / "leanings.csv", leanings);

    auto heads = syn::headlines({.n_headlines = 600, .outlets = outlets, .marker_rate = 0.9, .id_prefix = "h", .seed = 13});
    // One headline repeating a gold sentence verbatim (modulo case and
    // spacing) and one in-corpus duplicate, both to be dropped.
    heads.push_back({"h-overlap", "  " + gold.sentences()[3].text + " ", "wire-service"});
    heads.push_back({"h-duplicate", heads[0].text, heads[0].outlet});
    std::string lines;
    for (const auto& h : heads) {
        nlohmann::ordered_json obj{{"id", h.id}, {"text", h.text}, {"outlet", h.outlet}};
        lines += obj.dump() + "\n";
    }
    write(dir / "headlines.jsonl", lines);

    write(dir / "lexicons" / "opinion_words.txt",
          "# opinion words\nslammed\nradical\ndisgraceful\nshameful\noutrageous\n");
    write(dir / "lexicons" / "hedges.txt", "# hedges\nperhaps\nreportedly\nallegedly\n");
    write(dir / "lexicons" / "assertive_verbs.txt", "# assertive verbs\nclaims\ninsists\nextremist\n");
    write(dir / "lexicons" / "factive_verbs.txt", "# factive verbs\nrealizes\nregrets\n");

    write(dir / "report.conf",
          "# End-to-end pipeline over the bundled synthetic fixtures\n"
          "gold = gold.jsonl\n"
          "headlines = headlines.jsonl\n"
          "leanings = leanings.csv\n"
          "lexicons = lexicons\n"
          "k = 5\n"
          "seed = 7\n"
          "\n"
          "[train]\n"
          "embed_dim = 16\n"
          "batch_size = 32\n"
          "learning_rate = 0.01\n"
          "pretrain_epochs = 1\n"
          "max_finetune_epochs = 15\n"
          "patience = 2\n");
    std::cout << "wrote fixtures to " << dir << "\n";
    return 0;
}
