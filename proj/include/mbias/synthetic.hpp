#pragma once

#include "mbias/corpus.hpp"
#include "mbias/eval.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mbias::synthetic {

/// The ten bias marker words planted in generated biased sentences.
std::span<const std::string> marker_words();
/// Neutral filler vocabulary shared by both classes.
std::span<const std::string> filler_words();

struct MarkerCorpusSpec {
    std::size_t n_items = 0;
    double biased_fraction = 0.5;
    /// Probability that a biased item carries one marker word.
    double marker_rate = 0.9;
    /// Probability that the emitted label is flipped.
    double label_noise = 0.0;
    std::size_t min_length = 6;
    std::size_t max_length = 14;
    std::string id_prefix = "s";
    std::uint64_t seed = 0;
};

/// Sentences built from filler words; items of the biased class get a
/// marker word at a random position with probability marker_rate. Labels
/// are the true class, flipped with probability label_noise.
std::vector<LabeledText> marker_corpus(const MarkerCorpusSpec& spec);

struct GoldStoreSpec {
    MarkerCorpusSpec sentences;
    std::size_t n_raters = 5;
    SourceSet source_set = SourceSet::SG1;
    /// Probability that a rater's vote matches the true class.
    double rater_accuracy = 0.85;
    /// Probability that a rater marks a marker word (biased votes only).
    double mark_rate = 0.8;
    /// Probability that a rater marks one random filler word (biased votes only).
    double stray_mark_rate = 0.15;
    std::vector<std::string> outlets = {"outlet-a", "outlet-b", "outlet-c"};
    std::vector<std::string> topics = {"immigration", "economy", "climate"};
};

GoldStore gold_store(const GoldStoreSpec& spec);

struct HeadlineSpec {
    std::size_t n_headlines = 0;
    std::vector<OutletLeaning> outlets;
    /// Marker probability for headlines of partisan outlets.
    double marker_rate = 0.9;
    /// Marker probability for headlines of center outlets.
    double center_marker_rate = 0.0;
    std::string id_prefix = "h";
    std::uint64_t seed = 0;
};

std::vector<HeadlineRecord> headlines(const HeadlineSpec& spec);

}  // namespace mbias::synthetic
