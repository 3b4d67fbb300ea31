#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "freqsketch/advice.hpp"
#include "freqsketch/estimation.hpp"
#include "freqsketch/overhead.hpp"
#include "freqsketch/samplers.hpp"

namespace freqsketch {

// Versioned JSON blobs. Entries are written in a canonical order so equal
// sketches serialize to identical bytes. Infinite reals are written as the
// string "inf".
//
//   {"format": "freqsketch/bottom_k", "version": 1,
//    "config": {"k", "q", "scheme", "hash_seed"},
//    "entries": [{"key", "frequency", "seed"}...],   // by (seed, key)
//    "shadow": {"key", "frequency", "seed"} | null}
//
//   {"format": "freqsketch/advice", "version": 1,
//    "params": {"k_h", "k_p", "k_u", "f", "scheme", "hash_seed"},
//    "heavy": [{"key", "frequency", "advice", "hash", "seed"}...],  // advice order
//    "sampled": [...]}                                              // by key
//
//   {"format": "freqsketch/sample", "version": 1, "scheme", "k", "q",
//    "threshold", "records": [{"key", "frequency", "p"}...]}
inline constexpr int kBlobVersion = 1;

nlohmann::json to_json(const BottomKSketch& sketch);
nlohmann::json to_json(const AdviceSketch& sketch);
nlohmann::json to_json(const WeightedSample& sample);
nlohmann::json to_json(const ErrorReport& report);
nlohmann::json to_json(const OverheadReport& report);

BottomKSketch bottom_k_from_json(const nlohmann::json& j);
AdviceSketch advice_from_json(const nlohmann::json& j);
WeightedSample sample_from_json(const nlohmann::json& j);

using Blob = std::variant<BottomKSketch, AdviceSketch, WeightedSample>;
Blob blob_from_json(const nlohmann::json& j);
nlohmann::json blob_to_json(const Blob& blob);

std::string dump(const nlohmann::json& j);

}  // namespace freqsketch
