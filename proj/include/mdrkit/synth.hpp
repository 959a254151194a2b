#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdrkit/data_model.hpp"
#include "mdrkit/jsonio.hpp"

namespace mdrkit {

struct SynthConfig {
    size_t n_records = 1000;
    uint64_t seed = 0;
    double mdr_prevalence = 0.35;
    // log-odds coupling between the latent carrier state and per-antibiotic
    // resistance probability
    double signal_strength = 4.0;
    double noise_rate = 0.0;  // fraction of antibiotic cells flipped
    std::vector<double> taxa_mix;  // empty = uniform over canonical taxa

    void validate(const SchemaConfig& schema) const;  // throws ConfigError
    json to_json() const;
    static SynthConfig from_json(const json& j);
};

struct SynthOutput {
    std::string csv;             // schema-compatible raw CSV
    std::vector<int> labels;     // realized MDR labels (family recount on the cells)
    std::vector<int> carrier;    // latent carrier flags
    json metadata;               // generator identity + parameters
};

// Deterministic per (config, schema): same seed gives byte-identical CSV.
// Each record uses its own counter-derived SplitMix64 substream, so any
// parallel regeneration strategy reproduces the sequential output.
SynthOutput generate(const SynthConfig& config, const SchemaConfig& schema);

}  // namespace mdrkit
