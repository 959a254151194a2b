#include "mdrkit/synth.hpp"

#include <array>
#include <cmath>
#include <numeric>

#include "mdrkit/errors.hpp"
#include "mdrkit/features.hpp"
#include "mdrkit/rng.hpp"

namespace mdrkit {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Baseline per-antibiotic log-odds of resistance at zero propensity.
constexpr double kBaseLogOdds = -1.0;
constexpr double kIntermediateGivenNotR = 0.15;

size_t pick_categorical(Rng& rng, const std::vector<double>& probs) {
    double u = rng.next_double();
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

}  // namespace

void SynthConfig::validate(const SchemaConfig& schema) const {
    if (n_records == 0) throw ConfigError("synth: n_records must be positive");
    if (mdr_prevalence < 0.0 || mdr_prevalence > 1.0)
        throw ConfigError("synth: mdr_prevalence must be in [0, 1]");
    if (noise_rate < 0.0 || noise_rate > 1.0)
        throw ConfigError("synth: noise_rate must be in [0, 1]");
    if (signal_strength < 0.0) throw ConfigError("synth: signal_strength must be >= 0");
    if (!taxa_mix.empty()) {
        if (taxa_mix.size() != schema.canonical_taxa.size())
            throw ConfigError("synth: taxa_mix size must match canonical_taxa");
        double sum = std::accumulate(taxa_mix.begin(), taxa_mix.end(), 0.0);
        if (std::fabs(sum - 1.0) > 1e-9) throw ConfigError("synth: taxa_mix must sum to 1");
        for (double p : taxa_mix)
            if (p < 0.0) throw ConfigError("synth: taxa_mix entries must be >= 0");
    }
}

json SynthConfig::to_json() const {
    return json{{"n_records", n_records},   {"seed", seed},
                {"mdr_prevalence", mdr_prevalence}, {"signal_strength", signal_strength},
                {"noise_rate", noise_rate}, {"taxa_mix", taxa_mix}};
}

SynthConfig SynthConfig::from_json(const json& j) {
    SynthConfig c;
    try {
        c.n_records = j.at("n_records").get<size_t>();
        c.seed = j.value("seed", uint64_t{0});
        c.mdr_prevalence = j.value("mdr_prevalence", 0.35);
        c.signal_strength = j.value("signal_strength", 4.0);
        c.noise_rate = j.value("noise_rate", 0.0);
        if (j.contains("taxa_mix")) c.taxa_mix = j.at("taxa_mix").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("synth config: ") + e.what());
    }
    return c;
}

SynthOutput generate(const SynthConfig& config, const SchemaConfig& schema) {
    config.validate(schema);
    schema.validate();
    FamilyMap fmap = FamilyMap::defaults();
    fmap.validate(schema);

    std::vector<double> taxa_mix = config.taxa_mix;
    if (taxa_mix.empty())
        taxa_mix.assign(schema.canonical_taxa.size(), 1.0 / schema.canonical_taxa.size());

    // Raw label per ordinal frequency level, picked from the schema vocabulary.
    std::vector<std::string> freq_labels(4);
    for (int level = 0; level < 4; ++level) freq_labels[level] = std::to_string(level);
    for (auto it = schema.infection_frequency_map.rbegin();
         it != schema.infection_frequency_map.rend(); ++it)
        freq_labels[it->second] = it->first;

    std::vector<std::string> header;
    header.push_back("ID");
    header.push_back(schema.column_for("species"));
    header.push_back(schema.column_for("age_gender"));
    header.push_back(schema.column_for("diabetes"));
    header.push_back(schema.column_for("hypertension"));
    header.push_back(schema.column_for("prior_hospitalization"));
    header.push_back(schema.column_for("infection_frequency"));
    for (const auto& abx : schema.antibiotics) header.push_back(abx);
    header.push_back("Notes");

    const std::array<const char*, 3> sir{"S", "I", "R"};

    SynthOutput out;
    std::vector<std::vector<std::string>> rows;
    rows.reserve(config.n_records);

    for (size_t i = 0; i < config.n_records; ++i) {
        Rng rng(substream_seed(config.seed, "record", i));

        bool carrier = rng.bernoulli(config.mdr_prevalence);
        double propensity = carrier ? 1.0 : -1.0;

        std::vector<std::string> row;
        row.reserve(header.size());
        row.push_back(std::to_string(i + 1));
        row.push_back(schema.canonical_taxa[pick_categorical(rng, taxa_mix)]);

        int age = rng.uniform_int(1, 95);
        bool male = rng.bernoulli(0.5);
        row.push_back(std::to_string(age) + "/" + (male ? "M" : "F"));

        double risk_p = carrier ? 0.5 : 0.25;
        row.push_back(rng.bernoulli(risk_p) ? "Yes" : "No");
        row.push_back(rng.bernoulli(risk_p) ? "Yes" : "No");
        row.push_back(rng.bernoulli(risk_p) ? "Yes" : "No");

        const std::vector<double> freq_probs = carrier
                                                   ? std::vector<double>{0.1, 0.2, 0.3, 0.4}
                                                   : std::vector<double>{0.4, 0.3, 0.2, 0.1};
        row.push_back(freq_labels[pick_categorical(rng, freq_probs)]);

        CleanRecord rec;  // used only for the realized-label recount
        for (const auto& abx : schema.antibiotics) {
            double p_r = sigmoid(kBaseLogOdds + config.signal_strength * propensity);
            int cell;  // 0=S 1=I 2=R
            if (rng.bernoulli(p_r))
                cell = 2;
            else
                cell = rng.bernoulli(kIntermediateGivenNotR) ? 1 : 0;
            if (config.noise_rate > 0.0 && rng.bernoulli(config.noise_rate))
                cell = (cell + 1 + static_cast<int>(rng.below(2))) % 3;
            row.push_back(sir[cell]);
            rec.antibiogram[abx] =
                cell == 0 ? Susceptibility::S : (cell == 1 ? Susceptibility::I : Susceptibility::R);
        }
        row.push_back("");  // Notes (dropped by cleaning)

        out.labels.push_back(mdr_label(family_indicators(rec, fmap), 3));
        out.carrier.push_back(carrier ? 1 : 0);
        rows.push_back(std::move(row));
    }

    out.csv = write_csv(header, rows);
    out.metadata = json{{"generator", "mdrkit-synth"},
                        {"rng", "splitmix64"},
                        {"substreams", "per-record counter-derived"},
                        {"config", config.to_json()}};
    return out;
}

}  // namespace mdrkit
