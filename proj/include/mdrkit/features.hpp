#pragma once

#include <map>
#include <string>
#include <vector>

#include "mdrkit/data_model.hpp"
#include "mdrkit/jsonio.hpp"

namespace mdrkit {

using Matrix = std::vector<std::vector<double>>;

// Therapeutic family grouping. Families are pairwise disjoint and together
// cover every antibiotic in the schema.
struct FamilyMap {
    // ordered: iteration order defines the family feature block
    std::vector<std::pair<std::string, std::vector<std::string>>> families;

    static FamilyMap defaults();
    static FamilyMap from_json(const json& j);
    json to_json() const;
    void validate(const SchemaConfig& schema) const;  // throws ConfigError

    std::vector<std::string> family_order() const;
    // antibiotic id -> family id
    std::map<std::string, std::string> reverse_index() const;
};

// Indicator is 1 iff at least one antibiotic in the family tested R.
// I and S both count as non-resistant.
std::map<std::string, int> family_indicators(const CleanRecord& record, const FamilyMap& fmap);

// 1 iff the number of resistant families reaches the threshold (default 3).
int mdr_label(const std::map<std::string, int>& indicators, int threshold = 3);

struct LabeledDataset {
    Matrix X;
    std::vector<std::string> feature_names;
    std::vector<int> labels;
    std::vector<std::vector<int>> family_indicators;  // aligned with family_order
    std::vector<std::string> family_order;
    int mdr_threshold = 3;
    // true where the encoded feature is categorical/binary (everything but age)
    std::vector<bool> categorical_mask;

    json to_json() const;
    static LabeledDataset from_json(const json& j);
};

// Feature layout, in order: age; gender one-hot; three risk binaries;
// infection_frequency; species one-hot; per-antibiotic ordinal S=0/I=1/R=2;
// per-family resistance indicators.
LabeledDataset encode_dataset(const std::vector<CleanRecord>& records, const FamilyMap& fmap,
                              const SchemaConfig& schema, int mdr_threshold = 3);

}  // namespace mdrkit
