#include "mdrkit/features.hpp"

#include <set>

#include "mdrkit/errors.hpp"

namespace mdrkit {

FamilyMap FamilyMap::defaults() {
    FamilyMap f;
    f.families = {
        {"beta_lactams",
         {"Amoxicillin", "AmoxicillinClavulanate", "Cefotaxime", "Ceftazidime", "Imipenem"}},
        {"aminoglycosides", {"Gentamicin", "Amikacin", "Tobramycin"}},
        {"quinolones", {"Ciprofloxacin", "Ofloxacin", "NalidixicAcid"}},
        {"chloramphenicol", {"Chloramphenicol"}},
        {"co_trimoxazole", {"CoTrimoxazole"}},
        {"furanes", {"Nitrofurantoin"}},
        {"colistin", {"Colistin"}},
    };
    return f;
}

FamilyMap FamilyMap::from_json(const json& j) {
    FamilyMap f;
    try {
        for (const auto& [family, members] : j.items())
            f.families.emplace_back(family, members.get<std::vector<std::string>>());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("family map: ") + e.what());
    }
    return f;
}

json FamilyMap::to_json() const {
    json j = json::object();
    for (const auto& [family, members] : families) j[family] = members;
    return j;
}

void FamilyMap::validate(const SchemaConfig& schema) const {
    if (families.empty()) throw ConfigError("family map: no families defined");
    std::set<std::string> seen;
    for (const auto& [family, members] : families) {
        if (members.empty()) throw ConfigError("family map: family '" + family + "' is empty");
        for (const auto& abx : members)
            if (!seen.insert(abx).second)
                throw ConfigError("family map: antibiotic '" + abx +
                                  "' assigned to more than one family");
    }
    for (const auto& abx : schema.antibiotics)
        if (!seen.count(abx))
            throw ConfigError("family map: antibiotic '" + abx + "' not assigned to any family");
}

std::vector<std::string> FamilyMap::family_order() const {
    std::vector<std::string> order;
    order.reserve(families.size());
    for (const auto& [family, members] : families) order.push_back(family);
    return order;
}

std::map<std::string, std::string> FamilyMap::reverse_index() const {
    std::map<std::string, std::string> idx;
    for (const auto& [family, members] : families)
        for (const auto& abx : members) idx[abx] = family;
    return idx;
}

std::map<std::string, int> family_indicators(const CleanRecord& record, const FamilyMap& fmap) {
    auto reverse = fmap.reverse_index();
    std::map<std::string, int> out;
    for (const auto& [family, members] : fmap.families) out[family] = 0;
    for (const auto& [abx, result] : record.antibiogram) {
        auto it = reverse.find(abx);
        if (it == reverse.end())
            throw DataError("family_indicators: antibiotic '" + abx + "' not in family map");
        if (result == Susceptibility::R) out[it->second] = 1;
    }
    return out;
}

int mdr_label(const std::map<std::string, int>& indicators, int threshold) {
    if (threshold < 1) throw ConfigError("mdr_label: threshold must be >= 1");
    int sum = 0;
    for (const auto& [family, v] : indicators) sum += v;
    return sum >= threshold ? 1 : 0;
}

LabeledDataset encode_dataset(const std::vector<CleanRecord>& records, const FamilyMap& fmap,
                              const SchemaConfig& schema, int mdr_threshold) {
    if (records.empty()) throw EmptyDatasetError("encode_dataset: no records");
    fmap.validate(schema);

    LabeledDataset ds;
    ds.mdr_threshold = mdr_threshold;
    ds.family_order = fmap.family_order();

    auto add_name = [&](const std::string& name, bool categorical) {
        ds.feature_names.push_back(name);
        ds.categorical_mask.push_back(categorical);
    };
    add_name("age", false);
    add_name("gender=male", true);
    add_name("gender=female", true);
    add_name("diabetes", true);
    add_name("hypertension", true);
    add_name("prior_hospitalization", true);
    add_name("infection_frequency", true);
    for (const auto& taxon : schema.canonical_taxa) add_name("species=" + taxon, true);
    for (const auto& abx : schema.antibiotics) add_name(abx, true);
    for (const auto& family : ds.family_order) add_name("family:" + family, true);

    ds.X.reserve(records.size());
    ds.labels.reserve(records.size());
    for (const auto& rec : records) {
        std::vector<double> x;
        x.reserve(ds.feature_names.size());
        x.push_back(static_cast<double>(rec.age));
        x.push_back(rec.gender == Gender::Male ? 1.0 : 0.0);
        x.push_back(rec.gender == Gender::Female ? 1.0 : 0.0);
        x.push_back(rec.diabetes ? 1.0 : 0.0);
        x.push_back(rec.hypertension ? 1.0 : 0.0);
        x.push_back(rec.prior_hospitalization ? 1.0 : 0.0);
        x.push_back(static_cast<double>(rec.infection_frequency));
        for (const auto& taxon : schema.canonical_taxa)
            x.push_back(rec.species == taxon ? 1.0 : 0.0);
        for (const auto& abx : schema.antibiotics) {
            auto it = rec.antibiogram.find(abx);
            if (it == rec.antibiogram.end())
                throw DataError("encode_dataset: record missing antibiotic '" + abx + "'");
            switch (it->second) {
                case Susceptibility::S: x.push_back(0.0); break;
                case Susceptibility::I: x.push_back(1.0); break;
                case Susceptibility::R: x.push_back(2.0); break;
            }
        }
        auto indicators = family_indicators(rec, fmap);
        std::vector<int> ind_row;
        ind_row.reserve(ds.family_order.size());
        for (const auto& family : ds.family_order) {
            int v = indicators.at(family);
            x.push_back(static_cast<double>(v));
            ind_row.push_back(v);
        }
        ds.labels.push_back(mdr_label(indicators, mdr_threshold));
        ds.family_indicators.push_back(std::move(ind_row));
        ds.X.push_back(std::move(x));
    }
    return ds;
}

json LabeledDataset::to_json() const {
    json j;
    j["feature_names"] = feature_names;
    j["X"] = X;
    j["labels"] = labels;
    j["family_indicators"] = family_indicators;
    j["family_order"] = family_order;
    j["mdr_threshold"] = mdr_threshold;
    json mask = json::array();
    for (bool b : categorical_mask) mask.push_back(b);
    j["categorical_mask"] = mask;
    return j;
}

LabeledDataset LabeledDataset::from_json(const json& j) {
    LabeledDataset ds;
    try {
        ds.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        ds.X = j.at("X").get<Matrix>();
        ds.labels = j.at("labels").get<std::vector<int>>();
        ds.family_indicators = j.at("family_indicators").get<std::vector<std::vector<int>>>();
        ds.family_order = j.at("family_order").get<std::vector<std::string>>();
        ds.mdr_threshold = j.at("mdr_threshold").get<int>();
        for (const auto& b : j.at("categorical_mask")) ds.categorical_mask.push_back(b.get<bool>());
    } catch (const json::exception& e) {
        throw ParseError(std::string("dataset: ") + e.what());
    }
    return ds;
}

}  // namespace mdrkit
