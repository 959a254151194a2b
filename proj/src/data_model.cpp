#include "mdrkit/data_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "mdrkit/errors.hpp"

namespace mdrkit {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

const char* susceptibility_name(Susceptibility s) {
    switch (s) {
        case Susceptibility::S: return "S";
        case Susceptibility::I: return "I";
        case Susceptibility::R: return "R";
    }
    return "?";
}

std::optional<Susceptibility> try_parse_susceptibility(std::string_view raw) {
    std::string t = trim(raw);
    if (t.size() != 1) return std::nullopt;
    switch (std::toupper(static_cast<unsigned char>(t[0]))) {
        case 'S': return Susceptibility::S;
        case 'I': return Susceptibility::I;
        case 'R': return Susceptibility::R;
        default: return std::nullopt;
    }
}

const std::string* RawRecord::find(std::string_view column) const {
    for (const auto& [name, value] : cells)
        if (name == column) return &value;
    return nullptr;
}

// ---------------------------------------------------------------------------
// SchemaConfig

SchemaConfig SchemaConfig::defaults() {
    SchemaConfig s;
    s.column_map = {
        {"species", "Souches"},
        {"age_gender", "Age_Gender"},
        {"diabetes", "Diabetes"},
        {"hypertension", "Hypertension"},
        {"prior_hospitalization", "Hospital_before"},
        {"infection_frequency", "Infection_frequency"},
    };
    s.canonical_taxa = {
        "EscherichiaColi",      "KlebsiellaPneumoniae", "PseudomonasAeruginosa",
        "StaphylococcusAureus", "EnterococcusFaecalis", "ProteusMirabilis",
        "EnterobacterCloacae",  "AcinetobacterBaumannii", "CitrobacterFreundii",
    };
    s.species_aliases = {
        {"e.coli", "EscherichiaColi"},
        {"e coli", "EscherichiaColi"},
        {"escherichia coli", "EscherichiaColi"},
        {"k.pneumoniae", "KlebsiellaPneumoniae"},
        {"klebsiella pneumoniae", "KlebsiellaPneumoniae"},
        {"p.aeruginosa", "PseudomonasAeruginosa"},
        {"pseudomonas aeruginosa", "PseudomonasAeruginosa"},
        {"s.aureus", "StaphylococcusAureus"},
        {"staphylococcus aureus", "StaphylococcusAureus"},
        {"e.faecalis", "EnterococcusFaecalis"},
        {"enterococcus faecalis", "EnterococcusFaecalis"},
        {"p.mirabilis", "ProteusMirabilis"},
        {"proteus mirabilis", "ProteusMirabilis"},
        {"e.cloacae", "EnterobacterCloacae"},
        {"enterobacter cloacae", "EnterobacterCloacae"},
        {"a.baumannii", "AcinetobacterBaumannii"},
        {"acinetobacter baumannii", "AcinetobacterBaumannii"},
        {"c.freundii", "CitrobacterFreundii"},
        {"citrobacter freundii", "CitrobacterFreundii"},
    };
    s.antibiotics = {
        "Amoxicillin",    "AmoxicillinClavulanate", "Cefotaxime",   "Ceftazidime",
        "Imipenem",       "Gentamicin",             "Amikacin",     "Tobramycin",
        "Ciprofloxacin",  "Ofloxacin",              "NalidixicAcid", "Chloramphenicol",
        "CoTrimoxazole",  "Nitrofurantoin",         "Colistin",
    };
    s.infection_frequency_map = {{"never", 0}, {"rare", 1}, {"sometimes", 2}, {"often", 3}};
    s.drop_columns = {"ID", "Name", "Address", "Notes"};
    return s;
}

void SchemaConfig::validate() const {
    if (canonical_taxa.empty()) throw ConfigError("schema: canonical_taxa must be non-empty");
    if (antibiotics.empty()) throw ConfigError("schema: antibiotics must be non-empty");
    std::set<std::string> seen;
    for (const auto& a : antibiotics)
        if (!seen.insert(a).second) throw ConfigError("schema: duplicate antibiotic id: " + a);
    std::set<std::string> taxa(canonical_taxa.begin(), canonical_taxa.end());
    for (const auto& [alias, taxon] : species_aliases)
        if (!taxa.count(taxon))
            throw ConfigError("schema: alias '" + alias + "' maps outside canonical_taxa: " + taxon);
    for (const char* field : {"species", "age_gender", "diabetes", "hypertension",
                              "prior_hospitalization", "infection_frequency"})
        if (!column_map.count(field))
            throw ConfigError(std::string("schema: column_map missing logical field: ") + field);
    for (const auto& [raw, level] : infection_frequency_map)
        if (level < 0 || level > 3)
            throw ConfigError("schema: infection_frequency_map['" + raw + "'] outside 0-3");
}

SchemaConfig SchemaConfig::from_json(const json& j) {
    SchemaConfig s;
    try {
        s.column_map = j.at("column_map").get<std::map<std::string, std::string>>();
        s.canonical_taxa = j.at("canonical_taxa").get<std::vector<std::string>>();
        s.antibiotics = j.at("antibiotics").get<std::vector<std::string>>();
        for (const auto& [alias, taxon] : j.at("species_aliases").items())
            s.species_aliases[lower(trim(alias))] = taxon.get<std::string>();
        s.infection_frequency_map =
            j.at("infection_frequency_map").get<std::map<std::string, int>>();
        s.drop_columns = j.at("drop_columns").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("schema: ") + e.what());
    }
    s.validate();
    return s;
}

json SchemaConfig::to_json() const {
    return json{{"column_map", column_map},
                {"species_aliases", species_aliases},
                {"canonical_taxa", canonical_taxa},
                {"antibiotics", antibiotics},
                {"infection_frequency_map", infection_frequency_map},
                {"drop_columns", drop_columns}};
}

const std::string& SchemaConfig::column_for(const std::string& logical_field) const {
    auto it = column_map.find(logical_field);
    if (it == column_map.end())
        throw ConfigError("schema: no column mapped for field: " + logical_field);
    return it->second;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

// One RFC 4180 row; returns false at end of input.
bool next_csv_row(std::string_view bytes, size_t& pos, std::vector<std::string>& out,
                  size_t row_number) {
    out.clear();
    if (pos >= bytes.size()) return false;
    std::string field;
    bool in_quotes = false;
    bool saw_any = false;
    while (pos < bytes.size()) {
        char c = bytes[pos];
        saw_any = true;
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < bytes.size() && bytes[pos + 1] == '"') {
                    field += '"';
                    pos += 2;
                } else {
                    in_quotes = false;
                    ++pos;
                }
            } else {
                field += c;
                ++pos;
            }
        } else if (c == '"') {
            if (!field.empty())
                throw ParseError("row " + std::to_string(row_number) +
                                 ": quote inside unquoted field");
            in_quotes = true;
            ++pos;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
            ++pos;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && pos + 1 < bytes.size() && bytes[pos + 1] == '\n') ++pos;
            ++pos;
            out.push_back(std::move(field));
            return true;
        } else {
            field += c;
            ++pos;
        }
    }
    if (in_quotes)
        throw ParseError("row " + std::to_string(row_number) + ": unterminated quoted field");
    if (saw_any) {
        out.push_back(std::move(field));
        return true;
    }
    return false;
}

std::string csv_quote(const std::string& field) {
    bool needs = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string write_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += csv_quote(header[i]);
    }
    out += '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_quote(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::vector<RawRecord> parse_csv(std::string_view bytes, const SchemaConfig& schema) {
    size_t pos = 0;
    std::vector<std::string> header;
    if (!next_csv_row(bytes, pos, header, 0)) throw ParseError("empty input: no header row");

    std::set<std::string> present(header.begin(), header.end());
    for (const auto& [field, column] : schema.column_map)
        if (!present.count(column))
            throw SchemaError("header missing mapped column '" + column + "' (field: " + field +
                              ")");
    for (const auto& abx : schema.antibiotics)
        if (!present.count(abx)) throw SchemaError("header missing antibiotic column '" + abx + "'");

    std::set<std::string> drop(schema.drop_columns.begin(), schema.drop_columns.end());

    std::vector<RawRecord> records;
    std::vector<std::string> row;
    size_t row_number = 1;
    while (next_csv_row(bytes, pos, row, row_number)) {
        if (row.size() != header.size())
            throw ParseError("row " + std::to_string(row_number) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(row.size()));
        RawRecord rec;
        rec.row_index = row_number;
        for (size_t i = 0; i < header.size(); ++i)
            if (!drop.count(header[i])) rec.cells.emplace_back(header[i], row[i]);
        records.push_back(std::move(rec));
        ++row_number;
    }
    return records;
}

// ---------------------------------------------------------------------------
// Cleaning

std::optional<std::string> try_normalize_species(std::string_view raw, const SchemaConfig& schema) {
    std::string key = lower(trim(raw));
    if (key.empty()) return std::nullopt;
    auto it = schema.species_aliases.find(key);
    if (it != schema.species_aliases.end()) return it->second;
    for (const auto& taxon : schema.canonical_taxa)
        if (lower(taxon) == key) return taxon;
    return std::nullopt;
}

std::string normalize_species(std::string_view raw, const SchemaConfig& schema) {
    auto r = try_normalize_species(raw, schema);
    if (!r) throw DataError("unresolvable species: '" + std::string(raw) + "'");
    return *r;
}

const char* drop_reason_name(DropReason r) {
    switch (r) {
        case DropReason::MissingValue: return "missing_value";
        case DropReason::UnresolvableSpecies: return "unresolvable_species";
        case DropReason::InvalidAgeGender: return "invalid_age_gender";
        case DropReason::AgeOutOfRange: return "age_out_of_range";
        case DropReason::InvalidBoolean: return "invalid_boolean";
        case DropReason::InvalidInfectionFrequency: return "invalid_infection_frequency";
        case DropReason::InvalidSusceptibility: return "invalid_susceptibility";
    }
    return "unknown";
}

namespace {

std::optional<bool> parse_yes_no(std::string_view raw) {
    std::string t = lower(trim(raw));
    if (t == "yes" || t == "y" || t == "1" || t == "true") return true;
    if (t == "no" || t == "n" || t == "0" || t == "false") return false;
    return std::nullopt;
}

std::optional<int> parse_int(std::string_view s) {
    std::string t = trim(s);
    int value = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
    return value;
}

std::optional<Gender> parse_gender_token(std::string_view raw) {
    std::string t = lower(trim(raw));
    if (t == "m" || t == "male") return Gender::Male;
    if (t == "f" || t == "female") return Gender::Female;
    return std::nullopt;
}

// "NN/G" or "G/NN", G in {M, F} case-insensitive.
std::optional<std::pair<int, Gender>> parse_age_gender(std::string_view raw) {
    std::string t = trim(raw);
    size_t slash = t.find('/');
    if (slash == std::string::npos || t.find('/', slash + 1) != std::string::npos)
        return std::nullopt;
    std::string a = trim(t.substr(0, slash));
    std::string b = trim(t.substr(slash + 1));
    if (auto age = parse_int(a)) {
        if (auto g = parse_gender_token(b)) return std::make_pair(*age, *g);
        return std::nullopt;
    }
    if (auto age = parse_int(b)) {
        if (auto g = parse_gender_token(a)) return std::make_pair(*age, *g);
    }
    return std::nullopt;
}

}  // namespace

std::variant<CleanRecord, DropReason> clean_record(const RawRecord& raw,
                                                   const SchemaConfig& schema) {
    CleanRecord rec;

    auto cell = [&](const std::string& logical) -> const std::string* {
        return raw.find(schema.column_for(logical));
    };

    const std::string* species = cell("species");
    if (!species || trim(*species).empty()) return DropReason::MissingValue;
    auto taxon = try_normalize_species(*species, schema);
    if (!taxon) return DropReason::UnresolvableSpecies;
    rec.species = *taxon;

    const std::string* age_gender = cell("age_gender");
    if (!age_gender || trim(*age_gender).empty()) return DropReason::MissingValue;
    auto ag = parse_age_gender(*age_gender);
    if (!ag) return DropReason::InvalidAgeGender;
    if (ag->first < 0 || ag->first > 120) return DropReason::AgeOutOfRange;
    rec.age = ag->first;
    rec.gender = ag->second;

    struct BoolField {
        const char* logical;
        bool CleanRecord::* member;
    };
    for (const auto& f : {BoolField{"diabetes", &CleanRecord::diabetes},
                          BoolField{"hypertension", &CleanRecord::hypertension},
                          BoolField{"prior_hospitalization", &CleanRecord::prior_hospitalization}}) {
        const std::string* v = cell(f.logical);
        if (!v || trim(*v).empty()) return DropReason::MissingValue;
        auto b = parse_yes_no(*v);
        if (!b) return DropReason::InvalidBoolean;
        rec.*(f.member) = *b;
    }

    const std::string* freq = cell("infection_frequency");
    if (!freq || trim(*freq).empty()) return DropReason::MissingValue;
    {
        std::string key = lower(trim(*freq));
        auto it = schema.infection_frequency_map.find(key);
        if (it != schema.infection_frequency_map.end()) {
            rec.infection_frequency = it->second;
        } else if (auto digit = parse_int(key); digit && *digit >= 0 && *digit <= 3) {
            rec.infection_frequency = *digit;
        } else {
            return DropReason::InvalidInfectionFrequency;
        }
    }

    for (const auto& abx : schema.antibiotics) {
        const std::string* v = raw.find(abx);
        if (!v || trim(*v).empty()) return DropReason::MissingValue;
        auto s = try_parse_susceptibility(*v);
        if (!s) return DropReason::InvalidSusceptibility;
        rec.antibiogram[abx] = *s;
    }
    return rec;
}

CleanResult clean_all(const std::vector<RawRecord>& rows, const SchemaConfig& schema) {
    CleanResult result;
    result.report.rows_in = rows.size();
    for (const auto& raw : rows) {
        auto cleaned = clean_record(raw, schema);
        if (std::holds_alternative<CleanRecord>(cleaned)) {
            result.records.push_back(std::get<CleanRecord>(std::move(cleaned)));
        } else {
            ++result.report.dropped[drop_reason_name(std::get<DropReason>(cleaned))];
        }
    }
    result.report.rows_out = result.records.size();
    return result;
}

json CleaningReport::to_json() const {
    return json{{"rows_in", rows_in}, {"rows_out", rows_out}, {"dropped", dropped}};
}

std::vector<std::pair<std::string, std::string>> render_cells(const CleanRecord& rec,
                                                              const SchemaConfig& schema) {
    std::vector<std::pair<std::string, std::string>> cells;
    cells.emplace_back(schema.column_for("species"), rec.species);
    cells.emplace_back(schema.column_for("age_gender"),
                       std::to_string(rec.age) + "/" +
                           (rec.gender == Gender::Male ? "M" : "F"));
    cells.emplace_back(schema.column_for("diabetes"), rec.diabetes ? "Yes" : "No");
    cells.emplace_back(schema.column_for("hypertension"), rec.hypertension ? "Yes" : "No");
    cells.emplace_back(schema.column_for("prior_hospitalization"),
                       rec.prior_hospitalization ? "Yes" : "No");
    cells.emplace_back(schema.column_for("infection_frequency"),
                       std::to_string(rec.infection_frequency));
    for (const auto& abx : schema.antibiotics)
        cells.emplace_back(abx, susceptibility_name(rec.antibiogram.at(abx)));
    return cells;
}

std::string csv_header_for(const SchemaConfig& schema) {
    CleanRecord dummy;
    for (const auto& abx : schema.antibiotics) dummy.antibiogram[abx] = Susceptibility::S;
    dummy.species = schema.canonical_taxa.front();
    auto cells = render_cells(dummy, schema);
    std::string out;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i].first;
    }
    return out;
}

}  // namespace mdrkit
