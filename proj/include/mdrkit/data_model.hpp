#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mdrkit/jsonio.hpp"

namespace mdrkit {

enum class Susceptibility { S, I, R };

const char* susceptibility_name(Susceptibility s);
std::optional<Susceptibility> try_parse_susceptibility(std::string_view raw);

enum class Gender { Male, Female };

// One CSV data row with source text kept verbatim (drop columns removed).
struct RawRecord {
    size_t row_index = 0;  // 1-based data row number in the source file
    std::vector<std::pair<std::string, std::string>> cells;

    const std::string* find(std::string_view column) const;
};

// All layout knowledge lives here: column names, species aliases, antibiotic
// panel, frequency vocabulary. A JSON document; defaults below.
struct SchemaConfig {
    std::map<std::string, std::string> column_map;       // logical field -> CSV column
    std::map<std::string, std::string> species_aliases;  // case-folded alias -> canonical taxon
    std::vector<std::string> canonical_taxa;
    std::vector<std::string> antibiotics;  // ids double as CSV column names
    std::map<std::string, int> infection_frequency_map;
    std::vector<std::string> drop_columns;

    static SchemaConfig defaults();
    static SchemaConfig from_json(const json& j);
    json to_json() const;
    void validate() const;  // throws ConfigError

    const std::string& column_for(const std::string& logical_field) const;
};

struct CleanRecord {
    std::string species;
    int age = 0;
    Gender gender = Gender::Male;
    bool diabetes = false;
    bool hypertension = false;
    bool prior_hospitalization = false;
    int infection_frequency = 0;
    std::map<std::string, Susceptibility> antibiogram;

    bool operator==(const CleanRecord&) const = default;
};

enum class DropReason {
    MissingValue,
    UnresolvableSpecies,
    InvalidAgeGender,
    AgeOutOfRange,
    InvalidBoolean,
    InvalidInfectionFrequency,
    InvalidSusceptibility,
};

const char* drop_reason_name(DropReason r);

struct CleaningReport {
    size_t rows_in = 0;
    size_t rows_out = 0;
    std::map<std::string, size_t> dropped;  // reason code -> count

    json to_json() const;
};

// Parses UTF-8 RFC 4180 CSV with a header row. The header is validated
// against the schema (every mapped column and every antibiotic column must
// exist); drop_columns are removed from the emitted records.
std::vector<RawRecord> parse_csv(std::string_view bytes, const SchemaConfig& schema);

// Trim/case-fold, then alias table; canonical names map to themselves.
// Throws DataError for anything unresolvable.
std::string normalize_species(std::string_view raw, const SchemaConfig& schema);
std::optional<std::string> try_normalize_species(std::string_view raw, const SchemaConfig& schema);

// Per-row cleaning never throws; every failure becomes a typed drop reason.
std::variant<CleanRecord, DropReason> clean_record(const RawRecord& raw,
                                                   const SchemaConfig& schema);

struct CleanResult {
    std::vector<CleanRecord> records;
    CleaningReport report;
};

CleanResult clean_all(const std::vector<RawRecord>& rows, const SchemaConfig& schema);

// Renders a CleanRecord back to raw cells under the same schema; cleaning the
// result reproduces the record exactly.
std::vector<std::pair<std::string, std::string>> render_cells(const CleanRecord& rec,
                                                              const SchemaConfig& schema);

// RFC 4180 writer. rows[i] must match header length.
std::string write_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

std::string csv_header_for(const SchemaConfig& schema);
std::string trim(std::string_view s);
std::string lower(std::string_view s);

}  // namespace mdrkit
