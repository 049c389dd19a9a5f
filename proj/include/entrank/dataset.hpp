#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "entrank/seqcore.hpp"

namespace entrank {

enum class DatasetFormat { Csv, Fasta };

struct DatasetRecord {
    std::string id;
    std::int64_t label = 0;
    EncodedSequence sequence;
    std::vector<std::string> fields;  // full CSV row, empty for FASTA input
    std::size_t line = 0;             // 1-based source line of the record
};

struct Dataset {
    DatasetFormat format = DatasetFormat::Csv;
    std::vector<std::string> header;  // CSV only
    std::size_t sequence_col = 0;
    std::size_t label_col = 0;
    std::vector<DatasetRecord> records;
};

struct IngestOptions {
    std::optional<DatasetFormat> format;  // empty: guess from the extension
    std::string sequence_col = "sequence";
    std::string label_col = "label";
    std::string id_col = "id";            // optional in CSV; row numbers otherwise
    std::filesystem::path labels_path;    // FASTA sidecar; default from labels_path_for
    bool allow_padding = false;           // accept '.' as the padding token
};

DatasetFormat guess_format(const std::filesystem::path& path);

/// `reads.fa` -> `reads.labels.csv`.
std::filesystem::path labels_path_for(const std::filesystem::path& fasta);

/// Splits one CSV line (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_line(const std::string& line);

/// Quotes a field when it contains a comma, quote or whitespace edge.
std::string csv_escape(const std::string& field);

/// Parsers collect every malformed row and throw one ValidationError that
/// lists them with line numbers. Duplicate IDs are malformed rows.
Dataset parse_csv(std::istream& in, const IngestOptions& opts, const std::string& source = "<csv>");
Dataset parse_fasta(std::istream& fasta, std::istream& labels, const IngestOptions& opts,
                    const std::string& source = "<fasta>");

/// Reads a dataset file; IoError when a file cannot be opened.
Dataset ingest(const std::filesystem::path& path, const IngestOptions& opts = {});

/// Writes `ds` with each record's sequence replaced by `sequences[i]`, in the
/// input's format. FASTA output also writes the labels sidecar. Padding is
/// rendered as '.'.
void write_dataset(const std::filesystem::path& path, const Dataset& ds,
                   const std::vector<EncodedSequence>& sequences);

}  // namespace entrank
