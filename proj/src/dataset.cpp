#include "entrank/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "entrank/errors.hpp"

namespace entrank {

namespace {

constexpr std::size_t kMaxListedProblems = 20;

class ProblemList {
public:
    explicit ProblemList(std::string source) : source_(std::move(source)) {}

    void add(std::size_t line, const std::string& what) {
        ++count_;
        if (listed_.size() >= kMaxListedProblems) return;
        listed_.push_back(line ? "line " + std::to_string(line) + ": " + what : what);
    }

    void throw_if_any() const {
        if (count_ == 0) return;
        std::string msg = source_ + ": " + std::to_string(count_) + " malformed row(s)";
        for (const auto& p : listed_) msg += "\n  " + p;
        if (count_ > listed_.size()) msg += "\n  ...";
        throw ValidationError(msg);
    }

private:
    std::string source_;
    std::vector<std::string> listed_;
    std::size_t count_ = 0;
};

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::optional<std::int64_t> parse_label(const std::string& text) {
    const std::string t = trim(text);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || v < 0) return std::nullopt;
    return v;
}

std::optional<std::size_t> column_index(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == name) return i;
    }
    return std::nullopt;
}

// Encodes and reports errors against `line`; empty sequences are rejected.
std::optional<EncodedSequence> encode_field(const std::string& text, bool allow_padding, std::size_t line,
                                            ProblemList& problems) {
    const std::string t = trim(text);
    if (t.empty()) {
        problems.add(line, "empty sequence");
        return std::nullopt;
    }
    try {
        return encode(t, allow_padding);
    } catch (const ValidationError& e) {
        problems.add(line, e.what());
        return std::nullopt;
    }
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

}  // namespace

DatasetFormat guess_format(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".fa" || ext == ".fasta" || ext == ".fna" || ext == ".fas") return DatasetFormat::Fasta;
    return DatasetFormat::Csv;
}

std::filesystem::path labels_path_for(const std::filesystem::path& fasta) {
    auto p = fasta;
    p.replace_extension(".labels.csv");
    return p;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (quoted) throw ValidationError("unterminated quoted field");
    out.push_back(std::move(cur));
    return out;
}

std::string csv_escape(const std::string& field) {
    const bool needs = field.find_first_of(",\"\n\r") != std::string::npos ||
                       (!field.empty() && (std::isspace(static_cast<unsigned char>(field.front())) ||
                                           std::isspace(static_cast<unsigned char>(field.back()))));
    if (!needs) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

Dataset parse_csv(std::istream& in, const IngestOptions& opts, const std::string& source) {
    Dataset ds;
    ds.format = DatasetFormat::Csv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (!trim(line).empty()) break;
    }
    if (lineno == 0 || trim(line).empty()) throw ValidationError(source + ": missing CSV header");
    try {
        ds.header = split_csv_line(line);
    } catch (const ValidationError& e) {
        throw ValidationError(source + ": line " + std::to_string(lineno) + ": " + e.what());
    }
    const auto seq_col = column_index(ds.header, opts.sequence_col);
    const auto label_col = column_index(ds.header, opts.label_col);
    if (!seq_col || !label_col) {
        throw ValidationError(source + ": header must contain columns '" + opts.sequence_col + "' and '" +
                              opts.label_col + "'");
    }
    ds.sequence_col = *seq_col;
    ds.label_col = *label_col;
    const auto id_col = column_index(ds.header, opts.id_col);

    ProblemList problems(source);
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        try {
            fields = split_csv_line(line);
        } catch (const ValidationError& e) {
            problems.add(lineno, e.what());
            continue;
        }
        if (fields.size() != ds.header.size()) {
            problems.add(lineno, "expected " + std::to_string(ds.header.size()) + " fields, found " +
                                     std::to_string(fields.size()));
            continue;
        }
        DatasetRecord rec;
        rec.line = lineno;
        rec.id = id_col ? trim(fields[*id_col]) : "row" + std::to_string(ds.records.size() + 1);
        if (rec.id.empty()) {
            problems.add(lineno, "empty id");
            continue;
        }
        if (!seen.insert(rec.id).second) {
            problems.add(lineno, "duplicate id '" + rec.id + "'");
            continue;
        }
        const auto label = parse_label(fields[ds.label_col]);
        if (!label) {
            problems.add(lineno, "label '" + fields[ds.label_col] + "' is not a non-negative integer");
            continue;
        }
        auto seq = encode_field(fields[ds.sequence_col], opts.allow_padding, lineno, problems);
        if (!seq) continue;
        rec.label = *label;
        rec.sequence = std::move(*seq);
        rec.fields = std::move(fields);
        ds.records.push_back(std::move(rec));
    }
    problems.throw_if_any();
    return ds;
}

Dataset parse_fasta(std::istream& fasta, std::istream& labels, const IngestOptions& opts, const std::string& source) {
    // Sidecar first: id -> label.
    const std::string sidecar = source + " labels";
    ProblemList label_problems(sidecar);
    std::unordered_map<std::string, std::int64_t> label_of;
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> id_idx, label_idx;
    while (std::getline(labels, line)) {
        ++lineno;
        strip_cr(line);
        if (trim(line).empty()) continue;
        std::vector<std::string> f;
        try {
            f = split_csv_line(line);
        } catch (const ValidationError& e) {
            label_problems.add(lineno, e.what());
            continue;
        }
        if (!id_idx) {
            id_idx = column_index(f, "id");
            label_idx = column_index(f, opts.label_col);
            if (!id_idx || !label_idx) {
                throw ValidationError(sidecar + ": header must contain columns 'id' and '" + opts.label_col + "'");
            }
            continue;
        }
        if (f.size() <= std::max(*id_idx, *label_idx)) {
            label_problems.add(lineno, "missing fields");
            continue;
        }
        const auto label = parse_label(f[*label_idx]);
        if (!label) {
            label_problems.add(lineno, "label '" + f[*label_idx] + "' is not a non-negative integer");
            continue;
        }
        if (!label_of.emplace(trim(f[*id_idx]), *label).second) {
            label_problems.add(lineno, "duplicate id '" + trim(f[*id_idx]) + "'");
        }
    }
    if (!id_idx) throw ValidationError(sidecar + ": missing CSV header");
    label_problems.throw_if_any();

    Dataset ds;
    ds.format = DatasetFormat::Fasta;
    ProblemList problems(source);
    std::unordered_set<std::string> seen;
    std::optional<DatasetRecord> cur;
    std::string seq_text;

    auto finish = [&] {
        if (!cur) return;
        if (auto seq = encode_field(seq_text, opts.allow_padding, cur->line, problems)) {
            auto it = label_of.find(cur->id);
            if (it == label_of.end()) {
                problems.add(cur->line, "no label for id '" + cur->id + "'");
            } else {
                cur->label = it->second;
                cur->sequence = std::move(*seq);
                ds.records.push_back(std::move(*cur));
            }
        }
        cur.reset();
        seq_text.clear();
    };

    lineno = 0;
    while (std::getline(fasta, line)) {
        ++lineno;
        strip_cr(line);
        if (!line.empty() && line.front() == '>') {
            finish();
            std::istringstream hdr(line.substr(1));
            std::string id;
            hdr >> id;
            if (id.empty()) {
                problems.add(lineno, "record header without an id");
                continue;
            }
            if (!seen.insert(id).second) {
                problems.add(lineno, "duplicate id '" + id + "'");
                continue;
            }
            cur = DatasetRecord{};
            cur->id = id;
            cur->line = lineno;
        } else if (!trim(line).empty()) {
            if (!cur) {
                problems.add(lineno, "sequence data outside a record");
                continue;
            }
            seq_text += trim(line);
        }
    }
    finish();
    for (const auto& [id, label] : label_of) {
        if (!seen.count(id)) problems.add(0, "label given for unknown id '" + id + "'");
    }
    problems.throw_if_any();
    return ds;
}

Dataset ingest(const std::filesystem::path& path, const IngestOptions& opts) {
    const DatasetFormat fmt = opts.format.value_or(guess_format(path));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    if (fmt == DatasetFormat::Csv) return parse_csv(in, opts, path.string());
    const auto labels_path = opts.labels_path.empty() ? labels_path_for(path) : opts.labels_path;
    std::ifstream labels(labels_path, std::ios::binary);
    if (!labels) throw IoError("cannot open labels sidecar " + labels_path.string());
    return parse_fasta(in, labels, opts, path.string());
}

void write_dataset(const std::filesystem::path& path, const Dataset& ds, const std::vector<EncodedSequence>& sequences) {
    if (sequences.size() != ds.records.size()) throw ValidationError("one output sequence per record required");
    if (ds.format == DatasetFormat::Csv) {
        auto out = open_out(path);
        for (std::size_t i = 0; i < ds.header.size(); ++i) out << (i ? "," : "") << csv_escape(ds.header[i]);
        out << '\n';
        for (std::size_t r = 0; r < ds.records.size(); ++r) {
            const auto& f = ds.records[r].fields;
            for (std::size_t i = 0; i < f.size(); ++i) {
                out << (i ? "," : "") << (i == ds.sequence_col ? decode(sequences[r]) : csv_escape(f[i]));
            }
            out << '\n';
        }
        if (!out) throw IoError("failed writing " + path.string());
        return;
    }
    auto out = open_out(path);
    auto labels = open_out(labels_path_for(path));
    labels << "id,label\n";
    for (std::size_t r = 0; r < ds.records.size(); ++r) {
        out << '>' << ds.records[r].id << '\n' << decode(sequences[r]) << '\n';
        labels << csv_escape(ds.records[r].id) << ',' << ds.records[r].label << '\n';
    }
    if (!out || !labels) throw IoError("failed writing " + path.string());
}

}  // namespace entrank
