#include "entrank/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "entrank/entropy.hpp"
#include "entrank/errors.hpp"
#include "entrank/parallel.hpp"
#include "entrank/random.hpp"

namespace entrank::cli {

namespace {

constexpr std::size_t kMaxListedFailures = 10;

std::string decimal(const BigInt& v) { return v.str(); }

// Runs fn(i) over all records, collecting per-record failures; throws one
// ValidationError naming them if any record failed.
template <typename Fn>
void for_each_record(const Dataset& ds, unsigned threads, const char* what, Fn&& fn) {
    std::mutex mu;
    std::map<std::size_t, std::string> failures;
    parallel_for(ds.records.size(), threads, [&](std::size_t i) {
        try {
            fn(i);
        } catch (const ValidationError& e) {
            std::lock_guard lock(mu);
            failures.emplace(i, e.what());
        }
    });
    if (failures.empty()) return;
    std::string msg = std::string(what) + " failed for " + std::to_string(failures.size()) + " of " +
                      std::to_string(ds.records.size()) + " record(s)";
    std::size_t listed = 0;
    for (const auto& [i, text] : failures) {
        if (listed++ == kMaxListedFailures) {
            msg += "\n  ...";
            break;
        }
        msg += "\n  " + ds.records[i].id + ": " + text;
    }
    throw ValidationError(msg);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

// Writes through `body` to --out, or to `fallback` when no path was given.
template <typename Body>
void emit(const std::string& out_path, std::ostream& fallback, Body&& body) {
    if (out_path.empty()) {
        body(fallback);
        return;
    }
    auto out = open_for_write(out_path);
    body(out);
    out.flush();
    if (!out) throw IoError("failed writing " + out_path);
}

std::string pick_name(Pick p) { return p == Pick::Max ? "max" : "min"; }

}  // namespace

std::string format_real(double x, bool full_precision) {
    char buf[64];
    if (x == 0.0) x = 0.0;  // no "-0.000000"
    std::snprintf(buf, sizeof buf, full_precision ? "%.17g" : "%.6f", x);
    return buf;
}

BuildDistReport cmd_build_dist(std::size_t T, unsigned n, std::size_t N, const std::filesystem::path& cache_dir,
                               const BuildOptions& opts, std::ostream& log) {
    DistributionCache cache(cache_dir);
    BuildDistReport report;
    report.dist = cache.get_or_build(T, n, N, opts, &report.cache_hit);
    report.path = cache.path_for(T, n, N);
    const auto& d = report.dist;
    log << "cache " << (report.cache_hit ? "hit" : "miss") << ": " << report.path.string() << '\n'
        << "T=" << T << " n=" << n << " N=" << N << " lambda=" << decimal(d.meta().lambda) << " c=" << d.meta().c
        << '\n'
        << "distinct_values " << d.distinct_values() << '\n'
        << "total " << decimal(d.total()) << '\n'
        << "min_entropy " << format_real(d.min_entropy(), false) << '\n'
        << "max_entropy " << format_real(d.max_entropy(), false) << '\n';
    return report;
}

RatioResult compute_ratios(const Dataset& ds, const EntropyDistribution& dist, unsigned threads) {
    const auto& m = dist.meta();
    std::vector<std::optional<RatioRow>> rows(ds.records.size());
    for_each_record(ds, threads, "ratio", [&](std::size_t i) {
        const auto& rec = ds.records[i];
        if (rec.sequence.length() < m.T * m.N) return;
        rows[i] = RatioRow{rec.id, rec.label, mean_block_entropy(rec.sequence, m.T, m.n).bits,
                           calculate_ratio(rec.sequence, dist).value, gc_content(rec.sequence)};
    });
    RatioResult out;
    for (auto& r : rows) {
        if (r) {
            out.rows.push_back(std::move(*r));
        } else {
            ++out.skipped;
        }
    }
    return out;
}

void write_ratio_csv(std::ostream& out, const RatioResult& result, bool full_precision) {
    out << "id,label,S,R,GC\n";
    for (const auto& r : result.rows) {
        out << csv_escape(r.id) << ',' << r.label << ',' << format_real(r.S, full_precision) << ','
            << format_real(r.R, full_precision) << ',' << format_real(r.gc, full_precision) << '\n';
    }
}

CropMethod parse_crop_method(const std::string& name) {
    if (name == "basic") return CropMethod::Basic;
    if (name == "random") return CropMethod::Random;
    if (name == "entropy") return CropMethod::Entropy;
    if (name == "kolmogorov") return CropMethod::Kolmogorov;
    if (name == "ratio") return CropMethod::Ratio;
    throw ValidationError("unknown crop method '" + name + "'");
}

std::string to_string(CropMethod m) {
    switch (m) {
        case CropMethod::Basic: return "basic";
        case CropMethod::Random: return "random";
        case CropMethod::Entropy: return "entropy";
        case CropMethod::Kolmogorov: return "kolmogorov";
        case CropMethod::Ratio: return "ratio";
    }
    return "?";
}

std::vector<EncodedSequence> crop_dataset(const Dataset& ds, CropMethod method, const CropConfig& cfg,
                                          const EntropyDistribution* dist, unsigned threads) {
    cfg.validate();
    if (method == CropMethod::Ratio && !dist) throw ValidationError("ratio crop needs a distribution");
    CompressorCache zcache;
    std::vector<EncodedSequence> out(ds.records.size());
    for_each_record(ds, threads, "crop", [&](std::size_t i) {
        const auto& seq = ds.records[i].sequence;
        CropConfig rc = cfg;
        rc.seed = mix_seed(cfg.seed, i);
        Crop crop;
        switch (method) {
            case CropMethod::Basic: crop = basic_crop(seq, rc.target_len); break;
            case CropMethod::Random: crop = random_crop(seq, rc); break;
            case CropMethod::Entropy: crop = entropy_crop(seq, rc, sequence_entropy(seq.tokens(), rc.n)); break;
            case CropMethod::Kolmogorov: crop = kolmogorov_crop(seq, rc, zcache); break;
            case CropMethod::Ratio: {
                // The whole-sequence ratio only matters when there is a window to choose.
                const double whole = seq.length() > rc.target_len ? calculate_ratio(seq, *dist).value : 0.0;
                crop = ratio_crop(seq, rc, whole, *dist);
                break;
            }
        }
        out[i] = crop.sequence.length() < rc.target_len ? pad_or_sample(crop.sequence, rc.target_len)
                                                        : std::move(crop.sequence);
    });
    return out;
}

void cmd_crop(const Dataset& ds, CropMethod method, const CropConfig& cfg, const EntropyDistribution* dist,
              const std::filesystem::path& out_path, const std::string& input_name, unsigned threads) {
    const auto cropped = crop_dataset(ds, method, cfg, dist, threads);
    std::size_t padded = 0;
    for (std::size_t i = 0; i < cropped.size(); ++i) {
        if (ds.records[i].sequence.length() < cfg.target_len) ++padded;
    }
    write_dataset(out_path, ds, cropped);

    nlohmann::ordered_json prov;
    prov["method"] = to_string(method);
    prov["input"] = input_name;
    prov["output"] = out_path.string();
    prov["records"] = cropped.size();
    prov["padded_records"] = padded;
    prov["seed"] = cfg.seed;
    prov["record_seed"] = "splitmix64(seed, record_index)";
    prov["config"] = {
        {"target_len", cfg.target_len}, {"num_candidates", cfg.num_candidates},
        {"offset_ratio", cfg.offset_ratio}, {"alpha", cfg.alpha},
        {"beta", cfg.beta}, {"pick", pick_name(cfg.pick)},
        {"T", cfg.T}, {"n", cfg.n},
        {"N", cfg.N},
    };
    auto sidecar = out_path;
    sidecar += ".provenance.json";
    auto out = open_for_write(sidecar);
    out << prov.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + sidecar.string());
}

ScatterAxis parse_scatter_axis(const std::string& name) {
    if (name == "kolmogorov") return ScatterAxis::Kolmogorov;
    if (name == "entropy") return ScatterAxis::Entropy;
    if (name == "ratio") return ScatterAxis::Ratio;
    throw ValidationError("unknown scatter axis '" + name + "'");
}

ScatterResult compute_scatter(const Dataset& ds, ScatterAxis axis, unsigned n, const EntropyDistribution* dist,
                              unsigned threads) {
    if (axis == ScatterAxis::Ratio && !dist) throw ValidationError("ratio axis needs a distribution");
    if (n == 0 || n > kMaxTupleSize) throw ValidationError("invalid tuple size");
    std::vector<std::optional<ScatterRow>> rows(ds.records.size());
    for_each_record(ds, threads, "scatter", [&](std::size_t i) {
        const auto& rec = ds.records[i];
        const auto& seq = rec.sequence;
        double x = 0.0;
        switch (axis) {
            case ScatterAxis::Kolmogorov: {
                const auto tokens = seq.tokens();
                x = static_cast<double>(deflate_length(std::span<const std::uint8_t>(tokens.data(), tokens.size()))) /
                    static_cast<double>(seq.length());
                break;
            }
            case ScatterAxis::Entropy:
                if (seq.length() < n) return;
                x = sequence_entropy(seq.tokens(), n);
                break;
            case ScatterAxis::Ratio:
                if (seq.length() < dist->meta().T * dist->meta().N) return;
                x = calculate_ratio(seq, *dist).value;
                break;
        }
        rows[i] = ScatterRow{rec.id, rec.label, x, gc_content(seq)};
    });
    ScatterResult out;
    for (auto& r : rows) {
        if (r) {
            out.rows.push_back(std::move(*r));
        } else {
            ++out.skipped;
        }
    }
    return out;
}

void write_scatter_csv(std::ostream& out, const ScatterResult& result, bool full_precision) {
    out << "id,label,x,gc\n";
    for (const auto& r : result.rows) {
        out << csv_escape(r.id) << ',' << r.label << ',' << format_real(r.x, full_precision) << ','
            << format_real(r.gc, full_precision) << '\n';
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Entropy rank ratio for nucleotide sequences", "entrank"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value file mirroring the flags; command-line flags win");

    std::size_t T = 22, N = 1;
    unsigned n = 1;
    CropConfig crop_cfg;
    std::string pick = "max", method = "basic", axis = "ratio", format = "auto", out_path;
    std::string cache_dir = ".entrank-cache", sweep = "n";
    bool full_precision = false;
    IngestOptions ingest_opts;
    std::string labels_path;
    BuildOptions build_opts;
    ProfileConfig profile_cfg;

    app.add_option("--T", T, "block length")->capture_default_str();
    app.add_option("--n", n, "tuple size")->capture_default_str();
    app.add_option("--N", N, "number of blocks averaged")->capture_default_str();
    app.add_option("--target-len", crop_cfg.target_len, "crop length")->capture_default_str();
    app.add_option("--num-candidates", crop_cfg.num_candidates, "candidate windows per record")->capture_default_str();
    app.add_option("--offset-ratio", crop_cfg.offset_ratio, "max offset as a fraction of the slack")
        ->capture_default_str();
    app.add_option("--alpha", crop_cfg.alpha, "weight of the complexity term")->capture_default_str();
    app.add_option("--beta", crop_cfg.beta, "weight of the offset penalty")->capture_default_str();
    app.add_option("--pick", pick, "compressor crop selection")->check(CLI::IsMember({"max", "min"}))
        ->capture_default_str();
    app.add_option("--seed", crop_cfg.seed, "master seed")->capture_default_str();
    app.add_option("--method", method, "crop method")
        ->check(CLI::IsMember({"basic", "random", "entropy", "kolmogorov", "ratio"}))
        ->capture_default_str();
    app.add_option("--axis", axis, "scatter x axis")->check(CLI::IsMember({"kolmogorov", "entropy", "ratio"}))
        ->capture_default_str();
    app.add_option("--cache-dir", cache_dir, "distribution cache directory")->capture_default_str();
    app.add_option("--format", format, "dataset format")->check(CLI::IsMember({"auto", "csv", "fasta"}))
        ->capture_default_str();
    app.add_option("--out", out_path, "output path (stdout when omitted, except crop)");
    app.add_flag("--full-precision", full_precision, "print 17 significant digits instead of 6 decimals");
    app.add_option("--sequence-col", ingest_opts.sequence_col, "CSV sequence column")->capture_default_str();
    app.add_option("--label-col", ingest_opts.label_col, "CSV label column")->capture_default_str();
    app.add_option("--id-col", ingest_opts.id_col, "CSV id column (row numbers if absent)")->capture_default_str();
    app.add_option("--labels", labels_path, "FASTA label sidecar (default <input>.labels.csv)");
    app.add_flag("--allow-padding", ingest_opts.allow_padding, "accept '.' padding in input sequences");
    app.add_option("--threads", build_opts.threads, "worker threads, 0 = all cores")->capture_default_str();
    app.add_option("--partition-cap", build_opts.partition_cap, "refuse builds with more partitions")
        ->capture_default_str();
    app.add_option("--support-cap", build_opts.support_cap, "refuse convolutions with larger support")
        ->capture_default_str();
    app.add_option("--L", profile_cfg.L, "profile sequence length")->capture_default_str();
    app.add_option("--num-sequences", profile_cfg.num_sequences, "profile sample size")->capture_default_str();
    app.add_option("--sweep", sweep, "profile sweep: n (tuple size) or N (block count)")
        ->check(CLI::IsMember({"n", "N"}))
        ->capture_default_str();
    app.add_option("--n-max", profile_cfg.n_max, "upper end of the tuple-size sweep")->capture_default_str();

    std::string input;
    auto* build = app.add_subcommand("build-dist", "build or load the (T, n, N) entropy distribution");
    auto* ratio = app.add_subcommand("ratio", "per-record S, R and GC content");
    auto* crop = app.add_subcommand("crop", "write a cropped copy of a dataset");
    auto* profile = app.add_subcommand("profile", "Monte-Carlo mean entropy profile");
    auto* scatter = app.add_subcommand("scatter", "x axis and GC content per record");
    auto* check = app.add_subcommand("ingest-check", "validate a dataset and summarize it");
    for (auto* sub : {ratio, crop, scatter, check}) sub->add_option("input", input, "dataset file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        crop_cfg.pick = pick == "max" ? Pick::Max : Pick::Min;
        crop_cfg.T = T;
        crop_cfg.n = n;
        crop_cfg.N = N;
        if (format != "auto") ingest_opts.format = format == "csv" ? DatasetFormat::Csv : DatasetFormat::Fasta;
        ingest_opts.labels_path = labels_path;

        auto distribution = [&] {
            return DistributionCache(cache_dir).get_or_build(T, n, N, build_opts);
        };

        if (*build) {
            cmd_build_dist(T, n, N, cache_dir, build_opts, out);
        } else if (*ratio) {
            const auto ds = ingest(input, ingest_opts);
            const auto result = compute_ratios(ds, distribution(), build_opts.threads);
            emit(out_path, out, [&](std::ostream& os) { write_ratio_csv(os, result, full_precision); });
            if (result.skipped) {
                err << "warning: " << result.skipped << " record(s) shorter than N*T=" << N * T << " skipped\n";
            }
        } else if (*crop) {
            if (out_path.empty()) throw ValidationError("crop needs --out");
            const auto m = parse_crop_method(method);
            crop_cfg.validate();
            const auto ds = ingest(input, ingest_opts);
            std::optional<EntropyDistribution> dist;
            if (m == CropMethod::Ratio) {
                if (crop_cfg.target_len < T * N) {
                    throw ValidationError("ratio crop needs target_len >= N*T = " + std::to_string(T * N));
                }
                dist = distribution();
            }
            cmd_crop(ds, m, crop_cfg, dist ? &*dist : nullptr, out_path, input, build_opts.threads);
            err << "wrote " << ds.records.size() << " record(s) to " << out_path << '\n';
        } else if (*profile) {
            profile_cfg.sweep = sweep == "n" ? SweepKind::TupleSize : SweepKind::BlockCount;
            profile_cfg.n = n;
            profile_cfg.seed = crop_cfg.seed;
            profile_cfg.threads = build_opts.threads;
            const auto points = monte_carlo_profiles(profile_cfg);
            emit(out_path, out, [&](std::ostream& os) { write_profile_csv(os, points, full_precision); });
        } else if (*scatter) {
            const auto a = parse_scatter_axis(axis);
            const auto ds = ingest(input, ingest_opts);
            std::optional<EntropyDistribution> dist;
            if (a == ScatterAxis::Ratio) dist = distribution();
            const auto result = compute_scatter(ds, a, n, dist ? &*dist : nullptr, build_opts.threads);
            emit(out_path, out, [&](std::ostream& os) { write_scatter_csv(os, result, full_precision); });
            if (result.skipped) err << "warning: " << result.skipped << " record(s) too short, skipped\n";
        } else if (*check) {
            const auto ds = ingest(input, ingest_opts);
            std::map<std::int64_t, std::size_t> per_label;
            std::size_t min_len = SIZE_MAX, max_len = 0, padded = 0;
            for (const auto& r : ds.records) {
                ++per_label[r.label];
                min_len = std::min(min_len, r.sequence.length());
                max_len = std::max(max_len, r.sequence.length());
                for (auto t : r.sequence.tokens()) {
                    if (t == kPadToken) {
                        ++padded;
                        break;
                    }
                }
            }
            out << "records " << ds.records.size() << '\n';
            if (!ds.records.empty()) out << "length_min " << min_len << "\nlength_max " << max_len << '\n';
            if (padded) out << "records_with_padding " << padded << '\n';
            for (const auto& [label, count] : per_label) out << "label " << label << ' ' << count << '\n';
        }
        return kExitOk;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ResourceGuardError& e) {
        err << "refused: " << e.what() << '\n';
        return kExitResourceGuard;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace entrank::cli
