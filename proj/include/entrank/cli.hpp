#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "entrank/augment.hpp"
#include "entrank/dataset.hpp"
#include "entrank/dist_cache.hpp"
#include "entrank/distribution.hpp"

namespace entrank::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitValidation = 2,
    kExitResourceGuard = 3,
    kExitIo = 4,
};

/// "%.6f", or 17 significant digits with full_precision.
std::string format_real(double x, bool full_precision);

struct BuildDistReport {
    std::filesystem::path path;
    bool cache_hit = false;
    EntropyDistribution dist;
};

/// Loads or builds the (T, n, N) distribution in `cache_dir` and prints the
/// number of distinct values, total and entropy range to `log`.
BuildDistReport cmd_build_dist(std::size_t T, unsigned n, std::size_t N, const std::filesystem::path& cache_dir,
                               const BuildOptions& opts, std::ostream& log);

struct RatioRow {
    std::string id;
    std::int64_t label = 0;
    double S = 0.0;  // mean over all floor(L/T) blocks
    double R = 0.0;  // against dist, first dist.N blocks
    double gc = 0.0;
};

struct RatioResult {
    std::vector<RatioRow> rows;  // input order, short records omitted
    std::size_t skipped = 0;     // records shorter than T*N
};

RatioResult compute_ratios(const Dataset& ds, const EntropyDistribution& dist, unsigned threads = 0);
void write_ratio_csv(std::ostream& out, const RatioResult& result, bool full_precision);

enum class CropMethod { Basic, Random, Entropy, Kolmogorov, Ratio };

CropMethod parse_crop_method(const std::string& name);
std::string to_string(CropMethod m);

/// Crops every record; record i uses seed mix_seed(cfg.seed, i). Results
/// shorter than target_len are right-padded. Any per-record failure aborts
/// the whole run with a summary. `dist` is required for CropMethod::Ratio.
std::vector<EncodedSequence> crop_dataset(const Dataset& ds, CropMethod method, const CropConfig& cfg,
                                          const EntropyDistribution* dist, unsigned threads = 0);

/// crop_dataset, then writes the dataset and a `<out>.provenance.json` sidecar.
void cmd_crop(const Dataset& ds, CropMethod method, const CropConfig& cfg, const EntropyDistribution* dist,
              const std::filesystem::path& out_path, const std::string& input_name, unsigned threads = 0);

enum class ScatterAxis { Kolmogorov, Entropy, Ratio };

ScatterAxis parse_scatter_axis(const std::string& name);

struct ScatterRow {
    std::string id;
    std::int64_t label = 0;
    double x = 0.0;
    double gc = 0.0;
};

struct ScatterResult {
    std::vector<ScatterRow> rows;
    std::size_t skipped = 0;
};

/// Kolmogorov axis: DEFLATE length of the packed sequence divided by its
/// length. Entropy axis: whole-sequence entropy at tuple size n. Ratio axis:
/// calculate_ratio against `dist` (required for that axis).
ScatterResult compute_scatter(const Dataset& ds, ScatterAxis axis, unsigned n, const EntropyDistribution* dist,
                              unsigned threads = 0);
void write_scatter_csv(std::ostream& out, const ScatterResult& result, bool full_precision);

/// Parses `args` (without the program name) and runs one subcommand.
/// Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace entrank::cli
