#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "orlicz/generators.hpp"
#include "orlicz/grid_function.hpp"
#include "orlicz/martingales.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/psi_spec.hpp"
#include "orlicz/sample.hpp"

namespace orlicz {

using json = nlohmann::json;

// Descriptors: {"kind": ..., "parameters": {...}}. Infinite slopes are null.
json slowly_varying_to_json(const SlowlyVaryingSpec& l);
SlowlyVaryingSpec slowly_varying_from_json(const json& j);

json grid_function_to_json(const GridFunction& f);  // full data, for embedding
GridFunction grid_function_from_json(const json& j);

json psi_to_json(const PsiSpec& psi);
PsiSpec psi_from_json(const json& j);

json generator_to_json(const GeneratorSpec& spec);
GeneratorSpec generator_from_json(const json& j);

json martingale_spec_to_json(const MartingaleSpec& spec);
MartingaleSpec martingale_spec_from_json(const json& j);

json tail_fit_to_json(const TailFit& fit);
json norm_report_to_json(const NormReport& rep);
json moment_curve_to_json(const MomentCurve& c);
json trend_to_json(const TrendReport& t);
json order_to_json(const OrderReport& o);
json convergence_to_json(const ConvergenceReport& r);

// `z,value` CSV plus a `<path>.json` sidecar holding slopes and flags.
void write_grid_function(const std::filesystem::path& csv, const GridFunction& f);
GridFunction read_grid_function(const std::filesystem::path& csv);

// Single-column CSV; an optional non-numeric header line is skipped.
void write_sample_csv(const std::filesystem::path& path, const Sample& s);
Sample read_sample_csv(const std::filesystem::path& path);
// uint64 little-endian count, then little-endian IEEE-754 doubles.
void write_sample_binary(const std::filesystem::path& path, std::span<const double> values);
void write_sample_binary(const std::filesystem::path& path, const Sample& s);
Sample read_sample_binary(const std::filesystem::path& path);
// Dispatches on extension: .csv or anything else as binary.
Sample read_sample(const std::filesystem::path& path);

// <stem>.bin holds the path matrix (row-major paths x times) followed by the
// limit values; <stem>.json is the manifest.
void write_paths(const std::filesystem::path& stem, const PathCollection& paths);
PathCollection read_paths(const std::filesystem::path& manifest);

// checkpoint,gamma_n,empirical_norm,bound
void write_diagnostic_csv(const std::filesystem::path& path, const ConvergenceReport& r);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

}  // namespace orlicz
