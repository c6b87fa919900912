#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "f3c/fit_types.hpp"
#include "f3c/lineshape.hpp"

namespace f3c {

/// Curve files are delimited text: `#meta:` comment lines carry the producing
/// config as single-line JSON, then a `epsilon,R[,p_<i>,p_<j>]` header and one
/// row per grid point. Gap points serialize with an empty value field.
/// Doubles are written with 17 significant digits so round-trips are
/// bit-exact.
void write_curve(const SpectralCurve& curve, const std::filesystem::path& path);
SpectralCurve read_curve(const std::filesystem::path& path);

/// Config files are JSON with fields mirroring ModelConfig plus an optional
/// "lineshape" subtree; each coupling channel carries exactly one of
/// {"gamma": ...} or {"v": ...}.
struct ConfigFile {
    ModelConfig config;
    std::optional<LineShapeParams> params;
};

ConfigFile read_config(const std::filesystem::path& path);
void write_config(const ConfigFile& file, const std::filesystem::path& path);
std::string config_to_json(const ConfigFile& file);
ConfigFile config_from_json(const std::string& text);

/// Spectrum files: `epsilon,value[,sigma]` with a required header line;
/// `#` comment lines are ignored.
Spectrum read_spectrum(const std::filesystem::path& path);
void write_spectrum(const Spectrum& spectrum, const std::filesystem::path& path);

std::string format_double(double x);  // shortest exact round-trip form

}  // namespace f3c
