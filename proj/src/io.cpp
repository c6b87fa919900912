#include "f3c/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace f3c {

namespace {

using json = nlohmann::ordered_json;

json config_to_tree(const ModelConfig& config) {
    json tree;
    tree["kind"] = to_string(config.kind);
    tree["position"] = to_string(config.position);
    json energies;
    for (const auto& [level, e] : config.bound_energies) energies[std::to_string(level)] = e;
    tree["energies"] = std::move(energies);
    json couplings;
    for (const auto& [level, c] : config.couplings) {
        json entry;
        if (c.gamma_input) {
            entry["gamma"] = *c.gamma_input;
        } else {
            entry["v"] = c.v;
        }
        couplings[std::to_string(level)] = std::move(entry);
    }
    tree["couplings"] = std::move(couplings);
    if (config.g) tree["g"] = *config.g;
    return tree;
}

json params_to_tree(const LineShapeParams& params) {
    json tree;
    json q;
    for (const auto& [level, value] : params.q) q[std::to_string(level)] = value;
    tree["q"] = std::move(q);
    if (params.v_c) tree["v_c"] = *params.v_c;
    return tree;
}

int parse_level_key(const std::string& key) {
    if (key.size() == 1 && key[0] >= '1' && key[0] <= '3') return key[0] - '0';
    fail(ErrorCode::MalformedFile, "level key must be 1, 2 or 3, got '" + key + "'");
}

ModelConfig config_from_tree(const json& tree) {
    ModelConfig config;
    config.kind = parse_system_kind(tree.at("kind").get<std::string>());
    config.position = parse_continuum_position(tree.at("position").get<std::string>());
    for (const auto& [key, value] : tree.at("energies").items()) {
        config.bound_energies[parse_level_key(key)] = value.get<double>();
    }
    for (const auto& [key, value] : tree.at("couplings").items()) {
        const int level = parse_level_key(key);
        const bool has_gamma = value.contains("gamma");
        const bool has_v = value.contains("v");
        if (has_gamma && has_v) {
            fail(ErrorCode::MalformedFile,
                 "coupling for level " + key + " carries both gamma and v; give exactly one");
        }
        if (!has_gamma && !has_v) {
            fail(ErrorCode::MalformedFile,
                 "coupling for level " + key + " needs either gamma or v");
        }
        config.couplings[level] = has_gamma ? Coupling::from_gamma(value.at("gamma").get<double>())
                                            : Coupling::from_v(value.at("v").get<double>());
    }
    if (tree.contains("g") && !tree.at("g").is_null()) config.g = tree.at("g").get<double>();
    return config;
}

LineShapeParams params_from_tree(const json& tree) {
    LineShapeParams params;
    for (const auto& [key, value] : tree.at("q").items()) {
        params.q[parse_level_key(key)] = value.get<double>();
    }
    if (tree.contains("v_c") && !tree.at("v_c").is_null()) {
        params.v_c = tree.at("v_c").get<double>();
    }
    return params;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& text, const std::string& context) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        fail(ErrorCode::MalformedFile, context + ": cannot parse number '" + text + "'");
    }
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string config_to_json(const ConfigFile& file) {
    json tree = config_to_tree(file.config);
    if (file.params) tree["lineshape"] = params_to_tree(*file.params);
    return tree.dump(2);
}

ConfigFile config_from_json(const std::string& text) {
    json tree;
    try {
        tree = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::MalformedFile, std::string("config is not valid JSON: ") + e.what());
    }
    ConfigFile file;
    try {
        file.config = validate_config(config_from_tree(tree));
        if (tree.contains("lineshape")) {
            file.params = validate_params(file.config, params_from_tree(tree.at("lineshape")));
        }
    } catch (const Error&) {
        throw;
    } catch (const json::exception& e) {
        fail(ErrorCode::MalformedFile, std::string("config field error: ") + e.what());
    }
    return file;
}

ConfigFile read_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return config_from_json(buffer.str());
}

void write_config(const ConfigFile& file, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
    out << config_to_json(file) << "\n";
}

void write_curve(const SpectralCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());

    json meta;
    meta["config"] = config_to_tree(curve.config);
    meta["params"] = params_to_tree(curve.params);
    meta["gaps"] = curve.gap_count;
    if (!curve.note.empty()) meta["note"] = curve.note;
    out << "#meta: " << meta.dump() << "\n";

    const int li = curve.prob_levels[0], lj = curve.prob_levels[1];
    const bool with_probs = !curve.probs[0].empty();
    out << "epsilon,R";
    if (with_probs) out << ",p_" << li << ",p_" << lj;
    out << "\n";
    for (std::size_t k = 0; k < curve.grid.size(); ++k) {
        out << format_double(curve.grid[k]) << ",";
        if (!std::isnan(curve.r[k])) out << format_double(curve.r[k]);
        if (with_probs) {
            for (int b = 0; b < 2; ++b) {
                out << ",";
                if (!std::isnan(curve.probs[b][k])) out << format_double(curve.probs[b][k]);
            }
        }
        out << "\n";
    }
    if (!out) fail(ErrorCode::IoFailure, "short write to " + path.string());
}

SpectralCurve read_curve(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());

    SpectralCurve curve;
    bool have_meta = false;
    bool have_header = false;
    bool with_probs = false;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.rfind("#meta:", 0) == 0) {
            try {
                const json meta = json::parse(line.substr(6));
                curve.config = validate_config(config_from_tree(meta.at("config")));
                curve.params = validate_params(curve.config, params_from_tree(meta.at("params")));
                curve.gap_count = meta.value("gaps", 0);
                curve.note = meta.value("note", "");
                have_meta = true;
            } catch (const json::exception& e) {
                fail(ErrorCode::MalformedFile, path.string() + ": bad meta line: " + e.what());
            }
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            const auto fields = split_csv(line);
            if (fields.size() < 2 || fields[0] != "epsilon" || fields[1] != "R") {
                fail(ErrorCode::MalformedFile, path.string() + ": expected 'epsilon,R[,p_i,p_j]' header");
            }
            with_probs = fields.size() == 4;
            if (with_probs) {
                curve.prob_levels[0] = parse_level_key(fields[2].substr(2));
                curve.prob_levels[1] = parse_level_key(fields[3].substr(2));
            }
            have_header = true;
            continue;
        }
        const auto fields = split_csv(line);
        const std::size_t expected = with_probs ? 4 : 2;
        if (fields.size() != expected) {
            fail(ErrorCode::MalformedFile,
                 path.string() + " line " + std::to_string(row) + ": wrong field count");
        }
        const double eps = parse_double(fields[0], path.string());
        if (!curve.grid.empty() && !(eps > curve.grid.back())) {
            fail(ErrorCode::MalformedFile,
                 path.string() + ": energy grid must be strictly increasing");
        }
        curve.grid.push_back(eps);
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        curve.r.push_back(fields[1].empty() ? nan : parse_double(fields[1], path.string()));
        if (with_probs) {
            for (int b = 0; b < 2; ++b) {
                const std::string& f = fields[static_cast<std::size_t>(2 + b)];
                curve.probs[b].push_back(f.empty() ? nan : parse_double(f, path.string()));
            }
        }
    }
    if (!have_meta || !have_header || curve.grid.empty()) {
        fail(ErrorCode::MalformedFile, path.string() + ": missing meta, header or data rows");
    }
    if (!with_probs) {
        curve.prob_levels = curve.config.topo().bounds;
    }
    return curve;
}

Spectrum read_spectrum(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
    Spectrum spectrum;
    std::string line;
    bool have_header = false;
    std::size_t columns = 0;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv(line);
        if (!have_header) {
            if (fields.size() < 2 || fields[0] != "epsilon" || fields[1] != "value" ||
                (fields.size() == 3 && fields[2] != "sigma") || fields.size() > 3) {
                fail(ErrorCode::MalformedFile,
                     path.string() + ": expected 'epsilon,value[,sigma]' header");
            }
            columns = fields.size();
            have_header = true;
            continue;
        }
        if (fields.size() != columns) {
            fail(ErrorCode::MalformedFile,
                 path.string() + " line " + std::to_string(row) + ": wrong field count");
        }
        Spectrum::Point pt;
        pt.energy = parse_double(fields[0], path.string());
        pt.value = parse_double(fields[1], path.string());
        if (columns == 3 && !fields[2].empty()) {
            pt.sigma = parse_double(fields[2], path.string());
        }
        spectrum.points.push_back(pt);
    }
    if (!have_header || spectrum.points.empty()) {
        fail(ErrorCode::MalformedFile, path.string() + ": no spectrum rows");
    }
    spectrum.meta = path.string();
    return spectrum;
}

void write_spectrum(const Spectrum& spectrum, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
    bool with_sigma = false;
    for (const auto& pt : spectrum.points) with_sigma = with_sigma || pt.sigma.has_value();
    out << (with_sigma ? "epsilon,value,sigma" : "epsilon,value") << "\n";
    for (const auto& pt : spectrum.points) {
        out << format_double(pt.energy) << "," << format_double(pt.value);
        if (with_sigma) {
            out << ",";
            if (pt.sigma) out << format_double(*pt.sigma);
        }
        out << "\n";
    }
}

}  // namespace f3c
