#include "repliscope/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace repliscope {

namespace {

using nlohmann::json;

template <typename T>
T field_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ManifestError(std::string("manifest field '") + key + "': " + e.what());
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

ExperimentManifest ExperimentManifest::parse(const std::string& json_text,
                                             const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ManifestError("manifest must be a JSON object");

    ExperimentManifest m;
    m.alpha_given = doc.contains("alpha");
    m.alpha = field_or<double>(doc, "alpha", m.alpha);
    m.resolution = field_or<std::size_t>(doc, "resolution", m.resolution);
    m.id_resolution = field_or<std::size_t>(doc, "id_resolution", m.id_resolution);
    m.k1 = field_or<std::size_t>(doc, "k1", m.k1);
    m.k2 = field_or<std::size_t>(doc, "k2", m.k2);
    m.seed = field_or<std::uint64_t>(doc, "seed", m.seed);

    if (!(m.alpha >= 0.0)) throw ManifestError("manifest alpha must be >= 0");
    if (m.k1 < 2 || m.k1 > m.k2) throw ManifestError("manifest requires 2 <= k1 <= k2");
    if (m.resolution == 0 || m.id_resolution == 0) {
        throw ManifestError("manifest resolutions must be >= 1");
    }

    if (!doc.contains("combos") || !doc.at("combos").is_array()) {
        throw ManifestError("manifest needs a 'combos' array");
    }
    std::set<std::string> names;
    for (const auto& c : doc.at("combos")) {
        ManifestCombo combo;
        combo.name = field_or<std::string>(c, "name", "");
        if (combo.name.empty()) throw ManifestError("every combo needs a non-empty name");
        if (!names.insert(combo.name).second) {
            throw ManifestError("duplicate combo name '" + combo.name + "'");
        }
        if (!c.contains("levels") || !c.at("levels").is_array() || c.at("levels").empty()) {
            throw ManifestError("combo '" + combo.name + "' needs a non-empty 'levels' array");
        }
        for (const auto& l : c.at("levels")) {
            ManifestLevel level;
            level.size = field_or<std::size_t>(l, "size", 0);
            const auto training = field_or<std::string>(l, "training_path", "");
            const auto generated = field_or<std::string>(l, "generated_path", "");
            if (level.size == 0 || training.empty() || generated.empty()) {
                throw ManifestError("combo '" + combo.name +
                                    "': each level needs size, training_path and generated_path");
            }
            level.training_path = resolve(base_dir, training);
            level.generated_path = resolve(base_dir, generated);
            if (!combo.levels.empty() && level.size <= combo.levels.back().size) {
                throw ManifestError("combo '" + combo.name +
                                    "': level sizes must be strictly increasing");
            }
            combo.levels.push_back(std::move(level));
        }
        m.combos.push_back(std::move(combo));
    }
    return m;
}

ExperimentManifest ExperimentManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot read manifest " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), path.parent_path());
}

}  // namespace repliscope
