#include "vmatch/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "vmatch/errors.hpp"

namespace vmatch {

namespace {

const std::vector<std::string> kKnownKeys = {
    "t1",          "t2_frac",         "t3_frac",        "seg_len",
    "min_motion_frac", "lambda",      "max_bad_segments", "keep_one_to_many",
    "levels",      "branching",       "propagation_iters", "search_alpha",
    "search_w0",   "search_trials",   "max_states",     "seed",
    "refine",
};

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw input_error("config key '" + key + "' expects true/false, got '" + v + "'");
}

template <typename T>
T parse_num(const std::string& v, const std::string& key) {
    std::istringstream in(v);
    T out;
    in >> out;
    if (!in || !(in >> std::ws).eof())
        throw input_error("config key '" + key + "' has malformed value '" + v + "'");
    return out;
}

// "64:64,32:32,16:16,8:8" → level list (patch:stride per entry).
std::vector<LevelSpec> parse_levels(const std::string& v) {
    std::vector<LevelSpec> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw input_error("levels entry '" + item + "' must be patch:stride");
        LevelSpec s;
        s.patch_size = parse_num<int>(item.substr(0, colon), "levels");
        s.stride = parse_num<int>(item.substr(colon + 1), "levels");
        out.push_back(s);
    }
    if (out.empty()) throw input_error("levels list is empty");
    return out;
}

std::string levels_to_string(const std::vector<LevelSpec>& levels) {
    std::string s;
    for (const auto& lv : levels) {
        if (!s.empty()) s += ",";
        s += std::to_string(lv.patch_size) + ":" + std::to_string(lv.stride);
    }
    return s;
}

} // namespace

void validate_config(const Config& cfg) {
    if (cfg.th.t1 < 1) throw input_error("t1 must be ≥ 1");
    if (!(cfg.th.t2_frac > 0 && cfg.th.t2_frac <= 1))
        throw input_error("t2_frac must lie in (0, 1]");
    if (!(cfg.th.t3_frac > 0 && cfg.th.t3_frac <= 1))
        throw input_error("t3_frac must lie in (0, 1]");
    if (cfg.th.seg_len < 1) throw input_error("seg_len must be ≥ 1");
    if (!(cfg.th.min_motion_frac >= 0 && cfg.th.min_motion_frac < 1))
        throw input_error("min_motion_frac must lie in [0, 1)");
    if (cfg.lambda < 1) throw input_error("lambda must be ≥ 1");
    if (cfg.max_bad_segments < 1) throw input_error("max_bad_segments must be ≥ 1");
    if (cfg.levels.empty()) throw input_error("levels list is empty");
    for (const auto& lv : cfg.levels) {
        if (lv.patch_size < 1) throw input_error("patch_size must be ≥ 1");
        if (lv.stride < 1 || lv.stride > lv.patch_size)
            throw input_error("stride must lie in [1, patch_size]");
    }
    if (cfg.branching < 2) throw input_error("branching must be ≥ 2");
    for (std::size_t i = 0; i + 1 < cfg.levels.size(); ++i)
        if (cfg.levels[i].patch_size != cfg.levels[i + 1].patch_size * cfg.branching)
            throw input_error("each level's patch size must be branching × the next finer one");
    if (cfg.propagation_iters < 0) throw input_error("propagation_iters must be ≥ 0");
    if (!(cfg.search_alpha > 0 && cfg.search_alpha < 1))
        throw input_error("search_alpha must lie in (0, 1)");
    if (cfg.search_w0 < 0) throw input_error("search_w0 must be ≥ 0");
    if (cfg.search_trials < 1) throw input_error("search_trials must be ≥ 1");
    if (cfg.max_states < 1) throw input_error("max_states must be ≥ 1");
}

Config parse_config(const std::string& text, std::vector<std::string>* defaulted) {
    Config cfg;
    std::vector<std::string> present;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Trim whitespace and trailing comments.
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r");
        line = line.substr(begin, end - begin + 1);

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw input_error("config line " + std::to_string(line_no) +
                              " is not key=value: '" + line + "'");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        const auto kend = key.find_last_not_of(" \t");
        key = key.substr(0, kend == std::string::npos ? 0 : kend + 1);
        const auto vbeg = val.find_first_not_of(" \t");
        val = vbeg == std::string::npos ? "" : val.substr(vbeg);

        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
            throw input_error("unknown config key '" + key + "' (line " +
                              std::to_string(line_no) + ")");
        if (std::find(present.begin(), present.end(), key) != present.end())
            throw input_error("duplicate config key '" + key + "'");
        present.push_back(key);

        if (key == "t1") cfg.th.t1 = parse_num<int>(val, key);
        else if (key == "t2_frac") cfg.th.t2_frac = parse_num<double>(val, key);
        else if (key == "t3_frac") cfg.th.t3_frac = parse_num<double>(val, key);
        else if (key == "seg_len") cfg.th.seg_len = parse_num<int>(val, key);
        else if (key == "min_motion_frac") cfg.th.min_motion_frac = parse_num<double>(val, key);
        else if (key == "lambda") cfg.lambda = parse_num<double>(val, key);
        else if (key == "max_bad_segments") cfg.max_bad_segments = parse_num<int>(val, key);
        else if (key == "keep_one_to_many") cfg.keep_one_to_many = parse_bool(val, key);
        else if (key == "levels") cfg.levels = parse_levels(val);
        else if (key == "branching") cfg.branching = parse_num<int>(val, key);
        else if (key == "propagation_iters") cfg.propagation_iters = parse_num<int>(val, key);
        else if (key == "search_alpha") cfg.search_alpha = parse_num<double>(val, key);
        else if (key == "search_w0") cfg.search_w0 = parse_num<double>(val, key);
        else if (key == "search_trials") cfg.search_trials = parse_num<int>(val, key);
        else if (key == "max_states") cfg.max_states = parse_num<int>(val, key);
        else if (key == "seed") cfg.seed = parse_num<std::uint64_t>(val, key);
        else if (key == "refine") cfg.refine = parse_bool(val, key);
    }

    if (defaulted) {
        defaulted->clear();
        for (const auto& k : kKnownKeys)
            if (std::find(present.begin(), present.end(), k) == present.end())
                defaulted->push_back(k);
    }
    validate_config(cfg);
    return cfg;
}

Config load_config(const std::filesystem::path& file,
                   std::vector<std::string>* defaulted) {
    std::ifstream in(file);
    if (!in) throw input_error("cannot open config " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_config(text, defaulted);
}

nlohmann::json config_to_json(const Config& cfg) {
    nlohmann::json j;
    j["t1"] = cfg.th.t1;
    j["t2_frac"] = cfg.th.t2_frac;
    j["t3_frac"] = cfg.th.t3_frac;
    j["seg_len"] = cfg.th.seg_len;
    j["min_motion_frac"] = cfg.th.min_motion_frac;
    j["lambda"] = cfg.lambda;
    j["max_bad_segments"] = cfg.max_bad_segments;
    j["keep_one_to_many"] = cfg.keep_one_to_many;
    j["levels"] = levels_to_string(cfg.levels);
    j["branching"] = cfg.branching;
    j["propagation_iters"] = cfg.propagation_iters;
    j["search_alpha"] = cfg.search_alpha;
    j["search_w0"] = cfg.search_w0;
    j["search_trials"] = cfg.search_trials;
    j["max_states"] = cfg.max_states;
    j["seed"] = cfg.seed;
    j["refine"] = cfg.refine;
    return j;
}

} // namespace vmatch
