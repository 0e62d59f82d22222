#include "segfin/runconfig.hpp"

#include <fstream>

#include "json_util.hpp"

using nlohmann::json;

namespace segfin {

std::string RunConfig::to_json_string() const {
    json j;
    j["synth"] = synth;
    j["arch"] = arch;
    j["anchors"] = anchors;
    j["train"] = train;
    j["pipeline"] = pipeline;
    return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json_string(const std::string& text) {
    json j = json::parse(text);
    RunConfig c;
    if (j.contains("synth")) j.at("synth").get_to(c.synth);
    if (j.contains("arch")) j.at("arch").get_to(c.arch);
    if (j.contains("anchors")) j.at("anchors").get_to(c.anchors);
    if (j.contains("train")) j.at("train").get_to(c.train);
    if (j.contains("pipeline")) j.at("pipeline").get_to(c.pipeline);
    return c;
}

void RunConfig::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write config file: " + path);
    f << to_json_string();
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config file: " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

} // namespace segfin
