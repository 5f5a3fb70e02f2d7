#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "redraft/backbone.hpp"
#include "redraft/config.hpp"
#include "redraft/prompts.hpp"
#include "redraft/sim_backend.hpp"
#include "redraft/text.hpp"
#include "redraft/workflow.hpp"

namespace testsupport {

inline const std::vector<std::string>& section_titles() {
    static const std::vector<std::string> t{"Chemistry", "Pricing", "Integration", "Policy", "Recycling", "Safety"};
    return t;
}

// Two-word phrases built from disjoint word pools, so no phrase nests inside another.
inline std::string planted_phrase(int id) {
    static const std::vector<std::string> a{"amber", "brisk", "cobalt", "dusky", "ember", "frosty",
                                            "gilded", "hazel", "ivory", "jade", "khaki", "lunar",
                                            "misty", "nimble", "opal", "pearly", "quartz", "rustic",
                                            "sable", "tawny", "umber", "velvet", "woolly", "xenial"};
    static const std::vector<std::string> b{"falcon", "harbor", "meadow", "lantern", "glacier", "orchard"};
    return a[static_cast<std::size_t>(id - 1) % a.size()] + " " + b[static_cast<std::size_t>(id - 1) / a.size()];
}

// `sections` areas with `per_section` key points each; one document per key point whose text
// carries the section title and the phrase. Key point ids run 1..sections*per_section.
inline redraft::SyntheticCorpus make_corpus(int sections, int per_section, bool hint_all = true) {
    redraft::SyntheticCorpus c;
    c.topic = "test topic";
    int id = 1;
    for (int s = 0; s < sections; ++s) {
        redraft::CorpusSection section;
        section.title = section_titles().at(static_cast<std::size_t>(s));
        section.description = "aspects of " + redraft::text::to_lower(section.title);
        for (int k = 0; k < per_section; ++k, ++id) {
            c.key_points[id] = planted_phrase(id);
            section.key_points.push_back(id);
            redraft::CorpusDocument doc;
            doc.doc_id = "doc" + std::to_string(id);
            doc.title = section.title + " " + std::to_string(k + 1);
            doc.text = section.title + " findings: " + planted_phrase(id) + " was observed.";
            doc.locator = "sim://" + doc.doc_id;
            doc.key_point_ids = {id};
            c.documents.push_back(doc);
            if (hint_all) c.draft_hints.insert(id);
        }
        c.sections.push_back(section);
    }
    c.validate();
    return c;
}

inline redraft::RunConfig sim_config(redraft::Mode mode, std::uint64_t seed = 7) {
    redraft::RunConfig c;
    c.mode = mode;
    c.seed = seed;
    c.query = "state of the test topic";
    c.backend.kind = "simulation";
    c.backend.corpus = "in-memory";
    return c;
}

// Simulation backend, prompts, in-memory trajectory and a context wired together.
struct Rig {
    std::shared_ptr<redraft::SyntheticCorpus> corpus;
    std::shared_ptr<redraft::SimulatedClock> clock;
    redraft::SimBackend backend;
    redraft::PromptLibrary prompts;
    redraft::Trajectory trajectory;
    redraft::RunContext ctx;

    Rig(redraft::SyntheticCorpus c, redraft::RunConfig config)
        : corpus(std::make_shared<redraft::SyntheticCorpus>(std::move(c))),
          clock(std::make_shared<redraft::SimulatedClock>()),
          backend(corpus, clock),
          ctx(backend, backend, prompts, trajectory, *clock, std::move(config)) {
        ctx.fitness_max = static_cast<double>(corpus->key_points.size());
        ctx.sleeper = [](std::chrono::milliseconds) {};
    }

    std::vector<int> key_points(const std::string& text) const { return corpus->find_key_points(text); }
};

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("redraft_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path write_corpus(const std::filesystem::path& dir, const redraft::SyntheticCorpus& c) {
    auto path = dir / "corpus.json";
    std::ofstream(path) << c.to_json().dump(2);
    return path;
}

} // namespace testsupport
