#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "morsehb/flow.hpp"
#include "morsehb/homology.hpp"
#include "morsehb/morse_data.hpp"

namespace morsehb {

struct corpus_entry {
    std::string name;
    std::string description;
    std::string morse_json;          // MorseData document
    std::string flow_json;           // FlowProblem document, empty if none
    homology_result reference;       // known singular homology of the manifold
    std::int64_t reference_euler = 0;
};

/// Built-in worked examples: disk-neg, annulus-split, annulus-cross,
/// sphere-closed. The same documents are shipped under corpus/.
const std::vector<corpus_entry>& corpus_entries();
const corpus_entry& corpus_entry_by_name(const std::string& name); // throws precondition_error

struct stage_result {
    std::string stage; // parse | validate | assemble | d-squared | homology | compare | inequalities | flow-build | flow-compare
    bool ok = false;
    std::string detail;
};

struct entry_report {
    std::string name;
    bool passed = false;
    std::vector<stage_result> stages;
    homology_result computed;
    double wall_seconds = 0.0;
};

struct run_report {
    std::vector<entry_report> entries;
    bool all_passed = true;
};

/// validate -> assemble -> verify d^2 -> homology -> compare -> inequalities
/// per entry; with use_flow the MorseData is regenerated by build_morse_data
/// and its homology must equal the stored reference as well.
run_report corpus_run(const std::vector<std::string>& names, bool use_flow,
                      const shooting_config& cfg = {});

std::string to_json(const run_report& report);

} // namespace morsehb
