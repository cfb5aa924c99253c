#include <chrono>
#include <sstream>

#include <json.hpp>

#include "morsehb/complex.hpp"
#include "morsehb/corpus.hpp"
#include "morsehb/homology.hpp"

namespace morsehb {

using nlohmann::ordered_json;

namespace {

entry_report run_entry(const corpus_entry& entry, bool use_flow, const shooting_config& cfg) {
    entry_report report;
    report.name = entry.name;
    report.passed = true;
    const auto t0 = std::chrono::steady_clock::now();

    auto stage = [&](const std::string& name, auto&& body) -> bool {
        if (!report.passed) return false;
        stage_result sr;
        sr.stage = name;
        try {
            sr.detail = body();
            sr.ok = true;
        } catch (const std::exception& e) {
            sr.ok = false;
            sr.detail = e.what();
            report.passed = false;
        }
        report.stages.push_back(std::move(sr));
        return report.passed;
    };

    morse_data data;
    graded_complex cx;
    homology_result computed;

    stage("parse", [&] {
        data = parse_morse_data(entry.morse_json);
        return std::to_string(data.critical_points.size()) + " critical points";
    });
    if (use_flow)
        stage("flow-build", [&] {
            if (entry.flow_json.empty()) throw precondition_error("entry has no flow problem");
            flow_problem fp = parse_flow_problem(entry.flow_json);
            data = build_morse_data(fp, cfg);
            return std::to_string(data.critical_points.size()) +
                   " critical points from shooting";
        });
    stage("validate", [&] {
        validation_report v = validate(data);
        if (!v.ok) throw numeric_error("violation: " + v.violations.front().rule);
        return std::string("ok");
    });
    stage("assemble", [&] {
        cx = assemble_boundary(data);
        return std::string("degrees 0..") + std::to_string(cx.ambient_dimension);
    });
    stage("d-squared", [&] {
        d_squared_report d2 = verify_d_squared(cx);
        if (!d2.ok) {
            std::ostringstream os;
            os << "composite nonzero at degree " << d2.degree << " (" << d2.row << ", " << d2.col
               << ") = " << d2.value;
            throw numeric_error(os.str());
        }
        return std::string("ok");
    });
    stage("homology", [&] {
        computed = homology(cx);
        report.computed = computed;
        std::ostringstream os;
        for (const auto& g : computed.groups) os << (g.degree ? " " : "") << g.betti;
        return os.str();
    });
    stage("compare", [&] {
        if (!compare_reference(computed, entry.reference))
            throw numeric_error("computed homology differs from the reference");
        return std::string("matches reference");
    });
    stage("inequalities", [&] {
        inequality_report ineq = morse_inequalities(data, betti_numbers(entry.reference));
        if (!ineq.all_hold) throw numeric_error("count inequality failed");
        return ineq.all_equal ? std::string("hold with equality") : std::string("hold");
    });
    stage("euler", [&] {
        if (euler_characteristic(data) != entry.reference_euler)
            throw numeric_error("euler characteristic mismatch");
        return std::to_string(entry.reference_euler);
    });

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace

run_report corpus_run(const std::vector<std::string>& names, bool use_flow,
                      const shooting_config& cfg) {
    std::vector<const corpus_entry*> selected;
    if (names.empty())
        for (const auto& e : corpus_entries()) selected.push_back(&e);
    else
        for (const auto& n : names) selected.push_back(&corpus_entry_by_name(n));

    run_report report;
    for (const auto* entry : selected) {
        report.entries.push_back(run_entry(*entry, use_flow, cfg));
        report.all_passed = report.all_passed && report.entries.back().passed;
    }
    return report;
}

std::string to_json(const run_report& report) {
    ordered_json doc;
    doc["all_passed"] = report.all_passed;
    doc["entries"] = ordered_json::array();
    for (const auto& e : report.entries) {
        ordered_json je;
        je["name"] = e.name;
        je["passed"] = e.passed;
        je["stages"] = ordered_json::array();
        for (const auto& s : e.stages) {
            ordered_json js;
            js["stage"] = s.stage;
            js["ok"] = s.ok;
            js["detail"] = s.detail;
            je["stages"].push_back(std::move(js));
        }
        ordered_json groups = ordered_json::array();
        for (const auto& g : e.computed.groups) {
            ordered_json jg;
            jg["degree"] = g.degree;
            jg["betti"] = g.betti;
            jg["torsion"] = g.torsion;
            groups.push_back(std::move(jg));
        }
        je["homology"] = std::move(groups);
        je["wall_seconds"] = e.wall_seconds;
        doc["entries"].push_back(std::move(je));
    }
    return doc.dump(2) + "\n";
}

} // namespace morsehb
