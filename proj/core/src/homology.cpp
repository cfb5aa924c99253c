#include "morsehb/homology.hpp"

#include <sstream>

#include <json.hpp>

#include "morsehb/checked.hpp"

namespace morsehb {

using nlohmann::json;
using nlohmann::ordered_json;

homology_result homology(const graded_complex& cx, bool force) {
    if (!force) {
        d_squared_report cert = verify_d_squared(cx);
        if (!cert.ok) {
            std::ostringstream os;
            os << "not a chain complex: d" << cx.ambient_dimension << "... composite at degree "
               << cert.degree << " entry (" << cert.row << ", " << cert.col << ") = "
               << cert.value << " (pass force to override)";
            throw precondition_error(os.str());
        }
    }

    const int n = cx.ambient_dimension;
    std::vector<std::size_t> ranks(n + 2, 0);           // rank of d_k, k = 1..n
    std::vector<std::vector<std::int64_t>> tors(n + 2); // divisors of d_k
    for (int k = 1; k <= n; ++k) {
        smith_form snf = smith_normal_form(cx.boundary(k).entries);
        ranks[k] = snf.rank;
        tors[k] = snf.diagonal;
    }

    homology_result result;
    for (int k = 0; k <= n; ++k) {
        homology_group g;
        g.degree = k;
        std::int64_t dim = static_cast<std::int64_t>(cx.generator_lists[k].size());
        std::int64_t rank_k = k >= 1 ? static_cast<std::int64_t>(ranks[k]) : 0;
        std::int64_t rank_k1 = k + 1 <= n ? static_cast<std::int64_t>(ranks[k + 1]) : 0;
        g.betti = dim - rank_k - rank_k1;
        if (g.betti < 0)
            throw precondition_error("negative betti number in degree " + std::to_string(k) +
                                     "; the input is not a chain complex");
        if (k + 1 <= n)
            for (std::int64_t d : tors[k + 1])
                if (d > 1) g.torsion.push_back(d);
        result.groups.push_back(std::move(g));
    }
    return result;
}

std::vector<std::int64_t> betti_numbers(const homology_result& h) {
    std::vector<std::int64_t> betti;
    for (const auto& g : h.groups) betti.push_back(g.betti);
    return betti;
}

inequality_report morse_inequalities(const morse_data& data,
                                     const std::vector<std::int64_t>& betti) {
    const int n = data.ambient_dimension;
    if (static_cast<int>(betti.size()) != n + 1)
        throw precondition_error("betti list must have length n+1 = " + std::to_string(n + 1) +
                                 ", got " + std::to_string(betti.size()));
    inequality_report report;
    for (int k = 0; k <= n; ++k) {
        inequality_line line;
        line.degree = k;
        for (const auto& p : data.critical_points)
            if (p.index == k && (!p.is_boundary() || p.is_positive())) ++line.lhs;
        line.rhs = betti[k];
        line.holds = line.lhs >= line.rhs;
        report.all_hold = report.all_hold && line.holds;
        report.all_equal = report.all_equal && line.lhs == line.rhs;
        report.lines.push_back(line);
    }
    return report;
}

std::int64_t euler_characteristic(const morse_data& data) {
    std::int64_t chi = 0;
    for (const auto& p : data.critical_points) {
        if (p.is_boundary() && !p.is_positive()) continue;
        chi = checked_add(chi, p.index % 2 == 0 ? 1 : -1);
    }
    return chi;
}

bool compare_reference(const homology_result& result, const homology_result& reference) {
    if (result.groups.size() != reference.groups.size()) return false;
    for (std::size_t i = 0; i < result.groups.size(); ++i) {
        if (result.groups[i].betti != reference.groups[i].betti) return false;
        if (result.groups[i].torsion != reference.groups[i].torsion) return false;
    }
    return true;
}

std::string serialize(const homology_result& h) {
    ordered_json doc;
    doc["groups"] = ordered_json::array();
    for (const auto& g : h.groups) {
        ordered_json jg;
        jg["degree"] = g.degree;
        jg["betti"] = g.betti;
        jg["torsion"] = g.torsion;
        doc["groups"].push_back(std::move(jg));
    }
    return doc.dump(2) + "\n";
}

homology_result parse_homology_result(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("JSON syntax error: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("groups") || !doc["groups"].is_array())
        throw parse_error("homology document needs a \"groups\" array");
    homology_result h;
    for (const auto& jg : doc["groups"]) {
        if (!jg.is_object() || !jg.contains("degree") || !jg.contains("betti") ||
            !jg.contains("torsion"))
            throw parse_error("homology group needs degree, betti, torsion");
        homology_group g;
        g.degree = jg["degree"].get<int>();
        g.betti = jg["betti"].get<std::int64_t>();
        for (const auto& t : jg["torsion"]) g.torsion.push_back(t.get<std::int64_t>());
        h.groups.push_back(std::move(g));
    }
    return h;
}

} // namespace morsehb
