#include "morsehb/morse_data.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

namespace morsehb {

using nlohmann::json;
using nlohmann::ordered_json;

const critical_point* morse_data::find_point(const std::string& id) const {
    for (const auto& p : critical_points)
        if (p.id == id) return &p;
    return nullptr;
}

const boundary_component* morse_data::find_component(const std::string& id) const {
    for (const auto& c : boundary_components)
        if (c.id == id) return &c;
    return nullptr;
}

std::int64_t morse_data::m_count(const std::string& from, const std::string& to) const {
    auto it = counts.m_table.find({from, to});
    return it == counts.m_table.end() ? 0 : it->second;
}

std::int64_t morse_data::n_count(const std::string& from, const std::string& to) const {
    auto it = counts.n_table.find({from, to});
    return it == counts.n_table.end() ? 0 : it->second;
}

void morse_data::sort() {
    std::sort(boundary_components.begin(), boundary_components.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    std::sort(critical_points.begin(), critical_points.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
}

namespace {

void position_of(const std::string& text, std::size_t byte, int& line, int& col) {
    line = 1;
    col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
}

[[noreturn]] void fail(const std::string& msg) { throw parse_error(msg); }

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            fail("unknown field \"" + it.key() + "\" in " + where);
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) fail("missing required field \"" + key + "\" in " + where);
    return *it;
}

std::string get_string(const json& v, const std::string& where) {
    if (!v.is_string()) fail(where + " must be a string");
    return v.get<std::string>();
}

std::int64_t get_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where + " must be an integer");
    return v.get<std::int64_t>();
}

double get_number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where + " must be a number");
    return v.get<double>();
}

count_table parse_count_array(const json& arr, const std::string& where) {
    if (!arr.is_array()) fail("counts." + where + " must be an array");
    count_table table;
    for (const auto& row : arr) {
        if (!row.is_object()) fail("counts." + where + " entries must be objects");
        require_keys(row, {"from", "to", "count"}, "counts." + where + " entry");
        pair_key key{get_string(require(row, "from", where), where + ".from"),
                     get_string(require(row, "to", where), where + ".to")};
        std::int64_t c = get_integer(require(row, "count", where), where + ".count");
        if (!table.emplace(key, c).second)
            fail("duplicate id pair (" + key.first + ", " + key.second + ") in counts." + where);
    }
    return table;
}

} // namespace

morse_data parse_morse_data(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        int line = 0, col = 0;
        position_of(text, e.byte > 0 ? e.byte - 1 : 0, line, col);
        std::ostringstream os;
        os << "JSON syntax error at line " << line << ", column " << col;
        throw parse_error(os.str(), line, col);
    }
    if (!doc.is_object()) fail("top level must be an object");
    require_keys(doc, {"dimension", "boundary_components", "critical_points", "counts"},
                 "top-level object");

    morse_data d;
    d.ambient_dimension =
        static_cast<int>(get_integer(require(doc, "dimension", "document"), "dimension"));

    const json& comps = require(doc, "boundary_components", "document");
    if (!comps.is_array()) fail("boundary_components must be an array");
    for (const auto& c : comps) {
        if (!c.is_object()) fail("boundary_components entries must be objects");
        require_keys(c, {"id", "c"}, "boundary component");
        boundary_component bc;
        bc.id = get_string(require(c, "id", "boundary component"), "component id");
        bc.constant_c = get_number(require(c, "c", "boundary component"), "component c");
        bc.dimension = d.ambient_dimension - 1;
        if (d.find_component(bc.id)) fail("duplicate id \"" + bc.id + "\" in boundary_components");
        d.boundary_components.push_back(std::move(bc));
    }

    const json& pts = require(doc, "critical_points", "document");
    if (!pts.is_array()) fail("critical_points must be an array");
    for (const auto& p : pts) {
        if (!p.is_object()) fail("critical_points entries must be objects");
        require_keys(p, {"id", "kind", "index", "component", "value"}, "critical point");
        critical_point cp;
        cp.id = get_string(require(p, "id", "critical point"), "point id");
        std::string kind = get_string(require(p, "kind", "critical point"), "point kind");
        if (kind == "interior")
            cp.kind = critical_kind::interior;
        else if (kind == "boundary")
            cp.kind = critical_kind::boundary;
        else
            fail("kind must be \"interior\" or \"boundary\", got \"" + kind + "\"");
        std::int64_t idx = get_integer(require(p, "index", "critical point"), "point index");
        if (idx < 0) fail("index must be nonnegative for point \"" + cp.id + "\"");
        cp.index = static_cast<int>(idx);
        if (cp.kind == critical_kind::boundary) {
            cp.component =
                get_string(require(p, "component", "boundary critical point"), "point component");
            cp.critical_value =
                get_number(require(p, "value", "boundary critical point"), "point value");
        } else {
            if (p.contains("component"))
                fail("field \"component\" is not allowed on interior point \"" + cp.id + "\"");
            if (p.contains("value"))
                fail("field \"value\" is not allowed on interior point \"" + cp.id + "\"");
        }
        if (d.find_point(cp.id)) fail("duplicate id \"" + cp.id + "\" in critical_points");
        d.critical_points.push_back(std::move(cp));
    }

    const json& counts = require(doc, "counts", "document");
    if (!counts.is_object()) fail("counts must be an object");
    require_keys(counts, {"M", "N"}, "counts");
    d.counts.m_table = parse_count_array(require(counts, "M", "M"), "M");
    d.counts.n_table = parse_count_array(require(counts, "N", "N"), "N");

    d.sort();
    return d;
}

std::string serialize(const morse_data& d) {
    morse_data sorted = d;
    sorted.sort();

    ordered_json doc;
    doc["dimension"] = sorted.ambient_dimension;
    doc["boundary_components"] = ordered_json::array();
    for (const auto& c : sorted.boundary_components) {
        ordered_json jc;
        jc["id"] = c.id;
        jc["c"] = c.constant_c;
        doc["boundary_components"].push_back(std::move(jc));
    }
    doc["critical_points"] = ordered_json::array();
    for (const auto& p : sorted.critical_points) {
        ordered_json jp;
        jp["id"] = p.id;
        jp["kind"] = p.kind == critical_kind::interior ? "interior" : "boundary";
        jp["index"] = p.index;
        if (p.kind == critical_kind::boundary) {
            jp["component"] = p.component;
            jp["value"] = p.critical_value;
        }
        doc["critical_points"].push_back(std::move(jp));
    }
    auto dump_table = [](const count_table& t) {
        ordered_json arr = ordered_json::array();
        for (const auto& [key, count] : t) { // std::map iterates sorted by (from, to)
            ordered_json row;
            row["from"] = key.first;
            row["to"] = key.second;
            row["count"] = count;
            arr.push_back(std::move(row));
        }
        return arr;
    };
    doc["counts"] = ordered_json::object();
    doc["counts"]["M"] = dump_table(sorted.counts.m_table);
    doc["counts"]["N"] = dump_table(sorted.counts.n_table);
    return doc.dump(2) + "\n";
}

namespace {

struct rule_checker {
    const morse_data& d;
    std::vector<violation> out;

    void add(const char* rule, std::string msg, std::vector<std::string> ids) {
        out.push_back({rule, std::move(msg), std::move(ids)});
    }

    void check_points() {
        const int n = d.ambient_dimension;
        for (const auto& p : d.critical_points) {
            const int limit = p.is_boundary() ? n - 1 : n;
            if (p.index > limit || p.index < 0)
                add(rules::index_range,
                    "index " + std::to_string(p.index) + " of \"" + p.id +
                        "\" outside [0, " + std::to_string(limit) + "]",
                    {p.id});
            if (p.is_boundary()) {
                if (p.critical_value == 0.0)
                    add(rules::nonzero_boundary_value,
                        "boundary point \"" + p.id + "\" has critical value 0", {p.id});
                if (!d.find_component(p.component))
                    add(rules::dangling_id,
                        "point \"" + p.id + "\" references unknown component \"" + p.component +
                            "\"",
                        {p.id, p.component});
            }
        }
    }

    void check_m_key(const pair_key& key, std::int64_t count) {
        const critical_point* from = d.find_point(key.first);
        const critical_point* to = d.find_point(key.second);
        if (!from || !to) {
            add(rules::dangling_id,
                "m-table key (" + key.first + ", " + key.second + ") references unknown ids",
                {key.first, key.second});
            return;
        }
        if (count == 0) return; // explicit zeros are equivalent to absent entries

        if (from->is_boundary() && to->is_boundary()) {
            // no trajectory through the interior joins one component to itself,
            // whatever the sign classes
            if (from->component == to->component) {
                add(rules::same_component_delta_gamma,
                    "m-table entry (" + key.first + ", " + key.second +
                        ") joins boundary points of one component through the interior",
                    {key.first, key.second});
                return;
            }
            const boundary_component* ci = d.find_component(from->component);
            const boundary_component* cj = d.find_component(to->component);
            if (from->is_positive() || to->is_negative() ||
                (ci && cj && !(ci->constant_c > cj->constant_c))) {
                add(rules::cross_component_constant,
                    "m-table entry (" + key.first + ", " + key.second +
                        ") must run negative-to-positive with strictly decreasing constants",
                    {key.first, key.second});
                return;
            }
        } else if (from->is_positive() || to->is_negative()) {
            // legal sources are interior or boundary-negative, legal targets
            // interior or boundary-positive
            add(rules::kind_m,
                "m-table entry (" + key.first + ", " + key.second +
                    ") has a positive-boundary source or negative-boundary target",
                {key.first, key.second});
            return;
        }
        // Index restrictions.
        const bool delta_source = from->is_negative();
        const int effective = from->index + (delta_source ? 1 : 0);
        if (!(effective > to->index))
            add(rules::index_m,
                "m-table entry (" + key.first + ", " + key.second + ") violates index restriction",
                {key.first, key.second});
    }

    void check_n_key(const pair_key& key, std::int64_t count) {
        const critical_point* from = d.find_point(key.first);
        const critical_point* to = d.find_point(key.second);
        if (!from || !to) {
            add(rules::dangling_id,
                "n-table key (" + key.first + ", " + key.second + ") references unknown ids",
                {key.first, key.second});
            return;
        }
        if (count == 0) return;
        if (!from->is_boundary() || !to->is_boundary() || from->component != to->component) {
            add(rules::kind_n,
                "n-table entry (" + key.first + ", " + key.second +
                    ") must join boundary points of a single component",
                {key.first, key.second});
            return;
        }
        if (from->is_negative() && to->is_positive()) {
            add(rules::neg_to_pos_in_n,
                "n-table entry (" + key.first + ", " + key.second +
                    ") runs from a negative to a positive point",
                {key.first, key.second});
            return;
        }
        if (!(from->index > to->index))
            add(rules::index_n,
                "n-table entry (" + key.first + ", " + key.second + ") violates index restriction",
                {key.first, key.second});
    }
};

} // namespace

validation_report validate(const morse_data& d) {
    rule_checker checker{d, {}};
    checker.check_points();
    for (const auto& [key, count] : d.counts.m_table) checker.check_m_key(key, count);
    for (const auto& [key, count] : d.counts.n_table) checker.check_n_key(key, count);
    validation_report report;
    report.violations = std::move(checker.out);
    report.ok = report.violations.empty();
    return report;
}

std::vector<std::string> generators(const morse_data& d, int k) {
    if (k < 0 || k > d.ambient_dimension)
        throw precondition_error("generator degree " + std::to_string(k) + " outside [0, n]");
    std::vector<std::string> interior, positive;
    for (const auto& p : d.critical_points) {
        if (p.index != k) continue;
        if (!p.is_boundary())
            interior.push_back(p.id);
        else if (p.is_positive())
            positive.push_back(p.id);
        // boundary-negative points are never generators
    }
    std::sort(interior.begin(), interior.end());
    std::sort(positive.begin(), positive.end());
    interior.insert(interior.end(), positive.begin(), positive.end());
    return interior;
}

} // namespace morsehb
