#include "morsehb/complex.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "morsehb/checked.hpp"

namespace morsehb {

using nlohmann::json;
using nlohmann::ordered_json;

graded_complex assemble_boundary(const morse_data& data) {
    validation_report report = validate(data);
    if (!report.ok)
        throw precondition_error("assemble_boundary requires valid data; first violation: " +
                                 report.violations.front().rule);

    const int n = data.ambient_dimension;
    graded_complex cx;
    cx.ambient_dimension = n;
    cx.generator_lists.resize(n + 1);
    for (int k = 0; k <= n; ++k) cx.generator_lists[k] = generators(data, k);

    for (int k = 1; k <= n; ++k) {
        boundary_matrix bm;
        bm.degree = k;
        bm.rows = cx.generator_lists[k - 1];
        bm.cols = cx.generator_lists[k];
        bm.entries = int_matrix(bm.rows.size(), bm.cols.size());

        std::map<std::string, std::size_t> row_index;
        for (std::size_t i = 0; i < bm.rows.size(); ++i) row_index[bm.rows[i]] = i;

        for (std::size_t j = 0; j < bm.cols.size(); ++j) {
            const critical_point* gen = data.find_point(bm.cols[j]);
            if (!gen->is_boundary()) {
                // interior generator: read the m-table directly
                for (std::size_t i = 0; i < bm.rows.size(); ++i)
                    bm.entries.at(i, j) = data.m_count(gen->id, bm.rows[i]);
            } else {
                // boundary-positive generator: bilinear sums through the
                // degree k-1 negative points of its own component, plus the
                // direct n-table term. The n-table keys are same-component by
                // validation, so iterating them encodes the restriction.
                for (const auto& [key, n_count] : data.counts.n_table) {
                    if (key.first != gen->id || n_count == 0) continue;
                    const critical_point* delta = data.find_point(key.second);
                    if (delta->index != k - 1) continue;
                    if (delta->is_negative()) {
                        for (std::size_t i = 0; i < bm.rows.size(); ++i) {
                            std::int64_t m = data.m_count(delta->id, bm.rows[i]);
                            if (m == 0) continue;
                            bm.entries.at(i, j) =
                                checked_add(bm.entries.at(i, j), checked_mul(n_count, m));
                        }
                    } else if (delta->is_positive()) {
                        auto it = row_index.find(delta->id);
                        if (it != row_index.end())
                            bm.entries.at(it->second, j) =
                                checked_add(bm.entries.at(it->second, j), n_count);
                    }
                }
            }
        }
        cx.boundaries.push_back(std::move(bm));
    }
    return cx;
}

d_squared_report verify_d_squared(const graded_complex& cx) {
    d_squared_report report;
    for (int k = 2; k <= cx.ambient_dimension; ++k) {
        const boundary_matrix& dk = cx.boundary(k);
        const boundary_matrix& dk1 = cx.boundary(k - 1);
        if (dk1.entries.empty() || dk.entries.empty()) continue;
        int_matrix composite = dk1.entries.multiply(dk.entries);
        for (std::size_t i = 0; i < composite.rows(); ++i)
            for (std::size_t j = 0; j < composite.cols(); ++j)
                if (composite.at(i, j) != 0) {
                    report.ok = false;
                    report.degree = k;
                    report.row = i;
                    report.col = j;
                    report.value = composite.at(i, j);
                    return report;
                }
    }
    return report;
}

std::string serialize(const graded_complex& cx) {
    ordered_json doc;
    doc["dimension"] = cx.ambient_dimension;
    ordered_json gens = ordered_json::object();
    for (int k = 0; k <= cx.ambient_dimension; ++k)
        gens[std::to_string(k)] = cx.generator_lists[k];
    doc["generators"] = std::move(gens);
    ordered_json bnd = ordered_json::object();
    for (const auto& bm : cx.boundaries) {
        ordered_json rows = ordered_json::array();
        for (std::size_t i = 0; i < bm.entries.rows(); ++i) {
            ordered_json row = ordered_json::array();
            for (std::size_t j = 0; j < bm.entries.cols(); ++j) row.push_back(bm.entries.at(i, j));
            rows.push_back(std::move(row));
        }
        bnd[std::to_string(bm.degree)] = std::move(rows);
    }
    doc["boundary"] = std::move(bnd);
    return doc.dump(2) + "\n";
}

graded_complex parse_graded_complex(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("JSON syntax error: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("dimension") || !doc.contains("generators") ||
        !doc.contains("boundary"))
        throw parse_error("complex document needs dimension, generators, boundary");
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (it.key() != "dimension" && it.key() != "generators" && it.key() != "boundary")
            throw parse_error("unknown field \"" + it.key() + "\" in complex document");

    graded_complex cx;
    if (!doc["dimension"].is_number_integer()) throw parse_error("dimension must be an integer");
    cx.ambient_dimension = doc["dimension"].get<int>();
    if (cx.ambient_dimension < 0) throw parse_error("dimension must be nonnegative");
    cx.generator_lists.assign(cx.ambient_dimension + 1, {});
    for (int k = 0; k <= cx.ambient_dimension; ++k) {
        auto key = std::to_string(k);
        if (!doc["generators"].contains(key))
            throw parse_error("missing generator list for degree " + key);
        for (const auto& id : doc["generators"][key]) {
            if (!id.is_string()) throw parse_error("generator ids must be strings");
            cx.generator_lists[k].push_back(id.get<std::string>());
        }
    }
    for (int k = 1; k <= cx.ambient_dimension; ++k) {
        auto key = std::to_string(k);
        boundary_matrix bm;
        bm.degree = k;
        bm.rows = cx.generator_lists[k - 1];
        bm.cols = cx.generator_lists[k];
        bm.entries = int_matrix(bm.rows.size(), bm.cols.size());
        if (!doc["boundary"].contains(key))
            throw parse_error("missing boundary matrix for degree " + key);
        const json& rows = doc["boundary"][key];
        if (!rows.is_array() || rows.size() != bm.rows.size())
            throw parse_error("boundary matrix of degree " + key + " has wrong row count");
        for (std::size_t i = 0; i < bm.rows.size(); ++i) {
            const json& row = rows[i];
            if (!row.is_array() || row.size() != bm.cols.size())
                throw parse_error("boundary matrix of degree " + key + " has wrong column count");
            for (std::size_t j = 0; j < bm.cols.size(); ++j) {
                if (!row[j].is_number_integer())
                    throw parse_error("boundary matrix entries must be integers");
                bm.entries.at(i, j) = row[j].get<std::int64_t>();
            }
        }
        cx.boundaries.push_back(std::move(bm));
    }
    return cx;
}

} // namespace morsehb
