// morsehb: Morse homology of surfaces with cone-like boundary collars.
// Subcommand tool over the core library; see README for the file formats.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "morsehb/complex.hpp"
#include "morsehb/corpus.hpp"
#include "morsehb/flow.hpp"
#include "morsehb/homology.hpp"
#include "morsehb/morse_data.hpp"

using namespace morsehb;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;  // validation / verification / comparison failed
constexpr int exit_usage = 2;    // bad arguments or unreadable input
constexpr int exit_numeric = 3;  // quorum / overflow / refusal

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool looks_like_complex(const std::string& text) {
    auto doc = nlohmann::json::parse(text, nullptr, false);
    return doc.is_object() && doc.contains("boundary") && doc.contains("generators");
}

graded_complex load_complex(const std::string& path) {
    const std::string text = slurp(path);
    if (looks_like_complex(text)) return parse_graded_complex(text);
    return assemble_boundary(parse_morse_data(text));
}

shooting_config config_from_env() {
    shooting_config cfg;
    if (const char* seed = std::getenv("MORSEHB_SEED")) cfg.seed = std::strtoull(seed, nullptr, 10);
    return cfg;
}

std::string group_to_string(const homology_group& g) {
    std::ostringstream os;
    bool first = true;
    if (g.betti > 0) {
        os << "Z";
        if (g.betti > 1) os << "^" << g.betti;
        first = false;
    }
    for (auto t : g.torsion) {
        if (!first) os << " + ";
        os << "Z/" << t;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

int cmd_validate(const std::string& file) {
    morse_data data = parse_morse_data(slurp(file));
    validation_report report = validate(data);
    if (report.ok) {
        std::cout << "ok: " << data.critical_points.size() << " critical points, "
                  << data.boundary_components.size() << " boundary components\n";
        return exit_ok;
    }
    for (const auto& v : report.violations) std::cout << v.rule << ": " << v.message << "\n";
    return exit_failure;
}

int cmd_boundary(const std::string& file, bool json) {
    graded_complex cx = assemble_boundary(parse_morse_data(slurp(file)));
    if (json) {
        std::cout << serialize(cx);
        return exit_ok;
    }
    for (int k = 1; k <= cx.ambient_dimension; ++k) {
        const boundary_matrix& bm = cx.boundary(k);
        std::cout << "d_" << k << ": " << bm.rows.size() << " x " << bm.cols.size() << "\n";
        for (std::size_t i = 0; i < bm.entries.rows(); ++i) {
            std::cout << "  ";
            for (std::size_t j = 0; j < bm.entries.cols(); ++j)
                std::cout << (j ? " " : "") << bm.entries.at(i, j);
            std::cout << "   # " << bm.rows[i] << "\n";
        }
    }
    return exit_ok;
}

int cmd_verify(const std::string& file) {
    graded_complex cx = load_complex(file);
    d_squared_report report = verify_d_squared(cx);
    if (report.ok) {
        std::cout << "chain complex: d o d = 0\n";
        return exit_ok;
    }
    std::cout << "not a chain complex: degree " << report.degree << " entry (" << report.row
              << ", " << report.col << ") = " << report.value << "\n";
    return exit_failure;
}

int cmd_homology(const std::string& file, bool json, bool force) {
    graded_complex cx = load_complex(file);
    homology_result h = homology(cx, force);
    if (json) {
        std::cout << serialize(h);
    } else {
        for (const auto& g : h.groups)
            std::cout << "H_" << g.degree << " = " << group_to_string(g) << "\n";
    }
    return exit_ok;
}

int cmd_inequalities(const std::string& file, const std::string& betti_csv) {
    morse_data data = parse_morse_data(slurp(file));
    std::vector<std::int64_t> betti;
    std::stringstream ss(betti_csv);
    std::string item;
    while (std::getline(ss, item, ',')) betti.push_back(std::stoll(item));
    inequality_report report = morse_inequalities(data, betti);
    for (const auto& line : report.lines)
        std::cout << "degree " << line.degree << ": " << line.lhs
                  << (line.holds ? " >= " : " <  ") << line.rhs
                  << (line.holds ? "" : "   VIOLATED") << "\n";
    if (report.all_hold)
        std::cout << (report.all_equal ? "holds (equality) in all degrees\n"
                                       : "holds in all degrees\n");
    else
        std::cout << "violated\n";
    return report.all_hold ? exit_ok : exit_failure;
}

int cmd_euler(const std::string& file) {
    std::cout << euler_characteristic(parse_morse_data(slurp(file))) << "\n";
    return exit_ok;
}

int cmd_circle(const std::string& points_csv, int orientation, bool json) {
    circle_morse_function f;
    f.component = "cli";
    f.orientation = orientation;
    std::stringstream ss(points_csv);
    std::string item;
    int index = 0;
    std::vector<std::pair<double, double>> raw;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw usage_error("--points expects angle:value pairs separated by commas");
        raw.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    }
    if (raw.size() < 2) throw usage_error("need at least two angle:value pairs");
    std::sort(raw.begin(), raw.end());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double prev = raw[(i + raw.size() - 1) % raw.size()].second;
        const double next = raw[(i + 1) % raw.size()].second;
        circle_critical_point cp;
        cp.id = "c" + std::to_string(index++);
        cp.angle = raw[i].first;
        cp.value = raw[i].second;
        if (raw[i].second > prev && raw[i].second > next)
            cp.type = circle_point_type::maximum;
        else if (raw[i].second < prev && raw[i].second < next)
            cp.type = circle_point_type::minimum;
        else
            throw usage_error("values must alternate strictly around the circle");
        f.points.push_back(std::move(cp));
    }

    auto trajectories = circle_trajectories(f);
    nlohmann::ordered_json out;
    out["points"] = nlohmann::ordered_json::array();
    for (const auto& p : f.points) {
        nlohmann::ordered_json jp;
        jp["id"] = p.id;
        jp["angle"] = p.angle;
        jp["value"] = p.value;
        jp["type"] = p.type == circle_point_type::maximum ? "max" : "min";
        out["points"].push_back(std::move(jp));
    }
    out["trajectories"] = nlohmann::ordered_json::array();
    for (const auto& t : trajectories) {
        nlohmann::ordered_json jt;
        jt["from"] = t.from;
        jt["to"] = t.to;
        jt["direction"] = t.direction == arc_direction::ccw ? "ccw" : "cw";
        out["trajectories"].push_back(std::move(jt));
    }
    out["counts"] = nlohmann::ordered_json::array();
    for (const auto& a : f.points) {
        if (a.type != circle_point_type::maximum) continue;
        for (const auto& b : f.points) {
            if (b.type != circle_point_type::minimum) continue;
            const bool a_pos = a.value > 0, b_pos = b.value > 0;
            if (!a_pos && b_pos) continue;
            std::int64_t count = a_pos && !b_pos
                                     ? signed_count_pos_to_neg(f, a.id, b.id, f.orientation)
                                     : signed_count_same_sign(f, a.id, b.id);
            nlohmann::ordered_json jc;
            jc["from"] = a.id;
            jc["to"] = b.id;
            jc["count"] = count;
            out["counts"].push_back(std::move(jc));
        }
    }
    if (json) {
        std::cout << out.dump(2) << "\n";
    } else {
        for (const auto& p : out["points"])
            std::cout << p["id"].get<std::string>() << " @ " << p["angle"].get<double>() << " = "
                      << p["value"].get<double>() << " (" << p["type"].get<std::string>() << ")\n";
        for (const auto& t : out["trajectories"])
            std::cout << t["from"].get<std::string>() << " -> " << t["to"].get<std::string>()
                      << " (" << t["direction"].get<std::string>() << ")\n";
        for (const auto& c : out["counts"])
            std::cout << "N(" << c["from"].get<std::string>() << ", "
                      << c["to"].get<std::string>() << ") = " << c["count"].get<std::int64_t>()
                      << "\n";
    }
    return exit_ok;
}

int cmd_flow_trace(const std::string& problem, const std::string& start_csv, bool backward,
                   double t_max) {
    flow_problem fp = parse_flow_problem(slurp(problem));
    check_flow_problem(fp);
    auto comma = start_csv.find(',');
    if (comma == std::string::npos) throw usage_error("--start expects phi,s");
    std::array<double, 2> start{std::stod(start_csv.substr(0, comma)),
                                std::stod(start_csv.substr(comma + 1))};
    shooting_config cfg = config_from_env();
    if (t_max > 0) cfg.t_max = t_max;
    trajectory tr = integrate_trajectory(
        fp, start, backward ? flow_direction::backward : flow_direction::forward, cfg);
    const limit_classification& limit = backward ? tr.backward_limit : tr.forward_limit;
    std::cout << "samples: " << tr.samples.size() << "\n";
    const std::size_t stride = std::max<std::size_t>(1, tr.samples.size() / 20);
    for (std::size_t i = 0; i < tr.samples.size(); i += stride)
        std::cout << "t=" << tr.times[i] << " phi=" << tr.samples[i][0]
                  << " s=" << tr.samples[i][1] << " f=" << tr.f_values[i] << "\n";
    std::cout << "limit: ";
    switch (limit.result) {
        case limit_classification::outcome::point: std::cout << limit.id; break;
        case limit_classification::outcome::escaped: std::cout << "escaped"; break;
        case limit_classification::outcome::undecided: std::cout << "undecided"; break;
    }
    if (!limit.detail.empty()) std::cout << " (" << limit.detail << ")";
    std::cout << "\n";
    return exit_ok;
}

int cmd_flow_count(const std::string& problem, const std::string& from, const std::string& to,
                   double t_max) {
    flow_problem fp = parse_flow_problem(slurp(problem));
    check_flow_problem(fp);
    shooting_config cfg = config_from_env();
    if (t_max > 0) cfg.t_max = t_max;
    count_certificate cert = count_m(fp, from, to, cfg);
    std::cout << "count = " << cert.count << "\n";
    std::cout << "samples: " << cert.total_samples << ", undecided: " << cert.undecided_samples
              << "\n";
    for (const auto& cls : cert.classes)
        std::cout << "  class -> " << cls.target << (cls.from_bisection ? " (bisected)" : "")
                  << (cls.target == to ? (cls.sign > 0 ? "  sign +1" : "  sign -1") : "") << "\n";
    return exit_ok;
}

int cmd_flow_build(const std::string& problem, const std::string& output) {
    flow_problem fp = parse_flow_problem(slurp(problem));
    morse_data data = build_morse_data(fp, config_from_env());
    const std::string text = serialize(data);
    if (output.empty() || output == "-") {
        std::cout << text;
    } else {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw usage_error("cannot write " + output);
        out << text;
        std::cout << "wrote " << output << "\n";
    }
    return exit_ok;
}

int cmd_convert_end(double from_a, double to_a, double r) {
    end_conversion c = convert_end(from_a, to_a, r);
    std::cout << "r_bar = " << c.r_bar << "\n";
    std::cout << "g_scale = " << c.g_scale << "\n";
    std::cout << "f_scale = " << c.f_scale << "\n";
    return exit_ok;
}

int cmd_corpus_list() {
    for (const auto& e : corpus_entries()) {
        std::cout << e.name << ": " << e.description << "\n";
        std::cout << "  reference homology: ";
        for (const auto& g : e.reference.groups)
            std::cout << (g.degree ? ", " : "") << "H_" << g.degree << " = "
                      << group_to_string(g);
        std::cout << "; euler " << e.reference_euler << "\n";
    }
    return exit_ok;
}

int cmd_corpus_run(const std::vector<std::string>& names, bool use_flow, bool json) {
    run_report report = corpus_run(names, use_flow, config_from_env());
    if (json) {
        std::cout << to_json(report);
    } else {
        for (const auto& e : report.entries) {
            std::cout << e.name << ": " << (e.passed ? "pass" : "FAIL") << "  (" << e.wall_seconds
                      << " s)\n";
            for (const auto& s : e.stages)
                std::cout << "  " << s.stage << ": " << (s.ok ? "ok" : "FAILED") << " " << s.detail
                          << "\n";
        }
    }
    return report.all_passed ? exit_ok : exit_failure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Morse homology of compact oriented surfaces with boundary"};
    app.require_subcommand(1);

    std::string file, problem, output, betti_csv, points_csv, start_csv, from_id, to_id;
    bool json = false, force = false, use_flow = false, backward = false;
    int orientation = 1;
    double from_a = 0, to_a = 0, radius = 0, t_max = 0;
    std::vector<std::string> names;

    auto* validate_cmd = app.add_subcommand("validate", "check a data document");
    validate_cmd->add_option("file", file)->required();

    auto* boundary_cmd = app.add_subcommand("boundary", "assemble the boundary matrices");
    boundary_cmd->add_option("file", file)->required();
    boundary_cmd->add_flag("--json", json);

    auto* verify_cmd = app.add_subcommand("verify", "certify d o d = 0");
    verify_cmd->add_option("file", file)->required();

    auto* homology_cmd = app.add_subcommand("homology", "integer homology");
    homology_cmd->add_option("file", file)->required();
    homology_cmd->add_flag("--json", json);
    homology_cmd->add_flag("--force", force, "compute even if d o d != 0");

    auto* ineq_cmd = app.add_subcommand("inequalities", "generator-count inequalities");
    ineq_cmd->add_option("file", file)->required();
    ineq_cmd->add_option("--betti", betti_csv)->required();

    auto* euler_cmd = app.add_subcommand("euler", "euler characteristic");
    euler_cmd->add_option("file", file)->required();

    auto* circle_cmd = app.add_subcommand("circle", "exact circle trajectory counts");
    circle_cmd->add_option("--points", points_csv, "angle:value,...")->required();
    circle_cmd->add_option("--orientation", orientation)->check(CLI::IsMember({-1, 1}));
    circle_cmd->add_flag("--json", json);

    auto* flow_cmd = app.add_subcommand("flow", "numerical gradient-flow engine");
    flow_cmd->require_subcommand(1);
    auto* trace_cmd = flow_cmd->add_subcommand("trace", "integrate one trajectory");
    trace_cmd->add_option("problem", problem)->required();
    trace_cmd->add_option("--start", start_csv, "phi,s")->required();
    trace_cmd->add_flag("--backward", backward);
    trace_cmd->add_option("--t-max", t_max);
    auto* count_cmd = flow_cmd->add_subcommand("count", "signed trajectory count");
    count_cmd->add_option("problem", problem)->required();
    count_cmd->add_option("--from", from_id)->required();
    count_cmd->add_option("--to", to_id)->required();
    count_cmd->add_option("--t-max", t_max);
    auto* build_cmd = flow_cmd->add_subcommand("build", "produce a data document by shooting");
    build_cmd->add_option("problem", problem)->required();
    build_cmd->add_option("-o,--output", output);

    auto* convert_cmd = app.add_subcommand("convert-end", "end-family change of variables");
    convert_cmd->add_option("--from-a", from_a)->required();
    convert_cmd->add_option("--to-a", to_a)->required();
    convert_cmd->add_option("--r", radius)->required();

    auto* corpus_cmd = app.add_subcommand("corpus", "built-in worked examples");
    corpus_cmd->require_subcommand(1);
    auto* list_cmd = corpus_cmd->add_subcommand("list", "entry summaries");
    auto* run_cmd = corpus_cmd->add_subcommand("run", "full pipeline per entry");
    run_cmd->add_option("names", names, "subset of entries (default all)");
    run_cmd->add_flag("--use-flow", use_flow, "regenerate the data by shooting");
    run_cmd->add_flag("--json", json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*validate_cmd) return cmd_validate(file);
        if (*boundary_cmd) return cmd_boundary(file, json);
        if (*verify_cmd) return cmd_verify(file);
        if (*homology_cmd) return cmd_homology(file, json, force);
        if (*ineq_cmd) return cmd_inequalities(file, betti_csv);
        if (*euler_cmd) return cmd_euler(file);
        if (*circle_cmd) return cmd_circle(points_csv, orientation, json);
        if (*trace_cmd) return cmd_flow_trace(problem, start_csv, backward, t_max);
        if (*count_cmd) return cmd_flow_count(problem, from_id, to_id, t_max);
        if (*build_cmd) return cmd_flow_build(problem, output);
        if (*convert_cmd) return cmd_convert_end(from_a, to_a, radius);
        if (*list_cmd) return cmd_corpus_list();
        if (*run_cmd) return cmd_corpus_run(names, use_flow, json);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    } catch (const overflow_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    } catch (const precondition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
