#include "svo/runner.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "svo/json_io.hpp"

namespace svo {

using json = nlohmann::ordered_json;

namespace {

Vec vec_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty())
        throw ConfigError("config: field '" + field + "' must be a non-empty array");
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw ConfigError("config: field '" + field + "' has a non-numeric entry");
        v(i) = j[i].get<double>();
    }
    return v;
}

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i)
        a.push_back(v(i));
    return a;
}

double env_override(const char* name, double fallback) {
    const char* s = std::getenv(name);
    if (!s)
        return fallback;
    return std::strtod(s, nullptr);
}

}  // namespace

RunConfig load_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }

    RunConfig cfg;
    if (!j.contains("plant") || !j["plant"].contains("n") || !j["plant"].contains("d"))
        throw ConfigError("config: missing plant.n / plant.d");
    cfg.n = vec_from_json(j["plant"]["n"], "plant.n");
    cfg.d = vec_from_json(j["plant"]["d"], "plant.d");
    if (!j.contains("x0"))
        throw ConfigError("config: missing x0");
    cfg.x0 = vec_from_json(j["x0"], "x0");

    if (!j.contains("horizon") || !j["horizon"].is_number_integer())
        throw ConfigError("config: missing integer horizon");
    cfg.horizon = j["horizon"].get<int>();
    if (cfg.horizon < 1)
        throw ConfigError("config: horizon must be >= 1");

    if (j.contains("measurements")) {
        const auto& mj = j["measurements"];
        if (mj.is_array()) {
            for (const auto& e : mj)
                cfg.measurements.push_back(e.get<double>());
            if (static_cast<int>(cfg.measurements.size()) != cfg.horizon)
                throw ConfigError("config: measurements length must equal horizon");
        } else if (mj.is_object()) {
            cfg.seeded = true;
            cfg.seed = mj.value("seed", 0ULL);
            const std::string law = mj.value("law", "uniform");
            if (law == "uniform")
                cfg.law = DisturbanceLaw::Uniform;
            else if (law == "vertex")
                cfg.law = DisturbanceLaw::Vertex;
            else
                throw ConfigError("config: measurements.law must be 'uniform' or 'vertex'");
        } else {
            throw ConfigError("config: measurements must be an array or {seed, law}");
        }
    } else {
        cfg.seeded = true;
    }

    cfg.bounds_check = j.value("bounds_check", true);
    cfg.oracle = j.value("oracle", true);
    cfg.sample_density = j.value("sample_density", 64);
    if (cfg.sample_density < 0)
        throw ConfigError("config: sample_density must be >= 0");

    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        cfg.tol.alignment = t.value("alignment", cfg.tol.alignment);
        cfg.tol.geometry = t.value("geometry", cfg.tol.geometry);
        cfg.tol.lp_feas = t.value("lp_feas", cfg.tol.lp_feas);
        cfg.tol.lp_opt = t.value("lp_opt", cfg.tol.lp_opt);
        cfg.tol.defect_rel = t.value("defect_rel", cfg.tol.defect_rel);
    }
    cfg.tol.alignment = env_override("SVO_TOL_ALIGNMENT", cfg.tol.alignment);
    cfg.tol.geometry = env_override("SVO_TOL_GEOMETRY", cfg.tol.geometry);
    cfg.tol.lp_feas = env_override("SVO_TOL_LP_FEAS", cfg.tol.lp_feas);
    cfg.tol.lp_opt = env_override("SVO_TOL_LP_OPT", cfg.tol.lp_opt);
    cfg.tol.defect_rel = env_override("SVO_TOL_DEFECT_REL", cfg.tol.defect_rel);
    return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_config(text);
}

RunReport run(const RunConfig& config) {
    RunReport report;
    report.config = config;

    PlantModel model = make_plant_model(config.n, config.d);
    if (config.x0.size() != model.m())
        throw ConfigError("config: x0 length must equal the plant order");

    std::vector<double> z = config.measurements;
    std::optional<Trajectory> truth;
    if (config.seeded) {
        auto [v, w] = sample_disturbances(config.seed, config.horizon, config.law);
        truth = simulate(model, config.x0, v, w);
        z = truth->z;
    } else if (config.bounds_check) {
        // Explicit measurements carry no disturbance realization to check;
        // feasibility surfaces as EmptyFront during the recursion.
    }

    ProblemHistory h{model.spec, config.x0, z};

    StepOptions opts;
    opts.sample_density = config.sample_density;
    opts.tol = config.tol.geometry;
    opts.defect_rel = config.tol.defect_rel;

    Polytope oracle_set = convex_hull(model.m(), {config.x0});
    Polytope front_trace = oracle_set;  // warm-up uses the exact recursion
    std::optional<Front> front;

    for (int k = 1; k <= config.horizon; ++k) {
        const double zk = z[k - 1];
        StepRecord rec;
        rec.k = k;
        rec.z = zk;
        try {
            if (!front) {
                front_trace = oracle_step(front_trace, model, zk, k);
                oracle_set = front_trace;
                rec.warmup = true;
                rec.vertices = front_trace.vertices();
                rec.halfspaces = front_trace.halfspaces();
                if (front_trace.full_dimensional()) {
                    Front f = make_front(front_trace, k,
                                         std::vector<double>(z.begin(), z.begin() + k));
                    rec.boundary_points = f.boundary_points;
                    front = std::move(f);
                }
            } else {
                if (config.oracle)
                    oracle_set = oracle_step(oracle_set, model, zk, k);
                StepReport srep;
                Front next = propagate_front(*front, zk, model, opts,
                                             config.oracle ? &oracle_set : nullptr, &srep);
                front = std::move(next);
                rec.vertices = front->polytope.vertices();
                rec.halfspaces = front->polytope.halfspaces();
                rec.boundary_points = front->boundary_points;
                rec.defects = srep.defects;
            }
            if (config.oracle)
                rec.oracle_vertices = oracle_set.vertices();
            if (truth)
                rec.true_state = truth->state(k);
            report.steps.push_back(std::move(rec));
        } catch (const EmptySetAtStep&) {
            report.exit_code = 2;
            report.stop_reason = "empty uncertainty set at step " + std::to_string(k);
            return report;
        } catch (const EmptyFront&) {
            report.exit_code = 2;
            report.stop_reason = "empty uncertainty set at step " + std::to_string(k);
            return report;
        } catch (const DegenerateFront&) {
            report.exit_code = 3;
            report.stop_reason = "degenerate uncertainty set at step " + std::to_string(k);
            return report;
        }
    }
    return report;
}

std::string report_to_json(const RunReport& report) {
    json j;
    j["plant"]["n"] = vec_to_json(report.config.n);
    j["plant"]["d"] = vec_to_json(report.config.d);
    j["x0"] = vec_to_json(report.config.x0);
    j["horizon"] = report.config.horizon;
    j["exit_code"] = report.exit_code;
    j["stop_reason"] = report.stop_reason;

    json steps = json::array();
    for (const auto& s : report.steps) {
        json sj;
        sj["k"] = s.k;
        sj["z"] = s.z;
        sj["warmup"] = s.warmup;
        sj["front"]["vertices"] = json::array();
        for (const auto& v : s.vertices)
            sj["front"]["vertices"].push_back(vec_to_json(v));
        sj["front"]["halfspaces"] = json::array();
        for (const auto& h : s.halfspaces) {
            json hj;
            hj["normal"] = vec_to_json(h.normal);
            hj["offset"] = h.offset;
            sj["front"]["halfspaces"].push_back(hj);
        }
        sj["boundary_points"] = json::array();
        for (const auto& bp : s.boundary_points) {
            json b;
            b["point"] = vec_to_json(bp.point);
            b["cone"] = cone_to_json(bp.cone);
            sj["boundary_points"].push_back(b);
        }
        sj["oracle_vertices"] = json::array();
        for (const auto& v : s.oracle_vertices)
            sj["oracle_vertices"].push_back(vec_to_json(v));
        sj["defects"] = json::array();
        for (const auto& v : s.defects)
            sj["defects"].push_back(vec_to_json(v));
        if (s.true_state)
            sj["true_state"] = vec_to_json(*s.true_state);
        steps.push_back(sj);
    }
    j["steps"] = steps;
    return j.dump(2);
}

RunReport report_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    RunReport r;
    r.config.n = vec_from_json(j.at("plant").at("n"), "plant.n");
    r.config.d = vec_from_json(j.at("plant").at("d"), "plant.d");
    r.config.x0 = vec_from_json(j.at("x0"), "x0");
    r.config.horizon = j.at("horizon").get<int>();
    r.exit_code = j.at("exit_code").get<int>();
    r.stop_reason = j.at("stop_reason").get<std::string>();
    for (const auto& sj : j.at("steps")) {
        StepRecord s;
        s.k = sj.at("k").get<int>();
        s.z = sj.at("z").get<double>();
        s.warmup = sj.value("warmup", false);
        for (const auto& v : sj.at("front").at("vertices"))
            s.vertices.push_back(vec_from_json(v, "vertices"));
        for (const auto& h : sj.at("front").at("halfspaces"))
            s.halfspaces.push_back(
                {vec_from_json(h.at("normal"), "normal"), h.at("offset").get<double>()});
        for (const auto& b : sj.at("boundary_points"))
            s.boundary_points.push_back(
                {vec_from_json(b.at("point"), "point"), cone_from_json(b.at("cone"))});
        for (const auto& v : sj.at("oracle_vertices"))
            s.oracle_vertices.push_back(vec_from_json(v, "oracle_vertices"));
        for (const auto& v : sj.at("defects"))
            s.defects.push_back(vec_from_json(v, "defects"));
        if (sj.contains("true_state"))
            s.true_state = vec_from_json(sj["true_state"], "true_state");
        r.steps.push_back(std::move(s));
    }
    return r;
}

void export_plot(const RunReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    std::ofstream poly(out_dir / "polygons.csv");
    if (!poly)
        throw std::runtime_error("export_plot: cannot write " +
                                 (out_dir / "polygons.csv").string());
    poly << "step,source,index,x1,x2\n";
    char buf[64];
    auto emit = [&](std::ofstream& os, double x) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        os << buf;
    };
    for (const auto& s : report.steps) {
        auto write_loop = [&](const std::vector<Vec>& verts, const char* source) {
            if (verts.empty())
                return;
            for (std::size_t i = 0; i <= verts.size(); ++i) {
                const Vec& v = verts[i % verts.size()];
                poly << s.k << ',' << source << ',' << i << ',';
                emit(poly, v(0));
                poly << ',';
                emit(poly, v.size() > 1 ? v(1) : 0.0);
                poly << '\n';
            }
        };
        write_loop(s.vertices, "front");
        write_loop(s.oracle_vertices, "oracle");
    }

    std::ofstream cones(out_dir / "cones.csv");
    cones << "step,point_index,ray_index,base_x1,base_x2,ray_x1,ray_x2\n";
    for (const auto& s : report.steps) {
        for (std::size_t i = 0; i < s.boundary_points.size(); ++i) {
            const auto& bp = s.boundary_points[i];
            for (std::size_t r = 0; r < bp.cone.generators.size(); ++r) {
                const Vec& g = bp.cone.generators[r];
                cones << s.k << ',' << i << ',' << r << ',';
                emit(cones, bp.point(0));
                cones << ',';
                emit(cones, bp.point.size() > 1 ? bp.point(1) : 0.0);
                cones << ',';
                emit(cones, g(0));
                cones << ',';
                emit(cones, g.size() > 1 ? g(1) : 0.0);
                cones << '\n';
            }
        }
    }
}

}  // namespace svo
