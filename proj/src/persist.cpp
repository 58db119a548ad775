#include "stratmilp/persist.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace stratmilp {

namespace {

constexpr int kFormatVersion = 1;

json bound_to_json(double v) {
    if (v == kInf || v == -kInf) return nullptr;
    return v;
}

double bound_from_json(const json& j, double sign) {
    return j.is_null() ? sign * kInf : j.get<double>();
}

json matrix_to_json(const MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

MatrixXd matrix_from_json(const json& j) {
    const auto r = j.size();
    const auto c = r ? j[0].size() : 0;
    MatrixXd m(r, c);
    for (size_t i = 0; i < r; ++i) {
        if (j[i].size() != c) throw std::runtime_error("ragged matrix in checkpoint");
        for (size_t k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
    }
    return m;
}

json vector_to_json(const VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

VectorXd vector_from_json(const json& j) {
    VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
    return v;
}

void check_version(const json& j, const char* what) {
    if (!j.contains("format_version") || j["format_version"].get<int>() != kFormatVersion)
        throw std::runtime_error(std::string(what) + ": unsupported format_version");
}

json strategy_to_json(const Strategy& s) {
    return json{{"tight_set", s.tight_set}, {"integer_values", s.integer_values}};
}

Strategy strategy_from_json(const json& j) {
    Strategy s;
    s.tight_set = j.at("tight_set").get<std::vector<int>>();
    s.integer_values = j.at("integer_values").get<std::vector<long long>>();
    s.key = canonical_strategy_key(s);
    return s;
}

}  // namespace

void atomic_write(const std::string& path, const std::string& content) {
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os << content;
        if (!os) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

json instance_to_json(const MILPInstance& inst) {
    json j;
    j["format_version"] = kFormatVersion;
    j["name"] = inst.name;
    j["n"] = inst.n;
    j["m"] = inst.m;
    j["c"] = inst.c;
    j["A"] = inst.A;
    j["b"] = inst.b;
    json senses = json::array();
    for (auto s : inst.row_sense) senses.push_back(s == RowSense::EQ ? "EQ" : "LE");
    j["row_sense"] = std::move(senses);
    j["integer_index_set"] = inst.integer_index_set;
    json lo = json::array(), hi = json::array();
    for (int k = 0; k < inst.n; ++k) {
        lo.push_back(bound_to_json(inst.lo[k]));
        hi.push_back(bound_to_json(inst.hi[k]));
    }
    j["lo"] = std::move(lo);
    j["hi"] = std::move(hi);
    return j;
}

MILPInstance instance_from_json(const json& j) {
    check_version(j, "instance");
    MILPInstance inst;
    inst.name = j.value("name", std::string());
    inst.n = j.at("n").get<int>();
    inst.m = j.at("m").get<int>();
    inst.c = j.at("c").get<std::vector<double>>();
    inst.A = j.at("A").get<std::vector<double>>();
    inst.b = j.at("b").get<std::vector<double>>();
    for (const auto& s : j.at("row_sense"))
        inst.row_sense.push_back(s.get<std::string>() == "EQ" ? RowSense::EQ
                                                              : RowSense::LE);
    inst.integer_index_set = j.at("integer_index_set").get<std::vector<int>>();
    for (const auto& v : j.at("lo")) inst.lo.push_back(bound_from_json(v, -1.0));
    for (const auto& v : j.at("hi")) inst.hi.push_back(bound_from_json(v, 1.0));
    auto report = validate_instance(inst);
    if (!report.ok())
        throw std::runtime_error("instance invalid after load: " + report.issues[0]);
    return inst;
}

json family_to_json(const ParameterizedFamily& fam) {
    json j;
    j["format_version"] = kFormatVersion;
    j["name"] = fam.name;
    j["radius"] = fam.radius;
    j["base_instance"] = instance_to_json(fam.base_instance);
    json vc = json::array();
    for (const auto& pc : fam.varying) {
        const char* t = pc.target == ParamCoord::Target::B   ? "b"
                        : pc.target == ParamCoord::Target::C ? "c"
                                                             : "A";
        vc.push_back(json{{"target", t}, {"row", pc.row}, {"col", pc.col}});
    }
    j["varying"] = std::move(vc);
    return j;
}

ParameterizedFamily family_from_json(const json& j) {
    check_version(j, "family");
    ParameterizedFamily fam;
    fam.name = j.value("name", std::string());
    fam.radius = j.at("radius").get<double>();
    fam.base_instance = instance_from_json(j.at("base_instance"));
    for (const auto& v : j.at("varying")) {
        ParamCoord pc;
        std::string t = v.at("target").get<std::string>();
        pc.target = t == "b"   ? ParamCoord::Target::B
                    : t == "c" ? ParamCoord::Target::C
                               : ParamCoord::Target::A;
        pc.row = v.at("row").get<int>();
        pc.col = v.at("col").get<int>();
        fam.varying.push_back(pc);
    }
    auto report = validate_family(fam);
    if (!report.ok())
        throw std::runtime_error("family invalid after load: " + report.issues[0]);
    return fam;
}

json library_to_json(const StrategyLibrary& lib) {
    json j;
    j["format_version"] = kFormatVersion;
    j["origin"] = lib.origin == LibraryOrigin::PRUNED ? "PRUNED" : "RAW";
    j["provenance"] = lib.provenance;
    json arr = json::array();
    for (const auto& s : lib.strategies) arr.push_back(strategy_to_json(s));
    j["strategies"] = std::move(arr);
    return j;
}

StrategyLibrary library_from_json(const json& j) {
    check_version(j, "library");
    StrategyLibrary lib;
    lib.origin = j.at("origin").get<std::string>() == "PRUNED" ? LibraryOrigin::PRUNED
                                                               : LibraryOrigin::RAW;
    lib.provenance = j.at("provenance").get<std::vector<int>>();
    for (const auto& s : j.at("strategies"))
        lib.strategies.push_back(strategy_from_json(s));
    return lib;
}

json model_to_json(const RewardModel& m) {
    json j;
    j["format_version"] = kFormatVersion;
    j["version"] = m.version;
    j["feature_dim"] = m.feature_dim;
    json layers = json::array();
    for (const auto& l : m.layers)
        layers.push_back(json{{"Wq", matrix_to_json(l.Wq)},
                              {"Wk", matrix_to_json(l.Wk)},
                              {"Wv", matrix_to_json(l.Wv)}});
    j["layers"] = std::move(layers);
    j["w_out"] = vector_to_json(m.w_out);
    j["b_out"] = m.b_out;
    j["norm_mean"] = vector_to_json(m.norm.mean);
    j["norm_stddev"] = vector_to_json(m.norm.stddev);
    j["reward_mean"] = m.reward_transform.mean;
    j["reward_stddev"] = m.reward_transform.stddev;
    json ic = json::array();
    for (const auto& pc : m.input_coords) {
        const char* t = pc.target == ParamCoord::Target::B   ? "b"
                        : pc.target == ParamCoord::Target::C ? "c"
                                                             : "A";
        ic.push_back(json{{"target", t}, {"row", pc.row}, {"col", pc.col}});
    }
    j["input_coords"] = std::move(ic);
    j["m_mat"] = m.m_mat;
    j["n_int"] = m.n_int;
    return j;
}

RewardModel model_from_json(const json& j) {
    check_version(j, "model checkpoint");
    RewardModel m;
    m.version = j.at("version").get<int>();
    m.feature_dim = j.at("feature_dim").get<int>();
    for (const auto& l : j.at("layers")) {
        AttentionLayer layer;
        layer.Wq = matrix_from_json(l.at("Wq"));
        layer.Wk = matrix_from_json(l.at("Wk"));
        layer.Wv = matrix_from_json(l.at("Wv"));
        m.layers.push_back(std::move(layer));
    }
    m.w_out = vector_from_json(j.at("w_out"));
    m.b_out = j.at("b_out").get<double>();
    m.norm.mean = vector_from_json(j.at("norm_mean"));
    m.norm.stddev = vector_from_json(j.at("norm_stddev"));
    m.reward_transform.mean = j.at("reward_mean").get<double>();
    m.reward_transform.stddev = j.at("reward_stddev").get<double>();
    for (const auto& v : j.at("input_coords")) {
        ParamCoord pc;
        std::string t = v.at("target").get<std::string>();
        pc.target = t == "b"   ? ParamCoord::Target::B
                    : t == "c" ? ParamCoord::Target::C
                               : ParamCoord::Target::A;
        pc.row = v.at("row").get<int>();
        pc.col = v.at("col").get<int>();
        m.input_coords.push_back(pc);
    }
    m.m_mat = j.at("m_mat").get<int>();
    m.n_int = j.at("n_int").get<int>();
    return m;
}

void save_library(const StrategyLibrary& lib, const std::string& path) {
    atomic_write(path, library_to_json(lib).dump(2) + "\n");
}

StrategyLibrary load_library(const std::string& path) {
    return library_from_json(json::parse(read_file(path)));
}

void save_model(const RewardModel& m, const std::string& path) {
    atomic_write(path, model_to_json(m).dump() + "\n");
}

RewardModel load_model(const std::string& path) {
    return model_from_json(json::parse(read_file(path)));
}

void save_dataset(const Dataset& ds, const std::string& dir) {
    fs::create_directories(dir);
    atomic_write(dir + "/family.json", family_to_json(ds.family).dump(2) + "\n");
    atomic_write(dir + "/library.json", library_to_json(ds.library).dump(2) + "\n");

    json meta;
    meta["format_version"] = kFormatVersion;
    meta["num_instances"] = ds.num_instances();
    meta["skipped_seeds"] = ds.skipped_seeds;
    meta["final_good_turing"] = ds.final_good_turing;
    meta["reward_table_complete"] = ds.reward_table_complete();
    atomic_write(dir + "/meta.json", meta.dump(2) + "\n");

    std::ostringstream rec;
    for (const auto& r : ds.records) {
        json j{{"instance_id", r.instance_id}, {"seed", r.seed},
               {"varying", r.varying},        {"f_star", r.f_star},
               {"label_key", r.label_key},    {"label_index", r.label_index}};
        rec << j.dump() << "\n";
    }
    atomic_write(dir + "/records.ndjson", rec.str());

    if (!ds.reward_table.empty()) {
        std::ostringstream rw;
        for (size_t i = 0; i < ds.reward_table.size(); ++i) {
            for (size_t k = 0; k < ds.reward_table[i].size(); ++k) {
                if (!ds.reward_filled[i][k]) continue;
                const auto& e = ds.reward_table[i][k];
                // wall-clock solve time is machine-dependent and is not
                // persisted; identical seeds must give identical files
                json j{{"i", i},
                       {"j", k},
                       {"p", e.infeasibility},
                       {"d", e.suboptimality},
                       {"r", e.reward},
                       {"status", static_cast<int>(e.reduced_status)},
                       {"lp_iterations", e.lp_iterations}};
                rw << j.dump() << "\n";
            }
        }
        atomic_write(dir + "/rewards.ndjson", rw.str());
    }
}

Dataset load_dataset(const std::string& dir) {
    Dataset ds;
    ds.family = family_from_json(json::parse(read_file(dir + "/family.json")));
    ds.library = library_from_json(json::parse(read_file(dir + "/library.json")));

    json meta = json::parse(read_file(dir + "/meta.json"));
    check_version(meta, "dataset meta");
    ds.skipped_seeds = meta.at("skipped_seeds").get<std::vector<uint64_t>>();
    ds.final_good_turing = meta.at("final_good_turing").get<double>();

    std::istringstream rec(read_file(dir + "/records.ndjson"));
    std::string line;
    while (std::getline(rec, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        DatasetRecord r;
        r.instance_id = j.at("instance_id").get<int>();
        r.seed = j.at("seed").get<uint64_t>();
        r.varying = j.at("varying").get<std::vector<double>>();
        r.f_star = j.at("f_star").get<double>();
        r.label_key = j.at("label_key").get<std::string>();
        r.label_index = j.at("label_index").get<int>();
        ds.records.push_back(std::move(r));
    }

    const int n = ds.num_instances();
    const int m = ds.library.size();
    if (fs::exists(dir + "/rewards.ndjson")) {
        ds.reward_table.assign(n, std::vector<EvalRecord>(m));
        ds.reward_filled.assign(n, std::vector<char>(m, 0));
        std::istringstream rw(read_file(dir + "/rewards.ndjson"));
        while (std::getline(rw, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            int i = j.at("i").get<int>();
            int k = j.at("j").get<int>();
            EvalRecord e;
            e.infeasibility = j.at("p").get<double>();
            e.suboptimality = j.at("d").get<double>();
            e.reward = j.at("r").get<double>();
            e.reduced_status = static_cast<ReducedStatus>(j.at("status").get<int>());
            e.solve_time_s = j.value("solve_time_s", 0.0);
            e.lp_iterations = j.at("lp_iterations").get<long>();
            ds.reward_table[i][k] = e;
            ds.reward_filled[i][k] = 1;
        }
    }
    return ds;
}

std::string metrics_to_csv(const Metrics& mt) {
    std::ostringstream os;
    os.precision(17);
    os << "metric,value\n";
    os << "accuracy," << mt.accuracy << "\n";
    os << "mean_infeasibility," << mt.mean_infeasibility << "\n";
    os << "max_infeasibility," << mt.max_infeasibility << "\n";
    os << "mean_suboptimality," << mt.mean_suboptimality << "\n";
    os << "max_suboptimality," << mt.max_suboptimality << "\n";
    os << "median_inference_s," << mt.median_inference_s << "\n";
    os << "median_bnb_s," << mt.median_bnb_s << "\n";
    os << "speedup_ratio," << mt.speedup_ratio << "\n";
    os << "n_instances," << mt.n_instances << "\n";
    os << "\ninstance,p,d,inference_s,bnb_s,choice\n";
    for (int i = 0; i < mt.n_instances; ++i)
        os << i << "," << mt.per_instance_p[i] << "," << mt.per_instance_d[i] << ","
           << mt.per_instance_inference_s[i] << "," << mt.per_instance_bnb_s[i] << ","
           << mt.per_instance_choice[i] << "\n";
    return os.str();
}

void save_metrics(const Metrics& mt, const std::string& path) {
    atomic_write(path, metrics_to_csv(mt));
}

}  // namespace stratmilp
