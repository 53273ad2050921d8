#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "density.hpp"
#include "dyadic.hpp"
#include "limit_ratio.hpp"
#include "shift.hpp"
#include "weights.hpp"

namespace densilab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::string family = "cesaro";
    std::string f = "identity";
    std::string set = "naturals";
    std::string closed_form = "identity";
    std::uint64_t kmax = 0;
    std::uint64_t horizon = 0;
    int pmax = 2;
    double r = 0.5;
    std::string params = "default";
    std::string out;
    std::string format = "csv";
};

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += "\"\"";
        else q += c;
    }
    q += "\"";
    return q;
}

class CsvBuilder {
public:
    explicit CsvBuilder(std::vector<std::string> header) { row(header); }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ += ',';
            out_ += csv_field(cells[i]);
        }
        out_ += "\r\n";
    }
    const std::string& str() const { return out_; }

private:
    std::string out_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << content;
}

inline nlohmann::json shift_params_json(const ShiftParameters& prm) {
    return nlohmann::json{{"a", prm.a},
                          {"eps", prm.eps},
                          {"b_formula", prm.b_formula()},
                          {"partition", "2adic"},
                          {"horizon", prm.horizon}};
}

inline ShiftParameters load_shift_params(const std::string& spec) {
    if (spec == "default" || spec.empty()) return derive_parameters();
    std::ifstream f(spec);
    if (!f) throw ConfigError("cannot read params file: " + spec);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad params file: ") + e.what());
    }
    ShiftParameters prm;
    prm.a = j.at("a").get<int>();
    prm.eps = j.at("eps").get<double>();
    prm.horizon = j.value("horizon", std::uint64_t{10000000});
    if (j.value("partition", "2adic") != std::string("2adic"))
        throw ConfigError("unsupported partition kind");
    std::string bf = j.value("b_formula", std::string());
    if (!bf.empty()) {
        auto pos = bf.find("p^");
        if (pos == std::string::npos) throw ConfigError("unsupported b_formula: " + bf);
        prm.b_exponent = std::stoi(bf.substr(pos + 2));
    }
    if (auto err = shift_candidate_error(prm))
        throw ConfigError("params file fails invariants: " + *err);
    return prm;
}

inline IntegerSet make_set(const std::string& spec, std::uint64_t horizon) {
    if (spec == "naturals") return IntegerSet::naturals();
    if (spec == "squares") return IntegerSet::squares();
    if (spec == "powers2") return IntegerSet::powers_of_two();
    if (spec == "blocks4") return IntegerSet::dyadic_blocks(horizon);
    if (spec.rfind("multiples:", 0) == 0)
        return IntegerSet::multiples(std::stoull(spec.substr(10)));
    if (spec.rfind("nk:", 0) == 0) return nk_set(StepFunction::parse(spec.substr(3)));
    throw ConfigError("unknown set spec: " + spec);
}

namespace detail {

inline std::string summary_path(const RunConfig& cfg) {
    return cfg.out + ".summary.json";
}

inline void write_summary(const RunConfig& cfg, nlohmann::json j) {
    j["command"] = cfg.command;
    write_file(summary_path(cfg), j.dump(2) + "\n");
}

inline int run_density(const RunConfig& cfg, std::ostream& diag) {
    std::uint64_t horizon = cfg.horizon ? cfg.horizon : 100000;
    WeightFamily fam = WeightFamily::parse(cfg.family);
    nlohmann::json sum{{"set", cfg.set}, {"family", fam.name()}, {"horizon", horizon}};
    if (cfg.set.rfind("nk:", 0) == 0) {
        // subsequence route: horizon counts terms of (n_k)
        StepFunction f = StepFunction::parse(cfg.set.substr(3));
        auto rep = limit_ratio_report(f, fam, horizon);
        CsvBuilder csv({"k", "n_k", "ratio"});
        SequenceStream s(f);
        for (std::uint64_t k = 1; k <= horizon; ++k) {
            u128 n = s.next();
            csv.row({std::to_string(k), u128_to_string(n), fmt17(rep.rho[k - 1])});
        }
        write_file(cfg.out, csv.str());
        sum["tail_min"] = rep.tail_min;
        sum["entry_decay_warning"] = rep.entry_decay_warning;
        nlohmann::json dips = nlohmann::json::array();
        for (auto [k, v] : rep.lambda_dips) dips.push_back({{"k", k}, {"ratio", v}});
        sum["lambda_dips"] = dips;
        write_summary(cfg, sum);
        diag << "density: tail_min=" << fmt17(rep.tail_min) << "\n";
        return 0;
    }
    IntegerSet E = make_set(cfg.set, horizon);
    auto est = density_estimate(E, fam, horizon);
    CsvBuilder csv({"n", "ratio"});
    for (auto [n, r] : est.ratios) csv.row({std::to_string(n), fmt17(r)});
    write_file(cfg.out, csv.str());
    sum["liminf_proxy"] = est.liminf_proxy;
    sum["limsup_proxy"] = est.limsup_proxy;
    sum["limsup_cross_check"] = est.limsup_cross_check;
    sum["tail_oscillation"] = est.tail_oscillation();
    write_summary(cfg, sum);
    diag << "density: liminf=" << fmt17(est.liminf_proxy)
         << " limsup=" << fmt17(est.limsup_proxy) << "\n";
    return 0;
}

inline int run_sequence(const RunConfig& cfg, std::ostream& diag) {
    std::uint64_t kmax = cfg.kmax ? cfg.kmax : 4096;
    StepFunction f = StepFunction::parse(cfg.f);
    CsvBuilder csv({"k", "delta_k", "n_k"});
    SequenceStream s(f);
    for (std::uint64_t k = 1; k <= kmax; ++k) {
        u128 n = s.next();
        csv.row({std::to_string(k), std::to_string(delta_of(k)), u128_to_string(n)});
    }
    write_file(cfg.out, csv.str());
    write_summary(cfg, {{"f", f.name()}, {"kmax", kmax}});
    diag << "sequence: wrote " << kmax << " terms\n";
    return 0;
}

inline int run_verify(const RunConfig& cfg, std::ostream& diag) {
    std::uint64_t kmax = cfg.kmax ? cfg.kmax : (std::uint64_t{1} << 16);
    StepFunction f = StepFunction::parse(cfg.f);
    bool identity_form = cfg.closed_form == "identity";
    if (!identity_form && cfg.closed_form != "general")
        throw ConfigError("--closed-form must be identity or general");
    if (identity_form && f.kind() != StepFunction::Kind::identity)
        throw ConfigError("--closed-form identity requires --f identity");
    SequenceStream s(f);
    std::uint64_t mismatches = 0;
    CsvBuilder csv({"k", "recursion", "closed"});
    for (std::uint64_t k = 1; k <= kmax; ++k) {
        u128 expect = s.next();
        u128 got = identity_form ? nk_closed_identity(k) : nk_closed_general(f, k);
        if (got != expect) {
            ++mismatches;
            if (mismatches <= 32)
                csv.row({std::to_string(k), u128_to_string(expect), u128_to_string(got)});
        }
    }
    write_file(cfg.out, csv.str());
    write_summary(cfg, {{"f", f.name()},
                        {"closed_form", cfg.closed_form},
                        {"checked", kmax},
                        {"mismatches", mismatches}});
    diag << "verify: checked=" << kmax << " mismatches=" << mismatches << "\n";
    return mismatches == 0 ? 0 : 1;
}

inline int run_separation(const RunConfig& cfg, std::ostream& diag) {
    std::uint64_t kmax = cfg.kmax ? cfg.kmax : (std::uint64_t{1} << 14);
    StepFunction f = StepFunction::parse(cfg.f);
    auto v = separation_check(f, kmax);
    CsvBuilder csv({"condition", "status", "witness"});
    csv.row({"separation", v.ok ? "pass" : "fail",
             v.ok ? "" : "(" + std::to_string(v.witness_i) + "," + std::to_string(v.witness_j) + ")"});
    write_file(cfg.out, csv.str());
    write_summary(cfg, {{"f", f.name()}, {"kmax", kmax}, {"ok", v.ok}});
    diag << "separation: " << (v.ok ? "pass" : "fail") << "\n";
    return v.ok ? 0 : 1;
}

inline int run_regularity(const RunConfig& cfg, std::ostream& diag) {
    std::uint64_t horizon = cfg.horizon ? cfg.horizon : 100000;
    WeightFamily fam = WeightFamily::parse(cfg.family);
    auto rep = regularity_report(fam, horizon);
    CsvBuilder csv({"metric", "value"});
    csv.row({"max_entry_last_row", fmt17(rep.max_entry_last_row)});
    csv.row({"row_sum_defect", fmt17(rep.row_sum_defect)});
    csv.row({"sup_abs_row_sum", fmt17(rep.sup_abs_row_sum)});
    csv.row({"entry_at_1", fmt17(rep.entry_at_1)});
    write_file(cfg.out, csv.str());
    write_summary(cfg, {{"family", fam.name()},
                        {"horizon", horizon},
                        {"max_entry_last_row", rep.max_entry_last_row},
                        {"row_sum_defect", rep.row_sum_defect},
                        {"sup_abs_row_sum", rep.sup_abs_row_sum}});
    diag << "regularity " << fam.name() << ": defect=" << fmt17(rep.row_sum_defect) << "\n";
    return 0;
}

inline int run_shift_build(const RunConfig& cfg, std::ostream& diag) {
    ShiftParameters prm = load_shift_params(cfg.params);
    if (cfg.horizon) prm.horizon = cfg.horizon;
    write_file(cfg.out, shift_params_json(prm).dump(2) + "\n");
    write_summary(cfg, shift_params_json(prm));
    diag << "shift-build: a=" << prm.a << " eps=" << prm.eps << " b_1=" << prm.b(1)
         << " b_2=" << prm.b(2) << "\n";
    return 0;
}

inline int run_shift_check(const RunConfig& cfg, std::ostream& diag) {
    ShiftParameters prm = load_shift_params(cfg.params);
    std::uint64_t horizon = cfg.horizon ? cfg.horizon : prm.horizon;
    auto rep = verify_characterization(prm, horizon, cfg.pmax);
    auto witness = [&](std::size_t i) -> std::string {
        if (i >= rep.violations.size()) return "";
        const auto& w = rep.violations[i];
        return "(p=" + std::to_string(w[0]) + ",q=" + std::to_string(w[1]) + ",n=" +
               std::to_string(w[2]) + ",m=" + std::to_string(w[3]) + ",t=" + std::to_string(w[4]) + ")";
    };
    CsvBuilder csv({"condition", "status", "witness"});
    csv.row({"a_density_proxy", rep.a_ok ? "pass" : "fail", ""});
    csv.row({"b_disjointness", rep.b_ok ? "pass" : "fail", rep.b_ok ? "" : witness(0)});
    csv.row({"gap_lemma", rep.gap_ok ? "pass" : "fail", rep.gap_ok ? "" : witness(0)});
    csv.row({"c_product_trend", rep.c_ok ? "pass" : "fail", ""});
    csv.row({"d_product_bound", rep.d_ok ? "pass" : "fail", rep.d_ok ? "" : witness(0)});
    write_file(cfg.out, csv.str());
    nlohmann::json windows = nlohmann::json::array();
    for (const auto& w : rep.windows)
        windows.push_back({{"p", w.p}, {"u", w.u}, {"count", w.count}, {"density_proxy", w.density_proxy}});
    write_summary(cfg, {{"horizon", horizon},
                        {"pmax", cfg.pmax},
                        {"pairs_checked", rep.pairs_checked},
                        {"a_ok", rep.a_ok},
                        {"b_ok", rep.b_ok},
                        {"gap_ok", rep.gap_ok},
                        {"c_ok", rep.c_ok},
                        {"d_ok", rep.d_ok},
                        {"windows", windows}});
    diag << "shift-check: a=" << rep.a_ok << " b=" << rep.b_ok << " gap=" << rep.gap_ok
         << " c=" << rep.c_ok << " d=" << rep.d_ok << " pairs=" << rep.pairs_checked << "\n";
    if (!rep.all_ok()) {
        if (!rep.violations.empty()) diag << "first witness: " << witness(0) << "\n";
        return 1;
    }
    return 0;
}

inline int run_fp_decay(const RunConfig& cfg, std::ostream& diag) {
    ShiftParameters prm = load_shift_params(cfg.params);
    std::uint64_t horizon = cfg.horizon ? cfg.horizon : 1000000;
    int plen = 10;
    int pemp = std::max(cfg.pmax, 1);
    auto rep = fp_decay_report(prm, cfg.r, plen, pemp, horizon);
    CsvBuilder csv({"p", "analytic_tail", "empirical_proxy", "gp_count"});
    for (int p = 1; p <= plen; ++p) {
        std::string proxy = p <= pemp ? fmt17(rep.proxy[p - 1]) : "";
        std::string cnt = p <= pemp ? std::to_string(rep.gp_count[p - 1]) : "";
        csv.row({std::to_string(p), fmt17(rep.tail[p - 1]), proxy, cnt});
    }
    write_file(cfg.out, csv.str());
    bool decreasing = true;
    for (int p = 1; p < plen; ++p)
        if (!(rep.tail[p] < rep.tail[p - 1])) decreasing = false;
    write_summary(cfg, {{"r", cfg.r},
                        {"horizon", horizon},
                        {"tail_decreasing", decreasing},
                        {"tail_10", rep.tail[plen - 1]},
                        {"proxies", rep.proxy}});
    diag << "fp-decay: T(10)=" << fmt17(rep.tail[plen - 1]) << "\n";
    return decreasing ? 0 : 1;
}

inline int run_export(const RunConfig& cfg, std::ostream& diag) {
    std::filesystem::path dir(cfg.out.empty() ? "export" : cfg.out);
    std::filesystem::create_directories(dir);
    int rc = 0;
    // record bundle-relative names so the summary is location-independent
    auto sub = [&](RunConfig c, const std::string& file, int (*fn)(const RunConfig&, std::ostream&)) {
        c.out = (dir / file).string();
        rc = std::max(rc, fn(c, diag));
        return file;
    };
    RunConfig c;
    std::vector<std::string> files;
    c = {};
    c.command = "sequence";
    c.kmax = 4096;
    files.push_back(sub(c, "sequence_identity.csv", &run_sequence));
    c = {};
    c.command = "density";
    c.set = "nk:identity";
    c.family = "cesaro";
    c.horizon = 10000;
    files.push_back(sub(c, "density_nk_cesaro.csv", &run_density));
    c = {};
    c.command = "fp-decay";
    c.pmax = 3;
    c.horizon = 100000;
    files.push_back(sub(c, "fp_decay.csv", &run_fp_decay));
    // weight profile of the counterexample shift
    {
        ShiftProfile profile(load_shift_params("default"));
        CsvBuilder csv({"n", "log2_product", "w_n"});
        for (std::uint64_t n = 0; n <= 20000; ++n)
            csv.row({std::to_string(n), fmt17(profile.log2_product(n)), fmt17(profile.weight_at(n))});
        write_file((dir / "shift_weights.csv").string(), csv.str());
        files.push_back("shift_weights.csv");
    }
    RunConfig self = cfg;
    self.out = (dir / "export").string();
    write_summary(self, {{"files", files}});
    diag << "export: " << files.size() << " artifacts in " << dir.string() << "\n";
    return rc;
}

} // namespace detail

inline int run_command(const RunConfig& cfg, std::ostream& diag) {
    RunConfig c = cfg;
    if (c.format != "csv" && c.format != "json") throw ConfigError("--format must be csv or json");
    if (c.out.empty()) c.out = c.command + "_out." + (c.format == "json" ? "json" : "csv");
    int rc;
    if (c.command == "density") rc = detail::run_density(c, diag);
    else if (c.command == "sequence") rc = detail::run_sequence(c, diag);
    else if (c.command == "verify") rc = detail::run_verify(c, diag);
    else if (c.command == "separation") rc = detail::run_separation(c, diag);
    else if (c.command == "regularity") rc = detail::run_regularity(c, diag);
    else if (c.command == "shift-build") rc = detail::run_shift_build(c, diag);
    else if (c.command == "shift-check") rc = detail::run_shift_check(c, diag);
    else if (c.command == "fp-decay") rc = detail::run_fp_decay(c, diag);
    else if (c.command == "export") rc = detail::run_export(c, diag);
    else throw ConfigError("unknown command: " + c.command);
    if (c.format == "json" && c.command != "export" && c.command != "shift-build") {
        // JSON-primary runs: the machine-readable summary doubles as the artifact
        std::ifstream f(detail::summary_path(c), std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        write_file(c.out, ss.str());
    }
    return rc;
}

} // namespace densilab
