// Acceptance gate: one criterion per numeric argument, all when run bare.
// Prints exactly one "criterion N: PASS/FAIL" line per criterion checked.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <densilab/density.hpp>
#include <densilab/dyadic.hpp>
#include <densilab/limit_ratio.hpp>
#include <densilab/runner.hpp>
#include <densilab/shift.hpp>
#include <densilab/weights.hpp>

using namespace densilab;
namespace fs = std::filesystem;

namespace {

struct Result {
    bool ok = false;
    std::string detail;
};

Result pass(std::string d) { return {true, std::move(d)}; }
Result fail(std::string d) { return {false, std::move(d)}; }

// 1: identity closed form agrees with the recursion on every k <= 2^20
Result criterion1() {
    SequenceStream s(StepFunction::identity());
    for (std::uint64_t k = 1; k <= (1u << 20); ++k) {
        u128 expect = s.next();
        if (nk_closed_identity(k) != expect)
            return fail("mismatch at k=" + std::to_string(k));
    }
    return pass("2^20 terms exact");
}

// 2: general closed form agrees with the recursion for identity, tower(1),
// tower(2) on every k <= 2^16
Result criterion2() {
    const StepFunction fs[] = {StepFunction::identity(), StepFunction::tower(1),
                               StepFunction::tower(2)};
    for (const auto& f : fs) {
        SequenceStream s(f);
        for (std::uint64_t k = 1; k <= (1u << 16); ++k) {
            u128 expect = s.next();
            if (nk_closed_general(f, k) != expect)
                return fail(f.name() + " mismatch at k=" + std::to_string(k));
        }
    }
    return pass("3 step functions x 2^16 terms exact");
}

// 3: the optimal subsequence formula n_{lambda_j} = 4 lambda_j - 2j^2 - 4j - 3
Result criterion3() {
    for (int j = 0; j <= 9; ++j) {
        std::uint64_t lam = lambda_optimal(j);
        u128 expect = u128(4) * lam - 2 * u128(j) * j - 4 * u128(j) - 3;
        if (nk_closed_identity(lam) != expect)
            return fail("formula breaks at j=" + std::to_string(j));
    }
    return pass("j <= 9, lambda_9=" + std::to_string(lambda_optimal(9)));
}

// 4: separation n_j - n_i >= f(delta_i) + f(delta_j), exhaustive over all
// pairs i < j <= 2^14 for identity and tower(1)
Result criterion4() {
    const StepFunction fs[] = {StepFunction::identity(), StepFunction::tower(1)};
    const std::uint64_t K = 1u << 14;
    for (const auto& f : fs) {
        std::vector<std::uint64_t> n(K), fd(K);
        SequenceStream s(f);
        for (std::uint64_t k = 0; k < K; ++k) {
            n[k] = static_cast<std::uint64_t>(s.next());
            fd[k] = f(delta_of(k + 1));
            if (n[k] < fd[k]) return fail(f.name() + ": n_k < f(delta_k) at k=" + std::to_string(k + 1));
        }
        for (std::uint64_t i = 0; i < K; ++i)
            for (std::uint64_t j = i + 1; j < K; ++j)
                if (n[j] - n[i] < fd[i] + fd[j])
                    return fail(f.name() + ": pair (" + std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + ")");
    }
    return pass("all pairs i<j<=2^14, identity and tower(1)");
}

// 5: Cesaro subsequence density of (n_k) concentrates at 1/4, and the growth
// sandwich holds along a geometric sweep
Result criterion5() {
    auto rep = limit_ratio_report(StepFunction::identity(), WeightFamily::cesaro(), 1000000);
    if (!(rep.tail_min >= 0.2500 && rep.tail_min <= 0.2502))
        return fail("tail_min=" + fmt17(rep.tail_min) + " outside [0.2500, 0.2502]");
    std::vector<std::uint64_t> ks;
    for (double x = 4.0; x <= std::ldexp(1.0, 40); x *= 1.5)
        ks.push_back(static_cast<std::uint64_t>(x));
    for (const auto& smp : sandwich_check(StepFunction::identity(), ks))
        if (!smp.ok) return fail("sandwich fails at k=" + std::to_string(smp.k));
    return pass("tail_min=" + fmt17(rep.tail_min) + ", " + std::to_string(ks.size()) +
                " sandwich samples");
}

// 6: (a) B(2) keeps the subsequence ratios bounded away from 0;
//    (b) under B(1/2) the lambda-dip ratios decay below 1e-3 of the early dip
Result criterion6() {
    auto b2 = limit_ratio_report(StepFunction::identity(), WeightFamily::B(2), 100000);
    double mn = 1.0;
    for (std::size_t k = 10000; k <= 100000; ++k) mn = std::min(mn, b2.rho[k - 1]);
    bool part_a = mn >= 0.01 && mn <= 1.0;

    auto bh = limit_ratio_report(StepFunction::identity(), WeightFamily::B(0.5), 524288);
    double dip8 = 0.0, dip18 = 0.0;
    for (auto [k, v] : bh.lambda_dips) {
        if (k == 8) dip8 = v;
        if (k == 18) dip18 = v;
    }
    if (!(dip8 > 0.0 && dip18 > 0.0)) return fail("lambda dips not observed");
    double factor = dip18 / dip8;
    bool part_b = dip18 < 1e-3 * dip8;
    std::string detail = "B(2) min=" + fmt17(mn) + "; B(0.5) dip ratio " + fmt17(dip18) + "/" +
                         fmt17(dip8) + " = " + fmt17(factor) + " vs required < 1e-3";
    return part_a && part_b ? pass(detail) : fail(detail);
}

// 7: Toeplitz regularity of all named families at horizon 1e5
Result criterion7() {
    struct Row {
        WeightFamily fam;
        double entry_bound;
    };
    const Row rows[] = {
        {WeightFamily::cesaro(), 1.1e-5}, {WeightFamily::C(-1), 0.09},
        {WeightFamily::C(1), 3e-5},       {WeightFamily::C(2), 4e-5},
        {WeightFamily::A(0.5), 0.002},    {WeightFamily::A(1), 0.64},
        {WeightFamily::B(0.5), 0.26},     {WeightFamily::B(1), 0.09},
        {WeightFamily::B(2), 0.008},      {WeightFamily::Btilde(2), 0.04},
        {WeightFamily::Btilde(3), 0.1},
    };
    for (const auto& row : rows) {
        auto rep = regularity_report(row.fam, 100000);
        if (rep.row_sum_defect > 1e-12)
            return fail(row.fam.name() + " defect=" + fmt17(rep.row_sum_defect));
        if (!(rep.max_entry_last_row > 0.0 && rep.max_entry_last_row < row.entry_bound))
            return fail(row.fam.name() + " max entry=" + fmt17(rep.max_entry_last_row));
    }
    if (regularity_report(WeightFamily::cesaro(), 100000).max_entry_last_row != 1.0 / 100000.0)
        return fail("Cesaro entry not exactly 1/n");
    return pass("11 families, defects <= 1e-12");
}

// 8: summatory sums match the closed asymptotic forms
Result criterion8() {
    struct Probe {
        WeightFamily fam;
        std::uint64_t n;
        double tol;
    };
    const Probe probes[] = {
        {WeightFamily::C(2), 10000, 0.01},
        {WeightFamily::B(2), 100000, 0.1},
        {WeightFamily::A(0.5), 100000, 0.1},
    };
    std::string detail;
    for (const auto& pr : probes) {
        auto asym = pr.fam.log_phi_asymptotic(pr.n);
        if (!asym) return fail(pr.fam.name() + ": no asymptotic form");
        double ratio = std::exp(summatory_log(pr.fam, pr.n) - *asym);
        if (!(ratio >= 1.0 - pr.tol && ratio <= 1.0 + pr.tol))
            return fail(pr.fam.name() + " ratio=" + fmt17(ratio));
        if (!detail.empty()) detail += ", ";
        detail += pr.fam.name() + "=" + fmt17(ratio);
    }
    return pass(detail);
}

// 9: shift construction — admissible defaults, bounded weights, and all
// characterization conditions at horizon 1e7 with zero witnesses
Result criterion9() {
    ShiftParameters prm = derive_parameters();
    if (auto err = shift_candidate_error(prm)) return fail("defaults rejected: " + *err);
    ShiftProfile profile(prm);
    for (std::uint64_t n = 0; n <= 1000000; ++n) {
        double w = profile.weight_at(n);
        if (!(w >= 0.5 && w <= 2.0)) return fail("w_" + std::to_string(n) + "=" + fmt17(w));
    }
    auto rep = verify_characterization(prm, 10000000, 2);
    if (!rep.all_ok() || !rep.violations.empty())
        return fail("conditions a/b/gap/c/d = " + std::to_string(rep.a_ok) +
                    std::to_string(rep.b_ok) + std::to_string(rep.gap_ok) +
                    std::to_string(rep.c_ok) + std::to_string(rep.d_ok) + ", " +
                    std::to_string(rep.violations.size()) + " witnesses");
    return pass("weights in [1/2,2] up to 1e6; all conditions at 1e7, pairs=" +
                std::to_string(rep.pairs_checked));
}

// 10: F_p decay — analytic tail strictly decreasing with T(10) < 0.4 and the
// empirical A(1/2)-density proxy of G_p shrinking in p
Result criterion10() {
    ShiftParameters prm;
    auto rep = fp_decay_report(prm, 0.5, 10, 3, 1000000);
    for (int p = 1; p < 10; ++p)
        if (!(rep.tail[p] < rep.tail[p - 1])) return fail("tail not decreasing at p=" + std::to_string(p + 1));
    if (!(rep.tail[9] < 0.4)) return fail("T(10)=" + fmt17(rep.tail[9]));
    if (!(rep.proxy[2] < rep.proxy[0])) return fail("proxy(3) !< proxy(1)");
    return pass("T(10)=" + fmt17(rep.tail[9]) + ", proxy(1)=" + fmt17(rep.proxy[0]) +
                ", proxy(3)=" + fmt17(rep.proxy[2]));
}

// 11: CLI artifacts are deterministic — the full command suite rerun into a
// second directory is byte-identical
Result criterion11() {
    auto run_suite = [](const fs::path& dir) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::ostringstream diag;
        auto go = [&](RunConfig c, const std::string& file) {
            c.out = (dir / file).string();
            run_command(c, diag);
        };
        RunConfig c;
        c = {}; c.command = "sequence"; c.kmax = 2048; go(c, "sequence.csv");
        c = {}; c.command = "density"; c.set = "nk:identity"; c.family = "B:2";
        c.horizon = 20000; go(c, "density_nk.csv");
        c = {}; c.command = "density"; c.set = "multiples:2"; c.horizon = 100000;
        go(c, "density_evens.csv");
        c = {}; c.command = "regularity"; c.family = "B:2"; c.horizon = 100000;
        go(c, "regularity.csv");
        c = {}; c.command = "separation"; go(c, "separation.csv");
        c = {}; c.command = "verify"; c.closed_form = "general"; c.kmax = 1u << 14;
        go(c, "verify.csv");
        c = {}; c.command = "shift-build"; go(c, "shift_params.json");
        c = {}; c.command = "shift-check"; c.horizon = 1000000; c.pmax = 1;
        go(c, "shift_check.csv");
        c = {}; c.command = "fp-decay"; c.horizon = 100000; c.pmax = 3; go(c, "fp_decay.csv");
        c = {}; c.command = "export"; go(c, "bundle");
    };
    fs::path base = fs::temp_directory_path();
    fs::path da = base / "densilab_accept_a";
    fs::path db = base / "densilab_accept_b";
    run_suite(da);
    run_suite(db);
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(da)) {
        if (!e.is_regular_file()) continue;
        ++files;
        fs::path rel = fs::relative(e.path(), da);
        if (!fs::exists(db / rel)) return fail("missing on rerun: " + rel.string());
        if (slurp(e.path()) != slurp(db / rel)) return fail("differs on rerun: " + rel.string());
    }
    std::size_t files_b = 0;
    for (const auto& e : fs::recursive_directory_iterator(db))
        if (e.is_regular_file()) ++files_b;
    if (files != files_b) return fail("artifact counts differ");
    if (files < 20) return fail("suite produced too few artifacts");
    return pass(std::to_string(files) + " artifacts byte-identical across reruns");
}

} // namespace

int main(int argc, char** argv) {
    Result (*criteria[])() = {criterion1, criterion2, criterion3, criterion4,
                              criterion5, criterion6, criterion7, criterion8,
                              criterion9, criterion10, criterion11};
    std::vector<int> which;
    if (argc > 1) {
        for (int i = 1; i < argc; ++i) {
            int n = std::atoi(argv[i]);
            if (n < 1 || n > 11) {
                std::fprintf(stderr, "usage: acceptance [1..11]...\n");
                return 2;
            }
            which.push_back(n);
        }
    } else {
        for (int n = 1; n <= 11; ++n) which.push_back(n);
    }
    bool all_ok = true;
    for (int n : which) {
        Result r;
        try {
            r = criteria[n - 1]();
        } catch (const std::exception& e) {
            r = fail(std::string("exception: ") + e.what());
        }
        std::printf("criterion %d: %s (%s)\n", n, r.ok ? "PASS" : "FAIL", r.detail.c_str());
        std::fflush(stdout);
        if (!r.ok) all_ok = false;
    }
    return all_ok ? 0 : 1;
}
