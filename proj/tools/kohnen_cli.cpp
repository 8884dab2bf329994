// Command-line front end: field and class-group inspection, Eisenstein and
// classical q-expansions, exact and numeric L-values, Hecke application, the
// p-adic diagnostics and the verification suite.
#include <CLI11.hpp>

#include <kohnen/verify.hpp>

#include <fstream>
#include <iostream>

using namespace kohnen;

namespace {

constexpr int kExitBadArgs = 2;
constexpr int kExitComputation = 3;
constexpr int kExitVerification = 1;

struct OutputSink {
    std::string path;

    void emit(const std::string& text) const {
        if (path.empty()) {
            std::cout << text << "\n";
            return;
        }
        std::ofstream out(path);
        if (!out) throw computation_error("cannot open output file " + path);
        out << text << "\n";
    }
};

std::string render_table(const BaseField& F, const QExpansion& f, long scale) {
    std::ostringstream os;
    os << "# " << f.label() << "  (trace bound " << f.trace_bound() << ", scale " << scale << ")\n";
    for (auto& xi : enumerate_totally_positive(F, f.trace_bound())) {
        CycRat v = f.coeff(xi).scaled(Rat(scale));
        if (v.is_zero()) continue;
        std::string val = v.is_rational() ? v.to_rational().get_str() : v.str();
        os << F.element_str(xi) << "\t" << val << "\n";
    }
    std::string s = os.str();
    if (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
}

std::string render_qexp(const BaseField& F, const QExpansion& f, long scale, const std::string& format) {
    if (format == "table") return render_table(F, f, scale);
    QExpansion scaled = f.scaled(CycRat(Rat(scale)));
    scaled.set_label(f.label());
    return scaled.to_json().dump(2);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact q-expansions of half-integral weight Eisenstein series on real quadratic fields"};
    app.require_subcommand(1);

    // ---- field ----
    auto* cmd_field = app.add_subcommand("field", "base field invariants");
    long field_d = 0;
    std::string field_format = "table";
    cmd_field->add_option("--d", field_d, "0 for the rationals, else a radicand (reduced to its squarefree core)")->required();
    cmd_field->add_option("--format", field_format)->check(CLI::IsMember({"json", "table"}));

    // ---- classgroup ----
    auto* cmd_cg = app.add_subcommand("classgroup", "class group structure and characters");
    long cg_d = 0;
    cmd_cg->add_option("--field", cg_d)->required();

    // ---- eisenstein ----
    auto* cmd_eis = app.add_subcommand("eisenstein", "q-expansion of the plus-space Eisenstein series");
    long eis_d = 0, eis_kappa = 2, eis_chi = 0, eis_T = 10, eis_scale = 1;
    std::string eis_format = "table", eis_out;
    cmd_eis->add_option("--field", eis_d)->required();
    cmd_eis->add_option("--kappa", eis_kappa)->check(CLI::Range(1L, 6L));
    cmd_eis->add_option("--chi", eis_chi)->check(CLI::NonNegativeNumber);
    cmd_eis->add_option("--trace-bound", eis_T)->check(CLI::PositiveNumber);
    cmd_eis->add_option("--scale", eis_scale);
    cmd_eis->add_option("--format", eis_format)->check(CLI::IsMember({"json", "table"}));
    cmd_eis->add_option("--output", eis_out);

    // ---- cohen ----
    auto* cmd_cohen = app.add_subcommand("cohen", "the rational-field series via the integer-side formula");
    long cohen_r = 2, cohen_n = 20, cohen_scale = 1;
    std::string cohen_format = "table", cohen_out;
    cmd_cohen->add_option("--r", cohen_r)->required()->check(CLI::Range(2L, 6L));
    cmd_cohen->add_option("--n-max", cohen_n)->check(CLI::PositiveNumber);
    cmd_cohen->add_option("--scale", cohen_scale);
    cmd_cohen->add_option("--format", cohen_format)->check(CLI::IsMember({"json", "table"}));
    cmd_cohen->add_option("--output", cohen_out);

    // ---- lvalue ----
    auto* cmd_lv = app.add_subcommand("lvalue", "exact L-values at non-positive integers");
    long lv_d = 0, lv_kappa = 2, lv_chi = 0, lv_partial = -1, lv_B = 200000;
    bool lv_numeric = false, lv_conj = false;
    std::vector<std::string> lv_xi;
    cmd_lv->add_option("--field", lv_d)->required();
    cmd_lv->add_option("--kappa", lv_kappa)->check(CLI::Range(1L, 6L));
    cmd_lv->add_option("--chi", lv_chi)->check(CLI::NonNegativeNumber);
    cmd_lv->add_option("--xi", lv_xi, "quadratic twist element as a,b coordinates")->expected(0, 2);
    cmd_lv->add_option("--partial", lv_partial, "partial zeta of one ideal class");
    cmd_lv->add_flag("--numeric", lv_numeric, "cross-check with the truncated-series backend");
    cmd_lv->add_flag("--conjugate-chi", lv_conj);
    cmd_lv->add_option("--series-bound", lv_B);

    // ---- hecke ----
    auto* cmd_hk = app.add_subcommand("hecke", "apply T^+(alpha^2) to the Eisenstein expansion");
    long hk_d = 0, hk_kappa = 2, hk_chi = 0, hk_T = 10, hk_scale = 1;
    std::vector<std::string> hk_alpha;
    std::string hk_format = "table", hk_out;
    cmd_hk->add_option("--field", hk_d)->required();
    cmd_hk->add_option("--kappa", hk_kappa)->check(CLI::Range(1L, 6L));
    cmd_hk->add_option("--chi", hk_chi)->check(CLI::NonNegativeNumber);
    cmd_hk->add_option("--alpha", hk_alpha, "generator of an odd prime, a,b coordinates")->required()->expected(1, 2);
    cmd_hk->add_option("--trace-bound", hk_T)->check(CLI::PositiveNumber);
    cmd_hk->add_option("--scale", hk_scale);
    cmd_hk->add_option("--format", hk_format)->check(CLI::IsMember({"json", "table"}));
    cmd_hk->add_option("--output", hk_out);

    // ---- local ----
    auto* cmd_loc = app.add_subcommand("local", "p-adic diagnostics");
    long loc_p = 2;
    std::string loc_what = "all";
    cmd_loc->add_option("--p", loc_p)->required();
    cmd_loc->add_option("--what", loc_what)
        ->check(CLI::IsMember({"unit-integrals", "weil", "hilbert", "whittaker", "idempotent", "all"}));

    // ---- verify ----
    auto* cmd_ver = app.add_subcommand("verify", "run the verification suite");
    std::vector<std::string> ver_checks;
    bool ver_list = false;
    cmd_ver->add_option("checks", ver_checks, "check names (default: all)");
    cmd_ver->add_flag("--list", ver_list, "list available checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitBadArgs;
    }

    try {
        if (*cmd_field) {
            BaseField F = make_field(Int(field_d));
            if (field_format == "json") {
                nlohmann::json j;
                j["kind"] = F.is_rational() ? "rational" : "real_quadratic";
                j["degree"] = F.degree;
                j["disc"] = F.disc.get_str();
                if (!F.is_rational()) {
                    j["D"] = F.D.get_str();
                    j["omega"] = F.omega_desc();
                    j["fund_unit"] = {F.fund_unit.a.get_str(), F.fund_unit.b.get_str()};
                    j["fund_unit_norm"] = F.norm(F.fund_unit).get_str();
                    j["tp_unit"] = {F.tp_unit.a.get_str(), F.tp_unit.b.get_str()};
                    j["different"] = {F.different_gen.a.get_str(), F.different_gen.b.get_str()};
                }
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << "disc        " << F.disc.get_str() << "\n";
                std::cout << "degree      " << F.degree << "\n";
                if (!F.is_rational()) {
                    std::cout << "omega       " << F.omega_desc() << "\n";
                    std::cout << "fund unit   " << F.element_str(F.fund_unit) << "  (norm "
                              << F.norm(F.fund_unit).get_str() << ")\n";
                    std::cout << "tp unit     " << F.element_str(F.tp_unit) << "\n";
                }
            }
            return 0;
        }
        if (*cmd_cg) {
            BaseField F = make_field(Int(cg_d));
            ClassGroup G = compute_class_group(F);
            std::cout << "h = " << G.h << "\n";
            std::cout << "cycle structure:";
            if (G.cycle_structure.empty()) std::cout << " trivial";
            for (long m : G.cycle_structure) std::cout << " Z/" << m;
            std::cout << "\n";
            for (long i = 0; i < G.h; ++i) {
                std::cout << "class " << i << ": representative norm " << G.rep_lattices[i].index().get_str()
                          << ", character values";
                for (long j = 0; j < G.h; ++j) {
                    CycRat v = character_value_on_class(class_character(G, j), i);
                    std::cout << " " << (v.is_rational() ? v.to_rational().get_str() : v.str());
                }
                std::cout << "\n";
            }
            return 0;
        }
        if (*cmd_eis) {
            BaseField F = make_field(Int(eis_d));
            ClassGroup G = compute_class_group(F);
            if (eis_chi >= G.h) throw CLI::ValidationError("--chi", "character index exceeds h-1");
            EisensteinSeries E(F, G, eis_kappa, eis_chi);
            QExpansion g = E.qexpansion(eis_T);
            OutputSink{eis_out}.emit(render_qexp(F, g, eis_scale, eis_format));
            return 0;
        }
        if (*cmd_cohen) {
            BaseField Q = make_field(Int(0));
            QExpansion h = cohen_series(Q, cohen_r, cohen_n);
            OutputSink{cohen_out}.emit(render_qexp(Q, h, cohen_scale, cohen_format));
            return 0;
        }
        if (*cmd_lv) {
            BaseField F = make_field(Int(lv_d));
            ClassGroup G = compute_class_group(F);
            if (lv_chi >= G.h) throw CLI::ValidationError("--chi", "character index exceeds h-1");
            if (lv_partial >= 0) {
                if (lv_partial >= G.h) throw CLI::ValidationError("--partial", "class index exceeds h-1");
                Rat z = zeta_partial_class(F, G, lv_partial, lv_kappa);
                std::cout << "partial zeta, class " << lv_partial << ", at " << 1 - lv_kappa << ": "
                          << z.get_str() << "\n";
                return 0;
            }
            std::optional<FieldElement> xi;
            if (!lv_xi.empty()) {
                FieldElement x;
                x.a = verify::rat_lit(lv_xi[0]);
                if (lv_xi.size() > 1) x.b = verify::rat_lit(lv_xi[1]);
                xi = x;
            }
            CharacterSpec spec = make_character_spec(F, xi, lv_chi, lv_conj);
            CycRat v = hecke_L_exact(F, G, lv_kappa, spec);
            std::cout << "L(" << 1 - lv_kappa << ") = "
                      << (v.is_rational() ? v.to_rational().get_str() : v.str()) << "\n";
            if (lv_numeric) {
                if (lv_kappa < 2) throw computation_error("numeric backend needs kappa >= 2");
                auto n = hecke_L_numeric(F, G, lv_kappa, spec, lv_B);
                std::cout << "numeric  = " << n.value.real();
                if (std::abs(n.value.imag()) > 1e-12) std::cout << " + " << n.value.imag() << "i";
                std::cout << "  (bound " << n.error_bound << ")\n";
            }
            return 0;
        }
        if (*cmd_hk) {
            BaseField F = make_field(Int(hk_d));
            ClassGroup G = compute_class_group(F);
            if (hk_chi >= G.h) throw CLI::ValidationError("--chi", "character index exceeds h-1");
            FieldElement alpha;
            alpha.a = verify::rat_lit(hk_alpha[0]);
            if (hk_alpha.size() > 1) alpha.b = verify::rat_lit(hk_alpha[1]);
            EisensteinSeries E(F, G, hk_kappa, hk_chi);
            QExpansion g = E.qexpansion(hk_T);
            auto img = hecke_T_plus(F, G, hk_kappa, alpha, g);
            img.image.set_label("hecke image, certified to trace " + std::to_string(img.certified_bound));
            OutputSink{hk_out}.emit(render_qexp(F, img.image, hk_scale, hk_format));
            return 0;
        }
        if (*cmd_loc) {
            using namespace padic;
            if (!is_prime(Int(loc_p))) throw CLI::ValidationError("--p", "must be prime");
            PadicContext ctx(loc_p);
            nlohmann::json j;
            j["p"] = loc_p;
            if (loc_what == "unit-integrals" || loc_what == "all") {
                auto [i1, i2] = unit_integrals(ctx);
                j["unit_integral"] = i1.str();
                j["unit_integral_shifted"] = i2.str();
            }
            if (loc_what == "weil" || loc_what == "all") {
                nlohmann::json w;
                for (long a : {1L, 2L, 3L, 5L, -1L})
                    w[std::to_string(a)] = weil_constant(ctx, Rat(a)).str();
                j["weil_constants"] = w;
            }
            if (loc_what == "hilbert" || loc_what == "all") {
                nlohmann::json h;
                for (long a : {-1L, 2L, 5L})
                    for (long b : {-1L, 2L, 5L})
                        h[std::to_string(a) + "," + std::to_string(b)] =
                            hilbert_symbol(loc_p, Rat(a), Rat(b));
                j["hilbert_symbols"] = h;
            }
            if (loc_what == "whittaker" || loc_what == "all") {
                nlohmann::json w;
                for (long xi : {1L, 2L, 4L}) {
                    auto cmp = whittaker_vs_psi(ctx, Rat(xi), 1);
                    w[std::to_string(xi)] = {{"integral", cmp.integral.str()},
                                             {"formula", cmp.psi_formula.str()},
                                             {"equal", cmp.equal}};
                }
                j["whittaker"] = w;
            }
            if (loc_what == "idempotent" || loc_what == "all") {
                std::vector<Meta> samples = {Meta{Mat2{1, 0, 0, 1}, 1}, Meta{mat_uflat(Rat(1))},
                                             Meta{Mat2{1, 1, 1, 2}, 1}};
                auto rep = convolve_idempotent_check(ctx, {2, 3}, samples);
                j["idempotent"] = {{"passed", rep.passed}, {"detail", rep.detail}};
            }
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (*cmd_ver) {
            if (ver_list) {
                for (auto& c : verify::all_checks()) std::cout << c.name << "\n";
                return 0;
            }
            for (auto& name : ver_checks) {
                bool known = false;
                for (auto& c : verify::all_checks())
                    if (c.name == name) known = true;
                if (!known) {
                    std::cerr << "unknown check: " << name << "\n";
                    return kExitBadArgs;
                }
            }
            bool all_passed = true;
            for (auto& r : verify::run_all(ver_checks)) {
                std::printf("%-24s %s  (%.2f s)%s%s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL",
                            r.seconds, r.detail.empty() ? "" : "  ", r.detail.c_str());
                std::fflush(stdout);
                if (!r.passed) all_passed = false;
            }
            return all_passed ? 0 : kExitVerification;
        }
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitBadArgs;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComputation;
    }
    return 0;
}
