#pragma once

// Command-line front end. Kept in a header so the test suite can exercise
// the argument plumbing in-process; the binary itself is a two-line main.
//
// Exit codes: 0 identity holds (or evaluation succeeded), 1 identity
// failed its tolerance, 2 configuration / usage / IO problem, 3 the
// requested numbers are not reachable (contour pinched, pole hit,
// sampler or refinement budget exhausted).

#include <cctype>
#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lensehg/lensehg.hpp"

namespace lensehg {
namespace cli {

inline const char* const kCommands[] = {
    "eval-gamma", "verify-kernel", "verify-beta", "verify-an",
    "verify-bcn", "verify-det",    "susy",        "star-star"};

struct RunConfig {
    std::string command;
    NumericsConfig numeric{};
    cplx sigma{0.0, 0.3};
    cplx tau{0.0, 0.3};
    bool modular_given = false; // --sigma/--tau present: pin them, else seeded draw
    int r = 1;

    int m = 0;
    int n = 1;
    int det_k = 1;
    int samples = 50;
    double delta = 1e-3;
    std::string check = "transform";  // verify-an / verify-bcn variant
    std::string which = "frobenius";  // determinant lemma choice

    std::string group = "su";
    int Nc = 2;
    int Nf = 3;
    int n_B = 0;
    bool n_B_given = false;
    cplx baryon{0.0, 0.01};
    bool baryon_given = false;

    std::uint64_t seed = 1;
    double tol = 0.0; // 0 -> per-identity default
    std::string output_path;
    bool append = false;
};

namespace detail {

inline bool to_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) return false;
    out = v;
    return true;
}

} // namespace detail

// Wire format "a+bi": decimal doubles, exponents allowed, either part
// optional ("1.5", "0.3i", "-2e-3i", "0.1-0.3i"). Spaces are ignored.
inline cplx parse_complex(const std::string& text) {
    std::string s;
    s.reserve(text.size());
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    const auto fail = [&]() -> cplx {
        throw config_error("malformed complex literal '" + text +
                           "' (expected a+bi)");
    };
    if (s.empty()) return fail();

    double re = 0.0, im = 0.0;
    if (s.back() == 'i' || s.back() == 'I') {
        const std::string body = s.substr(0, s.size() - 1);
        std::size_t split = std::string::npos;
        for (std::size_t pos = body.size(); pos-- > 1;) {
            const char c = body[pos];
            if ((c == '+' || c == '-') && body[pos - 1] != 'e' &&
                body[pos - 1] != 'E') {
                split = pos;
                break;
            }
        }
        std::string re_part, im_part;
        if (split == std::string::npos) {
            im_part = body; // pure imaginary
        } else {
            re_part = body.substr(0, split);
            im_part = body.substr(split);
        }
        if (!re_part.empty() && !detail::to_double(re_part, re)) return fail();
        if (im_part.empty() || im_part == "+")
            im = 1.0;
        else if (im_part == "-")
            im = -1.0;
        else if (!detail::to_double(im_part, im))
            return fail();
    } else {
        if (!detail::to_double(s, re)) return fail();
    }
    return cplx{re, im};
}

namespace detail {

// Raw string-typed option storage; complex literals are converted after
// CLI11 finishes so parse failures can name the offending flag.
struct RawOptions {
    RunConfig cfg;
    std::string sigma_text, tau_text, z_text, baryon_text;
    cplx z{0.2, 0.1};
    int m_label = 0;
    CLI::Option* sigma_opt = nullptr;
    CLI::Option* tau_opt = nullptr;
    CLI::Option* z_opt = nullptr;
    CLI::Option* baryon_opt = nullptr;
    CLI::Option* nb_opt = nullptr;
};

inline void build_app(CLI::App& app, RawOptions& raw) {
    RunConfig& c = raw.cfg;
    app.description(
        "Verification harness for the lens elliptic gamma function and the\n"
        "constrained hypergeometric sum/integrals built from it.");
    app.footer(
        "Commands:\n"
        "  eval-gamma     evaluate the kernel at --z / --mm\n"
        "  verify-kernel  reflection/shift/periodicity identity suite\n"
        "  verify-beta    rank-one sum/integral evaluation identity\n"
        "  verify-an      hyperplane-constrained family "
        "(--check evaluation|transform|involution|covariance|limit)\n"
        "  verify-bcn     reflection-symmetric family "
        "(--check evaluation|transform|reduction|limit)\n"
        "  verify-det     determinant lemmas (--which frobenius|cauchy)\n"
        "  susy           electric/magnetic index equality "
        "(--group su|sp --nc --nf)\n"
        "  star-star      four-edge lattice weight identity (--n)\n\n"
        "Complex flags use the literal form a+bi, e.g. --sigma 0.05+0.3i.\n"
        "Config file: flat key=value lines, keys matching the long flag\n"
        "names; explicit flags win over config values.\n"
        "LENS_EHG_THREADS caps evaluator parallelism (0 = auto).");
    app.set_config("--config", "", "read defaults from a key=value file");
    app.set_version_flag("--version", version_string);

    app.add_option("command", c.command, "what to run")
        ->required()
        ->check(CLI::IsMember(std::vector<std::string>(
            std::begin(kCommands), std::end(kCommands))));

    raw.sigma_opt = app.add_option("--sigma", raw.sigma_text,
                                   "first modular parameter (a+bi)");
    raw.tau_opt = app.add_option("--tau", raw.tau_text,
                                 "second modular parameter (a+bi)");
    app.add_option("--r", c.r, "positive integer order of the discrete label")
        ->check(CLI::Range(1, 1000000));
    app.add_option("--seed", c.seed, "sampler seed");
    app.add_option("--tol", c.tol,
                   "relative tolerance (0 = per-identity default)");
    app.add_option("--out", c.output_path, "write the JSON report here");
    app.add_flag("--append", c.append,
                 "append one report per line instead of overwriting");

    raw.z_opt = app.add_option("--z", raw.z_text,
                               "kernel argument for eval-gamma (a+bi)");
    app.add_option("--mm", raw.m_label, "kernel discrete label for eval-gamma");
    app.add_option("--samples", c.samples, "points per kernel identity")
        ->check(CLI::PositiveNumber);
    app.add_option("--m", c.m, "flavor excess parameter")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--n", c.n, "rank (number of integration variables)")
        ->check(CLI::PositiveNumber);
    app.add_option("--k", c.det_k, "shift index for the determinant lemmas")
        ->check(CLI::PositiveNumber);
    app.add_option("--delta", c.delta, "squeeze scale for --check limit")
        ->check(CLI::PositiveNumber);
    app.add_option("--check", c.check, "verify-an / verify-bcn variant")
        ->check(CLI::IsMember(std::vector<std::string>{
            "evaluation", "transform", "involution", "covariance",
            "reduction", "limit"}));
    app.add_option("--which", c.which, "determinant lemma")
        ->check(CLI::IsMember(std::vector<std::string>{"frobenius", "cauchy"}));

    app.add_option("--group", c.group, "gauge group family for susy")
        ->check(CLI::IsMember(std::vector<std::string>{"su", "sp"}));
    app.add_option("--nc", c.Nc, "gauge rank parameter")
        ->check(CLI::PositiveNumber);
    app.add_option("--nf", c.Nf, "flavor count")->check(CLI::PositiveNumber);
    raw.nb_opt = app.add_option("--nb", c.n_B, "baryonic holonomy charge");
    raw.baryon_opt =
        app.add_option("--baryon", raw.baryon_text, "baryonic fugacity (a+bi)");

    app.add_option("--product-tol", c.numeric.product_tol,
                   "infinite-product truncation target");
    app.add_option("--product-max-index", c.numeric.product_max_index,
                   "infinite-product shell cap");
    app.add_option("--quad-tol", c.numeric.quad_tol,
                   "quadrature node-doubling stop criterion");
    app.add_option("--quad-start-nodes", c.numeric.quad_start_nodes,
                   "first quadrature grid size per axis");
    app.add_option("--quad-max-nodes", c.numeric.quad_max_nodes,
                   "quadrature node cap per axis");
    app.add_option("--pole-guard", c.numeric.pole_guard,
                   "guard distance around product poles");
}

inline cplx named_complex(const std::string& flag, const std::string& text) {
    try {
        return parse_complex(text);
    } catch (const config_error& e) {
        throw config_error(flag + ": " + e.what());
    }
}

inline void finalize(RawOptions& raw) {
    RunConfig& c = raw.cfg;
    if (raw.sigma_opt->count() > 0) {
        c.sigma = named_complex("--sigma", raw.sigma_text);
        c.modular_given = true;
    }
    if (raw.tau_opt->count() > 0) {
        c.tau = named_complex("--tau", raw.tau_text);
        c.modular_given = true;
    }
    if (raw.z_opt->count() > 0) raw.z = named_complex("--z", raw.z_text);
    if (raw.baryon_opt->count() > 0) {
        c.baryon = named_complex("--baryon", raw.baryon_text);
        c.baryon_given = true;
    }
    c.n_B_given = raw.nb_opt->count() > 0;
    c.numeric.validate();
}

inline nlohmann::json jnumeric(const NumericsConfig& n) {
    return nlohmann::json{{"product_tol", n.product_tol},
                          {"product_max_index", n.product_max_index},
                          {"quad_tol", n.quad_tol},
                          {"quad_start_nodes", n.quad_start_nodes},
                          {"quad_max_nodes", n.quad_max_nodes},
                          {"pole_guard", n.pole_guard}};
}

inline VerificationReport dispatch(const RawOptions& raw) {
    const RunConfig& c = raw.cfg;
    const NumericsConfig& num = c.numeric;
    std::optional<ModularParams> mp_opt;
    if (c.modular_given) {
        ModularParams mp{c.sigma, c.tau, c.r};
        mp.validate();
        mp_opt = mp;
    }
    const double tol = c.tol;

    if (c.command == "eval-gamma") {
        ModularParams mp = mp_opt ? *mp_opt : ModularParams{c.sigma, c.tau, c.r};
        mp.validate();
        VerificationReport rep;
        rep.identity_name = "eval_gamma";
        const cplx value = lens_gamma({raw.z, raw.m_label}, mp, num);
        rep.lhs = rep.rhs = value;
        rep.pass = true;
        rep.tolerance = 0.0;
        rep.seed = c.seed;
        rep.params = nlohmann::json{{"z", lensehg::detail::jc(raw.z)},
                                    {"m_label", raw.m_label},
                                    {"modular", lensehg::detail::jmp(mp)}};
        return rep;
    }
    if (c.command == "verify-kernel")
        return verify_kernel_suite(c.r, c.samples, c.seed, num,
                                   tol > 0.0 ? tol : 1e-10);
    if (c.command == "verify-beta")
        return verify_elliptic_beta(c.r, c.seed, num, tol > 0.0 ? tol : 1e-8,
                                    mp_opt);
    if (c.command == "verify-an") {
        if (c.check == "evaluation")
            return verify_an_evaluation(c.n, c.r, c.seed, num, tol, mp_opt);
        if (c.check == "transform")
            return verify_an_transform(c.m, c.n, c.r, c.seed, num, tol, mp_opt);
        if (c.check == "involution")
            return verify_an_involution(c.m, c.n, c.r, c.seed, num,
                                        tol > 0.0 ? tol : 1e-8, mp_opt);
        if (c.check == "covariance")
            return verify_an_covariance(c.m, c.n, c.r, c.seed, num, tol,
                                        mp_opt);
        if (c.check == "limit")
            return verify_an_limit(c.m, c.r, c.seed, c.delta, num,
                                   tol > 0.0 ? tol : 5e-3, mp_opt);
        throw config_error("--check: '" + c.check +
                           "' is not a verify-an variant");
    }
    if (c.command == "verify-bcn") {
        if (c.check == "evaluation")
            return verify_bcn_evaluation(c.n, c.r, c.seed, num, tol, mp_opt);
        if (c.check == "transform")
            return verify_bcn_transform(c.m, c.n, c.r, c.seed, num, tol,
                                        mp_opt);
        if (c.check == "reduction")
            return verify_bcn1_reduction(c.m, c.r, c.seed, num,
                                         tol > 0.0 ? tol : 1e-10, mp_opt);
        if (c.check == "limit")
            return verify_bcn_limit(c.m, c.r, c.seed, c.delta, num,
                                    tol > 0.0 ? tol : 5e-3, mp_opt);
        throw config_error("--check: '" + c.check +
                           "' is not a verify-bcn variant");
    }
    if (c.command == "verify-det") {
        if (c.which == "frobenius")
            return verify_frobenius_det(c.n, c.r, c.det_k, c.seed, num,
                                        tol > 0.0 ? tol : 1e-10, mp_opt);
        return verify_cauchy_det(c.n, c.r, c.det_k, c.seed, num,
                                 tol > 0.0 ? tol : 1e-10, mp_opt);
    }
    if (c.command == "susy") {
        const GaugeGroup group =
            c.group == "su" ? GaugeGroup::SU : GaugeGroup::Sp;
        GaugeTheorySpec g = sample_gauge_spec(group, c.Nc, c.Nf, c.r, c.seed);
        if (c.n_B_given) g.n_B = c.n_B;
        if (c.baryon_given) g.baryon = c.baryon;
        if (c.modular_given) {
            g.sigma = c.sigma;
            g.tau = c.tau;
        }
        g.validate();
        VerificationReport rep =
            check_seiberg_duality(g, num, tol > 0.0 ? tol : 1e-6);
        rep.seed = c.seed;
        rep.params["seed"] = c.seed;
        return rep;
    }
    if (c.command == "star-star")
        return verify_star_star(c.n, c.r, c.seed, num, tol);
    throw config_error("unknown command: " + c.command);
}

} // namespace detail

// Full run: parse, dispatch, report. Streams stay injectable for tests.
inline int run_main(int argc, const char* const* argv,
                    std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CLI::App app{"", "lens_ehg"};
    detail::RawOptions raw;
    detail::build_app(app, raw);
    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        detail::finalize(raw);
        VerificationReport rep = detail::dispatch(raw);
        rep.params["command"] = raw.cfg.command;
        rep.params["numeric"] = detail::jnumeric(raw.cfg.numeric);
        if (!raw.cfg.output_path.empty())
            write_report(rep, raw.cfg.output_path, raw.cfg.append);
        out << report_json(rep).dump(2) << "\n";
        return rep.pass ? 0 : 1;
    } catch (const contour_error& e) {
        err << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const pole_error& e) {
        err << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const sampler_error& e) {
        err << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const convergence_error& e) {
        err << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const config_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

inline int run_main(const std::vector<std::string>& args,
                    std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    std::vector<const char*> argv;
    argv.push_back("lens_ehg");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_main(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace cli
} // namespace lensehg
