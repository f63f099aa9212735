#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "substoch/generators.hpp"
#include "substoch/identities.hpp"
#include "substoch/matrix_io.hpp"
#include "substoch/montecarlo.hpp"
#include "substoch/report.hpp"
#include "substoch/substochastic.hpp"

/// Front end of the `substoch` tool. Every subcommand is a function of its
/// arguments and input files; output goes to the supplied streams so tests can
/// drive it in-process.
///
/// Exit codes: 0 all checks passed, 1 a check or verification failed,
/// 2 usage or certification error, 3 I/O or parse error.
namespace substoch::cli {

using report::Json;
using report::RunReport;

enum ExitCode : int { kPassed = 0, kFailed = 1, kUsage = 2, kIo = 3 };

struct Common {
    std::string backend = "auto";
    double tol = 1e-9;
    bool json = false;
    bool timing = false;
};

struct NRange {
    Index lo = 2;
    Index hi = 8;
};

inline NRange parse_n_range(const std::string& text)
{
    auto to_index = [&](const std::string& s) {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
            throw Error(Errc::PreconditionViolated, "bad --n value '" + text + "'");
        }
        return static_cast<Index>(std::stoull(s));
    };
    NRange r;
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        r.lo = to_index(text.substr(0, dots));
        r.hi = to_index(text.substr(dots + 2));
    } else {
        r.lo = r.hi = to_index(text);
    }
    if (r.lo < 1 || r.hi < r.lo) {
        throw Error(Errc::PreconditionViolated, "--n range '" + text + "' is empty or starts below 1");
    }
    return r;
}

namespace detail {

inline std::string error_label(const Error& e)
{
    std::string s(errc_name(e.code()));
    if (e.row()) {
        s += "(" + std::to_string(*e.row());
        if (e.col()) {
            s += "," + std::to_string(*e.col());
        }
        s += ")";
    }
    return s;
}

inline bool use_exact(const Common& c, const io::MatrixFile& f)
{
    if (c.backend == "exact") {
        return true;
    }
    if (c.backend == "float") {
        return false;
    }
    return f.format == io::MatrixFormat::JsonExact;
}

template <Scalar T>
const Matrix<T>& pick(const io::MatrixFile& f)
{
    if constexpr (ScalarTraits<T>::is_exact) {
        return f.exact;
    } else {
        return f.floating;
    }
}

struct Loaded {
    io::MatrixFile file;
    std::string digest;
};

inline Loaded load(const std::string& path)
{
    const std::string text = io::read_file(path);
    Loaded l{io::parse_matrix(text, io::detect_format(path, text)), io::digest(text)};
    return l;
}

inline std::string command_echo(const std::vector<std::string>& args)
{
    std::string s;
    for (const auto& a : args) {
        if (!s.empty()) {
            s += ' ';
        }
        s += a;
    }
    return s;
}

inline int finish(RunReport& rep, const Common& common, std::chrono::steady_clock::time_point t0, std::ostream& out,
                  const std::string& text)
{
    if (common.timing) {
        rep.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
    if (common.json) {
        out << rep.to_json().dump(2) << "\n";
    } else {
        out << text;
        out << "overall: " << (rep.passed ? "PASS" : "FAIL") << "\n";
        if (rep.wall_time_ms) {
            out << "wall time: " << std::fixed << std::setprecision(1) << *rep.wall_time_ms << " ms\n";
        }
    }
    return rep.passed ? kPassed : kFailed;
}

template <Scalar T>
std::string fmt(const T& x)
{
    return ScalarTraits<T>::to_string(x);
}

template <Scalar T>
std::string identity_line(const IdentityReport<T>& r)
{
    std::ostringstream s;
    s << std::left << std::setw(12) << identity_name(r.id) << " m=" << std::setw(3)
      << (r.m ? std::to_string(*r.m) : "-") << " l=" << std::setw(3) << (r.l ? std::to_string(*r.l) : "-")
      << (r.passed ? " ok  " : " FAIL") << "  lhs=" << fmt(r.lhs) << "  rhs=" << fmt(r.rhs)
      << "  residual=" << fmt(r.residual);
    if (r.error) {
        s << "  [" << *r.error << "]";
    }
    s << "\n";
    return s.str();
}

template <Scalar T>
std::string maximality_text(const MaximalityReport<T>& r)
{
    std::ostringstream s;
    s << "thm1 diagonal maximality of (I - P^T)^-1: " << (r.holds ? "holds" : "VIOLATED");
    if (r.witness) {
        s << "  (row " << r.witness->row << ": c_mm=" << fmt(r.witness->diagonal) << " < c_ml=" << fmt(r.witness->offending)
          << " at l=" << r.witness->col << ")";
    }
    s << "\n";
    return s.str();
}

// identity family selected by --identity
struct Selection {
    std::string name = "all";

    bool thm1() const { return name == "thm1" || name == "all"; }
    bool needs_substochastic() const { return name == "thm1" || name == "thm2"; }

    bool wants(IdentityId id) const
    {
        if (name == "all") {
            return true;
        }
        if (name == "thm2") {
            return id == IdentityId::Thm2First || id == IdentityId::Thm2Second;
        }
        return name == identity_name(id);
    }
};

} // namespace detail

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

template <Scalar T>
int cmd_check_typed(const detail::Loaded& in, std::uint64_t seed, RunReport& rep,
                    std::ostringstream& text)
{
    const Matrix<T>& m = detail::pick<T>(in.file);
    text << "matrix: n=" << m.rows() << " format=" << io::format_name(in.file.format) << " backend="
         << ScalarTraits<T>::name << " digest=" << in.digest << "\n";

    Json entry;
    entry["kind"] = "certification";
    try {
        const auto sp = validate_substochastic(m);
        const T det = det_I_minus_Pt_positive(sp);
        const double rho = spectral_radius_estimate(m, 200, seed);
        entry["passed"] = true;
        entry["certification"] = certification_name(sp.certification());
        entry["error"] = nullptr;
        entry["det_I_minus_Pt"] = report::scalar(det);
        entry["spectral_radius_estimate"] = rho;
        text << "certified: yes (" << certification_name(sp.certification()) << ")\n";
        text << "det(I - P^T) = " << detail::fmt(det) << "\n";
        text << "spectral radius estimate = " << std::setprecision(12) << rho << "\n";
    } catch (const Error& e) {
        if (e.code() == Errc::NotSquare) {
            throw;
        }
        entry["passed"] = false;
        entry["certification"] = nullptr;
        entry["error"] = detail::error_label(e);
        entry["message"] = e.what();
        entry["det_I_minus_Pt"] = nullptr;
        entry["spectral_radius_estimate"] = nullptr;
        text << "certified: no: " << detail::error_label(e) << "\n";
        text << "  " << e.what() << "\n";
    }
    rep.add(std::move(entry));
    return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyOptions {
    std::string identity = "all";
    std::string mode = "auto";
    std::optional<Index> m;
    std::optional<Index> l;
    bool strict_minors = false;
};

template <Scalar T>
void cmd_verify_typed(const detail::Loaded& in, const Common& common, const VerifyOptions& opt, RunReport& rep,
                      std::ostringstream& text)
{
    const Matrix<T>& b = detail::pick<T>(in.file);
    const Tolerance tol{common.tol, Tolerance{}.abs_floor};
    const detail::Selection sel{opt.identity};

    std::string mode = opt.mode;
    if (sel.needs_substochastic()) {
        if (mode == "general") {
            throw Error(Errc::CertificationError, "--identity " + opt.identity + " needs --mode substochastic");
        }
        mode = "substochastic";
    }

    std::optional<SubstochasticMatrix<T>> sp;
    if (mode == "substochastic" || mode == "auto") {
        try {
            sp = validate_substochastic(b);
        } catch (const Error& e) {
            if (mode == "substochastic") {
                throw Error(Errc::CertificationError, "input is not a certified substochastic matrix: " + detail::error_label(e));
            }
        }
    }
    text << "matrix: n=" << b.rows() << " backend=" << ScalarTraits<T>::name << " digest=" << in.digest << "\n";

    std::vector<IdentityReport<T>> reports;
    if (sp) {
        text << "mode: substochastic (" << certification_name(sp->certification()) << "); general identities use B = I - P\n";
        if (sel.thm1()) {
            const auto max = check_diagonal_maximality(*sp, tol);
            text << detail::maximality_text(max);
            rep.add(report::maximality(max));
        }
        reports = verify_all(*sp, tol);
    } else {
        std::optional<GeneralMatrix<T>> g;
        try {
            g = certify_general(b, opt.strict_minors);
        } catch (const Error& e) {
            throw Error(Errc::CertificationError, std::string("input fails the nonzero-minor certificate: ") + e.what());
        }
        text << "mode: general\n";
        reports = verify_all(*g, tol);
    }

    std::size_t shown = 0;
    for (const auto& r : reports) {
        if (!sel.wants(r.id)) {
            continue;
        }
        if ((opt.m && r.m && *r.m != *opt.m) || (opt.l && r.l && *r.l != *opt.l)) {
            continue;
        }
        text << detail::identity_line(r);
        rep.add(report::identity(r));
        ++shown;
    }
    text << "identities checked: " << shown << "\n";
}

// ---------------------------------------------------------------------------
// falsify
// ---------------------------------------------------------------------------

struct FalsifyOptions {
    std::string identity = "all";
    std::string n = "2..8";
    std::uint64_t count = 100;
    std::uint64_t seed = 0;
    std::string density = "3/4";
    std::string max_row_sum = "1";
    std::uint64_t denominator_bound = 12;
};

namespace detail {

struct Counterexample {
    std::uint64_t instance;
    std::uint64_t seed;
    std::string family;
    Json failure;
    Matrix<Rational> matrix;
};

template <Scalar T>
void collect_identity_failures(const std::vector<IdentityReport<T>>& reports, const Selection& sel,
                               std::vector<Json>& failures, std::uint64_t& checks)
{
    for (const auto& r : reports) {
        if (!sel.wants(r.id)) {
            continue;
        }
        ++checks;
        if (!r.passed) {
            failures.push_back(report::identity(r));
        }
    }
}

} // namespace detail

template <Scalar T>
void cmd_falsify_typed(const Common& common, const FalsifyOptions& opt, RunReport& rep, std::ostringstream& text)
{
    const NRange range = parse_n_range(opt.n);
    const detail::Selection sel{opt.identity};
    const Tolerance tol{common.tol, Tolerance{}.abs_floor};
    GenSpec base;
    base.density = parse_rational(opt.density);
    base.max_row_sum = parse_rational(opt.max_row_sum);
    base.denominator_bound = opt.denominator_bound;

    const bool substochastic_family = sel.needs_substochastic() || sel.name == "all";
    const bool general_family = !sel.needs_substochastic();

    std::uint64_t checks = 0;
    std::uint64_t skipped = 0;
    std::vector<detail::Counterexample> found;

    for (std::uint64_t i = 0; i < opt.count; ++i) {
        GenSpec spec = base;
        spec.seed = SplitMix64::derive(opt.seed, i);
        SplitMix64 dim_rng(spec.seed);
        spec.n = range.lo + static_cast<Index>(dim_rng.below(range.hi - range.lo + 1));

        if (substochastic_family) {
            const auto exact_sp = gen_substochastic(spec);
            std::vector<Json> failures;
            try {
                const auto sp = validate_substochastic(convert<T>(exact_sp.matrix()));
                if (sel.thm1()) {
                    ++checks;
                    try {
                        const auto max = check_diagonal_maximality(sp, tol);
                        if (!max.holds) {
                            failures.push_back(report::maximality(max));
                        }
                    } catch (const Error& e) {
                        failures.push_back(Json{{"kind", "maximality"}, {"passed", false}, {"error", e.what()}});
                    }
                }
                if (sel.name != "thm1") {
                    detail::collect_identity_failures(verify_all(sp, tol), sel, failures, checks);
                }
            } catch (const Error& e) {
                if (ScalarTraits<T>::is_exact) {
                    throw;
                }
                ++skipped;
            }
            for (auto& f : failures) {
                found.push_back({i, spec.seed, "substochastic", std::move(f), exact_sp.matrix()});
            }
        }
        if (general_family) {
            const auto exact_g = gen_general(spec);
            std::vector<Json> failures;
            try {
                const auto g = certify_general(convert<T>(exact_g.matrix()));
                detail::collect_identity_failures(verify_all(g, tol), sel, failures, checks);
            } catch (const Error& e) {
                if (ScalarTraits<T>::is_exact) {
                    throw;
                }
                ++skipped;
            }
            for (auto& f : failures) {
                found.push_back({i, spec.seed, "general", std::move(f), exact_g.matrix()});
            }
        }
    }

    Json summary;
    summary["kind"] = "falsify_summary";
    summary["identity"] = opt.identity;
    summary["n_range"] = {range.lo, range.hi};
    summary["instances"] = opt.count;
    summary["seed"] = opt.seed;
    summary["checks"] = checks;
    summary["skipped"] = skipped;
    summary["counterexamples"] = found.size();
    summary["passed"] = found.empty();
    rep.add(std::move(summary));

    text << "falsify: identity=" << opt.identity << " n=" << range.lo << ".." << range.hi << " instances=" << opt.count
         << " seed=" << opt.seed << " backend=" << ScalarTraits<T>::name << "\n";
    text << "checks: " << checks << "  skipped: " << skipped << "  counterexamples: " << found.size() << "\n";
    for (const auto& c : found) {
        Json j;
        j["kind"] = "counterexample";
        j["passed"] = false;
        j["instance"] = c.instance;
        j["instance_seed"] = c.seed;
        j["family"] = c.family;
        j["failure"] = c.failure;
        j["matrix"] = Json::parse(io::write_json_exact(c.matrix));
        text << "counterexample: instance " << c.instance << " (" << c.family << ", seed " << c.seed << ")\n"
             << "  " << c.failure.dump() << "\n"
             << io::write_json_exact(c.matrix);
        rep.add(std::move(j));
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    double sigma = 4.0;
};

template <Scalar T>
void cmd_simulate_typed(const detail::Loaded& in, const SimulateOptions& opt, RunReport& rep, std::ostringstream& text)
{
    const Matrix<T>& m = detail::pick<T>(in.file);
    std::optional<SubstochasticMatrix<T>> sp;
    try {
        sp = validate_substochastic(m);
    } catch (const Error& e) {
        throw Error(Errc::CertificationError, "input is not a certified substochastic matrix: " + detail::error_label(e));
    }
    const FundamentalCrosscheck cc = crosscheck_fundamental(*sp, opt.trials, opt.seed, opt.sigma);
    rep.add(report::crosscheck(cc));

    text << "simulate: n=" << m.rows() << " trials=" << opt.trials << " seed=" << opt.seed << " sigma=" << opt.sigma
         << " digest=" << in.digest << "\n";
    text << "start state  estimate        halfwidth    exact           flag\n";
    char buf[160];
    for (Index s = 1; s <= m.rows(); ++s) {
        const auto& w = cc.rows[s - 1];
        for (Index j = 1; j <= m.rows(); ++j) {
            const double est = w.mean_visits[j - 1];
            const double hw = w.ci_halfwidth[j - 1];
            const double exact = cc.exact(s, j);
            const bool flagged = std::fabs(est - exact) > opt.sigma * hw;
            std::snprintf(buf, sizeof buf, "%5zu %5zu  %-14.8f  %-11.6f  %-14.8f  %s\n", s, j, est, hw, exact,
                          flagged ? "FLAG" : "");
            text << buf;
        }
        if (w.cap_exceeded > 0) {
            text << "  start " << s << ": " << w.cap_exceeded << " walks hit the step cap\n";
        }
    }
    text << "flags: " << cc.flags.size() << "  empirical dominance violations: " << cc.dominance_violations.size()
         << "\n";
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenOptions {
    std::string kind = "substochastic";
    Index n = 3;
    std::uint64_t seed = 0;
    std::string density = "1";
    std::string max_row_sum = "1";
    std::uint64_t denominator_bound = 12;
    std::string output;
};

inline std::string generate(const GenOptions& opt)
{
    GenSpec spec;
    spec.n = opt.n;
    spec.seed = opt.seed;
    spec.density = parse_rational(opt.density);
    spec.max_row_sum = parse_rational(opt.max_row_sum);
    spec.denominator_bound = opt.denominator_bound;
    if (opt.kind == "substochastic") {
        return io::write_json_exact(gen_substochastic(spec).matrix());
    }
    if (opt.kind == "general") {
        return io::write_json_exact(gen_general(spec).matrix());
    }
    return io::write_json_exact(gen_column_substochastic(spec));
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

inline int exit_code_for(const Error& e)
{
    switch (e.code()) {
    case Errc::ParseError:
    case Errc::IoError: return kIo;
    case Errc::ContractViolation: return kFailed;
    default: return kUsage;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact and floating-point verification of substochastic-matrix identities", "substoch"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&common](CLI::App* sub) {
        sub->add_option("--backend", common.backend, "Scalar backend (auto: exact for JSON, float for CSV)")
            ->check(CLI::IsMember({"auto", "exact", "float"}));
        sub->add_option("--tol", common.tol, "Relative tolerance for the float backend")->check(CLI::PositiveNumber);
        sub->add_flag("--json", common.json, "Emit the machine-readable report");
        sub->add_flag("--timing", common.timing, "Record wall time in the report");
    };

    std::string path;
    std::uint64_t check_seed = 0;
    auto* check = app.add_subcommand("check", "Certify a substochastic matrix and report det(I - P^T)");
    check->add_option("path", path, "Matrix file (.json exact or .csv float)")->required();
    check->add_option("--seed", check_seed, "Seed of the power-iteration start vector");
    add_common(check);

    VerifyOptions vopt;
    Index vm = 0;
    Index vl = 0;
    auto* verify = app.add_subcommand("verify", "Evaluate both sides of every identity");
    verify->add_option("path", path, "Matrix file")->required();
    verify->add_option("--identity", vopt.identity)
        ->check(CLI::IsMember({"thm1", "thm2", "eq13", "eq17", "eq20", "eq21", "lemma1", "lemma2", "all"}));
    verify->add_option("--mode", vopt.mode, "Treat the input as P (substochastic) or B (general)")
        ->check(CLI::IsMember({"auto", "substochastic", "general"}));
    verify->add_option("--m", vm, "Restrict to this m")->check(CLI::PositiveNumber);
    verify->add_option("--l", vl, "Restrict to this l")->check(CLI::PositiveNumber);
    verify->add_flag("--strict-minors", vopt.strict_minors, "Require every principal minor to be nonzero");
    add_common(verify);

    FalsifyOptions fopt;
    auto* falsify = app.add_subcommand("falsify", "Randomized counterexample search");
    falsify->add_option("--identity", fopt.identity)
        ->check(CLI::IsMember({"thm1", "thm2", "eq13", "eq17", "eq20", "eq21", "lemma1", "lemma2", "all"}));
    falsify->add_option("--n", fopt.n, "Dimension or range A..B");
    falsify->add_option("--count", fopt.count, "Number of instances");
    falsify->add_option("--seed", fopt.seed)->required();
    falsify->add_option("--density", fopt.density, "Nonzero probability, e.g. 3/4");
    falsify->add_option("--max-row-sum", fopt.max_row_sum, "Upper bound of drawn row sums (substochastic)");
    falsify->add_option("--denominator-bound", fopt.denominator_bound)->check(CLI::PositiveNumber);
    add_common(falsify);

    SimulateOptions sopt;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo cross-check of (I - P)^-1");
    simulate->add_option("path", path, "Matrix file")->required();
    simulate->add_option("--trials", sopt.trials)->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sopt.seed)->required();
    simulate->add_option("--sigma", sopt.sigma)->check(CLI::PositiveNumber);
    add_common(simulate);

    GenOptions gopt;
    auto* gen = app.add_subcommand("gen", "Write a random JsonExact matrix");
    gen->add_option("--kind", gopt.kind)->check(CLI::IsMember({"substochastic", "general", "column-substochastic"}));
    gen->add_option("--n", gopt.n)->check(CLI::PositiveNumber);
    gen->add_option("--seed", gopt.seed)->required();
    gen->add_option("--density", gopt.density);
    gen->add_option("--max-row-sum", gopt.max_row_sum);
    gen->add_option("--denominator-bound", gopt.denominator_bound)->check(CLI::PositiveNumber);
    gen->add_option("-o,--output", gopt.output, "Output path (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kPassed : kUsage;
    }

    std::vector<std::string> args(argv + 1, argv + argc);
    RunReport rep;
    rep.command = detail::command_echo(args);
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream text;

    try {
        if (*gen) {
            const std::string doc = generate(gopt);
            if (gopt.output.empty()) {
                out << doc;
            } else {
                std::ofstream f(gopt.output, std::ios::binary | std::ios::trunc);
                if (!f || !(f << doc) || !f.flush()) {
                    throw Error(Errc::IoError, "cannot write " + gopt.output);
                }
            }
            return kPassed;
        }

        if (*falsify) {
            rep.input_digest = io::digest(rep.command);
            const bool exact = common.backend != "float";
            rep.backend = exact ? "exact" : "float";
            if (exact) {
                cmd_falsify_typed<Rational>(common, fopt, rep, text);
            } else {
                cmd_falsify_typed<double>(common, fopt, rep, text);
            }
            return detail::finish(rep, common, t0, out, text.str());
        }

        const detail::Loaded in = detail::load(path);
        rep.input_digest = in.digest;
        const bool exact = detail::use_exact(common, in.file);
        rep.backend = exact ? "exact" : "float";

        if (*check) {
            exact ? cmd_check_typed<Rational>(in, check_seed, rep, text)
                  : cmd_check_typed<double>(in, check_seed, rep, text);
        } else if (*verify) {
            if (vm > 0) {
                vopt.m = vm;
            }
            if (vl > 0) {
                vopt.l = vl;
            }
            exact ? cmd_verify_typed<Rational>(in, common, vopt, rep, text)
                  : cmd_verify_typed<double>(in, common, vopt, rep, text);
        } else if (*simulate) {
            exact ? cmd_simulate_typed<Rational>(in, sopt, rep, text) : cmd_simulate_typed<double>(in, sopt, rep, text);
        }
        return detail::finish(rep, common, t0, out, text.str());
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

/// Convenience overload for in-process callers; args exclude the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv{"substoch"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace substoch::cli
