#include "bltm/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "bltm/blasius.hpp"
#include "bltm/falkner_skan.hpp"
#include "bltm/itm.hpp"

namespace bltm {

std::string format_csv(double value) {
    if (std::isnan(value)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", value);
    return buf;
}

std::string format_cell(double value) {
    if (std::isnan(value)) return "nan";
    char buf[40];
    const double mag = std::abs(value);
    if (value == 0.0 || (mag >= 1e-3 && mag < 1e7)) {
        std::snprintf(buf, sizeof buf, "%.6f", value);
        return buf;
    }
    int exp10 = static_cast<int>(std::floor(std::log10(mag)));
    double mantissa = value / std::pow(10.0, exp10);
    if (std::abs(mantissa) >= 9.95) {
        mantissa /= 10.0;
        ++exp10;
    }
    std::snprintf(buf, sizeof buf, "%.1fD%+03d", mantissa, exp10);
    return buf;
}

namespace {

constexpr int kCellWidth = 14;

std::string flow_name(Flow f) { return f == Flow::normal ? "normal" : "reverse"; }

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw InvalidConfigError(what + ": empty entry in list");
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw InvalidConfigError(what + ": cannot parse '" + item + "'");
        }
        if (pos != item.size()) throw InvalidConfigError(what + ": cannot parse '" + item + "'");
        values.push_back(v);
    }
    if (values.empty()) throw InvalidConfigError(what + ": empty list");
    return values;
}

std::vector<double> parse_beta_range(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw InvalidConfigError("beta-range: expected start:stop:step");
    double start, stop, step;
    try {
        start = std::stod(parts[0]);
        stop = std::stod(parts[1]);
        step = std::stod(parts[2]);
    } catch (const std::exception&) {
        throw InvalidConfigError("beta-range: cannot parse '" + text + "'");
    }
    if (step == 0.0) throw InvalidConfigError("beta-range: step must be nonzero");
    if ((stop - start) * step < 0.0)
        throw InvalidConfigError("beta-range: step points away from stop");
    const long count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 100000) throw InvalidConfigError("beta-range: too many points");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) values.push_back(start + static_cast<double>(i) * step);
    return values;
}

void write_profile_csv(std::ostream& os, const std::vector<Sample>& profile) {
    os << "eta,f,fp,fpp\n";
    for (const Sample& s : profile)
        os << format_csv(s.eta) << ',' << format_csv(s.state.f) << ',' << format_csv(s.state.fp)
           << ',' << format_csv(s.state.fpp) << '\n';
}

void write_iteration_history(std::ostream& os, const std::vector<IterationRecord>& records,
                             bool csv) {
    if (csv) {
        os << "j,h_star,gamma,rel_change,fpp0\n";
        for (const IterationRecord& r : records) {
            os << r.j << ',' << format_csv(r.h_star) << ',' << format_csv(r.gamma) << ',';
            if (!std::isnan(r.rel_change)) os << format_csv(r.rel_change);
            os << ',' << format_csv(r.fpp0_physical) << '\n';
        }
    } else {
        os << std::setw(4) << "j" << std::setw(kCellWidth) << "h_star" << std::setw(kCellWidth)
           << "gamma" << std::setw(kCellWidth) << "rel_change" << std::setw(kCellWidth) << "fpp0"
           << '\n';
        for (const IterationRecord& r : records) {
            os << std::setw(4) << r.j << std::setw(kCellWidth) << format_cell(r.h_star)
               << std::setw(kCellWidth) << format_cell(r.gamma) << std::setw(kCellWidth)
               << (std::isnan(r.rel_change) ? "" : format_cell(r.rel_change))
               << std::setw(kCellWidth) << format_cell(r.fpp0_physical) << '\n';
        }
    }
}

struct OutputTarget {
    std::ofstream file;
    std::ostream* os = nullptr;

    static std::optional<OutputTarget> open(const std::string& path, std::ostream& fallback,
                                            std::ostream& err) {
        OutputTarget t;
        if (path.empty()) {
            t.os = &fallback;
            return t;
        }
        t.file.open(path);
        if (!t.file) {
            err << "error: cannot open output file '" << path << "'\n";
            return std::nullopt;
        }
        t.os = &t.file;
        return t;
    }
};

bool write_profile_file(const std::string& path, const std::vector<Sample>& profile,
                        std::ostream& err) {
    if (path.empty()) return true;
    std::ofstream f(path);
    if (!f) {
        err << "error: cannot open profile file '" << path << "'\n";
        return false;
    }
    write_profile_csv(f, profile);
    return true;
}

// ---------------------------------------------------------------- blasius

struct BlasiusArgs {
    std::string method = "adaptive";
    double step = 0.1;
    double rtol = 1e-9;
    double atol = 1e-9;
    std::string checkpoints = "6,8,10";
    double agreement_tol = 1e-9;
    std::string profile_path;
    std::string format = "csv";
    std::string output_path;
};

void write_lambda_table(std::ostream& os, const std::vector<LambdaCheckpoint>& cps,
                        std::size_t accepted, bool csv) {
    if (csv) {
        os << "eta_star,lambda,accepted\n";
        for (std::size_t i = 0; i < cps.size(); ++i)
            os << format_csv(cps[i].eta_star) << ',' << format_csv(cps[i].lambda) << ','
               << (i == accepted ? "true" : "false") << '\n';
    } else {
        os << std::setw(kCellWidth) << "eta_star" << std::setw(kCellWidth) << "lambda"
           << std::setw(10) << "accepted" << '\n';
        for (std::size_t i = 0; i < cps.size(); ++i)
            os << std::setw(kCellWidth) << format_cell(cps[i].eta_star) << std::setw(kCellWidth)
               << format_cell(cps[i].lambda) << std::setw(10) << (i == accepted ? "*" : "")
               << '\n';
    }
}

int cmd_blasius(const BlasiusArgs& a, std::ostream& out, std::ostream& err) {
    ToepferConfig cfg;
    cfg.checkpoints = parse_number_list(a.checkpoints, "checkpoints");
    cfg.agreement_tol = a.agreement_tol;
    cfg.integrator = a.method == "rk4" ? IntegratorKind::fixed : IntegratorKind::adaptive;
    cfg.step = a.step;
    cfg.rtol = a.rtol;
    cfg.atol = a.atol;
    const bool csv = a.format == "csv";

    auto target = OutputTarget::open(a.output_path, out, err);
    if (!target) return exit_code::usage;
    std::ostream& os = *target->os;

    try {
        BlasiusSolution sol = solve_toepfer(cfg);
        std::size_t accepted = 0;
        for (std::size_t i = 1; i < sol.lambda_checkpoints.size(); ++i) {
            if (sol.lambda_checkpoints[i].lambda == sol.lambda) {
                accepted = i;
                break;
            }
        }
        write_lambda_table(os, sol.lambda_checkpoints, accepted, csv);
        if (csv)
            os << "# lambda = " << format_csv(sol.lambda) << '\n';
        else
            os << "lambda = " << format_cell(sol.lambda) << '\n';
        if (!write_profile_file(a.profile_path, sol.physical, err)) return exit_code::usage;
        return exit_code::ok;
    } catch (const ToepferNoConvergence& e) {
        write_lambda_table(os, e.checkpoints, e.checkpoints.size(), csv);
        err << "error: " << e.what() << '\n';
        return exit_code::no_convergence;
    } catch (const BlowupError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::no_convergence;
    }
}

// ----------------------------------------------------------- falkner-skan

struct FsArgs {
    double beta = 0.0;
    std::string flow = "normal";
    double h0 = 0.0;
    double h1 = 0.0;
    double eta_inf = 20.0;
    double tol = 1e-6;
    double tol_r = 1e-6;
    double tol_a = 1e-6;
    int max_iter = 50;
    double rtol = 1e-6;
    double atol = 1e-6;
    std::string profile_path;
    std::string format = "csv";
    std::string output_path;
};

FalknerSkanCase case_from_args(const FsArgs& a) {
    FalknerSkanCase c = make_case(a.beta, a.flow == "reverse" ? Flow::reverse : Flow::normal);
    if (a.h0 > 0.0) c.config.h0 = a.h0;
    if (a.h1 > 0.0) c.config.h1 = a.h1;
    c.config.eta_inf = a.eta_inf;
    c.config.tol = a.tol;
    c.config.tol_r = a.tol_r;
    c.config.tol_a = a.tol_a;
    c.config.max_iter = a.max_iter;
    c.config.rtol = a.rtol;
    c.config.atol = a.atol;
    return c;
}

int cmd_falkner_skan(const FsArgs& a, std::ostream& out, std::ostream& err) {
    const FalknerSkanCase c = case_from_args(a);
    const bool csv = a.format == "csv";

    auto target = OutputTarget::open(a.output_path, out, err);
    if (!target) return exit_code::usage;
    std::ostream& os = *target->os;

    try {
        ItmResult r = solve_case(c);
        write_iteration_history(os, r.iterations, csv);
        if (csv)
            os << "# h_star = " << format_csv(r.h_star_root)
               << " lambda = " << format_csv(r.lambda) << " fpp0 = " << format_csv(r.fpp0)
               << '\n';
        else
            os << "h_star = " << format_cell(r.h_star_root)
               << "  lambda = " << format_cell(r.lambda) << "  fpp0 = " << format_cell(r.fpp0)
               << '\n';
        if (!write_profile_file(a.profile_path, r.physical, err)) return exit_code::usage;
        return exit_code::ok;
    } catch (const DoubleBlowupError& e) {
        write_iteration_history(os, e.history, csv);
        err << "error: " << e.what() << '\n';
        return exit_code::double_blowup;
    } catch (const ItmIterationError& e) {
        write_iteration_history(os, e.history, csv);
        err << "error: " << e.what() << '\n';
        return exit_code::no_convergence;
    }
}

// ------------------------------------------------------------------ sweep

struct SweepArgs {
    std::string betas;
    std::string beta_range;
    std::string flow = "normal";
    std::string seed_mode = "warm";
    bool parallel = false;
    double h0 = 0.0;
    double h1 = 0.0;
    double eta_inf = 20.0;
    double tol = 1e-6;
    double tol_r = 1e-6;
    double tol_a = 1e-6;
    int max_iter = 50;
    double rtol = 1e-6;
    double atol = 1e-6;
    std::string format = "csv";
    std::string output_path;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
    std::vector<double> betas = a.beta_range.empty() ? parse_number_list(a.betas, "betas")
                                                     : parse_beta_range(a.beta_range);
    const Flow flow = a.flow == "reverse" ? Flow::reverse : Flow::normal;

    SweepOptions opt;
    opt.mode = a.seed_mode == "independent" ? SeedMode::independent : SeedMode::warm_start;
    opt.parallel = a.parallel;
    opt.h0 = a.h0;
    opt.h1 = a.h1;
    opt.base.eta_inf = a.eta_inf;
    opt.base.tol = a.tol;
    opt.base.tol_r = a.tol_r;
    opt.base.tol_a = a.tol_a;
    opt.base.max_iter = a.max_iter;
    opt.base.rtol = a.rtol;
    opt.base.atol = a.atol;

    auto target = OutputTarget::open(a.output_path, out, err);
    if (!target) return exit_code::usage;
    std::ostream& os = *target->os;

    const std::vector<BranchPoint> points = sweep_beta(betas, flow, opt);
    const bool csv = a.format == "csv";
    bool all_converged = true;
    if (csv) {
        os << "beta,flow,fpp0,iterations,converged\n";
        for (const BranchPoint& p : points) {
            os << format_csv(p.beta) << ',' << flow_name(flow) << ',' << format_csv(p.fpp0) << ','
               << p.iterations << ',' << (p.converged ? "true" : "false") << '\n';
            all_converged = all_converged && p.converged;
        }
    } else {
        os << std::setw(kCellWidth) << "beta" << std::setw(10) << "flow" << std::setw(kCellWidth)
           << "fpp0" << std::setw(12) << "iterations" << std::setw(11) << "converged" << '\n';
        for (const BranchPoint& p : points) {
            os << std::setw(kCellWidth) << format_cell(p.beta) << std::setw(10) << flow_name(flow)
               << std::setw(kCellWidth) << format_cell(p.fpp0) << std::setw(12) << p.iterations
               << std::setw(11) << (p.converged ? "true" : "false") << '\n';
            all_converged = all_converged && p.converged;
        }
    }
    return all_converged ? exit_code::ok : exit_code::partial;
}

// --------------------------------------------------------------- beta-min

struct BetaMinArgs {
    double threshold = 1e-5;
    double tol = 1e-6;
    double tol_r = 1e-6;
    double tol_a = 1e-6;
    int max_iter = 50;
    double rtol = 1e-6;
    double atol = 1e-6;
    std::string format = "csv";
    std::string output_path;
};

int cmd_beta_min(const BetaMinArgs& a, std::ostream& out, std::ostream& err) {
    ItmConfig base;
    base.tol = a.tol;
    base.tol_r = a.tol_r;
    base.tol_a = a.tol_a;
    base.max_iter = a.max_iter;
    base.rtol = a.rtol;
    base.atol = a.atol;

    auto target = OutputTarget::open(a.output_path, out, err);
    if (!target) return exit_code::usage;
    std::ostream& os = *target->os;

    try {
        BetaMinResult r = find_beta_min(base, a.threshold);
        if (a.format == "csv") {
            os << "beta_min,fpp0_normal,fpp0_reverse,bracket_lo,bracket_hi\n";
            os << format_csv(r.beta_min) << ',' << format_csv(r.fpp0_normal) << ','
               << format_csv(r.fpp0_reverse) << ',' << format_csv(r.bracket_lo) << ','
               << format_csv(r.bracket_hi) << '\n';
        } else {
            os << "beta_min      = " << format_cell(r.beta_min) << '\n'
               << "fpp0 normal   = " << format_cell(r.fpp0_normal) << '\n'
               << "fpp0 reverse  = " << format_cell(r.fpp0_reverse) << '\n'
               << "bracket       = [" << format_cell(r.bracket_lo) << ", "
               << format_cell(r.bracket_hi) << "]\n";
        }
        return exit_code::ok;
    } catch (const BadStartError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::no_convergence;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Initial value methods for boundary-layer similarity problems"};
    app.require_subcommand(1);

    BlasiusArgs ba;
    CLI::App* blasius = app.add_subcommand(
        "blasius", "Non-iterative flat-plate solve: one IVP plus rescaling");
    blasius->add_option("--method", ba.method, "Integrator: rk4 or adaptive")
        ->check(CLI::IsMember({"rk4", "adaptive"}))
        ->capture_default_str();
    blasius->add_option("--step", ba.step, "Fixed-step size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    blasius->add_option("--rtol", ba.rtol, "Adaptive relative tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    blasius->add_option("--atol", ba.atol, "Adaptive absolute tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    blasius->add_option("--checkpoints", ba.checkpoints, "Comma-separated abscissae")
        ->capture_default_str();
    blasius->add_option("--agreement-tol", ba.agreement_tol, "Checkpoint agreement tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    blasius->add_option("--profile", ba.profile_path, "Write the physical profile CSV here");
    blasius->add_option("--format", ba.format, "csv or table")
        ->check(CLI::IsMember({"csv", "table"}))
        ->capture_default_str();
    blasius->add_option("--output", ba.output_path, "Report file (default: stdout)");

    FsArgs fa;
    CLI::App* fs = app.add_subcommand("falkner-skan", "Iterative solve of one wedge-flow case");
    fs->add_option("--beta", fa.beta, "Pressure-gradient parameter")->required();
    fs->add_option("--flow", fa.flow, "Branch: normal or reverse")
        ->check(CLI::IsMember({"normal", "reverse"}))
        ->capture_default_str();
    fs->add_option("--h0", fa.h0, "First secant iterate")->check(CLI::PositiveNumber);
    fs->add_option("--h1", fa.h1, "Second secant iterate")->check(CLI::PositiveNumber);
    fs->add_option("--eta-inf", fa.eta_inf, "Truncated boundary")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    fs->add_option("--tol", fa.tol, "Bound on |Gamma|")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    fs->add_option("--tol-r", fa.tol_r, "Relative iterate-change bound")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    fs->add_option("--tol-a", fa.tol_a, "Absolute iterate-change bound")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    fs->add_option("--max-iter", fa.max_iter, "Iteration cap")
        ->check(CLI::Range(2, 10000))
        ->capture_default_str();
    fs->add_option("--rtol", fa.rtol, "IVP relative tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    fs->add_option("--atol", fa.atol, "IVP absolute tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    fs->add_option("--profile", fa.profile_path, "Write the physical profile CSV here");
    fs->add_option("--format", fa.format, "csv or table")
        ->check(CLI::IsMember({"csv", "table"}))
        ->capture_default_str();
    fs->add_option("--output", fa.output_path, "Report file (default: stdout)");

    SweepArgs sa;
    CLI::App* sweep = app.add_subcommand("sweep", "Solve a list of parameters on one branch");
    CLI::Option* betas_opt = sweep->add_option("--betas", sa.betas, "Comma-separated values");
    sweep->add_option("--beta-range", sa.beta_range, "start:stop:step")->excludes(betas_opt);
    sweep->add_option("--flow", sa.flow, "Branch: normal or reverse")
        ->check(CLI::IsMember({"normal", "reverse"}))
        ->capture_default_str();
    sweep->add_option("--seed-mode", sa.seed_mode, "warm or independent")
        ->check(CLI::IsMember({"warm", "independent"}))
        ->capture_default_str();
    sweep->add_flag("--parallel", sa.parallel, "Solve independent-seed points in parallel");
    sweep->add_option("--h0", sa.h0, "First secant iterate")->check(CLI::PositiveNumber);
    sweep->add_option("--h1", sa.h1, "Second secant iterate")->check(CLI::PositiveNumber);
    sweep->add_option("--eta-inf", sa.eta_inf, "Truncated boundary")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--tol", sa.tol, "Bound on |Gamma|")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--tol-r", sa.tol_r, "Relative iterate-change bound")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--tol-a", sa.tol_a, "Absolute iterate-change bound")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--max-iter", sa.max_iter, "Iteration cap")
        ->check(CLI::Range(2, 10000))
        ->capture_default_str();
    sweep->add_option("--rtol", sa.rtol, "IVP relative tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--atol", sa.atol, "IVP absolute tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--format", sa.format, "csv or table")
        ->check(CLI::IsMember({"csv", "table"}))
        ->capture_default_str();
    sweep->add_option("--output", sa.output_path, "Report file (default: stdout)");

    BetaMinArgs ma;
    CLI::App* bmin = app.add_subcommand("beta-min", "Continuation search for the limiting beta");
    bmin->add_option("--threshold", ma.threshold, "Skin-friction magnitude to reach")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bmin->add_option("--tol", ma.tol, "Bound on |Gamma|")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bmin->add_option("--tol-r", ma.tol_r, "Relative iterate-change bound")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bmin->add_option("--tol-a", ma.tol_a, "Absolute iterate-change bound")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bmin->add_option("--max-iter", ma.max_iter, "Iteration cap")
        ->check(CLI::Range(2, 10000))
        ->capture_default_str();
    bmin->add_option("--rtol", ma.rtol, "IVP relative tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bmin->add_option("--atol", ma.atol, "IVP absolute tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bmin->add_option("--format", ma.format, "csv or table")
        ->check(CLI::IsMember({"csv", "table"}))
        ->capture_default_str();
    bmin->add_option("--output", ma.output_path, "Report file (default: stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream help_out, help_err;
        const int code = app.exit(e, help_out, help_err);
        out << help_out.str();
        err << help_err.str();
        return code == 0 ? exit_code::ok : exit_code::usage;
    }

    try {
        if (app.got_subcommand(blasius)) return cmd_blasius(ba, out, err);
        if (app.got_subcommand(fs)) return cmd_falkner_skan(fa, out, err);
        if (app.got_subcommand(sweep)) return cmd_sweep(sa, out, err);
        return cmd_beta_min(ma, out, err);
    } catch (const InvalidConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const InvalidProblemError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::usage;
    }
}

}  // namespace bltm
