#include "commands.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "lacunary/diagonal.hpp"
#include "lacunary/identities.hpp"
#include "lacunary/levinson.hpp"
#include "lacunary/offdiagonal.hpp"

namespace lacunary::cli {

namespace {

using json = nlohmann::ordered_json;

std::string num(double x) { return format_real(x); }

void cap(const std::string& what, double x, double limit) {
    if (x > limit) throw CapacityError(what + " = " + num(x) + " exceeds the desk cap " + num(limit));
}

json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

std::vector<i64> fundamental_in(i64 abs_max) {
    std::vector<i64> out;
    for (i64 D = -abs_max; D <= abs_max; ++D)
        if (D != 0 && is_fundamental_discriminant(D)) out.push_back(D);
    return out;
}

CropProfile mollifier_profile(double M, int r, double N) {
    CropProfile p;
    p.M = M;
    p.r = r;
    p.N = N;
    p.validate();
    return p;
}

// ---------------------------------------------------------------------------

CommandOutput scan_eps(const Params& p, const RunContext&) {
    const auto [lo, hi] = p.range("range", {-500, -3});
    cap("|D| in range", static_cast<double>(std::max(std::abs(lo), std::abs(hi))), 20000);
    const auto rows = scan_discriminants(lo, hi);
    CommandOutput out;
    std::ostringstream csv;
    csv << "rank,D,epsilon\n";
    json list = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        csv << i + 1 << ',' << rows[i].first << ',' << num(rows[i].second) << '\n';
        list.push_back({{"D", rows[i].first}, {"epsilon", rows[i].second}});
    }
    out.csv = csv.str();
    out.json["rows"] = list;
    out.summary = std::to_string(rows.size()) + " fundamental discriminants ranked by epsilon(D)";
    return out;
}

CommandOutput coeffs(const Params& p, const RunContext& ctx) {
    const auto disc = Discriminant::make(p.integer("D", -3));
    const std::string kind_name = p.str("kind", "lambda0");
    const auto kind = parse_coeff_kind(kind_name);
    if (!kind) throw ConfigError("parameter kind: unknown coefficient kind '" + kind_name + "'");
    const i64 bound = p.integer("bound", 1000);
    if (bound < 1) throw ConfigError("parameter bound must be positive");
    cap("bound", static_cast<double>(bound), 1e7);
    CoeffParams cp;
    if (*kind == CoeffKind::lambda_psi) cp.psi_index = static_cast<int>(p.integer("psi", 0));
    if (*kind == CoeffKind::vonmangoldt_j) {
        cp.degree = static_cast<int>(p.integer("degree", 1));
        cp.log_scale = p.real("log_scale", 1.0);
    }
    const CoefficientTable t = ctx.cache_dir.empty() ? coeff_table(*kind, disc, bound, cp)
                                                     : cached_coeff_table(ctx.cache_dir, *kind, disc, bound, cp);
    CommandOutput out;
    std::ostringstream csv;
    csv << "n,value\n";
    json values = json::array();
    for (i64 n = 1; n <= bound; ++n) {
        csv << n << ',' << num(t[n]) << '\n';
        values.push_back(t[n]);
    }
    out.csv = csv.str();
    out.json["D"] = disc.D;
    out.json["kind"] = coeff_kind_name(*kind);
    out.json["bound"] = bound;
    out.json["values"] = values;
    out.summary = std::string(coeff_kind_name(*kind)) + " coefficients up to " + std::to_string(bound);
    return out;
}

CommandOutput fe_check(const Params& p, const RunContext&) {
    const std::vector<i64> Ds = p.has("D") ? p.integers("D", {}) : fundamental_in(p.integer("abs_max", 50));
    const auto sigmas = p.reals("sigma", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
    const i64 t_max = p.integer("t_max", 50);
    const double tol = p.real("tol", 1e-8);
    cap("t_max", static_cast<double>(t_max), 1000);
    cap("grid points", static_cast<double>(Ds.size() * sigmas.size()) * static_cast<double>(t_max), 1e6);
    for (double s : sigmas)
        if (!(s > 0.0 && s < 1.0)) throw ConfigError("parameter sigma must lie in (0, 1)");
    CommandOutput out;
    std::ostringstream csv;
    csv << "D,sigma,t,residual\n";
    double worst = 0.0;
    for (i64 D : Ds) {
        const auto d = Discriminant::make(D);
        if (std::abs(D) > 10000) throw CapacityError("|D| above 10000 in fe-check");
        for (double s : sigmas)
            for (i64 t = 1; t <= t_max; ++t) {
                const double r = functional_equation_residual(cplx(s, static_cast<double>(t)), d);
                worst = std::max(worst, r);
                csv << D << ',' << num(s) << ',' << t << ',' << num(r) << '\n';
            }
    }
    out.csv = csv.str();
    out.ok = worst < tol;
    out.json["discriminants"] = Ds;
    out.json["points"] = Ds.size() * sigmas.size() * static_cast<std::size_t>(t_max);
    out.json["worst_residual"] = worst;
    out.json["tolerance"] = tol;
    out.json["pass"] = out.ok;
    out.summary = "functional equation: worst residual " + num(worst);
    return out;
}

CommandOutput partition_check(const Params& p, const RunContext&) {
    const auto Ds = p.integers("D", {-3, -7});
    const auto Ts = p.reals("T", {20, 30});
    const auto offsets = p.reals("offsets", {1, 5, 9, 14, 19});
    const double alpha = p.real("alpha", 0.75), beta = p.real("beta", 0.55), tol = p.real("tol", 1e-5);
    for (double T : Ts) {
        require_range("T", T, 2.0, 1e9);
        cap("T", T, 100);
    }
    CommandOutput out;
    std::ostringstream csv;
    csv << "D,T,t,residual,printed_residual,R_tail\n";
    double worst = 0.0;
    json rows = json::array();
    for (i64 D : Ds) {
        const auto d = Discriminant::make(D);
        for (double T : Ts) {
            const CropProfile prof = profile_for_height(d, T, alpha, beta);
            for (double off : offsets) {
                const double t = T + off;
                const PartitionTerms terms = partition_terms(cplx(0.5, t), d, prof);
                worst = std::max(worst, terms.residual);
                csv << D << ',' << num(T) << ',' << num(t) << ',' << num(terms.residual) << ','
                    << num(terms.printed_residual) << ',' << num(terms.R_tail) << '\n';
                rows.push_back({{"D", D}, {"T", T}, {"t", t}, {"residual", terms.residual},
                                {"printed_residual", terms.printed_residual}, {"R_tail", terms.R_tail}});
            }
        }
    }
    out.csv = csv.str();
    out.ok = worst < tol;
    out.json["rows"] = rows;
    out.json["worst_residual"] = worst;
    out.json["tolerance"] = tol;
    out.json["pass"] = out.ok;
    out.summary = "partition of G: worst residual " + num(worst);
    return out;
}

CommandOutput zeros(const Params& p, const RunContext&) {
    const auto d = Discriminant::make(p.integer("D", -3));
    const double T = p.real("T", 10.0), step = p.real("grid_step", 0.02);
    require_range("T", T, 1.0, 1e9);
    cap("T", T, 200);
    require_range("grid_step", step, 1e-3, 0.1);
    const ZeroCensus c = count_critical_zeros(d, T, step);
    CommandOutput out;
    out.json = json::parse(census_to_json(c));
    out.summary = "N = " + std::to_string(c.N) + ", N0 = " + std::to_string(c.N0) + ", N00 = " + std::to_string(c.N00);
    return out;
}

CommandOutput levinson(const Params& p, const RunContext&) {
    const auto d = Discriminant::make(p.integer("D", -3));
    const double T = p.real("T", 50.0), M = p.real("M", 100.0), step = p.real("grid_step", 0.02);
    const int r = static_cast<int>(p.integer("r", 4));
    require_range("T", T, 5.0, 1e9);
    cap("T", T, 100);
    require_range("M", M, 1.0, 1e9);
    cap("M", M, 1e4);
    require_range("grid_step", step, 1e-3, 0.1);
    const LevinsonReport rep = levinson_report(T, d, build_mollifier(d, M, r), profile_for_height(d, T), step);
    CommandOutput out;
    out.json = json{{"D", d.D},          {"T", T},
                    {"M", M},            {"r", r},
                    {"N", rep.N},        {"N00_counted", rep.N00_counted},
                    {"I", rep.I},        {"lower_bound_raw", rep.lower_bound_raw},
                    {"slack", rep.slack}, {"strict_holds", rep.strict_holds}};
    out.summary = "N = " + std::to_string(rep.N) + ", N00 = " + std::to_string(rep.N00_counted) +
                  ", N - 4 I log T = " + num(rep.lower_bound_raw);
    return out;
}

CommandOutput diagonal(const Params& p, const RunContext&) {
    const auto d = Discriminant::make(p.integer("D", -3));
    const double M = p.real("M", 1e4), N = p.real("N", 1e10);
    const int r = static_cast<int>(p.integer("r", 3));
    const i64 q = p.integer("q", 210);
    const auto Ys = p.reals("Y", {2e4, 1e5, 1e6});
    cap("M", M, 1e5);
    for (double Y : Ys) {
        require_range("Y", Y, M, N);
        cap("Y", Y, 1e7);
    }
    const CropProfile prof = mollifier_profile(M, r, N);
    SieveConfig cfg{d, prof, q, r};
    cfg.validate();
    CommandOutput out;
    std::ostringstream csv;
    csv << "table,X,Y,value,ratio\n";
    json srows = json::array(), trows = json::array();
    const double logM = std::log(M);
    for (double e : {0.25, 0.5, 1.0}) {
        const double Y = std::pow(M, e);
        const double s = S_sum(1.0, Y, d, prof), ratio = s * std::pow(logM / std::log(Y), 2);
        csv << "S," << num(1.0) << ',' << num(Y) << ',' << num(s) << ',' << num(ratio) << '\n';
        srows.push_back({{"X", 1.0}, {"Y", Y}, {"S", s}, {"ratio", ratio}});
    }
    for (double Y : Ys) {
        const double t = T_sum(M, Y, cfg), ratio = t * std::pow(logM / std::log(Y), r);
        csv << "T," << num(M) << ',' << num(Y) << ',' << num(t) << ',' << num(ratio) << '\n';
        trows.push_back({{"X", M}, {"Y", Y}, {"T", t}, {"ratio", ratio}});
    }
    out.csv = csv.str();
    out.json["D"] = d.D;
    out.json["M"] = M;
    out.json["r"] = r;
    out.json["q"] = q;
    out.json["S_ratio"] = srows;   // S(1,Y) (log M / log Y)^2
    out.json["T_ratio"] = trows;   // T(M,Y) (log M / log Y)^r
    out.summary = "diagonal ratio tables for D = " + std::to_string(d.D);
    return out;
}

CommandOutput voronoi(const Params& p, const RunContext&) {
    const auto Ds = p.integers("D", {-3, -7});
    const i64 c_max = p.integer("c_max", 20), a = p.integer("a", 1);
    const auto Xs = p.reals("X", {300, 1e3, 1e4});
    cap("c_max", static_cast<double>(c_max), 50);
    for (double X : Xs) {
        require_range("X", X, 10.0, 1e9);
        cap("X", X, 1e5);
    }
    CommandOutput out;
    std::ostringstream csv;
    csv << "a,c,D,X,lhs_re,lhs_im,main_re,main_im,dual_re,dual_im,residual,tolerance,dual_terms\n";
    double worst = 0.0;
    int cases = 0, failures = 0;
    for (i64 D : Ds) {
        const auto d = Discriminant::make(D);
        for (double X : Xs)
            for (i64 c = 1; c <= c_max; ++c) {
                // The dual series settles within its term budget once X >= 8 c^2.
                if (8.0 * static_cast<double>(c * c) > X || std::gcd(a, c) != 1) continue;
                const VoronoiResult r = voronoi_check(a, c, d, X);
                ++cases;
                failures += r.residual > r.tolerance;
                worst = std::max(worst, r.residual / std::abs(r.lhs));
                csv << a << ',' << c << ',' << D << ',' << num(X) << ',' << num(r.lhs.real()) << ','
                    << num(r.lhs.imag()) << ',' << num(r.main.real()) << ',' << num(r.main.imag()) << ','
                    << num(r.dual.real()) << ',' << num(r.dual.imag()) << ',' << num(r.residual) << ','
                    << num(r.tolerance) << ',' << r.dual_terms << '\n';
            }
    }
    out.csv = csv.str();
    out.ok = failures == 0;
    out.json["cases"] = cases;
    out.json["failures"] = failures;
    out.json["worst_relative_residual"] = worst;
    out.json["pass"] = out.ok;
    out.summary = std::to_string(cases) + " Voronoi cases, worst relative residual " + num(worst);
    return out;
}

CommandOutput singular_series(const Params& p, const RunContext& ctx) {
    const auto Ds = p.integers("D", {-3, -7, -11, -19});
    const i64 uv_max = p.integer("uv_max", 12), h_max = p.integer("h_max", 24), c_max = p.integer("c_max", 20000);
    cap("uv_max", static_cast<double>(uv_max), 30);
    cap("h_max", static_cast<double>(h_max), 100);
    cap("c_max", static_cast<double>(c_max), 1e6);
    if (uv_max < 1 || h_max < 1) throw ConfigError("uv_max and h_max must be positive");
    const auto rows = singular_series_grid(Ds, static_cast<int>(uv_max), static_cast<int>(h_max), c_max, ctx.jobs);
    int outside = 0;
    double worst = 0.0;
    for (const auto& r : rows) {
        outside += r.worst_gap > r.tail;
        worst = std::max(worst, r.worst_gap / r.tail);
    }
    CommandOutput out;
    out.csv = singular_rows_csv(rows);
    out.ok = outside == 0;
    out.json["rows"] = rows.size();
    out.json["outside_tail"] = outside;
    out.json["worst_gap_over_tail"] = worst;
    out.json["pass"] = out.ok;
    out.summary = std::to_string(rows.size()) + " rows, worst gap/tail " + num(worst);
    return out;
}

CommandOutput kernels(const Params& p, const RunContext&) {
    const TestFunctionPair pair;
    const double z_min = p.real("z_min", 0.1), z_max = p.real("z_max", 1000.0);
    const i64 points = p.integer("points", 81);
    require_range("z_min", z_min, 1e-2, z_max);
    cap("points", static_cast<double>(points), 1000);
    if (points < 2) throw ConfigError("points must be at least 2");
    std::vector<double> grid;
    for (i64 i = 0; i < points; ++i)
        grid.push_back(z_min * std::pow(z_max / z_min, static_cast<double>(i) / static_cast<double>(points - 1)));
    const PhiKernelReport phi = phi_kernel_check(pair, grid);

    const auto disc = Discriminant::make(p.integer("D", -7));
    SingularInput in{p.integer("u", 2), p.integer("v", 3), 1, disc};
    in.validate();
    const double s = p.real("s", 2.0);
    require_range("s", s, 0.5, 10.0);
    const i64 d_max = p.integer("d_max", 1000000);
    cap("d_max", static_cast<double>(d_max), 1e7);
    const cplx direct = zeta_gamma_star_direct(s, in, d_max), closed = zeta_gamma_star(s, in);
    const double zrel = std::abs(direct - closed) / std::abs(closed);

    SingularInput pole{p.integer("pole_u", 1), p.integer("pole_v", 2), 1, disc};
    pole.validate();
    const double res = zeta_gamma_star_residue(pole);
    const double avg = 0.5 * (1e-3 * zeta_gamma_star(1e-3, pole) - 1e-3 * zeta_gamma_star(-1e-3, pole)).real();
    const double rrel = res != 0.0 ? std::abs(avg - res) / std::abs(res) : std::abs(avg);

    const double y = p.real("y", 1e-3);
    require_range("y", y, 1e-4, 1e-1);
    SingularInput cal{p.integer("cal_u", 1), p.integer("cal_v", 7), 1, Discriminant::make(p.integer("cal_D", -3))};
    cal.validate();
    const double a0 = calibrate_alpha0(y, cal, pair), a0_pred = alpha0_predicted(pair);

    CommandOutput out;
    out.ok = phi.max_discrepancy <= 1e-9 && zrel <= 1e-6 && rrel < 1e-5;
    out.json["phi"] = {{"points", points},
                       {"z_min", z_min},
                       {"z_max", z_max},
                       {"max_discrepancy", phi.max_discrepancy},
                       {"decay_constant", phi.decay_constant},
                       {"phi0_constant", phi.phi0_constant}};
    out.json["zeta_star"] = {{"D", disc.D},          {"u", in.u}, {"v", in.v}, {"s", s}, {"d_max", d_max},
                             {"direct", complex_json(direct)}, {"closed", complex_json(closed)},
                             {"relative_gap", zrel}};
    out.json["residue"] = {{"u", pole.u}, {"v", pole.v}, {"value", res}, {"symmetric_limit", avg}, {"relative_gap", rrel}};
    out.json["alpha0"] = {{"D", cal.disc.D}, {"u", cal.u}, {"v", cal.v}, {"y", y}, {"calibrated", a0}, {"predicted", a0_pred}};
    out.json["pass"] = out.ok;
    out.summary = "phi routes " + num(phi.max_discrepancy) + ", z* gap " + num(zrel) + ", alpha0 " + num(a0);
    return out;
}

CommandOutput identities(const Params& p, const RunContext& ctx) {
    const auto Ds = p.integers("D", {-3, -7, -11});
    const i64 umax = p.integer("umax", 50), q_max = p.integer("q_max", 10000);
    const double tol = p.real("tol", 1e-10);
    const auto js64 = p.integers("j", {1, 2, 3, 4});
    cap("umax", static_cast<double>(umax), 200);
    cap("q_max", static_cast<double>(q_max), 1e5);
    if (umax < 1 || q_max < 1) throw ConfigError("umax and q_max must be positive");
    std::vector<int> js;
    for (i64 j : js64) {
        require_range("j", static_cast<double>(j), 0, 8);
        js.push_back(static_cast<int>(j));
    }
    const IdentityReport rep = identity_grid(Ds, umax, ctx.jobs, tol);
    IdentityReport bound;
    for (i64 D : Ds) {
        const IdentityReport b = lambda_star_bound_check(Discriminant::make(D), q_max, js);
        bound.checks += b.checks;
        bound.worst = std::max(bound.worst, b.worst);
        bound.failures.insert(bound.failures.end(), b.failures.begin(), b.failures.end());
    }
    auto failures = [](const IdentityReport& r) {
        json arr = json::array();
        for (const auto& f : r.failures)
            arr.push_back({{"name", f.name}, {"u", f.u}, {"v", f.v}, {"D", f.D}, {"q", f.q}, {"lhs", f.lhs}, {"rhs", f.rhs}});
        return arr;
    };
    CommandOutput out;
    out.ok = rep.ok() && bound.ok();
    out.json["discriminants"] = Ds;
    out.json["umax"] = umax;
    out.json["tolerance"] = tol;
    out.json["identities"] = {{"checks", rep.checks}, {"worst", rep.worst}, {"failures", failures(rep)}};
    out.json["lambda_star_bound"] = {{"q_max", q_max}, {"j", js}, {"checks", bound.checks}, {"failures", failures(bound)}};
    out.json["pass"] = out.ok;
    out.summary = std::to_string(rep.checks) + " identity checks, " + std::to_string(rep.failures.size()) +
                  " failures; " + std::to_string(bound.checks) + " bound checks, " +
                  std::to_string(bound.failures.size()) + " failures";
    return out;
}

CommandOutput reconstruct(const Params& p, const RunContext& ctx) {
    const auto d = Discriminant::make(p.integer("D", -3));
    const auto Ns = p.reals("N", {1e3, 1e4, 1e5});
    const double M = p.real("M", 30.0);
    const int r = static_cast<int>(p.integer("r", 3));
    const auto ex = p.reals("exponents", {1.0, 1.4, 1.8});
    if (ex.size() != 3) throw ConfigError("parameter exponents needs three values");
    cap("M", M, 200);
    const CropProfile prof = mollifier_profile(M, r, Ns.empty() ? 1e3 : Ns.front());
    // Validate every N before the first sieve pass.
    for (double N : Ns) WConfig{d, N, prof, {ex[0], ex[1], ex[2]}, ctx.jobs}.validate();
    const ReconstructionReport rep = reconstruction_check(d, Ns, prof, {ex[0], ex[1], ex[2]}, ctx.jobs);
    CommandOutput out;
    out.json = json::parse(rep.to_json());
    out.summary = "fitted decay exponent " + num(rep.fitted_decay_exponent) + (rep.monotone ? ", monotone" : ", not monotone");
    return out;
}

std::vector<Command> build() {
    return {
        {"scan-eps", "rank fundamental discriminants by epsilon(D) = L(1,chi) log|D|", "csv",
         {{"range", "discriminant range lo..hi"}},
         scan_eps},
        {"coeffs", "dump a coefficient table", "csv",
         {{"D", "fundamental discriminant"},
          {"kind", "lambda0, rho, lambda_psi, lambda_tilde or vonmangoldt_j"},
          {"bound", "largest n"},
          {"psi", "class group character index (lambda_psi)"},
          {"degree", "degree j (vonmangoldt_j)"},
          {"log_scale", "divide by log_scale^j (vonmangoldt_j)"}},
         coeffs},
        {"fe-check", "functional equation residuals on a grid", "csv",
         {{"D", "discriminant list"},
          {"abs_max", "all fundamental |D| <= abs_max when D is not given"},
          {"sigma", "real parts"},
          {"t_max", "imaginary parts 1..t_max"},
          {"tol", "pass threshold"}},
         fe_check},
        {"partition-check", "residuals of the partition of G into A, B and corrections", "csv",
         {{"D", "discriminant list"},
          {"T", "heights"},
          {"offsets", "t - T values"},
          {"alpha", "crop alpha"},
          {"beta", "crop beta"},
          {"tol", "pass threshold"}},
         partition_check},
        {"zeros", "critical zero census on (T, 2T]", "json",
         {{"D", "fundamental discriminant"}, {"T", "height"}, {"grid_step", "sign-change scan step"}},
         zeros},
        {"levinson", "Levinson inequality report", "json",
         {{"D", "fundamental discriminant"},
          {"T", "height"},
          {"M", "mollifier length"},
          {"r", "mollifier crop exponent"},
          {"grid_step", "census scan step"}},
         levinson},
        {"diagonal", "S and T ratio tables of the diagonal sums", "csv",
         {{"D", "fundamental discriminant"},
          {"M", "mollifier length"},
          {"N", "level"},
          {"r", "crop exponent and sieve dimension"},
          {"q", "sieve modulus"},
          {"Y", "upper limits for T(M, Y)"}},
         diagonal},
        {"voronoi", "twisted Voronoi identity grid", "csv",
         {{"D", "discriminant list"}, {"c_max", "largest modulus"}, {"X", "bump positions"}, {"a", "numerator"}},
         voronoi},
        {"singular-series", "singular series by three routes", "csv",
         {{"D", "discriminant list"}, {"uv_max", "largest u, v"}, {"h_max", "largest h"}, {"c_max", "c-series cut"}},
         singular_series},
        {"kernels", "phi representations, z*(s) and alpha0", "json",
         {{"z_min", "phi grid start"},
          {"z_max", "phi grid end"},
          {"points", "phi grid size"},
          {"D", "discriminant for z*"},
          {"u", "u for z*"},
          {"v", "v for z*"},
          {"s", "point for z* direct vs closed"},
          {"d_max", "z* series cut"},
          {"pole_u", "u for the residue check"},
          {"pole_v", "v for the residue check"},
          {"y", "alpha0 calibration y"},
          {"cal_D", "alpha0 calibration D"},
          {"cal_u", "alpha0 calibration u"},
          {"cal_v", "alpha0 calibration v"}},
         kernels},
        {"identities", "lambda-function identity suite and the Lambda* bound", "json",
         {{"D", "discriminant list"},
          {"umax", "largest u, v"},
          {"tol", "relative tolerance"},
          {"q_max", "bound check range"},
          {"j", "bound check degrees"}},
         identities},
        {"reconstruct", "reconstruction of E00 from W", "json",
         {{"D", "fundamental discriminant"},
          {"N", "N grid"},
          {"M", "mollifier length"},
          {"r", "crop exponent"},
          {"exponents", "three block exponents in arithmetic progression"}},
         reconstruct},
    };
}

}  // namespace

const std::vector<Command>& commands() {
    static const std::vector<Command> list = build();
    return list;
}

const Command* find_command(const std::string& name) {
    for (const auto& c : commands())
        if (c.name == name) return &c;
    return nullptr;
}

}  // namespace lacunary::cli
