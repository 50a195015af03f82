#include "lacunary/levinson.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "json.hpp"

namespace lacunary {

namespace {

constexpr double kContourClearance = 1e-6;

cplx factor_value(cplx s, const Discriminant& disc, BoxFactor which) {
    switch (which) {
        case BoxFactor::zeta: return zeta(s);
        case BoxFactor::chi: return dirichlet_L(s, disc);
        default: return L_product(s, disc);
    }
}

// Total change of arg f along the segment a -> b, bisecting until each step turns by less than pi/4.
template <class F>
double arg_change(F& f, cplx a, cplx fa, cplx b, cplx fb, int depth) {
    const double d = std::arg(fb / fa);
    if (std::abs(d) < kPi / 4) return d;
    if (depth >= 40) {
        if (std::abs(d) >= kPi) throw NumericalError("argument tracking failed to resolve a jump above pi");
        return d;
    }
    const cplx m = 0.5 * (a + b);
    const cplx fm = f(m);
    return arg_change(f, a, fa, m, fm, depth + 1) + arg_change(f, m, fm, b, fb, depth + 1);
}

template <class F>
double edge_arg_change(F& f, cplx a, cplx b, double spacing) {
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / spacing)));
    double total = 0.0;
    cplx prev = a, fprev = f(a);
    for (int k = 1; k <= n; ++k) {
        const cplx z = a + (b - a) * (static_cast<double>(k) / n);
        const cplx fz = f(z);
        total += arg_change(f, prev, fprev, z, fz, 0);
        prev = z;
        fprev = fz;
    }
    return total;
}

double hardy(double t, const Discriminant& disc, ZeroSource src) {
    return src == ZeroSource::zeta_factor ? hardy_Z_zeta(t) : hardy_Z_chi(t, disc);
}

double refine_root(double a, double b, const Discriminant& disc, ZeroSource src) {
    auto f = [&](double t) { return hardy(t, disc, src); };
    boost::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(f, a, b, boost::math::tools::eps_tolerance<double>(48), it);
    return 0.5 * (r.first + r.second);
}

// Sign changes of one Hardy function on (lo, hi] sampled at step h; returns refined ordinates.
std::vector<double> scan_factor(double lo, double hi, double h, const Discriminant& disc, ZeroSource src) {
    std::vector<double> roots;
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / h)));
    double tprev = lo, zprev = hardy(lo, disc, src);
    for (int k = 1; k <= n; ++k) {
        const double t = (k == n) ? hi : lo + k * h;
        const double z = hardy(t, disc, src);
        if (z == 0.0) {
            roots.push_back(t);
        } else if (zprev != 0.0 && (z < 0) != (zprev < 0)) {
            roots.push_back(refine_root(tprev, t, disc, src));
        }
        tprev = t;
        zprev = z;
    }
    return roots;
}

// Re-scans clusters of nearby sign changes at a tenth of the step and returns the merged ordinates.
std::vector<double> scan_with_refinement(double lo, double hi, double h, const Discriminant& disc, ZeroSource src,
                                         int& flagged) {
    std::vector<double> roots = scan_factor(lo, hi, h, disc, src);
    std::vector<double> out;
    std::size_t i = 0;
    while (i < roots.size()) {
        std::size_t j = i;
        while (j + 1 < roots.size() && roots[j + 1] - roots[j] < 10 * h) ++j;
        if (j == i) {
            out.push_back(roots[i]);
        } else {
            ++flagged;
            const double a = std::max(lo, roots[i] - 10 * h), b = std::min(hi, roots[j] + 10 * h);
            // Every ordinate inside the window comes from the finer scan.
            std::vector<double> fine = scan_factor(a, b, h / 10, disc, src);
            out.insert(out.end(), fine.begin(), fine.end());
        }
        i = j + 1;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double x, double y) { return std::abs(x - y) < 1e-9; }),
              out.end());
    return out;
}

bool is_simple(double gamma, double h, const Discriminant& disc, ZeroSource src) {
    const double e = 1e-5;
    const double deriv = (hardy(gamma + e, disc, src) - hardy(gamma - e, disc, src)) / (2 * e);
    double scale = 0.0;
    for (int k = -5; k <= 5; ++k) scale = std::max(scale, std::abs(hardy(gamma + k * std::max(h, 0.05), disc, src)));
    return std::abs(deriv) >= 1e-6 * std::max(scale, 1e-300);
}

}  // namespace

const char* zero_source_name(ZeroSource s) { return s == ZeroSource::zeta_factor ? "zeta_factor" : "chi_factor"; }

BoxCount count_zeros_box(const Discriminant& disc, double T, BoxFactor which) {
    if (!(T > 0.0)) throw DomainError("zero census requires T > 0");
    if (2 * T > 1000.0) throw CapacityError("zero census is limited to heights 2T <= 1000");
    auto f = [&](cplx s) { return factor_value(s, disc, which); };
    double Tu = T;
    for (int attempt = 0; attempt < 20; ++attempt) {
        const bool clear = std::abs(f(cplx(0.5, Tu))) > kContourClearance &&
                           std::abs(f(cplx(0.5, 2 * Tu))) > kContourClearance;
        if (clear) break;
        Tu += 1e-4;
    }
    const double lo = -0.5, hi = 1.5, spacing = 0.05;
    const cplx c1(hi, Tu), c2(hi, 2 * Tu), c3(lo, 2 * Tu), c4(lo, Tu);
    const double total = edge_arg_change(f, c1, c2, spacing) + edge_arg_change(f, c2, c3, spacing) +
                         edge_arg_change(f, c3, c4, spacing) + edge_arg_change(f, c4, c1, spacing);
    BoxCount bc;
    bc.N = static_cast<int>(std::lround(total / (2 * kPi)));
    if (std::abs(total / (2 * kPi) - bc.N) > 1e-3) throw NumericalError("winding number is not close to an integer");
    bc.T = Tu;
    const double qt = disc.Q * Tu;
    bc.leading_term = qt > 0 ? Tu / kPi * std::log(qt) : 0.0;
    bc.slack_ratio = std::abs(bc.N - bc.leading_term) / Tu;
    return bc;
}

ZeroCensus count_critical_zeros(const Discriminant& disc, double T, double grid_step) {
    if (!(grid_step > 0.0)) throw DomainError("grid step must be positive");
    ZeroCensus c;
    c.D = disc.D;
    const BoxCount box = count_zeros_box(disc, T);
    c.T = box.T;
    c.N = box.N;
    c.grid_step = grid_step;
    for (ZeroSource src : {ZeroSource::zeta_factor, ZeroSource::chi_factor}) {
        for (double g : scan_with_refinement(c.T, 2 * c.T, grid_step, disc, src, c.flagged))
            c.zeros.push_back({g, src, is_simple(g, grid_step, disc, src)});
    }
    std::sort(c.zeros.begin(), c.zeros.end(),
              [](const CriticalZero& a, const CriticalZero& b) { return a.gamma < b.gamma; });
    c.N0 = static_cast<int>(c.zeros.size());
    for (std::size_t i = 0; i < c.zeros.size(); ++i) {
        bool shared = false;
        for (std::size_t j = 0; j < c.zeros.size(); ++j)
            if (j != i && c.zeros[j].source != c.zeros[i].source &&
                std::abs(c.zeros[j].gamma - c.zeros[i].gamma) < 1e-6)
                shared = true;
        if (c.zeros[i].simple && !shared) ++c.N00;
    }
    return c;
}

std::string census_to_json(const ZeroCensus& c) {
    nlohmann::ordered_json j;
    j["D"] = c.D;
    j["T"] = c.T;
    j["grid_step"] = c.grid_step;
    j["zeros"] = nlohmann::ordered_json::array();
    for (const auto& z : c.zeros)
        j["zeros"].push_back({{"gamma", z.gamma}, {"source", zero_source_name(z.source)}, {"simple", z.simple}});
    j["N"] = c.N;
    j["N0"] = c.N0;
    j["N00"] = c.N00;
    return j.dump(2);
}

MollifierSpec build_mollifier(const Discriminant& disc, double M, int r) {
    if (!(M >= 1.0)) throw DomainError("mollifier length must be >= 1");
    if (r < 1) throw DomainError("crop exponent must be >= 1");
    MollifierSpec spec;
    spec.D = disc.D;
    spec.M = M;
    spec.r = r;
    const i64 mmax = std::max<i64>(1, static_cast<i64>(std::floor(M)));
    const auto rho = rho_table(Character(disc.D), mmax);
    CropProfile p;
    p.M = M;
    p.r = r;
    spec.v.assign(static_cast<std::size_t>(mmax) + 1, 0.0);
    spec.v[1] = 1.0;
    for (i64 m = 2; m <= mmax; ++m) spec.v[m] = rho[m] * crop_g(static_cast<double>(m), p);
    return spec;
}

cplx mollifier_value(cplx s, const MollifierSpec& spec) {
    KahanSum<cplx> acc;
    for (std::size_t m = 1; m < spec.v.size(); ++m)
        if (spec.v[m] != 0.0) acc += spec.v[m] * std::exp(-s * std::log(static_cast<double>(m)));
    return acc.value();
}

cplx F_fn(cplx s, const Discriminant& disc, const MollifierSpec& spec, const CropProfile& profile) {
    return G_fn(s, disc, profile.N) * mollifier_value(s, spec) - 1.0;
}

IntegralResult I_integral_of(double T, double panel_width, const std::function<cplx(cplx)>& F) {
    if (!(T > 0.0) || !(panel_width > 0.0)) throw DomainError("I(T) requires T > 0 and a positive panel width");
    int panels = static_cast<int>(std::ceil(T / panel_width));
    auto g = [&](double t) { return std::abs(F(cplx(0.5, t))); };
    for (int round = 0; round < 8; ++round) {
        // |F| has kinks at zeros of F, so compare a rule against its refinement.
        const double coarse = integrate_gl(g, T, 2 * T, panels, 8);
        const double fine = integrate_gl(g, T, 2 * T, 2 * panels, 8);
        const double err = std::abs(fine - coarse);
        if (err <= std::max(1e-3 * std::abs(fine), 1e-13 * T)) return {fine, err, 2 * panels};
        panels *= 2;
    }
    throw NumericalError("I(T) quadrature did not reach relative accuracy 1e-3");
}

IntegralResult I_integral(double T, const Discriminant& disc, const MollifierSpec& spec, const CropProfile& profile) {
    if (!(T >= 10.0)) throw DomainError("I(T) requires T >= 10");
    const double l = std::log(disc.Q * T * spec.M);
    const double width = l > 0.0 ? std::min(1.0, 2 * kPi / l) : 1.0;
    return I_integral_of(T, width, [&](cplx s) { return F_fn(s, disc, spec, profile); });
}

LevinsonReport levinson_report(double T, const Discriminant& disc, const MollifierSpec& spec,
                               const CropProfile& profile, double grid_step) {
    LevinsonReport rep;
    const ZeroCensus c = count_critical_zeros(disc, T, grid_step);
    rep.N = c.N;
    rep.N00_counted = c.N00;
    rep.I = I_integral(T, disc, spec, profile).value;
    rep.lower_bound_raw = rep.N - 4.0 * rep.I * std::log(T);
    rep.slack = std::max(0.0, rep.lower_bound_raw - rep.N00_counted) / T;
    rep.strict_holds = rep.lower_bound_raw <= rep.N00_counted;
    return rep;
}

}  // namespace lacunary
