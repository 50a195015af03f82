// Zero census on (T, 2T], the mollifier, the integral I(T) and the Levinson inequality report.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lacunary/approxfe.hpp"

namespace lacunary {

enum class ZeroSource { zeta_factor, chi_factor };
const char* zero_source_name(ZeroSource s);

struct CriticalZero {
    double gamma = 0.0;
    ZeroSource source = ZeroSource::zeta_factor;
    bool simple = true;
};

struct ZeroCensus {
    i64 D = 0;
    double T = 0.0;
    double grid_step = 0.0;
    std::vector<CriticalZero> zeros;  // ascending in gamma
    int N = 0;    // all zeros in the box, with multiplicity
    int N0 = 0;   // sign changes on the critical line
    int N00 = 0;  // simple and not shared between the factors
    int flagged = 0;  // close sign-change pairs that were re-scanned at a finer step
};

enum class BoxFactor { product, zeta, chi };

struct BoxCount {
    int N = 0;
    double T = 0.0;  // the height actually used, possibly nudged off a zero
    double leading_term = 0.0;  // (T/pi) log(QT)
    double slack_ratio = 0.0;   // |N - leading_term| / T
};

// Winding number of the chosen factor around sigma in [-1/2, 3/2], t in [T, 2T].
// Throws NumericalError when an argument jump stays above pi after the maximal refinement.
BoxCount count_zeros_box(const Discriminant& disc, double T, BoxFactor which = BoxFactor::product);

// Sign-change scan of the two Hardy functions over (T, 2T] with root refinement.
// The box count N is filled in as well.
ZeroCensus count_critical_zeros(const Discriminant& disc, double T, double grid_step = 0.02);

std::string census_to_json(const ZeroCensus& c);

struct MollifierSpec {
    i64 D = 0;
    double M = 1.0;
    int r = 1;
    std::vector<double> v;  // v[m] for 1 <= m < M, index 0 unused
};

MollifierSpec build_mollifier(const Discriminant& disc, double M, int r);
cplx mollifier_value(cplx s, const MollifierSpec& spec);
// F(s) = G(s) M(s) - 1 with G at level profile.N.
cplx F_fn(cplx s, const Discriminant& disc, const MollifierSpec& spec, const CropProfile& profile);

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int panels = 0;
};

// int_T^{2T} |F(1/2 + it)| dt, panel width at most 2 pi / log(QTM), refined until two rules agree to 1e-3.
IntegralResult I_integral(double T, const Discriminant& disc, const MollifierSpec& spec, const CropProfile& profile);
// The same quadrature for an arbitrary F on the critical line.
IntegralResult I_integral_of(double T, double panel_width, const std::function<cplx(cplx)>& F);

struct LevinsonReport {
    int N = 0;
    int N00_counted = 0;
    double I = 0.0;
    double lower_bound_raw = 0.0;  // N - 4 I log T
    double slack = 0.0;            // max(0, lower_bound_raw - N00_counted) / T
    bool strict_holds = false;     // lower_bound_raw <= N00_counted
};

LevinsonReport levinson_report(double T, const Discriminant& disc, const MollifierSpec& spec,
                               const CropProfile& profile, double grid_step = 0.02);

}  // namespace lacunary
