#pragma once

// Closed-form forward model and rho_c inversion for the two-pad spacer
// structure. The model books the pad metal at full current (r_shm*l_c/W per
// pad), one lumped contact resistance per pad, and the bare spacer; it is
// the crude flavor of the method and the discrete oracle quantifies its
// residual (a few percent when pads are not negligible).
//
// The de-embed resistance of this flavor has no closed form here on
// purpose: it comes from measurement or from the network oracle.

#include "tlmforge/core.hpp"

namespace tlmforge {

/// Total resistance of the spacer structure:
/// 2*r_shm*l_c/W + 2*R_C + r_shs*l_s/W.
inline double rtlm_total_resistance(const SheetStack& s, const RtlmGeometry& g) {
    return 2.0 * s.r_shm * g.l_c / s.width
         + 2.0 * contact_resistance_rtlm(s)
         + s.r_shs * g.l_s / s.width;
}

/// De-embedded line of the spacer flavor, affine in l_s:
/// slope (r_shs - r_shm)/W, intercept 2*R_C at l_s = 0.
/// Flags stacks where the slope-sign assumption r_shs > r_shm fails.
inline double rtlm_deembedded_resistance(const SheetStack& s, double l_s,
                                         guard_sink* sink = nullptr) {
    if (s.r_shs <= s.r_shm)
        warn(sink, "rtlm de-embedded line assumes r_shs > r_shm; slope sign is invalid",
             s.r_shs / s.r_shm);
    return (s.r_shs - s.r_shm) * l_s / s.width + 2.0 * contact_resistance_rtlm(s);
}

/// Invert the fitted de-embedded line (slope, intercept at l_s = 0) to the
/// contact resistivity:
/// rho_c = (intercept*(r_shs - r_shm)/(2*slope))^2 * (r_shs + r_shm)/r_shs^2.
inline double rtlm_rho_c_from_fit(double slope, double intercept,
                                  double r_shs, double r_shm) {
    if (!(slope > 0.0))
        throw extraction_error("rtlm extraction: fitted slope must be positive "
                               "(got " + std::to_string(slope) + ")");
    if (!(r_shs > r_shm))
        throw std::invalid_argument("rtlm extraction requires r_shs > r_shm");
    const double half_lt_scaled = intercept * (r_shs - r_shm) / (2.0 * slope);
    return half_lt_scaled * half_lt_scaled * (r_shs + r_shm) / (r_shs * r_shs);
}

} // namespace tlmforge
