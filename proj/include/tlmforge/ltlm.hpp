#pragma once

// Closed forms of the ladder-flavor method: rail current profiles from the
// solved coupled-rail ODEs, the de-embed (full-coverage) resistance, the
// partitioned-structure resistance, the total-resistance line, the
// de-embedded difference line, and the rho_c inversion.
//
// Frame conventions (the source derivations switch frames silently, so each
// function states its own):
//   * metal_current_fraction: x = 0 at the injection terminal, where the
//     metal rail carries the full current.
//   * semiconductor_current_fraction_left: x = 0 at the injection terminal
//     of the access region [0, l_c]; at x = l_c (the partition) the current
//     is entirely in the semiconductor rail.
//
// Validity guards: the de-embed form needs l_0/2 >> L_t and the access form
// needs l_c >> L_t. ">>" is encoded as a configurable factor (default 10 and
// 5 respectively) and violations are reported as warnings, not errors, so
// degraded measurement data still produces (flagged) output.

#include "tlmforge/core.hpp"

namespace tlmforge {

inline constexpr double default_half_length_guard = 10.0;
inline constexpr double default_access_guard = 5.0;

/// Fraction of total current carried by the metal rail at distance x from
/// the injection terminal of a fully covered (coupled-rail) region:
/// r_shs/(r_shs+r_shm) + r_shm/(r_shs+r_shm) * exp(-x/L_t).
/// rho_c = 0 degenerates to a step: 1 at x = 0, the asymptote beyond.
inline double metal_current_fraction(const SheetStack& s, double x) {
    const double sum = s.sheet_sum();
    const double lt = transfer_length(s).meters;
    if (lt == 0.0) return x == 0.0 ? 1.0 : s.r_shs / sum;
    return s.r_shs / sum + s.r_shm / sum * std::exp(-x / lt);
}

/// Fraction of total current in the semiconductor rail at distance x from
/// the injection terminal of an access region of length l_c that ends at a
/// partition. Grows from 0 to 1 over the region; exact only up to terms of
/// order exp(-l_c/L_t). Flags stacks far from the r_shs >> r_shm regime.
inline double semiconductor_current_fraction_left(const SheetStack& s, double l_c,
                                                  double x,
                                                  guard_sink* sink = nullptr) {
    if (s.r_shs < 5.0 * s.r_shm)
        warn(sink, "access-region profile assumes r_shs >> r_shm",
             s.r_shs / s.r_shm);
    const double sum = s.sheet_sum();
    const double lt = transfer_length(s).meters;
    if (lt == 0.0) return x == 0.0 ? 0.0 : 1.0;
    return s.r_shm / sum * (1.0 - std::exp(-x / lt))
         + 2.0 * s.r_shs / sum * std::exp(-l_c / lt) * std::sinh(x / lt);
}

/// Resistance of the de-embed structure: metal coverage over the full
/// length 2*l_c + l_0, measured between the outer metal terminals.
/// Parallel-slab term plus one boundary-layer term per terminal:
/// r_shs*r_shm*(2 l_c + l_0)/(W*sum) + 2*r_shm^2*L_t/(W*sum).
inline double ltlm_no_spacer_resistance(const SheetStack& s, double l_c, double l_0,
                                        guard_sink* sink = nullptr,
                                        double guard_factor = default_half_length_guard) {
    const double lt = transfer_length(s).meters;
    if (lt > 0.0 && l_0 / 2.0 < guard_factor * lt)
        warn(sink, "de-embed form assumes l_0/2 >> L_t", l_0 / (2.0 * lt));
    const double sum = s.sheet_sum();
    return s.r_shs * s.r_shm * (2.0 * l_c + l_0) / (s.width * sum)
         + 2.0 * s.r_shm * s.r_shm * lt / (s.width * sum);
}

/// Access-plus-contact resistance of one electrode region of length l_c
/// (semiconductor-rail drop from the terminal to the partition divided by
/// the total current). The default drops the exponentially small sinh
/// contribution, matching the published form; `exact` keeps it, for
/// comparison against the oracle.
inline double ltlm_access_contact_resistance(const SheetStack& s, double l_c,
                                             guard_sink* sink = nullptr,
                                             bool exact = false,
                                             double guard_factor = default_access_guard) {
    const double lt = transfer_length(s).meters;
    if (lt > 0.0 && l_c < guard_factor * lt)
        warn(sink, "access-region form assumes l_c >> L_t", lt > 0.0 ? l_c / lt : 0.0);
    const double sum = s.sheet_sum();
    double r = s.r_shs * s.r_shm * l_c / (s.width * sum)
             + (s.r_shs * s.r_shs - s.r_shs * s.r_shm) * lt / (s.width * sum);
    if (exact && lt > 0.0) {
        // remaining terms of the profile integral: the dropped boundary pieces
        const double e1 = std::exp(-l_c / lt);
        r += s.r_shs * lt / (s.width * sum)
           * ((s.r_shm - 2.0 * s.r_shs) * e1 + s.r_shs * e1 * e1);
    }
    return r;
}

/// Resistance of the partitioned structure (full coverage with zero-width
/// breaks at both ends of the gap region), as published:
/// [2 r_shs r_shm l_c + r_shs r_shm l_0 + (4 r_shs^2 - 2 r_shs r_shm) L_t] / (W*sum).
/// Equals the total-resistance line evaluated at l_g = l_0.
inline double ltlm_partitioned_resistance(const SheetStack& s, double l_c, double l_0,
                                          guard_sink* sink = nullptr) {
    const double lt = transfer_length(s).meters;
    if (lt > 0.0) {
        if (l_0 / 2.0 < default_half_length_guard * lt)
            warn(sink, "partitioned form assumes l_0/2 >> L_t", l_0 / (2.0 * lt));
        if (l_c < default_access_guard * lt)
            warn(sink, "partitioned form assumes l_c >> L_t", l_c / lt);
    }
    const double sum = s.sheet_sum();
    return (2.0 * s.r_shs * s.r_shm * l_c
          + s.r_shs * s.r_shm * l_0
          + (4.0 * s.r_shs * s.r_shs - 2.0 * s.r_shs * s.r_shm) * lt)
         / (s.width * sum);
}

/// Slope of the total-resistance line in the ladder length:
/// S = -r_shs^2 / (W*(r_shs + r_shm)). Negative: covering more of the gap
/// with ladder metal lowers the resistance.
inline double ltlm_slope(const SheetStack& s) {
    return -s.r_shs * s.r_shs / (s.width * s.sheet_sum());
}

/// Ladder-edge contact resistance of the legacy ladder model:
/// r_shs^2 * L_t / (W*(r_shs + r_shm)). Kept for comparison with legacy
/// workflows; the de-embedded pipeline does not use it.
inline double ltlm_ladder_contact_resistance(const SheetStack& s) {
    return s.r_shs * s.r_shs * transfer_length(s).meters / (s.width * s.sheet_sum());
}

/// Total resistance of the ladder test structure at ladder length g.l_g,
/// affine in l_g with the given slope:
///   slope*l_g + r_shs*l_0/W + 2*r_shs*r_shm*l_c/(W*sum)
///   + (4*r_shs^2 - 2*r_shs*r_shm)*L_t/(W*sum).
///
/// Note the 2x on the electrode term: both electrodes contribute, which is
/// what makes this line minus the de-embed resistance reproduce the
/// de-embedded difference line identically and makes the line's value at
/// l_g = l_0 equal the partitioned-structure resistance.
inline double ltlm_total_resistance(const SheetStack& s, const LtlmGeometry& g,
                                    double l_c, double slope,
                                    guard_sink* sink = nullptr) {
    const double sum = s.sheet_sum();
    const double lt = transfer_length(s).meters;
    if (lt > 0.0 && g.l_0 / 2.0 < default_half_length_guard * lt)
        warn(sink, "total-resistance form assumes l_0/2 >> L_t", g.l_0 / (2.0 * lt));
    return slope * g.l_g
         + s.r_shs * g.l_0 / s.width
         + 2.0 * s.r_shs * s.r_shm * l_c / (s.width * sum)
         + (4.0 * s.r_shs * s.r_shs - 2.0 * s.r_shs * s.r_shm) * lt / (s.width * sum);
}

inline double ltlm_total_resistance(const SheetStack& s, const LtlmGeometry& g,
                                    double l_c, guard_sink* sink = nullptr) {
    return ltlm_total_resistance(s, g, l_c, ltlm_slope(s), sink);
}

/// De-embedded difference line (total minus de-embed), affine in l_g:
/// S*(l_g - l_0) + (4*r_shs^2 - 2*r_shs*r_shm - 2*r_shm^2)*L_t/(W*sum).
/// Independent of l_c: the electrode terms cancel in the subtraction.
inline double ltlm_deembedded_resistance(const SheetStack& s, double l_g, double l_0,
                                         guard_sink* sink = nullptr) {
    const double sum = s.sheet_sum();
    const double lt = transfer_length(s).meters;
    if (lt > 0.0 && l_0 / 2.0 < default_half_length_guard * lt)
        warn(sink, "de-embedded line assumes l_0/2 >> L_t", l_0 / (2.0 * lt));
    return ltlm_slope(s) * (l_g - l_0)
         + (4.0 * s.r_shs * s.r_shs - 2.0 * s.r_shs * s.r_shm - 2.0 * s.r_shm * s.r_shm)
           * lt / (s.width * sum);
}

/// Invert the fitted de-embedded line (slope S and value at l_g = l_0) to
/// the contact resistivity:
/// rho_c = (value/(2S))^2 * (r_shs + r_shm) * (r_shs^2/(2 r_shs^2 - r_shm^2 - r_shs r_shm))^2.
inline double ltlm_rho_c_from_fit(double slope, double value_at_l0,
                                  double r_shs, double r_shm) {
    if (slope == 0.0)
        throw extraction_error("ladder extraction: fitted slope is zero");
    const double denom = 2.0 * r_shs * r_shs - r_shm * r_shm - r_shs * r_shm;
    if (!(denom > 0.0))
        throw std::invalid_argument("ladder extraction requires "
                                    "2*r_shs^2 - r_shm^2 - r_shs*r_shm > 0");
    const double half = value_at_l0 / (2.0 * slope);
    const double shape = r_shs * r_shs / denom;
    return half * half * (r_shs + r_shm) * shape * shape;
}

// ---------------------------------------------------------------------------
// Legacy (pre-de-embedding) ladder baseline
// ---------------------------------------------------------------------------

/// Resistance of the physical no-ladder structure (bare gap of length l_0
/// between the two electrodes): r_shs*l_0/W + 2 * access-plus-contact.
/// This is the legacy calibration baseline whose l_0 sensitivity the
/// de-embedding scheme suppresses.
inline double rltlm_lg0_resistance(const SheetStack& s, double l_c, double l_0,
                                   guard_sink* sink = nullptr) {
    return s.r_shs * l_0 / s.width
         + 2.0 * ltlm_access_contact_resistance(s, l_c, sink);
}

/// Legacy inversion: with the no-ladder structure as baseline, the
/// de-embedded intercept at l_g = 0 equals twice the ladder-edge contact
/// resistance, so rho_c = (intercept/(2S))^2 * (r_shs + r_shm).
inline double rltlm_rho_c_from_fit(double slope, double intercept_at_0,
                                   double r_shs, double r_shm) {
    if (slope == 0.0)
        throw extraction_error("legacy ladder extraction: fitted slope is zero");
    const double half = intercept_at_0 / (2.0 * slope);
    return half * half * (r_shs + r_shm);
}

} // namespace tlmforge
