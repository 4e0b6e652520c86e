#pragma once

// Core domain types for TLM-style contact-resistivity extraction.
//
// Unit discipline: everything inside the library is strict SI — meters,
// ohms, ohm·m² for contact resistivity, ohm/square for sheet resistances.
// Ω·cm² and µm are accepted only at I/O boundaries (see units below).

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tlmforge {

// ---------------------------------------------------------------------------
// Errors and warnings
// ---------------------------------------------------------------------------

/// Network has no conducting path between its terminals (singular system).
struct unsolvable_topology : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Measured data is incompatible with the extraction model
/// (e.g. non-positive de-embedded slope).
struct extraction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Degenerate fit input (fewer than two distinct abscissae).
struct fit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-fatal diagnostic: a closed form was evaluated outside the regime
/// its derivation assumes. `ratio` is the violated-margin figure
/// (e.g. half-length over transfer length), when meaningful.
struct guard_warning {
    std::string message;
    double ratio = 0.0;
};

/// Optional sink for guard warnings; pass nullptr to ignore them.
using guard_sink = std::vector<guard_warning>;

inline void warn(guard_sink* sink, std::string msg, double ratio = 0.0) {
    if (sink) sink->push_back({std::move(msg), ratio});
}

// ---------------------------------------------------------------------------
// Units
// ---------------------------------------------------------------------------

inline constexpr double ohm_cm2_per_ohm_m2 = 1e4;

inline constexpr double ohm_cm2_to_ohm_m2(double v) { return v * 1e-4; }
inline constexpr double ohm_m2_to_ohm_cm2(double v) { return v * 1e4; }
inline constexpr double um_to_m(double v) { return v * 1e-6; }
inline constexpr double m_to_um(double v) { return v * 1e6; }

enum class RhoCUnit { ohm_m2, ohm_cm2 };

inline RhoCUnit parse_rho_c_unit(std::string_view s) {
    if (s == "ohm_m2" || s == "ohm.m2" || s == "ohm*m2") return RhoCUnit::ohm_m2;
    if (s == "ohm_cm2" || s == "ohm.cm2" || s == "ohm*cm2") return RhoCUnit::ohm_cm2;
    throw std::invalid_argument("unknown contact-resistivity unit: " + std::string(s));
}

/// Exact power-of-ten conversion between the two accepted rho_c units.
inline double convert_rho_c(double value, RhoCUnit from, RhoCUnit to) {
    if (from == to) return value;
    return from == RhoCUnit::ohm_cm2 ? value * 1e-4 : value * 1e4;
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Material parameters of the layered test section.
///
/// r_shs, r_shm: sheet resistances of the semiconductor and metal layers
/// (ohm/square); rho_c: specific contact resistivity (ohm·m²); width: test
/// section width W (m). The closed forms that assume r_shs >> r_shm flag
/// the violation through their guard sink; the type itself permits any
/// positive pair so the discrete oracle can handle it.
struct SheetStack {
    double r_shs;
    double r_shm;
    double rho_c;
    double width;

    SheetStack(double r_shs_, double r_shm_, double rho_c_ohm_m2, double width_m)
        : r_shs(r_shs_), r_shm(r_shm_), rho_c(rho_c_ohm_m2), width(width_m) {
        if (!(r_shs > 0.0) || !std::isfinite(r_shs))
            throw std::invalid_argument("SheetStack: r_shs must be > 0");
        if (!(r_shm > 0.0) || !std::isfinite(r_shm))
            throw std::invalid_argument("SheetStack: r_shm must be > 0");
        if (!(rho_c >= 0.0) || !std::isfinite(rho_c))
            throw std::invalid_argument("SheetStack: rho_c must be >= 0");
        if (!(width > 0.0) || !std::isfinite(width))
            throw std::invalid_argument("SheetStack: width must be > 0");
    }

    double sheet_sum() const { return r_shs + r_shm; }

    SheetStack with_rho_c(double rho_ohm_m2) const {
        return SheetStack(r_shs, r_shm, rho_ohm_m2, width);
    }
    SheetStack with_width(double width_m) const {
        return SheetStack(r_shs, r_shm, rho_c, width_m);
    }
};

/// Two-pad spacer geometry: metal pads of length l_c at both ends of a
/// bare section of length l_s. The sweep keeps l_0 = l_s + 2 l_c constant,
/// so constructors take two lengths and derive the third; the constraint
/// cannot be violated by construction.
struct RtlmGeometry {
    double l_s;
    double l_c;
    double l_0;

    /// From spacer and pad lengths; total derived.
    static RtlmGeometry of(double l_s, double l_c) {
        return RtlmGeometry(l_s, l_c, l_s + 2.0 * l_c);
    }
    /// Sweep point at constant total length; pad length derived.
    static RtlmGeometry sweep_point(double l_0, double l_s) {
        return RtlmGeometry(l_s, (l_0 - l_s) / 2.0, l_0);
    }

private:
    RtlmGeometry(double ls, double lc, double l0) : l_s(ls), l_c(lc), l_0(l0) {
        if (!(l_s >= 0.0) || !(l_c >= 0.0))
            throw std::invalid_argument("RtlmGeometry: lengths must be >= 0");
    }
};

/// Ladder-flavor gap geometry: a ladder region of length l_g centered in a
/// gap of constant total length l_0 = 2 l_s + l_g, with bare per-side
/// sections of length l_s. The outer electrode length is a separate
/// structure parameter (it does not vary with the sweep) and is passed
/// alongside this type where needed.
struct LtlmGeometry {
    double l_g;
    double l_s;
    double l_0;

    /// From ladder and per-side lengths; total derived.
    static LtlmGeometry of(double l_g, double l_s) {
        return LtlmGeometry(l_g, l_s, 2.0 * l_s + l_g);
    }
    /// Sweep point at constant total gap; per-side length derived.
    static LtlmGeometry sweep_point(double l_0, double l_g) {
        return LtlmGeometry(l_g, (l_0 - l_g) / 2.0, l_0);
    }

private:
    LtlmGeometry(double lg, double ls, double l0) : l_g(lg), l_s(ls), l_0(l0) {
        if (!(l_g >= 0.0) || !(l_s >= 0.0))
            throw std::invalid_argument("LtlmGeometry: lengths must be >= 0");
    }
};

/// Characteristic length over which current transfers between the rails.
struct TransferLength {
    double meters = 0.0;
};

// ---------------------------------------------------------------------------
// Elementary quantities
// ---------------------------------------------------------------------------

/// L_t = sqrt(rho_c / (r_shs + r_shm)); zero iff rho_c is zero.
inline TransferLength transfer_length(const SheetStack& s) {
    return {std::sqrt(s.rho_c / s.sheet_sum())};
}

/// Single contact resistance of the two-pad model: the semiconductor sheet
/// resistance over one transfer length, r_shs * L_t / W.
inline double contact_resistance_rtlm(const SheetStack& s) {
    return s.r_shs / s.width * transfer_length(s).meters;
}

} // namespace tlmforge
