#pragma once

#include <string_view>

namespace sascor {

enum class FilterShape { tophat, gaussian };

// A bandpass transmission window on the Raman-shift magnitude axis. Both the
// Stokes and the anti-Stokes filter of a symmetric pair are described by the
// same positive center; the Stokes window is understood as mirrored onto the
// positive axis. Pairs are emitted at symmetric shifts, so only the mirrored
// overlap of the two transmissions contributes.
struct FilterBand {
    double center_cm1 = 0.0;
    double width_cm1 = 0.0;  // FWHM
    FilterShape shape = FilterShape::tophat;

    // Throws ValidationError: width > 0 and center > width/2 are required so
    // the band cannot include the laser line.
    void validate() const;

    double transmission(double shift_cm1) const;

    // Half-extent of the window used for quadrature and support checks:
    // width/2 for top-hat, 1.5*width for Gaussian (transmission < 2e-3 there).
    double half_support() const;
};

// Integral of the product of the two mirrored transmissions over shift
// magnitude. Closed form for every shape combination.
double band_overlap(const FilterBand& stokes, const FilterBand& anti_stokes);

const char* to_string(FilterShape s);
FilterShape filter_shape_from_string(std::string_view name);

}  // namespace sascor
