#pragma once

#include <set>
#include <string>
#include <vector>

#include "cnb/equilibria.hpp"

namespace cnb {

/// Parameter sweep over curvature and the family's shape parameter.
/// mass_ratio_grid feeds M/m for the isosceles family; lambda_grid feeds the
/// parallel-circle parameter of the equal-mass family (lambda for kappa > 0,
/// the height v for kappa < 0). m and r are the reference mass and the
/// planetary circle radius.
struct SweepSpec {
    Family family = Family::planetary;
    std::vector<double> kappa_grid;
    std::vector<double> mass_ratio_grid{1.0};
    std::vector<double> lambda_grid{0.5};
    std::set<std::string> outputs{"existence", "alpha", "latitude", "shape_s", "residual"};
    double m = 1.0;
    double r = 0.5;

    void validate() const;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// One row per grid point: existence flag plus the requested outputs for
/// points where the family's builder succeeds. Nonexistent points carry the
/// matching nonexistence-scan residual where one applies (NaN otherwise);
/// per-point failures become rows, never aborts.
Table sweep(const SweepSpec& spec);

/// The two distances from the equator plane bounding the isosceles bands,
/// in absolute length units: (sqrt(3)/3 * kappa^{-1/2}, 3/5 * kappa^{-1/2}).
std::pair<double, double> band_boundaries(const Curvature& c);

/// Rows (s, F(s)) for external plotting. Grid points must stay inside (-1, 0)
/// and at least 1e-6 away from the equilateral point -1/2.
Table f_profile(const std::vector<double>& s_grid);

/// Default profile grid: step 0.005 over [-0.995, -0.005] skipping the two
/// points nearest -1/2; includes -1/4.
std::vector<double> default_f_grid();

void write_table_csv(std::ostream& os, const Table& table, const std::string& config_hash = {});

}  // namespace cnb
