#pragma once

#include <json.hpp>

#include "functional.hpp"

namespace cheegerpack {

/// Sharp (thresholded) geometry of the super-level sets {u_i > level}.
/// Area is node counting times the cell volume; the perimeter comes from a
/// marching-squares segment chain (2D) or a triangulated iso-surface (3D)
/// computed on a lightly pre-smoothed copy of the field so that binary
/// indicators converge too.
struct SharpMeasurement {
  double level = 0.5;
  std::vector<double> per_phase_area;
  std::vector<double> per_phase_perimeter;
  std::vector<double> per_phase_h_alpha;

  nlohmann::json to_json() const;
};

SharpMeasurement measure_threshold(const PhaseSystem& sys, double level, double alpha);

/// One separable [1/4,1/2,1/4] pass per axis; zero extension outside the box,
/// wrap-around on periodic grids.
ScalarField smooth_pass(const ScalarField& f, const GridSpec& g);

/// Default pre-smoothing pass count for contouring at resolution m.
int measure_smoothing_passes(int m);

double contour_length_2d(const ScalarField& f, const GridSpec& g, double level);
double isosurface_area_3d(const ScalarField& f, const GridSpec& g, double level);

/// Overlap of {u_i > level} and {u_j > level} by node counting (cell volume).
double overlap_area(const PhaseSystem& sys, int i, int j, double level);

}  // namespace cheegerpack
