#pragma once

#include <array>
#include <string>
#include <vector>

#include "ovq/sphere.hpp"

namespace ovq {

struct GmmTerm {
  double amplitude;  // a
  double mean;       // b, degrees
  double scale;      // c, degrees (the Gaussian is exp(-((x-b)/c)^2))
};

// Separable viewing-direction frequency model: a 3-term Gaussian sum per axis,
// u(lon, lat) = sum_lon * sum_lat.
struct GmmParams {
  std::array<GmmTerm, 3> longitude_terms;
  std::array<GmmTerm, 3> latitude_terms;
};

// Fitted parameters shipped with the library (see default_gmm_params()).
GmmParams default_gmm_params();

// Loads an override from CSV rows (axis,k,a,b,c) with axis in
// {longitude, latitude} and k in 1..3. All six rows must be present.
GmmParams load_gmm_params(const std::string& path);
void save_gmm_params(const GmmParams& p, const std::string& path);

double gmm_density(const SphereDirection& d, const GmmParams& p);

// One axis of the separable model: sum_k a_k * exp(-((x - b_k)/c_k)^2).
double gmm_axis_sum(const std::array<GmmTerm, 3>& terms, double x);

// v(s,t): density at every pixel direction of a WxH equirectangular grid.
std::vector<double> direction_probability_map(int width, int height, const GmmParams& p);

}  // namespace ovq
