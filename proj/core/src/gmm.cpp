#include "ovq/gmm.hpp"

#include <cmath>
#include <fstream>

#include "ovq/csv.hpp"
#include "ovq/errors.hpp"

namespace ovq {

GmmParams default_gmm_params() {
  GmmParams p;
  p.longitude_terms = {{{0.0034, -0.1549, 4.6740},
                        {0.0106, 1.5140, 18.51},
                        {0.0032, 6.3670, 110.5}}};
  p.latitude_terms = {{{0.0075, -2.3738, 6.6437},
                       {0.0209, 1.8260, 14.8171},
                       {0.0057, 1.4618, 36.1311}}};
  return p;
}

double gmm_axis_sum(const std::array<GmmTerm, 3>& terms, double x) {
  double sum = 0.0;
  for (const GmmTerm& g : terms) {
    const double z = (x - g.mean) / g.scale;
    sum += g.amplitude * std::exp(-z * z);
  }
  return sum;
}

namespace {

void validate(const GmmParams& p) {
  for (const auto* terms : {&p.longitude_terms, &p.latitude_terms}) {
    for (const GmmTerm& g : *terms) {
      if (!(g.amplitude >= 0.0)) throw DataError("GMM amplitude must be >= 0");
      if (g.scale == 0.0) throw DataError("GMM scale must be nonzero");
    }
  }
}

}  // namespace

double gmm_density(const SphereDirection& d, const GmmParams& p) {
  return gmm_axis_sum(p.longitude_terms, d.longitude) * gmm_axis_sum(p.latitude_terms, d.latitude);
}

std::vector<double> direction_probability_map(int width, int height, const GmmParams& p) {
  if (width < 2 || height < 2) throw ArgumentError("grid must be at least 2x2");
  std::vector<double> lon_sum(width), lat_sum(height);
  for (int s = 1; s <= width; ++s) {
    lon_sum[s - 1] =
        gmm_axis_sum(p.longitude_terms, pixel_to_direction(s, 1, width, height).longitude);
  }
  for (int t = 1; t <= height; ++t) {
    lat_sum[t - 1] =
        gmm_axis_sum(p.latitude_terms, pixel_to_direction(1, t, width, height).latitude);
  }
  std::vector<double> map(static_cast<std::size_t>(width) * height);
  for (int t = 0; t < height; ++t) {
    for (int s = 0; s < width; ++s) {
      map[static_cast<std::size_t>(t) * width + s] = lon_sum[s] * lat_sum[t];
    }
  }
  return map;
}

GmmParams load_gmm_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open GMM config: " + path);
  GmmParams p{};
  std::array<bool, 6> seen{};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = csv::split(line);
    if (line_no == 1 && !fields.empty() && fields[0] == "axis") continue;  // header
    const std::string ctx = path + ":" + std::to_string(line_no);
    if (fields.size() != 5) throw DataError(ctx + ": expected axis,k,a,b,c");
    const long k = csv::parse_long(fields[1], ctx);
    if (k < 1 || k > 3) throw DataError(ctx + ": k must be 1..3");
    GmmTerm term{csv::parse_double(fields[2], ctx), csv::parse_double(fields[3], ctx),
                 csv::parse_double(fields[4], ctx)};
    if (fields[0] == "longitude") {
      p.longitude_terms[k - 1] = term;
      seen[k - 1] = true;
    } else if (fields[0] == "latitude") {
      p.latitude_terms[k - 1] = term;
      seen[3 + k - 1] = true;
    } else {
      throw DataError(ctx + ": axis must be longitude or latitude");
    }
  }
  for (bool s : seen) {
    if (!s) throw DataError(path + ": all six (axis, k) rows are required");
  }
  validate(p);
  return p;
}

void save_gmm_params(const GmmParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write GMM config: " + path);
  out << "axis,k,a,b,c\n";
  for (int k = 0; k < 3; ++k) {
    const GmmTerm& g = p.longitude_terms[k];
    out << "longitude," << (k + 1) << "," << csv::format_double(g.amplitude) << ","
        << csv::format_double(g.mean) << "," << csv::format_double(g.scale) << "\n";
  }
  for (int k = 0; k < 3; ++k) {
    const GmmTerm& g = p.latitude_terms[k];
    out << "latitude," << (k + 1) << "," << csv::format_double(g.amplitude) << ","
        << csv::format_double(g.mean) << "," << csv::format_double(g.scale) << "\n";
  }
}

}  // namespace ovq
