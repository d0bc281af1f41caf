#include "orient8/phantom.hpp"

#include <cmath>
#include <string>

#include "orient8/errors.hpp"
#include "orient8/rng.hpp"

namespace orient8::data {

namespace {

constexpr float kMarkerValue = 1.5f;
constexpr double kPi = 3.14159265358979323846;

struct Appearance {
  float background, body, myo, blood, rv, lesion, sigma;
};

Appearance appearance_for(Modality m) {
  switch (m) {
    case Modality::C0:  return {0.10f, 0.30f, 0.55f, 0.85f, 0.70f, 0.0f, 0.02f};
    case Modality::LGE: return {0.08f, 0.22f, 0.30f, 0.80f, 0.65f, 0.95f, 0.03f};
    case Modality::T2:  return {0.10f, 0.28f, 0.50f, 0.62f, 0.55f, 0.85f, 0.08f};
  }
  return {};
}

// Per-patient anatomy, shared by all modalities of that patient.
struct Geometry {
  double ccx, ccy;        // anatomy center (normalized)
  double radius;          // myocardium outer radius (normalized)
  double aspect;          // ellipse axis ratio
  double theta;           // ellipse rotation
  double rv_angle;        // direction of the RV crescent
  double lesion_angle;    // start of scar/edema sector
  double lesion_width;
  double marker_u, marker_v;  // marker center, normalized, u < v < 0.5
};

Geometry make_geometry(uint64_t seed, int patient) {
  Rng rng(derive_seed(seed, 0x67656f6d, static_cast<uint64_t>(patient)));
  Geometry g;
  g.ccx = 0.5 + rng.uniform(-0.05f, 0.05f);
  g.ccy = 0.5 + rng.uniform(-0.05f, 0.05f);
  g.radius = rng.uniform(0.24f, 0.30f);
  g.aspect = rng.uniform(1.05f, 1.20f);
  g.theta = rng.uniform(0.17f, 0.61f);  // 10..35 degrees
  g.rv_angle = kPi + g.theta + rng.uniform(-0.3f, 0.3f);
  g.lesion_angle = rng.uniform(0.0f, static_cast<float>(2 * kPi));
  g.lesion_width = rng.uniform(0.9f, 1.4f);
  g.marker_u = rng.uniform(0.18f, 0.22f);
  g.marker_v = rng.uniform(0.31f, 0.36f);
  return g;
}

bool inside_ellipse(double x, double y, double cx, double cy, double ax,
                    double ay, double theta) {
  const double dx = x - cx;
  const double dy = y - cy;
  const double xr = dx * std::cos(theta) + dy * std::sin(theta);
  const double yr = -dx * std::sin(theta) + dy * std::cos(theta);
  return (xr * xr) / (ax * ax) + (yr * yr) / (ay * ay) <= 1.0;
}

bool inside_sector(double x, double y, double cx, double cy, double start,
                   double width) {
  double a = std::atan2(y - cy, x - cx) - start;
  a -= 2 * kPi * std::floor(a / (2 * kPi));
  return a <= width;
}

Slice render_slice(const PhantomSpec& spec, const Geometry& g, int patient,
                   int slice_idx) {
  const int n = spec.image_size;
  const Appearance ap = appearance_for(spec.modality);
  const int last = std::max(1, spec.slices_per_patient - 1);
  const double fscale =
      spec.slices_per_patient == 1 ? 1.0 : 1.0 - 0.3 * slice_idx / static_cast<double>(last);

  const double cx = g.ccx * n;
  const double cy = g.ccy * n;
  const double r_out = g.radius * n * fscale;
  const double ax_out = r_out * g.aspect;
  const double ay_out = r_out / g.aspect;
  const double r_in = 0.62;
  const double rv_cx = cx + 1.25 * r_out * std::cos(g.rv_angle);
  const double rv_cy = cy + 1.25 * r_out * std::sin(g.rv_angle);

  Slice s = Slice::zeros(1, n, n);
  s.patient_id = "p" + std::string(patient < 10 ? "00" : patient < 100 ? "0" : "") +
                 std::to_string(patient);
  s.modality = spec.modality;
  s.true_orientation = 0;

  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double px = x + 0.5;
      const double py = y + 0.5;
      float v = ap.background;
      if (inside_ellipse(px, py, n * 0.5, n * 0.5, n * 0.46, n * 0.42, 0.2)) {
        v = ap.body;
      }
      const bool in_outer =
          inside_ellipse(px, py, cx, cy, ax_out, ay_out, g.theta);
      if (!in_outer &&
          inside_ellipse(px, py, rv_cx, rv_cy, 0.85 * r_out, 0.55 * r_out,
                         g.rv_angle)) {
        v = ap.rv;
      }
      if (in_outer) {
        const bool in_inner = inside_ellipse(px, py, cx, cy, r_in * ax_out,
                                             r_in * ay_out, g.theta);
        if (in_inner) {
          v = ap.blood;
        } else {
          v = ap.myo;
          if (ap.lesion > 0.0f &&
              inside_sector(px, py, cx, cy, g.lesion_angle, g.lesion_width)) {
            v = ap.lesion;
          }
        }
      }
      s.at(0, y, x) = v;
    }
  }

  if (spec.noise_level > 0.0f) {
    Rng noise(derive_seed(spec.seed, 0x6e6f6973,
                          static_cast<uint64_t>(patient) * 1000 + slice_idx,
                          static_cast<uint64_t>(spec.modality)));
    const float sigma = ap.sigma * spec.noise_level;
    for (auto& v : s.pixels) v += sigma * noise.normal();
  }

  // Marker block, written last so its value is exact.
  int side = std::max(3, n / 16);
  if (side % 2 == 0) ++side;
  const int mx = static_cast<int>(std::lround(g.marker_u * (n - 1)));
  const int my = static_cast<int>(std::lround(g.marker_v * (n - 1)));
  for (int dy = -side / 2; dy <= side / 2; ++dy) {
    for (int dx = -side / 2; dx <= side / 2; ++dx) {
      const int yy = my + dy;
      const int xx = mx + dx;
      if (yy >= 0 && yy < n && xx >= 0 && xx < n) s.at(0, yy, xx) = kMarkerValue;
    }
  }
  return s;
}

}  // namespace

void PhantomSpec::validate() const {
  if (n_patients < 1) throw ArgumentError("n_patients must be >= 1");
  if (slices_per_patient < 1) throw ArgumentError("slices_per_patient must be >= 1");
  if (image_size < 16) throw ArgumentError("image_size must be >= 16");
  if (noise_level < 0.0f) throw ArgumentError("noise_level must be >= 0");
}

std::vector<Volume> generate_phantoms(const PhantomSpec& spec) {
  spec.validate();
  std::vector<Volume> volumes;
  volumes.reserve(spec.n_patients);
  for (int p = 0; p < spec.n_patients; ++p) {
    const Geometry g = make_geometry(spec.seed, p);
    Volume vol;
    vol.modality = spec.modality;
    for (int k = 0; k < spec.slices_per_patient; ++k) {
      vol.slices.push_back(render_slice(spec, g, p, k));
    }
    vol.patient_id = vol.slices.front().patient_id;
    volumes.push_back(std::move(vol));
  }
  return volumes;
}

std::vector<Volume> generate_phantoms_all_modalities(PhantomSpec spec) {
  std::vector<Volume> all;
  for (Modality m : {Modality::C0, Modality::LGE, Modality::T2}) {
    spec.modality = m;
    auto vols = generate_phantoms(spec);
    all.insert(all.end(), std::make_move_iterator(vols.begin()),
               std::make_move_iterator(vols.end()));
  }
  return all;
}

d4::Label detect_orientation_marker(const Slice& slice) {
  const int h = slice.height;
  const int w = slice.width;
  if (h < 3 || w < 3) throw ArgumentError("slice too small for marker detection");

  // 3x3 box-filtered argmax on channel 0; the marker block always contains
  // the winning window.
  double best = -1e30;
  int bx = 1, by = 1;
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      double sum = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) sum += slice.at(0, y + dy, x + dx);
      if (sum > best) {
        best = sum;
        bx = x;
        by = y;
      }
    }
  }

  const double u = static_cast<double>(bx) / (w - 1);
  const double v = static_cast<double>(by) / (h - 1);
  const bool left = u < 0.5;
  const bool top = v < 0.5;
  const bool x_closer = std::min(u, 1.0 - u) < std::min(v, 1.0 - v);
  // The canonical marker satisfies u < v < 0.5; each orientation then puts
  // it into a distinct (left, top, x_closer) cell.
  static constexpr d4::Label kLut[8] = {7, 3, 5, 1, 6, 2, 4, 0};
  const int key = (left ? 4 : 0) | (top ? 2 : 0) | (x_closer ? 1 : 0);
  return kLut[key];
}

}  // namespace orient8::data
