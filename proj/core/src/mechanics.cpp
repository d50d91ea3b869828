#include "cmasim/mechanics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cmasim/csv.hpp"
#include "cmasim/errors.hpp"

namespace cmasim {

namespace {

constexpr double kMaxCloseKPa = 20.0;

std::string broken_invariant(const ResponseParams& p) {
  for (auto c : kAllCovers) {
    if (!(p.p_close_kPa[c] > 0.0)) return "p_close must be positive";
    if (!(p.gamma[c] > 0.0)) return "gamma must be positive";
    if (!(p.kappa[c] > 0.0 && p.kappa[c] <= 1.0)) return "kappa must lie in (0, 1]";
  }
  for (auto l : kAllLabels) {
    if (!(p.eta[l] > 0.0)) return "eta must be positive";
  }
  using enum CoverType;
  if (!(p.kappa[TypeIII] > p.kappa[TypeII] && p.kappa[TypeII] > p.kappa[TypeI])) {
    return "kappa must increase strictly TypeI < TypeII < TypeIII";
  }
  if (!(p.p_close_kPa[TypeIII] <= p.p_close_kPa[TypeII] &&
        p.p_close_kPa[TypeII] <= p.p_close_kPa[TypeI] && p.p_close_kPa[TypeI] <= kMaxCloseKPa)) {
    return "p_close must satisfy TypeIII <= TypeII <= TypeI <= 20 kPa";
  }
  using enum ActuatorLabel;
  if (!(p.eta[A1] > p.eta[A2] && p.eta[A2] == p.eta[A3])) {
    return "eta must satisfy A1 > A2 == A3";
  }
  return {};
}

void require_pressure(double p) {
  if (!(p >= 0.0)) throw DomainError("chamber pressure must be >= 0");
}

// Calibration works on a flat coordinate vector:
//   [0..2] p_close, [3..5] gamma, [6..8] kappa, [9] eta(A1), [10] eta(A2)=eta(A3)
constexpr std::size_t kNumCoords = 11;
using Coords = std::array<double, kNumCoords>;

Coords to_coords(const ResponseParams& p) {
  Coords x{};
  for (std::size_t i = 0; i < kNumCovers; ++i) {
    x[i] = p.p_close_kPa.at(i);
    x[3 + i] = p.gamma.at(i);
    x[6 + i] = p.kappa.at(i);
  }
  x[9] = p.eta[ActuatorLabel::A1];
  x[10] = p.eta[ActuatorLabel::A2];
  return x;
}

ResponseParams from_coords(const Coords& x) {
  ResponseParams p;
  for (std::size_t i = 0; i < kNumCovers; ++i) {
    p.p_close_kPa.at(i) = x[i];
    p.gamma.at(i) = x[3 + i];
    p.kappa.at(i) = x[6 + i];
  }
  p.eta[ActuatorLabel::A1] = x[9];
  p.eta[ActuatorLabel::A2] = x[10];
  p.eta[ActuatorLabel::A3] = x[10];
  return p;
}

std::array<bool, kNumCoords> to_flags(const ResponseFitMask& m) {
  std::array<bool, kNumCoords> f{};
  for (std::size_t i = 0; i < kNumCovers; ++i) {
    f[i] = m.p_close.at(i);
    f[3 + i] = m.gamma.at(i);
    f[6 + i] = m.kappa.at(i);
  }
  f[9] = m.eta_small;
  f[10] = m.eta_large;
  return f;
}

// Closed-form starting point for noise-free or nearly clean data. Below
// saturation ln(ratio) is linear in ln(p), and the generated pressure is linear
// in p with slope kappa*eta. Only free coordinates are taken from it.
Coords warm_start(const MeasurementTable& table, const Coords& x0, const std::array<bool, kNumCoords>& free) {
  Coords x = x0;
  for (std::size_t c = 0; c < kNumCovers; ++c) {
    double n = 0, su = 0, sy = 0, suu = 0, suy = 0;
    for (const auto& row : table.rows) {
      if (index_of(row.cover) != c || !row.ratio || row.p_in_kPa <= 0.0) continue;
      if (*row.ratio <= 0.0 || *row.ratio >= 1.0) continue;
      const double u = std::log(row.p_in_kPa);
      const double y = std::log(*row.ratio);
      n += 1;
      su += u;
      sy += y;
      suu += u * u;
      suy += u * y;
    }
    const double det = n * suu - su * su;
    if (n < 2 || det <= 1e-12 * n * suu) continue;
    const double slope = (n * suy - su * sy) / det;
    const double icept = (sy - slope * su) / n;
    if (!(slope > 0.0)) continue;
    if (free[c]) x[c] = std::exp(-icept / slope);
    if (free[3 + c]) x[3 + c] = slope;
  }

  // Least-squares slope of gen against p for each cover and ring size.
  std::array<std::array<double, 2>, kNumCovers> spp{}, sgp{};
  for (const auto& row : table.rows) {
    if (!row.gen_kPa) continue;
    const std::size_t s = row.label == ActuatorLabel::A1 ? 0 : 1;
    spp[index_of(row.cover)][s] += row.p_in_kPa * row.p_in_kPa;
    sgp[index_of(row.cover)][s] += *row.gen_kPa * row.p_in_kPa;
  }
  double ratio_sum = 0;
  int ratio_n = 0;
  for (std::size_t c = 0; c < kNumCovers; ++c) {
    if (spp[c][0] > 0 && spp[c][1] > 0 && sgp[c][1] > 0) {
      ratio_sum += (sgp[c][0] / spp[c][0]) / (sgp[c][1] / spp[c][1]);
      ++ratio_n;
    }
  }
  double eta_small = x0[9];
  const double eta_large = x0[10];
  if (ratio_n > 0) eta_small = eta_large * ratio_sum / ratio_n;
  std::array<double, kNumCovers> kappa{x0[6], x0[7], x0[8]};
  for (std::size_t c = 0; c < kNumCovers; ++c) {
    if (spp[c][1] > 0) {
      kappa[c] = sgp[c][1] / spp[c][1] / eta_large;
    } else if (spp[c][0] > 0) {
      kappa[c] = sgp[c][0] / spp[c][0] / eta_small;
    }
  }
  // kappa*eta is all the data pins down; push the scale onto eta if a kappa
  // would exceed 1.
  const double top = *std::max_element(kappa.begin(), kappa.end());
  const double scale = top > 1.0 ? top : 1.0;
  for (std::size_t c = 0; c < kNumCovers; ++c) {
    if (free[6 + c]) x[6 + c] = kappa[c] / scale;
  }
  if (free[9]) x[9] = eta_small * scale;
  if (free[10]) x[10] = eta_large * scale;
  return x;
}

}  // namespace

bool satisfies_invariants(const ResponseParams& params) {
  return broken_invariant(params).empty();
}

void validate(const ResponseParams& params) {
  if (auto why = broken_invariant(params); !why.empty()) throw DomainError("response params: " + why);
}

double contraction_response(const ResponseParams& params, CoverType cover, double p_chamber_kPa) {
  require_pressure(p_chamber_kPa);
  const double p_close = params.p_close_kPa[cover];
  if (p_chamber_kPa >= p_close) return 1.0;
  return std::min(1.0, std::pow(p_chamber_kPa / p_close, params.gamma[cover]));
}

double generated_pressure(const ResponseParams& params, CoverType cover, ActuatorLabel label,
                          double p_chamber_kPa) {
  require_pressure(p_chamber_kPa);
  return params.kappa[cover] * params.eta[label] * p_chamber_kPa;
}

MeasurementTable parse_measurement_csv(std::string_view text) {
  const auto doc = csv::parse(text);
  const auto c_cover = csv::column(doc, "cover");
  const auto c_label = csv::column(doc, "label");
  const auto c_p = csv::column(doc, "p_in_kPa");
  const auto c_ratio = csv::column(doc, "ratio");
  const auto c_gen = csv::column(doc, "gen_kPa");

  MeasurementTable table;
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const auto& f = doc.rows[i];
    const auto line = doc.row_lines[i];
    MeasurementRow row;
    const auto cover = parse_cover(f[c_cover]);
    if (!cover) throw ParseError("unknown cover '" + f[c_cover] + "'", line, c_cover + 1);
    const auto label = parse_label(f[c_label]);
    if (!label) throw ParseError("unknown label '" + f[c_label] + "'", line, c_label + 1);
    row.cover = *cover;
    row.label = *label;
    row.p_in_kPa = csv::to_double(f[c_p], line, c_p + 1);
    row.ratio = csv::to_optional_double(f[c_ratio], line, c_ratio + 1);
    row.gen_kPa = csv::to_optional_double(f[c_gen], line, c_gen + 1);
    if (row.p_in_kPa < 0.0) {
      throw InputError("measurement line " + std::to_string(line) + ": negative pressure");
    }
    if (row.ratio && (*row.ratio < 0.0 || *row.ratio > 1.0)) {
      throw InputError("measurement line " + std::to_string(line) + ": ratio outside [0, 1]");
    }
    table.rows.push_back(row);
  }
  return table;
}

ResponseFitMask mask_from_table(const MeasurementTable& table) {
  ResponseFitMask m;
  for (const auto& row : table.rows) {
    if (row.ratio) {
      m.p_close[row.cover] = true;
      m.gamma[row.cover] = true;
    }
    if (row.gen_kPa) {
      m.kappa[row.cover] = true;
      if (row.label == ActuatorLabel::A1) {
        m.eta_small = true;
      } else {
        m.eta_large = true;
      }
    }
  }
  return m;
}

double response_objective(const ResponseParams& params, const MeasurementTable& table) {
  double sum = 0.0;
  for (const auto& row : table.rows) {
    if (row.ratio) {
      const double r = contraction_response(params, row.cover, row.p_in_kPa) - *row.ratio;
      sum += r * r;
    }
    if (row.gen_kPa) {
      const double r = generated_pressure(params, row.cover, row.label, row.p_in_kPa) - *row.gen_kPa;
      sum += r * r;
    }
  }
  return sum;
}

ResponseFit calibrate_response(const MeasurementTable& table, const ResponseParams& init,
                               const ResponseCalibrationOptions& options) {
  if (table.rows.empty()) throw InputError("calibrate_response: measurement table is empty");
  if (!satisfies_invariants(init)) {
    throw CalibrationError("calibrate_response: initial parameters violate the constraints: " +
                           broken_invariant(init));
  }

  const ResponseFitMask mask = options.mask.value_or(mask_from_table(table));
  const ResponseFitMask available = mask_from_table(table);
  const auto free = to_flags(mask);
  const auto observed = to_flags(available);
  for (std::size_t i = 0; i < kNumCoords; ++i) {
    if (free[i] && !observed[i]) {
      throw InputError("calibrate_response: a freed coefficient has no observations");
    }
  }

  Coords x = to_coords(init);
  Coords step{};
  for (std::size_t i = 0; i < kNumCoords; ++i) {
    step[i] = options.initial_step_fraction * std::max(std::abs(x[i]), 1e-3);
  }

  auto objective = [&](const Coords& c) { return response_objective(from_coords(c), table); };

  ResponseFit fit;
  fit.objective_initial = objective(x);
  double best = fit.objective_initial;

  if (const Coords seed = warm_start(table, x, free); satisfies_invariants(from_coords(seed))) {
    if (const double f = objective(seed); f < best) {
      best = f;
      x = seed;
    }
  }

  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    bool improved = false;
    for (std::size_t i = 0; i < kNumCoords; ++i) {
      if (!free[i]) continue;
      double best_value = x[i];
      for (int k = -options.grid_half_width; k <= options.grid_half_width; ++k) {
        if (k == 0) continue;
        Coords trial = x;
        trial[i] = x[i] + k * step[i];
        const auto params = from_coords(trial);
        if (!satisfies_invariants(params)) continue;
        const double f = response_objective(params, table);
        if (f < best) {
          best = f;
          best_value = trial[i];
        }
      }
      if (best_value != x[i]) {
        x[i] = best_value;
        improved = true;
      }
    }
    fit.history.push_back(best);
    fit.sweeps = sweep + 1;
    if (!improved) {
      bool any_left = false;
      for (std::size_t i = 0; i < kNumCoords; ++i) {
        if (!free[i]) continue;
        step[i] *= 0.5;
        if (step[i] > options.min_step * std::max(1.0, std::abs(x[i]))) any_left = true;
      }
      if (!any_left) break;
    }
    if (best == 0.0) break;
  }

  fit.params = from_coords(x);
  fit.objective_final = best;
  return fit;
}

}  // namespace cmasim
