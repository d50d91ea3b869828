#pragma once

// Quasi-static ring response: chamber pressure -> bore contraction ratio and
// the pressure the ring exerts on lumen contents.

#include <optional>
#include <string_view>
#include <vector>

#include "cmasim/geometry.hpp"

namespace cmasim {

struct ResponseParams {
  /// Chamber pressure (kPa) at which the contraction ratio saturates at 1.
  PerCover<double> p_close_kPa{{20.0, 19.0, 18.0}};
  PerCover<double> gamma{{2.0, 2.0, 2.0}};
  /// Fraction of chamber pressure transferred to the lumen.
  PerCover<double> kappa{{0.5, 0.65, 0.8}};
  /// Ring size factor; the small stiff ring (A1) transfers more.
  PerLabel<double> eta{{1.2, 1.0, 1.0}};

  friend bool operator==(const ResponseParams&, const ResponseParams&) = default;
};

/// True when every ordering and bound invariant of ResponseParams holds.
bool satisfies_invariants(const ResponseParams& params);
/// Throws DomainError naming the first broken invariant.
void validate(const ResponseParams& params);

/// min(1, (p / p_close)^gamma). Throws DomainError for negative pressure.
double contraction_response(const ResponseParams& params, CoverType cover, double p_chamber_kPa);

/// kappa(cover) * eta(label) * p. Throws DomainError for negative pressure.
double generated_pressure(const ResponseParams& params, CoverType cover, ActuatorLabel label,
                          double p_chamber_kPa);

struct MeasurementRow {
  CoverType cover = CoverType::TypeI;
  ActuatorLabel label = ActuatorLabel::A1;
  double p_in_kPa = 0.0;
  std::optional<double> ratio;
  std::optional<double> gen_kPa;

  friend bool operator==(const MeasurementRow&, const MeasurementRow&) = default;
};

struct MeasurementTable {
  std::vector<MeasurementRow> rows;
};

/// Reads `cover,label,p_in_kPa,ratio,gen_kPa`; an empty field is an absent
/// observation. Throws ParseError on malformed text and InputError when a row
/// breaks the table invariants.
MeasurementTable parse_measurement_csv(std::string_view text);

/// Which coefficients a fit may move. eta(A2) and eta(A3) are tied and move together.
struct ResponseFitMask {
  PerCover<bool> p_close{};
  PerCover<bool> gamma{};
  PerCover<bool> kappa{};
  bool eta_small = false;
  bool eta_large = false;
};

/// Mask that frees every coefficient the table has observations for.
ResponseFitMask mask_from_table(const MeasurementTable& table);

struct ResponseCalibrationOptions {
  std::optional<ResponseFitMask> mask;  // default: mask_from_table
  int max_sweeps = 4000;
  int grid_half_width = 4;
  double initial_step_fraction = 0.25;
  double min_step = 1e-13;
};

struct ResponseFit {
  ResponseParams params;
  double objective_initial = 0.0;
  double objective_final = 0.0;
  /// Objective after each sweep; non-increasing.
  std::vector<double> history;
  int sweeps = 0;
};

/// Sum of squared ratio and generated-pressure residuals over the table.
double response_objective(const ResponseParams& params, const MeasurementTable& table);

/// Deterministic coordinate descent on a shrinking grid, started from the better
/// of `init` and a closed-form log-linear estimate of the free coefficients.
/// Candidates that break a ResponseParams invariant are skipped, so the result
/// always satisfies them.
/// Throws InputError for an empty table or a freed coefficient without data, and
/// CalibrationError when `init` itself is infeasible.
ResponseFit calibrate_response(const MeasurementTable& table, const ResponseParams& init,
                               const ResponseCalibrationOptions& options = {});

}  // namespace cmasim
