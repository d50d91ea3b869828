#include "cmasim/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cmasim/errors.hpp"

namespace cmasim {

std::string_view to_string(ActuatorLabel label) {
  switch (label) {
    case ActuatorLabel::A1: return "A1";
    case ActuatorLabel::A2: return "A2";
    case ActuatorLabel::A3: return "A3";
  }
  return "?";
}

std::string_view to_string(CoverType cover) {
  switch (cover) {
    case CoverType::TypeI: return "TypeI";
    case CoverType::TypeII: return "TypeII";
    case CoverType::TypeIII: return "TypeIII";
  }
  return "?";
}

std::optional<ActuatorLabel> parse_label(std::string_view text) {
  for (auto label : kAllLabels) {
    if (text == to_string(label)) return label;
  }
  return std::nullopt;
}

std::optional<CoverType> parse_cover(std::string_view text) {
  if (text == "TypeI" || text == "Type-I" || text == "I") return CoverType::TypeI;
  if (text == "TypeII" || text == "Type-II" || text == "II") return CoverType::TypeII;
  if (text == "TypeIII" || text == "Type-III" || text == "III") return CoverType::TypeIII;
  return std::nullopt;
}

double bore_area(double d_inner_mm) {
  if (!(d_inner_mm > 0.0)) {
    throw DomainError("bore_area: diameter must be positive");
  }
  const double r = 0.5 * d_inner_mm;
  return std::numbers::pi * r * r;
}

double contraction_ratio(double a_rest, double a_now) {
  if (!(a_rest > 0.0)) throw DomainError("contraction_ratio: resting area must be positive");
  if (a_now < 0.0) throw DomainError("contraction_ratio: current area is negative");
  if (a_now > a_rest) {
    throw DomainError("contraction_ratio: current area exceeds resting area (expansion)");
  }
  return 1.0 - a_now / a_rest;
}

void validate(const BeadSpec& bead) {
  if (!(bead.length_mm >= kBeadMinLengthMm && bead.length_mm <= kBeadMaxLengthMm)) {
    throw DomainError("bead length outside [15, 20] mm");
  }
  if (!(bead.width_mm >= kBeadMinWidthMm && bead.width_mm <= kBeadMaxWidthMm)) {
    throw DomainError("bead width outside [5, 12] mm");
  }
  if (!(bead.mass_g > 0.0)) throw DomainError("bead mass must be positive");
}

BeadSpec make_bead(double length_mm, double width_mm, double density_g_cm3,
                   double position_mm) {
  if (!(density_g_cm3 > 0.0)) throw DomainError("make_bead: density must be positive");
  BeadSpec bead;
  bead.length_mm = length_mm;
  bead.width_mm = width_mm;
  bead.position_mm = position_mm;
  const double semi_axial = 0.5 * length_mm;
  const double semi_radial = 0.5 * width_mm;
  const double volume_mm3 =
      4.0 / 3.0 * std::numbers::pi * semi_axial * semi_radial * semi_radial;
  bead.mass_g = density_g_cm3 * volume_mm3 * 1e-3;
  validate(bead);
  return bead;
}

std::vector<Cell> cell_grid(double length_mm, int n_cells) {
  if (!(length_mm > 0.0)) throw DomainError("cell_grid: length must be positive");
  if (n_cells < 1) throw DomainError("cell_grid: need at least one cell");
  std::vector<Cell> cells(static_cast<std::size_t>(n_cells));
  const double n = static_cast<double>(n_cells);
  for (int i = 0; i < n_cells; ++i) {
    // i * L / n keeps shared edges bit-identical between neighbours.
    cells[i].start_mm = static_cast<double>(i) * length_mm / n;
    cells[i].end_mm = static_cast<double>(i + 1) * length_mm / n;
  }
  cells.back().end_mm = length_mm;
  return cells;
}

std::vector<Cell> cell_grid(const RectumSpec& rectum) {
  validate(rectum);
  return cell_grid(rectum.length_mm, rectum.n_cells);
}

RectumSpec make_rectum(double length_mm, double body_radius_mm, int n_cells) {
  RectumSpec rectum;
  rectum.length_mm = length_mm;
  rectum.body_radius_mm = body_radius_mm;
  rectum.n_cells = n_cells;
  if (n_cells > 0) {
    rectum.lumen_radius_profile_mm.assign(static_cast<std::size_t>(n_cells), body_radius_mm);
  }
  validate(rectum);
  return rectum;
}

void validate(const RectumSpec& rectum) {
  if (!(rectum.length_mm > 0.0)) throw DomainError("rectum length must be positive");
  if (!(rectum.body_radius_mm > 0.0)) throw DomainError("rectum body radius must be positive");
  if (rectum.n_cells < 3) throw DomainError("rectum needs at least 3 cells");
  const auto& profile = rectum.lumen_radius_profile_mm;
  if (!profile.empty()) {
    if (profile.size() != static_cast<std::size_t>(rectum.n_cells)) {
      throw DomainError("lumen radius profile length differs from n_cells");
    }
    for (double r : profile) {
      if (!(r > 0.0)) throw DomainError("lumen radius profile entries must be positive");
    }
  }
}

void validate(const ActuatorSpec& actuator, const RectumSpec& rectum) {
  std::ostringstream where;
  where << "actuator " << to_string(actuator.label) << ": ";
  if (!(actuator.d_inner_mm > 0.0 && actuator.d_inner_mm < actuator.d_outer_mm)) {
    throw DomainError(where.str() + "need 0 < d_inner < d_outer");
  }
  if (!(actuator.height_mm > 0.0)) throw DomainError(where.str() + "height must be positive");
  if (actuator.span_start_mm() < 0.0 || actuator.span_end_mm() > rectum.length_mm) {
    throw DomainError(where.str() + "axial span leaves the rectum");
  }
}

std::array<ActuatorSpec, kNumActuators> default_actuators(const RectumSpec& rectum) {
  std::array<ActuatorSpec, kNumActuators> rings;
  for (auto label : kAllLabels) {
    auto& ring = rings[index_of(label)];
    ring.label = label;
    ring.cover = label == ActuatorLabel::A3 ? CoverType::TypeIII : CoverType::TypeII;
    const bool small = label == ActuatorLabel::A1;
    ring.d_inner_mm = small ? kSmallRingInnerMm : kLargeRingInnerMm;
    ring.d_outer_mm = small ? kSmallRingOuterMm : kLargeRingOuterMm;
    ring.height_mm = kDefaultRingHeightMm;
    ring.axial_center_mm = kDefaultCenterFractions[index_of(label)] * rectum.length_mm;
  }
  return rings;
}

}  // namespace cmasim
