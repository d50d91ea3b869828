#pragma once

// Physical dimensions of the rectum model, the three ring actuators and the
// stool beads. Lengths are millimetres, areas mm^2, masses grams.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cmasim {

enum class ActuatorLabel { A1 = 0, A2 = 1, A3 = 2 };
enum class CoverType { TypeI = 0, TypeII = 1, TypeIII = 2 };

inline constexpr std::size_t kNumActuators = 3;
inline constexpr std::size_t kNumCovers = 3;
inline constexpr std::array<ActuatorLabel, kNumActuators> kAllLabels{
    ActuatorLabel::A1, ActuatorLabel::A2, ActuatorLabel::A3};
inline constexpr std::array<CoverType, kNumCovers> kAllCovers{
    CoverType::TypeI, CoverType::TypeII, CoverType::TypeIII};

/// Fixed-size table indexed by an enum. Value type, compares by content.
template <typename Enum, typename T, std::size_t N>
struct EnumArray {
  std::array<T, N> values{};

  constexpr T& operator[](Enum e) { return values[static_cast<std::size_t>(e)]; }
  constexpr const T& operator[](Enum e) const {
    return values[static_cast<std::size_t>(e)];
  }
  constexpr T& at(std::size_t i) { return values.at(i); }
  constexpr const T& at(std::size_t i) const { return values.at(i); }

  friend bool operator==(const EnumArray&, const EnumArray&) = default;
};

template <typename T>
using PerLabel = EnumArray<ActuatorLabel, T, kNumActuators>;
template <typename T>
using PerCover = EnumArray<CoverType, T, kNumCovers>;

std::string_view to_string(ActuatorLabel label);
std::string_view to_string(CoverType cover);
std::optional<ActuatorLabel> parse_label(std::string_view text);
/// Accepts "TypeI", "Type-I", "I" (case-sensitive roman numerals).
std::optional<CoverType> parse_cover(std::string_view text);

constexpr std::size_t index_of(ActuatorLabel label) {
  return static_cast<std::size_t>(label);
}
constexpr std::size_t index_of(CoverType cover) {
  return static_cast<std::size_t>(cover);
}

struct ActuatorSpec {
  ActuatorLabel label = ActuatorLabel::A1;
  CoverType cover = CoverType::TypeIII;
  double d_inner_mm = 27.0;
  double d_outer_mm = 53.0;
  double height_mm = 15.0;
  double axial_center_mm = 0.0;

  double span_start_mm() const { return axial_center_mm - 0.5 * height_mm; }
  double span_end_mm() const { return axial_center_mm + 0.5 * height_mm; }

  friend bool operator==(const ActuatorSpec&, const ActuatorSpec&) = default;
};

struct RectumSpec {
  double length_mm = 164.0;
  double body_radius_mm = 35.0;
  int n_cells = 40;
  /// One radius per cell. Empty means uniform at body_radius_mm.
  std::vector<double> lumen_radius_profile_mm;

  friend bool operator==(const RectumSpec&, const RectumSpec&) = default;
};

struct BeadSpec {
  double length_mm = 17.5;
  double width_mm = 8.5;
  double mass_g = 0.0;
  /// Axial coordinate of the bead's rear (proximal) end.
  double position_mm = 0.0;

  double front_mm() const { return position_mm + length_mm; }

  friend bool operator==(const BeadSpec&, const BeadSpec&) = default;
};

struct Cell {
  double start_mm = 0.0;
  double end_mm = 0.0;

  double mid_mm() const { return 0.5 * (start_mm + end_mm); }
};

// Bore diameters of the two ring sizes (A1 is the small, stiff ring).
inline constexpr double kSmallRingInnerMm = 27.0;
inline constexpr double kSmallRingOuterMm = 53.0;
inline constexpr double kLargeRingInnerMm = 44.0;
inline constexpr double kLargeRingOuterMm = 66.0;
inline constexpr double kDefaultRingHeightMm = 15.0;

/// Axial centres of A1..A3 as fractions of the rectum length.
inline constexpr std::array<double, kNumActuators> kDefaultCenterFractions{0.50, 0.75, 0.88};

inline constexpr double kBeadMinLengthMm = 15.0;
inline constexpr double kBeadMaxLengthMm = 20.0;
inline constexpr double kBeadMinWidthMm = 5.0;
inline constexpr double kBeadMaxWidthMm = 12.0;
inline constexpr double kDefaultBeadDensity = 1.0;  // g/cm^3

/// Area of a circular bore. Throws DomainError for d_inner_mm <= 0.
double bore_area(double d_inner_mm);

/// 1 - a_now / a_rest. Throws DomainError when a_rest <= 0, a_now < 0 or
/// a_now > a_rest.
double contraction_ratio(double a_rest, double a_now);

/// Ellipsoidal bead of the given length and width (mm) and density (g/cm^3),
/// positioned with its rear at position_mm. Throws DomainError for dimensions
/// outside the generated-bead ranges or non-positive density.
BeadSpec make_bead(double length_mm, double width_mm, double density_g_cm3,
                   double position_mm = 0.0);

/// n_cells contiguous equal-width cells over [0, length_mm]. The last cell
/// ends exactly at length_mm.
std::vector<Cell> cell_grid(double length_mm, int n_cells);
std::vector<Cell> cell_grid(const RectumSpec& rectum);

RectumSpec make_rectum(double length_mm = 164.0, double body_radius_mm = 35.0,
                       int n_cells = 40);

/// The three default rings placed along `rectum`: A1 and A2 with TypeII
/// covers, A3 with a TypeIII cover.
std::array<ActuatorSpec, kNumActuators> default_actuators(const RectumSpec& rectum);

void validate(const RectumSpec& rectum);
void validate(const ActuatorSpec& actuator, const RectumSpec& rectum);
void validate(const BeadSpec& bead);

}  // namespace cmasim
