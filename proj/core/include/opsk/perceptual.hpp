#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace opsk {

/// Upper end of the perceptual scale. The scale is the half-open interval
/// [0, 100); 100 itself is never a valid coordinate.
inline constexpr double kScaleMax = 100.0;

/// Per-dimension bit cap; keeps class counts at or below 256 per dimension.
inline constexpr int kMaxBitsPerDimension = 8;

/// Largest valid perceptual coordinate, 100 minus one ulp.
double scale_top();

enum class Dimension : int { pleasantness = 0, intensity = 1, edibility = 2 };

inline constexpr std::array<Dimension, 3> kDimensions = {
    Dimension::pleasantness, Dimension::intensity, Dimension::edibility};

const char* to_string(Dimension d);

/// An odor's (pleasantness, intensity, edibility) coordinates.
struct PerceptualVector {
  double pleasantness = 0.0;
  double intensity = 0.0;
  double edibility = 0.0;

  double operator[](Dimension d) const;
  double& operator[](Dimension d);

  bool operator==(const PerceptualVector&) const = default;
};

/// True when every component is finite and lies in [0, 100).
bool is_valid(const PerceptualVector& v);

/// Split of the K bits of one symbol across the three perceptual dimensions.
class BitAllocation {
 public:
  /// Throws std::invalid_argument unless 0 <= n <= 8 per dimension and K >= 1.
  BitAllocation(int pleasantness_bits, int intensity_bits, int edibility_bits);

  int bits(Dimension d) const { return bits_[static_cast<int>(d)]; }
  int total_bits() const { return bits_[0] + bits_[1] + bits_[2]; }

  std::uint32_t classes(Dimension d) const { return 1u << bits(d); }
  std::uint32_t class_count() const { return 1u << total_bits(); }

  /// Allocation with one bit removed from `d`. Throws if that dimension has
  /// no bits or the result would have K = 0.
  BitAllocation reduced(Dimension d) const;

  /// "K(n_p,n_i,n_e)", e.g. "3(1,1,1)".
  std::string to_string() const;

  bool operator==(const BitAllocation&) const = default;

 private:
  std::array<int, 3> bits_;
};

/// Parses "n_p,n_i,n_e" (whitespace tolerated). Throws std::invalid_argument.
BitAllocation parse_allocation(const std::string& text);

/// Per-dimension class indices identifying one region of perceptual space.
struct ClassCode {
  std::uint32_t p = 0;
  std::uint32_t i = 0;
  std::uint32_t e = 0;

  std::uint32_t operator[](Dimension d) const;
  std::uint32_t& operator[](Dimension d);

  auto operator<=>(const ClassCode&) const = default;
};

bool is_valid(const ClassCode& c, const BitAllocation& a);

/// The integer whose K-bit big-endian representation is the code's bit
/// group; also a dense index in [0, 2^K).
std::uint32_t linear_index(const ClassCode& c, const BitAllocation& a);
ClassCode code_from_index(std::uint32_t index, const BitAllocation& a);

/// Every valid code under `a`, in linear_index order.
std::vector<ClassCode> all_codes(const BitAllocation& a);

std::string to_string(const ClassCode& c);

using ThresholdSet = std::vector<double>;

/// {k * 100 / 2^n : k = 1 .. 2^n - 1}. Throws std::invalid_argument for n
/// outside [0, 8].
ThresholdSet build_thresholds(int n);

/// Width of one class interval for an n-bit dimension.
double class_width(int n);

/// Class index of a single coordinate: floor(2^n * value / 100), computed so
/// that it always equals the number of thresholds <= value.
std::uint32_t class_index(double value, int n);

/// Maps a perceptual vector to its class code under `a`.
/// Throws std::invalid_argument for vectors outside [0, 100)^3.
ClassCode classify(const PerceptualVector& v, const BitAllocation& a);

using BitSequence = std::vector<std::uint8_t>;

/// First n_p bits to pleasantness, next n_i to intensity, last n_e to
/// edibility; each segment most-significant bit first.
ClassCode bits_to_class(std::span<const std::uint8_t> bits, const BitAllocation& a);

/// Inverse of bits_to_class.
BitSequence class_to_bits(const ClassCode& c, const BitAllocation& a);

/// Quality of one dimension's odor placement, in [0, 1].
///
/// `values[k]` is the coordinate of the odor representing class k. Boundary
/// classes are penalized by their distance to the scale ends, inner classes
/// by the imbalance of their distances to the two surrounding thresholds;
/// each penalty is measured in class widths and the mean penalty is
/// subtracted from one. Requires n >= 1 and each value inside its class.
double quality_dimension(std::span<const double> values, int n);

/// Optimal in-class locations for an n-bit dimension: 0 for the bottom class,
/// 100 - ulp for the top class, midpoints for inner classes.
std::vector<double> optimal_locations(int n);

struct OdorId {
  std::uint32_t value = 0;
  auto operator<=>(const OdorId&) const = default;
};

/// One capsule in the transmitter.
struct Odor {
  OdorId id;
  PerceptualVector vector;
  double remaining_mass = 0.0;  // kg
};

/// The transmitter's capsules keyed by class code.
class OdorBank {
 public:
  using CapsuleMap = std::map<ClassCode, std::vector<Odor>>;

  /// Validates that every code under `allocation` has at least one capsule,
  /// that every capsule classifies to its key and that ids are unique.
  OdorBank(BitAllocation allocation, CapsuleMap capsules);

  const BitAllocation& allocation() const { return allocation_; }
  const CapsuleMap& capsules() const { return capsules_; }

  std::span<const Odor> odors_of(const ClassCode& c) const;
  const Odor& odor(OdorId id) const;
  std::vector<Odor> all_odors() const;

  /// Pooled remaining mass across the capsules of `c`.
  double remaining_mass(const ClassCode& c) const;
  double total_remaining_mass() const;

  bool single_odor_per_class() const;

  /// Capsule the transmitter draws from for class `c`: the one with the most
  /// remaining mass, ties broken by smallest id.
  const Odor& select_capsule(const ClassCode& c) const;

  /// Removes `mass` from the selected capsule of `c` and returns its id.
  /// Throws std::runtime_error when that capsule holds less than `mass`.
  OdorId withdraw(const ClassCode& c, double mass);

  /// Removes `mass` from a specific capsule.
  void withdraw_from(OdorId id, double mass);

 private:
  Odor& mutable_odor(OdorId id);

  BitAllocation allocation_;
  CapsuleMap capsules_;
};

/// min(Q_p, Q_i, Q_e) over dimensions carrying at least one bit. When a
/// dimension's coordinates differ between capsules of the same class index,
/// the worst slice is used. Throws std::invalid_argument for banks holding
/// several odors in one class.
double quality_overall(const OdorBank& bank);

/// Builds a bank of 2^K odors whose overall quality matches `target_quality`
/// (within 1e-9). Every dimension starts at its optimal locations; the
/// dimension with the most bits is then displaced symmetrically toward its
/// thresholds. Odor ids equal the linear index of their class code.
OdorBank generate_odor_bank(const BitAllocation& a, double target_quality,
                            double per_capsule_mass);

}  // namespace opsk
