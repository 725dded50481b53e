#include "opsk/perceptual.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace opsk {

double scale_top() { return std::nextafter(kScaleMax, 0.0); }

const char* to_string(Dimension d) {
  switch (d) {
    case Dimension::pleasantness: return "pleasantness";
    case Dimension::intensity: return "intensity";
    case Dimension::edibility: return "edibility";
  }
  return "?";
}

double PerceptualVector::operator[](Dimension d) const {
  switch (d) {
    case Dimension::pleasantness: return pleasantness;
    case Dimension::intensity: return intensity;
    case Dimension::edibility: return edibility;
  }
  throw std::invalid_argument("bad dimension");
}

double& PerceptualVector::operator[](Dimension d) {
  switch (d) {
    case Dimension::pleasantness: return pleasantness;
    case Dimension::intensity: return intensity;
    case Dimension::edibility: return edibility;
  }
  throw std::invalid_argument("bad dimension");
}

bool is_valid(const PerceptualVector& v) {
  for (Dimension d : kDimensions) {
    const double x = v[d];
    if (!std::isfinite(x) || x < 0.0 || x >= kScaleMax) return false;
  }
  return true;
}

BitAllocation::BitAllocation(int pleasantness_bits, int intensity_bits, int edibility_bits)
    : bits_{pleasantness_bits, intensity_bits, edibility_bits} {
  for (int n : bits_) {
    if (n < 0 || n > kMaxBitsPerDimension) {
      throw std::invalid_argument("bits per dimension must lie in [0, 8], got " +
                                  std::to_string(n));
    }
  }
  if (total_bits() < 1) throw std::invalid_argument("allocation must carry at least one bit");
}

BitAllocation BitAllocation::reduced(Dimension d) const {
  std::array<int, 3> b = bits_;
  int& n = b[static_cast<int>(d)];
  if (n == 0) {
    throw std::invalid_argument(std::string("dimension ") + opsk::to_string(d) +
                                " has no bits to remove");
  }
  --n;
  return BitAllocation(b[0], b[1], b[2]);
}

std::string BitAllocation::to_string() const {
  std::ostringstream os;
  os << total_bits() << '(' << bits_[0] << ',' << bits_[1] << ',' << bits_[2] << ')';
  return os.str();
}

BitAllocation parse_allocation(const std::string& text) {
  std::string cleaned;
  for (char ch : text) {
    if (ch == '(' || ch == ')' || std::isspace(static_cast<unsigned char>(ch))) continue;
    cleaned.push_back(ch);
  }
  std::array<int, 3> n{};
  std::istringstream is(cleaned);
  for (int k = 0; k < 3; ++k) {
    std::string part;
    if (!std::getline(is, part, ',') || part.empty()) {
      throw std::invalid_argument("allocation must be n_p,n_i,n_e: '" + text + "'");
    }
    std::size_t used = 0;
    try {
      n[k] = std::stoi(part, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("allocation must be n_p,n_i,n_e: '" + text + "'");
    }
    if (used != part.size()) {
      throw std::invalid_argument("allocation must be n_p,n_i,n_e: '" + text + "'");
    }
  }
  std::string rest;
  if (std::getline(is, rest)) {
    throw std::invalid_argument("allocation must be n_p,n_i,n_e: '" + text + "'");
  }
  return BitAllocation(n[0], n[1], n[2]);
}

std::uint32_t ClassCode::operator[](Dimension d) const {
  switch (d) {
    case Dimension::pleasantness: return p;
    case Dimension::intensity: return i;
    case Dimension::edibility: return e;
  }
  throw std::invalid_argument("bad dimension");
}

std::uint32_t& ClassCode::operator[](Dimension d) {
  switch (d) {
    case Dimension::pleasantness: return p;
    case Dimension::intensity: return i;
    case Dimension::edibility: return e;
  }
  throw std::invalid_argument("bad dimension");
}

bool is_valid(const ClassCode& c, const BitAllocation& a) {
  for (Dimension d : kDimensions) {
    if (c[d] >= a.classes(d)) return false;
  }
  return true;
}

std::uint32_t linear_index(const ClassCode& c, const BitAllocation& a) {
  if (!is_valid(c, a)) throw std::invalid_argument("class code out of range: " + to_string(c));
  const int ni = a.bits(Dimension::intensity);
  const int ne = a.bits(Dimension::edibility);
  return (c.p << (ni + ne)) | (c.i << ne) | c.e;
}

ClassCode code_from_index(std::uint32_t index, const BitAllocation& a) {
  if (index >= a.class_count()) throw std::invalid_argument("class index out of range");
  const int ni = a.bits(Dimension::intensity);
  const int ne = a.bits(Dimension::edibility);
  ClassCode c;
  c.e = index & ((1u << ne) - 1u);
  c.i = (index >> ne) & ((1u << ni) - 1u);
  c.p = index >> (ni + ne);
  return c;
}

std::vector<ClassCode> all_codes(const BitAllocation& a) {
  std::vector<ClassCode> out;
  out.reserve(a.class_count());
  for (std::uint32_t k = 0; k < a.class_count(); ++k) out.push_back(code_from_index(k, a));
  return out;
}

std::string to_string(const ClassCode& c) {
  std::ostringstream os;
  os << 'O' << '(' << c.p << ',' << c.i << ',' << c.e << ')';
  return os.str();
}

double class_width(int n) {
  if (n < 0 || n > kMaxBitsPerDimension) throw std::invalid_argument("bits out of range");
  return std::ldexp(kScaleMax, -n);
}

ThresholdSet build_thresholds(int n) {
  if (n < 0 || n > kMaxBitsPerDimension) {
    throw std::invalid_argument("threshold bits must lie in [0, 8], got " + std::to_string(n));
  }
  const double w = class_width(n);
  ThresholdSet t;
  const std::uint32_t classes = 1u << n;
  t.reserve(classes - 1);
  for (std::uint32_t k = 1; k < classes; ++k) t.push_back(static_cast<double>(k) * w);
  return t;
}

std::uint32_t class_index(double value, int n) {
  if (n < 0 || n > kMaxBitsPerDimension) throw std::invalid_argument("bits per dimension must lie in [0, 8]");
  if (!(value >= 0.0 && value < kScaleMax)) throw std::invalid_argument("coordinate outside [0, 100)");
  if (n == 0) return 0;
  const double w = class_width(n);
  const std::uint32_t top = (1u << n) - 1u;
  const double guess = std::floor(std::ldexp(value, n) / kScaleMax);
  std::uint32_t k = guess <= 0.0 ? 0u : std::min(top, static_cast<std::uint32_t>(guess));
  // The floor can be off by one next to a threshold; settle it on the exact
  // threshold values.
  while (k > 0 && value < static_cast<double>(k) * w) --k;
  while (k < top && value >= static_cast<double>(k + 1) * w) ++k;
  return k;
}

ClassCode classify(const PerceptualVector& v, const BitAllocation& a) {
  if (!is_valid(v)) throw std::invalid_argument("perceptual vector outside [0, 100)");
  ClassCode c;
  for (Dimension d : kDimensions) c[d] = class_index(v[d], a.bits(d));
  return c;
}

ClassCode bits_to_class(std::span<const std::uint8_t> bits, const BitAllocation& a) {
  if (bits.size() != static_cast<std::size_t>(a.total_bits())) {
    throw std::invalid_argument("bit group has " + std::to_string(bits.size()) +
                                " bits, allocation needs " + std::to_string(a.total_bits()));
  }
  ClassCode c;
  std::size_t pos = 0;
  for (Dimension d : kDimensions) {
    std::uint32_t value = 0;
    for (int b = 0; b < a.bits(d); ++b, ++pos) {
      if (bits[pos] > 1) throw std::invalid_argument("bits must be 0 or 1");
      value = (value << 1) | bits[pos];
    }
    c[d] = value;
  }
  return c;
}

BitSequence class_to_bits(const ClassCode& c, const BitAllocation& a) {
  if (!is_valid(c, a)) throw std::invalid_argument("class code out of range: " + to_string(c));
  BitSequence out;
  out.reserve(static_cast<std::size_t>(a.total_bits()));
  for (Dimension d : kDimensions) {
    for (int b = a.bits(d) - 1; b >= 0; --b) {
      out.push_back(static_cast<std::uint8_t>((c[d] >> b) & 1u));
    }
  }
  return out;
}

double quality_dimension(std::span<const double> values, int n) {
  if (n < 1 || n > kMaxBitsPerDimension) {
    throw std::invalid_argument("quality needs 1 <= n <= 8");
  }
  const std::size_t classes = std::size_t{1} << n;
  if (values.size() != classes) {
    throw std::invalid_argument("quality needs one value per class (" + std::to_string(classes) +
                                "), got " + std::to_string(values.size()));
  }
  const double w = class_width(n);
  for (std::size_t k = 0; k < classes; ++k) {
    const double v = values[k];
    if (!std::isfinite(v) || v < 0.0 || v >= kScaleMax || class_index(v, n) != k) {
      throw std::invalid_argument("value for class " + std::to_string(k) +
                                  " lies outside its class interval");
    }
  }
  double penalty = std::abs(values.front() - 0.0) / w;
  penalty += std::abs(kScaleMax - values.back()) / w;
  for (std::size_t k = 1; k + 1 < classes; ++k) {
    const double lower = static_cast<double>(k) * w;
    const double upper = static_cast<double>(k + 1) * w;
    const double v = values[k];
    penalty += std::abs(std::abs(v - lower) - std::abs(upper - v)) / w;
  }
  const double q = 1.0 - penalty / static_cast<double>(classes);
  return std::clamp(q, 0.0, 1.0);
}

std::vector<double> optimal_locations(int n) {
  if (n < 1 || n > kMaxBitsPerDimension) throw std::invalid_argument("optimal locations need n >= 1");
  const std::size_t classes = std::size_t{1} << n;
  const double w = class_width(n);
  std::vector<double> out(classes);
  out.front() = 0.0;
  out.back() = scale_top();
  for (std::size_t k = 1; k + 1 < classes; ++k) out[k] = (static_cast<double>(k) + 0.5) * w;
  return out;
}

OdorBank::OdorBank(BitAllocation allocation, CapsuleMap capsules)
    : allocation_(allocation), capsules_(std::move(capsules)) {
  std::set<OdorId> ids;
  for (const ClassCode& c : all_codes(allocation_)) {
    auto it = capsules_.find(c);
    if (it == capsules_.end() || it->second.empty()) {
      throw std::invalid_argument("odor bank has no capsule for " + to_string(c));
    }
  }
  for (const auto& [code, odors] : capsules_) {
    if (!is_valid(code, allocation_)) {
      throw std::invalid_argument("odor bank key out of range: " + to_string(code));
    }
    for (const Odor& o : odors) {
      if (!ids.insert(o.id).second) {
        throw std::invalid_argument("duplicate odor id " + std::to_string(o.id.value));
      }
      if (!std::isfinite(o.remaining_mass) || o.remaining_mass < 0.0) {
        throw std::invalid_argument("capsule mass must be finite and >= 0");
      }
      if (classify(o.vector, allocation_) != code) {
        throw std::invalid_argument("odor " + std::to_string(o.id.value) +
                                    " does not classify to its key " + to_string(code));
      }
    }
  }
}

std::span<const Odor> OdorBank::odors_of(const ClassCode& c) const {
  auto it = capsules_.find(c);
  if (it == capsules_.end()) throw std::out_of_range("no capsule for " + to_string(c));
  return it->second;
}

const Odor& OdorBank::odor(OdorId id) const {
  for (const auto& [code, odors] : capsules_) {
    for (const Odor& o : odors) {
      if (o.id == id) return o;
    }
  }
  throw std::out_of_range("unknown odor id " + std::to_string(id.value));
}

Odor& OdorBank::mutable_odor(OdorId id) {
  for (auto& [code, odors] : capsules_) {
    for (Odor& o : odors) {
      if (o.id == id) return o;
    }
  }
  throw std::out_of_range("unknown odor id " + std::to_string(id.value));
}

std::vector<Odor> OdorBank::all_odors() const {
  std::vector<Odor> out;
  for (const auto& [code, odors] : capsules_) out.insert(out.end(), odors.begin(), odors.end());
  return out;
}

double OdorBank::remaining_mass(const ClassCode& c) const {
  double total = 0.0;
  for (const Odor& o : odors_of(c)) total += o.remaining_mass;
  return total;
}

double OdorBank::total_remaining_mass() const {
  double total = 0.0;
  for (const auto& [code, odors] : capsules_) {
    for (const Odor& o : odors) total += o.remaining_mass;
  }
  return total;
}

bool OdorBank::single_odor_per_class() const {
  return std::all_of(capsules_.begin(), capsules_.end(),
                     [](const auto& kv) { return kv.second.size() == 1; });
}

const Odor& OdorBank::select_capsule(const ClassCode& c) const {
  std::span<const Odor> odors = odors_of(c);
  const Odor* best = &odors.front();
  for (const Odor& o : odors) {
    if (o.remaining_mass > best->remaining_mass ||
        (o.remaining_mass == best->remaining_mass && o.id < best->id)) {
      best = &o;
    }
  }
  return *best;
}

OdorId OdorBank::withdraw(const ClassCode& c, double mass) {
  const OdorId id = select_capsule(c).id;
  withdraw_from(id, mass);
  return id;
}

void OdorBank::withdraw_from(OdorId id, double mass) {
  if (!(mass >= 0.0)) throw std::invalid_argument("withdrawn mass must be >= 0");
  Odor& o = mutable_odor(id);
  if (o.remaining_mass < mass) {
    throw std::runtime_error("capsule " + std::to_string(id.value) + " is depleted");
  }
  o.remaining_mass -= mass;
}

double quality_overall(const OdorBank& bank) {
  if (!bank.single_odor_per_class()) {
    throw std::invalid_argument("quality is defined only for banks with one odor per class");
  }
  const BitAllocation& a = bank.allocation();
  double q = 1.0;
  for (Dimension d : kDimensions) {
    const int n = a.bits(d);
    if (n == 0) continue;
    for (const ClassCode& base : all_codes(a)) {
      if (base[d] != 0) continue;
      std::vector<double> values;
      values.reserve(a.classes(d));
      ClassCode c = base;
      for (std::uint32_t k = 0; k < a.classes(d); ++k) {
        c[d] = k;
        values.push_back(bank.odors_of(c).front().vector[d]);
      }
      q = std::min(q, quality_dimension(values, n));
    }
  }
  return q;
}

namespace {

// Locations for one dimension with total penalty fraction `shift` in [0, 1).
std::vector<double> displaced_locations(int n, double shift) {
  std::vector<double> v = optimal_locations(n);
  if (shift == 0.0) return v;
  const std::size_t classes = v.size();
  const double w = class_width(n);
  v.front() = shift * w;
  v.back() = std::min(kScaleMax - shift * w, scale_top());
  for (std::size_t k = 1; k + 1 < classes; ++k) {
    const double delta = 0.5 * shift * w;
    v[k] += (k < classes / 2) ? -delta : delta;
  }
  return v;
}

}  // namespace

OdorBank generate_odor_bank(const BitAllocation& a, double target_quality,
                            double per_capsule_mass) {
  if (!(target_quality > 0.0 && target_quality <= 1.0)) {
    throw std::invalid_argument("target quality must lie in (0, 1]");
  }
  if (!(per_capsule_mass > 0.0) || !std::isfinite(per_capsule_mass)) {
    throw std::invalid_argument("capsule mass must be positive");
  }

  Dimension perturbed = Dimension::pleasantness;
  for (Dimension d : kDimensions) {
    if (a.bits(d) > a.bits(perturbed)) perturbed = d;
  }

  std::array<std::vector<double>, 3> locations;
  for (Dimension d : kDimensions) {
    const int n = a.bits(d);
    auto& loc = locations[static_cast<int>(d)];
    if (n == 0) {
      loc = {kScaleMax / 2.0};
    } else {
      loc = displaced_locations(n, d == perturbed ? 1.0 - target_quality : 0.0);
    }
  }

  OdorBank::CapsuleMap capsules;
  for (const ClassCode& c : all_codes(a)) {
    Odor o;
    o.id = OdorId{linear_index(c, a)};
    o.vector.pleasantness = locations[0][c.p];
    o.vector.intensity = locations[1][c.i];
    o.vector.edibility = locations[2][c.e];
    o.remaining_mass = per_capsule_mass;
    capsules[c].push_back(o);
  }
  return OdorBank(a, std::move(capsules));
}

}  // namespace opsk
