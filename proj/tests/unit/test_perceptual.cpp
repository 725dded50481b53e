#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "opsk/perceptual.hpp"

using namespace opsk;

namespace {

BitSequence bits_of(const std::string& s) {
  BitSequence out;
  for (char c : s) out.push_back(c == '1' ? 1 : 0);
  return out;
}

std::vector<BitAllocation> small_allocations() {
  std::vector<BitAllocation> out;
  for (int p = 0; p <= 3; ++p)
    for (int i = 0; i <= 3; ++i)
      for (int e = 0; e <= 2; ++e)
        if (p + i + e >= 1) out.emplace_back(p, i, e);
  return out;
}

}  // namespace

TEST(Thresholds, MatchEvenSplitOfScale) {
  EXPECT_EQ(build_thresholds(0), ThresholdSet{});
  EXPECT_EQ(build_thresholds(1), (ThresholdSet{50.0}));
  EXPECT_EQ(build_thresholds(2), (ThresholdSet{25.0, 50.0, 75.0}));
  const ThresholdSet t3 = build_thresholds(3);
  ASSERT_EQ(t3.size(), 7u);
  EXPECT_DOUBLE_EQ(t3.front(), 12.5);
  EXPECT_TRUE(std::is_sorted(t3.begin(), t3.end()));
}

TEST(Thresholds, RejectOutOfRangeBits) {
  EXPECT_THROW(build_thresholds(-1), std::invalid_argument);
  EXPECT_THROW(build_thresholds(9), std::invalid_argument);
  EXPECT_NO_THROW(build_thresholds(8));
}

TEST(Allocation, ValidatesAndFormats) {
  EXPECT_THROW(BitAllocation(0, 0, 0), std::invalid_argument);
  EXPECT_THROW(BitAllocation(9, 0, 0), std::invalid_argument);
  EXPECT_THROW(BitAllocation(-1, 1, 1), std::invalid_argument);
  const BitAllocation a(3, 1, 1);
  EXPECT_EQ(a.total_bits(), 5);
  EXPECT_EQ(a.class_count(), 32u);
  EXPECT_EQ(a.to_string(), "5(3,1,1)");
  EXPECT_EQ(parse_allocation("3,1,1"), a);
  EXPECT_EQ(parse_allocation("(3, 1, 1)"), a);
  EXPECT_THROW(parse_allocation("3,1"), std::invalid_argument);
  EXPECT_THROW(parse_allocation("a,b,c"), std::invalid_argument);
  EXPECT_THROW(BitAllocation(1, 0, 0).reduced(Dimension::pleasantness), std::invalid_argument);
  EXPECT_EQ(a.reduced(Dimension::intensity), BitAllocation(3, 0, 1));
}

TEST(Classify, FigureTwoExamples) {
  const BitAllocation a(1, 1, 1);
  EXPECT_EQ(classify({10, 15, 5}, a), (ClassCode{0, 0, 0}));
  EXPECT_EQ(classify({70, 25, 95}, a), (ClassCode{1, 0, 1}));
  EXPECT_EQ(classify({0, 0, 0}, BitAllocation(3, 2, 1)), (ClassCode{0, 0, 0}));
}

TEST(Classify, ThresholdIsInclusiveFromAbove) {
  EXPECT_EQ(class_index(49.999, 1), 0u);
  EXPECT_EQ(class_index(50.0, 1), 1u);
  EXPECT_EQ(class_index(scale_top(), 8), 255u);
  EXPECT_EQ(class_index(12.5, 3), 1u);
  EXPECT_EQ(class_index(std::nextafter(12.5, 0.0), 3), 0u);
  EXPECT_EQ(class_index(73.0, 0), 0u);
}

TEST(Classify, RejectsValuesOutsideScale) {
  EXPECT_THROW(class_index(100.0, 1), std::invalid_argument);
  EXPECT_THROW(class_index(-0.1, 1), std::invalid_argument);
  EXPECT_THROW(class_index(std::nan(""), 1), std::invalid_argument);
}

// Property: the floor formula agrees with counting thresholds <= value.
TEST(Classify, EqualsThresholdCount) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int n = 0; n <= kMaxBitsPerDimension; ++n) {
    const ThresholdSet t = build_thresholds(n);
    for (int k = 0; k < 2000; ++k) {
      double v = u(rng);
      if (k < static_cast<int>(t.size())) v = t[k];  // hit every threshold exactly
      const auto count = static_cast<std::uint32_t>(
          std::count_if(t.begin(), t.end(), [&](double th) { return th <= v; }));
      ASSERT_EQ(class_index(v, n), count) << "n=" << n << " v=" << v;
    }
  }
}

TEST(Bits, SegmentsAreMostSignificantFirst) {
  EXPECT_EQ(bits_to_class(bits_of("101"), BitAllocation(1, 1, 1)), (ClassCode{1, 0, 1}));
  EXPECT_EQ(bits_to_class(bits_of("11010"), BitAllocation(2, 2, 1)), (ClassCode{3, 1, 0}));
  EXPECT_EQ(bits_to_class(bits_of("00000"), BitAllocation(3, 1, 1)), (ClassCode{0, 0, 0}));
  EXPECT_EQ(class_to_bits({3, 1, 0}, BitAllocation(2, 2, 1)), bits_of("11010"));
  EXPECT_EQ(class_to_bits({1, 0, 1}, BitAllocation(1, 1, 1)), bits_of("101"));
}

TEST(Bits, RejectMismatches) {
  EXPECT_THROW(bits_to_class(bits_of("10"), BitAllocation(1, 1, 1)), std::invalid_argument);
  EXPECT_THROW(bits_to_class(BitSequence{2, 0, 0}, BitAllocation(1, 1, 1)), std::invalid_argument);
  EXPECT_THROW(class_to_bits({2, 0, 0}, BitAllocation(1, 1, 1)), std::invalid_argument);
}

// Exhaustive round trip for every allocation up to 8 bits.
TEST(Bits, RoundTripIsBijective) {
  for (int p = 0; p <= 8; ++p) {
    for (int i = 0; i <= 8 - p; ++i) {
      for (int e = 0; e <= 8 - p - i; ++e) {
        if (p + i + e == 0) continue;
        const BitAllocation a(p, i, e);
        for (std::uint32_t idx = 0; idx < a.class_count(); ++idx) {
          const ClassCode c = code_from_index(idx, a);
          const BitSequence b = class_to_bits(c, a);
          ASSERT_EQ(bits_to_class(b, a), c);
          ASSERT_EQ(linear_index(c, a), idx);
          std::uint32_t value = 0;
          for (auto bit : b) value = value * 2 + bit;
          ASSERT_EQ(value, idx) << "linear index must equal the K-bit word";
        }
      }
    }
  }
}

TEST(Bits, RoundTripForWideAllocations) {
  std::mt19937_64 rng(5);
  const BitAllocation a(8, 8, 8);
  for (int k = 0; k < 5000; ++k) {
    BitSequence b(24);
    for (auto& bit : b) bit = static_cast<std::uint8_t>(rng() & 1u);
    ASSERT_EQ(class_to_bits(bits_to_class(b, a), a), b);
  }
}

TEST(Quality, WorkedValues) {
  const std::vector<double> optimal{0.0, scale_top()};
  EXPECT_NEAR(quality_dimension(optimal, 1), 1.0, 1e-12);
  const std::vector<double> quarter{25.0, 75.0};
  EXPECT_DOUBLE_EQ(quality_dimension(quarter, 1), 0.5);
  const std::vector<double> inner_centered{0.0, 37.5, 62.5, scale_top()};
  EXPECT_NEAR(quality_dimension(inner_centered, 2), 1.0, 1e-12);
  // Inner odor 5 below its centre costs |7.5 - 17.5| / 25 = 0.4, averaged over 4.
  const std::vector<double> shifted{0.0, 32.5, 62.5, scale_top()};
  EXPECT_NEAR(quality_dimension(shifted, 2), 1.0 - 0.4 / 4.0, 1e-12);
}

TEST(Quality, RejectsMalformedInput) {
  const std::vector<double> short_list{0.0};
  EXPECT_THROW(quality_dimension(short_list, 1), std::invalid_argument);
  const std::vector<double> wrong_class{60.0, 75.0};
  EXPECT_THROW(quality_dimension(wrong_class, 1), std::invalid_argument);
  const std::vector<double> ok{0.0, 60.0};
  EXPECT_THROW(quality_dimension(ok, 0), std::invalid_argument);
}

TEST(Quality, OptimalLocationsScoreOne) {
  for (int n = 1; n <= kMaxBitsPerDimension; ++n) {
    const std::vector<double> loc = optimal_locations(n);
    ASSERT_EQ(loc.size(), std::size_t{1} << n);
    EXPECT_NEAR(quality_dimension(loc, n), 1.0, 1e-12) << n;
  }
}

// Property: reflecting the odor set about the middle of the scale keeps Q.
TEST(Quality, ReflectionInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 1; n <= 4; ++n) {
    const double w = class_width(n);
    const std::size_t classes = std::size_t{1} << n;
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<double> v(classes);
      for (std::size_t k = 0; k < classes; ++k) v[k] = (static_cast<double>(k) + 0.01 + 0.98 * u(rng)) * w;
      std::vector<double> r(classes);
      for (std::size_t k = 0; k < classes; ++k) r[k] = 100.0 - v[classes - 1 - k];
      EXPECT_NEAR(quality_dimension(v, n), quality_dimension(r, n), 1e-12);
      const double q = quality_dimension(v, n);
      EXPECT_GE(q, 0.0);
      EXPECT_LE(q, 1.0);
    }
  }
}

TEST(OdorBankGeneration, HitsTargetQuality) {
  for (const BitAllocation& a : small_allocations()) {
    for (double q : {0.1, 0.25, 0.5, 0.73, 0.9, 1.0}) {
      const OdorBank bank = generate_odor_bank(a, q, 1e-6);
      EXPECT_NEAR(quality_overall(bank), q, 0.01) << a.to_string() << " Q=" << q;
      EXPECT_TRUE(bank.single_odor_per_class());
      for (const auto& [code, odors] : bank.capsules()) {
        for (const Odor& o : odors) {
          EXPECT_EQ(classify(o.vector, a), code);
          EXPECT_DOUBLE_EQ(o.remaining_mass, 1e-6);
        }
      }
    }
  }
}

TEST(OdorBankGeneration, RejectsUnreachableTargets) {
  EXPECT_THROW(generate_odor_bank(BitAllocation(1, 1, 1), 0.0, 1e-6), std::invalid_argument);
  EXPECT_THROW(generate_odor_bank(BitAllocation(1, 1, 1), 1.5, 1e-6), std::invalid_argument);
  EXPECT_THROW(generate_odor_bank(BitAllocation(1, 1, 1), 0.5, 0.0), std::invalid_argument);
}

TEST(OdorBankGeneration, FullQualityUsesOptimalPoints) {
  const OdorBank bank = generate_odor_bank(BitAllocation(2, 1, 0), 1.0, 1.0);
  const auto loc = optimal_locations(2);
  for (const Odor& o : bank.all_odors()) {
    const ClassCode c = classify(o.vector, bank.allocation());
    EXPECT_DOUBLE_EQ(o.vector.pleasantness, loc[c.p]);
    EXPECT_DOUBLE_EQ(o.vector.edibility, 50.0);
  }
}

TEST(QualityOverall, TakesMinimumOverUsedDimensions) {
  // Q_p = 0.5 from (25, 75); intensity optimal; edibility unused.
  OdorBank::CapsuleMap caps;
  const BitAllocation a(1, 1, 0);
  std::uint32_t id = 0;
  for (std::uint32_t p = 0; p < 2; ++p) {
    for (std::uint32_t i = 0; i < 2; ++i) {
      PerceptualVector v{p ? 75.0 : 25.0, i ? scale_top() : 0.0, 3.0};
      caps[{p, i, 0}].push_back(Odor{OdorId{id++}, v, 1.0});
    }
  }
  const OdorBank bank(a, caps);
  EXPECT_DOUBLE_EQ(quality_overall(bank), 0.5);
}

TEST(OdorBankInvariants, RejectBadCapsules) {
  const BitAllocation a(1, 0, 0);
  OdorBank::CapsuleMap missing;
  missing[{0, 0, 0}].push_back(Odor{OdorId{0}, {10, 0, 0}, 1.0});
  EXPECT_THROW(OdorBank(a, missing), std::invalid_argument);

  OdorBank::CapsuleMap wrong_key;
  wrong_key[{0, 0, 0}].push_back(Odor{OdorId{0}, {60, 0, 0}, 1.0});
  wrong_key[{1, 0, 0}].push_back(Odor{OdorId{1}, {70, 0, 0}, 1.0});
  EXPECT_THROW(OdorBank(a, wrong_key), std::invalid_argument);

  OdorBank::CapsuleMap dup;
  dup[{0, 0, 0}].push_back(Odor{OdorId{0}, {10, 0, 0}, 1.0});
  dup[{1, 0, 0}].push_back(Odor{OdorId{0}, {70, 0, 0}, 1.0});
  EXPECT_THROW(OdorBank(a, dup), std::invalid_argument);
}

TEST(OdorBankWithdraw, DrawsLargestCapsuleAndConservesMass) {
  const BitAllocation a(1, 0, 0);
  OdorBank::CapsuleMap caps;
  caps[{0, 0, 0}] = {Odor{OdorId{4}, {10, 0, 0}, 2.0}, Odor{OdorId{2}, {20, 0, 0}, 2.0}};
  caps[{1, 0, 0}] = {Odor{OdorId{7}, {70, 0, 0}, 1.0}};
  OdorBank bank(a, caps);
  EXPECT_EQ(bank.select_capsule({0, 0, 0}).id, OdorId{2});  // tie -> smaller id
  EXPECT_EQ(bank.withdraw({0, 0, 0}, 0.5), OdorId{2});
  EXPECT_EQ(bank.select_capsule({0, 0, 0}).id, OdorId{4});
  EXPECT_DOUBLE_EQ(bank.remaining_mass({0, 0, 0}), 3.5);
  EXPECT_DOUBLE_EQ(bank.total_remaining_mass(), 4.5);
  EXPECT_THROW(bank.withdraw({1, 0, 0}, 2.0), std::runtime_error);
  EXPECT_THROW(bank.odor(OdorId{99}), std::out_of_range);
}
