#include <gtest/gtest.h>

#include <cmath>

#include "i2e/preprocess.hpp"

#include "desk_corpus.hpp"

namespace {

using namespace i2e;

// Floating-point bilinear with half-pixel centres, for comparison.
double bilinear_ref(const RgbImage& src, int h, int w, int y, int x, int c) {
  auto coord = [](int d, int dst, int src_size) {
    double s = (d + 0.5) * src_size / dst - 0.5;
    return std::clamp(s, 0.0, static_cast<double>(src_size - 1));
  };
  const double sy = coord(y, h, src.height()), sx = coord(x, w, src.width());
  const int y0 = static_cast<int>(sy), x0 = static_cast<int>(sx);
  const int y1 = std::min(y0 + 1, src.height() - 1), x1 = std::min(x0 + 1, src.width() - 1);
  const double fy = sy - y0, fx = sx - x0;
  return (1 - fy) * ((1 - fx) * src.at(y0, x0, c) + fx * src.at(y0, x1, c)) +
         fy * ((1 - fx) * src.at(y1, x0, c) + fx * src.at(y1, x1, c));
}

TEST(Resize, IdentityAtSameSize) {
  Rng rng(1);
  const auto img = desk::random_image(13, 17, rng);
  EXPECT_EQ(resize_bilinear(img, 13, 17), img);
}

TEST(Resize, MatchesFloatingReference) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int sh = 1 + static_cast<int>(uniform_index(rng, 40)), sw = 1 + static_cast<int>(uniform_index(rng, 40));
    const int dh = 3 + static_cast<int>(uniform_index(rng, 50)), dw = 3 + static_cast<int>(uniform_index(rng, 50));
    const auto src = desk::random_image(sh, sw, rng);
    const auto out = resize_bilinear(src, dh, dw);
    for (int y = 0; y < dh; ++y)
      for (int x = 0; x < dw; ++x)
        for (int c = 0; c < 3; ++c) ASSERT_NEAR(out.at(y, x, c), bilinear_ref(src, dh, dw, y, x, c), 0.5 + 1e-9);
  }
}

TEST(Resize, ExactHalfRoundsAwayFromZero) {
  RgbImage src(1, 2);
  src.set(0, 0, 0, 0, 0);
  src.set(0, 1, 1, 1, 1);
  // 2 -> 1 samples the midpoint: 0.5 rounds to 1.
  EXPECT_EQ(resize_bilinear(src, 1, 1).at(0, 0, 0), 1);
}

TEST(Resize, RejectsBadSizes) {
  EXPECT_THROW(resize_bilinear(RgbImage(4, 4), 0, 3), std::invalid_argument);
  EXPECT_THROW(resize_bilinear(RgbImage(), 3, 3), std::invalid_argument);
}

TEST(Preprocess, EvalModeIsPlainResize) {
  const auto& img = desk::natural_images()[0];
  PreprocessConfig cfg;
  cfg.size = 96;
  EXPECT_EQ(preprocess(img, cfg, 1), resize_bilinear(img, 96, 96));
  EXPECT_EQ(preprocess(img, cfg, 1), preprocess(img, cfg, 2));
}

TEST(Preprocess, FlipAlwaysAtProbabilityOne) {
  const auto& img = desk::natural_images()[1];
  PreprocessConfig cfg;
  cfg.size = 64;
  cfg.flip_prob = 1.0;
  EXPECT_EQ(preprocess(img, cfg, 3), flip_horizontal(resize_bilinear(img, 64, 64)));
  EXPECT_EQ(flip_horizontal(flip_horizontal(img)), img);
}

TEST(Preprocess, CropKeepsSizeAndBoundsOffset) {
  Rng rng(4);
  const auto src = desk::random_image(128, 128, rng);
  PreprocessConfig cfg;
  cfg.size = 128;
  cfg.crop_pad = 4;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto out = preprocess(src, cfg, seed);
    ASSERT_EQ(out.height(), 128);
    ASSERT_EQ(out.width(), 128);
    // Find the offset that explains the output.
    bool found = false;
    for (int dy = -4; dy <= 4 && !found; ++dy)
      for (int dx = -4; dx <= 4 && !found; ++dx) found = out == padded_crop(src, 4, dy + 4, dx + 4);
    EXPECT_TRUE(found) << seed;
  }
  EXPECT_EQ(padded_crop(src, 4, 4, 4), src);
  EXPECT_THROW(padded_crop(src, 4, 9, 0), std::invalid_argument);
}

TEST(Preprocess, SeedDeterminism) {
  const auto& img = desk::natural_images()[2];
  PreprocessConfig cfg;
  cfg.size = 48;
  cfg.crop_pad = 6;
  cfg.flip_prob = 0.5;
  EXPECT_EQ(preprocess(img, cfg, 11), preprocess(img, cfg, 11));
  int differs = 0;
  for (std::uint64_t s = 0; s < 10; ++s) differs += !(preprocess(img, cfg, s) == preprocess(img, cfg, s + 100));
  EXPECT_GT(differs, 0);
}

TEST(Preprocess, Validation) {
  PreprocessConfig cfg;
  cfg.size = 2;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.flip_prob = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.crop_pad = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

}  // namespace
