#include "support.hpp"

#include <gtest/gtest.h>

#include <map>
#include <numeric>

using namespace vog;

namespace {

Frame zero_frame(const BinaryMask& m) { return Frame(m.width, m.height, 0); }

} // namespace

TEST(Components, DiagonalPairIsOneBlobUnderEightConnectivity)
{
    BinaryMask m(4, 4);
    m.set(1, 1);
    m.set(2, 2);
    const auto blobs = connected_components(m, zero_frame(m), Connectivity::Eight);
    ASSERT_EQ(blobs.size(), 1u);
    EXPECT_EQ(blobs[0].area, 2);
    EXPECT_DOUBLE_EQ(blobs[0].centroid.x, 1.5);
    EXPECT_DOUBLE_EQ(blobs[0].centroid.y, 1.5);
}

TEST(Components, DiagonalPairIsTwoBlobsUnderFourConnectivity)
{
    BinaryMask m(4, 4);
    m.set(1, 1);
    m.set(2, 2);
    const auto blobs = connected_components(m, zero_frame(m), Connectivity::Four);
    ASSERT_EQ(blobs.size(), 2u);
    EXPECT_EQ(blobs[0].area, 1);
    EXPECT_EQ(blobs[1].area, 1);
}

TEST(Components, EmptyMaskGivesNoBlobs)
{
    BinaryMask m(16, 9);
    EXPECT_TRUE(connected_components(m, zero_frame(m), Connectivity::Eight).empty());
    int n = -1;
    const auto labels = label_image(m, Connectivity::Eight, &n);
    EXPECT_EQ(n, 0);
    EXPECT_TRUE(std::all_of(labels.begin(), labels.end(), [](int v) { return v == 0; }));
}

TEST(Components, RectangleStatistics)
{
    BinaryMask m(20, 10);
    Frame f(20, 10, 7);
    for (int y = 2; y <= 4; ++y)
        for (int x = 5; x <= 9; ++x) {
            m.set(x, y);
            f.at(x, y) = static_cast<std::uint8_t>(x * 10);
        }
    const auto blobs = connected_components(m, f, Connectivity::Four);
    ASSERT_EQ(blobs.size(), 1u);
    const auto& b = blobs[0];
    EXPECT_EQ(b.area, 15);
    EXPECT_DOUBLE_EQ(b.centroid.x, 7.0);
    EXPECT_DOUBLE_EQ(b.centroid.y, 3.0);
    EXPECT_EQ(b.refined_centroid, b.centroid);
    EXPECT_EQ(b.bbox, (PixelRect{5, 2, 9, 4}));
    EXPECT_EQ(b.max_intensity, 90);
    EXPECT_DOUBLE_EQ(b.mean_intensity, 70.0);
    EXPECT_EQ(b.pixels.size(), 15u);
}

TEST(Components, MatchesFloodFillOnRandomMasks)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        const double density = 0.2 + 0.5 * (trial % 7) / 6.0;
        const auto m = vogtest::random_mask(64, 64, density, rng);
        for (auto conn : {Connectivity::Four, Connectivity::Eight}) {
            const auto expected = vogtest::flood_fill_labels(m, static_cast<int>(conn));
            int n = 0;
            const auto labels = label_image(m, conn, &n);
            ASSERT_EQ(std::vector<int>(labels.begin(), labels.end()), expected) << "trial " << trial;
            EXPECT_EQ(n, *std::max_element(expected.begin(), expected.end()));
        }
    }
}

TEST(Components, AreasAccountForEverySetPixel)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = vogtest::random_mask(40, 30, 0.45, rng);
        Frame f(40, 30, 0);
        const auto blobs = connected_components(m, f, Connectivity::Eight);
        const auto total = std::accumulate(blobs.begin(), blobs.end(), std::size_t{0},
                                           [](std::size_t s, const Blob& b) { return s + b.area; });
        EXPECT_EQ(total, m.count());
        // Blobs come in scan order of their first pixel.
        for (std::size_t i = 1; i < blobs.size(); ++i)
            EXPECT_LT(blobs[i - 1].pixels.front(), blobs[i].pixels.front());
    }
}
