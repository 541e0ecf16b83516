#include "oracles.hpp"
#include "test_util.hpp"

#include "palmtex/descriptors.hpp"
#include "palmtex/error.hpp"

#include <bit>
#include <sstream>

using namespace palmtex;

namespace {

bool same(const CodeImage& codes, const oracle::Codes& ref) {
    if (static_cast<int>(ref.size()) != codes.height || ref.empty() || static_cast<int>(ref[0].size()) != codes.width)
        return false;
    for (int y = 0; y < codes.height; ++y)
        for (int x = 0; x < codes.width; ++x)
            if (codes.at(x, y) != ref[y][x]) return false;
    return true;
}

FilterBank random_bank(std::mt19937& rng, int count, int side) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Kernel> ks;
    for (int i = 0; i < count; ++i) {
        Kernel k{side, std::vector<double>(static_cast<std::size_t>(side) * side)};
        for (auto& c : k.coeffs) c = u(rng);
        const double mean = k.sum() / static_cast<double>(k.coeffs.size());
        for (auto& c : k.coeffs) c -= mean;
        ks.push_back(std::move(k));
    }
    return FilterBank(std::move(ks));
}

std::vector<oracle::Matrix> as_matrices(const FilterBank& bank) {
    std::vector<oracle::Matrix> out;
    for (const auto& k : bank.kernels()) {
        oracle::Matrix m(static_cast<std::size_t>(k.side), std::vector<double>(static_cast<std::size_t>(k.side)));
        for (int i = 0; i < k.side; ++i)
            for (int j = 0; j < k.side; ++j) m[i][j] = k(i, j);
        out.push_back(m);
    }
    return out;
}

}  // namespace

TEST_CASE("lbp_encode") {
    SUBCASE("constant image gives 255 everywhere") {
        const GrayImage img(10, 10, std::uint8_t{42});
        for (auto topo : {LbpTopology::circle, LbpTopology::square3x3}) {
            const CodeImage c = lbp_encode(img, {8, 1.0, topo});
            CHECK(c.width == 8);
            for (auto v : c.codes) CHECK(v == 255);
        }
        const CodeImage wide = lbp_encode(img, {8, 2.5, LbpTopology::circle});
        CHECK(wide.width == 4);
        for (auto v : wide.codes) CHECK(v == 255);
    }
    SUBCASE("all square neighbors below the center give 0") {
        const GrayImage img(3, 3, std::vector<std::uint8_t>{4, 1, 0, 3, 5, 2, 4, 4, 4});
        const CodeImage c = lbp_encode(img, {8, 1.0, LbpTopology::square3x3});
        REQUIRE(c.codes.size() == 1);
        CHECK(c.codes[0] == 0);
    }
    SUBCASE("bit order starts east and turns counter-clockwise") {
        std::vector<std::uint8_t> px(9, 0);
        px[1 * 3 + 1] = 5;
        px[0 * 3 + 1] = 9;  // north neighbor -> bit 2
        const CodeImage c = lbp_encode(GrayImage(3, 3, px), {8, 1.0, LbpTopology::square3x3});
        CHECK(c.codes[0] == 4);
    }
    SUBCASE("random images match the naive oracle") {
        std::mt19937 rng(101);
        for (int i = 0; i < 20; ++i) {
            const GrayImage img = oracle::random_image(rng, 16, 16);
            CHECK(same(lbp_encode(img, {8, 1.0, LbpTopology::circle}), oracle::lbp_circle(img, 8, 1.0)));
            CHECK(same(lbp_encode(img, {8, 2.0, LbpTopology::circle}), oracle::lbp_circle(img, 8, 2.0)));
            CHECK(same(lbp_encode(img, {6, 1.5, LbpTopology::circle}), oracle::lbp_circle(img, 6, 1.5)));
            CHECK(same(lbp_encode(img, {8, 1.0, LbpTopology::square3x3}), oracle::lbp_square(img)));
        }
    }
    SUBCASE("strictly monotone remapping leaves on-grid codes unchanged") {
        std::mt19937 rng(7);
        for (int i = 0; i < 10; ++i) {
            const GrayImage img = oracle::random_image(rng, 16, 16, 0, 127);
            std::vector<std::uint8_t> px(img.data().begin(), img.data().end());
            for (auto& p : px) p = static_cast<std::uint8_t>(p * p / 127 + p);  // strictly increasing on 0..127
            const GrayImage mapped(16, 16, std::move(px));
            CHECK(lbp_encode(img, {8, 1.0, LbpTopology::square3x3}) == lbp_encode(mapped, {8, 1.0, LbpTopology::square3x3}));
            CHECK(lbp_encode(img, {4, 2.0, LbpTopology::circle}) == lbp_encode(mapped, {4, 2.0, LbpTopology::circle}));
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_CODE(lbp_encode(GrayImage(2, 5, std::uint8_t{0})), ErrorCode::ImageTooSmall);
        CHECK_THROWS_CODE(lbp_encode(GrayImage(9, 9, std::uint8_t{0}), {3, 1.0, LbpTopology::circle}), ErrorCode::InvalidArgument);
        CHECK_THROWS_CODE(lbp_encode(GrayImage(9, 9, std::uint8_t{0}), {6, 1.0, LbpTopology::square3x3}), ErrorCode::InvalidArgument);
    }
}

TEST_CASE("ltp_encode") {
    SUBCASE("definition cases") {
        // center 100; east 110 (+1), north 103 (dead zone), west 90 (-1), rest 100
        std::vector<std::uint8_t> px(9, 100);
        px[1 * 3 + 2] = 110;
        px[0 * 3 + 1] = 103;
        px[1 * 3 + 0] = 90;
        const auto [up, lo] = ltp_encode(GrayImage(3, 3, px), {5.0, LtpSplit::concat_upper_lower});
        CHECK(up.codes[0] == 1);        // east only
        CHECK(lo.codes[0] == (1 << 4));  // west only
        CHECK((up.codes[0] & 4) == 0);
        CHECK((lo.codes[0] & 4) == 0);
    }
    SUBCASE("threshold boundary is strict") {
        std::vector<std::uint8_t> px(9, 100);
        px[1 * 3 + 2] = 105;
        px[1 * 3 + 0] = 95;
        const auto [up, lo] = ltp_encode(GrayImage(3, 3, px), {5.0, LtpSplit::concat_upper_lower});
        CHECK(up.codes[0] == 0);
        CHECK(lo.codes[0] == 0);
    }
    SUBCASE("random images match the ternary oracle") {
        std::mt19937 rng(202);
        for (int i = 0; i < 20; ++i) {
            const GrayImage img = oracle::random_image(rng, 16, 16);
            for (double t : {0.0, 5.0, 17.5}) {
                const auto [up, lo] = ltp_encode(img, {t, LtpSplit::concat_upper_lower});
                const auto [rup, rlo] = oracle::ltp(img, t);
                CHECK(same(up, rup));
                CHECK(same(lo, rlo));
            }
        }
    }
    SUBCASE("negative threshold rejected") {
        CHECK_THROWS_CODE(ltp_encode(GrayImage(5, 5, std::uint8_t{0}), {-1.0, LtpSplit::upper_only}), ErrorCode::InvalidArgument);
    }
}

TEST_CASE("ldp_encode") {
    SUBCASE("Kirsch table matches the rotated 5/-3 rule") {
        const auto& masks = kirsch_masks();
        for (int d = 0; d < 8; ++d) {
            int sum = 0;
            for (int v : masks[d]) sum += v;
            CHECK(sum == 0);
            CHECK(masks[d][4] == 0);
        }
        std::mt19937 rng(1);
        const GrayImage img = oracle::random_image(rng, 3, 3);
        for (int d = 0; d < 8; ++d) {
            int m = 0;
            for (int i = 0; i < 9; ++i) m += masks[d][i] * img.data()[i];
            CHECK(m == oracle::kirsch_response(img, 1, 1, d));
        }
    }
    SUBCASE("constant image selects directions 0..k-1") {
        const GrayImage img(6, 6, std::uint8_t{77});
        CHECK(ldp_encode(img, {3}).codes == std::vector<std::uint8_t>(16, 7));
        CHECK(ldp_encode(img, {1}).codes == std::vector<std::uint8_t>(16, 1));
        CHECK(ldp_encode(img, {8}).codes == std::vector<std::uint8_t>(16, 255));
    }
    SUBCASE("vertical step edge") {
        // dark left column, bright middle and right columns
        const GrayImage img(3, 3, std::vector<std::uint8_t>{0, 100, 100, 0, 100, 100, 0, 100, 100});
        // Responses from the glossary masks, evaluated by hand:
        //   E  = 5*300 - 3*200          =  900
        //   NE = 5*300 - 3*200          =  900
        //   N  = 5*200 - 3*300          =  100
        //   NW = 5*100 - 3*400          = -700
        //   W  = 5*0   - 3*500          = -1500
        //   SW = -700, S = 100, SE = 900
        // Largest |m| is the west mask, whose 5-weights lie along the edge;
        // ties at 900 resolve to directions 0 and 1.
        const CodeImage c = ldp_encode(img, {3});
        CHECK((c.codes[0] & (1 << 4)) != 0);
        CHECK(c.codes[0] == (1 << 4) + (1 << 0) + (1 << 1));
        CHECK(ldp_encode(img, {1}).codes[0] == (1 << 4));
    }
    SUBCASE("random images match sort-and-select, popcount is k") {
        std::mt19937 rng(303);
        for (int i = 0; i < 20; ++i) {
            const GrayImage img = oracle::random_image(rng, 16, 16);
            for (int k : {1, 3, 5}) {
                const CodeImage c = ldp_encode(img, {k});
                CHECK(same(c, oracle::ldp(img, k)));
                for (auto v : c.codes) CHECK(std::popcount(static_cast<unsigned>(v)) == k);
            }
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_CODE(ldp_encode(GrayImage(2, 2, std::uint8_t{0})), ErrorCode::ImageTooSmall);
        CHECK_THROWS_CODE(ldp_encode(GrayImage(5, 5, std::uint8_t{0}), {0}), ErrorCode::InvalidArgument);
        CHECK_THROWS_CODE(ldp_encode(GrayImage(5, 5, std::uint8_t{0}), {9}), ErrorCode::InvalidArgument);
    }
}

TEST_CASE("lpq_encode") {
    SUBCASE("constant image gives code 0") {
        const GrayImage img(12, 12, std::uint8_t{250});
        const CodeImage c = lpq_encode(img, {7});
        CHECK(c.width == 6);
        for (auto v : c.codes) CHECK(v == 0);
    }
    SUBCASE("single bright pixel: bits follow the DFT kernel signs") {
        const int M = 7;
        for (int dx = -3; dx <= 3; ++dx) {
            for (int dy : {-2, 0, 1}) {
                std::vector<std::uint8_t> px(49, 0);
                px[static_cast<std::size_t>((3 + dy) * 7 + (3 + dx))] = 200;
                const CodeImage c = lpq_encode(GrayImage(7, 7, px), {M});
                REQUIRE(c.codes.size() == 1);
                // F(u) = 200 * exp(-2 pi i u.d); evaluate the four frequencies directly.
                const double a = 1.0 / M;
                const double phases[4] = {a * dx, a * dy, a * (dx + dy), a * (dx - dy)};
                int expected = 0;
                for (int j = 0; j < 4; ++j) {
                    const double re = 200.0 * std::cos(2 * std::numbers::pi * phases[j]);
                    const double im = -200.0 * std::sin(2 * std::numbers::pi * phases[j]);
                    if (re > 1e-6) expected |= 1 << j;
                    if (im > 1e-6) expected |= 1 << (4 + j);
                }
                CHECK_MESSAGE(c.codes[0] == expected, "dx=" << dx << " dy=" << dy);
            }
        }
        std::vector<std::uint8_t> px(49, 0);
        px[24] = 200;
        CHECK(lpq_encode(GrayImage(7, 7, px), {7}).codes[0] == 15);
    }
    SUBCASE("random images match the direct windowed DFT") {
        std::mt19937 rng(404);
        for (int i = 0; i < 10; ++i) {
            const GrayImage img = oracle::random_image(rng, 16, 16);
            CHECK(same(lpq_encode(img, {7}), oracle::lpq(img, 7)));
            CHECK(same(lpq_encode(img, {3}), oracle::lpq(img, 3)));
            CHECK(same(lpq_encode(img, {5}), oracle::lpq(img, 5)));
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_CODE(lpq_encode(GrayImage(6, 6, std::uint8_t{0}), {7}), ErrorCode::ImageTooSmall);
        CHECK_THROWS_CODE(lpq_encode(GrayImage(9, 9, std::uint8_t{0}), {4}), ErrorCode::InvalidArgument);
    }
}

TEST_CASE("bsif_encode") {
    std::mt19937 rng(505);
    SUBCASE("zero-mean kernels on a constant image give code 0") {
        const FilterBank bank = random_bank(rng, 8, 5);
        const CodeImage c = bsif_encode(GrayImage(16, 16, std::uint8_t{255}), bank);
        CHECK(c.width == 12);
        for (auto v : c.codes) CHECK(v == 0);
    }
    SUBCASE("centered delta kernel flags pixels brighter than their window mean") {
        Kernel k{3, std::vector<double>(9, -1.0 / 9.0)};
        k.coeffs[4] += 1.0;
        const FilterBank bank({k});
        std::vector<std::uint8_t> px = {10, 10, 10, 10, 40, 10, 10, 10, 10};
        CHECK(bsif_encode(GrayImage(3, 3, px), bank).codes[0] == 1);
        px[4] = 5;
        CHECK(bsif_encode(GrayImage(3, 3, px), bank).codes[0] == 0);
    }
    SUBCASE("random banks match the naive loop") {
        for (int i = 0; i < 10; ++i) {
            const FilterBank bank = random_bank(rng, 8, i % 2 ? 3 : 5);
            const GrayImage img = oracle::random_image(rng, 16, 16);
            CHECK(same(bsif_encode(img, bank), oracle::bsif(img, as_matrices(bank))));
        }
    }
    SUBCASE("errors") {
        const FilterBank bank = random_bank(rng, 2, 7);
        CHECK_THROWS_CODE(bsif_encode(GrayImage(6, 9, std::uint8_t{0}), bank), ErrorCode::ImageTooSmall);
        Kernel a{3, std::vector<double>(9, 0.0)}, b{5, std::vector<double>(25, 0.0)};
        CHECK_THROWS_CODE(FilterBank({a, b}), ErrorCode::MixedKernelSizes);
        Kernel biased{3, std::vector<double>(9, 0.1)};
        CHECK_THROWS_CODE(FilterBank({biased}), ErrorCode::InvalidFilterBank);
        CHECK_THROWS_CODE(FilterBank(std::vector<Kernel>(9, a)), ErrorCode::InvalidFilterBank);
    }
}

TEST_CASE("intensity offsets leave every code raster unchanged") {
    std::mt19937 rng(606);
    const FilterBank bank = random_bank(rng, 8, 5);
    for (int i = 0; i < 5; ++i) {
        const GrayImage img = oracle::random_image(rng, 16, 16, 0, 200);
        for (int c : {1, 10, 50}) {
            const GrayImage shifted = oracle::offset(img, c);
            CHECK(lbp_encode(img) == lbp_encode(shifted));
            CHECK(lbp_encode(img, {8, 1.0, LbpTopology::square3x3}) == lbp_encode(shifted, {8, 1.0, LbpTopology::square3x3}));
            CHECK(ltp_encode(img).first == ltp_encode(shifted).first);
            CHECK(ltp_encode(img).second == ltp_encode(shifted).second);
            CHECK(ldp_encode(img) == ldp_encode(shifted));
            CHECK(lpq_encode(img) == lpq_encode(shifted));
            CHECK(bsif_encode(img, bank) == bsif_encode(shifted, bank));
        }
    }
}

TEST_CASE("FilterBank text format") {
    std::mt19937 rng(707);
    const FilterBank bank = random_bank(rng, 3, 5);
    std::stringstream buf;
    bank.write(buf);
    std::string header;
    std::getline(buf, header);
    CHECK(header == "BSIF 3 5");
    buf.seekg(0);
    const FilterBank back = FilterBank::read(buf);
    REQUIRE(back.count() == 3);
    REQUIRE(back.side() == 5);
    for (int i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 25; ++j)
            CHECK(std::abs(back.kernels()[i].coeffs[j] - bank.kernels()[i].coeffs[j]) <= 1e-12);

    std::istringstream bad_header("BSIF 2\n");
    CHECK_THROWS_CODE(FilterBank::read(bad_header), ErrorCode::InvalidFilterBank);
    std::istringstream truncated("BSIF 1 3\n0 0 0 0\n");
    CHECK_THROWS_CODE(FilterBank::read(truncated), ErrorCode::InvalidFilterBank);
}
