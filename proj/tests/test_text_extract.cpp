#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>
#include <unistd.h>

#include <docseg/image.hpp>
#include <docseg/text_extract.hpp>

using namespace docseg;
namespace fs = std::filesystem;

namespace {

LabelMap make_map(int rows, int cols, int bs, std::vector<BlockLabel> labels) {
    LabelMap m;
    m.rows = rows;
    m.cols = cols;
    m.block_size = bs;
    m.labels = std::move(labels);
    return m;
}

fs::path temp_dir() {
    static int counter = 0;
    const auto dir = fs::temp_directory_path() /
                     ("docseg_extract_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

constexpr auto B = BlockLabel::Background;
constexpr auto T = BlockLabel::Text;
constexpr auto G = BlockLabel::Graphics;

} // namespace

TEST_CASE("text_mask") {
    SECTION("all-background map gives an empty mask") {
        const auto m = make_map(2, 2, 16, {B, B, B, B});
        const TextMask mask = text_mask(m, false, 32, 32);
        for (auto b : mask.bits) CHECK(b == 0);
    }
    SECTION("single text block covers exactly its 16x16 pixels") {
        const auto m = make_map(2, 2, 16, {T, B, B, B});
        const TextMask mask = text_mask(m, false, 32, 32);
        int count = 0;
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x) {
                const bool expect = x < 16 && y < 16;
                CHECK(mask.at(x, y) == expect);
                count += mask.at(x, y);
            }
        CHECK(count == 256);
    }
    SECTION("graphics obeys the include flag") {
        const auto m = make_map(1, 2, 16, {G, B});
        CHECK(text_mask(m, false, 32, 16).at(0, 0) == false);
        CHECK(text_mask(m, true, 32, 16).at(0, 0) == true);
    }
    SECTION("padding is cropped: pixel count misses the padded tail") {
        // 20x16 image, one text block at column 1 covering pixels 16..19 only
        const auto m = make_map(1, 2, 16, {B, T});
        const TextMask mask = text_mask(m, false, 20, 16);
        int count = 0;
        for (auto b : mask.bits) count += b;
        CHECK(count == 4 * 16); // 16x16 block minus 12 padded columns
    }
    SECTION("geometry mismatch throws") {
        const auto m = make_map(1, 1, 16, {T});
        CHECK_THROWS_AS(text_mask(m, false, 64, 64), GeometryError);
    }
}

TEST_CASE("extract_regions") {
    SECTION("horizontally adjacent blocks merge") {
        const auto m = make_map(1, 3, 16, {T, T, B});
        const auto regions = extract_regions(m, false, 48, 16);
        REQUIRE(regions.size() == 1);
        CHECK(regions[0].x == 0);
        CHECK(regions[0].w == 32);
        CHECK(regions[0].block_count == 2);
    }
    SECTION("diagonal-only blocks stay separate (4-connectivity)") {
        const auto m = make_map(2, 2, 16, {T, B, B, T});
        const auto regions = extract_regions(m, false, 32, 32);
        REQUIRE(regions.size() == 2);
        CHECK(regions[0].id == 0);
        CHECK(regions[1].id == 1);
        CHECK(regions[0].y == 0);
        CHECK(regions[1].y == 16);
    }
    SECTION("L-shaped component has a 2x2-block bounding box") {
        const auto m = make_map(2, 2, 16, {T, B, T, T});
        const auto regions = extract_regions(m, false, 32, 32);
        REQUIRE(regions.size() == 1);
        CHECK(regions[0].x == 0);
        CHECK(regions[0].y == 0);
        CHECK(regions[0].w == 32);
        CHECK(regions[0].h == 32);
        CHECK(regions[0].block_count == 3);
    }
    SECTION("regions partition the included blocks") {
        std::mt19937_64 rng(13);
        std::uniform_int_distribution<int> d(0, 3);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<BlockLabel> labels(8 * 8);
            int text_blocks = 0;
            for (auto& l : labels) {
                l = static_cast<BlockLabel>(d(rng));
                text_blocks += l == T;
            }
            const auto m = make_map(8, 8, 8, labels);
            const auto regions = extract_regions(m, false, 64, 64);
            int covered = 0;
            for (const auto& r : regions) covered += r.block_count;
            CHECK(covered == text_blocks);
        }
    }
    SECTION("sorted top-to-bottom then left-to-right with stable ids") {
        const auto m = make_map(2, 3, 16, {B, T, B, T, B, T});
        const auto regions = extract_regions(m, false, 48, 32);
        REQUIRE(regions.size() == 3);
        CHECK(regions[0].y == 0);
        CHECK(regions[0].x == 16);
        CHECK(regions[1].y == 16);
        CHECK(regions[1].x == 0);
        CHECK(regions[2].y == 16);
        CHECK(regions[2].x == 32);
        for (int i = 0; i < 3; ++i) CHECK(regions[i].id == i);
    }
}

TEST_CASE("export_regions") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> d(0, 255);
    RasterImage img;
    img.width = 32;
    img.height = 32;
    img.channels = 1;
    for (int i = 0; i < 32 * 32; ++i) img.data.push_back(static_cast<std::uint8_t>(d(rng)));

    SECTION("empty region list writes only an empty manifest") {
        const auto dir = temp_dir();
        const auto files = export_regions(img, {}, dir);
        REQUIRE(files.size() == 1);
        CHECK(files[0].filename() == "regions.json");
        std::ifstream in(files[0]);
        nlohmann::json j;
        in >> j;
        CHECK(j["regions"].empty());
    }
    SECTION("full-page region round-trips bit-exactly") {
        const auto dir = temp_dir();
        TextRegion r;
        r.id = 0;
        r.x = 0;
        r.y = 0;
        r.w = 32;
        r.h = 32;
        r.block_count = 4;
        const auto files = export_regions(img, {r}, dir);
        REQUIRE(files.size() == 2);
        const RasterImage back = load_image(files[0]);
        CHECK(back.data == img.data);
    }
    SECTION("manifest boxes re-crop to the exported files") {
        const auto dir = temp_dir();
        TextRegion a;
        a.id = 0;
        a.x = 0;
        a.y = 0;
        a.w = 16;
        a.h = 16;
        a.block_count = 1;
        TextRegion b;
        b.id = 1;
        b.x = 16;
        b.y = 16;
        b.w = 16;
        b.h = 16;
        b.block_count = 1;
        const auto files = export_regions(img, {a, b}, dir);
        REQUIRE(files.size() == 3);
        std::ifstream in(dir / "regions.json");
        nlohmann::json j;
        in >> j;
        REQUIRE(j["regions"].size() == 2);
        for (const auto& rj : j["regions"]) {
            const RasterImage piece = load_image(
                dir / ("region_" + std::to_string(rj["id"].get<int>()) + ".pgm"));
            const RasterImage recrop = crop(img, rj["x"], rj["y"], rj["w"], rj["h"]);
            CHECK(piece.data == recrop.data);
        }
    }
    SECTION("crop outside bounds throws") {
        CHECK_THROWS_AS(crop(img, 20, 20, 16, 16), GeometryError);
    }
}
