#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "iid/errors.hpp"
#include "iid/image.hpp"

using namespace iid;
using img::AugmentOp;
using img::ImageTensor;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "iidlab_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

ImageTensor random_image(int h, int w, int c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ImageTensor out(h, w, c);
    for (double& v : out.data) v = (rng() >> 11) * 0x1.0p-53;
    return out;
}

std::multiset<double> value_histogram(const ImageTensor& t, int channel) {
    std::multiset<double> hist;
    for (int y = 0; y < t.height; ++y)
        for (int x = 0; x < t.width; ++x) hist.insert(t.at(y, x, channel));
    return hist;
}

} // namespace

TEST_CASE("save/load round trip stays within the 8-bit quantization bound") {
    ImageTensor image = random_image(9, 13, 3, 7);
    auto path = temp_file("roundtrip.png");
    img::save_image(image, path);
    ImageTensor back = img::load_image(path);
    REQUIRE(back.same_shape(image));
    for (size_t i = 0; i < image.data.size(); ++i)
        CHECK(std::abs(back.data[i] - image.data[i]) <= 1.0 / 255.0 + 1e-12);
}

TEST_CASE("pure white image loads as all ones") {
    ImageTensor white(2, 2, 3, 1.0);
    auto path = temp_file("white.png");
    img::save_image(white, path);
    ImageTensor back = img::load_image(path);
    for (double v : back.data) CHECK(v == 1.0);
}

TEST_CASE("8-bit value 128 normalizes to 128/255") {
    ImageTensor half(1, 1, 3, 0.5);
    auto path = temp_file("half.png");
    img::save_image(half, path); // 0.5*255 rounds half-up to byte 128
    ImageTensor back = img::load_image(path);
    CHECK(back.data[0] == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
}

TEST_CASE("greyscale PNG loads and saves as one channel") {
    ImageTensor grey(4, 5, 1);
    for (size_t i = 0; i < grey.data.size(); ++i) grey.data[i] = (i % 7) / 7.0;
    auto path = temp_file("grey.png");
    img::save_image(grey, path);
    ImageTensor back = img::load_image(path);
    CHECK(back.channels == 1);
    CHECK(back.height == 4);
    CHECK(back.width == 5);
}

TEST_CASE("save then load all zeros") {
    ImageTensor zeros(3, 3, 3);
    auto path = temp_file("zeros.png");
    img::save_image(zeros, path);
    for (double v : img::load_image(path).data) CHECK(v == 0.0);
}

TEST_CASE("16-bit PGM normalizes by 65535") {
    auto path = temp_file("gray16.pgm");
    {
        std::ofstream out(path, std::ios::binary);
        out << "P5\n2 1\n65535\n";
        unsigned char raster[] = {0xFF, 0xFF, 0x00, 0x01}; // 65535, 1 (big-endian)
        out.write(reinterpret_cast<char*>(raster), 4);
    }
    ImageTensor back = img::load_image(path);
    CHECK(back.channels == 1);
    CHECK(back.data[0] == doctest::Approx(1.0));
    CHECK(back.data[1] == doctest::Approx(1.0 / 65535.0));
}

TEST_CASE("load errors are distinct and carry the path") {
    CHECK_THROWS_AS(img::load_image(temp_file("does_not_exist.png")), DataError);

    auto bad = temp_file("not_an_image.txt");
    std::ofstream(bad) << "hello world, definitely not pixels";
    CHECK_THROWS_AS(img::load_image(bad), DataError);

    auto truncated = temp_file("truncated.png");
    {
        ImageTensor image = random_image(16, 16, 3, 3);
        img::save_image(image, truncated);
        auto size = std::filesystem::file_size(truncated);
        std::filesystem::resize_file(truncated, size / 2);
    }
    CHECK_THROWS_AS(img::load_image(truncated), DataError);
}

TEST_CASE("channel_max dominates every channel and matches the loop oracle") {
    CHECK_THROWS_AS(img::channel_max(ImageTensor(2, 2, 1)), DataError);

    ImageTensor image(1, 1, 3);
    image.data = {0.2, 0.7, 0.1};
    CHECK(img::channel_max(image).data[0] == 0.7);

    ImageTensor flat(1, 1, 3, 0.4);
    CHECK(img::channel_max(flat).data[0] == 0.4);

    ImageTensor rnd = random_image(8, 8, 3, 11);
    ImageTensor maxed = img::channel_max(rnd);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            double expect = rnd.at(y, x, 0);
            for (int c = 1; c < 3; ++c) expect = std::max(expect, rnd.at(y, x, c));
            CHECK(maxed.at(y, x, 0) == expect);
            for (int c = 0; c < 3; ++c) CHECK(maxed.at(y, x, 0) >= rnd.at(y, x, c));
        }
}

TEST_CASE("sample_patches: bounds, exhaustive case, determinism") {
    ImageTensor image = random_image(400, 600, 3, 5);
    auto patches = img::sample_patches(image, 2000, 64, 123);
    REQUIRE(patches.size() == 2000);
    for (const auto& p : patches) {
        CHECK(p.origin_row >= 0);
        CHECK(p.origin_col >= 0);
        CHECK(p.origin_row + 64 <= 400);
        CHECK(p.origin_col + 64 <= 600);
        CHECK(p.tensor.height == 64);
    }

    ImageTensor exact = random_image(64, 64, 3, 6);
    auto only = img::sample_patches(exact, 1, 64, 9);
    CHECK(only[0].origin_row == 0);
    CHECK(only[0].origin_col == 0);

    auto a = img::sample_patches(image, 50, 32, 77);
    auto b = img::sample_patches(image, 50, 32, 77);
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].origin_row == b[i].origin_row);
        CHECK(a[i].origin_col == b[i].origin_col);
        CHECK(a[i].tensor.data == b[i].tensor.data);
    }

    CHECK_THROWS_AS(img::sample_patches(random_image(32, 32, 3, 1), 1, 64, 0), DataError);
}

TEST_CASE("augment: involutions, index oracle, histogram preservation") {
    img::Patch patch{"src", 0, 0, random_image(16, 16, 3, 21)};

    SUBCASE("rot180 twice is the identity") {
        auto twice = img::augment(img::augment(patch, AugmentOp::rot180), AugmentOp::rot180);
        CHECK(twice.tensor.data == patch.tensor.data);
    }
    SUBCASE("identity is bit-identical") {
        CHECK(img::augment(patch, AugmentOp::identity).tensor.data == patch.tensor.data);
    }
    SUBCASE("flip-h of a column ramp reverses the ramp") {
        ImageTensor ramp(4, 8, 1);
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 8; ++x) ramp.at(y, x, 0) = x / 8.0;
        img::Patch p{"ramp", 0, 0, ramp};
        ImageTensor flipped = img::augment(p, AugmentOp::flip_h).tensor;
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 8; ++x) CHECK(flipped.at(y, x, 0) == ramp.at(y, 7 - x, 0));
    }
    SUBCASE("rot90 then rot270 is the identity") {
        auto back = img::augment(img::augment(patch, AugmentOp::rot90), AugmentOp::rot270);
        CHECK(back.tensor.data == patch.tensor.data);
    }
    SUBCASE("every op preserves the per-channel value histogram") {
        for (AugmentOp op : img::kAugmentOps) {
            auto moved = img::augment(patch, op);
            for (int c = 0; c < 3; ++c)
                CHECK(value_histogram(moved.tensor, c) == value_histogram(patch.tensor, c));
        }
    }
    SUBCASE("rotations reject non-square patches") {
        img::Patch rect{"rect", 0, 0, random_image(4, 6, 3, 2)};
        CHECK_THROWS_AS(img::augment(rect, AugmentOp::rot90), DataError);
        CHECK_NOTHROW(img::augment(rect, AugmentOp::flip_h));
    }
}

TEST_CASE("discover_images finds LOL and split layouts deterministically") {
    namespace fs = std::filesystem;
    auto root = fs::temp_directory_path() / "iidlab_tests" / "dataset";
    fs::remove_all(root);
    fs::create_directories(root / "our485" / "low");
    fs::create_directories(root / "train");
    ImageTensor tiny(2, 2, 3, 0.5);
    img::save_image(tiny, root / "our485" / "low" / "b.png");
    img::save_image(tiny, root / "our485" / "low" / "a.png");
    img::save_image(tiny, root / "train" / "c.png");
    img::save_image(tiny, root / "loose.png");

    auto found = img::discover_images(root);
    REQUIRE(found.size() == 4);
    CHECK(found == img::discover_images(root)); // stable ordering
    CHECK_THROWS_AS(img::discover_images(root / "missing"), DataError);
}
