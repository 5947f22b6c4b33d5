#include "doctest.h"

#include <cmath>
#include <set>

#include "iid/errors.hpp"
#include "iid/phong.hpp"
#include "iid/physmaps.hpp"

using namespace iid;
using namespace iid::phong;

namespace {

Scene frontal_plane_scene(Vec3 light_dir, double i_d) {
    Scene s;
    s.name = "plane";
    s.objects.push_back({Plane{{0, 0, 1}, 0.0}, Material{{1, 1, 1}, {}, {}}});
    s.lights.push_back({light_dir, Rgb{i_d, i_d, i_d}, {}});
    return s;
}

} // namespace

TEST_CASE("plane facing the light renders at full intensity") {
    ImageTensor image = render_full(frontal_plane_scene({0, 0, 1}, 1.0), 8, 8);
    for (double v : image.data) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("light at 60 degrees gives cos(60) = 0.5") {
    double a = 60.0 * 3.14159265358979323846 / 180.0;
    ImageTensor image = render_full(frontal_plane_scene({std::sin(a), 0, std::cos(a)}, 1.0), 8, 8);
    for (double v : image.data) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("ambient-only scene is constant everywhere") {
    Scene s;
    s.objects.push_back({Plane{{0, 0, 1}, 0.0}, Material{{0.5, 0.25, 1.0}, {}, {}}});
    s.ambient = {0.4, 0.4, 0.4};
    ImageTensor image = render_full(s, 6, 10);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 10; ++x) {
            CHECK(image.at(y, x, 0) == doctest::Approx(0.2));
            CHECK(image.at(y, x, 1) == doctest::Approx(0.1));
            CHECK(image.at(y, x, 2) == doctest::Approx(0.4));
        }
}

TEST_CASE("degenerate sphere is rejected") {
    Scene s;
    s.objects.push_back({Sphere{{0, 0, 0}, 0.0}, Material{{1, 1, 1}, {}, {}}});
    s.lights.push_back({{0, 0, 1}, {1, 1, 1}, {}});
    CHECK_THROWS_AS(render_full(s, 4, 4), DataError);
}

TEST_CASE("lambertian sphere: nadir shading, background, exact identity") {
    Scene s;
    s.name = "sphere";
    s.objects.push_back({Sphere{{0, 0, 0}, 0.8}, Material{{1.0, 0.5, 0.25}, {}, {}}});
    s.lights.push_back({{0, 0, 1}, Rgb{0.9, 0.9, 0.9}, {}});

    int n = 65; // odd size puts a pixel exactly on the sphere's nadir
    RenderTriple t = render_lambertian(s, n, n);

    int mid = n / 2;
    CHECK(t.shading.at(mid, mid, 0) == doctest::Approx(0.9).epsilon(1e-3));
    CHECK(t.image.at(mid, mid, 0) == doctest::Approx(0.9 * 1.0).epsilon(1e-3));
    CHECK(t.image.at(mid, mid, 1) == doctest::Approx(0.9 * 0.5).epsilon(1e-3));

    CHECK(t.shading.at(0, 0, 0) == 0.0);
    CHECK(t.image.at(0, 0, 0) == 0.0);

    for (size_t p = 0; p < t.shading.data.size(); ++p)
        for (int c = 0; c < 3; ++c)
            CHECK(t.image.data[p * 3 + c] == t.reflectance.data[p * 3 + c] * t.shading.data[p]);
}

TEST_CASE("lambertian rendering is linear in the light intensity") {
    Scene a = frontal_plane_scene({0.3, 0.2, 0.93}, 0.4);
    Scene b = frontal_plane_scene({0.3, 0.2, 0.93}, 0.8);
    RenderTriple ta = render_lambertian(a, 16, 16);
    RenderTriple tb = render_lambertian(b, 16, 16);
    for (size_t i = 0; i < ta.shading.data.size(); ++i)
        CHECK(tb.shading.data[i] == doctest::Approx(2.0 * ta.shading.data[i]).epsilon(1e-12));
    CHECK(ta.reflectance.data == tb.reflectance.data);
}

TEST_CASE("render_lambertian enforces its preconditions") {
    Scene s = frontal_plane_scene({0, 0, 1}, 1.0);
    s.ambient = {0.1, 0.1, 0.1};
    CHECK_THROWS_AS(render_lambertian(s, 4, 4), DataError);

    Scene two = frontal_plane_scene({0, 0, 1}, 1.0);
    two.lights.push_back({{0, 1, 0}, {1, 1, 1}, {}});
    CHECK_THROWS_AS(render_lambertian(two, 4, 4), DataError);

    Scene tinted = frontal_plane_scene({0, 0, 1}, 1.0);
    tinted.lights[0].diffuse = {1.0, 0.5, 1.0};
    CHECK_THROWS_AS(render_lambertian(tinted, 4, 4), DataError);
}

TEST_CASE("test suite is deterministic and in range") {
    auto a = make_test_suite(0);
    auto b = make_test_suite(0);
    REQUIRE(a.size() == 4);
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].name == b[i].name);
        RenderTriple ta = render_lambertian(a[i], 48, 48);
        RenderTriple tb = render_lambertian(b[i], 48, 48);
        CHECK(ta.image.data == tb.image.data);
        for (double v : ta.image.data) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    auto c = make_test_suite(1);
    CHECK(c[0].lights[0].direction.x != a[0].lights[0].direction.x);
}

TEST_CASE("two-tone sphere shows exactly two reflectance triples") {
    auto suite = make_test_suite(3);
    const Scene* two_tone = nullptr;
    for (const auto& s : suite)
        if (s.name == "two-tone-sphere") two_tone = &s;
    REQUIRE(two_tone != nullptr);

    RenderTriple t = render_lambertian(*two_tone, 64, 64);
    std::set<std::array<double, 3>> triples;
    for (size_t p = 0; p < t.shading.data.size(); ++p) {
        if (t.shading.data[p] == 0.0 && t.reflectance.data[p * 3] == 0.0) continue; // background
        triples.insert({t.reflectance.data[p * 3], t.reflectance.data[p * 3 + 1],
                        t.reflectance.data[p * 3 + 2]});
    }
    CHECK(triples.size() == 2);
}

TEST_CASE("f_rrg of a constant-reflectance render is negligible") {
    Scene s;
    s.objects.push_back({Sphere{{0, 0, 0}, 2.0}, Material{{0.7, 0.5, 0.3}, {}, {}}});
    s.lights.push_back({normalized({0.3, 0.1, 1.0}), Rgb{1.0, 1.0, 1.0}, {}});
    RenderTriple t = render_lambertian(s, 48, 48); // sphere covers the frame
    physmaps::RrgMap rrg = physmaps::f_rrg(t.image, 1.0, 1e-3);
    // Away from the dark rim the ratio cancels shading exactly.
    for (int y = 8; y < 40; ++y)
        for (int x = 8; x < 40; ++x)
            for (int c = 0; c < 3; ++c) CHECK(rrg.channels.at(y, x, c) < 1e-6);
}

TEST_CASE("f_sg matches the gradient of log ground-truth shading inside regions") {
    auto suite = make_test_suite(0);
    const Scene* two_tone = nullptr;
    for (const auto& s : suite)
        if (s.name == "two-tone-sphere") two_tone = &s;
    REQUIRE(two_tone != nullptr);

    int n = 96;
    RenderTriple t = render_lambertian(*two_tone, n, n);
    physmaps::SgMap sg = physmaps::f_sg(t.image, 1.0, 1e-3, 0.1);

    ImageTensor log_shading(n, n, 1);
    for (size_t p = 0; p < t.shading.data.size(); ++p)
        log_shading.data[p] = std::log(std::max(t.shading.data[p], 1e-3));
    filters::GradientField ref = filters::spatial_gradient(log_shading, 1.0);

    // Region id per pixel: 0 background, 1/2 the two tones.
    auto region = [&](int y, int x) -> int {
        if (t.shading.at(y, x, 0) == 0.0 && t.reflectance.at(y, x, 0) == 0.0) return 0;
        const auto& tt = *std::get_if<TwoTone>(nullptr); // placeholder, never used
        (void)tt;
        return 1;
    };
    (void)region;

    // Compare wherever every pixel in the kernel window shares one
    // reflectance triple and is bright enough to dodge the eps clamp.
    int radius = 4; // kernel radius 3 for sigma 1, plus a safety pixel
    long long compared = 0;
    for (int y = radius; y < n - radius; ++y) {
        for (int x = radius; x < n - radius; ++x) {
            bool uniform = true;
            for (int dy = -radius; dy <= radius && uniform; ++dy)
                for (int dx = -radius; dx <= radius && uniform; ++dx) {
                    for (int c = 0; c < 3; ++c)
                        if (t.reflectance.at(y + dy, x + dx, c) != t.reflectance.at(y, x, c))
                            uniform = false;
                    if (t.shading.at(y + dy, x + dx, 0) < 0.02) uniform = false;
                    if (t.reflectance.at(y + dy, x + dx, 0) == 0.0) uniform = false;
                }
            if (!uniform) continue;
            ++compared;
            for (int c = 0; c < 3; ++c) {
                if (sg.mask.at(y, x, c) >= 0.1) {
                    CHECK(sg.gx.at(y, x, c) == 0.0);
                    CHECK(sg.gy.at(y, x, c) == 0.0);
                    continue;
                }
                CHECK(std::abs(sg.gx.at(y, x, c) - ref.gx.at(y, x, 0)) < 1e-4);
                CHECK(std::abs(sg.gy.at(y, x, c) - ref.gy.at(y, x, 0)) < 1e-4);
            }
        }
    }
    CHECK(compared > 500); // the check must actually cover real area
}
