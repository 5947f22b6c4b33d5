#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "iid/image.hpp"

namespace iid::phong {

using img::ImageTensor;

struct Vec3 {
    double x = 0, y = 0, z = 0;
};
Vec3 normalized(const Vec3& v);
double dot(const Vec3& a, const Vec3& b);

struct Rgb {
    double r = 0, g = 0, b = 0;
    double operator[](int c) const { return c == 0 ? r : (c == 1 ? g : b); }
};

/// Orthographic scene over the window [-1,1]^2, viewer on +z looking down -z.
struct Sphere {
    Vec3 center;
    double radius = 0;
};
struct Plane {
    Vec3 normal; // n·p = offset, oriented toward the viewer at shade time
    double offset = 0;
};
/// Axis-aligned rectangle at fixed z; reflectance sampled nearest-neighbor
/// from the material texture.
struct Quad {
    double x0 = -1, x1 = 1, y0 = -1, y1 = 1, z = 0;
};
using Geometry = std::variant<Sphere, Plane, Quad>;

/// Reflectance is uniform, split into two tones by a plane through the
/// geometry's reference point, or a texture (quads).
struct TwoTone {
    Vec3 split_normal;
    Rgb tone_a; // used where dot(p - reference, split_normal) >= 0
    Rgb tone_b;
};
struct Material {
    Rgb albedo;
    std::optional<TwoTone> two_tone;
    std::optional<ImageTensor> texture; // 3-channel
};

struct SurfaceObject {
    Geometry geometry;
    Material material;
};

struct Light {
    Vec3 direction; // unit vector from the surface toward the light
    Rgb diffuse;
    Rgb specular;
};

struct SpecularModel {
    double k_s = 0;
    double shininess = 1; // the exponent on [R·V]
};

struct Scene {
    std::string name;
    std::vector<SurfaceObject> objects;
    std::vector<Light> lights;
    Rgb ambient;      // combined k_a * i_a per channel
    double k_d = 1.0; // diffuse coefficient
    Vec3 viewer{0, 0, 1};
    std::optional<SpecularModel> specular;
};

struct RenderTriple {
    ImageTensor image;       // 3-channel
    ImageTensor reflectance; // 3-channel ground truth
    ImageTensor shading;     // 1-channel ground truth
};

/// Full model: ambient + for each light diffuse + (optional) specular with a
/// white specular reflectance; dot products clamp at 0, output clamps to [0,1].
/// Pixels with no surface are 0.
ImageTensor render_full(const Scene& scene, int height, int width);

/// Single light, no ambient, no specular, channel-equal diffuse intensity.
/// Returns image, reflectance and shading with image == reflectance*shading
/// exactly by construction; shading itself is clamped to [0,1].
RenderTriple render_lambertian(const Scene& scene, int height, int width);

/// Deterministic catalogue for the given seed: "sphere", "two-tone-sphere",
/// "textured-quad", "multi-sphere". All satisfy the lambertian preconditions.
std::vector<Scene> make_test_suite(std::uint64_t seed);

} // namespace iid::phong
