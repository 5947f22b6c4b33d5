#include "iid/phong.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "iid/errors.hpp"

namespace iid::phong {

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 normalized(const Vec3& v) {
    double n = std::sqrt(dot(v, v));
    if (n == 0.0) throw DataError("cannot normalize a zero vector");
    return {v.x / n, v.y / n, v.z / n};
}

namespace {

struct Hit {
    double z;
    Vec3 point;
    Vec3 normal;
    const SurfaceObject* object;
};

std::optional<Hit> intersect(const SurfaceObject& obj, double px, double py) {
    if (const auto* s = std::get_if<Sphere>(&obj.geometry)) {
        if (s->radius <= 0.0) throw DataError("degenerate sphere (non-positive radius)");
        double dx = px - s->center.x, dy = py - s->center.y;
        double d2 = dx * dx + dy * dy;
        if (d2 > s->radius * s->radius) return std::nullopt;
        double dz = std::sqrt(s->radius * s->radius - d2);
        Vec3 p{px, py, s->center.z + dz};
        Vec3 n{(p.x - s->center.x) / s->radius, (p.y - s->center.y) / s->radius, dz / s->radius};
        return Hit{p.z, p, n, &obj};
    }
    if (const auto* pl = std::get_if<Plane>(&obj.geometry)) {
        if (pl->normal.z == 0.0) return std::nullopt; // edge-on to the viewer
        double z = (pl->offset - pl->normal.x * px - pl->normal.y * py) / pl->normal.z;
        Vec3 n = normalized(pl->normal);
        if (n.z < 0) n = {-n.x, -n.y, -n.z};
        return Hit{z, {px, py, z}, n, &obj};
    }
    const auto& q = std::get<Quad>(obj.geometry);
    if (px < q.x0 || px > q.x1 || py < q.y0 || py > q.y1) return std::nullopt;
    return Hit{q.z, {px, py, q.z}, {0, 0, 1}, &obj};
}

Vec3 reference_point(const Geometry& g) {
    if (const auto* s = std::get_if<Sphere>(&g)) return s->center;
    if (const auto* q = std::get_if<Quad>(&g)) return {(q->x0 + q->x1) / 2, (q->y0 + q->y1) / 2, q->z};
    return {0, 0, 0};
}

Rgb reflectance_at(const Hit& hit) {
    const Material& m = hit.object->material;
    if (m.texture) {
        const auto& q = std::get<Quad>(hit.object->geometry);
        const ImageTensor& tex = *m.texture;
        double u = (hit.point.x - q.x0) / (q.x1 - q.x0);
        double v = (hit.point.y - q.y0) / (q.y1 - q.y0);
        int col = std::clamp(static_cast<int>(u * tex.width), 0, tex.width - 1);
        int row = std::clamp(static_cast<int>(v * tex.height), 0, tex.height - 1);
        return {tex.at(row, col, 0), tex.at(row, col, 1), tex.at(row, col, 2)};
    }
    if (m.two_tone) {
        Vec3 ref = reference_point(hit.object->geometry);
        Vec3 d{hit.point.x - ref.x, hit.point.y - ref.y, hit.point.z - ref.z};
        return dot(d, m.two_tone->split_normal) >= 0 ? m.two_tone->tone_a : m.two_tone->tone_b;
    }
    return m.albedo;
}

/// Pixel center -> world (x,y) over [-1,1]^2; row 0 is y = +1 (image top).
void pixel_to_world(int y, int x, int h, int w, double& wx, double& wy) {
    wx = -1.0 + 2.0 * (x + 0.5) / w;
    wy = 1.0 - 2.0 * (y + 0.5) / h;
}

std::optional<Hit> trace(const Scene& scene, double wx, double wy) {
    std::optional<Hit> best;
    for (const auto& obj : scene.objects) {
        auto hit = intersect(obj, wx, wy);
        if (hit && (!best || hit->z > best->z)) best = hit;
    }
    return best;
}

} // namespace

ImageTensor render_full(const Scene& scene, int height, int width) {
    ImageTensor out(height, width, 3);
    Vec3 view = normalized(scene.viewer);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double wx, wy;
            pixel_to_world(y, x, height, width, wx, wy);
            auto hit = trace(scene, wx, wy);
            if (!hit) continue;
            Rgb r = reflectance_at(*hit);
            for (int c = 0; c < 3; ++c) {
                double v = scene.ambient[c] * r[c];
                for (const auto& light : scene.lights) {
                    Vec3 l = normalized(light.direction);
                    double ln = std::max(0.0, dot(l, hit->normal));
                    v += scene.k_d * r[c] * ln * light.diffuse[c];
                    if (scene.specular) {
                        // Mirror of the light direction about the normal.
                        Vec3 refl{2 * ln * hit->normal.x - l.x, 2 * ln * hit->normal.y - l.y,
                                  2 * ln * hit->normal.z - l.z};
                        double rv = std::max(0.0, dot(refl, view));
                        v += scene.specular->k_s * std::pow(rv, scene.specular->shininess) *
                             light.specular[c];
                    }
                }
                out.at(y, x, c) = std::clamp(v, 0.0, 1.0);
            }
        }
    }
    return out;
}

RenderTriple render_lambertian(const Scene& scene, int height, int width) {
    if (scene.lights.size() != 1)
        throw DataError("render_lambertian needs exactly one light");
    const Light& light = scene.lights[0];
    if (scene.ambient.r != 0 || scene.ambient.g != 0 || scene.ambient.b != 0)
        throw DataError("render_lambertian forbids ambient light");
    if (scene.specular) throw DataError("render_lambertian forbids a specular term");
    if (light.diffuse.r != light.diffuse.g || light.diffuse.g != light.diffuse.b)
        throw DataError("render_lambertian needs channel-equal diffuse intensity");

    Vec3 l = normalized(light.direction);
    double intensity = light.diffuse.r;
    RenderTriple t{ImageTensor(height, width, 3), ImageTensor(height, width, 3),
                   ImageTensor(height, width, 1)};
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double wx, wy;
            pixel_to_world(y, x, height, width, wx, wy);
            auto hit = trace(scene, wx, wy);
            if (!hit) continue;
            double s = std::clamp(std::max(0.0, dot(l, hit->normal)) * intensity, 0.0, 1.0);
            Rgb r = reflectance_at(*hit);
            t.shading.at(y, x, 0) = s;
            for (int c = 0; c < 3; ++c) {
                t.reflectance.at(y, x, c) = r[c];
                t.image.at(y, x, c) = r[c] * s;
            }
        }
    }
    return t;
}

std::vector<Scene> make_test_suite(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto unit = [&rng](double lo, double hi) {
        // 53-bit mantissa draw; stable across standard libraries.
        double u = (rng() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    };
    auto tilted_light = [&](double max_tilt) {
        double tilt = unit(0.05, max_tilt);
        double azim = unit(0.0, 2.0 * 3.14159265358979323846);
        return normalized(Vec3{std::sin(tilt) * std::cos(azim), std::sin(tilt) * std::sin(azim),
                               std::cos(tilt)});
    };
    auto albedo = [&] { return Rgb{unit(0.25, 0.95), unit(0.25, 0.95), unit(0.25, 0.95)}; };

    std::vector<Scene> suite;

    {
        Scene s;
        s.name = "sphere";
        s.objects.push_back({Sphere{{0, 0, 0}, 0.85}, Material{albedo(), {}, {}}});
        s.lights.push_back({tilted_light(0.6), Rgb{0.95, 0.95, 0.95}, {}});
        suite.push_back(std::move(s));
    }
    {
        Scene s;
        s.name = "two-tone-sphere";
        Vec3 split = normalized(Vec3{unit(-1, 1), unit(-1, 1), 0.2});
        Material m{{}, TwoTone{split, albedo(), albedo()}, {}};
        s.objects.push_back({Sphere{{0, 0, 0}, 0.85}, m});
        s.lights.push_back({tilted_light(0.5), Rgb{0.95, 0.95, 0.95}, {}});
        suite.push_back(std::move(s));
    }
    {
        Scene s;
        s.name = "textured-quad";
        // Blocky chromatic texture: an 8x8 grid of random albedos.
        ImageTensor tex(8, 8, 3);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) {
                Rgb a = albedo();
                tex.at(y, x, 0) = a.r;
                tex.at(y, x, 1) = a.g;
                tex.at(y, x, 2) = a.b;
            }
        Material m{{}, {}, std::move(tex)};
        s.objects.push_back({Quad{-1, 1, -1, 1, 0}, m});
        s.lights.push_back({tilted_light(0.7), Rgb{0.9, 0.9, 0.9}, {}});
        suite.push_back(std::move(s));
    }
    {
        Scene s;
        s.name = "multi-sphere";
        s.objects.push_back({Plane{{0, 0, 1}, -1.5}, Material{albedo(), {}, {}}});
        for (int i = 0; i < 3; ++i) {
            Vec3 center{unit(-0.55, 0.55), unit(-0.55, 0.55), unit(-0.5, 0.0)};
            s.objects.push_back({Sphere{center, unit(0.2, 0.4)}, Material{albedo(), {}, {}}});
        }
        s.lights.push_back({tilted_light(0.6), Rgb{0.9, 0.9, 0.9}, {}});
        suite.push_back(std::move(s));
    }
    return suite;
}

} // namespace iid::phong
