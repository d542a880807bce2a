#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "flow/math.hpp"

using namespace flow;

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 mul(const Mat3& a, const Mat3& b) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
    return r;
}

// Textbook rotation matrix of a unit quaternion.
Mat3 matrix_of(const Orientation& q) {
    const double w = q.w, x = q.x, y = q.y, z = q.z;
    return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
             {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
             {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

Orientation random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    return normalized({n(rng), n(rng), n(rng), n(rng)});
}

}  // namespace

TEST_CASE("zero rotator is the identity orientation") {
    const Orientation q = rotator_to_orientation({0, 0, 0});
    CHECK(q == Orientation::identity());
}

TEST_CASE("yaw of 90 degrees is a half-angle rotation about +Y") {
    const Orientation q = rotator_to_orientation({0, 0, 90});
    CHECK(q.w == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(q.x == 0.0);
    CHECK(q.y == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(q.z == 0.0);
}

TEST_CASE("per-frame delta (0.3, 0.6, 0.9) deg matches the tabulated rotation-matrix oracle") {
    // Rx(0.3 deg) * Rz(0.6 deg) * Ry(0.9 deg) converted to a quaternion at 40 digits, tabulated offline.
    const Orientation expected{0.99995213118261105528, 0.0025767516566851000784, 0.0078400590320519308189,
                               0.0052563455582679074436};
    const Orientation q = rotator_to_orientation(Rotator{15, 30, 45} * 0.02);
    CHECK(std::abs(q.w - expected.w) < 1e-15);
    CHECK(std::abs(q.x - expected.x) < 1e-15);
    CHECK(std::abs(q.y - expected.y) < 1e-15);
    CHECK(std::abs(q.z - expected.z) < 1e-15);
}

TEST_CASE("single-axis yaw equals the axis-angle rotation about Y for any angle") {
    for (double deg : {-725.0, -180.0, -1e-6, 0.4, 37.0, 200.0, 1080.5}) {
        const Orientation a = rotator_to_orientation({0, 0, deg});
        const Orientation b = axis_angle({0, 1, 0}, deg_to_rad(deg));
        CHECK(std::abs(a.w - b.w) < 1e-15);
        CHECK(std::abs(a.y - b.y) < 1e-15);
        CHECK(a.x == 0.0);
        CHECK(a.z == 0.0);
    }
}

TEST_CASE("compose with identity returns the other operand") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const Orientation q = random_unit(rng);
        const Orientation c = compose(Orientation::identity(), q);
        CHECK(std::abs(c.w - q.w) < 1e-15);
        CHECK(std::abs(c.x - q.x) < 1e-15);
        CHECK(std::abs(c.y - q.y) < 1e-15);
        CHECK(std::abs(c.z - q.z) < 1e-15);
    }
}

TEST_CASE("two quarter yaws compose to a half turn") {
    const Orientation q = rotator_to_orientation({0, 0, 90});
    const Orientation h = compose(q, q);
    CHECK(std::abs(h.w) < 1e-15);
    CHECK(std::abs(std::abs(h.y) - 1.0) < 1e-15);
}

TEST_CASE("compose matches the rotation-matrix product oracle") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 500; ++i) {
        const Orientation a = random_unit(rng);
        const Orientation b = random_unit(rng);
        const Mat3 expected = mul(matrix_of(a), matrix_of(b));
        const Mat3 got = matrix_of(compose(a, b));
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) REQUIRE(std::abs(got[r][c] - expected[r][c]) < 1e-12);
    }
}

TEST_CASE("compose is associative and keeps unit norm") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 500; ++i) {
        const Orientation a = random_unit(rng), b = random_unit(rng), c = random_unit(rng);
        const Mat3 l = matrix_of(compose(compose(a, b), c));
        const Mat3 r = matrix_of(compose(a, compose(b, c)));
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y) REQUIRE(std::abs(l[x][y] - r[x][y]) < 1e-12);
    }
    Orientation q = Orientation::identity();
    const Orientation step = rotator_to_orientation({0.3, 0.6, 0.9});
    for (int i = 0; i < 100000; ++i) q = compose(step, q);
    CHECK(std::abs(q.norm() - 1.0) < 1e-9);
}

TEST_CASE("rotate applies the rotation matrix") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 100; ++i) {
        const Orientation q = random_unit(rng);
        const Vec3 v{u(rng), u(rng), u(rng)};
        const Mat3 m = matrix_of(q);
        const Vec3 r = rotate(q, v);
        CHECK(std::abs(r.x - (m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z)) < 1e-12);
        CHECK(std::abs(r.y - (m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z)) < 1e-12);
        CHECK(std::abs(r.z - (m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z)) < 1e-12);
    }
}

TEST_CASE("yaw-only accumulation is partition independent") {
    // 10 s at 20 deg/s split into uneven frames.
    Orientation a = Orientation::identity();
    Orientation b = Orientation::identity();
    for (int i = 0; i < 300; ++i) a = compose(rotator_to_orientation({0, 0, 20.0 / 30.0}), a);
    double t = 0.0;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.001, 0.05);
    while (t < 10.0) {
        const double dt = std::min(u(rng), 10.0 - t);
        b = compose(rotator_to_orientation({0, 0, 20.0 * dt}), b);
        t += dt;
    }
    CHECK(std::abs(yaw_degrees(a) - (-160.0)) < 1e-9);  // 200 deg wraps to -160
    CHECK(rad_to_deg(geodesic_angle(a, b)) < 1e-9);
}

TEST_CASE("yaw_degrees and geodesic_angle basics") {
    CHECK(yaw_degrees(rotator_to_orientation({0, 0, 37})) == doctest::Approx(37.0).epsilon(1e-13));
    CHECK(yaw_degrees(rotator_to_orientation({0, 0, -120})) == doctest::Approx(-120.0).epsilon(1e-13));
    const Orientation q = rotator_to_orientation({0, 0, 1e-7});
    CHECK(rad_to_deg(geodesic_angle(Orientation::identity(), q)) == doctest::Approx(1e-7).epsilon(1e-6));
    // q and -q are the same orientation
    CHECK(geodesic_angle(q, Orientation{-q.w, -q.x, -q.y, -q.z}) < 1e-15);
}

TEST_CASE("sphere-box overlap worked examples") {
    const Vec3 box{3, 0.75, 0}, half{0.5, 0.5, 0.5};
    CHECK(sphere_aabb_overlap({3, 0.75, 0}, 0.5, box, half));
    CHECK_FALSE(sphere_aabb_overlap({1, 0.5, 0}, 0.5, box, half));
    CHECK(sphere_aabb_overlap({2.05, 0.75, 0}, 0.5, box, half));
    CHECK(sphere_aabb_overlap({2.0, 0.75, 0}, 0.5, box, half));  // touching counts
}

TEST_CASE("sphere-box overlap agrees with a dense point-sampling oracle") {
    // Oracle: sample the box surface and interior on a fine grid; the sphere overlaps iff some
    // sample lies within r (+ grid resolution). Cases too close to the boundary for the grid are skipped.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pos(-2.5, 2.5), ext(0.1, 1.0), rad(0.05, 1.0);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const Vec3 c{pos(rng), pos(rng), pos(rng)};
        const Vec3 h{ext(rng), ext(rng), ext(rng)};
        const double r = rad(rng);
        const int n = 24;
        double best = 1e300;
        for (int a = 0; a <= n; ++a)
            for (int b = 0; b <= n; ++b)
                for (int d = 0; d <= n; ++d) {
                    const Vec3 p{-h.x + 2 * h.x * a / n, -h.y + 2 * h.y * b / n, -h.z + 2 * h.z * d / n};
                    best = std::min(best, (p - c).norm());
                }
        const double cell = std::sqrt(3.0) * 2.0 * std::max({h.x, h.y, h.z}) / n;
        const bool got = sphere_aabb_overlap(c, r, {0, 0, 0}, h);
        if (best <= r) {
            CHECK(got);
            ++checked;
        } else if (best > r + cell) {
            CHECK_FALSE(got);
            ++checked;
        }
        // Mirror symmetry on every axis.
        CHECK(got == sphere_aabb_overlap({-c.x, c.y, c.z}, r, {0, 0, 0}, h));
        CHECK(got == sphere_aabb_overlap({c.x, -c.y, c.z}, r, {0, 0, 0}, h));
        CHECK(got == sphere_aabb_overlap({c.x, c.y, -c.z}, r, {0, 0, 0}, h));
    }
    CHECK(checked > 950);
}
