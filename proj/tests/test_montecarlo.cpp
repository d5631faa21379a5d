#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "oracles.hpp"
#include "qnd/montecarlo.hpp"

using namespace qnd;

namespace {

Species sp(std::string name, int a, int b, double mean)
{
    return {std::move(name), Eigen::Vector2i(a, b), mean};
}

bool bit_equal(const McEstimate& x, const McEstimate& y)
{
    return std::memcmp(&x.photon_rate_mean, &y.photon_rate_mean, sizeof(double)) == 0 &&
           std::memcmp(&x.photon_rate_stderr, &y.photon_rate_stderr, sizeof(double)) == 0 &&
           std::memcmp(&x.amplitude_mean, &y.amplitude_mean, sizeof(Complex)) == 0 &&
           std::memcmp(&x.amplitude_stderr, &y.amplitude_stderr, sizeof(double)) == 0 &&
           x.samples_used == y.samples_used;
}

McConfig config(std::uint64_t samples, std::uint64_t seed)
{
    McConfig c;
    c.samples = samples;
    c.seed = seed;
    return c;
}

} // namespace

TEST_CASE("bound dimers give exactly zero")
{
    const Ensemble e(2, {sp("dimer", 1, 1, 4.0)});
    const McEstimate m = estimate(e, Eigen::Vector2d(1, -1), config(100000, 1));
    CHECK(m.photon_rate_mean == 0.0);
    CHECK(m.photon_rate_stderr == 0.0);
    CHECK(m.amplitude_mean == Complex(0.0, 0.0));
    CHECK(m.samples_used == 100000);
}

TEST_CASE("free molecules, N = 4: 2N")
{
    const Ensemble e(2, {sp("A", 1, 0, 4.0), sp("B", 0, 1, 4.0)});
    const McEstimate m = estimate(e, Eigen::Vector2d(1, -1), config(1000000, 2));
    CHECK(std::abs(m.photon_rate_mean - 8.0) <= 3 * m.photon_rate_stderr);
    CHECK(m.photon_rate_stderr > 0.0);
}

TEST_CASE("tetramer mid-stage, N = 4: 2N/3")
{
    const Ensemble e(2, {sp("dimer", 1, 1, 4.0), sp("B", 0, 1, 8.0)});
    const McEstimate m = estimate(e, Eigen::Vector2d(1, -1.0 / 3.0), config(1000000, 3));
    CHECK(std::abs(m.photon_rate_mean - 8.0 / 3.0) <= 3 * m.photon_rate_stderr);
}

TEST_CASE("stderr matches the exact variance of |D|^2")
{
    // For free A, B with mean 4 and g = (1, -1), D is Skellam(4, 4):
    // Var(D^2) = E[D^4] - E[D^2]^2 = (8 + 3 * 64) - 64 = 136.
    const Ensemble e(2, {sp("A", 1, 0, 4.0), sp("B", 0, 1, 4.0)});
    const McEstimate m = estimate(e, Eigen::Vector2d(1, -1), config(400000, 4));
    CHECK(m.photon_rate_stderr == doctest::Approx(std::sqrt(136.0 / 400000)).epsilon(0.05));
    CHECK(m.amplitude_stderr == doctest::Approx(std::sqrt(8.0 / 400000)).epsilon(0.02));
}

TEST_CASE("stderr shrinks as 1/sqrt(samples)")
{
    const Ensemble e(2, {sp("A", 1, 0, 3.0), sp("B", 0, 1, 5.0)});
    const Eigen::Vector2d g(1, -0.6);
    const McEstimate small = estimate(e, g, config(50000, 9));
    const McEstimate large = estimate(e, g, config(800000, 9));
    CHECK(small.photon_rate_stderr / large.photon_rate_stderr == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("determinism and thread independence")
{
    const Ensemble e(2, {sp("trimer", 1, 2, 3.0), sp("B", 0, 1, 12.0)});
    const Eigen::Vector2d g(1, -1.0 / 3.0);
    McConfig c = config(300001, 1234);
    c.threads = 1;
    const McEstimate one = estimate(e, g, c);
    const McEstimate again = estimate(e, g, c);
    c.threads = 4;
    const McEstimate four = estimate(e, g, c);
    c.threads = 7;
    const McEstimate seven = estimate(e, g, c);
    CHECK(bit_equal(one, again));
    CHECK(bit_equal(one, four));
    CHECK(bit_equal(one, seven));

    c.seed = 1235;
    CHECK(!bit_equal(one, estimate(e, g, c)));
}

TEST_CASE("oracle agreement over many seeds")
{
    // Brute-force enumeration gives the reference; >= 99% of seeds must sit
    // within 4 stderr.
    const Ensemble e(2, {sp("dimer", 1, 1, 1.5), sp("A", 1, 0, 0.7), sp("B", 0, 1, 2.2)});
    const Eigen::Vector2cd g(Complex(1.0, 0.3), Complex(-0.4, 0.1));
    const auto exact = oracle::enumerate({{{1, 1}, 1.5}, {{1, 0}, 0.7}, {{0, 1}, 2.2}}, {g(0), g(1)}, 60);
    int agree = 0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        const McEstimate m = estimate(e, g, config(20000, static_cast<std::uint64_t>(s)));
        agree += std::abs(m.photon_rate_mean - exact.photon_rate) <= 4 * m.photon_rate_stderr;
    }
    CHECK(agree >= 99);
}

TEST_CASE("amplitude vanishes at minimum weights")
{
    const Ensemble e(2, {sp("trimer", 1, 2, 5.0), sp("B", 0, 1, 5.0)});
    const McEstimate m = estimate(e, minimum_weights(e), config(200000, 8));
    CHECK(std::abs(m.amplitude_mean) < 4 * m.amplitude_stderr);
}

TEST_CASE("position-resolved top hat with W = L matches count-only mode")
{
    const Ensemble e(2, {sp("dimer", 1, 1, 2.0), sp("B", 0, 1, 4.0), sp("A", 1, 0, 1.0)});
    const Eigen::Vector2d g(1, -0.5);
    McConfig c = config(400000, 10);
    const McEstimate counts = estimate(e, g, c);
    c.seed = 11;
    c.position_resolved = true;
    c.profile = BeamProfile::top_hat(5.0, 5.0);
    const McEstimate positions = estimate(e, g, c);
    const double se = std::hypot(counts.photon_rate_stderr, positions.photon_rate_stderr);
    CHECK(std::abs(counts.photon_rate_mean - positions.photon_rate_mean) <= 4 * se);
}

TEST_CASE("position-resolved Gaussian profile follows Campbell's formula")
{
    const BeamProfile profile = BeamProfile::gaussian(4.0, 24.0);
    const double r1 = oracle::simpson([&](double x) { return profile.value(x); }, 0.0, 24.0);
    const double r2 = oracle::simpson([&](double x) { return profile.value(x) * profile.value(x); }, 0.0, 24.0);
    const double lambda = 6.0;
    const double density = lambda / r1;

    const Ensemble e(2, {sp("A", 1, 0, lambda), sp("B", 0, 1, lambda)});
    McConfig c = config(400000, 12);
    c.position_resolved = true;
    c.profile = profile;
    const McEstimate m = estimate(e, Eigen::Vector2d(1, -1), c);
    CHECK(std::abs(m.photon_rate_mean - 2 * density * r2) <= 4 * m.photon_rate_stderr);
    CHECK(m.photon_rate_mean < 2 * lambda);
}

TEST_CASE("configuration errors")
{
    const Ensemble e(2, {sp("A", 1, 0, 1.0)});
    McConfig c = config(0, 1);
    CHECK_THROWS_AS(estimate(e, Eigen::Vector2d(1, -1), c), ValidationError);
    c.samples = 10;
    c.position_resolved = true;
    CHECK_THROWS_AS(estimate(e, Eigen::Vector2d(1, -1), c), ValidationError);
    c.position_resolved = false;
    CHECK_THROWS_AS(estimate(e, Eigen::Vector3d(1, -1, 0), c), ValidationError);
    const Ensemble huge(2, {sp("A", 1, 0, 1e13)});
    CHECK_THROWS_AS(estimate(huge, Eigen::Vector2d(1, -1), c), std::overflow_error);
}

TEST_CASE("estimate_scan")
{
    const double n = 4.0;
    const Eigen::Vector2d g1(1, -1);
    const std::vector<Ensemble> single{Ensemble(2, {sp("A", 1, 0, n), sp("B", 0, 1, n)})};
    const McConfig c = config(200000, 5);
    CHECK(bit_equal(estimate_scan(single, g1, c).front(), estimate(single.front(), g1, c)));

    const std::vector<Ensemble> dimer{Ensemble(2, {sp("dimer", 1, 1, n)}), single.front()};
    const auto d = estimate_scan(dimer, g1, config(1000000, 6));
    CHECK(d[0].photon_rate_mean == 0.0);
    CHECK(std::abs(d[1].photon_rate_mean - 2 * n) <= 3 * d[1].photon_rate_stderr);

    const std::vector<Ensemble> trimer{Ensemble(2, {sp("trimer", 1, 2, n)}),
                                       Ensemble(2, {sp("dimer", 1, 1, n), sp("B", 0, 1, n)}),
                                       Ensemble(2, {sp("A", 1, 0, n), sp("B", 0, 1, 2 * n)})};
    const auto t = estimate_scan(trimer, Eigen::Vector2d(1, -0.5), config(1000000, 7));
    CHECK(t[0].photon_rate_mean == 0.0);
    CHECK(std::abs(t[1].photon_rate_mean - n / 2) <= 3 * t[1].photon_rate_stderr);
    CHECK(std::abs(t[2].photon_rate_mean - 3 * n / 2) <= 3 * t[2].photon_rate_stderr);
}
