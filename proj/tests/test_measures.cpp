#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "hslimit/grid.hpp"

using namespace hslimit;
using Catch::Matchers::WithinAbs;

namespace {

DiscreteDensity random_density(const Grid &g, std::mt19937 &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(g.size());
  for (auto &x : v)
    x = u(rng) < 0.3 ? 0.0 : u(rng);
  return normalize(DiscreteDensity(g, v));
}

} // namespace

TEST_CASE("grid geometry", "[measures]") {
  const Grid line = Grid::line(2.0, 400);
  REQUIRE(line.h() == Catch::Approx(0.01));
  for (std::size_t i = 0; i < line.size(); ++i)
    REQUIRE(line.center(i) == -line.center(line.size() - 1 - i));

  const Grid radial = Grid::radial(1.0, 10, 3);
  REQUIRE(radial.h() == Catch::Approx(0.1));
  double volume = 0.0;
  for (std::size_t i = 0; i < radial.size(); ++i)
    volume += radial.cell_volume(i);
  REQUIRE_THAT(volume, WithinAbs(4.0 / 3.0 * M_PI, 1e-12));
  REQUIRE(radial.face_area(0) == 0.0);

  REQUIRE_THROWS_AS(Grid::line(0.0, 10), DomainError);
  REQUIRE_THROWS_AS(Grid::line(1.0, 0), DomainError);
}

TEST_CASE("densities reject negative values", "[measures]") {
  const Grid g = Grid::line(1.0, 4);
  REQUIRE_THROWS_AS(DiscreteDensity(g, {0.1, -0.1, 0.0, 0.0}), DomainError);
  REQUIRE_THROWS_AS(DiscreteDensity(g, {0.1, 0.1}), GridMismatch);
}

TEST_CASE("mass", "[measures]") {
  const Grid g = Grid::line(2.0, 400);
  REQUIRE_THAT(mass(DiscreteDensity::indicator(g, -0.5, 0.5)), WithinAbs(1.0, 1e-10));
  REQUIRE(mass(DiscreteDensity(g, std::vector<double>(g.size(), 0.0))) == 0.0);

  // rho_2 for V = x^2/2: (1/2)(C - x^2/2)_+ with (2C)^{3/2}/3 = 1.
  const double c2 = std::pow(3.0, 2.0 / 3.0) / 2.0;
  const Grid fine = Grid::line(2.0, 20000);
  const auto rho = DiscreteDensity::sample(
      fine, [&](double x) { return std::max(0.0, 0.5 * (c2 - 0.5 * x * x)); });
  REQUIRE_THAT(mass(rho), WithinAbs(1.0, 1e-6));

  // Radial ball of radius 0.5 in d = 2 with height 1 has mass pi/4.
  const Grid r = Grid::radial(1.0, 100, 2);
  REQUIRE_THAT(mass(DiscreteDensity::indicator(r, 0.0, 0.5)), WithinAbs(M_PI / 4.0, 1e-12));
}

TEST_CASE("normalize", "[measures][property]") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Grid g = trial % 2 ? Grid::line(1.5, 37 + trial) : Grid::radial(1.0, 20 + trial, 1 + trial % 3);
    REQUIRE_THAT(mass(random_density(g, rng)), WithinAbs(1.0, 1e-10));
  }
  const Grid g = Grid::line(1.0, 8);
  REQUIRE_THROWS_AS(normalize(DiscreteDensity(g, std::vector<double>(8, 0.0))), DomainError);
  REQUIRE_THROWS_AS(normalize(DiscreteDensity(g, std::vector<double>(8, 1e-16))), DomainError);
}

TEST_CASE("second moment", "[measures]") {
  const Grid g = Grid::line(2.0, 400);
  REQUIRE_THAT(second_moment(DiscreteDensity::indicator(g, -0.5, 0.5)), WithinAbs(1.0 / 12.0, 1e-4));
  REQUIRE_THAT(second_moment(DiscreteDensity::indicator(g, 1.0, 2.0)), WithinAbs(7.0 / 3.0, 1e-3));

  // Odd cell count puts a cell centre at the origin.
  const Grid odd = Grid::line(2.0, 401);
  std::vector<double> v(odd.size(), 0.0);
  v[200] = 1.0 / odd.h();
  REQUIRE(odd.center(200) == 0.0);
  REQUIRE_THAT(second_moment(DiscreteDensity(odd, v)), WithinAbs(0.0, 1e-14));
}

TEST_CASE("barycenter", "[measures]") {
  const Grid g = Grid::line(2.0, 400);
  REQUIRE_THAT(barycenter(DiscreteDensity::indicator(g, -0.7, 0.7)), WithinAbs(0.0, 1e-10));
  REQUIRE_THAT(barycenter(DiscreteDensity::indicator(g, 1.0, 2.0)), WithinAbs(1.5, 1e-3));
  const auto left = DiscreteDensity::indicator(g, -2.0, -1.0, 0.5);
  const auto right = DiscreteDensity::indicator(g, 0.0, 1.0, 0.5);
  std::vector<double> mix(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    mix[i] = left[i] + right[i];
  REQUIRE_THAT(barycenter(DiscreteDensity(g, mix)), WithinAbs(-0.5, 1e-3));
  REQUIRE(barycenter(DiscreteDensity::indicator(Grid::radial(1.0, 10, 2), 0.0, 0.5)) == 0.0);
}

TEST_CASE("barycenter is linear in convex combinations", "[measures][property]") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid g = Grid::line(3.0, 300);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_density(g, rng);
    const auto b = random_density(g, rng);
    const double t = u(rng);
    std::vector<double> mix(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      mix[i] = t * a[i] + (1.0 - t) * b[i];
    REQUIRE_THAT(barycenter(DiscreteDensity(g, mix)),
                 WithinAbs(t * barycenter(a) + (1.0 - t) * barycenter(b), 1e-12));
  }
}

TEST_CASE("lp distance", "[measures]") {
  const Grid g = Grid::line(3.0, 600);
  const auto a = DiscreteDensity::indicator(g, 0.0, 1.0);
  REQUIRE(lp_distance(a, a, 1.0) == 0.0);
  REQUIRE_THAT(lp_distance(a, DiscreteDensity::indicator(g, 1.0, 2.0), 1.0), WithinAbs(2.0, 1e-3));
  REQUIRE_THAT(lp_distance(a, DiscreteDensity::indicator(g, 0.0, 2.0, 0.5), 1.0),
               WithinAbs(1.0, 1e-3));
  REQUIRE_THROWS_AS(lp_distance(a, DiscreteDensity::indicator(Grid::line(3.0, 601), 0.0, 1.0), 1.0),
                    GridMismatch);
}

TEST_CASE("lp distance triangle inequality", "[measures][property]") {
  std::mt19937 rng(3);
  const Grid g = Grid::line(2.0, 128);
  for (double p : {1.0, 1.5, 2.0, 4.0})
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = random_density(g, rng), b = random_density(g, rng), c = random_density(g, rng);
      REQUIRE(lp_distance(a, c, p) <= lp_distance(a, b, p) + lp_distance(b, c, p) + 1e-9);
    }
}

TEST_CASE("density CSV", "[measures]") {
  const Grid g = Grid::line(1.0, 3);
  std::ostringstream os;
  write_csv(os, DiscreteDensity(g, {0.0, 1.0 / 3.0, 2.0}));
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "x,value");
  std::getline(in, line);
  std::getline(in, line);
  const auto comma = line.find(',');
  const std::string value = line.substr(comma + 1);
  // at least 12 significant digits
  REQUIRE(value.size() >= 14);
  REQUIRE(std::stod(value) == 1.0 / 3.0);
}
