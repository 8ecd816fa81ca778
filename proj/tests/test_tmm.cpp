#include <doctest.h>

#include <cmath>
#include <complex>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/tmm.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace snspd;

namespace {

MaterialRef constant_material(const std::string& name, double n, double k) {
  return std::make_shared<const DispersionTable>(DispersionTable::constant(name, n, k));
}

}  // namespace

TEST_CASE("lossless slab absorbs nothing, R + T = 1") {
  auto air = constant_material("Air", 1.0, 0.0);
  auto glass = constant_material("SiO2", 1.45, 0.0);
  for (double thickness : {13.0, 230.0, 1742.5}) {
    LayerStack stack(air, {Layer::homogeneous(glass, thickness)}, air);
    const auto response = solve_stack(stack, 1350.0, Polarization::TE);
    CHECK(response.layer_absorptance.size() == 1);
    CHECK(std::abs(response.layer_absorptance[0]) < 1e-12);
    CHECK(response.reflectance + response.transmittance == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("normal-incidence Fresnel: air to n=1.5 glass gives R = 0.04") {
  auto air = constant_material("Air", 1.0, 0.0);
  auto vacuum = constant_material("Vacuum", 1.0, 0.0);
  auto glass = constant_material("Glass", 1.5, 0.0);
  // no empty interiors allowed; a 1 nm index-matched spacer changes nothing
  LayerStack stack(air, {Layer::homogeneous(vacuum, 1.0)}, glass);
  const auto response = solve_stack(stack, 1350.0, Polarization::TE);
  CHECK(std::abs(response.reflectance - 0.04) < 1e-6);
}

TEST_CASE("single absorbing film matches the Airy closed form to 1e-10") {
  Rng rng(190443001u);
  auto entry = constant_material("Entry", 1.0, 0.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double n1 = 1.0 + 4.0 * rng.uniform();
    const double k1 = 6.0 * rng.uniform();
    const double n2 = 1.0 + 2.0 * rng.uniform();
    const double d = 1.0 + 2999.0 * rng.uniform();
    const double wavelength = 1260.0 + 390.0 * rng.uniform();

    auto film = constant_material("Film", n1, k1);
    auto exit = constant_material("Exit", n2, 0.0);
    LayerStack stack(entry, {Layer::homogeneous(film, d)}, exit);
    const auto got = solve_stack(stack, wavelength, Polarization::TE);
    const auto want = oracles::airy_single_film({1.0, 0.0}, make_index(n1, k1),
                                                {n2, 0.0}, d, wavelength);
    CHECK(std::abs(got.reflectance - want.reflectance) < 1e-10);
    CHECK(std::abs(got.transmittance - want.transmittance) < 1e-10);
  }
}

TEST_CASE("energy conservation on randomized multilayers") {
  Rng rng(555101u);
  auto entry = constant_material("Entry", 1.45, 0.0);
  auto exit = constant_material("Exit", 1.0, 0.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int layer_count = 1 + static_cast<int>(rng.uniform() * 6.0);
    std::vector<Layer> layers;
    for (int i = 0; i < layer_count; ++i) {
      const double n = 1.0 + 4.0 * rng.uniform();
      const double k = 6.0 * rng.uniform();
      const double d = 1.0 + 2999.0 * rng.uniform();
      layers.push_back(Layer::homogeneous(
          constant_material("L" + std::to_string(i), n, k), d));
    }
    LayerStack stack(entry, std::move(layers), exit);
    const double wavelength = 1260.0 + 390.0 * rng.uniform();
    const auto response = solve_stack(stack, wavelength, Polarization::TE);
    CHECK(std::abs(response.conservation_residual()) < 1e-9);
    CHECK(response.reflectance >= 0.0);
    CHECK(response.transmittance >= 0.0);
    for (double a : response.layer_absorptance) CHECK(a >= 0.0);
  }
}

TEST_CASE("lossless stack transmittance is reciprocal under reversal") {
  Rng rng(9120391u);
  for (int trial = 0; trial < 50; ++trial) {
    auto entry = constant_material("Entry", 1.0 + rng.uniform(), 0.0);
    auto exit = constant_material("Exit", 1.0 + rng.uniform(), 0.0);
    std::vector<Layer> forward;
    const int layer_count = 1 + static_cast<int>(rng.uniform() * 5.0);
    for (int i = 0; i < layer_count; ++i) {
      forward.push_back(Layer::homogeneous(
          constant_material("L" + std::to_string(i), 1.0 + 3.0 * rng.uniform(), 0.0),
          10.0 + 1000.0 * rng.uniform()));
    }
    std::vector<Layer> reversed(forward.rbegin(), forward.rend());
    const double wavelength = 1300.0 + 300.0 * rng.uniform();
    const auto fwd =
        solve_stack(LayerStack(entry, forward, exit), wavelength, Polarization::TE);
    const auto rev =
        solve_stack(LayerStack(exit, reversed, entry), wavelength, Polarization::TE);
    CHECK(fwd.transmittance == doctest::Approx(rev.transmittance).epsilon(1e-10));
  }
}

TEST_CASE("inserting a vanishing layer leaves the response unchanged") {
  auto lib = fixtures::standard_materials();
  auto base = fixtures::membrane_stack(lib, 2200.0);
  std::vector<Layer> layers = base.layers();
  layers.insert(layers.begin() + 1, Layer::homogeneous(lib.get("SiO2"), 1e-9));
  LayerStack padded(base.entry_medium(), std::move(layers), base.exit_medium());
  for (double wavelength : {1280.0, 1350.0, 1500.0}) {
    const auto a = solve_stack(base, wavelength, Polarization::TE);
    const auto b = solve_stack(padded, wavelength, Polarization::TE);
    CHECK(std::abs(a.reflectance - b.reflectance) < 1e-9);
    CHECK(std::abs(a.transmittance - b.transmittance) < 1e-9);
    CHECK(std::abs(a.total_absorptance() - b.total_absorptance()) < 1e-9);
  }
}

TEST_CASE("TE and TM agree when meander wire and gap materials match") {
  auto glass = constant_material("SiO2", 1.45, 0.0);
  auto air = constant_material("Air", 1.0, 0.0);
  auto filler = constant_material("Filler", 2.1, 0.35);
  LayerStack stack(glass,
                   {Layer::homogeneous(air, 1500.0),
                    Layer::meander(fixtures::standard_meander(), filler, filler),
                    Layer::homogeneous(glass, 230.0)},
                   air);
  for (double wavelength : {1280.0, 1425.0, 1600.0}) {
    const auto te = solve_stack(stack, wavelength, Polarization::TE);
    const auto tm = solve_stack(stack, wavelength, Polarization::TM);
    CHECK(std::abs(te.reflectance - tm.reflectance) < 1e-12);
    CHECK(std::abs(te.transmittance - tm.transmittance) < 1e-12);
    for (std::size_t i = 0; i < te.layer_absorptance.size(); ++i) {
      CHECK(std::abs(te.layer_absorptance[i] - tm.layer_absorptance[i]) < 1e-12);
    }
  }
}

TEST_CASE("detector absorption: lossless wire absorbs nothing") {
  auto glass = constant_material("SiO2", 1.45, 0.0);
  auto air = constant_material("Air", 1.0, 0.0);
  auto wire = constant_material("LosslessWire", 3.1, 0.0);
  LayerStack stack(glass,
                   {Layer::homogeneous(air, 2000.0),
                    Layer::meander(fixtures::standard_meander(), wire, air),
                    Layer::homogeneous(glass, 230.0)},
                   air);
  CHECK(detector_absorption(stack, 1350.0, Polarization::TE) == doctest::Approx(0.0));
  CHECK(detector_absorption(stack, 1350.0, Polarization::TM) == doctest::Approx(0.0));
}

TEST_CASE("detector absorption requires a meander layer") {
  auto glass = constant_material("SiO2", 1.45, 0.0);
  auto air = constant_material("Air", 1.0, 0.0);
  LayerStack stack(glass, {Layer::homogeneous(air, 100.0)}, air);
  CHECK_THROWS_AS(detector_absorption(stack, 1350.0, Polarization::TE), ValidationError);
}

TEST_CASE("membrane cavity: thick mirror keeps transmittance below 1e-3") {
  auto lib = fixtures::standard_materials();
  for (double gap : {500.0, 2200.0, 4100.0, 9000.0}) {
    auto stack = fixtures::membrane_stack(lib, gap);
    for (double wavelength = 1260.0; wavelength <= 1650.0; wavelength += 30.0) {
      const auto response = solve_stack(stack, wavelength, Polarization::TE);
      CHECK(response.transmittance <= 1e-3);
    }
  }
}

TEST_CASE("membrane cavity: absorption is lambda/2-periodic in the airgap") {
  auto lib = fixtures::standard_materials();
  auto stack = fixtures::membrane_stack(lib, 1000.0);
  for (double wavelength : {1280.0, 1350.0, 1500.0}) {
    for (double gap : {800.0, 2200.0, 4100.0}) {
      const double a0 =
          detector_absorption(stack.with_airgap(gap), wavelength, Polarization::TE);
      const double a1 = detector_absorption(stack.with_airgap(gap + wavelength / 2.0),
                                            wavelength, Polarization::TE);
      CHECK(std::abs(a1 - a0) <= 1e-6 * std::max(a0, 1e-30));
    }
  }
}

TEST_CASE("solver rejects an absorbing entry medium") {
  auto lossy = constant_material("Lossy", 1.45, 0.2);
  auto air = constant_material("Air", 1.0, 0.0);
  LayerStack stack(lossy, {Layer::homogeneous(air, 100.0)}, air);
  CHECK_THROWS_AS(solve_stack(stack, 1350.0, Polarization::TE), ValidationError);
}

TEST_CASE("stack validation: at most one meander, positive thicknesses") {
  auto air = constant_material("Air", 1.0, 0.0);
  auto wire = constant_material("W", 4.0, 4.0);
  auto meander = Layer::meander(fixtures::standard_meander(), wire, air);
  CHECK_THROWS_AS(LayerStack(air, {meander, meander}, air), ValidationError);
  CHECK_THROWS_AS(LayerStack(air, {Layer::homogeneous(air, 0.0)}, air), ValidationError);
  // ... unless that layer is the designated airgap
  CHECK_NOTHROW(LayerStack(air, {Layer::homogeneous(air, 0.0)}, air, 0));
}

TEST_CASE("solver reports the offending layer for pathological media") {
  // k >> n over a huge thickness: field propagation overflows to non-finite
  auto air = constant_material("Air", 1.0, 0.0);
  auto absurd = constant_material("Absurd", 1.0, 6.0);
  LayerStack stack(air, {Layer::homogeneous(absurd, 5e7)}, air);
  try {
    solve_stack(stack, 1000.0, Polarization::TE);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("layer 0") != std::string::npos);
  }
}

TEST_CASE("deep opaque random stacks stay finite and conservative") {
  // large total optical depth exercises the exponent-tracked flux path
  auto entry = constant_material("Entry", 1.45, 0.0);
  auto exit = constant_material("Exit", 1.0, 0.0);
  std::vector<Layer> layers;
  for (int i = 0; i < 6; ++i) {
    layers.push_back(Layer::homogeneous(constant_material("L" + std::to_string(i), 3.0, 6.0),
                                        2900.0));
  }
  LayerStack stack(entry, std::move(layers), exit);
  const auto response = solve_stack(stack, 1260.0, Polarization::TE);
  CHECK(std::abs(response.conservation_residual()) < 1e-9);
  CHECK(response.transmittance == doctest::Approx(0.0));
}
