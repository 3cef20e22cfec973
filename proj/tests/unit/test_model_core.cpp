#include "spme/errors.hpp"
#include "spme/ocp.hpp"
#include "spme/parameters.hpp"
#include "spme/voltage.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace spme;

namespace {

// Independent evaluation of the electrode-averaged relations with the cell
// constants typed in directly.
constexpr double kR = 8.314472, kT = 298.15, kF = 96485.0;
constexpr double kVt = kR * kT / kF;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("default parameter set reproduces the cell table") {
    const ParameterSet p;
    CHECK(p.negative.porosity == 0.3);
    CHECK(p.separator.porosity == 1.0);
    CHECK(p.positive.porosity == 0.3);
    CHECK(p.negative.max_concentration == 2.4983e4);
    CHECK(p.positive.max_concentration == 5.1218e4);
    CHECK(p.negative.conductivity == 100.0);
    CHECK(p.positive.conductivity == 10.0);
    CHECK(p.negative.diffusivity == 3.9e-14);
    CHECK(p.positive.diffusivity == 1e-13);
    CHECK(p.negative.particle_radius == 10e-6);
    CHECK(p.positive.particle_radius == 10e-6);
    CHECK(p.negative.surface_area == 0.18e6);
    CHECK(p.positive.surface_area == 0.15e6);
    CHECK(p.negative.reaction_rate == 2e-5);
    CHECK(p.positive.reaction_rate == 6e-7);
    CHECK(p.negative.thickness == 100e-6);
    CHECK(p.separator.thickness == 25e-6);
    CHECK(p.positive.thickness == 100e-6);
    CHECK(p.negative.reference_ocp == 0.18);
    CHECK(p.positive.reference_ocp == 3.94);
    CHECK(p.electrolyte_concentration == 1e3);
    CHECK(p.electrolyte_diffusivity == 5.34e-10);
    CHECK(p.electrolyte_conductivity == 1.1);
    CHECK(p.faraday == 96485.0);
    CHECK(p.gas_constant == 8.314472);
    CHECK(p.temperature == 298.15);
    CHECK(p.bruggeman == 1.5);
    CHECK(p.transference == 0.4);
    CHECK(p.typical_current == 24.0);
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("parameter validation rejects unphysical values") {
    ParameterSet p;
    p.negative.porosity = 1.2;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = {};
    p.transference = 1.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = {};
    p.positive.particle_radius = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("parameter text round-trips bit-exactly") {
    const ParameterSet defaults;
    CHECK(parse_parameters(to_config_text(defaults)) == defaults);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    ParameterSet p;
    p.negative.diffusivity *= u(rng);
    p.electrolyte_conductivity *= u(rng);
    p.positive.reaction_rate = 1.0 / 3.0 * 1e-6;
    const auto back = parse_parameters(to_config_text(p));
    CHECK(back == p);
}

TEST_CASE("parameter parsing errors") {
    CHECK_THROWS_AS(parse_parameters("n_porosity = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_parameters("nonsense_key = 1\n"), ConfigError);
    const auto p = parse_parameters("# override\ntemperature = 300\n");
    CHECK(p.temperature == 300.0);
    CHECK(p.negative.porosity == 0.3);
}

TEST_CASE("ocp reference points and domain") {
    CHECK(ocp(Electrode::negative, negative_reference_stoichiometry) == doctest::Approx(0.18).epsilon(0.01));
    CHECK(ocp(Electrode::positive, positive_reference_stoichiometry) == doctest::Approx(3.94).epsilon(0.001));
    CHECK_THROWS_AS(ocp(Electrode::negative, -0.01), DomainError);
    CHECK_THROWS_AS(ocp(Electrode::positive, 1.01), DomainError);
    CHECK_THROWS_AS(ocp(Electrode::positive, std::nan("")), DomainError);
    for (double x = 0.0; x <= 1.0; x += 0.01) {
        CHECK(std::isfinite(ocp(Electrode::negative, x)));
        CHECK(std::isfinite(ocp(Electrode::positive, x)));
    }
}

TEST_CASE("exchange current density") {
    const double j0 = exchange_current_density(2e-5, 1.24915e4, 2.4983e4, 1000.0);
    CHECK(j0 == doctest::Approx(7.90).epsilon(0.001));
    CHECK(exchange_current_density(2e-5, 0.0, 2.4983e4, 1000.0) == 0.0);
    CHECK(exchange_current_density(2e-5, 2.4983e4, 2.4983e4, 1000.0) == 0.0);
    CHECK_THROWS_AS(exchange_current_density(2e-5, -1.0, 2.4983e4, 1000.0), DomainError);
    CHECK_THROWS_AS(exchange_current_density(2e-5, 10.0, 2.4983e4, -1.0), DomainError);

    // symmetric under c -> c_max - c
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 2.4983e4);
    for (int i = 0; i < 100; ++i) {
        const double c = u(rng);
        const double a = exchange_current_density(2e-5, c, 2.4983e4, 900.0);
        const double b = exchange_current_density(2e-5, 2.4983e4 - c, 2.4983e4, 900.0);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("reaction overpotential") {
    CHECK(reaction_overpotential(0.0, 1.8e5, 1e-4, 7.90, kVt) == 0.0);
    const double eta = reaction_overpotential(24.0, 1.8e5, 1e-4, 7.90, kVt);
    CHECK(rel(eta, -8.63e-3) < 1e-3);
    CHECK(reaction_overpotential(-24.0, 1.8e5, 1e-4, 7.90, kVt) == doctest::Approx(-eta).epsilon(1e-14));
    CHECK_THROWS_AS(reaction_overpotential(1.0, 1.8e5, 1e-4, 0.0, kVt), DomainError);
}

TEST_CASE("concentration overpotential") {
    const ParameterSet p;
    CHECK(concentration_overpotential(1000.0, 1000.0, 0.4, p) == 0.0);
    CHECK(concentration_overpotential(990.0, 1010.0, 1.0, p) == 0.0);
    CHECK(rel(concentration_overpotential(990.0, 1010.0, 0.4, p), -6.17e-4) < 1e-3);
}

TEST_CASE("ohmic losses") {
    const ParameterSet p;
    const auto zero = ohmic_losses(0.0, p);
    CHECK(zero.electrolyte == 0.0);
    CHECK(zero.solid == 0.0);
    const auto one_c = ohmic_losses(24.0, p);
    CHECK(rel(one_c.electrolyte, -9.40e-3) < 1e-3);
    CHECK(rel(one_c.solid, -8.8e-5) < 1e-3);
    // exactly linear in I
    const auto half = ohmic_losses(12.0, p);
    CHECK(2.0 * half.electrolyte == one_c.electrolyte);
    CHECK(2.0 * half.solid == one_c.solid);
}

TEST_CASE("terminal voltage at rest is the open-circuit voltage") {
    const ParameterSet p;
    for (double sn : {0.2, 0.5, 0.8}) {
        for (double sp : {0.5, 0.7, 0.9}) {
            const ElectrodeReadout r{sn * p.negative.max_concentration, sp * p.positive.max_concentration, 1000.0,
                                     1000.0};
            const auto v = terminal_voltage(r, 0.0, 0.4, p);
            CHECK(v.total == ocp(Electrode::positive, sp) - ocp(Electrode::negative, sn));
            CHECK(v.reaction == 0.0);
            CHECK(v.concentration == 0.0);
            CHECK(v.electrolyte_ohmic == 0.0);
            CHECK(v.solid_ohmic == 0.0);
        }
    }
}

TEST_CASE("terminal voltage at 1C matches an independent component sum") {
    const ParameterSet p;
    const double sn = 0.55, sp = 0.66;
    const double cn = sn * 2.4983e4, cp = sp * 5.1218e4;
    const double cen = 1010.0, cep = 990.0;
    const double i = 24.0;
    const auto v = terminal_voltage({cn, cp, cen, cep}, i, 0.4, p);

    const double j0n = 2e-5 * std::sqrt(cn * (2.4983e4 - cn) * cen);
    const double j0p = 6e-7 * std::sqrt(cp * (5.1218e4 - cp) * cep);
    const double reaction = -2.0 * kVt * (std::asinh(i / (1.5e5 * j0p * 1e-4)) + std::asinh(i / (1.8e5 * j0n * 1e-4)));
    const double conc = 2.0 * kVt / 1000.0 * 0.6 * (cep - cen);
    const double e15 = std::pow(0.3, 1.5);
    const double elec = -i / 1.1 * (1e-4 / (3.0 * e15) + 25e-6 + 1e-4 / (3.0 * e15));
    const double solid = -i / 3.0 * (1e-4 / 10.0 + 1e-4 / 100.0);
    const double ueq = ocp(Electrode::positive, sp) - ocp(Electrode::negative, sn);

    CHECK(v.reaction == doctest::Approx(reaction).epsilon(1e-12));
    CHECK(v.concentration == doctest::Approx(conc).epsilon(1e-12));
    CHECK(v.electrolyte_ohmic == doctest::Approx(elec).epsilon(1e-12));
    CHECK(v.solid_ohmic == doctest::Approx(solid).epsilon(1e-12));
    CHECK(v.total == doctest::Approx(ueq + reaction + conc + elec + solid).epsilon(1e-12));
    // discharge lowers the voltage below open circuit
    CHECK(v.total < ueq);
    CHECK(v.reaction < 0.0);
}

TEST_CASE("voltage breakdown sums exactly and the kernel agrees") {
    const ParameterSet p;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> sto(0.05, 0.95), ce(500.0, 1500.0), cur(-48.0, 48.0), tp(0.1, 0.9);
    for (int k = 0; k < 1000; ++k) {
        const ElectrodeReadout r{sto(rng) * p.negative.max_concentration, sto(rng) * p.positive.max_concentration,
                                 ce(rng), ce(rng)};
        const double i = cur(rng);
        const double t = tp(rng);
        const auto v = terminal_voltage(r, i, t, p);
        const double sum = v.open_circuit + v.reaction + v.concentration + v.electrolyte_ohmic + v.solid_ohmic;
        CHECK(std::abs(v.total - sum) <= 1e-12);
        CHECK(VoltageKernel(p, t)(r, i) == doctest::Approx(v.total).epsilon(1e-13));

        // reaction term is odd in I; eta_c flips with the electrolyte gradient
        CHECK(terminal_voltage(r, -i, t, p).reaction == doctest::Approx(-v.reaction).epsilon(1e-12));
        const ElectrodeReadout mirrored{r.surface_negative, r.surface_positive, r.electrolyte_positive,
                                        r.electrolyte_negative};
        const auto w = terminal_voltage(mirrored, -i, t, p);
        CHECK(w.concentration == doctest::Approx(-v.concentration).epsilon(1e-12));
        CHECK(w.electrolyte_ohmic == -v.electrolyte_ohmic);
        CHECK(w.solid_ohmic == -v.solid_ohmic);
    }
}

TEST_CASE("terminal voltage propagates domain errors") {
    const ParameterSet p;
    CHECK_THROWS_AS(terminal_voltage({-1.0, 2e4, 1000.0, 1000.0}, 1.0, 0.4, p), DomainError);
    CHECK_THROWS_AS(terminal_voltage({0.0, 2e4, 1000.0, 1000.0}, 1.0, 0.4, p), DomainError);
}
