import numpy as np
import pytest

from thermorl import (
    NO_PATH,
    BuildingModel,
    ConfigurationError,
    HeatInputs,
    StabilityError,
    derivative,
    max_stable_dt,
    step,
)


def single_zone(c=1000.0, r=2.0):
    return BuildingModel(
        capacitance=[c],
        resistance=[[NO_PATH]],
        outdoor_resistance=[r],
    )


def zero_inputs(outdoor=10.0):
    return HeatInputs(
        controlled=[0.0], occupant=[0.0], solar=[0.0], outdoor_temp=outdoor
    )


class TestValidation:
    def test_non_positive_capacitance(self):
        with pytest.raises(ConfigurationError):
            BuildingModel(capacitance=[0.0], resistance=[[NO_PATH]],
                          outdoor_resistance=[2.0])

    def test_asymmetric_resistance(self):
        with pytest.raises(ConfigurationError):
            BuildingModel(
                capacitance=[1.0, 1.0],
                resistance=[[NO_PATH, 1.0], [2.0, NO_PATH]],
                outdoor_resistance=[1.0, 1.0],
            )

    def test_negative_resistance(self):
        with pytest.raises(ConfigurationError):
            BuildingModel(
                capacitance=[1.0, 1.0],
                resistance=[[NO_PATH, -1.0], [-1.0, NO_PATH]],
                outdoor_resistance=[1.0, 1.0],
            )

    def test_shape_mismatch(self):
        with pytest.raises(ConfigurationError):
            BuildingModel(capacitance=[1.0, 2.0], resistance=[[NO_PATH]],
                          outdoor_resistance=[1.0])

    def test_isolated_zone_rejected(self):
        # second zone has no internal link and no outdoor link
        with pytest.raises(ConfigurationError, match="z1"):
            BuildingModel(
                capacitance=[1.0, 1.0],
                resistance=[[NO_PATH, NO_PATH], [NO_PATH, NO_PATH]],
                outdoor_resistance=[1.0, NO_PATH],
                zone_names=("z0", "z1"),
            )

    def test_single_zone_needs_outdoor_link(self):
        with pytest.raises(ConfigurationError):
            BuildingModel(capacitance=[1.0], resistance=[[NO_PATH]],
                          outdoor_resistance=[NO_PATH])

    def test_internal_chain_without_outdoor_is_allowed(self):
        model = BuildingModel(
            capacitance=[1.0, 1.0, 1.0],
            resistance=[
                [NO_PATH, 1.0, NO_PATH],
                [1.0, NO_PATH, 1.0],
                [NO_PATH, 1.0, NO_PATH],
            ],
            outdoor_resistance=[NO_PATH, NO_PATH, NO_PATH],
        )
        assert model.num_zones == 3

    def test_arrays_read_only(self):
        model = single_zone()
        with pytest.raises(ValueError):
            model.capacitance[0] = 5.0


class TestDerivative:
    def test_pure_exponential_pull(self):
        # C dT/dt = (Te - T)/R with T=20, Te=10, R=2, C=1000
        model = single_zone()
        d = derivative(model, [20.0], zero_inputs())
        assert d == pytest.approx(-0.005, abs=1e-15)

    def test_heat_sources_add(self):
        model = single_zone()
        inputs = HeatInputs(controlled=[50.0], occupant=[30.0], solar=[20.0],
                            outdoor_temp=10.0)
        d = derivative(model, [20.0], inputs)
        assert d == pytest.approx((-5.0 + 100.0) / 1000.0, abs=1e-15)

    def test_pairwise_flow_conserves_energy(self):
        model = BuildingModel(
            capacitance=[100.0, 300.0],
            resistance=[[NO_PATH, 2.0], [2.0, NO_PATH]],
            outdoor_resistance=[NO_PATH, 1.0],
        )
        inputs = HeatInputs(controlled=[0.0, 0.0], occupant=[0.0, 0.0],
                            solar=[0.0, 0.0], outdoor_temp=15.0)
        temps = np.array([25.0, 15.0])
        # outdoor at 15 and zone 1 at 15: only the internal link moves heat
        d = derivative(model, temps, inputs)
        assert model.capacitance @ d == pytest.approx(0.0, abs=1e-12)

    def test_ground_path(self):
        model = BuildingModel(
            capacitance=[500.0],
            resistance=[[NO_PATH]],
            outdoor_resistance=[5.0],
            ground_resistance=[4.0],
        )
        inputs = HeatInputs(controlled=[0.0], occupant=[0.0], solar=[0.0],
                            outdoor_temp=20.0, ground_temp=12.0)
        d = derivative(model, [20.0], inputs)
        assert d == pytest.approx((12.0 - 20.0) / 4.0 / 500.0, abs=1e-15)

    def test_rejects_non_finite_temps(self):
        with pytest.raises(ConfigurationError):
            derivative(single_zone(), [np.nan], zero_inputs())


class TestStability:
    def test_bound_is_c_over_conductance(self):
        assert max_stable_dt(single_zone(c=1000.0, r=2.0)) == pytest.approx(2000.0)

    def test_step_above_bound_raises(self):
        model = single_zone()
        with pytest.raises(StabilityError) as excinfo:
            step(model, [20.0], zero_inputs(), dt=2001.0)
        assert excinfo.value.max_dt_s == pytest.approx(2000.0)

    def test_error_names_binding_zone(self):
        model = BuildingModel(
            capacitance=[1000.0, 10.0],
            resistance=[[NO_PATH, 2.0], [2.0, NO_PATH]],
            outdoor_resistance=[2.0, NO_PATH],
            zone_names=("big", "small"),
        )
        with pytest.raises(StabilityError, match="small"):
            step(model, [20.0, 20.0], zero_inputs(), dt=100.0)

    def test_non_positive_dt_rejected(self):
        with pytest.raises(ConfigurationError):
            step(single_zone(), [20.0], zero_inputs(), dt=0.0)


class TestStep:
    def test_explicit_euler_formula(self):
        model = single_zone()
        inputs = zero_inputs()
        temps = np.array([20.0])
        out = step(model, temps, inputs, dt=100.0)
        expected = temps + 100.0 * derivative(model, temps, inputs)
        assert out == pytest.approx(expected, abs=0.0)

    def test_accepts_plain_lists(self):
        out = step(single_zone(), [20.0], zero_inputs(), dt=1.0)
        assert out.shape == (1,)

    def test_converges_to_exponential(self):
        # T(t) = Te + (T0 - Te) exp(-t / (R C))
        model = single_zone(c=1000.0, r=2.0)
        inputs = zero_inputs(outdoor=10.0)
        temps = np.array([20.0])
        dt = 1.0
        for k in range(1, 501):
            temps = step(model, temps, inputs, dt)
        exact = 10.0 + 10.0 * np.exp(-500.0 / 2000.0)
        assert temps[0] == pytest.approx(exact, abs=0.05)

    def test_two_zone_equilibrium(self):
        model = BuildingModel(
            capacitance=[1000.0, 1000.0],
            resistance=[[NO_PATH, 1.0], [1.0, NO_PATH]],
            outdoor_resistance=[2.0, 2.0],
        )
        inputs = HeatInputs(controlled=[0.0, 0.0], occupant=[0.0, 0.0],
                            solar=[0.0, 0.0], outdoor_temp=15.0)
        temps = np.array([15.0, 15.0])
        out = step(model, temps, inputs, dt=10.0)
        assert out == pytest.approx([15.0, 15.0], abs=0.0)
