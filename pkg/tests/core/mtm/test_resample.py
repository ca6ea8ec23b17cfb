import numpy as np
import pytest

from terranalog.core.mtm import (
    choose_target_resolution,
    mae_resample,
    resample_profile,
    resample_sequence,
)
from terranalog.core.raster import PlantedValley, SynthSpec, synth_terrain
from terranalog.core.raster.reference import reference_candidate
from terranalog.core.twc import SliceSequence, slice_decompose
from terranalog.exception import StageInputError

V_PROFILE = [0.0, -1.0, -2.0, -1.0, 0.0]


def test_resample_profile_interpolates():
    np.testing.assert_allclose(resample_profile([0.0, 10.0], 3), [0.0, 5.0, 10.0])


@pytest.mark.parametrize(
    "profile, target_n, message",
    [
        ([1.0], 3, "Profiles need at least 2 points, got 1."),
        ([1.0, 2.0], 1, "Target resolution must be at least 2, got 1."),
    ],
)
def test_resample_rejects_degenerate_input(profile, target_n, message):
    with pytest.raises(StageInputError) as e:
        resample_profile(profile, target_n)
    assert message == str(e.value)


class TestMaeResample:
    def test_linear_profile_has_no_deviation(self):
        result = mae_resample(np.linspace(5.0, 50.0, 12), 2)
        assert result.deviation == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(result.values, [5.0, 50.0])

    def test_deviation_is_relative_to_span(self):
        # two points flatten the V; mean |error| is 0.8 over a span of 2
        assert mae_resample(V_PROFILE, 2).deviation == pytest.approx(0.4)

    def test_vertex_sample_reconstructs_exactly(self):
        assert mae_resample(V_PROFILE, 3).deviation == pytest.approx(0.0, abs=1e-12)

    def test_reject_constant_profile(self):
        with pytest.raises(StageInputError) as e:
            mae_resample([3.0, 3.0, 3.0], 2)
        assert "Profile has zero span; deviation is undefined." == str(e.value)


class TestChooseTargetResolution:
    def test_smallest_resolution_meeting_bound(self):
        ref = SliceSequence.from_values([V_PROFILE, [-x for x in V_PROFILE]])
        assert choose_target_resolution(ref, bound=0.015) == 3

    def test_linear_slices_need_two_points(self):
        ref = SliceSequence.from_values([[0.0, 1.0, 2.0, 3.0], [4.0, 3.0, 2.0, 1.0]])
        assert choose_target_resolution(ref) == 2

    def test_constant_slices_are_ignored(self):
        ref = SliceSequence.from_values([[7.0] * 6, [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]])
        assert choose_target_resolution(ref) == 2
        flat = SliceSequence.from_values([[7.0] * 6, [1.0] * 6])
        assert choose_target_resolution(flat) == 2

    def test_falls_back_to_native_width(self):
        ref = SliceSequence.from_values([[0.0, 1.0, 0.0, 1.0, 0.0, 1.0]])
        assert choose_target_resolution(ref, bound=0.0) == 6


def test_resample_sequence():
    seq = SliceSequence.from_values([V_PROFILE, V_PROFILE], along_spacing=30.0)

    assert resample_sequence(seq, 5) is seq
    down = resample_sequence(seq, 3)
    assert down.slice_width == 3
    assert down.along_spacing == 30.0
    np.testing.assert_allclose(down.slices, [[0.0, -2.0, 0.0]] * 2)


@pytest.mark.parametrize("seed", [0, 5, 11])
def test_chosen_resolution_bounds_every_reference_slice(seed):
    valley = PlantedValley((20.0, 2.0), (20.0, 97.0), depth=300.0, width=1200.0)
    spec = SynthSpec(size=(41, 100), roughness=10.0, valleys=(valley,))
    ref = slice_decompose(reference_candidate(synth_terrain(spec, seed)), width=38)
    profiles = ref.slices[np.ptp(ref.slices, axis=1) > 0]
    target_n = choose_target_resolution(ref, bound=0.015)

    assert len(profiles) > 0
    assert all(mae_resample(p, target_n).deviation <= 0.015 for p in profiles)
    if target_n > 2:
        # one point fewer breaks the bound somewhere
        assert any(mae_resample(p, target_n - 1).deviation > 0.015 for p in profiles)
