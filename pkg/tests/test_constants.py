import numpy as np
import pytest
import gridinertia.constants as constants


class TestUnitConversions(object):

    def test_hundred_mw_is_one_pu(self):
        assert constants.mw_to_pu(100.) == pytest.approx(1.)
        assert constants.mw_to_pu(-250., base_mva=50.) == pytest.approx(-5.)

    def test_pu_to_mw_inverts_mw_to_pu(self):
        powers = np.array([-120., 0., 35.5])
        back = constants.pu_to_mw(constants.mw_to_pu(powers, 200.), 200.)
        np.testing.assert_allclose(back, powers)

    def test_frequency_conversion(self):
        assert constants.hz_to_rad_per_s(1.) == pytest.approx(2 * np.pi)
        assert constants.rad_per_s_to_hz(constants.hz_to_rad_per_s(50.)) == pytest.approx(50.)

    def test_sync_threshold_in_rad_per_s(self):
        assert constants.SYNC_THRESHOLD == pytest.approx(2 * np.pi * 1e-3)


def test_default_gain_axis_contains_anchors():
    axis = constants.default_gain_axis()
    assert len(axis) == 12
    assert 5. in axis and 10. in axis
    assert axis[0] == pytest.approx(0.1)
    assert axis[-1] == pytest.approx(50.)
    assert list(axis) == sorted(axis)
