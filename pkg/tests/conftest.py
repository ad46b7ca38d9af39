import numpy as np
import pytest

from raptorkit.degrees import LdpcEnsemble
from raptorkit.design import DesignConfig, optimize_distribution, sweep_alpha
from raptorkit.jfunction import channel_from_sigma
from raptorkit.transfer import TransferFunction, threshold_xp

REF_SIGMA = 0.9787
SWEEP_GRID = (6.0, 7.0, 8.0, 10.0, 12.0, 15.0, 18.0, 21.0, 25.0, 30.0)


@pytest.fixture(scope="session")
def ref_channel():
    return channel_from_sigma(REF_SIGMA)


@pytest.fixture(scope="session")
def reg_3_60():
    return LdpcEnsemble.regular(3, 60)


@pytest.fixture(scope="session")
def transfer_3_60(reg_3_60):
    return TransferFunction.analytic_ldpc(reg_3_60)


@pytest.fixture(scope="session")
def xp_3_60(transfer_3_60, reg_3_60):
    return threshold_xp(transfer_3_60, reg_3_60, tol=1e-4).x_p


@pytest.fixture(scope="session")
def ref_design(ref_channel):
    """The reference design at the reference operating point: capacity-0.5
    channel, no precode help, alpha 21, delta 0.04."""
    cfg = DesignConfig(channel=ref_channel, transfer=TransferFunction.null(),
                       alpha_grid=(21.0,), delta=0.04, strict_margin=1e-4)
    result = optimize_distribution(cfg, 21.0)
    assert result.feasible and result.verified
    return cfg, result


@pytest.fixture(scope="session")
def null_sweep(ref_channel):
    cfg = DesignConfig(channel=ref_channel, transfer=TransferFunction.null(),
                       alpha_grid=SWEEP_GRID, delta=0.04, strict_margin=1e-4)
    return sweep_alpha(cfg)


@pytest.fixture(scope="session")
def jd_sweep(ref_channel, transfer_3_60, xp_3_60):
    cfg = DesignConfig(channel=ref_channel, transfer=transfer_3_60, x_p=xp_3_60,
                       alpha_grid=SWEEP_GRID, delta_policy="auto", strict_margin=1e-4)
    return sweep_alpha(cfg)


@pytest.fixture()
def rng():
    return np.random.default_rng(0xC0FFEE)
