import math
import sys

import numpy as np
import pytest

from hybrid_irs.channel import ScenarioConfig, build_channels
from hybrid_irs.convex_kernel import BACKENDS
from hybrid_irs.irs_model import IrsLayout


@pytest.fixture
def headline_cfg():
    return ScenarioConfig()


@pytest.fixture
def headline_channels(headline_cfg):
    return build_channels(headline_cfg)


@pytest.fixture
def headline_layout(headline_cfg):
    return IrsLayout.hybrid(headline_cfg.M, headline_cfg.M_a, headline_cfg.beta_max)


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return request.param


def random_scenario(rng, N, M, M_a=None, near=False):
    """Random but valid scenario; ``near`` puts everything within tens of meters."""
    dmax = 40.0 if near else 250.0
    kw = dict(
        N=N,
        M=M,
        M_a=M_a if M_a is not None else int(rng.integers(1, M // 2 + 1)),
        theta_sr=float(rng.uniform(0.1, math.pi - 0.1)),
        theta_sb=float(rng.uniform(0.1, math.pi - 0.1)),
        d_sr=float(rng.uniform(3.0, dmax)),
        d_sb=float(rng.uniform(3.0, dmax)),
        P_dBm=float(rng.uniform(10.0, 30.0)),
        Pr_max_dBm=float(rng.uniform(-30.0, 30.0)),
        sigma_b2_dBm=float(rng.uniform(-90.0, -60.0)),
        sigma_r2_dBm=float(rng.uniform(-90.0, -50.0)),
        beta_max=float(10 ** rng.uniform(0.0, 4.0)),
    )
    return ScenarioConfig(**kw)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(cid))
