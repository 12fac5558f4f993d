"""Shared fixtures: small deterministic scenes and synthetic streams.

Expensive synthesized objects are session-scoped so the property suites
can share them.
"""

import numpy as np
import pytest

from trtrack.channel import Cir, generate_scene, synthesize_cirs


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def small_scene():
    """Cheap 50-scatterer scene for structural tests."""
    return generate_scene(seed=3, n_scatterers=50, region_side=7.5,
                          tx_rx_separation=30.0, carrier_f0=5.8e9,
                          bandwidth=500e6)


@pytest.fixture(scope="session")
def nlos_scene():
    """Direct path disabled: pure scattered field around the focal spot."""
    return generate_scene(seed=5, n_scatterers=200, region_side=7.5,
                          tx_rx_separation=30.0, carrier_f0=5.8e9,
                          bandwidth=500e6, include_direct_path=False)


def random_cir(rng, n_taps=32, timestamp=0.0):
    taps = rng.standard_normal(n_taps) + 1j * rng.standard_normal(n_taps)
    return Cir(taps=taps, timestamp=timestamp)


@pytest.fixture(scope="session")
def straight_line_cirs(nlos_scene):
    """1 m/s walk along +x over 2 wavelengths at the 5 ms cadence."""
    lam = nlos_scene.wavelength
    ts = np.arange(0.0, 2.0 * lam / 1.0, 5e-3)
    positions = np.column_stack([ts * 1.0, np.zeros_like(ts)])
    return synthesize_cirs(nlos_scene, positions, ts)
