import numpy as np
import pytest

from polarsim.codebook import PolarCode, construct_code
from polarsim.numerics import QuantScheme


@pytest.fixture
def code8():
    """N=8, K=4 code; frozen set {0, 1, 2, 4}."""
    return construct_code(3, 4)


@pytest.fixture
def code8_k1():
    """N=8 code whose only information bit is index 7."""
    mask = np.ones(8, dtype=bool)
    mask[7] = False
    return PolarCode(n=3, K=1, frozen_mask=mask)


@pytest.fixture
def scheme():
    return QuantScheme(6, 3, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def noisy_raw_llrs(code, scheme, rng, sigma=0.8, u=None):
    """A random codeword through BPSK/AWGN, channel-quantized."""
    from polarsim.codebook import encode
    from polarsim.numerics import quantize_channel_array

    if u is None:
        u = rng.integers(0, 2, size=code.K, dtype=np.uint8)
    x = encode(code, u)
    y = 1.0 - 2.0 * x + rng.normal(0.0, sigma, size=code.N)
    return quantize_channel_array(2.0 * y / sigma**2, scheme)
