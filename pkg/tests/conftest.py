import numpy as np
import pytest

from iat.synthetic import efficientnet_style, flat_singles, random_cnn, rexnet_style


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def fixture_networks() -> list:
    """Deterministic descriptor collection spanning the builder families."""
    gen = np.random.default_rng(7)
    nets = [
        efficientnet_style("eff_small"),
        efficientnet_style("eff_wide", stem_ch=48, stage_widths=(24, 48, 88, 120), stage_depths=(1, 2, 3, 2)),
        rexnet_style("rex_small"),
        rexnet_style("rex_wide", stem_ch=40, widths=(20, 34, 48, 64, 80, 96)),
        flat_singles("flat_a", n_convs=3, ch=16),
        flat_singles("flat_b", n_convs=5, ch=12),
    ]
    nets += [random_cnn(gen, name=f"rand_{i}") for i in range(6)]
    return nets
