import numpy as np
import pytest

import refocus as r


def smooth_image(shape):
    """Deterministic smooth test image with nonflat borders."""
    return r.low_frequency_scene(shape)


def rough_image(shape, seed=5):
    """Smooth image plus a small deterministic rough component."""
    return smooth_image(shape) + 0.05 * r.standard_normal_field(seed, shape)


@pytest.fixture
def gauss11():
    return r.gaussian_mask((1, 1), 1.0)


@pytest.fixture
def gauss22():
    return r.gaussian_mask((2, 2), 1.0)


@pytest.fixture
def cross_mask():
    return r.mask_from_weights(
        [[0.0, 0.125, 0.0], [0.125, 0.5, 0.125], [0.0, 0.125, 0.0]]
    )


@pytest.fixture
def mix_matrix():
    return r.ColorMixing(
        np.array([[0.7, 0.2, 0.1], [0.25, 0.5, 0.25], [0.15, 0.1, 0.75]])
    )
