import numpy as np
import pytest

from aitvseg import MultiChannelImage


def two_region_image(size: int, radius: int, lo: float = 0.15, hi: float = 0.85):
    """Disk on a contrasting background, plus its ground-truth label map."""
    ii, jj = np.mgrid[0:size, 0:size]
    mask = (ii - size // 2) ** 2 + (jj - size // 2) ** 2 <= radius**2
    image = np.where(mask, hi, lo)
    labels = np.where(mask, 2, 1)
    return image, labels


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def disk64():
    return two_region_image(64, 20)


@pytest.fixture
def gray_image(disk64):
    return MultiChannelImage.grayscale(disk64[0])
