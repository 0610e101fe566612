import numpy as np
import pytest

from surfloss.core import REGIONS
from surfloss.ingest import bundled_matrix
from surfloss.reference import reference_tangents


@pytest.fixture
def tin():
    return bundled_matrix("tin")


@pytest.fixture
def tin_truth():
    return reference_tangents("tin")


def as_vector(d):
    return np.array([d[r] for r in REGIONS])
