from __future__ import annotations

import numpy as np
import pytest

from memerk.resolvent import KernelSpec


@pytest.fixture(params=["riesz-1.25", "riesz-1.75", "exp-2"])
def kernel(request):
    kind, val = request.param.split("-")
    return KernelSpec.riesz(float(val)) if kind == "riesz" else KernelSpec.exponential(float(val))


def eigs(n):
    return (np.arange(1, n + 1) * np.pi) ** 2
