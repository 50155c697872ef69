import sys
from pathlib import Path

import pytest

from slowrate import catalog_get

sys.path.insert(0, str(Path(__file__).parent))

# canonical parameter choices used whenever a test iterates the whole catalog
CATALOG_SAMPLES = (
    ("indicator_zero", ()),
    ("abs", ()),
    ("power_q", (1.5,)),
    ("power_q", (2.0,)),
    ("power_q", (3.0,)),
    ("power_p_scaled", (1.5,)),
    ("power_p_scaled", (2.0,)),
    ("power_p_scaled", (3.0,)),
    ("circle", (1.0,)),
    ("exp_abs", ()),
    ("cosh_shifted", ()),
    ("flat", ()),
)

# entries with a differentiable interior (everything except the kinky pair)
SMOOTH_SAMPLES = tuple(s for s in CATALOG_SAMPLES if s[0] not in ("indicator_zero", "abs"))


@pytest.fixture(params=CATALOG_SAMPLES, ids=lambda s: f"{s[0]}{list(s[1])}")
def catalog_function(request):
    name, params = request.param
    return catalog_get(name, *params)


@pytest.fixture(params=SMOOTH_SAMPLES, ids=lambda s: f"{s[0]}{list(s[1])}")
def smooth_function(request):
    name, params = request.param
    return catalog_get(name, *params)


def catalog_all():
    return [catalog_get(name, *params) for name, params in CATALOG_SAMPLES]
