import pytest
from hypothesis import HealthCheck, settings

from polarpark import load_preset, preset_names, run_scenario

# sandbox CI boxes are slow enough to trip the per-example deadline
settings.register_profile("repo", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def preset_runs():
    """Every bundled preset integrated once, shared across the whole session.

    Maps preset name -> list of (scenario, trajectory) in file order. The
    fig5 runs dominate the cost (about 2 s each), so nothing may mutate the
    returned trajectories.
    """
    out = {}
    for name in preset_names():
        preset = load_preset(name)
        out[name] = [(sc, run_scenario(sc)) for sc in preset.scenarios]
    return out
