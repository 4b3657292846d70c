import os

from hypothesis import HealthCheck, settings

from fadingrate.channel import DEFAULT_SEED, McConfig

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

MILLION = 1_000_000


def mc(samples=100_000, seed=DEFAULT_SEED, workers=1):
    return McConfig(samples, seed, workers)
