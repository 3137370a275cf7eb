import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "fiboot",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    max_examples=60,
)
settings.load_profile("fiboot")


def acceptance_workers() -> int:
    env = os.environ.get("FIBOOT_TEST_WORKERS")
    if env:
        return max(1, int(env))
    return max(1, min(2, os.cpu_count() or 1))
