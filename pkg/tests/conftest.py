from hypothesis import settings

# replayable CI runs: same generated examples every time
settings.register_profile("deterministic", derandomize=True, deadline=None)
settings.load_profile("deterministic")
