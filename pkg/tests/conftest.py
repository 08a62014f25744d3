import hypothesis

# deterministic examples, no deadline: popcount-heavy cases vary too
# much in wall time for per-example budgets to be meaningful
hypothesis.settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    max_examples=60,
)
hypothesis.settings.load_profile("suite")
