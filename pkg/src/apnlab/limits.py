"""Size caps for exhaustive computations.

Exhaustive sweeps (APN checks, bent scans, root scans) are capped at
n <= 16 by default.  ``override_caps=True`` or the TOOL_MAX_N environment
variable lifts the cap.
"""

import os

DEFAULT_EXHAUSTIVE_N = 16
ENV_VAR = "TOOL_MAX_N"


class CapExceeded(ValueError):
    pass


def check_exhaustive(n: int, override_caps: bool = False, cap: int = DEFAULT_EXHAUSTIVE_N):
    raw = os.environ.get(ENV_VAR)
    limit = max(cap, int(raw)) if raw else cap
    if n > limit and not override_caps:
        raise CapExceeded(f"n={n} exceeds the cap {limit}; pass override_caps or set {ENV_VAR}")
