"""Shared helpers for the test suite."""

import numpy as np


def near_zero_close(lhs, rhs, rel, abs_=1e-12, floor=1e-10):
    """Relative comparison, switching to absolute when both sides are tiny."""
    if abs(lhs) + abs(rhs) < floor:
        return abs(lhs - rhs) <= abs_
    return abs(lhs - rhs) / (abs(lhs) + abs(rhs)) <= rel


def lattice_margin(args, nome, depth=40):
    """Smallest |1 - p^j q^k x^{±1}| over j, k < depth and the given arguments.

    Zeros and poles of theta and of the elliptic gamma function all sit on
    this lattice, so a positive margin keeps relative residuals meaningful.
    """
    j = np.arange(depth)
    lat = (nome.p ** j[:, None] * nome.q ** j[None, :]).ravel()
    worst = np.inf
    for x in np.atleast_1d(np.asarray(args, dtype=complex)):
        worst = min(worst, np.min(np.abs(1 - lat * x)), np.min(np.abs(1 - lat / x)))
    return worst


#: Lines printed by the acceptance criteria, echoed again in the terminal summary.
RESULTS = []
