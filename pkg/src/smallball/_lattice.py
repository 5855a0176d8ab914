"""Integer searches for the truncation indices nu, eta, zeta and eta-bar."""

from ._validation import DomainError

LATTICE_CAP = 1 << 40


def largest_admissible(ok, cap=LATTICE_CAP):
    """Largest n >= 1 with ok(n), assuming ok is true on an initial segment."""
    if not ok(1):
        raise DomainError("no admissible index: the defining inequality already fails at n = 1")
    lo, hi = 1, 2
    while ok(hi):
        lo, hi = hi, 2 * hi
        if hi > cap:
            raise DomainError(
                "defining inequality holds beyond n = 2^40; the scaling function does not grow"
            )
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def smallest_admissible(ok, cap=LATTICE_CAP):
    """Smallest n >= 1 with ok(n), assuming ok is true on a final segment; None if none <= cap."""
    if ok(1):
        return 1
    lo, hi = 1, 2
    while not ok(hi):
        lo, hi = hi, 2 * hi
        if hi > cap:
            return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi
