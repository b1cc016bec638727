"""First-moment exponents for pairs of near-optimal solutions.

All exponents use natural logarithms. The clique exponent is the bracket
multiplying log2(N)^2, returned as-is.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

LN2 = math.log(2.0)
ROOT_BOUNDARY = 1.0 + 1.0 / math.sqrt(2.0)


def binary_entropy(q: float) -> float:
    """-q ln q - (1-q) ln(1-q), exactly 0 at the endpoints."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q={q} outside [0, 1]")
    if q == 0.0 or q == 1.0:
        return 0.0
    return -q * math.log(q) - (1.0 - q) * math.log1p(-q)


def npp_pair_exponent(alpha: float, rho: float) -> float:
    """Growth rate per n of the expected number of ordered partition pairs at
    overlap ``rho`` both reaching value sqrt(n) 2^(-alpha n).

    ln 2 (first partition) + H((1-rho)/2) (second at that overlap)
    - 2 alpha ln 2 (both values inside the window).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"rho={rho} outside [-1, 1]")
    return LN2 + binary_entropy((1.0 - rho) / 2.0) - 2.0 * alpha * LN2


def bisect(fn, lo: float, hi: float, tol: float = 1e-10, max_iter: int = 200) -> float:
    flo = fn(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol:
            return mid
        fm = fn(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def npp_rho0(alpha: float) -> float:
    """Overlap above which pairs reaching sqrt(n) 2^(-alpha n) are exponentially rare."""
    if not 0.5 < alpha < 1.0:
        raise ValueError("alpha must lie in (1/2, 1)")
    return bisect(lambda r: npp_pair_exponent(alpha, r), 0.0, 1.0)


def _check_clique_alpha(alpha: float) -> None:
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"alpha={alpha} outside (1, 2)")


def clique_pair_exponent(alpha: float, x: float, rho: float) -> float:
    """(1 - rho) x^2 / 2 - x + 2 alpha - alpha^2."""
    _check_clique_alpha(alpha)
    if not 0.0 <= x <= alpha:
        raise ValueError(f"x={x} outside [0, alpha]")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho={rho} outside [0, 1]")
    return (1.0 - rho) * x * x / 2.0 - x + 2.0 * alpha - alpha * alpha


def rho_star(alpha: float) -> float:
    """Correlation beyond which the high-overlap root leaves (0, alpha)."""
    if not 1.0 < alpha <= 2.0:
        raise ValueError(f"alpha={alpha} outside (1, 2]")
    return 2.0 / alpha - 1.0


def clique_overlap_roots(alpha: float, rho: float, tol: float = 1e-9):
    """Roots ``(x1, x2)`` of the clique pair exponent in x, or None.

    ``x1`` is None when the larger root is not below ``alpha`` (for
    alpha > 1.5 that is exactly rho > 2/alpha - 1). At rho = 1 the exponent
    is linear and only its root 2 alpha - alpha^2 is returned, as ``x2``.
    """
    _check_clique_alpha(alpha)
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho={rho} outside [0, 1]")
    c = 2.0 * alpha - alpha * alpha
    a = 1.0 - rho
    if a == 0.0:
        x = c
        return (None, x) if 0.0 < x < alpha else None
    disc = 1.0 - 2.0 * a * c
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    x1 = (1.0 + sq) / a
    x2 = (1.0 - sq) / a
    keep1 = x1 <= alpha + tol
    keep2 = 0.0 < x2 < alpha
    if not keep1 and not keep2:
        return None
    return (x1 if keep1 else None, x2 if keep2 else None)


@dataclass
class CliqueOverlapCurve:
    alpha: float
    rho_star: float
    samples: list[tuple[float, float | None, float | None]]

    def to_csv(self) -> str:
        """Rows ``rho,x1,x2,rho_star,alpha``; undefined branches are empty."""
        buf = io.StringIO()
        buf.write("rho,x1,x2,rho_star,alpha\n")
        for rho, x1, x2 in self.samples:
            buf.write(",".join([_fmt(rho), _fmt(x1), _fmt(x2), _fmt(self.rho_star), _fmt(self.alpha)]) + "\n")
        return buf.getvalue()


def _fmt(v) -> str:
    return "" if v is None else format(v, ".10g")


def rho_grid(step: float) -> list[float]:
    if not 0 < step <= 1:
        raise ValueError("grid step must lie in (0, 1]")
    count = int(math.floor(1.0 / step + 1e-9))
    pts = [round(i * step, 12) for i in range(count + 1)]
    if pts[-1] < 1.0:
        pts.append(1.0)
    return pts


def sample_clique_curve(alpha: float, grid) -> CliqueOverlapCurve:
    samples = []
    for rho in grid:
        if not 0.0 <= rho <= 1.0:
            raise ValueError(f"grid point {rho} outside [0, 1]")
        roots = clique_overlap_roots(alpha, rho)
        x1, x2 = roots if roots is not None else (None, None)
        samples.append((float(rho), x1, x2))
    return CliqueOverlapCurve(alpha, rho_star(alpha), samples)
