"""Antipolar (inverse) losses, the substitution function and the canonical
link.

The antipolar Bayes risk of a loss with Bayes risk rho is

    rho^(x) = inf_{q != 0} <x; q> / rho(q),

the concave-gauge polar.  Closed forms are used when the loss carries a
hint; otherwise the infimum is taken numerically over the simplex
(golden-section for n = 2, multi-start projected descent plus a
pattern-search polish for 3 <= n <= 5; the objective is quasi-convex, so
local search from a dense seed grid suffices at this scale, and the result
is cross-checked against a verification grid).

The attained minimizer q* doubles as the supergradient of rho^ at x via the
envelope identity  d rho^(x) = q* / rho(q*),  which is how numeric antipolar
loss maps are evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    BayesRisk,
    ProperLoss,
    SimplexGrid,
    _coerce,
    normalize_direction,
    simplex_grid,
)

__all__ = [
    "AntipolarResult",
    "PseudoInverseReport",
    "antipolar_bayes_risk",
    "antipolar_loss",
    "antigauge",
    "substitute",
    "canonical_link_composite",
    "check_pseudo_inverse",
]

_MAX_NUMERIC_DIM = 5


@dataclass(frozen=True)
class AntipolarResult:
    """Value and attaining direction of the antipolar Bayes risk at x."""

    value: float
    minimizer: np.ndarray  # point of the closed simplex
    method: str  # "closed_form" | "numeric"
    certified_gap: float  # excess of the solver value over the best grid value


# ---------------------------------------------------------------------------
# numeric minimization of q -> <x;q>/rho(q)
# ---------------------------------------------------------------------------
def _ratio_objective(loss: ProperLoss, x: np.ndarray):
    def g(Q: np.ndarray):
        Q = np.asarray(Q, dtype=np.float64)
        num = np.sum(x * Q, axis=-1)
        den = np.asarray(loss.bayes_risk(Q), dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = num / den
        return np.where(den > 0, val, np.inf)

    return g


def _golden_min(f, lo: float, hi: float, iters: int = 80):
    """Deterministic golden-section minimization of a scalar function."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    t = c if fc <= fd else d
    return t, min(fc, fd)


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of v onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, v.size + 1)
    cond = u - (css - 1.0) / k > 0
    rho = k[cond][-1]
    theta = (css[cond][-1] - 1.0) / rho
    return np.maximum(v - theta, 0.0)


def _pattern_polish(g, q: np.ndarray, val: float, delta0: float = 0.25):
    """Derivative-free mass-transfer descent on the simplex."""
    n = q.size
    delta = delta0
    budget = 4000
    while delta > 1e-13 and budget > 0:
        improved = False
        for i in range(n):
            for j in range(n):
                if i == j or q[j] - delta <= 1e-15:
                    continue
                cand = q.copy()
                cand[i] += delta
                cand[j] -= delta
                v = float(g(cand))
                budget -= 1
                if v < val:
                    q, val = cand, v
                    improved = True
        if not improved:
            delta *= 0.5
    return q, val


def _projected_descent(loss: ProperLoss, x: np.ndarray, q0: np.ndarray,
                       iters: int = 300):
    g = _ratio_objective(loss, x)
    q = q0.copy()
    val = float(g(q))
    for _ in range(iters):
        r = float(loss.bayes_risk(q))
        if not np.isfinite(val) or r <= 0:
            break
        grad = (x - val * loss.loss(q)) / r
        if not np.all(np.isfinite(grad)):
            break
        step = 1.0
        moved = False
        for _ in range(30):
            cand = _project_simplex(q - step * grad)
            cand = np.maximum(cand, 1e-14)
            cand /= cand.sum()
            v = float(g(cand))
            if v < val - 1e-15:
                if np.max(np.abs(cand - q)) < 1e-13:
                    q, val = cand, v
                    return q, val
                q, val = cand, v
                moved = True
                break
            step *= 0.5
        if not moved:
            break
    return q, val


def _minimize_ratio(loss: ProperLoss, x: np.ndarray):
    """Minimize <x;q>/rho(q) over the simplex; returns (value, q*, gap)."""
    n = loss.n
    g = _ratio_objective(loss, x)
    if n == 2:
        f = lambda t: float(g(np.array([t, 1.0 - t])))
        t, val = _golden_min(f, 1e-9, 1.0 - 1e-9, iters=80)
        q = np.array([t, 1.0 - t])
        verify = simplex_grid(2, 2000).points
    elif n <= _MAX_NUMERIC_DIM:
        seeds = simplex_grid(n, 12).points
        order = np.argsort(np.asarray(g(seeds)))
        best_q, best_val = None, np.inf
        for idx in order[:20]:
            q_i, v_i = _projected_descent(loss, x, seeds[idx].copy())
            if v_i < best_val:
                best_q, best_val = q_i, v_i
        q, val = _pattern_polish(g, best_q, best_val)
        verify = simplex_grid(n, 24).points
    else:
        raise ValueError(
            f"numeric antipolar supports dimensions 2..{_MAX_NUMERIC_DIM}, got {n}"
        )
    grid_vals = np.asarray(g(verify))
    k = int(np.argmin(grid_vals))
    grid_val = float(grid_vals[k])
    gap = max(0.0, val - grid_val)
    if grid_val < val:
        q, val = _pattern_polish(g, verify[k].copy(), grid_val)
    return val, q, gap


# ---------------------------------------------------------------------------
# antipolar Bayes risk
# ---------------------------------------------------------------------------
def antipolar_bayes_risk(loss: ProperLoss, x, method: str = "auto") -> AntipolarResult:
    """Evaluate rho^(x) = inf_q <x;q>/rho(q) with the attaining direction.

    ``method='auto'`` uses the loss's closed form when available (falling
    back to minimization at its singular points), ``'closed_form'`` requires
    one, ``'numeric'`` forces minimization.  ``certified_gap`` is the amount
    by which the best verification-grid value beat the solver (0 when the
    solver was at least as good; for closed forms, the mismatch against the
    numeric cross-check when one was run).
    """
    xa = _coerce(x, loss.n)
    if np.any(xa < 0) or not np.any(xa > 0):
        raise ValueError("antipolar argument must be nonnegative and nonzero")
    if method not in ("auto", "closed_form", "numeric"):
        raise ValueError(f"unknown method {method!r}")

    hint = loss.antipolar_hint
    has_closed = hint is not None and hint.rho is not None
    if method == "closed_form" and not has_closed:
        raise ValueError(f"{loss.name} has no closed-form antipolar")

    if method != "numeric" and has_closed:
        val = float(hint.rho(xa))
        if np.isfinite(val) and not np.isnan(val):
            if hint.loss_map is not None:
                try:
                    minimizer = normalize_direction(np.asarray(hint.loss_map(xa)))
                    return AntipolarResult(val, minimizer, "closed_form", 0.0)
                except ValueError:
                    pass  # boundary point: the infimum is a limit, locate numerically
            num_val, q, _ = _minimize_ratio(loss, xa)
            return AntipolarResult(val, q, "closed_form", abs(val - num_val))
        if method == "closed_form":
            raise ValueError(
                f"closed-form antipolar of {loss.name} is singular at this point"
            )

    val, q, gap = _minimize_ratio(loss, xa)
    return AntipolarResult(float(val), q, "numeric", float(gap))


def antipolar_loss(loss: ProperLoss) -> ProperLoss:
    """The antipolar (inverse) loss as a full ProperLoss.

    When the loss carries a closed-form partner (concave-norm pairing,
    scaled Cobb-Douglas, min/constant) that partner is returned.  Otherwise
    the Bayes risk is ``antipolar_bayes_risk`` and the loss map is the
    envelope supergradient q*/rho(q*) at the attained minimizer (exact for
    the hinted log/Brier forms, numeric elsewhere).  For non-strictly-proper
    losses the supergradient at kink points is one representative selection.
    """
    hint = loss.antipolar_hint
    if hint is not None and hint.partner is not None:
        return hint.partner()

    n = loss.n

    if hint is not None and hint.rho is not None:
        def rho_fn(P):
            P = np.asarray(P, dtype=np.float64)
            vals = np.asarray(hint.rho(P), dtype=np.float64)
            if np.any(np.isnan(vals)):
                flat = np.atleast_2d(P.reshape(-1, n))
                v = vals.reshape(-1).copy()
                for i in np.argwhere(np.isnan(v)).ravel():
                    v[i] = _minimize_ratio(loss, flat[i])[0]
                vals = v.reshape(vals.shape) if vals.ndim else float(v[0])
            return vals
    else:
        def rho_fn(P):
            P = np.asarray(P, dtype=np.float64)
            flat = P.reshape(-1, n)
            vals = np.array([_minimize_ratio(loss, row)[0] for row in flat])
            return vals.reshape(P.shape[:-1])

    if hint is not None and hint.loss_map is not None:
        map_fn = hint.loss_map
    else:
        def map_fn(P):
            P = np.asarray(P, dtype=np.float64)
            flat = P.reshape(-1, n)
            out = np.empty_like(flat)
            for i, row in enumerate(flat):
                _, q, _ = _minimize_ratio(loss, row)
                out[i] = q / float(loss.bayes_risk(q))
            return out.reshape(P.shape)

    fully_closed = (
        hint is not None and hint.rho is not None and hint.loss_map is not None
    )
    return ProperLoss(
        bayes_risk=BayesRisk(rho_fn, n),
        loss_map=map_fn,
        name=f"{loss.name}^",
        n=n,
        strictly_proper=loss.strictly_proper,
        analytic=fully_closed,
        maximizer=None,
        antipolar_hint=None,
    )


# ---------------------------------------------------------------------------
# antigauge of the superprediction set
# ---------------------------------------------------------------------------
def antigauge(
    loss: ProperLoss,
    x,
    method: str = "support",
    grid_resolution: int = 60,
) -> float:
    """sup{lambda > 0 : x/lambda stays in the superprediction set}.

    ``method='support'`` evaluates it as the antipolar Bayes risk at x
    (gauge/support duality; exact up to the antipolar solver).
    ``method='bisection'`` brackets lambda with a grid membership test
    min_q (<x/lambda; q> - rho(q)) >= 0; its accuracy is limited by the
    membership grid, so it serves as an independent cross-check.
    """
    xa = _coerce(x, loss.n)
    if method == "support":
        return antipolar_bayes_risk(loss, xa).value
    if method != "bisection":
        raise ValueError(f"unknown method {method!r}")
    grid = simplex_grid(loss.n, grid_resolution).points
    rho_vals = np.asarray(loss.bayes_risk(grid))

    def member(lam: float) -> bool:
        return bool(np.all(grid @ (xa / lam) - rho_vals >= -1e-12))

    lo, hi = 1e-12, 1.0
    while member(hi):
        hi *= 2.0
        if hi > 1e12:
            break
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if member(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# substitution and the canonical link
# ---------------------------------------------------------------------------
def substitute(loss: ProperLoss, x, tol: float = 1e-6) -> np.ndarray:
    """Map a superprediction point x to a prediction p with l(p) <= x + tol.

    x must lie in the superprediction set (antigauge >= 1 up to a relative
    1e-8 slack).  The prediction is the direction of the antipolar loss at
    x; componentwise dominance is verified before returning.
    """
    xa = _coerce(x, loss.n)
    beta = antipolar_bayes_risk(loss, xa).value
    if beta < 1.0 - 1e-8 * max(1.0, abs(beta)):
        raise ValueError(
            f"x is not a superprediction point (antigauge {beta:.6g} < 1)"
        )
    apolar = antipolar_loss(loss)
    p = normalize_direction(apolar.loss(xa))
    lp = loss.loss(p)
    worst = float(np.max(lp - xa))
    if worst > tol:
        raise ValueError(
            f"substitution failed componentwise dominance by {worst:.3e} "
            f"(loss {loss.name}; selection may be non-unique)"
        )
    return p


def canonical_link_composite(loss: ProperLoss):
    """The canonical-link reparametrization x -> l(l^(x)).

    Maps any superprediction point to the boundary point below it on the
    same ray; its partial losses are quasi-convex.
    """
    apolar = antipolar_loss(loss)

    def composite(x):
        xa = _coerce(x, loss.n)
        return loss.loss(apolar.loss(xa))

    return composite


# ---------------------------------------------------------------------------
# pseudo-inverse verification
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class PseudoInverseReport:
    passed: bool
    worst_loss_error: float  # max ||l(p) - (l o l^ o l)(p)||_inf
    worst_direction_error: float  # max ||dir(l^(l(p))) - dir(p)||_inf
    tol: float

    def __str__(self) -> str:
        state = "pass" if self.passed else "FAIL"
        return (
            f"pseudo-inverse {state}: loss error {self.worst_loss_error:.3e}, "
            f"direction error {self.worst_direction_error:.3e} (tol {self.tol:.1e})"
        )


def check_pseudo_inverse(
    loss: ProperLoss, grid: SimplexGrid, tol: float = 1e-6
) -> PseudoInverseReport:
    """Verify l = l o l^ o l and dir(l^ o l) = dir on the grid.

    Meaningful for strictly proper losses (unique supergradients); at kink
    points of non-strictly-proper losses the chain depends on the selection.
    """
    apolar = antipolar_loss(loss)
    worst_loss = 0.0
    worst_dir = 0.0
    for p in grid.points:
        lx = loss.loss(p)
        back = apolar.loss(lx)
        chain = loss.loss(back)
        finite = np.isfinite(lx)
        worst_loss = max(worst_loss, float(np.max(np.abs(chain - lx)[finite])))
        worst_dir = max(
            worst_dir,
            float(
                np.max(
                    np.abs(normalize_direction(back) - normalize_direction(p))
                )
            ),
        )
    return PseudoInverseReport(
        passed=bool(worst_loss <= tol and worst_dir <= tol),
        worst_loss_error=worst_loss,
        worst_direction_error=worst_dir,
        tol=tol,
    )
