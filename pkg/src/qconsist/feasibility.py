"""Cutting-plane feasibility over a membership-oracle convex body.

Decides whether a convex region contains a point with f(x) <= t, given only
membership access: sample the region with a ball walk, take the sample
centroid z, test f(z) <= t, and otherwise cut away the half of the region
where f exceeds f(z). For a linear f every cut shares the same normal, so
the cuts collapse to the single binding offset.

No volume estimate is attempted; "the region got too small" is
operationalized as a round cap plus a stall stop when too many consecutive
proposals are rejected.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import ConfigError, DimensionMismatchError, QconsistError
from .hamiltonians import ObjectiveFunction, evaluate_objective


@dataclass(frozen=True)
class FeasibleRegion:
    """A convex body given by a base membership predicate plus half-space cuts.

    A point belongs to the region iff it lies in the outer ball of
    ``radius``, satisfies every cut g.x <= c, and the base predicate
    accepts it. ``r_min`` records the radius of a ball guaranteed to sit
    inside the base body around the origin; walk step sizes derive from it.
    """

    dimension: int
    base: Callable[[np.ndarray], bool]
    cuts: tuple[tuple[np.ndarray, float], ...] = ()
    radius: float | None = None
    r_min: float | None = None

    def __post_init__(self) -> None:
        if self.radius is None:
            object.__setattr__(self, "radius", float(np.sqrt(self.dimension)))
        if self.r_min is None:
            object.__setattr__(self, "r_min", 1.0 / float(np.sqrt(self.dimension)))
        frozen = []
        for g, c in self.cuts:
            g = np.asarray(g, dtype=float).copy()
            if g.shape != (self.dimension,):
                raise DimensionMismatchError(
                    f"cut normal shape {g.shape} vs dimension {self.dimension}"
                )
            g.setflags(write=False)
            frozen.append((g, float(c)))
        object.__setattr__(self, "cuts", tuple(frozen))

    def structurally_ok(self, x: np.ndarray) -> bool:
        """Ball and cut constraints only, without consulting the base oracle."""
        if np.isfinite(self.radius) and float(x @ x) > self.radius * self.radius:
            return False
        for g, c in self.cuts:
            if float(g @ x) > c:
                return False
        return True

    def contains(self, x: np.ndarray) -> bool:
        return self.structurally_ok(x) and bool(self.base(x))


def add_cut(region: FeasibleRegion, g: np.ndarray, z: np.ndarray) -> FeasibleRegion:
    """Append the half-space {x : g.x <= g.z}; z sits on its boundary."""
    g = np.asarray(g, dtype=float)
    if not np.any(g != 0):
        raise QconsistError("cut normal is zero")
    offset = float(g @ np.asarray(z, dtype=float))
    return replace(region, cuts=region.cuts + ((g, offset),))


@dataclass(frozen=True)
class WalkConfig:
    """Ball-walk and solve budgets. Fields left as None scale with the
    region: delta = r_min/(2 sqrt(d)), mix_steps = 50 d, max_rounds = 20 d.

    patience, when set, ends the solve early with an infeasible verdict
    once the best objective value seen has improved by less than
    patience_tol over that many consecutive rounds. An infeasible
    instance pins the walk just above the reachable minimum, where it
    can neither improve nor stall, so a flat stretch is the practical
    signal that nothing below remains to be found.
    """

    delta: float | None = None
    mix_steps: int | None = None
    samples: int = 30
    max_rounds: int | None = None
    stall_limit: int = 5000
    patience: int | None = None
    patience_tol: float = 5e-3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.delta is not None and not self.delta >= 0:
            raise ConfigError(f"delta must be >= 0, got {self.delta}")
        for name in ("mix_steps", "max_rounds", "patience"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ConfigError(f"{name} must be >= 1, got {v}")
        if self.samples < 1 or self.stall_limit < 1:
            raise ConfigError("samples and stall_limit must be >= 1")
        if not self.patience_tol >= 0:
            raise ConfigError(f"patience_tol must be >= 0, got {self.patience_tol}")

    def resolved(self, region: FeasibleRegion) -> "WalkConfig":
        d = region.dimension
        return replace(
            self,
            delta=self.delta if self.delta is not None else region.r_min / (2 * np.sqrt(d)),
            mix_steps=self.mix_steps if self.mix_steps is not None else 50 * d,
            max_rounds=self.max_rounds if self.max_rounds is not None else 20 * d,
        )


def _ball_displacements(rng: np.random.Generator, count: int, d: int, delta: float) -> np.ndarray:
    """Uniform draws from the delta-ball: scaled directions times U^(1/d)."""
    u = rng.standard_normal((count, d))
    norms = np.linalg.norm(u, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    radii = delta * rng.random((count, 1)) ** (1.0 / d)
    return u / norms * radii


def ball_walk_step(
    x: np.ndarray, region: FeasibleRegion, delta: float, rng: np.random.Generator
) -> np.ndarray:
    """One Metropolis step: propose uniformly in the delta-ball, move if inside."""
    disp = _ball_displacements(rng, 1, region.dimension, delta)[0]
    y = x + disp
    return y if region.contains(y) else x


class _StallStop(Exception):
    pass


def _chain(
    x: np.ndarray,
    region: FeasibleRegion,
    steps: int,
    delta: float,
    rng: np.random.Generator,
    stall_limit: int,
    stall_count: int,
) -> tuple[np.ndarray, int, int, int]:
    """Run ``steps`` walk steps; returns (point, accepts, stall_count).

    Raises _StallStop when stall_limit consecutive proposals (carried
    across calls through stall_count) have all been rejected.
    """
    disps = _ball_displacements(rng, steps, region.dimension, delta)
    accepts = 0
    for s in range(steps):
        y = x + disps[s]
        if region.contains(y):
            x = y
            accepts += 1
            stall_count = 0
        else:
            stall_count += 1
            if stall_count >= stall_limit:
                raise _StallStop
    return x, accepts, stall_count


def sample_points(
    region: FeasibleRegion,
    start: np.ndarray,
    cfg: WalkConfig,
    rng: np.random.Generator,
) -> list[np.ndarray]:
    """N points along one walk, mix_steps apart, all members of the region."""
    cfg = cfg.resolved(region)
    x = np.asarray(start, dtype=float)
    out = []
    stall = 0
    for _ in range(cfg.samples):
        try:
            x, _, stall = _chain(x, region, cfg.mix_steps, cfg.delta, rng, cfg.stall_limit, stall)
        except _StallStop:
            break
        out.append(x.copy())
    return out


def centroid(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise QconsistError("centroid needs a nonempty list of points")
    return pts.mean(axis=0)


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    point: np.ndarray | None
    value: float | None
    rounds: int
    stalled: bool
    transcript: tuple[dict, ...]


def feasibility_solve(
    region: FeasibleRegion,
    f: ObjectiveFunction,
    t: float,
    cfg: WalkConfig,
    rng: np.random.Generator,
) -> FeasibilityResult:
    """Sample / centroid / test / cut until f reaches t or the budget runs out.

    The objective is linear, so every cut has normal g = f.coeffs and the
    accumulated cuts reduce to the single smallest offset; each round's
    region is rebuilt from the base region with that one binding cut.

    Linearity sharpens the round in two ways. The minimum-f retained
    sample x_m is itself a member, so it is tested against t directly,
    not only the centroid z. And the cut may pass through the midpoint
    (z + x_m)/2 instead of z: its f value is the mean of two values
    above t, so no point of {f <= t} is ever removed, while the cut
    lands strictly deeper than the centroid. This keeps the per-round
    progress roughly geometric instead of the 1/d crawl of pure
    centroid cuts.

    x_m always satisfies the new cut and warm-starts the next round;
    when a stateful oracle exposes snapshot/restore, its solver state
    from the moment x_m was retained is restored along with it.

    Raises ConfigError when the origin fails the region predicate; the
    walk has nowhere sound to start from.
    """
    cfg = cfg.resolved(region)
    d = region.dimension
    g = f.coeffs
    origin = np.zeros(d)
    if not region.contains(origin):
        raise ConfigError("origin is not a member of the region")

    # a stateful warm-started oracle can save/restore its solver state, so a
    # restart from a retained sample resumes with the matching state
    base = region.base
    can_snap = hasattr(base, "snapshot") and hasattr(base, "restore")

    current = region
    best_offset = np.inf
    x = origin
    transcript: list[dict] = []
    points: list[np.ndarray] = []
    fhist: list[float] = []

    for rnd in range(cfg.max_rounds):
        points = []
        snaps: list = []
        accepts = 0
        stalled = False
        stall = 0
        for _ in range(cfg.samples):
            try:
                x, acc, stall = _chain(
                    x, current, cfg.mix_steps, cfg.delta, rng, cfg.stall_limit, stall
                )
            except _StallStop:
                stalled = True
                break
            accepts += acc
            points.append(x.copy())
            if can_snap:
                snaps.append(base.snapshot())
        if stalled and not points:
            transcript.append({"round": rnd, "stalled": True})
            return FeasibilityResult(
                feasible=False, point=None, value=None, rounds=rnd + 1,
                stalled=True, transcript=tuple(transcript),
            )
        z = centroid(points)
        fz = evaluate_objective(f, z)
        best = min(range(len(points)), key=lambda j: float(g @ points[j]))
        fbest = evaluate_objective(f, points[best])
        rate = accepts / max(1, len(points) * cfg.mix_steps)
        transcript.append(
            {
                "round": rnd,
                "f_value": fz,
                "f_best": fbest,
                "accept_rate": rate,
                "centroid": z.tolist(),
                "stalled": stalled,
            }
        )
        if fz <= t:
            return FeasibilityResult(
                feasible=True, point=z, value=fz, rounds=rnd + 1,
                stalled=False, transcript=tuple(transcript),
            )
        if fbest <= t:
            return FeasibilityResult(
                feasible=True, point=points[best], value=fbest, rounds=rnd + 1,
                stalled=False, transcript=tuple(transcript),
            )
        if stalled:
            return FeasibilityResult(
                feasible=False, point=None, value=None, rounds=rnd + 1,
                stalled=True, transcript=tuple(transcript),
            )
        fhist.append(min(fbest, fhist[-1]) if fhist else fbest)
        if (
            cfg.patience is not None
            and len(fhist) > cfg.patience
            and fhist[-1 - cfg.patience] - fhist[-1] < cfg.patience_tol
        ):
            transcript[-1]["stagnated"] = True
            return FeasibilityResult(
                feasible=False, point=None, value=None, rounds=rnd + 1,
                stalled=False, transcript=tuple(transcript),
            )
        # parallel cuts: rebuild from the base region with the binding offset
        zp = 0.5 * (z + points[best])
        offset = float(g @ zp)
        if offset < best_offset:
            best_offset = offset
            current = add_cut(region, g, zp)
        transcript[-1]["cut_offset"] = best_offset
        x = points[best]
        if can_snap:
            base.restore(snaps[best])

    return FeasibilityResult(
        feasible=False, point=None, value=None, rounds=cfg.max_rounds,
        stalled=False, transcript=tuple(transcript),
    )
