"""Dominance, Pareto-front extraction, exact hypervolume, box decomposition.

Everything here is maximize-oriented: a point dominates another when it is
at least as large in every component and strictly larger in one.  The
hypervolume of a front is the exact Lebesgue measure of the union of boxes
[reference, point], computed with the WFG recursive scheme.  The box
decomposition partitions the complementary (non-dominated) region into
disjoint axis-aligned boxes, which is what the acquisition function
integrates over.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, ReferenceViolation

# Reference point in normalized objective space: every feasible outcome in
# [-1, 1]^d strictly dominates it.
REFERENCE_MARGIN = 0.1


def default_reference(n_objectives: int) -> np.ndarray:
    return np.full(n_objectives, -1.0 - REFERENCE_MARGIN)


def default_upper(n_objectives: int) -> np.ndarray:
    return np.ones(n_objectives)


def dominates(a, b) -> bool:
    """True iff a >= b componentwise with a > b somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return bool(np.all(a >= b) and np.any(a > b))


def non_dominated_mask(values: np.ndarray) -> np.ndarray:
    """Boolean mask of the non-dominated rows of ``values``.

    Duplicate rows keep only their first occurrence.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        if not mask[i]:
            continue
        v = values[i]
        ge = np.all(values >= v, axis=1)
        gt = np.any(values > v, axis=1)
        if np.any(ge & gt):
            mask[i] = False
            continue
        # drop later duplicates of v
        dup = np.all(values == v, axis=1)
        dup[: i + 1] = False
        mask[dup] = False
    return mask


@dataclass(frozen=True)
class ParetoFront:
    """Non-dominated points with their history indices and reference point."""

    indices: tuple[int, ...]
    values: np.ndarray  # (n, d), rows aligned with indices
    reference_point: np.ndarray  # (d,)

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def n_objectives(self) -> int:
        return int(self.reference_point.shape[0])


def pareto_front(points, reference_point=None) -> ParetoFront:
    """Extract the non-dominated subset of ``points`` in stable order.

    ``points`` is an (n, d) array-like or a sequence of objective vectors
    (anything with ``as_tuple`` or indexable as floats).

    Raises:
        EmptyInput: no points given.
        ReferenceViolation: a surviving point has a component below the
            reference point.
    """
    rows = [
        p.as_tuple() if hasattr(p, "as_tuple") else tuple(float(v) for v in p)
        for p in points
    ]
    if not rows:
        raise EmptyInput("pareto_front needs at least one point")
    values = np.asarray(rows, dtype=float)
    if reference_point is None:
        reference_point = default_reference(values.shape[1])
    reference_point = np.asarray(reference_point, dtype=float)
    mask = non_dominated_mask(values)
    indices = tuple(int(i) for i in np.flatnonzero(mask))
    selected = values[mask]
    if np.any(selected < reference_point):
        raise ReferenceViolation(
            "front point below the reference point; choose a lower reference"
        )
    return ParetoFront(
        indices=indices, values=selected, reference_point=reference_point
    )


def hypervolume(front: ParetoFront) -> float:
    """Exact hypervolume dominated by the front above its reference point."""
    values = np.asarray(front.values, dtype=float)
    ref = front.reference_point
    if values.size and np.any(values < ref):
        raise ReferenceViolation("front point below the reference point")
    shifted = values - ref
    return _wfg(shifted[np.any(shifted > 0, axis=1)])


def hypervolume_of_points(points, reference_point) -> float:
    """Hypervolume of an arbitrary point set (dominated rows are harmless)."""
    return hypervolume(pareto_front(points, reference_point))


def _wfg(points: np.ndarray) -> float:
    """WFG recursion on points already shifted so the reference is 0."""
    n = points.shape[0]
    if n == 0:
        return 0.0
    if n == 1:
        return float(np.prod(points[0]))
    if points.shape[1] == 2:
        return _hv2d(points)
    # larger first coordinates first: limit sets shrink faster
    order = np.argsort(-points[:, 0], kind="stable")
    points = points[order]
    total = 0.0
    for i in range(n):
        p = points[i]
        limited = np.minimum(points[i + 1 :], p)
        limited = limited[np.all(limited > 0, axis=1)]
        if limited.shape[0]:
            limited = limited[non_dominated_mask(limited)]
        total += float(np.prod(p)) - _wfg(limited)
    return total


def _hv2d(points: np.ndarray) -> float:
    """Closed-form 2-D hypervolume (points shifted to a zero reference)."""
    pts = points[non_dominated_mask(points)]
    order = np.argsort(-pts[:, 0], kind="stable")
    pts = pts[order]
    total = 0.0
    prev_y = 0.0
    for x, y in pts:
        total += x * (y - prev_y)
        prev_y = y
    return float(total)


@dataclass(frozen=True)
class BoxDecomposition:
    """Disjoint boxes covering the region not dominated by the front.

    The region is bounded below by the reference point and above by
    ``upper``; lower/upper are (n_boxes, d) arrays.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __len__(self) -> int:
        return int(self.lower.shape[0])

    def total_volume(self) -> float:
        if len(self) == 0:
            return 0.0
        return float(np.sum(np.prod(self.upper - self.lower, axis=1)))


def box_decomposition(front: ParetoFront, upper=None) -> BoxDecomposition:
    """Partition the non-dominated region above the reference into boxes.

    Recursive corner exclusion: the box a front point dominates is removed
    from the current cell and the remainder is split into at most d
    disjoint cells, each handled with the remaining points.
    """
    ref = front.reference_point
    d = front.n_objectives
    if upper is None:
        upper = default_upper(d)
    upper = np.asarray(upper, dtype=float)
    values = np.asarray(front.values, dtype=float)
    if values.size and np.any(values < ref):
        raise ReferenceViolation("front point below the reference point")

    lowers: list[np.ndarray] = []
    uppers: list[np.ndarray] = []
    _split_cell(ref.copy(), upper.copy(), values, lowers, uppers)
    if not lowers:
        return BoxDecomposition(
            lower=np.empty((0, d)), upper=np.empty((0, d))
        )
    return BoxDecomposition(lower=np.array(lowers), upper=np.array(uppers))


def _split_cell(
    lo: np.ndarray,
    hi: np.ndarray,
    points: np.ndarray,
    lowers: list[np.ndarray],
    uppers: list[np.ndarray],
) -> None:
    if np.any(hi <= lo):
        return
    if points.shape[0]:
        # points dominating a positive-volume corner of this cell
        relevant = points[np.all(points > lo, axis=1)]
    else:
        relevant = points
    if relevant.shape[0] == 0:
        lowers.append(lo)
        uppers.append(hi)
        return
    if np.any(np.all(relevant >= hi, axis=1)):
        return  # the whole cell is dominated
    # exclude the largest dominated corner first
    corners = np.minimum(relevant, hi)
    pick = int(np.argmax(np.prod(corners - lo, axis=1)))
    m = corners[pick]
    rest = np.delete(relevant, pick, axis=0)
    # remainder of [lo, hi] minus [lo, m] as <= d disjoint cells
    for k in range(lo.shape[0]):
        if m[k] >= hi[k]:
            continue
        new_lo = lo.copy()
        new_hi = hi.copy()
        new_lo[k] = m[k]
        new_hi[:k] = np.minimum(hi[:k], m[:k])
        _split_cell(new_lo, new_hi, rest, lowers, uppers)


def improvement_over_boxes(
    samples: np.ndarray, decomp: BoxDecomposition
) -> np.ndarray:
    """Hypervolume improvement of each outcome row over the decomposed front.

    ``samples`` has shape (..., d); the result drops the last axis.  For an
    outcome y the improvement is the volume of [-inf, y] intersected with
    the non-dominated boxes, i.e. sum_k prod_j (min(y_j, up_kj) - lo_kj)+.
    """
    samples = np.asarray(samples, dtype=float)
    if len(decomp) == 0:
        return np.zeros(samples.shape[:-1])
    y = samples[..., None, :]  # (..., 1, d)
    edge = np.minimum(y, decomp.upper) - decomp.lower
    np.clip(edge, 0.0, None, out=edge)
    return edge.prod(axis=-1).sum(axis=-1)
