"""Cheap sufficient/necessary fit conditions used before the full solver."""
from __future__ import annotations

from typing import Optional, Sequence

from boxsuite.model import Carton, Dims3, tolerance_for

__all__ = [
    "fits_single",
    "fits_stacking",
    "aggregate_sorted_dims",
    "necessary_condition",
]


def fits_single(carton: Carton, box: Dims3, ho: Optional[bool] = None, eps: Optional[float] = None) -> bool:
    """Exact single-carton fit test.

    Free cartons fit iff their sorted dims fit the sorted box dims
    componentwise; height-oriented cartons additionally must keep their height
    vertical, so only length/width may rotate. ``box.c`` must be the true
    vertical dimension when the carton is height-oriented.
    """
    if eps is None:
        eps = tolerance_for(box)
    if ho is None:
        ho = carton.height_oriented
    p, q, r = carton.dims.as_tuple()
    if ho:
        cl, cw = (p, q) if p >= q else (q, p)
        bl, bw = (box.a, box.b) if box.a >= box.b else (box.b, box.a)
        return cl <= bl + eps and cw <= bw + eps and r <= box.c + eps
    cs = sorted((p, q, r), reverse=True)
    bs = sorted(box.as_tuple(), reverse=True)
    return all(cs[i] <= bs[i] + eps for i in range(3))


def _pinned(carton: Carton, enforce_ho: bool, enforce_br: bool) -> bool:
    # A pinned carton may only rotate about the vertical axis: height-oriented
    # by definition, bottom-resting conservatively (a floor carton could
    # tip over in principle, but the one-row constructions below keep every
    # carton's given height vertical, matching the HO treatment).
    return (enforce_ho and carton.height_oriented) or (enforce_br and carton.bottom_resting)


def aggregate_sorted_dims(
    cartons: Sequence[Carton],
    enforce_ho: bool = True,
    enforce_br: bool = False,
) -> tuple[list[tuple[float, float, float]], tuple[float, float, float], tuple[float, float, float]]:
    """Per-carton effective sorted dims plus their componentwise sums and maxima.

    Pinned cartons (see ``_pinned``) sort length/width only and keep their
    height third; free cartons sort all three dims nonincreasing.
    """
    eff = []
    for c in cartons:
        p, q, r = c.dims.as_tuple()
        if _pinned(c, enforce_ho, enforce_br):
            eff.append(((p, q, r) if p >= q else (q, p, r)))
        else:
            eff.append(tuple(sorted((p, q, r), reverse=True)))
    sums = tuple(sum(e[a] for e in eff) for a in range(3))
    maxs = tuple(max(e[a] for e in eff) for a in range(3))
    return eff, sums, maxs  # type: ignore[return-value]


def necessary_condition(
    cartons: Sequence[Carton],
    box_sorted_dims: Dims3,
    enforce_ho: bool = True,
    eps: Optional[float] = None,
) -> bool:
    """Every carton individually fits the box; failure proves no packing exists.

    ``box_sorted_dims.c`` must be the true vertical dimension; the other two
    components may be in any order. Bottom-resting restricts position, not
    orientation, so it plays no role here.
    """
    if eps is None:
        eps = tolerance_for(box_sorted_dims)
    return all(
        fits_single(c, box_sorted_dims, ho=enforce_ho and c.height_oriented, eps=eps)
        for c in cartons
    )


def fits_stacking(
    cartons: Sequence[Carton],
    box_sorted_dims: Dims3,
    ho_count: Optional[int] = None,
    br_count: Optional[int] = None,
    *,
    enforce_ho: bool = True,
    enforce_br: bool = True,
    eps: Optional[float] = None,
) -> bool:
    """Sufficient fit test: line the cartons up along a single axis.

    The one-row constructions keep every pinned carton's height vertical, so
    when any carton is pinned the box's vertical axis is distinguished:
    ``box_sorted_dims.c`` must then be the true vertical dimension (the other
    two components in any order). With only free cartons the box is re-sorted
    internally and the input order does not matter.

    A length or width row leaves every carton on the floor. A height stack
    elevates all cartons but the bottom one, so it is only allowed with at
    most one bottom-resting carton (that carton takes the floor slot). With
    enforce_br off, bottom-resting flags are ignored.
    """
    if eps is None:
        eps = tolerance_for(box_sorted_dims)
    if br_count is None or not enforce_br:
        br_count = sum(1 for c in cartons if c.bottom_resting) if enforce_br else 0
    if ho_count is None or not enforce_ho:
        ho_count = sum(1 for c in cartons if c.height_oriented) if enforce_ho else 0

    eff, sums, maxs = aggregate_sorted_dims(cartons, enforce_ho, enforce_br)
    if ho_count > 0 or br_count > 0:
        bl, bw = (box_sorted_dims.a, box_sorted_dims.b)
        if bw > bl:
            bl, bw = bw, bl
        bx = (bl, bw, box_sorted_dims.c)
    else:
        bx = tuple(sorted(box_sorted_dims.as_tuple(), reverse=True))
    # Guard so that "true" always means a constructible packing: every carton
    # must fit the box componentwise in its effective orientation.
    if not all(maxs[a] <= bx[a] + eps for a in range(3)):
        return False
    if sums[0] <= bx[0] + eps or sums[1] <= bx[1] + eps:
        return True
    return br_count <= 1 and sums[2] <= bx[2] + eps
