"""Lattice boxes, boundary belts, cell grids and overlap tests.

A box ``Lambda_L(x)`` of even side ``L`` centred at the lattice site ``x`` is
the set of sites ``y`` with ``|y - x|_inf <= L/2 - 1``; it has ``(L-1)^d``
sites. Its belt is the outermost layer ``|y - x|_inf = L/2 - 1``.

Sites are always enumerated in lexicographic order, and that order is the
row/column order of every matrix built on the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError


class GeometryError(DomainError):
    """Raised for boxes or scales outside the domain of an operation."""


def snap_6n(K: float) -> int:
    """Largest multiple of 6 not exceeding ``K``."""
    if not K >= 6:
        raise GeometryError(f"snap_6n needs K >= 6, got {K!r}")
    return 6 * int(math.floor(K / 6.0 + 1e-12))


def _as_center(center, dim=None) -> tuple[int, ...]:
    if np.isscalar(center):
        center = (int(center),) * (dim or 1)
    out = tuple(int(c) for c in center)
    if dim is not None and len(out) != dim:
        raise GeometryError(f"center {out} does not have dimension {dim}")
    return out


@dataclass(frozen=True)
class BoxSpec:
    center: tuple[int, ...]
    side: int

    def __post_init__(self):
        object.__setattr__(self, "center", _as_center(self.center))
        if int(self.side) != self.side or self.side < 2 or self.side % 2:
            raise GeometryError(f"box side must be a positive even integer, got {self.side!r}")
        object.__setattr__(self, "side", int(self.side))

    @classmethod
    def at(cls, center, side: int, dim: int = 1) -> "BoxSpec":
        return cls(_as_center(center, dim), side)

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def radius(self) -> int:
        """Sup-norm radius of the site set, ``L/2 - 1``."""
        return self.side // 2 - 1

    @property
    def n_sites(self) -> int:
        return (self.side - 1) ** self.dim

    @property
    def msa_grade(self) -> bool:
        return self.side % 6 == 0

    @cached_property
    def sites(self) -> np.ndarray:
        """``(n_sites, dim)`` integer array of sites in lexicographic order."""
        r = self.radius
        axes = [np.arange(c - r, c + r + 1) for c in self.center]
        grid = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grid], axis=1)

    def offsets(self) -> np.ndarray:
        return self.sites - np.asarray(self.center)

    def sup_dist(self, point) -> np.ndarray:
        """``|y - point|_inf`` for every site ``y`` of the box."""
        return np.abs(self.sites - np.asarray(point)).max(axis=1)

    @cached_property
    def belt_mask(self) -> np.ndarray:
        return self.sup_dist(self.center) == self.radius

    def belt_indices(self) -> np.ndarray:
        return np.flatnonzero(self.belt_mask)

    def core(self) -> "BoxSpec":
        """The concentric box of side ``L/3`` (``L`` must lie in 6N)."""
        require_6n(self)
        return BoxSpec(self.center, self.side // 3)

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points))
        return np.abs(pts - np.asarray(self.center)).max(axis=1) <= self.radius

    def index_of(self, points) -> np.ndarray:
        """Matrix indices of ``points`` (which must lie in the box)."""
        pts = np.atleast_2d(np.asarray(points))
        if not self.contains(pts).all():
            raise GeometryError("points outside the box")
        rel = pts - (np.asarray(self.center) - self.radius)
        n = self.side - 1
        strides = n ** np.arange(self.dim - 1, -1, -1)
        return rel @ strides

    def indices_in(self, other: "BoxSpec") -> np.ndarray:
        """Indices of the sites of ``other`` inside this box's site list."""
        return self.index_of(other.sites)

    def layer_indices(self, center, distance: int) -> np.ndarray:
        """Indices of sites at sup-distance exactly ``distance`` from ``center``."""
        return np.flatnonzero(self.sup_dist(center) == distance)

    def translated(self, shift) -> "BoxSpec":
        return BoxSpec(tuple(np.asarray(self.center) + np.asarray(shift)), self.side)


def require_6n(box: BoxSpec) -> None:
    if not box.msa_grade:
        raise GeometryError(f"box side {box.side} is not in 6N")


def sites(box: BoxSpec) -> np.ndarray:
    return box.sites


def belt(box: BoxSpec) -> np.ndarray:
    return box.sites[box.belt_mask]


def thick_margin(inner_side: int, outer_side: int) -> int:
    """Largest admissible centre offset for ``inner`` to sit inside ``Lambda_{L-3}``."""
    return (outer_side - 3 - inner_side) // 2


def is_inside_thick(inner: BoxSpec, outer: BoxSpec) -> bool:
    """``inner`` is contained in ``Lambda_{L-3}(outer.center)``.

    Only defined when ``outer.side > inner.side + 3``.
    """
    if inner.dim != outer.dim:
        raise GeometryError("boxes of different dimension")
    if not outer.side > inner.side + 3:
        raise GeometryError(f"outer side {outer.side} must exceed inner side {inner.side} + 3")
    gap = np.abs(np.asarray(inner.center) - np.asarray(outer.center)).max()
    return bool(gap <= thick_margin(inner.side, outer.side))


@dataclass(frozen=True)
class Separation:
    rho: int = 0

    def __post_init__(self):
        if self.rho < 0 or int(self.rho) != self.rho:
            raise GeometryError("separation must be a nonnegative integer")


def nonoverlapping(a: BoxSpec, b: BoxSpec, sep: Separation = Separation()) -> bool:
    if a.dim != b.dim:
        raise GeometryError("boxes of different dimension")
    gap = np.abs(np.asarray(a.center) - np.asarray(b.center)).max()
    return bool(2 * gap > a.side + b.side + 2 * sep.rho)


@dataclass(frozen=True)
class CellGrid:
    """Cell centres ``Xi_{L,l}(x) = Lambda_L(x) ∩ (x + (l/3) Z^d)``.

    A cell is the closed box of side ``l/3`` about a centre, i.e. the sites
    within sup-distance ``l/6``.
    """

    parent: BoxSpec
    ell: int
    centers: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.ell % 6 or self.ell <= 0:
            raise GeometryError(f"cell scale {self.ell} is not in 6N")
        step = self.ell // 3
        kmax = self.parent.radius // step
        object.__setattr__(self, "centers", _grid(self.parent.center, step, kmax))

    @property
    def cell_side(self) -> int:
        return self.ell // 3

    @property
    def count_bound(self) -> float:
        return (3 * self.parent.side / self.ell + 1) ** self.parent.dim

    def covering_family(self) -> np.ndarray:
        """Centres ``y`` with ``Lambda_l(y)`` thick-inside the parent box."""
        if not self.parent.side > self.ell + 3:
            return self.centers[:0]
        gap = np.abs(self.centers - np.asarray(self.parent.center)).max(axis=1)
        return self.centers[gap <= thick_margin(self.ell, self.parent.side)]

    def covering_centers(self) -> np.ndarray:
        """Smallest symmetric extension of ``centers`` whose cells cover the parent.

        Coincides with ``centers`` whenever those cells already cover every
        site; otherwise adds one grid shell lying just outside the box.
        """
        step = self.ell // 3
        half = step // 2
        kmax = max(0, -(-(self.parent.radius - half) // step))
        return _grid(self.parent.center, step, max(kmax, self.parent.radius // step))

    def uncovered_sites(self, centers: np.ndarray | None = None) -> np.ndarray:
        centers = self.centers if centers is None else centers
        half = self.ell // 6
        pts = self.parent.sites
        covered = np.zeros(len(pts), dtype=bool)
        for c in centers:
            covered |= np.abs(pts - c).max(axis=1) <= half
        return pts[~covered]


def _grid(center: Sequence[int], step: int, kmax: int) -> np.ndarray:
    ks = np.arange(-kmax, kmax + 1) * step
    grid = np.meshgrid(*[ks + c for c in center], indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=1)


def exterior_layer(box: BoxSpec) -> np.ndarray:
    """Sites at sup-distance ``L/2`` from the centre: the layer just outside the box."""
    r = box.radius + 1
    shell = BoxSpec(box.center, box.side + 2)
    return shell.sites[shell.sup_dist(box.center) == r]


def sites_in_any(points: np.ndarray, boxes: Iterable[BoxSpec]) -> np.ndarray:
    mask = np.zeros(len(points), dtype=bool)
    for b in boxes:
        mask |= b.contains(points)
    return mask
