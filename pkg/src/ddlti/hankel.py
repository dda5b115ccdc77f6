"""Trajectory data model, block Hankel matrices and persistency of excitation.

Layout conventions (fixed throughout the library):
  * a length-T trajectory stores u as a (T, m) array and y as (T, p), rows
    indexed by time;
  * hankel(w, L) interleaves channels within a time step: block row a holds
    the d channels of w(a + j) for column j, so the matrix is (L*d) x (T-L+1);
  * stacked generators put all input rows above all output rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import hankel_array
from .errors import DimensionMismatchError, IndexOutOfRangeError, WindowTooLongError
from .linalg import DEFAULT_TOL, ToleranceConfig, kernel_basis, numerical_rank

__all__ = [
    "Trajectory",
    "DataSet",
    "GeneratorSubspace",
    "hankel",
    "mosaic_hankel",
    "is_persistently_exciting",
    "induced_from_generators",
    "induced_siso_generators",
    "channel_rows",
]


@dataclass
class Trajectory:
    """One finite input/output record; u is (T, m), y is (T, p)."""

    u: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.u = np.atleast_2d(np.asarray(self.u, dtype=float))
        self.y = np.atleast_2d(np.asarray(self.y, dtype=float))
        if self.u.shape[0] != self.y.shape[0]:
            raise DimensionMismatchError(
                f"u has {self.u.shape[0]} samples, y has {self.y.shape[0]}"
            )
        if self.u.shape[0] < 1:
            raise DimensionMismatchError("trajectory must contain at least one sample")
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.y))):
            raise ValueError("trajectory contains non-finite entries")

    @property
    def length(self) -> int:
        return self.u.shape[0]


@dataclass
class DataSet:
    """One or more trajectories sharing input/output dimensions.

    sampling_time is carried for continuous-time reconstruction and is None
    for purely discrete data.
    """

    m: int
    p: int
    sequences: list
    sampling_time: float | None = None

    def __post_init__(self):
        if not self.sequences:
            raise DimensionMismatchError("data set must contain at least one trajectory")
        self.sequences = [
            seq if isinstance(seq, Trajectory) else Trajectory(*seq) for seq in self.sequences
        ]
        for seq in self.sequences:
            if seq.u.shape[1] != self.m or seq.y.shape[1] != self.p:
                raise DimensionMismatchError(
                    f"trajectory with (m={seq.u.shape[1]}, p={seq.y.shape[1]}) "
                    f"in a data set with (m={self.m}, p={self.p})"
                )
        if self.sampling_time is not None and self.sampling_time <= 0:
            raise ValueError("sampling_time must be positive")

    def scaled(self, c: float) -> "DataSet":
        """Globally rescaled copy (u, y) -> (c u, c y)."""
        return DataSet(
            m=self.m,
            p=self.p,
            sequences=[Trajectory(c * s.u, c * s.y) for s in self.sequences],
            sampling_time=self.sampling_time,
        )


@dataclass
class GeneratorSubspace:
    """Column space of window trajectories of a fixed length.

    generators has window_length*(m+p) rows: the input part (m rows per time
    step) stacked above the output part.
    """

    generators: np.ndarray
    window_length: int
    m: int
    p: int

    def __post_init__(self):
        self.generators = np.asarray(self.generators, dtype=float)
        expected = self.window_length * (self.m + self.p)
        if self.generators.shape[0] != expected:
            raise DimensionMismatchError(
                f"generator matrix has {self.generators.shape[0]} rows, expected {expected}"
            )

    @property
    def u_rows(self) -> np.ndarray:
        return self.generators[: self.window_length * self.m]

    @property
    def y_rows(self) -> np.ndarray:
        return self.generators[self.window_length * self.m :]


def hankel(w, L: int) -> np.ndarray:
    """Block Hankel matrix of order L; column j is the window w(j..j+L-1)."""
    w = np.atleast_2d(np.asarray(w, dtype=float))
    if w.shape[0] < L or L < 1:
        raise WindowTooLongError(f"window {L} does not fit a sequence of {w.shape[0]} samples")
    return hankel_array(w, L)


def mosaic_hankel(ds: DataSet, L: int, which: str = "stacked") -> np.ndarray:
    """Horizontal concatenation of per-sequence Hankel matrices.

    which selects 'input', 'output' or 'stacked' (input rows over output rows,
    columns aligned across the two halves).
    """
    if which not in ("input", "output", "stacked"):
        raise ValueError(f"unknown selection {which!r}")
    for seq in ds.sequences:
        if seq.length < L:
            raise WindowTooLongError(
                f"window {L} does not fit a sequence of {seq.length} samples"
            )
    if which == "input":
        return np.hstack([hankel(seq.u, L) for seq in ds.sequences])
    if which == "output":
        return np.hstack([hankel(seq.y, L) for seq in ds.sequences])
    return np.vstack(
        [
            np.hstack([hankel(seq.u, L) for seq in ds.sequences]),
            np.hstack([hankel(seq.y, L) for seq in ds.sequences]),
        ]
    )


def is_persistently_exciting(ds: DataSet, L: int, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff the order-L input Hankel has full row rank L*m."""
    H = mosaic_hankel(ds, L, "input")
    return numerical_rank(H, tol) == L * ds.m


def channel_rows(H: np.ndarray, channel: int, d: int, L: int) -> np.ndarray:
    """Rows of channel `channel` (1-based) from an order-L Hankel of d-vector data."""
    idx = [channel - 1 + a * d for a in range(L)]
    return H[idx]


def induced_from_generators(
    gen: GeneratorSubspace, i: int, j: int, tol: ToleranceConfig = DEFAULT_TOL
) -> GeneratorSubspace:
    """Single-channel window behavior of output i driven by input j.

    Restricts the generator columns to those whose clamped input channels
    (every channel except j) vanish, then keeps the u_j and y_i rows.
    """
    if not 1 <= i <= gen.p:
        raise IndexOutOfRangeError(f"output index {i} outside 1..{gen.p}")
    if not 1 <= j <= gen.m:
        raise IndexOutOfRangeError(f"input index {j} outside 1..{gen.m}")
    L = gen.window_length
    Hu, Hy = gen.u_rows, gen.y_rows
    clamped = [k for k in range(1, gen.m + 1) if k != j]
    if clamped:
        constraints = np.vstack([channel_rows(Hu, k, gen.m, L) for k in clamped])
        K = kernel_basis(constraints, tol)
    else:
        K = np.eye(Hu.shape[1])
    out = np.vstack(
        [channel_rows(Hu, j, gen.m, L) @ K, channel_rows(Hy, i, gen.p, L) @ K]
    )
    return GeneratorSubspace(generators=out, window_length=L, m=1, p=1)


def induced_siso_generators(
    ds: DataSet, L: int, i: int, j: int, tol: ToleranceConfig = DEFAULT_TOL
) -> GeneratorSubspace:
    """Window behavior of output i driven by input j with all other inputs zero.

    The admissible combinations g lie in the joint kernel of the Hankel rows
    of the clamped input channels; the generator columns are the (u_j, y_i)
    windows those g produce.
    """
    gen = GeneratorSubspace(
        generators=mosaic_hankel(ds, L, "stacked"), window_length=L, m=ds.m, p=ds.p
    )
    return induced_from_generators(gen, i, j, tol)
