"""Most powerful unfalsified model: window generators and continuations.

For data sampled from a system with known lag l, the windows of length l+1
of the smallest data-explaining behavior are exactly the columns of the
stacked Hankel of order l+1.  Longer windows (length l+k+1) are obtained by
gluing overlapping l+1 windows: candidate coefficient blocks g_1..g_{k+1}
must agree on the l-step overlaps, which is a banded linear constraint; the
admissible window set is then the image of a block matrix applied to that
constraint kernel.
"""

from __future__ import annotations

import numpy as np

from .errors import DataTooShortError, InfeasibleError, NotUniqueError
from .hankel import DataSet, GeneratorSubspace, mosaic_hankel
from .linalg import DEFAULT_TOL, ToleranceConfig, kernel_basis

__all__ = ["mpum_generators", "mpum_extended", "unique_continuation"]


def mpum_generators(ds: DataSet, lag: int) -> GeneratorSubspace:
    """Generators of the MPUM windows of length lag+1 (stacked mosaic Hankel)."""
    for seq in ds.sequences:
        if seq.length < lag + 1:
            raise DataTooShortError(
                f"sequence of length {seq.length} cannot hold a window of {lag + 1}"
            )
    return GeneratorSubspace(
        generators=mosaic_hankel(ds, lag + 1, "stacked"),
        window_length=lag + 1,
        m=ds.m,
        p=ds.p,
    )


def _band_blocks(H: np.ndarray, d: int, lag: int):
    """Split an order-(lag+1) Hankel into (first lag blocks, last lag blocks, last block)."""
    minus = H[: d * lag]
    plus = H[d : d * (lag + 1)]
    last = H[d * lag : d * (lag + 1)]
    return minus, plus, last


def mpum_extended(
    ds: DataSet, lag: int, k: int, tol: ToleranceConfig = DEFAULT_TOL
) -> GeneratorSubspace:
    """Generators of the MPUM windows of length lag+k+1.

    Assembles the block matrix X_k (initial window plus k+1 copies of the last
    block row on a diagonal) and the gluing constraint Z_k (k bands of
    [shifted block, -initial block]), and returns X_k applied to ker Z_k.
    k = 0 degenerates to mpum_generators (no gluing constraints).
    """
    if k < 0:
        raise ValueError("extension k must be nonnegative")
    base = mpum_generators(ds, lag)
    cols = base.generators.shape[1]
    if k > cols - 1:
        raise DataTooShortError(
            f"extension k={k} needs at least {k + 1} Hankel columns, have {cols}"
        )
    if k == 0:
        return base
    m, p = ds.m, ds.p
    Hu = base.u_rows
    Hy = base.y_rows
    Um, Up, Ul = _band_blocks(Hu, m, lag)
    Ym, Yp, Yl = _band_blocks(Hy, p, lag)

    def x_part(minus, last, d):
        X = np.zeros((d * (lag + k + 1), (k + 1) * cols))
        X[: d * lag, :cols] = minus
        for b in range(k + 1):
            X[d * (lag + b) : d * (lag + b + 1), b * cols : (b + 1) * cols] = last
        return X

    def z_part(plus, minus, d):
        Z = np.zeros((d * lag * k, (k + 1) * cols))
        for b in range(k):
            Z[d * lag * b : d * lag * (b + 1), b * cols : (b + 1) * cols] = plus
            Z[d * lag * b : d * lag * (b + 1), (b + 1) * cols : (b + 2) * cols] = -minus
        return Z

    X = np.vstack([x_part(Um, Ul, m), x_part(Ym, Yl, p)])
    Z = np.vstack([z_part(Up, Um, m), z_part(Yp, Ym, p)])
    return GeneratorSubspace(
        generators=X @ kernel_basis(Z, tol),
        window_length=lag + k + 1,
        m=m,
        p=p,
    )


def unique_continuation(
    ds: DataSet,
    T_p: int,
    T_f: int,
    u_p,
    y_p,
    u_f,
    tol: ToleranceConfig = DEFAULT_TOL,
):
    """Future outputs forced by a past window and a future input.

    Solves [H(u); H(y)] g = (u_p, u_f, y_p, y_f) in the window of length
    T_p + T_f and returns y_f as a (T_f, p) array.  Raises InfeasibleError
    when no g matches the constraints, and NotUniqueError when the solution
    set maps to more than one y_f (past too short or excitation too weak).
    """
    m, p = ds.m, ds.p
    L = T_p + T_f
    u_p = np.asarray(u_p, dtype=float).reshape(T_p * m)
    y_p = np.asarray(y_p, dtype=float).reshape(T_p * p)
    u_f = np.asarray(u_f, dtype=float).reshape(T_f * m)
    for seq in ds.sequences:
        if seq.length < L:
            raise DataTooShortError(f"window {L} does not fit a sequence of {seq.length}")
    Hu = mosaic_hankel(ds, L, "input")
    Hy = mosaic_hankel(ds, L, "output")
    constraints = np.vstack([Hu, Hy[: T_p * p]])
    rhs = np.concatenate([u_p, u_f, y_p])
    g, *_ = np.linalg.lstsq(constraints, rhs, rcond=None)
    residual = float(np.linalg.norm(constraints @ g - rhs))
    if residual > tol.membership_rtol * max(np.linalg.norm(rhs), 1.0):
        raise InfeasibleError(
            f"no trajectory matches the past window and future input (residual {residual:.2e})"
        )
    future = Hy[T_p * p :]
    # every solution is g + (kernel element); y_f unique iff the kernel
    # is invisible through the future output rows
    N = kernel_basis(constraints, tol)
    if N.shape[1]:
        spread = float(np.max(np.linalg.norm(future @ N, axis=0)))
        scale = max(float(np.linalg.norm(future)), 1.0)
        if spread > tol.membership_rtol * scale:
            raise NotUniqueError(
                "future output is not uniquely determined "
                f"(solution spread {spread:.2e}); past window too short or data not exciting"
            )
    return (future @ g).reshape(T_f, p)
