"""Bitstring-basis Hilbert space and matrix-free conserved-charge action.

Basis convention (fixed for all file formats and fixtures): basis states
are indexed by integers b in [0, 2^N).  Bit k of b (little-endian, 0-based)
is 1 when spin k points up along z.  Pauli matrices in this ordering act on
single-bit components (|down>, |up>) as

    sx |down> = |up>        sy |down> =  i |up>       sz |down> = -|down>
    sx |up>   = |down>      sy |up>   = -i |down>     sz |up>   = +|up>

State vectors are plain complex arrays of length 2^N, optionally with a
trailing batch axis (shape (2^N, B)) so that many columns can be driven
through the kernels at once.  Normalization is never assumed.

apply_charge is the innermost kernel of the projector engine: it writes
R_i v term by term into a caller-provided output buffer using axis-swap
views, with no index tables and no per-call allocation beyond numpy
temporaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .model import DENSE_CAP, Couplings

__all__ = [
    "ChargeOperator",
    "charge_operators",
    "apply_charge",
    "dense_charge",
    "commutator_residual",
    "quadratic_operator_residual",
    "integrability_residuals",
    "hilbert_dim",
    "basis_state",
    "uniform_vacuum",
    "all_down_state",
    "up_count",
]

# 2x2 Pauli blocks in the (|down>, |up>) component order used here.
_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_SZ = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
_ID = np.eye(2, dtype=complex)
_PAULI = {"x": _SX, "y": _SY, "z": _SZ}


def hilbert_dim(n_spins: int) -> int:
    return 1 << n_spins


def basis_state(n_spins: int, index: int) -> np.ndarray:
    v = np.zeros(hilbert_dim(n_spins), dtype=complex)
    v[index] = 1.0
    return v


def all_down_state(n_spins: int) -> np.ndarray:
    return basis_state(n_spins, 0)


def uniform_vacuum(n_spins: int) -> np.ndarray:
    """Normalized uniform superposition of all basis states.

    Has weight in every magnetization sector and both up-count parity
    sectors, so it overlaps every eigenstate of any model in this family
    outside of accidental orthogonality.
    """
    dim = hilbert_dim(n_spins)
    return np.full(dim, 1.0 / np.sqrt(dim), dtype=complex)


def up_count(n_spins: int) -> np.ndarray:
    """Number of up spins for each basis index."""
    return np.bitwise_count(np.arange(hilbert_dim(n_spins), dtype=np.uint64)).astype(
        np.int64
    )


@dataclass(frozen=True)
class ChargeOperator:
    """One conserved charge R_i as a list of weighted Pauli strings.

    field = (B^x_i, B^y_i, B^z_i) acts on `site` alone; xx/yy/zz hold the
    two-spin coefficients X_ij, Y_ij, Z_ij indexed by j (entry at j = site
    is zero and unused).  All coefficients are real, so the operator is
    Hermitian.
    """

    site: int
    n_spins: int
    field: tuple[float, float, float]
    xx: np.ndarray
    yy: np.ndarray
    zz: np.ndarray

    def terms(self) -> Iterator[tuple[str, tuple[int, ...], float]]:
        """Yield the 3 + 3(N-1) Pauli-string terms as (axes, sites, coeff)."""
        i = self.site
        for axis, coeff in zip("xyz", self.field):
            yield axis, (i,), coeff
        for j in range(self.n_spins):
            if j == i:
                continue
            yield "xx", (i, j), float(self.xx[j])
            yield "yy", (i, j), float(self.yy[j])
            yield "zz", (i, j), float(self.zz[j])


def charge_operators(couplings: Couplings) -> tuple[ChargeOperator, ...]:
    """Matrix-free representations of all N charges of a model."""
    n = couplings.n_spins
    ops = []
    for i in range(n):
        ops.append(
            ChargeOperator(
                site=i,
                n_spins=n,
                field=(
                    float(couplings.Bx[i]),
                    float(couplings.By[i]),
                    float(couplings.Bz[i]),
                ),
                xx=couplings.X[i],
                yy=couplings.Y[i],
                zz=couplings.Z[i],
            )
        )
    return tuple(ops)


def _tensor_views(a: np.ndarray, n_spins: int):
    """Reshape (dim, ...) -> (2,)*n + batch, bits as leading axes."""
    return a.reshape((2,) * n_spins + a.shape[1:])


def _bit_axis(n_spins: int, site: int) -> int:
    # C-order reshape puts bit n-1 on axis 0; bit k lives on axis n-1-k.
    return n_spins - 1 - site


def apply_charge(
    op: ChargeOperator, v: np.ndarray, out: np.ndarray | None = None
) -> np.ndarray:
    """Compute out = R_i v for a state vector or batch of column vectors.

    v has shape (2^N,) or (2^N, B).  out, if given, must be a complex array
    of the same shape not sharing memory with v; it is overwritten.  Cost is
    O(N 2^N) per column.  Only the single-spin B^y term introduces imaginary
    parts; xx, yy, zz and B^x, B^z actions are exactly real-to-real.
    """
    n = op.n_spins
    dim = 1 << n
    v = np.asarray(v)
    if v.shape[0] != dim:
        raise ValueError(f"state has leading dimension {v.shape[0]}, expected {dim}")
    if out is None:
        out = np.zeros(v.shape, dtype=complex)
    else:
        if out.shape != v.shape or not np.issubdtype(out.dtype, np.complexfloating):
            raise ValueError("out must be a complex array with the same shape as v")
        if np.may_share_memory(out, v):
            raise ValueError("out must not share memory with v")
        out[...] = 0.0

    w = _tensor_views(v, n)
    o = _tensor_views(out, n)
    i = op.site
    ax_i = _bit_axis(n, i)

    bx, by, bz = op.field
    wi = np.moveaxis(w, ax_i, 0)
    oi = np.moveaxis(o, ax_i, 0)
    if bx != 0.0:
        oi[0] += bx * wi[1]
        oi[1] += bx * wi[0]
    if by != 0.0:
        oi[0] += (-1j * by) * wi[1]
        oi[1] += (1j * by) * wi[0]
    if bz != 0.0:
        oi[0] -= bz * wi[0]
        oi[1] += bz * wi[1]

    for j in range(n):
        if j == i:
            continue
        x, y, z = float(op.xx[j]), float(op.yy[j]), float(op.zz[j])
        if x == 0.0 and y == 0.0 and z == 0.0:
            continue
        ax_j = _bit_axis(n, j)
        wij = np.moveaxis(w, (ax_i, ax_j), (0, 1))
        oij = np.moveaxis(o, (ax_i, ax_j), (0, 1))
        # sx sx + sy sy: double flip; the two i-factors of sy sy multiply to
        # a real sign, giving x -/+ y weights on the anti-/aligned sources.
        d = x - y
        s = x + y
        if d != 0.0:
            oij[1, 1] += d * wij[0, 0]
            oij[0, 0] += d * wij[1, 1]
        if s != 0.0:
            oij[1, 0] += s * wij[0, 1]
            oij[0, 1] += s * wij[1, 0]
        if z != 0.0:
            oij[0, 0] += z * wij[0, 0]
            oij[1, 1] += z * wij[1, 1]
            oij[0, 1] -= z * wij[0, 1]
            oij[1, 0] -= z * wij[1, 0]
    return out


def _pauli_string_dense(n_spins: int, factors: dict[int, np.ndarray]) -> np.ndarray:
    """Kronecker-product matrix of a Pauli string, identity elsewhere.

    Built most-significant bit first so that row/column indices follow the
    little-endian basis convention.
    """
    m = np.array([[1.0 + 0.0j]])
    for site in range(n_spins - 1, -1, -1):
        m = np.kron(m, factors.get(site, _ID))
    return m


def dense_charge(op: ChargeOperator, dense_cap: int = DENSE_CAP) -> np.ndarray:
    """Materialize R_i as a dense 2^N x 2^N matrix via Kronecker products.

    Deliberately independent of apply_charge; serves as its cross-check
    oracle and as the input to dense diagnostics.  Refuses N above
    dense_cap.
    """
    if op.n_spins > dense_cap:
        raise ValueError(
            f"dense_charge requires n_spins <= {dense_cap}, got {op.n_spins}"
        )
    dim = 1 << op.n_spins
    m = np.zeros((dim, dim), dtype=complex)
    for axes, sites, coeff in op.terms():
        if coeff == 0.0:
            continue
        factors = {s: _PAULI[a] for s, a in zip(sites, axes)}
        m += coeff * _pauli_string_dense(op.n_spins, factors)
    return m


def commutator_residual(
    couplings: Couplings, i: int, j: int, dense_cap: int = DENSE_CAP
) -> float:
    """|| [R_i, R_j] ||_F / (||R_i||_F ||R_j||_F); ~1e-15 when integrable."""
    ops = charge_operators(couplings)
    ri = dense_charge(ops[i], dense_cap)
    rj = dense_charge(ops[j], dense_cap)
    return _commutator_residual_dense(ri, rj)


def _commutator_residual_dense(ri: np.ndarray, rj: np.ndarray) -> float:
    comm = ri @ rj - rj @ ri
    denom = np.linalg.norm(ri) * np.linalg.norm(rj)
    return float(np.linalg.norm(comm) / denom)


def quadratic_operator_residual(
    couplings: Couplings, i: int, dense_cap: int = DENSE_CAP
) -> float:
    """Relative defect of R_i^2 = sum_j Gamma_ij R_j + K_i at operator level."""
    ops = charge_operators(couplings)
    dense = [dense_charge(op, dense_cap) for op in ops]
    return _quadratic_residual_dense(couplings, dense, i)


def _quadratic_residual_dense(
    couplings: Couplings, dense: list[np.ndarray], i: int
) -> float:
    dim = dense[i].shape[0]
    lhs = dense[i] @ dense[i]
    rhs = couplings.K[i] * np.eye(dim, dtype=complex)
    for j in range(couplings.n_spins):
        if j != i:
            rhs = rhs + couplings.Gamma[i, j] * dense[j]
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs))


def integrability_residuals(
    couplings: Couplings, dense_cap: int = DENSE_CAP
) -> tuple[np.ndarray, np.ndarray]:
    """All pairwise commutator residuals and all quadratic-relation residuals.

    Returns (comm, quad): comm is N x N (zero diagonal, symmetric layout),
    quad is length N.  Builds each dense charge once.
    """
    n = couplings.n_spins
    ops = charge_operators(couplings)
    dense = [dense_charge(op, dense_cap) for op in ops]
    comm = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            comm[i, j] = comm[j, i] = _commutator_residual_dense(dense[i], dense[j])
    quad = np.array([_quadratic_residual_dense(couplings, dense, i) for i in range(n)])
    return comm, quad
