"""Dense complex linear algebra on qubit and truncated-boson spaces.

Operators are plain ``numpy`` complex arrays. Tensor factors are ordered
big-endian: factor 0 is the leftmost (most significant) slot of ``np.kron``.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import ContractViolation, ShapeError, ValidationError

HERMITIAN_TOL = 1e-12
KERNEL_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"x": SX, "y": SY, "z": SZ}


@dataclass(frozen=True)
class SystemLayout:
    """Tensor-factor layout: qubits first, then bath modes.

    Parameters
    ----------
    factor_dims : tuple of int
        Dimension of every tensor factor, qubits first.
    num_qubits : int
        How many of the leading factors are qubits.
    pairing : tuple of (int, int)
        Qubit pairs ``(l, l')``; each qubit appears in at most one pair.
    """

    factor_dims: tuple
    num_qubits: int
    pairing: tuple = ()

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        pairing = tuple((int(a), int(b)) for a, b in self.pairing)
        object.__setattr__(self, "factor_dims", dims)
        object.__setattr__(self, "pairing", pairing)
        if any(d < 1 for d in dims):
            raise ValidationError("factor dimensions must be positive")
        if not 0 <= self.num_qubits <= len(dims):
            raise ValidationError("num_qubits exceeds number of factors")
        if any(d != 2 for d in dims[: self.num_qubits]):
            raise ValidationError("qubit factors must have dimension 2")
        seen = [q for pair in pairing for q in pair]
        if len(seen) != len(set(seen)):
            raise ValidationError("a qubit appears in more than one pair")
        if any(not 0 <= q < self.num_qubits for q in seen):
            raise ValidationError("pair index outside the qubit range")

    @classmethod
    def paired(cls, num_pairs, bath_dims=()):
        """Qubits ``(0,1), (2,3), ...`` followed by bath modes."""
        nq = 2 * num_pairs
        return cls((2,) * nq + tuple(bath_dims), nq,
                   tuple((2 * p, 2 * p + 1) for p in range(num_pairs)))

    @property
    def dim(self):
        return int(np.prod(self.factor_dims, dtype=np.int64))

    @property
    def qubit_dim(self):
        return 2 ** self.num_qubits

    @property
    def bath_dims(self):
        return self.factor_dims[self.num_qubits:]

    @property
    def bath_dim(self):
        return int(np.prod(self.bath_dims, dtype=np.int64))

    def qubit_layout(self):
        """Same qubits and pairing, bath removed."""
        return SystemLayout((2,) * self.num_qubits, self.num_qubits, self.pairing)


@dataclass(frozen=True)
class SpectralDecomp:
    eigenvalues: np.ndarray
    vectors: np.ndarray


def as_matrix(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ShapeError(f"expected a matrix, got shape {a.shape}")
    return a


def _require_square(a, name="matrix"):
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{name} must be square, got {a.shape}")


def is_hermitian(a, tol=HERMITIAN_TOL):
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    if a.size == 0:
        return True
    scale = 1.0 + np.max(np.abs(a))
    return bool(np.max(np.abs(a - a.conj().T)) <= tol * scale)


def require_hermitian(a, name="operator", tol=HERMITIAN_TOL):
    a = as_matrix(a)
    _require_square(a, name)
    if not is_hermitian(a, tol):
        raise ContractViolation(f"{name} is not Hermitian")
    return a


def kron(*ops):
    """Kronecker product of one or more matrices, left factor most significant."""
    if not ops:
        raise ShapeError("kron needs at least one operand")
    return reduce(np.kron, (as_matrix(o) for o in ops))


def commutator(a, b):
    a, b = as_matrix(a), as_matrix(b)
    _require_square(a, "a")
    _require_square(b, "b")
    if a.shape != b.shape:
        raise ShapeError(f"commutator of {a.shape} and {b.shape}")
    return a @ b - b @ a


def embed(op, sites, dims):
    """Place ``op`` acting on factors ``sites`` into the full product space.

    ``sites`` need not be contiguous or sorted; ``op`` is interpreted in the
    order the sites are listed.
    """
    op = as_matrix(op)
    dims = tuple(dims)
    sites = tuple(sites)
    sub = [dims[s] for s in sites]
    k = int(np.prod(sub))
    if op.shape != (k, k):
        raise ShapeError(f"operator shape {op.shape} does not match sites {sites}")
    if len(set(sites)) != len(sites) or any(not 0 <= s < len(dims) for s in sites):
        raise ShapeError(f"bad site list {sites}")
    rest = [i for i in range(len(dims)) if i not in sites]
    rest_dim = int(np.prod([dims[i] for i in rest]))
    full = np.kron(op, np.eye(rest_dim, dtype=complex))
    # full acts on the factor order sites + rest; permute back to natural order
    order = list(sites) + rest
    n = len(dims)
    t = full.reshape([dims[i] for i in order] * 2)
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [n + i for i in inv])
    d = int(np.prod(dims))
    return t.reshape(d, d)


def orthonormal_span(vectors, tol=None):
    """Deterministic orthonormal basis of the column span of ``vectors``.

    The span is assumed to have dimension equal to the number of columns.
    Canonical basis vectors ``e_0, e_1, ...`` are projected onto the span in
    index order and Gram-Schmidt orthogonalised; each chosen vector has a
    real positive component on the ``e_j`` that produced it.
    """
    v = as_matrix(vectors)
    d, k = v.shape
    if k == 0:
        return np.zeros((d, 0), dtype=complex)
    q, _ = np.linalg.qr(v)
    proj = q @ q.conj().T
    # a residual above 0.5/sqrt(d) always exists until k vectors are found
    thresh = 0.5 / np.sqrt(d) if tol is None else tol
    out = []
    for j in range(d):
        r = proj[:, j].copy()
        for b in out:
            r -= b * (b.conj() @ r)
        nrm = np.linalg.norm(r)
        if nrm > thresh:
            r /= nrm
            for b in out:
                r -= b * (b.conj() @ r)
            r /= np.linalg.norm(r)
            out.append(r)
            if len(out) == k:
                break
    if len(out) != k:
        raise ContractViolation("could not build a canonical basis of the span")
    return np.column_stack(out)


def hermitian_eig(a, hermitian_tol=HERMITIAN_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues are ascending. Within each exactly degenerate cluster the
    eigenvectors are replaced by :func:`orthonormal_span`, so the basis does
    not depend on LAPACK's arbitrary choice inside the eigenspace.
    """
    a = require_hermitian(a, "hermitian_eig input", hermitian_tol)
    herm = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(herm)
    if w.size == 0:
        return SpectralDecomp(w, v)
    scale = max(1.0, float(np.max(np.abs(w))))
    cluster_tol = 1e-12 * scale
    v = v.copy()
    start = 0
    for i in range(1, w.size + 1):
        if i == w.size or w[i] - w[i - 1] > cluster_tol:
            v[:, start:i] = orthonormal_span(v[:, start:i])
            start = i
    return SpectralDecomp(w, v)


def propagator(h, t):
    """``exp(-i h t)`` from a spectral decomposition.

    ``h`` may also be a precomputed :class:`SpectralDecomp`.
    """
    sd = h if isinstance(h, SpectralDecomp) else hermitian_eig(h)
    phases = np.exp(-1j * sd.eigenvalues * t)
    return (sd.vectors * phases) @ sd.vectors.conj().T


def partial_trace(rho, layout, keep):
    """Reduce ``rho`` to the factors listed in ``keep`` (ascending order).

    ``layout`` may be a :class:`SystemLayout` or a sequence of factor dims.
    """
    dims = layout.factor_dims if isinstance(layout, SystemLayout) else tuple(layout)
    rho = as_matrix(rho)
    d = int(np.prod(dims))
    if rho.shape != (d, d):
        raise ShapeError(f"rho shape {rho.shape} does not match dimension {d}")
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    if any(not 0 <= k < n for k in keep):
        raise ShapeError(f"keep indices {keep} outside 0..{n - 1}")
    t = rho.reshape(list(dims) * 2)
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out = keep + [n + i for i in keep]
    kd = int(np.prod([dims[i] for i in keep]))
    return np.einsum(t, row + col, out).reshape(kd, kd)


def kernel_basis(a, tol=KERNEL_TOL):
    """Orthonormal basis (columns) of the numerical kernel of Hermitian ``a``.

    An eigenvector counts as null when ``|lambda| <= tol * ||a||_2``. The
    returned basis is canonical (see :func:`orthonormal_span`).
    """
    a = require_hermitian(a, "kernel_basis input")
    herm = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(herm)
    norm = float(np.max(np.abs(w))) if w.size else 0.0
    null = np.abs(w) <= tol * norm
    return orthonormal_span(v[:, null])


def projector(isometry):
    iso = as_matrix(isometry)
    return iso @ iso.conj().T


def hermitian_basis(d):
    """Frobenius-orthonormal real basis of the d x d Hermitian matrices.

    Returns an array of shape ``(d*d, d, d)``.
    """
    out = np.zeros((d * d, d, d), dtype=complex)
    m = 0
    for j in range(d):
        out[m, j, j] = 1.0
        m += 1
    s = 1.0 / np.sqrt(2.0)
    for j in range(d):
        for k in range(j + 1, d):
            out[m, j, k] = out[m, k, j] = s
            m += 1
            out[m, j, k] = -1j * s
            out[m, k, j] = 1j * s
            m += 1
    return out


def random_hermitian(d, rng):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (m + m.conj().T)


def random_ket(d, rng):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def annihilation(n_max):
    """Truncated boson annihilation operator on ``n_max`` number states."""
    return np.diag(np.sqrt(np.arange(1, n_max)), k=1).astype(complex)
