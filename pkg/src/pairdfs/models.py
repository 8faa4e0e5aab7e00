"""Hamiltonian families over a qubits (x) truncated-boson layout.

Units have hbar = 1. Every model is a list of ``coefficient * system_op (x)
bath_op`` terms; the bath part of a qubit-only term is the bath identity.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, ValidationError
from .operators import (
    PAULIS,
    SZ,
    SystemLayout,
    annihilation,
    embed,
    hermitian_eig,
    require_hermitian,
)


@dataclass(frozen=True)
class AxisVector:
    """Direction ``n`` (stored normalized) and strength ``s`` of ``s n.sigma``."""

    direction: tuple
    strength: float = 1.0

    def __post_init__(self):
        n = np.asarray(self.direction, dtype=float)
        if n.shape != (3,):
            raise ValidationError("axis direction must be a 3-vector")
        norm = np.linalg.norm(n)
        if not np.isfinite(norm) or norm == 0.0:
            raise ValidationError("axis direction must be nonzero")
        if self.strength < 0:
            raise ValidationError("axis strength must be >= 0")
        object.__setattr__(self, "direction", tuple(float(c) for c in n / norm))
        object.__setattr__(self, "strength", float(self.strength))


@dataclass(frozen=True)
class Mode:
    omega: float
    n_max: int

    def __post_init__(self):
        if not self.omega > 0:
            raise ValidationError("mode frequency must be > 0")
        if int(self.n_max) < 2:
            raise ValidationError("mode truncation n_max must be >= 2")
        object.__setattr__(self, "n_max", int(self.n_max))


@dataclass(frozen=True)
class BathSpec:
    """Bath modes and the real coupling table ``g[l, k]`` (one row per qubit)."""

    modes: tuple
    couplings: np.ndarray

    def __post_init__(self):
        modes = tuple(m if isinstance(m, Mode) else Mode(*m) for m in self.modes)
        g = np.asarray(self.couplings, dtype=float)
        if g.ndim != 2 or g.shape[1] != len(modes):
            raise ValidationError(
                f"coupling table shape {g.shape} does not match {len(modes)} modes"
            )
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "couplings", g)

    @classmethod
    def empty(cls, num_qubits):
        return cls((), np.zeros((num_qubits, 0)))

    @property
    def dims(self):
        return tuple(m.n_max for m in self.modes)

    @property
    def dim(self):
        return int(np.prod(self.dims, dtype=np.int64))

    def annihilators(self):
        """Annihilation operator of every mode embedded in the bath space."""
        return [embed(annihilation(m.n_max), [k], self.dims)
                for k, m in enumerate(self.modes)]

    def free_hamiltonian(self):
        h = np.zeros((self.dim, self.dim), dtype=complex)
        for m, a in zip(self.modes, self.annihilators()):
            h += m.omega * (a.conj().T @ a)
        return h

    def position_operator(self, row):
        """``sum_k g_k (a_k + a_k^dagger)`` for one coupling row."""
        b = np.zeros((self.dim, self.dim), dtype=complex)
        for gk, a in zip(row, self.annihilators()):
            b += gk * (a + a.conj().T)
        return b


@dataclass(frozen=True)
class GeneralCouplingSpec:
    """Complex amplitudes ``c[l, alpha, k]`` with alpha in (x, y, z).

    Each amplitude contributes ``sigma_l^alpha (x) (c a_k + conj(c) a_k^dagger)``.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.amplitudes, dtype=complex)
        if c.ndim != 3 or c.shape[1] != 3:
            raise ValidationError("amplitude table must have shape (qubits, 3, modes)")
        object.__setattr__(self, "amplitudes", c)

    @classmethod
    def random(cls, num_qubits, num_modes, rng, scale=1.0):
        shape = (num_qubits, 3, num_modes)
        c = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        return cls(scale * c)


@dataclass(frozen=True)
class Term:
    system_op: np.ndarray
    bath_op: np.ndarray
    coefficient: float = 1.0


@dataclass
class HamiltonianModel:
    layout: SystemLayout
    terms: list = field(default_factory=list)
    _total: np.ndarray = field(default=None, init=False, repr=False)

    def __post_init__(self):
        dq, db = self.layout.qubit_dim, self.layout.bath_dim
        for t in self.terms:
            if t.system_op.shape != (dq, dq) or t.bath_op.shape != (db, db):
                raise ShapeError("term shapes do not match the layout")

    @property
    def total(self):
        if self._total is None:
            d = self.layout.dim
            h = np.zeros((d, d), dtype=complex)
            for t in self.terms:
                h += t.coefficient * np.kron(t.system_op, t.bath_op)
            require_hermitian(h, "model total")
            self._total = h
        return self._total

    def __add__(self, other):
        if other.layout != self.layout:
            raise ShapeError("cannot add models on different layouts")
        return HamiltonianModel(self.layout, list(self.terms) + list(other.terms))

    def acts_on_qubits_only(self, tol=1e-12):
        db = self.layout.bath_dim
        eye = np.eye(db)
        for t in self.terms:
            c = np.trace(t.bath_op) / db
            if np.max(np.abs(t.bath_op - c * eye), initial=0.0) > tol * (1 + abs(c)):
                return False
        return True

    def system_part(self):
        """Qubit operator of a model whose every bath factor is a multiple of I."""
        if not self.acts_on_qubits_only():
            raise ValidationError("model acts nontrivially on the bath")
        db = self.layout.bath_dim
        dq = self.layout.qubit_dim
        h = np.zeros((dq, dq), dtype=complex)
        for t in self.terms:
            h += t.coefficient * (np.trace(t.bath_op) / db) * t.system_op
        return h


def pauli_axis_op(axis):
    """``s (n_x sigma_x + n_y sigma_y + n_z sigma_z)``."""
    n = axis.direction
    return axis.strength * (n[0] * PAULIS["x"] + n[1] * PAULIS["y"] + n[2] * PAULIS["z"])


def su2_canonicalize(s_op):
    """Return ``(u, s)`` with ``u`` in SU(2) and ``u s_op u^dagger = s sigma_z``."""
    s_op = require_hermitian(s_op, "s_op")
    if s_op.shape != (2, 2):
        raise ValidationError("su2_canonicalize expects a 2x2 operator")
    scale = max(1.0, float(np.max(np.abs(s_op))))
    if abs(np.trace(s_op)) > 1e-12 * scale:
        raise ValidationError("s_op must be traceless")
    sd = hermitian_eig(s_op)
    s = float(sd.eigenvalues[1])
    if s <= 1e-12 * scale:
        raise ValidationError("s_op must be nonzero")
    # rows: <+| then <-|, so u s_op u^dagger = diag(s, -s)
    u = np.vstack([sd.vectors[:, 1].conj(), sd.vectors[:, 0].conj()])
    u = u * np.exp(-0.5j * np.angle(np.linalg.det(u)))
    return u, s


def _bath_free_term(layout, bath):
    return Term(np.eye(layout.qubit_dim, dtype=complex), bath.free_hamiltonian())


def _check_bath(layout, bath):
    if bath.dims != layout.bath_dims:
        raise ValidationError(
            f"bath dims {bath.dims} do not match layout {layout.bath_dims}"
        )
    if bath.couplings.shape[0] != layout.num_qubits:
        raise ValidationError("coupling table needs one row per qubit")


def build_dephasing_model(layout, axes, bath, mismatch=0.0):
    """Paired pure-dephasing coupling plus the bath free Hamiltonian.

    Pair ``(l, l')`` with axis operator ``S`` contributes
    ``S_l (x) B_l + (1 + mismatch) S_l' (x) B_l'`` where
    ``B_q = sum_k g[q, k] (a_k + a_k^dagger)``. With equal coupling rows
    inside a pair this is ``(S_l + (1 + mismatch) S_l') (x) B_pair``.
    """
    _check_bath(layout, bath)
    axes = list(axes)
    if len(axes) != len(layout.pairing):
        raise ValidationError(
            f"{len(axes)} axes given for {len(layout.pairing)} pairs"
        )
    paired = {q for pair in layout.pairing for q in pair}
    for q in range(layout.num_qubits):
        if q not in paired and np.any(bath.couplings[q] != 0):
            raise ValidationError(f"qubit {q} is coupled but not in any pair")
    qubit_ops = {}
    for (l, lp), axis in zip(layout.pairing, axes):
        s = pauli_axis_op(axis)
        qubit_ops[l] = s
        qubit_ops[lp] = (1.0 + mismatch) * s
    return build_qubit_bath_model(layout, qubit_ops, bath)


def build_qubit_bath_model(layout, qubit_ops, bath):
    """``sum_q S_q (x) B_q + H_bath`` for one-qubit operators ``{q: S_q}``.

    ``B_q = sum_k g[q, k] (a_k + a_k^dagger)``; no pairing is required.
    """
    _check_bath(layout, bath)
    qdims = (2,) * layout.num_qubits
    terms = [_bath_free_term(layout, bath)]
    for q, s in sorted(qubit_ops.items()):
        s = require_hermitian(s, f"S_{q}")
        terms.append(Term(embed(s, [q], qdims), bath.position_operator(bath.couplings[q])))
    return HamiltonianModel(layout, terms)


def build_general_model(layout, spec, bath):
    """Generic linear coupling of every Pauli generator to every mode."""
    _check_bath(layout, bath)
    c = spec.amplitudes
    if c.shape != (layout.num_qubits, 3, len(bath.modes)):
        raise ValidationError(
            f"amplitude table {c.shape} does not match "
            f"({layout.num_qubits}, 3, {len(bath.modes)})"
        )
    qdims = (2,) * layout.num_qubits
    a_ops = bath.annihilators()
    terms = [_bath_free_term(layout, bath)]
    for l in range(layout.num_qubits):
        for ai, alpha in enumerate("xyz"):
            sig = embed(PAULIS[alpha], [l], qdims)
            for k, a in enumerate(a_ops):
                amp = c[l, ai, k]
                if amp == 0:
                    continue
                terms.append(Term(sig, amp * a + np.conj(amp) * a.conj().T))
    return HamiltonianModel(layout, terms)


def reduce_to_dephasing(spec, tol=1e-12):
    """Rewrite a general coupling as ``S_l (x) sum_k g_lk (a_k + a_k^dagger)``.

    Succeeds only when each qubit couples through a single real combination
    of Pauli generators (Hermitian sl(2) element) with a mode profile that
    does not depend on the generator, and whose amplitudes are real.

    Returns
    -------
    axes : list of AxisVector or None
        Per-qubit axis with unit strength; None for uncoupled qubits.
    couplings : ndarray, shape (qubits, modes)
        Real coupling table ``g``.
    """
    c = spec.amplitudes
    nq, _, nk = c.shape
    if np.max(np.abs(c.imag), initial=0.0) > tol:
        raise ValidationError("amplitudes are not real: coupling is not S (x) B form")
    c = c.real
    axes, g = [], np.zeros((nq, nk))
    for l in range(nq):
        m = c[l]
        if np.max(np.abs(m), initial=0.0) <= tol:
            axes.append(None)
            continue
        u, sv, vt = np.linalg.svd(m)
        if sv.size > 1 and sv[1] > tol * max(1.0, sv[0]):
            raise ValidationError(
                f"qubit {l}: bath operator depends on the generator label"
            )
        n = u[:, 0]
        row = sv[0] * vt[0]
        pivot = np.argmax(np.abs(n))
        if n[pivot] < 0:
            n, row = -n, -row
        axes.append(AxisVector(tuple(n), 1.0))
        g[l] = row
    return axes, g


def build_free_qubit_model(layout, frequencies):
    """``sum_l (omega_l / 2) sigma_z^l`` on the qubits, identity on the bath."""
    freqs = np.asarray(frequencies, dtype=float)
    if freqs.shape != (layout.num_qubits,):
        raise ValidationError("need one frequency per qubit")
    qdims = (2,) * layout.num_qubits
    h = sum((w / 2) * embed(SZ, [q], qdims) for q, w in enumerate(freqs))
    db = layout.bath_dim
    return HamiltonianModel(layout, [Term(np.asarray(h, dtype=complex),
                                          np.eye(db, dtype=complex))])


def build_fhe_drive(h_sys, mistune=0.0):
    """Drive ``-(1 - mistune) H_sys`` meant to cancel the free Hamiltonian."""
    if not h_sys.acts_on_qubits_only():
        raise ValidationError("FHE drive requires a qubit-only Hamiltonian")
    w = -(1.0 - mistune)
    terms = [Term(t.system_op, t.bath_op, w * t.coefficient) for t in h_sys.terms]
    return HamiltonianModel(h_sys.layout, terms)


def collective_operator(axis, num_qubits):
    """``sum_i S^(i)`` with the same axis on every qubit."""
    s = pauli_axis_op(axis)
    qdims = (2,) * num_qubits
    return sum(embed(s, [q], qdims) for q in range(num_qubits))
