"""Paired-qubit null-eigenspace code and the four-qubit singlet code."""

from dataclasses import dataclass
from itertools import product
from typing import NamedTuple, Optional

import numpy as np

from .errors import CodeConstructionError, ShapeError, ValidationError
from .models import pauli_axis_op
from .operators import I2, KERNEL_TOL, PAULIS, embed, kernel_basis, kron

FULL_LEAKAGE = 1.0 - 1e-14


@dataclass(frozen=True)
class PairOperatorSet:
    operators: tuple
    mismatch: float
    axes: tuple

    @classmethod
    def build(cls, axes, mismatch=0.0):
        axes = tuple(axes)
        ops = tuple(pair_operator(a, mismatch) for a in axes)
        return cls(ops, float(mismatch), axes)

    def embedded(self, layout):
        """Each pair operator lifted to the full qubit register."""
        qdims = (2,) * layout.num_qubits
        return [embed(x, pair, qdims) for x, pair in zip(self.operators, layout.pairing)]


@dataclass(frozen=True)
class CodeSpace:
    isometry: np.ndarray
    logical_dim: int
    basis_labels: tuple

    @property
    def projector(self):
        return self.isometry @ self.isometry.conj().T

    @property
    def physical_dim(self):
        return self.isometry.shape[0]


class Decoded(NamedTuple):
    logical: Optional[np.ndarray]
    leakage: float


def pair_operator(axis, mismatch=0.0):
    """``S (x) I + (1 + mismatch) I (x) S`` on one qubit pair."""
    s = pauli_axis_op(axis)
    return kron(s, I2) + (1.0 + mismatch) * kron(I2, s)


def code_space(pair_ops, layout, tol=KERNEL_TOL):
    """Tensor product of the per-pair kernels, placed on the paired qubits.

    Logical index bits follow pair order (pair 0 most significant). Raises
    :class:`CodeConstructionError` if any pair kernel is not two-dimensional.
    """
    pairing = layout.pairing
    if len(pair_ops.operators) != len(pairing):
        raise ValidationError("one pair operator per layout pair is required")
    covered = sorted(q for pair in pairing for q in pair)
    if covered != list(range(layout.num_qubits)):
        raise ValidationError("every qubit must belong to a pair to build the code")
    kernels = []
    for pair, x in zip(pairing, pair_ops.operators):
        k = kernel_basis(x, tol)
        if k.shape[1] != 2:
            raise CodeConstructionError(pair, k.shape[1])
        kernels.append(k)
    nq = layout.num_qubits
    # kron over pairs lives on qubit order (pair0 qubits, pair1 qubits, ...)
    order = [q for pair in pairing for q in pair]
    inv = np.argsort(order)
    cols = []
    for bits in product(range(2), repeat=len(kernels)):
        v = np.array([1.0 + 0j])
        for k, b in zip(kernels, bits):
            v = np.kron(v, k[:, b])
        v = v.reshape((2,) * nq).transpose(inv).reshape(-1)
        cols.append(v)
    iso = np.column_stack(cols)
    labels = tuple("".join(map(str, bits))
                   for bits in product(range(2), repeat=len(kernels)))
    return CodeSpace(iso, iso.shape[1], labels)


def encode(logical, code):
    psi = np.asarray(logical, dtype=complex).reshape(-1)
    if psi.shape[0] != code.logical_dim:
        raise ShapeError(f"logical ket of length {psi.shape[0]}, code has "
                         f"{code.logical_dim}")
    return code.isometry @ psi


def decode(physical, code):
    """Project onto the code; the logical ket is None when nothing is left."""
    phi = np.asarray(physical, dtype=complex).reshape(-1)
    if phi.shape[0] != code.physical_dim:
        raise ShapeError(f"physical ket of length {phi.shape[0]}, code has "
                         f"{code.physical_dim}")
    amp = code.isometry.conj().T @ phi
    kept = float(np.vdot(amp, amp).real)
    leakage = min(1.0, max(0.0, 1.0 - kept))
    if leakage >= FULL_LEAKAGE:
        return Decoded(None, leakage)
    return Decoded(amp / np.sqrt(kept), leakage)


def total_spin_operators(num_qubits=4):
    qdims = (2,) * num_qubits
    return {a: sum(embed(PAULIS[a], [q], qdims) for q in range(num_qubits))
            for a in "xyz"}


def singlet_code_4qubit(tol=KERNEL_TOL):
    """Total-spin-zero subspace of four qubits (two logical states).

    Found as the kernel of ``J_x^2 + J_y^2 + J_z^2``, which is the
    intersection of the kernels of the three collective generators.
    """
    j = total_spin_operators(4)
    casimir = sum(op @ op for op in j.values())
    iso = kernel_basis(casimir, tol)
    return CodeSpace(iso, iso.shape[1], tuple(f"{i}_L" for i in range(iso.shape[1])))
