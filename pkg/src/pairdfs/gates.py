"""Gate-constraint analysis: the shift constraint ``[H, X] = n I`` and commutants.

All linear problems are posed over the real vector space of Hermitian
matrices, parameterized by the Frobenius-orthonormal basis from
:func:`pairdfs.operators.hermitian_basis`.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ShapeError, ValidationError
from .operators import (
    as_matrix,
    commutator,
    hermitian_basis,
    propagator,
    require_hermitian,
)

NULL_TOL = 1e-9


@dataclass(frozen=True)
class ConstraintReport:
    dim: int
    residual: float
    certified_n: complex
    analytic_residual: float
    solver_tol: float
    solution: np.ndarray

    @property
    def consistent(self):
        """Residual agrees with the analytic value ``||target||_F``."""
        return abs(self.residual - self.analytic_residual) <= self.solver_tol


@dataclass(frozen=True)
class CommutantBasis:
    generators: tuple
    dimension: int


@dataclass(frozen=True)
class CertificateVerdict:
    claimed_n: complex
    dim: int
    trace_commutator: complex
    trace_claim: complex
    trace_mismatch: float
    anti_hermitian_defect: float
    commutator_residual: float
    accepted: bool

    @property
    def verdict(self):
        return "ACCEPT" if self.accepted else "REJECT"


@dataclass(frozen=True)
class ShiftDefect:
    norm: float
    trace: complex
    best_scalar: complex
    delta: np.ndarray


def _real_columns(images):
    """Stack complex images (one per basis element) as a real matrix."""
    m = np.array([im.reshape(-1) for im in images]).T
    return np.vstack([m.real, m.imag])


def _from_coeffs(coeffs, basis):
    return np.tensordot(coeffs, basis, axes=1)


def solve_shift_constraint(x, target=None, solver_tol=1e-8):
    """Least-squares minimize ``||[H, x] - target||_F`` over Hermitian H.

    ``target`` defaults to the identity. The commutator of two Hermitian
    matrices is traceless, so for the identity the minimum is exactly
    ``sqrt(d)``.
    """
    x = require_hermitian(x, "x")
    d = x.shape[0]
    if target is None:
        target = np.eye(d, dtype=complex)
    target = as_matrix(target)
    if target.shape != x.shape:
        raise ShapeError("target shape differs from x")
    basis = hermitian_basis(d)
    a = _real_columns([commutator(g, x) for g in basis])
    flat = target.reshape(-1)
    b = np.concatenate([flat.real, flat.imag])
    coeffs, *_ = np.linalg.lstsq(a, b, rcond=None)
    h = _from_coeffs(coeffs, basis)
    achieved = commutator(h, x)
    residual = float(np.linalg.norm(achieved - target))
    return ConstraintReport(
        dim=d,
        residual=residual,
        certified_n=complex(np.trace(achieved) / d),
        analytic_residual=_trace_part(target),
        solver_tol=solver_tol,
        solution=h,
    )


def _trace_part(target):
    # the identity component of the target is unreachable by any commutator
    d = target.shape[0]
    return float(abs(np.trace(target)) / np.sqrt(d))


def trace_certificate(x, h, n, tol=1e-10):
    """Check a claimed relation ``[h, x] = n I`` against the trace obstruction.

    The trace of any commutator vanishes while ``tr(n I) = n d``, so only
    ``n = 0`` can hold; the claim is accepted only when ``|n| <= tol`` and the
    commutator itself is within ``tol`` (relative) of ``n I``.
    """
    x = require_hermitian(x, "x")
    h = require_hermitian(h, "h")
    if x.shape != h.shape:
        raise ShapeError(f"x {x.shape} and h {h.shape} differ")
    d = x.shape[0]
    c = commutator(h, x)
    tr_c = complex(np.trace(c))
    claim = complex(n) * d
    scale = 1.0 + np.linalg.norm(h, 2) * np.linalg.norm(x, 2)
    resid = float(np.linalg.norm(c - complex(n) * np.eye(d)))
    accepted = abs(complex(n)) <= tol and resid <= tol * scale
    return CertificateVerdict(
        claimed_n=complex(n),
        dim=d,
        trace_commutator=tr_c,
        trace_claim=claim,
        trace_mismatch=abs(tr_c - claim),
        anti_hermitian_defect=float(np.linalg.norm(c + c.conj().T)),
        commutator_residual=resid,
        accepted=bool(accepted),
    )


def shift_evolution_check(h_g, x, t):
    """``Delta = U x U^dagger - x`` with ``U = exp(-i h_g t)``."""
    h_g = require_hermitian(h_g, "h_g")
    x = require_hermitian(x, "x")
    if h_g.shape != x.shape:
        raise ShapeError("h_g and x differ in shape")
    u = propagator(h_g, t)
    delta = u @ x @ u.conj().T - x
    tr = complex(np.trace(delta))
    return ShiftDefect(float(np.linalg.norm(delta)), tr, tr / x.shape[0], delta)


def _null_hermitian(a, basis, tol):
    if a.shape[0] == 0:
        coeffs = np.eye(basis.shape[0])
    else:
        coeffs = scipy.linalg.null_space(a, rcond=tol).T
    gens = tuple(_from_coeffs(c, basis) for c in coeffs)
    return CommutantBasis(gens, len(gens))


def commutant_basis(xs, tol=NULL_TOL):
    """Frobenius-orthonormal Hermitian basis of ``{A : [A, x] = 0 for all x}``."""
    xs = [require_hermitian(x, "constraint operator") for x in xs]
    if not xs:
        raise ValidationError("commutant of an empty family is undefined")
    d = xs[0].shape[0]
    if any(x.shape != (d, d) for x in xs):
        raise ShapeError("constraint operators differ in dimension")
    basis = hermitian_basis(d)
    a = np.vstack([_real_columns([commutator(g, x) for g in basis]) for x in xs])
    return _null_hermitian(a, basis, tol)


def gate_preserves_code(h_g, code, t):
    """Leakage amplitude ``||(I - P) U(t) P||_F`` of the gate out of the code."""
    h_g = require_hermitian(h_g, "h_g")
    p = code.projector
    if h_g.shape != p.shape:
        raise ShapeError(f"gate {h_g.shape} does not act on code space {p.shape}")
    u = propagator(h_g, t)
    return float(np.linalg.norm(u @ p - p @ u @ p))


def conserved_observable_space(model, tol=NULL_TOL):
    """Hermitian qubit operators ``A`` with ``[H_total, A (x) I_bath] = 0``."""
    h = model.total
    dq = model.layout.qubit_dim
    eye_b = np.eye(model.layout.bath_dim)
    basis = hermitian_basis(dq)
    a = _real_columns([commutator(h, np.kron(g, eye_b)) for g in basis])
    if not np.any(a):
        return CommutantBasis(tuple(basis), len(basis))
    return _null_hermitian(a, basis, tol)
