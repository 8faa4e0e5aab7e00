"""Closed joint unitary evolution and reduced-state metrics."""

from dataclasses import dataclass

import numpy as np

from .codec import encode
from .errors import ShapeError, ValidationError
from .models import AxisVector, BathSpec, Mode, build_qubit_bath_model, pauli_axis_op
from .operators import SystemLayout, hermitian_eig, partial_trace


@dataclass(frozen=True)
class EvolutionTrace:
    times: np.ndarray
    fidelities: np.ndarray
    coherences: np.ndarray
    purities: np.ndarray
    leakages: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        for name in ("fidelities", "coherences", "purities", "leakages"):
            if len(getattr(self, name)) != n:
                raise ShapeError(f"{name} length differs from times")

    def rows(self):
        return zip(self.times, self.fidelities, self.coherences,
                   self.purities, self.leakages)


def vacuum(bath_dims):
    v = np.zeros(int(np.prod(bath_dims, dtype=np.int64)), dtype=complex)
    v[0] = 1.0
    return v


def evolve(model, psi0, times):
    """Joint kets ``exp(-i H t) psi0`` for each t, rows of the returned array.

    One spectral decomposition of the model total is shared by all times.
    """
    h = model.total
    psi0 = np.asarray(psi0, dtype=complex).reshape(-1)
    if psi0.shape[0] != h.shape[0]:
        raise ShapeError(f"initial ket length {psi0.shape[0]}, model dim {h.shape[0]}")
    sd = hermitian_eig(h)
    coeffs = sd.vectors.conj().T @ psi0
    times = np.asarray(times, dtype=float)
    phases = np.exp(-1j * np.outer(times, sd.eigenvalues))
    return (phases * coeffs) @ sd.vectors.T


def reduced_qubit_state(ket, layout):
    rho = np.outer(ket, ket.conj())
    if layout.num_qubits == len(layout.factor_dims):
        return rho
    return partial_trace(rho, layout, range(layout.num_qubits))


def coherence(rho, basis=None):
    """Sum of off-diagonal magnitudes of ``rho`` in the columns of ``basis``."""
    if basis is not None:
        rho = basis.conj().T @ rho @ basis
    return float(np.sum(np.abs(rho)) - np.sum(np.abs(np.diag(rho))))


def purity(rho):
    return float(np.real(np.trace(rho @ rho)))


def product_eigenbasis(unitaries):
    """Columns of the product eigenbasis for per-qubit canonicalizing unitaries.

    ``u`` maps ``S`` to ``s sigma_z``, so the eigenbasis columns are ``u^dagger``.
    """
    b = np.array([[1.0 + 0j]])
    for u in unitaries:
        b = np.kron(b, np.asarray(u).conj().T)
    return b


def metrics(trajectory, layout, code, psi_logical, times, basis=None):
    """Fidelity, coherence, purity and leakage of the reduced qubit state.

    ``basis`` holds the eigenbasis (columns) in which coherence is counted;
    by default the computational basis.
    """
    psi_logical = np.asarray(psi_logical, dtype=complex)
    if abs(np.linalg.norm(psi_logical) - 1.0) > 1e-10:
        raise ValidationError("logical state must be normalized")
    if code.physical_dim != layout.qubit_dim:
        raise ShapeError("code physical dimension does not match layout qubits")
    target = encode(psi_logical, code)
    proj = code.projector
    fid, coh, pur, leak = [], [], [], []
    for ket in trajectory:
        rho = reduced_qubit_state(ket, layout)
        fid.append(float(np.real(np.vdot(target, rho @ target))))
        coh.append(coherence(rho, basis))
        pur.append(purity(rho))
        leak.append(float(1.0 - np.real(np.trace(proj @ rho))))
    return EvolutionTrace(np.asarray(times, dtype=float), np.array(fid),
                          np.array(coh), np.array(pur), np.array(leak))


def decoherence_factor_oracle(g, omega, t):
    """Vacuum coherence magnitude for ``sigma_z (x) g (a + a^dagger) + omega a^dagger a``."""
    if not omega > 0:
        raise ValidationError("omega must be > 0")
    return float(np.exp(-(4 * g**2 / omega**2) * (1 - np.cos(omega * t))))


def dephasing_coherence(g, omega, n_max, times):
    """Normalized ``|rho_01(t)|`` of a qubit starting in ``|+>`` with the bath in vacuum."""
    layout = SystemLayout((2, n_max), 1)
    bath = BathSpec([Mode(omega, n_max)], [[g]])
    model = build_qubit_bath_model(layout, {0: pauli_axis_op(AxisVector((0, 0, 1)))},
                                   bath)
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    traj = evolve(model, np.kron(plus, vacuum((n_max,))), times)
    return np.array([2 * abs(reduced_qubit_state(ket, layout)[0, 1]) for ket in traj])


def fhe_mistuning_fidelity(delta, delta_omega, t):
    """Logical fidelity of the equal superposition under a mistuned FHE drive."""
    return float(np.cos(delta * delta_omega * t / 2) ** 2)
