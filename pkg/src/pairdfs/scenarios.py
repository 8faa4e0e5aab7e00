"""Experiment runners behind the command-line front end.

Each runner takes a validated :class:`ScenarioConfig` and an output
directory, writes its CSV files and returns a list of :class:`Verdict`.
"""

import csv
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .codec import (
    PairOperatorSet,
    code_space,
    encode,
    singlet_code_4qubit,
)
from .dynamics import (
    decoherence_factor_oracle,
    dephasing_coherence,
    evolve,
    fhe_mistuning_fidelity,
    metrics,
    product_eigenbasis,
    vacuum,
)
from .errors import CodeConstructionError
from .gates import (
    commutant_basis,
    conserved_observable_space,
    gate_preserves_code,
    solve_shift_constraint,
    trace_certificate,
)
from .models import (
    AxisVector,
    BathSpec,
    GeneralCouplingSpec,
    Mode,
    build_dephasing_model,
    build_fhe_drive,
    build_free_qubit_model,
    build_general_model,
    build_qubit_bath_model,
    pauli_axis_op,
    su2_canonicalize,
)
from .operators import (
    SX,
    SystemLayout,
    embed,
    hermitian_eig,
    random_hermitian,
)

CSV_HEADER = ("time", "fidelity", "coherence", "purity", "leakage")


@dataclass(frozen=True)
class Verdict:
    """One checked claim.

    ``relation`` is ``"close"`` (``|measured - expected| <= tolerance``) or
    ``"greater"`` (``measured > expected``).
    """

    name: str
    measured: float
    expected: float
    tolerance: float
    relation: str = "close"

    @property
    def passed(self):
        if self.relation == "greater":
            return bool(self.measured > self.expected)
        return bool(abs(self.measured - self.expected) <= self.tolerance)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        op = "|m-e|<=tol" if self.relation == "close" else "m>e"
        return (f"{status} {self.name}: measured={self.measured:.12g} "
                f"expected={self.expected:.12g} tol={self.tolerance:.3g} ({op})")


@dataclass
class RunReport:
    scenario: str
    wall_time: float = 0.0
    verdicts: list = field(default_factory=list)
    csv_paths: list = field(default_factory=list)
    seed: object = None
    tolerances: dict = field(default_factory=dict)
    tol_scale: float = 1.0

    @property
    def all_passed(self):
        return all(v.passed for v in self.verdicts)

    def text(self):
        lines = [f"scenario: {self.scenario}", f"seed: {self.seed}"]
        lines += [f"tolerance {k}: {v:g}" for k, v in sorted(self.tolerances.items())]
        if self.tol_scale != 1.0:
            lines.append(f"WARNING: tolerances scaled by {self.tol_scale:g} (debug only)")
        lines += [v.line() for v in self.verdicts]
        lines += [f"csv: {p}" for p in self.csv_paths]
        lines.append(f"wall time: {self.wall_time:.3f} s")
        lines.append("RESULT: " + ("PASS" if self.all_passed else "FAIL"))
        return "\n".join(lines) + "\n"


def write_trace_csv(trace, path):
    """Write ``time,fidelity,coherence,purity,leakage`` rows at full precision."""
    _write_rows(path, CSV_HEADER, trace.rows())


def _write_rows(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format(float(x), ".17g") for x in row])


# --------------------------------------------------------------------------- #
#                          config -> physics objects                           #
# --------------------------------------------------------------------------- #

def _axis(raw):
    if isinstance(raw, dict):
        return AxisVector(tuple(raw["direction"]), float(raw.get("strength", 1.0)))
    return AxisVector(tuple(raw), 1.0)


def _bath(raw, num_qubits):
    modes = [Mode(float(m["omega"]), int(m["n_max"])) for m in raw.get("modes", [])]
    g = np.asarray(raw.get("couplings", np.zeros((num_qubits, len(modes)))),
                   dtype=float).reshape(num_qubits, len(modes))
    return BathSpec(modes, g)


def _layout(cfg, with_bath=True):
    pairs = [tuple(p) for p in cfg.system["pairs"]]
    nq = 2 * len(pairs)
    bath_dims = tuple(int(m["n_max"]) for m in cfg.bath.get("modes", [])) if with_bath else ()
    return SystemLayout((2,) * nq + bath_dims, nq, pairs)


def logical_state(raw, dim, rng=None):
    """Named logical state (``zero``, ``plus``, ``bell``, ``random``) or amplitudes."""
    if isinstance(raw, str):
        v = np.zeros(dim, dtype=complex)
        if raw == "zero":
            v[0] = 1
        elif raw == "plus":
            v[:] = 1
        elif raw == "bell":
            v[0] = v[-1] = 1
        elif raw == "random":
            v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        else:
            raise ValueError(f"unknown logical state {raw!r}")
    else:
        arr = np.asarray(raw, dtype=float)
        v = arr[:, 0] + 1j * arr[:, 1] if arr.ndim == 2 else arr.astype(complex)
        if v.shape != (dim,):
            raise ValueError(f"logical state needs {dim} amplitudes")
    return v / np.linalg.norm(v)


def _coherence_basis(axes):
    # both qubits of a pair share the pair's axis
    us = []
    for a in axes:
        u, _ = su2_canonicalize(pauli_axis_op(a))
        us += [u, u]
    return product_eigenbasis(us)


def _dfs_trace(layout, axes, bath, eps, code, psi_l, times):
    model = build_dephasing_model(layout, axes, bath, eps)
    psi0 = np.kron(encode(psi_l, code), vacuum(layout.bath_dims))
    traj = evolve(model, psi0, times)
    return metrics(traj, layout, code, psi_l, times, _coherence_basis(axes))


def _pair_code(cfg, layout, axes, eps=0.0):
    tol = cfg.tolerances["kernel_tol"]
    return code_space(PairOperatorSet.build(axes, eps), layout.qubit_layout(), tol)


# --------------------------------------------------------------------------- #
#                                  runners                                     #
# --------------------------------------------------------------------------- #

def run_dfs_immunity(cfg, out, ts):
    layout = _layout(cfg)
    axes = [_axis(a) for a in cfg.system["axes"]]
    bath = _bath(cfg.bath, layout.num_qubits)
    code = _pair_code(cfg, layout, axes)
    psi_l = logical_state(cfg.params["logical_state"], code.logical_dim)
    tr = _dfs_trace(layout, axes, bath, float(cfg.params["epsilon"]), code, psi_l,
                    cfg.times)
    path = os.path.join(out, "dfs_immunity.csv")
    write_trace_csv(tr, path)
    return [
        Verdict("fidelity_min", float(tr.fidelities.min()), 1.0, 1e-9 * ts),
        Verdict("leakage_max", float(tr.leakages.max()), 0.0, 1e-9 * ts),
    ], [path]


def run_mismatch_sweep(cfg, out, ts):
    layout = _layout(cfg)
    axes = [_axis(a) for a in cfg.system["axes"]]
    bath = _bath(cfg.bath, layout.num_qubits)
    code = _pair_code(cfg, layout, axes)
    psi_l = logical_state(cfg.params["logical_state"], code.logical_dim)
    e1, e2 = (float(e) for e in cfg.params["epsilons"])
    t_star = float(cfg.params["t_star"])
    decay, paths = [], []
    for i, eps in enumerate((e1, e2)):
        tr = _dfs_trace(layout, axes, bath, eps, code, psi_l, [t_star])
        decay.append(1.0 - float(tr.fidelities[0]))
        full = _dfs_trace(layout, axes, bath, eps, code, psi_l, cfg.times)
        path = os.path.join(out, f"mismatch_{i}.csv")
        write_trace_csv(full, path)
        paths.append(path)
    expected = (e1 / e2) ** 2
    verdicts = [Verdict("decay_ratio", decay[0] / decay[1], expected, 0.1 * expected * ts)]
    brk = float(cfg.params["break_epsilon"])
    try:
        _pair_code(cfg, layout, axes, brk)
        kdim = 2
    except CodeConstructionError as exc:
        kdim = exc.kernel_dim
    verdicts.append(Verdict(f"kernel_dim_at_eps_{brk:g}", kdim, 0, 0))
    return verdicts, paths


def run_fhe_mistuning(cfg, out, ts):
    layout = _layout(cfg, with_bath=False)
    axes = [_axis(a) for a in cfg.system["axes"]]
    freqs = [float(w) for w in cfg.system["qubit_frequencies"]]
    code = _pair_code(cfg, layout, axes)
    psi_l = logical_state(cfg.params.get("logical_state", "plus"), code.logical_dim)
    h_sys = build_free_qubit_model(layout, freqs)
    z_code = all(np.allclose(a.direction, (0, 0, 1)) for a in axes)
    oracle_ok = z_code and cfg.params.get("logical_state", "plus") == "plus"
    verdicts, paths = [], []
    for i, delta in enumerate(float(d) for d in cfg.params["deltas"]):
        model = h_sys + build_fhe_drive(h_sys, delta)
        traj = evolve(model, encode(psi_l, code), cfg.times)
        tr = metrics(traj, layout, code, psi_l, cfg.times, _coherence_basis(axes))
        path = os.path.join(out, f"fhe_{i}.csv")
        write_trace_csv(tr, path)
        paths.append(path)
        if oracle_ok:
            oracle = np.ones(len(cfg.times))
            for (l, lp) in layout.pairing:
                dw = freqs[l] - freqs[lp]
                oracle *= [fhe_mistuning_fidelity(delta, dw, t) for t in cfg.times]
            err = float(np.max(np.abs(tr.fidelities - oracle)))
            verdicts.append(Verdict(f"oracle_error_delta_{delta:g}", err, 0.0, 1e-6 * ts))
        if delta == 0.0:
            verdicts.append(Verdict("fidelity_min_delta_0",
                                    float(tr.fidelities.min()), 1.0, 1e-10 * ts))
    return verdicts, paths


def run_general_noise(cfg, out, ts):
    layout = _layout(cfg)
    bath = _bath(cfg.bath, layout.num_qubits)
    rng = np.random.default_rng([int(cfg.seed), 0])
    spec = GeneralCouplingSpec.random(layout.num_qubits, len(bath.modes), rng,
                                      float(cfg.params["amplitude_scale"]))
    model = build_general_model(layout, spec, bath)
    cons = conserved_observable_space(model, cfg.tolerances["kernel_tol"])
    # restricted to alpha = z, real, pair-symmetric amplitudes
    amp = np.zeros((layout.num_qubits, 3, len(bath.modes)), dtype=complex)
    amp[:, 2, :] = bath.couplings
    z = AxisVector((0, 0, 1))
    reduced = build_general_model(layout, GeneralCouplingSpec(amp), bath).total
    deph = build_dephasing_model(layout, [z] * len(layout.pairing), bath).total
    red_err = float(np.max(np.abs(reduced - deph)))
    code = _pair_code(cfg, layout, [z] * len(layout.pairing))
    psi_l = logical_state(cfg.params["logical_state"], code.logical_dim)
    psi0 = np.kron(encode(psi_l, code), vacuum(layout.bath_dims))
    tr = metrics(evolve(model, psi0, cfg.times), layout, code, psi_l, cfg.times)
    path = os.path.join(out, "general_noise.csv")
    write_trace_csv(tr, path)
    return [
        Verdict("conserved_dimension", cons.dimension, 1, 0),
        Verdict("reduction_max_error", red_err, 0.0, 1e-12 * ts),
        Verdict("pair_code_fidelity_loss", 1.0 - float(tr.fidelities.min()), 0.0,
                0.0, relation="greater"),
    ], [path]


def joint_multiplicities(ops):
    """Multiplicities of the joint eigenspaces of commuting Hermitian operators."""
    d = ops[0].shape[0]
    rng = np.random.default_rng(12345)
    combo = sum(rng.uniform(0.5, 1.5) * o for o in ops)
    w = hermitian_eig(combo).eigenvalues
    scale = max(1.0, float(np.max(np.abs(w))))
    splits = np.flatnonzero(np.diff(w) > 1e-8 * scale)
    bounds = np.concatenate([[0], splits + 1, [d]])
    return [int(b - a) for a, b in zip(bounds, bounds[1:])]


def run_gate_check(cfg, out, ts):
    layout = _layout(cfg, with_bath=False)
    axes = [_axis(a) for a in cfg.system["axes"]]
    ops = PairOperatorSet.build(axes)
    code = code_space(ops, layout, cfg.tolerances["kernel_tol"])
    xs = ops.embedded(layout)
    comm = commutant_basis(xs)
    expected_dim = sum(m * m for m in joint_multiplicities(xs))
    rng = np.random.default_rng([int(cfg.seed), 0])
    gate_times = [float(t) for t in cfg.params["gate_times"]]
    rows, worst = [], 0.0
    for i in range(int(cfg.params["samples"])):
        c = rng.normal(size=comm.dimension)
        h = np.tensordot(c, np.array(comm.generators), axes=1)
        for t in gate_times:
            defect = gate_preserves_code(h, code, t)
            rows.append((i, t, defect))
            worst = max(worst, defect)
    qdims = (2,) * layout.num_qubits
    bad = gate_preserves_code(embed(SX, [0], qdims), code, 1.0)
    path = os.path.join(out, "gate_defects.csv")
    _write_rows(path, ("sample", "time", "defect"), rows)
    return [
        Verdict("commutant_dimension", comm.dimension, expected_dim, 0),
        Verdict("commutant_gate_defect_max", worst, 0.0, 1e-10 * ts),
        Verdict("sigma_x_defect_t1", bad, 0.1, 0.0, relation="greater"),
    ], [path]


def run_constraint_cert(cfg, out, ts):
    seed = int(cfg.seed)
    verdicts, rows = [], []
    claimed = [complex(*n) if isinstance(n, list) else complex(n)
               for n in cfg.params["claimed_ns"]]
    for di, d in enumerate(int(d) for d in cfg.params["dims"]):
        worst, false_accepts = 0.0, 0
        for s in range(int(cfg.params["samples"])):
            rng = np.random.default_rng([seed, di, s])
            x = random_hermitian(d, rng)
            rep = solve_shift_constraint(x)
            err = abs(rep.residual - np.sqrt(d))
            worst = max(worst, err)
            h = random_hermitian(d, rng)
            for n in claimed:
                v = trace_certificate(x, h, n)
                if v.accepted and abs(n) > 1e-10:
                    false_accepts += 1
            rows.append((d, s, rep.residual, rep.certified_n.real, rep.certified_n.imag))
        verdicts.append(Verdict(f"residual_minus_sqrt_d_{d}", worst, 0.0, 1e-8 * ts))
        verdicts.append(Verdict(f"false_accepts_d_{d}", false_accepts, 0, 0))
    path = os.path.join(out, "constraint_cert.csv")
    _write_rows(path, ("dim", "sample", "residual", "certified_n_re", "certified_n_im"),
                rows)
    return verdicts, [path]


def run_dephasing_oracle(cfg, out, ts):
    p = cfg.params
    g, omega = float(p["g"]), float(p["omega"])
    times = np.asarray(cfg.times)
    num = dephasing_coherence(g, omega, int(p["n_max"]), times)
    check = dephasing_coherence(g, omega, int(p["n_max_check"]), times)
    oracle = np.array([decoherence_factor_oracle(g, omega, t) for t in times])
    path = os.path.join(out, "dephasing_oracle.csv")
    _write_rows(path, ("time", "numerical", "oracle", "numerical_check"),
                zip(times, num, oracle, check))
    return [
        Verdict("oracle_error_max", float(np.max(np.abs(num - oracle))), 0.0, 1e-4 * ts),
        Verdict("truncation_change_max", float(np.max(np.abs(num - check))), 0.0,
                1e-8 * ts),
    ], [path]


def run_singlet_code(cfg, out, ts):
    code = singlet_code_4qubit(cfg.tolerances["kernel_tol"])
    layout = SystemLayout((2,) * 4 + tuple(int(m["n_max"]) for m in cfg.bath["modes"]),
                          4, ((0, 1), (2, 3)))
    bath = _bath(cfg.bath, 4)
    seed = int(cfg.seed)
    verdicts = [Verdict("logical_dimension", code.logical_dim, 2, 0)]
    paths = []
    for i in range(int(cfg.params["num_axes"])):
        rng = np.random.default_rng([seed, i])
        axis = AxisVector(tuple(rng.normal(size=3)))
        psi_l = logical_state("random", code.logical_dim, rng)
        s = pauli_axis_op(axis)
        model = build_qubit_bath_model(layout, {q: s for q in range(4)}, bath)
        psi0 = np.kron(encode(psi_l, code), vacuum(layout.bath_dims))
        tr = metrics(evolve(model, psi0, cfg.times), layout, code, psi_l, cfg.times)
        path = os.path.join(out, f"singlet_axis_{i}.csv")
        write_trace_csv(tr, path)
        paths.append(path)
        verdicts.append(Verdict(f"fidelity_min_axis_{i}", float(tr.fidelities.min()),
                                1.0, 1e-9 * ts))
    return verdicts, paths


RUNNERS = {
    "dfs_immunity": run_dfs_immunity,
    "mismatch_sweep": run_mismatch_sweep,
    "fhe_mistuning": run_fhe_mistuning,
    "general_noise": run_general_noise,
    "gate_check": run_gate_check,
    "constraint_cert": run_constraint_cert,
    "dephasing_oracle": run_dephasing_oracle,
    "singlet_code": run_singlet_code,
}


def run_scenario(cfg, out_dir=None, tol_scale=1.0):
    """Run the configured experiment, write CSVs and ``report.txt``."""
    out = out_dir or cfg.output
    os.makedirs(out, exist_ok=True)
    start = time.perf_counter()
    verdicts, paths = RUNNERS[cfg.scenario](cfg, out, tol_scale)
    report = RunReport(cfg.scenario, time.perf_counter() - start, verdicts, paths,
                       cfg.seed, dict(cfg.tolerances), tol_scale)
    with open(os.path.join(out, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(report.text())
    return report
