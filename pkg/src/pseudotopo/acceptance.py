"""Executable acceptance criteria.

Each ``criterion_N`` returns a :class:`CriterionResult`; :func:`run_suite`
runs them in order.  The tolerances are the contract values and are not
meant to be tuned.
"""

import time
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .invariants import (
    QuadratureSpec,
    berry_connection_point,
    connection_closed_form_1d,
    curvature_2d,
    invariant_report,
    q_matrices,
)
from .lattice import MassProfile, refinement_study
from .linalg import gen_eig, herm_eig, max_abs, multiset_distance
from .models import ModelId, ModelSpec, build_H, build_h, build_metric, symmetry_residuals_3d
from .pseudoherm import evolve

MASSES = (-3.0, -1.0, -0.5, 0.5, 1.0, 3.0)
PHIS = (0.0, 0.5, 1.0, 2.0)
MODELS = (ModelId.DIRAC_1D, ModelId.DIRAC_2D, ModelId.DIRAC_3D)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.number:2d}: {self.title}"


def _random_momenta(spec: ModelSpec, count: int, seed: int, scale: float = 5.0):
    return np.random.default_rng(seed).uniform(-scale, scale, (count, spec.space_dim))


def criterion_1(seed=0):
    worst, slowest = 0.0, 0.0
    for m, phi in product(MASSES, PHIS):
        t0 = time.perf_counter()
        cs = invariant_report(ModelSpec(ModelId.DIRAC_1D, m, phi), QuadratureSpec(n_points=2048)).cs1
        slowest = max(slowest, time.perf_counter() - t0)
        worst = max(worst, abs(cs - np.sign(m) / 4))
    return CriterionResult(1, "CS1 = sign(m)/4", worst < 1e-6 and slowest < 1.0,
                           {"max_error": worst, "max_seconds_per_case": slowest})


def criterion_2(seed=0):
    worst_nu, worst_rel = 0.0, 0.0
    for m, phi in product(MASSES, PHIS):
        rep = invariant_report(ModelSpec(ModelId.DIRAC_1D, m, phi), QuadratureSpec(n_points=2048))
        worst_nu = max(worst_nu, abs(rep.winding - np.sign(m) / 2))
        worst_rel = max(worst_rel, abs(rep.winding - 2 * rep.cs1))
    return CriterionResult(2, "winding = sign(m)/2 = 2 CS1", worst_nu < 1e-8 and worst_rel < 2e-6,
                           {"max_winding_error": worst_nu, "max_winding_minus_2cs1": worst_rel})


def _isospectral_grid(seed):
    for k, model in enumerate(MODELS):
        for phi in (0.3, 1.0, 2.0):
            spec = ModelSpec(model, 1.0, phi)
            yield spec, _random_momenta(spec, 100, seed + k)


def criterion_3(seed=0):
    worst_im, worst_dist = 0.0, 0.0
    for spec, ps in _isospectral_grid(seed):
        ev_H = gen_eig(build_H(spec, ps)).values
        ev_h = herm_eig(build_h(spec, ps)).values
        worst_im = max(worst_im, max_abs(ev_H.imag))
        worst_dist = max(worst_dist, max(multiset_distance(a, b) for a, b in zip(ev_H, ev_h)))
    return CriterionResult(3, "isospectrality and real spectra", worst_im < 1e-9 and worst_dist < 1e-9,
                           {"max_imag": worst_im, "max_multiset_distance": worst_dist})


def criterion_4(seed=0):
    worst_sim, worst_ph = 0.0, 0.0
    for spec, ps in _isospectral_grid(seed):
        met = build_metric(spec)
        H, h = build_H(spec, ps), build_h(spec, ps)
        worst_sim = max(worst_sim, max_abs(met.rho @ H @ met.rho_inv - h))
        eta_inv = np.linalg.inv(met.eta_plus)
        worst_ph = max(worst_ph, max_abs(np.conj(np.swapaxes(H, -1, -2)) - met.eta_plus @ H @ eta_inv))
    return CriterionResult(4, "similarity-map identities", worst_sim < 1e-10 and worst_ph < 1e-10,
                           {"max_similarity": worst_sim, "max_pseudo_hermiticity": worst_ph})


def _connection_nodes(spec: ModelSpec, seed: int):
    if spec.model_id is ModelId.DIRAC_1D:
        theta = np.linspace(-np.pi / 2, np.pi / 2, 2049)[1:-1]
        return abs(spec.mass) * np.tan(theta)[:, None]
    if spec.model_id is ModelId.DIRAC_2D:
        n = 32
        r = abs(spec.mass) * np.tan(np.linspace(0, np.arctan(50 / abs(spec.mass)), n + 1))
        th = np.linspace(0, 2 * np.pi, n, endpoint=False)
        return np.stack([np.outer(r, np.cos(th)), np.outer(r, np.sin(th))], axis=-1).reshape(-1, 2)
    return _random_momenta(spec, 200, seed, 10.0)


def criterion_5(seed=0, delta=1e-4):
    diffs = {}
    for model in MODELS:
        spec = ModelSpec(model, 1.0, 1.0)
        diffs[model.value] = berry_connection_point(spec, _connection_nodes(spec, seed), delta).difference
    spec = ModelSpec(ModelId.DIRAC_1D, 1.0, 1.0)
    ps = np.linspace(-10, 10, 201)
    A = berry_connection_point(spec, ps, delta).A[:, 0, 0, 0]
    closed = max_abs(A - connection_closed_form_1d(1.0, ps))
    passed = max(diffs.values()) < 1e-8 and closed < delta**2
    return CriterionResult(5, "connection equality A = a", passed,
                           {"max_difference": diffs, "closed_form_error_1d": closed, "delta": delta})


def criterion_6(seed=0):
    worst_pq, worst_mod, worst_arg = 0.0, 0.0, 0.0
    for k, model in enumerate(MODELS):
        for phi in (0.0, 1.0, 2.0):
            spec = ModelSpec(model, 1.0, phi)
            for p in _random_momenta(spec, 25, seed + 10 + k):
                qm = q_matrices(spec, p)
                worst_pq = max(worst_pq, qm.residuals["P_idempotency"], qm.residuals["Q_involution"])
                if model is ModelId.DIRAC_1D:
                    q = qm.offdiag[0, 0]
                    worst_mod = max(worst_mod, abs(abs(q) - 1), qm.residuals["diagonal_blocks"])
                    dq = np.angle(q) - np.angle(-1j * p[0] + spec.mass)
                    worst_arg = max(worst_arg, abs(np.angle(np.exp(1j * dq))))
    passed = worst_pq < 1e-10 and worst_mod < 1e-10 and worst_arg < 1e-10
    return CriterionResult(6, "Q-matrix structure", passed,
                           {"max_P_Q_defect": worst_pq, "max_q_modulus_or_diagonal": worst_mod,
                            "max_arg_q_error": worst_arg})


def criterion_7(seed=0):
    rng = np.random.default_rng(seed + 20)
    times = np.linspace(0.0, 10.0, 21)
    worst_eta, best_std = 0.0, 0.0
    for model in MODELS:
        spec = ModelSpec(model, 1.0, 1.0)
        eta = build_metric(spec).eta_plus
        for _ in range(20):
            p = rng.uniform(-3, 3, spec.space_dim)
            v0 = rng.standard_normal(spec.dim) + 1j * rng.standard_normal(spec.dim)
            states = np.stack([evolve(spec, p, t, v0) for t in times])
            eta_n = np.sqrt(np.einsum("ti,ij,tj->t", np.conj(states), eta, states).real)
            std_n = np.linalg.norm(states, axis=1)
            worst_eta = max(worst_eta, max_abs(eta_n - eta_n[0]))
            best_std = max(best_std, max_abs(std_n - std_n[0]))
    return CriterionResult(7, "unitarity in the eta product", worst_eta < 1e-8 and best_std > 1e-3,
                           {"max_eta_norm_drift": worst_eta, "max_standard_norm_drift": best_std})


def criterion_8(seed=0):
    rows = refinement_study(MassProfile("sign", 1.0), spacing=0.05, half_length=20.0, levels=2)
    coarse, fine = rows
    e_ratio = coarse.energy / fine.energy
    o_ratio = coarse.infidelity / fine.infidelity
    checks = {
        "energy_below_1e-3": coarse.energy < 1e-3,
        "overlap_above_0.999": 1 - coarse.infidelity > 0.999,
        "energy_ratio_at_least_3": e_ratio >= 3,
        "infidelity_ratio_at_least_3": o_ratio >= 3,
    }
    details = {
        "energy": [r.energy for r in rows],
        "one_minus_overlap": [r.infidelity for r in rows],
        "energy_refinement_ratio": e_ratio,
        "infidelity_refinement_ratio": o_ratio,
        "checks": checks,
    }
    return CriterionResult(8, "lattice zero mode", all(checks.values()), details)


def criterion_9(seed=0):
    spreads = {}
    for m in (1.0, -0.5):
        reps = [invariant_report(ModelSpec(ModelId.DIRAC_1D, m, phi)) for phi in PHIS]
        spreads[f"cs1 m={m:g}"] = float(np.ptp([r.cs1 for r in reps]))
        spreads[f"winding m={m:g}"] = float(np.ptp([r.winding for r in reps]))
        bands = np.array([curvature_2d(ModelSpec(ModelId.DIRAC_2D, m, phi)).per_band_H for phi in PHIS])
        spreads[f"2d per-band m={m:g}"] = float(np.max(np.ptp(bands, axis=0)))
    return CriterionResult(9, "invariants independent of phi", max(spreads.values()) < 1e-6, spreads)


def criterion_10(seed=0):
    spec = ModelSpec(ModelId.DIRAC_3D, 1.0, 1.0)
    worst = {"time_reversal": 0.0, "parity_deformed": 0.0, "parity_standard": np.inf}
    for p in _random_momenta(spec, 50, seed + 30):
        res = symmetry_residuals_3d(spec, p)
        worst["time_reversal"] = max(worst["time_reversal"], res["time_reversal"])
        worst["parity_deformed"] = max(worst["parity_deformed"], res["parity_deformed"])
        worst["parity_standard"] = min(worst["parity_standard"], res["parity_standard"])
    passed = worst["time_reversal"] < 1e-12 and worst["parity_deformed"] < 1e-12 and worst["parity_standard"] > 1e-2
    return CriterionResult(10, "3D symmetry residuals", passed,
                           {"max_time_reversal": worst["time_reversal"],
                            "max_parity_deformed": worst["parity_deformed"],
                            "min_parity_standard": worst["parity_standard"]})


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10)


def run_suite(seed: int = 0, only=None) -> list[CriterionResult]:
    results = []
    for fn in CRITERIA:
        number = int(fn.__name__.rsplit("_", 1)[1])
        if only and number not in only:
            continue
        t0 = time.perf_counter()
        res = fn(seed)
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results
