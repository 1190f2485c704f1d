"""Property suites run at two resolutions with residuals and convergence orders.

Each check yields a JSON-ready record
``{check, inputs_hash, residuals: {coarse, fine}, order_estimate, verdict}``.
A check passes when the fine residual is below its tolerance and, if a
minimum order is requested, the measured order reaches it (an order is
not required once the coarse residual already sits below ``floor``).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .conformal import (
    WarpedProfile,
    condition_A_eval,
    conformal_hypersurface_check,
    foliation_derivative,
    foliation_derivative_fd,
    half_clifford,
    killing_orthogonality,
    random_profile,
    ricci_radial_gap,
    ua_identity_check,
)
from .dual import double_dual_check, dual_params, dual_surface
from .errors import CaplabError
from .io import inputs_hash
from .rotational import solve_for_radius
from .spectral import weighted_operator_check
from .surface import boundary_relations_check, build_annulus, hopf_constancy, normal_graph, random_neumann_field

SUITES = ("boundary", "hopf", "dual", "conformal", "foliation", "orthogonality")
FIXTURE_RADII = (0.22, 0.98, np.pi / 2, 1.4)
RESOLUTIONS = (128, 256)


def suite_seed(default: int = 0) -> int:
    """Seed for randomised suites; ``CAPLAB_SEED`` overrides the default."""
    env = os.environ.get("CAPLAB_SEED")
    return int(env) if env not in (None, "") else int(default)


@dataclass
class CheckResult:
    """Outcome of one check at two resolutions."""

    check: str
    inputs: dict
    coarse: float
    fine: float
    tol: float
    min_order: float | None = None
    floor: float = 1e-12
    ratio: float = 2.0
    above: bool = False

    @property
    def order_estimate(self) -> float | None:
        if self.coarse <= 0 or self.fine <= 0:
            return None
        return float(np.log(self.coarse / self.fine) / np.log(self.ratio))

    @property
    def passed(self) -> bool:
        if self.above:
            return bool(np.isfinite(self.fine) and self.fine > self.tol)
        if not np.isfinite(self.fine) or self.fine >= self.tol:
            return False
        if self.min_order is None or self.coarse <= self.floor:
            return True
        order = self.order_estimate
        return order is not None and order >= self.min_order

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "inputs_hash": inputs_hash(self.inputs),
            "inputs": self.inputs,
            "residuals": {"coarse": self.coarse, "fine": self.fine},
            "tolerance": self.tol,
            "criterion": "above" if self.above else "below",
            "order_estimate": self.order_estimate,
            "verdict": "pass" if self.passed else "fail",
        }


@lru_cache(maxsize=16)
def _fixture(R: float, tol: float = 1e-12):
    return solve_for_radius(R, tol=tol)


def fixture_surface(R: float, n_t: int, n_s: int = 32, tol: float = 1e-12):
    profile, contact = _fixture(R, tol)
    return build_annulus(profile, contact, n_t, n_s)


def _pair(fn, R, resolutions=RESOLUTIONS, **kw):
    return [fn(fixture_surface(R, n, **kw)) for n in resolutions]


def suite_boundary(seed: int = 0) -> list[CheckResult]:
    out = []
    for R in FIXTURE_RADII:
        c, f = _pair(lambda s: boundary_relations_check(s, "closed")["max"], R)
        out.append(CheckResult(f"boundary.closed[R={R:.4f}]", {"R": R}, c, f, 1e-8))
        c, f = _pair(lambda s: boundary_relations_check(s, "lattice")["max"], R)
        out.append(CheckResult(f"boundary.lattice[R={R:.4f}]", {"R": R}, c, f, 1e-2, 1.9, 1e-10))
    return out


def suite_hopf(seed: int = 0) -> list[CheckResult]:
    out = []
    for R in FIXTURE_RADII:
        c, f = _pair(lambda s: hopf_constancy(s).spread, R)
        out.append(CheckResult(f"hopf.spread[R={R:.4f}]", {"R": R}, c, f, 1e-6))
    base = half_clifford(RESOLUTIONS[1])
    c, f = [abs(hopf_constancy(half_clifford(n)).max - 1.0) for n in RESOLUTIONS]
    out.append(CheckResult("hopf.clifford_value", {"R": np.pi / 2}, c, f, 1e-10))
    u = random_neumann_field(np.random.default_rng(seed), float(base.t[-1]))
    spreads = [hopf_constancy(normal_graph(half_clifford(n), u)).spread for n in RESOLUTIONS]
    # Negative control: a perturbed surface must not look constant.
    out.append(CheckResult("hopf.negative_control", {"seed": seed}, *spreads, 1e-3, above=True))
    return out


def suite_dual(seed: int = 0) -> list[CheckResult]:
    out = []
    for R in FIXTURE_RADII:
        def dd(s):
            d = dual_surface(s)
            rep = double_dual_check(d)
            back = dual_params(d.dual_params)
            p = s.contact.params
            trip = max(abs(back.R - p.R), abs(back.gamma - p.gamma))
            radius = abs(d.measured_radius() - d.dual_params.R)
            return max(rep.distance, rep.psi_product, trip, radius, d.meta["metric_relation"])

        c, f = _pair(dd, R)
        out.append(CheckResult(f"dual.relations[R={R:.4f}]", {"R": R}, c, f, 1e-8))
    return out


def suite_conformal(seed: int = 0) -> list[CheckResult]:
    out = []
    for R in (0.22, 0.98, 1.4):
        c, f = _pair(lambda s: weighted_operator_check(s, trials=5, seed=seed), R)
        out.append(CheckResult(f"conformal.weighted[R={R}]", {"R": R, "seed": seed}, c, f, 1e-5, 1.9))
    c, f = _pair(lambda s: weighted_operator_check(s, trials=5, seed=seed), np.pi / 2)
    out.append(CheckResult("conformal.weighted[R=pi/2]", {"R": np.pi / 2}, c, f, 1e-12))
    for R in (np.pi / 2, 0.22, 0.98):
        c, f = _pair(lambda s: ua_identity_check(s, [1, 0, 0]).max, R, (32, 64), tol=1e-13)
        out.append(CheckResult(f"conformal.u_a[R={R:.4f}]", {"R": R}, c, f, 1e-4, 1.9))
    sf, gs = WarpedProfile.space_form(1.0), WarpedProfile.gaussian(2)
    v = float(np.abs(condition_A_eval(sf).values).max())
    out.append(CheckResult("conformal.condition_space_form", {}, v, v, 1e-10))
    rep = condition_A_eval(gs)
    v = float(np.abs(rep.values + rep.r / 16).max())
    out.append(CheckResult("conformal.condition_gaussian", {"n": 2}, v, v, 1e-12))
    rng = np.random.default_rng(seed)
    bad = 0
    for prof in [sf, gs] + [random_profile(rng) for _ in range(10)]:
        try:
            ricci_radial_gap(prof)
        except CaplabError:
            bad += 1
    out.append(CheckResult("conformal.ricci_sign", {"seed": seed}, bad, bad, 0.5))
    prof = random_profile(rng, scale=0.3)
    h = (5e-4, 2.5e-4)
    c, f = [conformal_hypersurface_check(0.5, prof, hh).residual for hh in h]
    out.append(CheckResult("conformal.hypersurface", {"seed": seed}, c, f, 1e-6, 1.9, 1e-13))
    return out


def suite_foliation(seed: int = 0, samples: int = 1000) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    out = []
    for label, prof in (("space_form", WarpedProfile.space_form(1.0)), ("gaussian", WarpedProfile.gaussian(2))):
        s = rng.uniform(1e-3, 1 - 1e-3, samples)
        r = rng.uniform(0, 1, samples)
        vals = foliation_derivative(1.0, prof, s, r)
        positive = int(np.sum(vals >= 0))
        out.append(CheckResult(f"foliation.negative[{label}]", {"seed": seed}, positive, positive, 0.5))
        idx = rng.choice(samples, 50, replace=False)
        fd = np.array([foliation_derivative_fd(1.0, prof, s[i], r[i]) for i in idx])
        sign_bad = int(np.sum(np.sign(fd) != np.sign(vals[idx])))
        gap = float(np.abs(fd - vals[idx]).max())
        out.append(CheckResult(f"foliation.fd_sign[{label}]", {"seed": seed}, sign_bad, sign_bad, 0.5))
        out.append(CheckResult(f"foliation.fd_value[{label}]", {"seed": seed}, gap, gap, 1e-6))
    return out


def suite_orthogonality(seed: int = 0, graphs: int = 3) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    bases = {n: half_clifford(n) for n in RESOLUTIONS}
    t_b = float(bases[RESOLUTIONS[0]].t[-1])
    out = []
    for i in range(graphs):
        u = random_neumann_field(rng, t_b)
        for K in ("e1e3", "e1e2"):
            c, f = [killing_orthogonality(normal_graph(bases[n], u), K, 0.98) for n in RESOLUTIONS]
            out.append(CheckResult(f"orthogonality[{i},{K}]", {"seed": seed, "graph": i}, c, f, 1e-4, 1.9, 1e-11))
    return out


SUITE_FUNCS = {
    "boundary": suite_boundary,
    "hopf": suite_hopf,
    "dual": suite_dual,
    "conformal": suite_conformal,
    "foliation": suite_foliation,
    "orthogonality": suite_orthogonality,
}


def run_suites(names, seed: int | None = None) -> dict:
    """Run suites and aggregate their records.

    Returns:
        ``{"seed", "checks": [...], "passed", "first_failure"}``.
    """
    seed = suite_seed(0) if seed is None else seed
    names = SUITES if names in ("all", None) else ([names] if isinstance(names, str) else list(names))
    results = []
    for name in names:
        results.extend(SUITE_FUNCS[name](seed))
    first = next((r.check for r in results if not r.passed), None)
    return {
        "seed": seed,
        "suites": list(names),
        "checks": [r.to_dict() for r in results],
        "passed": first is None,
        "first_failure": first,
    }
