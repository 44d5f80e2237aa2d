"""The invariant suite behind `verify all`: exact identities on the bundled corpus plus numeric self-checks."""
from __future__ import annotations

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from . import artifacts
from .arith_local import coset_count, coset_reps, divisors, prime_divisors, same_coset
from .borcherds import fj_index_I, fj_transform_check, leading_fj, mult_phi, quad_identity_check
from .greens import DomainPoint, tilde_gamma0, xi_green, EULER_GAMMA
from .hermlat import HermLattice, brute_representation_numbers
from .jacobi import theta_shift_check
from .modforms import eisenstein_Er, slash_constant_numeric, slash_order_needed
from .pipeline import Instance, JobConfig, bundled_config_paths
from .rings import CycElem
from .weakforms import is_admissible

NAMES = {
    1: "coset count",
    2: "quadratic identity",
    3: "mult integrality and I = mult",
    4: "residue identity and annihilation at doubled order",
    5: "theta shift identity",
    6: "Fourier-Jacobi transformation law",
    7: "leading Fourier-Jacobi index",
    8: "enumeration against brute force",
    9: "Green function convergence",
    10: "artifact round trip",
    "eis": "Eisenstein cusp constants",
}


@dataclass
class Check:
    key: object
    ok: bool
    detail: str
    seconds: float
    where: str = ""

    @property
    def name(self) -> str:
        return NAMES.get(self.key, str(self.key))

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        where = f" [{self.where}]" if self.where else ""
        return f"{tag} {self.key}: {self.name}{where} ({self.seconds:.2f}s) {self.detail}"


def _timed(key, fn: Callable[[], tuple], where: str = "") -> Check:
    t = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed check, reported with its message
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(key, bool(ok), detail, time.perf_counter() - t, where)


# checks that do not depend on an instance

def check_cosets(Ds: Sequence[int] = (3, 7, 15, 21)):
    bad = []
    for D in Ds:
        reps = coset_reps(D)
        expected = math.prod(p + 1 for p in prime_divisors(D))
        distinct = all(not same_coset(a, b, D) for i, a in enumerate(reps) for b in reps[i + 1:])
        if len(reps) != expected or coset_count(D) != expected or not distinct:
            bad.append(D)
    return not bad, f"pairwise inequivalent, D in {list(Ds)}" + (f", wrong for {bad}" if bad else "")


def check_theta_shift(ds: Sequence[int] = (2, 3), order: int = 6):
    res = {d: theta_shift_check(d, order) for d in ds}
    return all(res.values()), f"order {order}, " + ", ".join(f"d={d}: {v}" for d, v in res.items())


def check_theta_square(Ds: Sequence[int] = (3, 7), order: int = 8):
    bad = []
    for D in Ds:
        t1 = HermLattice.diagonal(D, [1]).theta_series(order)
        t2 = HermLattice.diagonal(D, [1, 1]).theta_series(order)
        sq = t1 * t1
        if any(sq.coefficient(m) != t2.coefficient(m) for m in range(order)):
            bad.append(D)
    return not bad, f"diag(1,1) against the square of diag(1), D in {list(Ds)}"


def check_gamma_asymptotic(t: float = 1e-6, tol: float = 1e-4):
    err = abs(tilde_gamma0(t) - (-math.log(t) - EULER_GAMMA))
    return err < tol, f"|G(0,t) + log t - G'(1)| = {err:.2e} at t = {t}"


# per-instance checks

def _u_samples(rank: int, count: int, rng: random.Random):
    return [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(2 * rank)] for _ in range(count)]


def check_quadratic(inst: Instance, samples: int = 8, seed: int = 0):
    rng = random.Random(seed)
    bad = 0
    for c in inst.principal_parts:
        cs, _ = inst.scaled(c)
        if not quad_identity_check(inst.L0, cs, _u_samples(inst.L0.rank, samples, rng)):
            bad += 1
    return bad == 0, f"{len(inst.principal_parts)} principal parts x {samples} vectors, {bad} failures"


def check_mult(inst: Instance):
    bad = []
    for i, c in enumerate(inst.principal_parts):
        m, integral = mult_phi(inst.L0, inst.n, c)
        I = fj_index_I(inst.L0, inst.n, c, inst.cusp(c), inst.full)
        if not integral or I != m:
            bad.append((i, str(m), str(I)))
    return not bad, f"{len(inst.principal_parts)} principal parts" + (f", mismatches {bad}" if bad else "")


def check_residue(inst: Instance):
    order = 4 * inst.D
    for c in inst.principal_parts:
        cc = inst.cusp(c)
        for r, E in inst.Er.items():
            tot = cc.c_r0[r]
            for m, x in c.poles():
                e = E.series.coefficient(m)
                tot = tot + (e if isinstance(e, CycElem) else CycElem.scalar(order, e)) * x
            if not tot.is_zero_value():
                return False, f"residue sum nonzero at cusp {r} for {c.c}"
    span2 = inst.span(2 * inst.order)
    forms = span2.forms()
    bad = [i for i, c in enumerate(inst.principal_parts) if not is_admissible(c, forms)]
    return not bad, (f"{len(inst.principal_parts)} principal parts, {len(forms)} forms at order {2 * inst.order}"
                     + (f", not annihilating: {bad}" if bad else ""))


def check_fj_transform(inst: Instance, pairs: int = 4, terms: int = 25, tol: float = 1e-8, seed: int = 0):
    rng = random.Random(seed)
    # keep |q|^terms at its D = 3 size when the boundary point sits lower in the upper half plane
    terms = max(terms, math.ceil(terms * (math.sqrt(3) / 6) / inst.bd.tau.imag - 1e-9))
    c = inst.principal_parts[-1]
    I = fj_index_I(inst.L0, inst.n, c, inst.cusp(c), inst.full)
    worst = 0.0
    for _ in range(pairs):
        w0 = [complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.1, 0.1)) for _ in range(inst.L0.rank)]
        beta = [(rng.randint(-1, 1), rng.randint(-2, 2)) for _ in range(inst.L0.rank)]
        worst = max(worst, fj_transform_check(inst.bd, c, I, w0, beta, terms))
    return worst < tol, f"worst residual {worst:.2e} over {pairs} pairs, {terms} terms, I = {I}"


def check_leading_index(inst: Instance):
    bad = []
    for i, c in enumerate(inst.principal_parts):
        cs, ccs = inst.scaled(c)
        fj = leading_fj(inst.bd, cs, ccs, 1)
        m, _ = mult_phi(inst.L0, inst.n, cs)
        if fj.index != m:
            bad.append(i)
    return not bad, f"{len(inst.principal_parts)} principal parts" + (f", mismatches {bad}" if bad else "")


def check_enumeration(inst: Instance, bound: int = 6):
    bad = []
    for name, L in [("L0", inst.L0)] + [(f"Ls{i}", L) for i, L in enumerate(inst.L_s)]:
        if L.representation_numbers(bound) != brute_representation_numbers(L, bound):
            bad.append(name)
    return not bad, f"norms up to {bound}" + (f", mismatches {bad}" if bad else "")


def check_green(inst: Instance):
    g = inst.cfg.green
    m = int(g.get("m", 1))
    bound = float(g.get("bound", 8.0))
    z = DomainPoint.generic(inst.full, seed=int(g.get("seed", 1)))
    parts = []
    ok = True
    for v in g.get("v", [0.5, 1.0, 2.0]):
        a = xi_green(m, float(v), z, bound)
        b = xi_green(m, float(v), z, 2 * bound)
        change = abs(b.value - a.value)
        ok = ok and change <= a.tail
        parts.append(f"v={v}: change {change:.1e} <= tail {a.tail:.1e}")
    return ok, "; ".join(parts)


def instance_files(inst: Instance) -> Dict[str, str]:
    out: Dict[str, str] = {}
    out.update(artifacts.theta_files(inst, inst.order))
    out.update(artifacts.gamma_files(inst))
    out.update(artifacts.eis_files(inst))
    out.update(artifacts.admissible_files(inst))
    out.update(artifacts.vv_files(inst))
    out.update(artifacts.fj_files(inst, max(inst.cfg.q_order, 1)))
    out.update(artifacts.divisor_files(inst))
    out.update(artifacts.green_files(inst))
    return out


def check_roundtrip(inst: Instance):
    files = instance_files(inst)
    bad = [name for name, text in files.items() if artifacts.reparse(name, text) != text]
    return not bad, f"{len(files)} files" + (f", differing: {bad}" if bad else "")


def check_eisenstein(inst: Instance, digits: float = 14.0, tol: float = 1e-8):
    """The numerically slashed E_r has constant term delta_{rs} at every cusp s."""
    D, k = inst.D, inst.n
    order = max(slash_order_needed(D, k, r, digits=digits) for r in divisors(D))
    Er = eisenstein_Er(D, k, order)
    worst = 0.0
    for r, E in Er.items():
        for s in divisors(D):
            val = slash_constant_numeric(E.series, D, k, s, tol=10.0 ** -digits)
            worst = max(worst, abs(val - (1 if r == s else 0)))
    return worst < tol, f"worst deviation {worst:.1e} at order {order}"


INSTANCE_CHECKS = [
    (2, check_quadratic),
    (3, check_mult),
    (4, check_residue),
    (6, check_fj_transform),
    (7, check_leading_index),
    (8, check_enumeration),
    (9, check_green),
    (10, check_roundtrip),
    ("eis", check_eisenstein),
]


def run_instance(cfg: JobConfig, order: Optional[int] = None) -> List[Check]:
    inst = Instance(cfg, order)
    return [_timed(key, lambda fn=fn: fn(inst), cfg.name) for key, fn in INSTANCE_CHECKS]


def run_global() -> List[Check]:
    return [
        _timed(1, check_cosets),
        _timed(5, check_theta_shift),
        _timed(8, check_theta_square),
        _timed(9, check_gamma_asymptotic),
    ]


def _load_and_run(path: str, order: Optional[int]) -> List[Check]:
    return run_instance(JobConfig.load(path), order)


def run_all(configs: Optional[Sequence] = None, order: Optional[int] = None, threads: int = 1) -> List[Check]:
    """Every check over the given configs (the bundled corpus by default)."""
    paths = [str(p) for p in (configs or bundled_config_paths())]
    cfgs = [JobConfig.load(p) for p in paths]  # validate before doing any work
    out = run_global()
    if threads > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(cfgs))) as ex:
            for res in ex.map(_load_and_run, paths, [order] * len(paths)):
                out.extend(res)
    else:
        for cfg in cfgs:
            out.extend(run_instance(cfg, order))
    return out


def summarize(checks: Sequence[Check]) -> List[Check]:
    """One merged line per criterion, in criterion order."""
    keys: List[object] = []
    for c in checks:
        if c.key not in keys:
            keys.append(c.key)
    keys.sort(key=lambda k: (isinstance(k, str), k if isinstance(k, int) else 0, str(k)))
    merged = []
    for k in keys:
        group = [c for c in checks if c.key == k]
        fails = [c for c in group if not c.ok]
        detail = "; ".join(f"{c.where or 'global'}: {c.detail}" for c in (fails or group))
        merged.append(Check(k, not fails, detail, sum(c.seconds for c in group)))
    return merged
