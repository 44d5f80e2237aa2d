"""Job configuration and the per-instance computation chain shared by the CLI and the verifier."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional

from .arith_local import check_discriminant, inv_p, prime_divisors, weil_index_table
from .borcherds import BoundaryData
from .hermlat import FullLattice, HermLattice
from .modforms import HolForm, eisenstein_Er, holomorphic_span, import_basis
from .weakforms import (
    AdmissibleBasis,
    CuspConstants,
    PrincipalPart,
    admissible_from_span,
    cusp_constants,
    scale_for_products,
    scaled_cusp,
)

THREADS_ENV = "UNITARY_BORCHERDS_THREADS"


class ConfigError(ValueError):
    pass


@dataclass
class JobConfig:
    D: int
    n: int
    L0_path: Path
    L_s_paths: List[Path]
    M: int = 10
    q_order: int = 2
    q2_order: int = 0
    inv: Optional[Dict[int, int]] = None
    basis_paths: List[Path] = field(default_factory=list)
    principal_parts: Optional[List[PrincipalPart]] = None
    green: dict = field(default_factory=dict)
    name: str = "job"

    @classmethod
    def from_dict(cls, data: dict, base: Path, name: str = "job") -> "JobConfig":
        for key in ("D", "n", "L0"):
            if key not in data:
                raise ConfigError(f"config lacks required key '{key}'")
        try:
            D = int(data["D"])
            n = int(data["n"])
        except (TypeError, ValueError) as exc:
            raise ConfigError("D and n must be integers") from exc
        try:
            check_discriminant(D)
        except ValueError as exc:
            raise ConfigError(f"D={D} rejected: D must be positive, squarefree and congruent to 3 mod 4") from exc
        if n < 3:
            raise ConfigError(f"n={n} rejected: n >= 3 is required")
        M = int(data.get("M", 10))
        if M < 0:
            raise ConfigError("M must be nonnegative")
        inv = None
        if "inv_p" in data:
            inv = {int(p): int(v) for p, v in data["inv_p"].items()}
            if set(inv) != set(prime_divisors(D)) or any(v not in (1, -1) for v in inv.values()):
                raise ConfigError("inv_p must give +1 or -1 for every prime dividing D")
        pps = None
        if "principal_parts" in data:
            pps = [PrincipalPart.from_json(obj) for obj in data["principal_parts"]]
        resolve = lambda p: (base / p).resolve()
        cfg = cls(
            D=D, n=n,
            L0_path=resolve(data["L0"]),
            L_s_paths=[resolve(p) for p in data.get("L_s", [])],
            M=M,
            q_order=int(data.get("q_order", 2)),
            q2_order=int(data.get("q2_order", 0)),
            inv=inv,
            basis_paths=[resolve(p) for p in data.get("holomorphic_basis", [])],
            principal_parts=pps,
            green=dict(data.get("green", {})),
            name=name,
        )
        for p in [cfg.L0_path, *cfg.L_s_paths, *cfg.basis_paths]:
            if not p.exists():
                raise ConfigError(f"file not found: {p}")
        return cfg

    @classmethod
    def load(cls, path) -> "JobConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(data, path.parent, path.stem)


def bundled_config_paths() -> List[Path]:
    root = resources.files("unitary_borcherds") / "data" / "configs"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".json"))


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


class Instance:
    """Lazily computed objects for one configuration."""

    def __init__(self, cfg: JobConfig, order: Optional[int] = None):
        self.cfg = cfg
        self.D = cfg.D
        self.n = cfg.n
        self.M = cfg.M
        self.order = max(order or 0, cfg.M + 1)

    @cached_property
    def L0(self) -> HermLattice:
        L = HermLattice.load(self.cfg.L0_path)
        if L.D != self.D or L.rank != self.n - 2:
            raise ConfigError("L0 must have the configured D and rank n - 2")
        if not L.is_self_dual():
            raise ConfigError("L0 must be self-dual")
        return L

    @cached_property
    def L_s(self) -> List[HermLattice]:
        out = []
        for p in self.cfg.L_s_paths:
            L = HermLattice.load(p)
            if L.D != self.D or L.rank != self.n or not L.is_self_dual():
                raise ConfigError(f"{p}: exceptional lattices must be self-dual of rank n with the configured D")
            out.append(L)
        return out

    @cached_property
    def bd(self) -> BoundaryData:
        return BoundaryData.standard(self.L0, self.n)

    @cached_property
    def full(self) -> FullLattice:
        return self.bd.full

    @cached_property
    def inv(self) -> Dict[int, int]:
        if self.cfg.inv is not None:
            return dict(self.cfg.inv)
        det = self.full.det()
        return {p: inv_p(det, self.D, p) for p in prime_divisors(self.D)}

    @cached_property
    def gamma_table(self):
        return weil_index_table(self.D, self.n, self.inv)

    @cached_property
    def imported(self) -> List[HolForm]:
        forms = []
        for p in self.cfg.basis_paths:
            forms.extend(import_basis(Path(p).read_text()))
        return forms

    def span(self, order: Optional[int] = None):
        return holomorphic_span(self.D, self.n, order or self.order, self.L_s, self.imported)

    @cached_property
    def hol_span(self):
        return self.span()

    @cached_property
    def Er(self) -> Dict[int, HolForm]:
        return eisenstein_Er(self.D, self.n, self.order)

    @cached_property
    def admissible(self) -> AdmissibleBasis:
        return admissible_from_span(self.M, self.hol_span)

    @cached_property
    def principal_parts(self) -> List[PrincipalPart]:
        return list(self.cfg.principal_parts) if self.cfg.principal_parts is not None else list(self.admissible.basis)

    def cusp(self, c: PrincipalPart) -> CuspConstants:
        return cusp_constants(c, self.Er, self.gamma_table)

    def scaled(self, c: PrincipalPart):
        """(t c, constants of t c) with t the smallest scaling admitted by the product formulas."""
        cc = self.cusp(c)
        t = scale_for_products(c, cc)
        return c * t, scaled_cusp(cc, t)
