"""Artifact files written by the CLI, with matching loaders for round-trip checks."""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, List

from .arith_local import divisors, gamma_r, prime_divisors
from .borcherds import divisor_report, divisor_report_json, fj_index_I, leading_fj, mult_phi
from .greens import DomainPoint, xi_green
from .modforms import export_basis, import_basis, rationalize
from .pipeline import Instance
from .qseries import QExp
from .rings import format_fraction
from .weakforms import PrincipalPart, VVTable, vv_table


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def theta_files(inst: Instance, order: int) -> Dict[str, str]:
    out = {"theta_L0.txt": inst.L0.theta_series(order).serialize()}
    for i, L in enumerate(inst.L_s):
        out[f"theta_Ls{i}.txt"] = L.theta_series(order).serialize()
    return out


def gamma_files(inst: Instance) -> Dict[str, str]:
    table = inst.gamma_table
    obj = {
        "D": inst.D,
        "n": inst.n,
        "inv_p": {str(p): inst.inv[p] for p in prime_divisors(inst.D)},
        "gamma_p": {str(p): {"i_power": g.e, "value": repr(g)} for p, g in sorted(table.items())},
        "gamma_r": {str(r): {"i_power": gamma_r(r, table).e, "value": repr(gamma_r(r, table))}
                    for r in divisors(inst.D)},
    }
    return {"gamma.json": dumps(obj)}


def eis_files(inst: Instance) -> Dict[str, str]:
    forms = []
    for r in divisors(inst.D):
        E = inst.Er[r]
        try:
            E = rationalize(E)
        except ValueError:
            pass
        forms.append(E)
    return {"eisenstein.txt": export_basis(forms, inst.D, inst.n)}


def admissible_files(inst: Instance) -> Dict[str, str]:
    A = inst.admissible
    obj = {
        "D": inst.D,
        "n": inst.n,
        "M": A.M,
        "label": A.label,
        "complete": A.complete,
        "condition_rank": A.condition_rank,
        "cusp_forms": len(inst.hol_span.cusp_forms),
        "cusp_dimension": inst.hol_span.dim_cusp,
        "basis": [c.to_json() for c in A.basis],
    }
    return {"admissible.json": dumps(obj)}


def vv_files(inst: Instance) -> Dict[str, str]:
    disc = inst.full.disc_group_cached()
    out = {}
    for i, c in enumerate(inst.principal_parts):
        out[f"vv_{i}.txt"] = vv_table(c, inst.cusp(c), disc).serialize()
    return out


def fj_files(inst: Instance, order: int) -> Dict[str, str]:
    out = {}
    rows = []
    for i, c in enumerate(inst.principal_parts):
        cc = inst.cusp(c)
        mult, integral = mult_phi(inst.L0, inst.n, c)
        I = fj_index_I(inst.L0, inst.n, c, cc, inst.full)
        cs, ccs = inst.scaled(c)
        fj = leading_fj(inst.bd, cs, ccs, order)
        ms, _ = mult_phi(inst.L0, inst.n, cs)
        rows.append({
            "index": i,
            "c": c.to_json(),
            "k": format_fraction(cc.k),
            "mult": format_fraction(mult),
            "mult_integral": integral,
            "I": format_fraction(I),
            "scale": cs.c[0] // c.c[0] if c.c[0] else _scale_of(c, cs),
            "leading": fj.summary(),
            "scaled_mult": format_fraction(ms),
        })
        out[f"P_eta_{i}.txt"] = fj.P_eta.serialize()
        out[f"P_vert_{i}.txt"] = fj.P_vert.serialize()
    out["fj.json"] = dumps({"D": inst.D, "n": inst.n, "order": order, "parts": rows})
    return out


def _scale_of(c: PrincipalPart, cs: PrincipalPart) -> int:
    for a, b in zip(c.c, cs.c):
        if a:
            return b // a
    return 1


def divisor_files(inst: Instance) -> Dict[str, str]:
    out = {}
    for i, c in enumerate(inst.principal_parts):
        out[f"divisors_{i}.json"] = divisor_report_json(divisor_report(c, inst.cusp(c), inst.L_s, inst.n))
    return out


def green_rows(inst: Instance) -> List[tuple]:
    g = inst.cfg.green
    m = int(g.get("m", 1))
    bound = float(g.get("bound", 8.0))
    z = DomainPoint.generic(inst.full, seed=int(g.get("seed", 1)))
    rows = []
    for v in g.get("v", [0.5, 1.0, 2.0]):
        r = xi_green(m, float(v), z, bound)
        rows.append((float(v), r.value, r.tail, r.count))
    return rows


def green_files(inst: Instance) -> Dict[str, str]:
    lines = ["v,xi,tail,count"]
    for v, val, tail, count in green_rows(inst):
        lines.append(f"{v!r},{val!r},{tail!r},{count}")
    return {"green.csv": "\n".join(lines) + "\n"}


# re-parsing

def reparse(name: str, text: str) -> str:
    """Parse an artifact through the library loaders and serialize it again."""
    if name.startswith(("theta_", "P_eta_", "P_vert_")):
        return QExp.parse(text).serialize()
    if name == "eisenstein.txt":
        forms = import_basis(text, cuspidal=False)
        D = forms[0].D
        return export_basis(forms, D, forms[0].weight)
    if name.startswith("vv_"):
        return VVTable.parse(text).serialize()
    if name == "admissible.json":
        obj = json.loads(text)
        obj["basis"] = [PrincipalPart.from_json(b).to_json() for b in obj["basis"]]
        return dumps(obj)
    if name.endswith(".json"):
        return dumps(json.loads(text))
    if name.endswith(".csv"):
        lines = text.splitlines()
        out = [lines[0]]
        for ln in lines[1:]:
            v, val, tail, count = ln.split(",")
            out.append(f"{float(v)!r},{float(val)!r},{float(tail)!r},{int(count)}")
        return "\n".join(out) + "\n"
    raise ValueError(f"unknown artifact {name}")
