"""Report payloads and a deterministic JSON writer.

Floats are written with 17 significant digits, complex numbers as
``[re, im]``, mappings in insertion order. Non-finite floats become the
strings ``"NaN"``, ``"Infinity"`` and ``"-Infinity"``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import fields, is_dataclass

import numpy as np

from .ergodic import CesaroTrajectory, LimitReport, TheoremVerdict
from .groups import CosetWitness, Subgroup, ZSubgroup
from .measures import FiniteMeasure, GroupFunction, IntMeasure, MeasureClass
from .spectral import DualTable, KTReport, SpectralReport, sort_complex


def _float(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def to_tree(obj):
    """Convert library values to JSON-ready builtins (floats stay floats)."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, np.bool_):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [to_tree(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_tree(v) for v in obj]
    if isinstance(obj, FiniteMeasure):
        return {"group": obj.group.label, "coeffs": to_tree(obj.coeffs)}
    if isinstance(obj, IntMeasure):
        return {"offset": obj.offset, "values": to_tree(obj.values)}
    if isinstance(obj, GroupFunction):
        return {"group": obj.group.label, "values": to_tree(obj.values)}
    if isinstance(obj, Subgroup):
        return {"order": len(obj.elements), "elements": list(obj.elements)}
    if isinstance(obj, ZSubgroup):
        return {"generator": obj.d}
    if isinstance(obj, CosetWitness):
        return {"representative": obj.representative, "subgroup": to_tree(obj.subgroup)}
    for kind, fn in _PAYLOADS:
        if isinstance(obj, kind):
            return to_tree(fn(obj))
    if is_dataclass(obj):
        return {f.name: to_tree(getattr(obj, f.name)) for f in fields(obj)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON text for ``obj``."""
    out: list[str] = []
    _emit(to_tree(obj), out, 0, indent)
    return "".join(out) + "\n"


def _emit(v, out, level, indent):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if v is None:
        out.append("null")
    elif v is True:
        out.append("true")
    elif v is False:
        out.append("false")
    elif isinstance(v, int):
        out.append(str(v))
    elif isinstance(v, float):
        out.append(_float(v))
    elif isinstance(v, str):
        out.append(json.dumps(v))
    elif isinstance(v, list):
        if not v:
            out.append("[]")
        elif all(not isinstance(x, (list, dict)) for x in v):
            out.append("[")
            for i, x in enumerate(v):
                if i:
                    out.append(", ")
                _emit(x, out, level + 1, indent)
            out.append("]")
        else:
            out.append("[\n")
            for i, x in enumerate(v):
                out.append(pad)
                _emit(x, out, level + 1, indent)
                out.append(",\n" if i < len(v) - 1 else "\n")
            out.append(end + "]")
    elif isinstance(v, dict):
        if not v:
            out.append("{}")
            return
        out.append("{\n")
        items = list(v.items())
        for i, (k, x) in enumerate(items):
            out.append(pad + json.dumps(k) + ": ")
            _emit(x, out, level + 1, indent)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(end + "}")
    else:
        raise TypeError(f"unexpected tree node {type(v).__name__}")


def verdict_payload(v: TheoremVerdict) -> dict:
    return {
        "theorem": v.theorem,
        "passed": v.passed,
        "observational": v.observational,
        "conclusion_checked": v.conclusion_checked,
        "hypotheses": [{"name": h.name, "holds": h.holds, "witness": h.witness}
                       for h in v.hypotheses],
        "diagnostics": v.diagnostics,
        "parts": [verdict_payload(p) for p in v.parts],
    }


def spectral_payload(r: SpectralReport) -> dict:
    return {
        "eigenvalues": sort_complex(r.eigenvalues),
        "spectral_radius": r.spectral_radius,
        "tol_unit": r.tol_unit,
        "unitary": [{"value": u.value, "multiplicity": u.multiplicity,
                     "geometric_multiplicity": u.geometric_multiplicity,
                     "semisimple": u.semisimple} for u in r.unitary],
    }


def dual_payload(d: DualTable) -> dict:
    return {"transform": d.transform, "F": list(d.F_set), "E": list(d.E_set), "tol": d.tol}


def kt_payload(k: KTReport) -> dict:
    return {"checkpoints": list(k.checkpoints), "d": k.d,
            "spectral_predicate": k.spectral_predicate, "decayed": k.decayed, "agree": k.agree,
            "unitary_eigenvalues": sort_complex(k.unitary_eigenvalues)}


def class_payload(c: MeasureClass) -> dict:
    return {
        "probability": c.probability, "adapted": c.adapted,
        "strictly_aperiodic": c.strictly_aperiodic, "idempotent": c.idempotent,
        "power_bounded": c.power_bounded, "support": list(c.support),
        "generated": c.generated, "difference_generated": c.difference_generated,
        "witness": c.witness, "oracle_checked": c.oracle_checked,
        "power_certificate": c.power_certificate,
    }


def limit_payload(r: LimitReport) -> dict:
    return {"verdict": r.verdict, "limit": r.limit, "residual": r.residual,
            "checkpoint": r.checkpoint, "rate_trace": list(r.rate_trace),
            "witness": list(r.witness) if r.witness is not None else None}


def trajectory_payload(t: CesaroTrajectory) -> dict:
    return {"kind": t.kind, "checkpoints": list(t.checkpoints), "final": t.last,
            "sup_abs_weight": t.sup_abs_weight}


_PAYLOADS = (
    (TheoremVerdict, verdict_payload),
    (SpectralReport, spectral_payload),
    (DualTable, dual_payload),
    (KTReport, kt_payload),
    (MeasureClass, class_payload),
    (LimitReport, limit_payload),
    (CesaroTrajectory, trajectory_payload),
)


def trajectory_csv(traj: CesaroTrajectory, window=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "index", "re", "im"])
    for n, i, re, im in traj.rows(window):
        w.writerow([n, i, format(re, ".17g"), format(im, ".17g")])
    return buf.getvalue()
