"""JSON documents for splines, problems and verdicts.

Floats are written with Python's shortest round-trip representation, which
never needs more than 17 significant digits and parses back to the same
double.  Non-finite margins (a stage never reached) are written as ``null``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields

from .admissibility import Certainty, DecisionConfig, SplineType, Verdict
from .errors import InvalidArgument
from .spline import AlternatingSpline, MonotoneSpline, NormTargets, OrderSpec


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else None


def _unnum(v):
    return math.nan if v is None else float(v)


def _require(doc, key, kind="document"):
    if not isinstance(doc, dict):
        raise InvalidArgument(f"{kind} must be a JSON object", field=kind)
    if key not in doc:
        raise InvalidArgument(f"{kind} is missing field '{key}'", field=key)
    return doc[key]


def _number_list(value, name):
    if not isinstance(value, (list, tuple)):
        raise InvalidArgument(f"{name} must be an array", field=name)
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InvalidArgument(f"{name} must contain numbers, got {v!r}", field=name)
        out.append(float(v))
    return out


def _int(value, name):
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidArgument(f"{name} must be an integer, got {value!r}", field=name)
    return value


# ---------------------------------------------------------------------------
# splines


def spline_to_dict(spline):
    if isinstance(spline, AlternatingSpline):
        return {
            "r": spline.r,
            "l": float(spline.l),
            "knots": [float(a) for a in spline.knots],
            "constant": float(spline.constant),
        }
    if isinstance(spline, MonotoneSpline):
        return {
            "r": spline.r,
            "terms": [[float(b), float(c)] for b, c in spline.terms],
            "constant": float(spline.constant),
        }
    raise InvalidArgument(f"cannot serialize {type(spline).__name__}", field="spline")


def spline_from_dict(doc):
    """Alternating spline from ``{r, l, knots, constant}``, or a general one from ``{r, terms, constant}``."""
    r = _int(_require(doc, "r", "spline"), "r")
    constant = float(doc.get("constant", 0.0))
    if "terms" in doc:
        terms = doc["terms"]
        if not isinstance(terms, list) or not all(isinstance(t, list) and len(t) == 2 for t in terms):
            raise InvalidArgument("terms must be an array of [knot, coefficient] pairs", field="terms")
        pairs = [tuple(_number_list(t, "terms")) for t in terms]
        return MonotoneSpline(r, tuple(pairs), constant)
    l = _require(doc, "l", "spline")
    if isinstance(l, bool) or not isinstance(l, (int, float)):
        raise InvalidArgument("l must be a number", field="l")
    knots = _number_list(_require(doc, "knots", "spline"), "knots")
    return AlternatingSpline(r, float(l), tuple(knots), constant)


# ---------------------------------------------------------------------------
# problems


_CONFIG_FIELDS = {f.name for f in fields(DecisionConfig)}


@dataclass(frozen=True)
class ProblemDocument:
    r: int
    orders: tuple
    norms: tuple
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.config) - _CONFIG_FIELDS
        if unknown:
            name = sorted(unknown)[0]
            raise InvalidArgument(f"unknown config field '{name}'", field=name)
        self.spec()
        self.targets()
        self.decision_config()

    def spec(self):
        return OrderSpec(self.r, tuple(self.orders))

    def targets(self):
        tg = NormTargets(tuple(self.norms))
        tg.check_against(self.spec())
        return tg

    def decision_config(self):
        try:
            return DecisionConfig(**self.config)
        except TypeError as exc:
            raise InvalidArgument(str(exc), field="config") from exc

    def to_dict(self):
        return {"r": self.r, "orders": list(self.orders), "norms": [float(v) for v in self.norms],
                "config": dict(self.config)}

    @classmethod
    def from_dict(cls, doc):
        r = _int(_require(doc, "r", "problem"), "r")
        orders = _require(doc, "orders", "problem")
        if not isinstance(orders, list) or not all(
            isinstance(k, int) and not isinstance(k, bool) for k in orders
        ):
            raise InvalidArgument("orders must be an array of integers", field="orders")
        norms = _number_list(_require(doc, "norms", "problem"), "norms")
        config = doc.get("config", {}) or {}
        if not isinstance(config, dict):
            raise InvalidArgument("config must be a JSON object", field="config")
        return cls(r, tuple(orders), tuple(norms), dict(config))


# ---------------------------------------------------------------------------
# verdicts


def verdict_to_dict(v: Verdict):
    return {
        "admissible": v.admissible,
        "type": v.spline_type.value if v.spline_type is not None else None,
        "witness": spline_to_dict(v.witness) if v.witness is not None else None,
        "binding_stage": v.binding_stage,
        "margins": [_num(m) for m in v.margins],
        "certainty": v.certainty.value,
        "r": v.r,
        "orders": list(v.orders),
        "norms": [float(m) for m in v.norms],
        "limit": _num(v.limit) if v.limit is not None else None,
    }


def verdict_from_dict(doc):
    kind = doc.get("type")
    witness = doc.get("witness")
    return Verdict(
        bool(_require(doc, "admissible", "verdict")),
        SplineType(kind) if kind is not None else None,
        spline_from_dict(witness) if witness is not None else None,
        _int(_require(doc, "binding_stage", "verdict"), "binding_stage"),
        tuple(_unnum(m) for m in _require(doc, "margins", "verdict")),
        Certainty(_require(doc, "certainty", "verdict")),
        _int(_require(doc, "r", "verdict"), "r"),
        tuple(_require(doc, "orders", "verdict")),
        tuple(float(m) for m in _require(doc, "norms", "verdict")),
        _unnum(doc["limit"]) if doc.get("limit") is not None else None,
    )


def dumps(doc):
    return json.dumps(doc, indent=2, allow_nan=False)


def loads(text, kind="document"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{kind} is not valid JSON: {exc}", field=kind) from exc


def load_file(path, kind="document"):
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read(), kind)
    except OSError as exc:
        raise InvalidArgument(f"cannot read {kind} file {path}: {exc.strerror}", field=kind) from exc


def report_to_dict(report):
    """Comparison-suite report as a plain dict (see :class:`rmonotone.oracle.SuiteReport`)."""
    out = report.to_dict()
    out["failures"] = [asdict(f) if not isinstance(f, dict) else f for f in out["failures"]]
    return out
