"""Report assembly: exact-number rendering, JSON and text emitters, re-parsing.

Exact values are never written as floats. A ``Fraction`` becomes ``"p/q"``
(``"p"`` when integral), a ``PiMultiple`` becomes ``"p/q·π"``; plain ints and
bools stay JSON numbers and booleans.
"""

import json
import logging
import re
from dataclasses import dataclass
from fractions import Fraction

import sympy

from gaugeloc import __version__
from gaugeloc.ccr import Cyclotomic

logger = logging.getLogger(__name__)

SCHEMA = "gaugeloc-report/1"

_PI = "·π"
_FRACTION_RE = re.compile(r"^-?\d+(/\d+)?$")


@dataclass(frozen=True)
class PiMultiple:
    """A rational multiple of π, e.g. a phase or a pairing in units of π."""

    value: Fraction

    def __str__(self) -> str:
        return f"{render_fraction(self.value)}{_PI}"


def render_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def to_jsonable(value):
    """Recursively convert analysis results into JSON-safe values with exact strings."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return render_fraction(value)
    if isinstance(value, PiMultiple):
        return str(value)
    if isinstance(value, Cyclotomic):
        return value.render()
    if isinstance(value, sympy.Basic):
        return str(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted((to_jsonable(v) for v in value), key=repr)
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__} into a report")


def parse_exact(value):
    """Inverse of ``to_jsonable`` on exact numbers: recover Fractions and PiMultiples."""
    if isinstance(value, str):
        if value.endswith(_PI) and _FRACTION_RE.match(value[:-len(_PI)]):
            return PiMultiple(Fraction(value[:-len(_PI)]))
        if _FRACTION_RE.match(value):
            return Fraction(value)
        return value
    if isinstance(value, dict):
        return {k: parse_exact(v) for k, v in value.items()}
    if isinstance(value, list):
        return [parse_exact(v) for v in value]
    return value


def environment() -> dict:
    """Versions that determine the numbers; timing and thread counts are left out."""
    return {"gaugeloc": __version__, "sympy": sympy.__version__}


def build_report(scenario: str, results: list[dict]) -> dict:
    return {
        "schema": SCHEMA,
        "version": __version__,
        "environment": environment(),
        "scenario": scenario,
        "analyses": results,
    }


def to_json(report: dict) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _flatten(prefix: str, value, out: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        if not value:
            out.append((prefix, "{}"))
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else str(key), value[key], out)
    elif isinstance(value, list) and value and any(isinstance(v, (dict, list)) for v in value):
        for i, item in enumerate(value):
            _flatten(f"{prefix}[{i}]", item, out)
    else:
        out.append((prefix, json.dumps(value, ensure_ascii=False) if not isinstance(value, str) else value))


def to_text(report: dict) -> str:
    """One aligned two-column table per analysis."""
    data = to_jsonable(report)
    lines = [f"{data['schema']}  gaugeloc {data['version']}  sympy {data['environment']['sympy']}",
             f"scenario: {data['scenario']}", ""]
    for i, analysis in enumerate(data["analyses"]):
        rows: list[tuple[str, str]] = []
        _flatten("", analysis.get("result", {}), rows)
        if "error" in analysis:
            rows.insert(0, ("error", analysis["error"]))
        lines.append(f"[{i}] {analysis['kind']}: {analysis['status']}")
        width = max((len(k) for k, _ in rows), default=0)
        lines.extend(f"  {k.ljust(width)}  {v}" for k, v in rows)
        lines.append("")
    return "\n".join(lines)


def load_json(text: str) -> dict:
    return parse_exact(json.loads(text))
