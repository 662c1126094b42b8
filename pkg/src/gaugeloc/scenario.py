"""Scenario files: TOML parsing, validation and name resolution.

A scenario names complexes and embeddings (presets or explicit builds) and
lists the analyses to run on them. Everything is resolved and validated
before any analysis starts, so ``gaugeloc check`` and ``gaugeloc run`` see the
same errors.
"""

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from gaugeloc import presets
from gaugeloc.complex import Embedding, SpacetimeComplex, build_complex
from gaugeloc.errors import GaugelocError, ParseError, ValidationError

logger = logging.getLogger(__name__)

SCHEMA = "gaugeloc-scenario/1"
PRESET_PREFIX = "preset:"

LAYERS = ("maxwell", "character")

# kind -> (required keys, optional keys); "kind" itself is implied
KINDS = {
    "cohomology-table": ({"complex"}, set()),
    "duality-check": ({"complex"}, set()),
    "homotopy-check": ({"complex"}, set()),
    "propagator-check": ({"complex", "k"}, {"samples"}),
    "maxwell-audit": ({"complex", "k"}, {"embedding", "disjoint"}),
    "ym-affine-audit": ({"complex"}, {"embeddings"}),
    "ym-character-audit": ({"complex"}, {"f", "h"}),
    "ccr-quantize": ({"complex"}, {"h", "samples"}),
    "isotony": ({"regions", "target", "layer"}, {"k", "inclusions"}),
    "no-go": ({"f", "h", "k", "layer"}, set()),
}

_COMPLEX_KEYS = {"time", "margin", "components"}
_EMBEDDING_KEYS = {"source", "target", "placements", "collar"}
_LOCATION_RE = re.compile(r"line (\d+), column (\d+)")


@dataclass(frozen=True)
class AnalysisSpec:
    index: int
    kind: str
    params: dict


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    complexes: dict[str, SpacetimeComplex]
    embeddings: dict[str, Embedding]
    analyses: tuple[AnalysisSpec, ...] = field(default=())

    def complex(self, name: str) -> SpacetimeComplex:
        return self.complexes[name]

    def embedding(self, name: str) -> Embedding:
        return self.embeddings[name]


def parse_toml(text: str) -> dict:
    """TOML text to a mapping; syntax errors become ParseError with line and column."""
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line, column = getattr(exc, "lineno", None), getattr(exc, "colno", None)
        if line is None:
            match = _LOCATION_RE.search(str(exc))
            if match:
                line, column = int(match.group(1)), int(match.group(2))
        message = str(exc).split(" (at line")[0]
        raise ParseError(f"invalid scenario TOML: {message}", line=line, column=column) from None


def _unknown(keys, allowed, where: str) -> None:
    extra = sorted(set(keys) - set(allowed))
    if extra:
        raise ValidationError(f"{where}: unknown key(s) {', '.join(extra)}", keys=extra)


def _build_complex(name: str, entry, margin: int) -> SpacetimeComplex:
    if not isinstance(entry, dict):
        raise ValidationError(f"complex {name!r} must be a table")
    if "preset" in entry:
        _unknown(entry, {"preset"}, f"complex {name!r}")
        return presets.complex_preset(entry["preset"])
    _unknown(entry, _COMPLEX_KEYS, f"complex {name!r}")
    try:
        return build_complex({"margin": margin, **entry})
    except GaugelocError as exc:
        raise ValidationError(f"complex {name!r}: {exc}", complex=name) from None


def _build_embedding(name: str, entry, complexes: dict) -> Embedding:
    if not isinstance(entry, dict):
        raise ValidationError(f"embedding {name!r} must be a table")
    if "preset" in entry:
        _unknown(entry, {"preset"}, f"embedding {name!r}")
        return presets.embedding_preset(entry["preset"])
    _unknown(entry, _EMBEDDING_KEYS, f"embedding {name!r}")
    try:
        source, target = complexes[entry["source"]], complexes[entry["target"]]
        placements = [(int(p["component"]), tuple(int(o) for o in p["offsets"])) for p in entry["placements"]]
    except KeyError as exc:
        raise ValidationError(f"embedding {name!r}: missing or unresolved {exc}", embedding=name) from None
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"embedding {name!r}: malformed placements: {exc}", embedding=name) from None
    try:
        return Embedding.translate(source, target, placements, int(entry.get("collar", 1)), name)
    except GaugelocError as exc:
        raise ValidationError(f"embedding {name!r}: {exc}", embedding=name) from None


def _check_names(where: str, names, table: dict, what: str) -> None:
    for n in names:
        if n not in table:
            raise ValidationError(f"{where}: unknown {what} {n!r}", name=n)


def _check_degree(where: str, k: int, c) -> None:
    if not 0 <= k <= c.dim:
        raise ValidationError(f"{where}: k={k} is outside 0..{c.dim}", degree=k)


def _as_list(where: str, value) -> list:
    if not isinstance(value, list):
        raise ValidationError(f"{where}: expected a list, got {value!r}")
    return value


def _validate_analysis(index: int, entry, complexes: dict, embeddings: dict) -> AnalysisSpec:
    where = f"analysis {index}"
    if not isinstance(entry, dict) or "kind" not in entry:
        raise ValidationError(f"{where}: every analysis needs a kind")
    kind = entry["kind"]
    if kind not in KINDS:
        raise ValidationError(f"{where}: unknown kind {kind!r}; expected one of {', '.join(KINDS)}", kind=kind)
    required, optional = KINDS[kind]
    params = {k: v for k, v in entry.items() if k != "kind"}
    missing = sorted(required - set(params))
    if missing:
        raise ValidationError(f"{where} ({kind}): missing {', '.join(missing)}", kind=kind)
    _unknown(params, required | optional, f"{where} ({kind})")

    if "complex" in params:
        _check_names(where, [params["complex"]], complexes, "complex")
    for key in ("k", "samples"):
        if key in params and (isinstance(params[key], bool) or not isinstance(params[key], int)):
            raise ValidationError(f"{where}: {key} must be an integer")
    if "complex" in params and "k" in params:
        _check_degree(where, params["k"], complexes[params["complex"]])
    if "layer" in params and params["layer"] not in LAYERS:
        raise ValidationError(f"{where}: layer must be one of {', '.join(LAYERS)}")

    if kind == "no-go":
        _check_names(where, [params["f"], params["h"]], embeddings, "embedding")
        _check_degree(where, params["k"], embeddings[params["f"]].source)
    elif kind == "maxwell-audit":
        if "embedding" in params:
            _check_names(where, [params["embedding"]], embeddings, "embedding")
        if "disjoint" in params:
            pair = _as_list(where, params["disjoint"])
            if len(pair) != 2:
                raise ValidationError(f"{where}: disjoint needs exactly two embeddings")
            _check_names(where, pair, embeddings, "embedding")
    elif kind == "ym-affine-audit":
        _check_names(where, _as_list(where, params.get("embeddings", [])), embeddings, "embedding")
    elif kind in ("ym-character-audit", "ccr-quantize"):
        if "f" in params:
            _check_names(where, [params["f"]], embeddings, "embedding")
        if "h" in params:
            try:
                if Fraction(str(params["h"])) <= 0:
                    raise ValueError
            except (ValueError, ZeroDivisionError):
                raise ValidationError(f"{where}: h must be a positive rational, got {params['h']!r}") from None
    elif kind == "isotony":
        regions = _as_list(where, params["regions"])
        _check_names(where, regions, embeddings, "embedding")
        _check_names(where, [params["target"]], complexes, "complex")
        target = complexes[params["target"]]
        if any(embeddings[r].target is not target for r in regions):
            raise ValidationError(f"{where}: every region must embed into {params['target']!r}")
        for inclusion in _as_list(where, params.get("inclusions", [])):
            if not isinstance(inclusion, list) or len(inclusion) != 3:
                raise ValidationError(f"{where}: inclusions are [inner, outer, embedding] triples")
            _check_names(where, inclusion[:2], set(regions), "region")
            _check_names(where, inclusion[2:], embeddings, "embedding")
    return AnalysisSpec(index, kind, params)


def from_mapping(data: dict, name: str, margin: int = 2, require_schema: bool = True) -> Scenario:
    """Validate a parsed scenario and resolve every complex and embedding it names."""
    if not isinstance(data, dict):
        raise ValidationError("a scenario must be a table")
    _unknown(data, {"schema", "complexes", "embeddings", "analyses", "name", "description", "anchor"}, "scenario")
    if require_schema and data.get("schema") != SCHEMA:
        raise ValidationError(f"scenario schema must be {SCHEMA!r}, got {data.get('schema')!r}")
    complexes = {n: _build_complex(n, e, margin) for n, e in data.get("complexes", {}).items()}
    embeddings = {n: _build_embedding(n, e, complexes) for n, e in data.get("embeddings", {}).items()}
    analyses = tuple(_validate_analysis(i, entry, complexes, embeddings)
                     for i, entry in enumerate(_as_list("analyses", data.get("analyses", []))))
    logger.debug("scenario %s: %d complexes, %d embeddings, %d analyses",
                 name, len(complexes), len(embeddings), len(analyses))
    return Scenario(name, complexes, embeddings, analyses)


def load_scenario(target: str, margin: int = 2) -> Scenario:
    """Load ``preset:NAME`` from the catalog or a TOML scenario file."""
    if target.startswith(PRESET_PREFIX):
        preset = target[len(PRESET_PREFIX):]
        if preset not in presets.SCENARIOS_BY_NAME:
            raise ValidationError(f"unknown scenario preset {preset!r}", preset=preset)
        return from_mapping(presets.SCENARIOS_BY_NAME[preset], target, margin, require_schema=False)
    path = Path(target)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read scenario {target!r}: {exc.strerror}", path=target) from None
    return from_mapping(parse_toml(text), str(path), margin)
