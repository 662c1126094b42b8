"""Analysis runners: one function per scenario kind, each returning a result dict with ``ok``.

Runners only read the scenario and the shared complexes; the operator and
cohomology caches on each complex are safe to fill from several threads.
"""

import logging
import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from gaugeloc import ccr, cohomology, linalg, maxwell, propagator, yangmills
from gaugeloc.complex import C, SUPPORTS, Cell, Cochain, Embedding, SpacetimeComplex
from gaugeloc.config import Config
from gaugeloc.errors import BadSpec, GaugelocError, ShadowOverflow
from gaugeloc.report import PiMultiple
from gaugeloc.scenario import AnalysisSpec, Scenario

logger = logging.getLogger(__name__)

_DUALITY_PAIRS = ("c-free", "free-c", "sc-tc", "tc-sc")
_FLAVORS = ("d", "delta")


def _nondegenerate(m) -> bool:
    rows, cols = m.shape
    return rows == cols and linalg.rank(m) == rows


def _h(params: dict, config: Config) -> Fraction:
    return Fraction(str(params["h"])) if "h" in params else config.h


def _unit(i: int, n: int) -> list[int]:
    return [1 if j == i else 0 for j in range(n)]


# --- cohomology ---


def run_cohomology_table(scenario: Scenario, params: dict, config: Config) -> dict:
    c = scenario.complex(params["complex"])
    table, ok = {}, True
    for name, s in SUPPORTS.items():
        for flavor in _FLAVORS:
            measured = list(cohomology.dims(c, s, flavor))
            predicted = [cohomology.kunneth_prediction(c, k, s, flavor) for k in range(c.dim + 1)]
            raw = [cohomology.raw_dimension(c, k, s, flavor) for k in range(c.dim + 1)]
            agree = measured == predicted == raw
            table[f"{name}/{flavor}"] = {"dims": measured, "predicted": predicted, "raw": raw, "agree": agree}
            ok = ok and agree
    return {"dim": c.dim, "euler_free": c.euler_characteristic(), "table": table, "ok": ok}


def run_duality_check(scenario: Scenario, params: dict, config: Config) -> dict:
    c = scenario.complex(params["complex"])
    rows = []
    for k in range(c.dim + 1):
        for pair in _DUALITY_PAIRS:
            for flavors in (("d", "d"), ("delta", "d")):
                try:
                    m = cohomology.duality_pairing_matrix(c, k, pair, flavors)
                except BadSpec:
                    continue
                rows.append({"k": k, "pair": pair, "flavors": "/".join(flavors), "shape": list(m.shape),
                             "nondegenerate": _nondegenerate(m)})
    return {"pairings": rows, "ok": all(r["nondegenerate"] for r in rows)}


def run_homotopy_check(scenario: Scenario, params: dict, config: Config) -> dict:
    c = scenario.complex(params["complex"])
    rows = []
    for k in range(c.dim + 1):
        row = cohomology.homotopy_identities(c, k)
        iso = cohomology.toolkit_isomorphisms(c, k)
        one_sided = cohomology.one_sided_triviality(c, k)
        row.update({"tc_dims": iso["tc_dims"], "tc_inverse": iso["tc_inverse"], "sc_dims": iso["sc_dims"],
                    "sc_inverse": iso["sc_inverse"], "one_sided_dims": one_sided["dims"],
                    "one_sided_trivial": one_sided["ok"]})
        rows.append(row)
    keys = ("tc_homotopy", "sc_homotopy", "tc_inverse", "sc_inverse", "one_sided_trivial")
    return {"degrees": rows, "ok": all(r[key] for r in rows for key in keys)}


# --- propagators and Maxwell ---


def run_propagator_check(scenario: Scenario, params: dict, config: Config) -> dict:
    c = scenario.complex(params["complex"])
    op = propagator.build_dalembert(c, params["k"])
    green = propagator.green_identities(op, params.get("samples", 50), config.seed)
    exact = propagator.verify_exact_sequence(op)
    return {"green": green, "exact_sequence": exact, "ok": green["ok"] and exact["ok"]}


def _gauge_fixing_checks(c: SpacetimeComplex, obs: maxwell.MaxwellObservables) -> dict:
    """Lorenz gauge on a few solutions; observables read the same field before and after."""
    fields = maxwell.solution_space(c, obs.degree).field_cochains()[:3]
    omegas = [obs.cochain(_unit(i, obs.dim)) for i in range(min(obs.dim, 3))]
    lorenz = invariant = True
    for field in fields:
        fixed = maxwell.lorenz_gauge(c, field)
        lorenz = lorenz and fixed["lorenz"]
        invariant = invariant and all(maxwell.evaluate(w, field) == maxwell.evaluate(w, fixed["field"])
                                      for w in omegas)
    return {"fields": len(fields), "lorenz": lorenz, "evaluation_invariant": invariant, "ok": lorenz and invariant}


def run_maxwell_audit(scenario: Scenario, params: dict, config: Config) -> dict:
    c, k = scenario.complex(params["complex"]), params["k"]
    obs = maxwell.observables(c, k)
    out = {
        "k": k,
        "dim_obs": obs.dim,
        "radical": maxwell.radical(obs),
        "solutions": maxwell.solution_space(c, k).report,
    }
    checks = [out["radical"]["ok"], out["solutions"]["ok"]]
    if "embedding" in params:
        e = scenario.embedding(params["embedding"])
        if e.source is not c:
            raise BadSpec(f"embedding {e.name!r} does not start from {params['complex']!r}")
        out["locality"] = maxwell.locality_kernel(e, k)
        checks.append(out["locality"]["ok"])
        if maxwell.is_time_window(e):
            out["timeslice"] = maxwell.timeslice_check(e, k)
            checks.append(out["timeslice"]["ok"])
        try:
            out["presymplectic"] = maxwell.presymplectic_preserved(e, k)
            checks.append(out["presymplectic"]["ok"])
        except (ShadowOverflow, BadSpec) as exc:
            out["presymplectic"] = {"skipped": f"{type(exc).__name__}: {exc}"}
    if config.verify_extra:
        out["gauge_fixing"] = _gauge_fixing_checks(c, obs)
        checks.append(out["gauge_fixing"]["ok"])
    if "disjoint" in params:
        first, second = (scenario.embedding(n) for n in params["disjoint"])
        out["causality"] = maxwell.causality_check(first, second, k)
        checks.append(out["causality"]["ok"])
    out["ok"] = all(checks)
    return out


# --- Yang–Mills ---


def _aharonov_bohm_checks(c: SpacetimeComplex) -> dict:
    ab = yangmills.aharonov_bohm(c)
    split = yangmills.separate_connections(yangmills.Connection.zero(c), ab)
    if isinstance(split, yangmills.GaugeEquivalent):
        return {"separated": False, "ok": False}
    return {
        "separated": True,
        "kind": split.kind,
        "phases": [PiMultiple(v) for v in split.values],
        "phase_difference": PiMultiple(split.phase_difference),
        "ok": split.phase_difference == 1,
    }


def _holonomy_checks(c: SpacetimeComplex) -> dict:
    """Brute-force holonomies of the holonomy-π connection and of its 2π-shifted gauge copy."""
    ab = yangmills.aharonov_bohm(c)
    lattice = yangmills.gauge_lattice(c)
    copy = ab.gauge_transform(lattice.generators[0])
    axis = next(i for i, a in enumerate(c.axes(0)) if a.kind == "circle")
    base = Cell(0, (0,) * c.dim, (c.n_time // 2,) + (0,) * (c.dim - 1))
    first, second = yangmills.holonomy(ab, axis, base), yangmills.holonomy(copy, axis, base)
    return {"holonomy": PiMultiple(first), "gauge_copy": PiMultiple(second),
            "ok": abs(first) == 1 and (first - second) % 2 == 0 and lattice.contains(ab.value - copy.value)}


def run_ym_affine_audit(scenario: Scenario, params: dict, config: Config) -> dict:
    c = scenario.complex(params["complex"])
    space = yangmills.affine_obs_space(c)
    lattice = yangmills.gauge_lattice(c)
    out = {"space": space.report, "h1_rank": lattice.topological_part.rank}
    checks = [space.report["radical_is_curvature"]]
    if space.dim:
        basis_ok = all(space.observable(_unit(i, space.dim)).verify_invariance(lattice, config.seed + i)
                       for i in range(space.dim))
        out["basis_invariant"] = basis_ok
        checks.append(basis_ok)
    compact_2 = c.basis(2, C)
    if compact_2:
        beta = Cochain.indicator(c, compact_2[len(compact_2) // 2])
        out["curvature_dual_invariant"] = yangmills.curvature_dual(beta).verify_invariance(lattice, config.seed)
        checks.append(out["curvature_dual_invariant"])
    if lattice.topological_part.rank:
        ab = yangmills.aharonov_bohm(c)
        out["affine_blind_to_holonomy"] = yangmills.flat_insensitivity(space, ab)
        out["charges"] = yangmills.charge_observables(ab)
        checks += [out["affine_blind_to_holonomy"], out["charges"]["flat"], out["charges"]["magnetic_zero"]]
    out["locality"] = [yangmills.psv0_locality(scenario.embedding(n)) for n in params.get("embeddings", [])]
    checks += [r["ok"] for r in out["locality"]]
    out["ok"] = all(checks)
    return out


def run_ym_character_audit(scenario: Scenario, params: dict, config: Config) -> dict:
    c = scenario.complex(params["complex"])
    group = yangmills.character_obs_space(c, _h(params, config))
    lattice = yangmills.gauge_lattice(c)
    duals = yangmills.dual_characters(c)
    out = {
        "group": group.report,
        "dual_characters_invariant": all(ch.verify_invariance(lattice, config.seed) for ch in duals),
    }
    checks = [group.report["ok"], out["dual_characters_invariant"]]
    if duals:
        out["aharonov_bohm"] = _aharonov_bohm_checks(c)
        checks.append(out["aharonov_bohm"]["ok"])
        if config.verify_extra and any(a.kind == "circle" for a in c.axes(0)):
            out["holonomy"] = _holonomy_checks(c)
            checks.append(out["holonomy"]["ok"])
    charges = [yangmills.charge_observables(conn) for conn in yangmills.on_shell_connections(c)[:3]]
    out["on_shell_charges"] = charges
    checks += [ch["on_shell"] and ch["magnetic_zero"] for ch in charges]
    if "f" in params:
        e = scenario.embedding(params["f"])
        if e.source is not c:
            raise BadSpec(f"embedding {e.name!r} does not start from {params['complex']!r}")
        out["locality"] = maxwell.locality_kernel(e, 1)
        checks.append(out["locality"]["ok"])
    out["ok"] = all(checks)
    return out


# --- Weyl algebra ---


def _random_element(group: ccr.PresymplecticGroup, rng: random.Random) -> ccr.WeylElement:
    out = None
    for _ in range(rng.randint(1, 3)):
        coords = [Fraction(rng.randint(-2, 2), rng.choice((1, 2)) if div else 1) for div in group.divisible]
        term = Fraction(rng.randint(-3, 3) or 1, rng.randint(1, 2)) * group.W(coords)
        out = term if out is None else out + term
    return out


def run_ccr_quantize(scenario: Scenario, params: dict, config: Config) -> dict:
    c = scenario.complex(params["complex"])
    chars = yangmills.character_obs_space(c, _h(params, config))
    group, _ = chars.presymplectic_group()
    labels = list(group.labels)

    rng = random.Random(config.seed)
    samples = params.get("samples", 100)
    associative = involutive = state = submultiplicative = True
    for _ in range(samples):
        a, b, d = (_random_element(group, rng) for _ in range(3))
        associative = associative and (a * b) * d == a * (b * d)
        involutive = (involutive and ccr.involution(a * b) == ccr.involution(b) * ccr.involution(a)
                      and ccr.involution(ccr.involution(a)) == a)
        state = (state and ccr.reference_state(ccr.involution(a) * a) == ccr.coefficient_square_sum(a)
                 and ccr.state_bound_check(a))
        submultiplicative = submultiplicative and bool(ccr.l1_norm(a * b) <= ccr.l1_norm(a) * ccr.l1_norm(b))

    centre = {label: ccr.center_test(group, group.generator(i)) for i, label in enumerate(labels)}
    expected_central = all(centre[label]["central"] for label in labels if label.startswith("center"))
    witnesses_ok = all(r["central"] or not r["commutator_zero"] for r in centre.values())
    out = {
        "h": chars.h,
        "generators": labels,
        "pairing_pi": [[PiMultiple(x) for x in row] for row in group.pairing],
        "samples": samples,
        "associative": associative,
        "involution": involutive,
        "reference_state": state,
        "l1_submultiplicative": submultiplicative,
        "central": {label: r["central"] for label, r in centre.items()},
        "centre_witnesses": {label: {"witness": r["witness"], "pairing_pi": PiMultiple(r["pairing_pi"])}
                             for label, r in centre.items() if not r["central"]},
    }
    out["ok"] = associative and involutive and state and submultiplicative and expected_central and witnesses_ok
    return out


# --- locality ---


def _inclusion_indices(regions: list[str], inclusions, scenario: Scenario) -> list:
    return [(regions.index(inner), regions.index(outer), scenario.embedding(emb)) for inner, outer, emb in inclusions]


def run_isotony(scenario: Scenario, params: dict, config: Config) -> dict:
    names = params["regions"]
    regions = [scenario.embedding(n) for n in names]
    inclusions = _inclusion_indices(names, params.get("inclusions", []), scenario)
    if params["layer"] == "character":
        return yangmills.ym_isotony_quotient(regions, inclusions, config.h)
    out = maxwell.isotony_quotient(regions, params.get("k", 1), inclusions)
    out["layer"] = "maxwell"
    return out


def quantum_witness(f: Embedding, h: Embedding, witness, coupling) -> dict:
    """Push 1 - W_x through the CCR functor along both legs of a character no-go.

    ``witness`` is x in the observable coordinates of the common source.
    Along ``h`` the image of x is zero, so 1 - W_x goes to 1 - W_0 = 0; along
    ``f`` the image survives and W_{Lx} fails the centre test of the target.
    """
    chars = yangmills.character_obs_space(f.source, coupling)
    along_f = yangmills.character_morphism(f, coupling)
    along_h = yangmills.character_morphism(h, coupling)
    x = chars.group_element(linalg.column(list(witness)))
    a = along_f.source.unit() - along_f.source.W(x)
    centre = ccr.center_test(along_f.target, along_f(x))
    out = {
        "ranks": {"source": along_f.source.rank, f.name: along_f.target.rank, h.name: along_h.target.rank},
        "killed_along_h": ccr.ccr_morphism(along_h, a).is_zero(),
        "kept_along_f": not ccr.ccr_morphism(along_f, a).is_zero(),
        "image_central": centre["central"],
    }
    if not centre["central"]:
        out["centre_witness"] = centre["witness"]
        out["centre_pairing_pi"] = PiMultiple(centre["pairing_pi"])
    out["ok"] = out["killed_along_h"] and out["kept_along_f"] and not out["image_central"]
    return out


def run_no_go(scenario: Scenario, params: dict, config: Config) -> dict:
    f, h, k = scenario.embedding(params["f"]), scenario.embedding(params["h"]), params["k"]
    if params["layer"] == "character":
        if k != 1:
            raise BadSpec("character observables live in degree 1")
        out = yangmills.ym_locality_audit(f, h, config.h)
        if not out["found"]:
            out["ok"] = False
            return out
        out["quantum"] = quantum_witness(f, h, out["witness"], config.h)
        out["pairing_pi"] = PiMultiple(out["pairing_pi"])
        out["ok"] = out["ok"] and out["quantum"]["ok"]
        return out
    out = maxwell.no_go_witness(f, h, k)
    out["ok"] = out["found"] and out["witness_in_radical"] and bool(out["pairing"])
    return out


RUNNERS = {
    "cohomology-table": run_cohomology_table,
    "duality-check": run_duality_check,
    "homotopy-check": run_homotopy_check,
    "propagator-check": run_propagator_check,
    "maxwell-audit": run_maxwell_audit,
    "ym-affine-audit": run_ym_affine_audit,
    "ym-character-audit": run_ym_character_audit,
    "ccr-quantize": run_ccr_quantize,
    "isotony": run_isotony,
    "no-go": run_no_go,
}


def run_analysis(scenario: Scenario, spec: AnalysisSpec, config: Config) -> dict:
    """Run one analysis; domain errors become an ``error`` entry instead of aborting the scenario."""
    logger.info("analysis %d: %s %s", spec.index, spec.kind, spec.params)
    entry = {"kind": spec.kind, "params": spec.params}
    try:
        result = RUNNERS[spec.kind](scenario, spec.params, config)
    except GaugelocError as exc:
        logger.warning("analysis %d (%s) failed: %s", spec.index, spec.kind, exc)
        entry.update({"status": "error", "error": f"{type(exc).__name__}: {exc}"})
        return entry
    except Exception as exc:
        logger.exception("analysis %d (%s) crashed", spec.index, spec.kind)
        entry.update({"status": "error", "error": f"{type(exc).__name__}: {exc}"})
        return entry
    entry.update({"status": "pass" if result["ok"] else "fail", "result": result})
    if not result["ok"]:
        logger.warning("analysis %d (%s) did not pass", spec.index, spec.kind)
    return entry


def run_scenario(scenario: Scenario, config: Config) -> list[dict]:
    """Run every analysis; results keep declaration order whatever the thread count."""
    workers = max(1, min(config.threads, len(scenario.analyses) or 1))
    logger.info("scenario %s: %d analyses on %d threads", scenario.name, len(scenario.analyses), workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(lambda spec: run_analysis(scenario, spec, config), scenario.analyses))
