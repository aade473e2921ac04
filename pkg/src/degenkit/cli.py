"""Command-line interface: file ingestion, dispatch, deterministic reports.

Subcommands: analyze, trait, oracle, converse, psi, curve.  Reports carry no
timestamps and are byte-identical across runs on identical input; ``--json``
emits the machine-readable rendering, whose numeric fields agree with the
human one.  Exit codes: 0 ok, 1 mathematical falsification event, 2 input
error, so CI can tell "the math broke" from "the file broke".

Input files are looked up as given, then under $DEGENKIT_FIXTURES, then in
the fixture corpus shipped with the package.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from importlib import resources
from pathlib import Path

from . import galois, monodromy, neron, schema
from .curves import DualGraph, curve_equivalences
from .degeneration import DegenDatum, analyze, is_l_toric_additive, toric_rank_profile
from .errors import FalsificationError, InputError
from .lattice import FinAb, LatticeMap, l_part


def _fixture_dir() -> Path | None:
    env = os.environ.get("DEGENKIT_FIXTURES")
    if env:
        return Path(env)
    try:
        return Path(str(resources.files("degenkit") / "fixtures"))
    except (ModuleNotFoundError, TypeError):
        return None


def resolve_input(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    base = _fixture_dir()
    if base is not None:
        for cand in (base / path, base / f"{path}.json"):
            if cand.exists():
                return cand
    raise InputError(f"input file not found: {path}")


def _load(path: str, expect: str) -> tuple[DegenDatum | DualGraph, dict]:
    resolved = resolve_input(path)
    raw = resolved.read_bytes()
    doc = schema.parse_document(schema.parse_json_bytes(raw, str(resolved)), where=str(resolved))
    kind = "degeneration" if isinstance(doc, DegenDatum) else "graph"
    if kind != expect:
        raise InputError(f"{resolved}: expected a {expect} input, found kind \"{kind}\"")
    echo = {"path": path, "name": doc.name, "sha256": hashlib.sha256(raw).hexdigest()}
    return doc, echo


def _finab_dict(g: FinAb) -> dict:
    return {"invariant_factors": list(g.invariant_factors),
            "divisible_rank": g.divisible_rank}


def _matrix_list(m: LatticeMap) -> list[list[int]]:
    return [list(r) for r in m.entries]


def _datum_common(datum: DegenDatum) -> dict:
    verdict = analyze(datum)
    mu, mus, deficit = toric_rank_profile(datum)
    return {
        "verdict": {
            "toric_additive": verdict.toric_additive,
            "weakly_toric_additive": verdict.weakly_toric_additive,
            "failing_primes": list(verdict.failing_primes),
        },
        "rank_profile": {"mu": mu, "branch_mu": list(mus), "deficit": deficit},
        "purity_cokernel": {
            "invariant_factors": list(verdict.purity_torsion.invariant_factors),
            "free_rank": verdict.purity_free_rank,
        },
    }


def _emit(report: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        for line in _render_human(report):
            print(line)


def _render_human(report: dict, prefix: str = "") -> list[str]:
    lines = []
    for key in sorted(report):
        value = report[key]
        if isinstance(value, dict):
            lines.append(f"{prefix}{key}:")
            lines.extend(_render_human(value, prefix + "  "))
        elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
            lines.append(f"{prefix}{key}: {json.dumps(value)}")
        else:
            rendered = json.dumps(value) if not isinstance(value, str) else value
            lines.append(f"{prefix}{key}: {rendered}")
    return lines


def _base_report(command: str, echo: dict) -> dict:
    return {"format_version": schema.FORMAT_VERSION, "command": command,
            "input": echo, "warnings": []}


def _parse_profile(text: str, n: int) -> monodromy.TraitProfile:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise InputError(f"--profile: not a comma-separated integer list: {text!r}") from exc
    if len(values) != n:
        raise InputError(f"--profile: expected {n} entries, got {len(values)}")
    return monodromy.TraitProfile(values)


def cmd_analyze(args: argparse.Namespace) -> int:
    datum, echo = _load(args.file, "degeneration")
    report = _base_report("analyze", echo)
    report.update(_datum_common(datum))
    _emit(report, args.json)
    return 0


def cmd_trait(args: argparse.Namespace) -> int:
    datum, echo = _load(args.file, "degeneration")
    profile = _parse_profile(args.profile, datum.n)
    composed = monodromy.compose_trait(datum, profile)
    group = monodromy.component_group(composed.matrix)
    report = _base_report("trait", echo)
    report.update(_datum_common(datum))
    report["warnings"] = list(composed.warnings)
    payload = {
        "profile": list(profile.multiplicities),
        "active_branches": [datum.branches[j].name for j in composed.active],
        "phi_f": _matrix_list(composed.matrix),
        "upsilon": _finab_dict(group),
    }
    if args.l is not None:
        if args.l == datum.residue_char:
            raise InputError("prime equals residue characteristic")
        payload["l"] = args.l
        payload["upsilon_l_part"] = _finab_dict(l_part(group, args.l))
    report["trait"] = payload
    _emit(report, args.json)
    return 0


def _stable_closed_point_torsion(rep: galois.GaloisRep, r: int) -> tuple[FinAb, int]:
    level = r
    current = galois.closed_point_torsion(rep, level)
    for _ in range(8):
        nxt = galois.closed_point_torsion(rep, level + 1)
        if nxt == current:
            return current, level
        level += 1
        current = nxt
    return current, level


def cmd_oracle(args: argparse.Namespace) -> int:
    datum, echo = _load(args.file, "degeneration")
    if args.l == datum.residue_char:
        raise InputError("prime equals residue characteristic")
    rep = galois.build_rep(datum, args.l)
    lattice_side = is_l_toric_additive(datum, args.l)
    star = galois.star_condition(rep)
    decomposition = galois.decomposition_check(rep)
    agree = lattice_side == star == decomposition
    report = _base_report("oracle", echo)
    report.update(_datum_common(datum))
    payload: dict = {
        "l": args.l,
        "lattice_side": {"l_toric_additive": lattice_side},
        "galois_side": {"star_condition": star, "decomposition": decomposition},
        "agree": agree,
    }
    disagreement = not agree
    if args.profile is not None:
        profile = _parse_profile(args.profile, datum.n)
        composed = monodromy.compose_trait(datum, profile)
        lattice_group = l_part(monodromy.component_group(composed.matrix), args.l)
        galois_group = galois.torsion_phi_group(rep, profile, args.r)
        groups_agree = lattice_group == galois_group
        payload["component_group"] = {
            "profile": list(profile.multiplicities),
            "r": args.r,
            "lattice_side": _finab_dict(lattice_group),
            "galois_side": _finab_dict(galois_group),
            "agree": groups_agree,
        }
        report["warnings"].extend(composed.warnings)
        disagreement = disagreement or not groups_agree
    bound = monodromy.closed_point_bound(datum, args.l)
    exact, used_r = _stable_closed_point_torsion(rep, args.r)
    payload["closed_point"] = {
        "bound": _finab_dict(bound),
        "exact_torsion": _finab_dict(exact),
        "r_used": used_r,
        "bound_is_strict": bound.torsion() != exact,
    }
    report["oracle"] = payload
    if disagreement:
        report["warnings"].append("falsification: lattice and Galois sides disagree")
    _emit(report, args.json)
    return 1 if disagreement else 0


def cmd_converse(args: argparse.Namespace) -> int:
    datum, echo = _load(args.file, "degeneration")
    p_map, q_map, psi1, psi2 = neron.converse_inputs_from_datum(datum)
    cert = neron.converse_check(p_map, q_map, psi1, psi2)
    report = _base_report("converse", echo)
    report.update(_datum_common(datum))
    payload = {
        "P": _matrix_list(p_map),
        "Q": _matrix_list(q_map),
        "Psi1": _matrix_list(psi1),
        "Psi2": _matrix_list(psi2),
        "verdict": cert.verdict,
        "hypothesis_holds": cert.hypothesis_holds,
        "coker_at_psi": _finab_dict(cert.coker_at_psi),
        "coker_at_psi_a": _finab_dict(cert.coker_at_psi_a),
    }
    if cert.theta is not None:
        payload["theta"] = [[str(f) for f in row] for row in cert.theta]
    if cert.chi1 is not None and cert.chi2 is not None:
        payload["chi1"] = _matrix_list(cert.chi1)
        payload["chi2"] = _matrix_list(cert.chi2)
        payload["idempotent"] = cert.idempotent
        payload["kernel_decomposition"] = cert.kernel_decomposition
        payload["a_is_isomorphism"] = cert.a_is_isomorphism
    report["converse"] = payload
    _emit(report, args.json)
    return 0


def cmd_psi(args: argparse.Namespace) -> int:
    datum, echo = _load(args.file, "degeneration")
    group = neron.psi_group(datum)
    report = _base_report("psi", echo)
    report.update(_datum_common(datum))
    payload: dict = {
        "branch_components": [_finab_dict(g) for g in group.branch_components],
        "psi": _finab_dict(group.group),
        "order": group.order,
    }
    code = 0
    if args.kummer is not None:
        try:
            multipliers = tuple(int(p) for p in args.kummer.split(","))
        except ValueError as exc:
            raise InputError(f"--kummer: not a comma-separated integer list: {args.kummer!r}") \
                from exc
        fixed = neron.psi_fixed_points(datum, multipliers)
        payload["kummer"] = {
            "multipliers": list(multipliers),
            "rescaled_psi": _finab_dict(fixed.rescaled),
            "fixed_points": _finab_dict(fixed.fixed),
            "equals_psi": fixed.equals_psi,
        }
        if not fixed.equals_psi:
            report["warnings"].append(
                "falsification: rescaled fixed points differ from the original group")
            code = 1
    report["psi"] = payload
    _emit(report, args.json)
    return code


def cmd_curve(args: argparse.Namespace) -> int:
    graph, echo = _load(args.file, "graph")
    result = curve_equivalences(graph)
    verdict = result.verdict
    report = _base_report("curve", echo)
    mu, mus, deficit = toric_rank_profile(result.datum)
    report["rank_profile"] = {"mu": mu, "branch_mu": list(mus), "deficit": deficit}
    report["verdict"] = {
        "toric_additive": verdict.toric_additive,
        "weakly_toric_additive": verdict.weakly_toric_additive,
        "failing_primes": list(verdict.failing_primes),
    }
    report["purity_cokernel"] = {
        "invariant_factors": list(verdict.purity_torsion.invariant_factors),
        "free_rank": verdict.purity_free_rank,
    }
    report["curve"] = {
        "vertices": len(graph.vertices),
        "edges": len(graph.edges),
        "abelian_rank": result.datum.abelian_rank,
        "cokernel_torsion_free": result.torsion_free,
        "weak_equals_toric": result.equivalence_holds,
    }
    if result.falsifications:
        report["warnings"].extend(f"falsification: {msg}" for msg in result.falsifications)
    _emit(report, args.json)
    return 1 if result.falsifications else 0


def cmd_generate(args: argparse.Namespace) -> int:
    """Emit a schema-valid random document; same seed, same bytes."""
    from random import Random

    from . import generators

    rng = Random(args.seed)
    if args.what == "datum":
        doc = schema.datum_to_dict(generators.random_datum(rng, min_n=1))
    elif args.what == "ta-datum":
        doc = schema.datum_to_dict(generators.random_ta_datum(rng, min_n=1))
    else:
        doc = schema.graph_to_dict(generators.random_graph(rng))
    doc["name"] = f"{doc['name']}-seed{args.seed}"
    text = json.dumps(doc, sort_keys=True, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="degenkit",
        description="Toric-additivity verdicts, component groups, and monodromy "
                    "cross-checks for semiabelian degeneration data.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="input JSON file (or fixture name)")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    add("analyze", cmd_analyze, "toric-additivity verdicts and rank profile")

    p_trait = add("trait", cmd_trait, "composed pairing and component group of a trait")
    p_trait.add_argument("--profile", required=True,
                         help="comma-separated branch multiplicities a_1,...,a_n")
    p_trait.add_argument("--l", type=int, default=None, help="also report the l-part")

    p_oracle = add("oracle", cmd_oracle, "lattice-side vs Galois-side cross-check")
    p_oracle.add_argument("--l", type=int, required=True, help="prime l != residue char")
    p_oracle.add_argument("--r", type=int, default=4, help="finite level l^r (default 4)")
    p_oracle.add_argument("--profile", default=None,
                          help="also cross-check the trait component group")

    add("converse", cmd_converse, "converse certificate from the branch-1 split")

    p_psi = add("psi", cmd_psi, "branchwise component groups and their sum")
    p_psi.add_argument("--kummer", default=None,
                       help="comma-separated tame multipliers m_1,...,m_n")

    add("curve", cmd_curve, "dual-graph jacobian datum and curve equivalences")

    p_gen = sub.add_parser("generate", help="emit a random input document")
    p_gen.add_argument("what", choices=["datum", "ta-datum", "graph"])
    p_gen.add_argument("--seed", type=int, required=True, help="generator seed")
    p_gen.add_argument("--out", default=None, help="write to a file instead of stdout")
    p_gen.set_defaults(func=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FalsificationError as exc:
        print(f"falsification: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
