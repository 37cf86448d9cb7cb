"""Command line interface: reproducible JSON pipelines over graph files.

Rationals serialize as "p/q" strings, matrices as arrays of integer strings.
Identical (input, seed, config) produce byte-identical output. Subcommands:
pairing, concyclicity, isometries, decide, reconstruct, harmonic-volume,
nu-experiment, orbit, selftest.
"""

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

from .multigraph import (GraphError, HasBridge, Multigraph, NotConnected,
                         PointedGraph, enumerate_two_move_orbit, is_bridgeless,
                         is_connected)
from .homology import concyclicity, cycle_basis, cyclic_orientation
from .truncated_algebra import EdgeWord, generators
from .cycle_pairing import integrate_word, pairing_tensor
from .torelli import class_bijection_from_isometry, enumerate_isometries
from .unipotent import canonical_phi, decide_pointed_isomorphism, reconstruct
from .extension import harmonic_volume, j2_group, nu_injectivity_experiment
from . import selftest as selftest_mod


@dataclass
class Config:
    k_max: int = 6
    isometry_limit: int = 10000
    orbit_budget: int = 4
    seed: int = 0

    def __post_init__(self):
        if min(self.k_max, self.isometry_limit, self.orbit_budget) <= 0:
            raise ValueError("config values must be positive")


def _rat(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


def _int_matrix(mat):
    return [[str(int(x)) for x in row] for row in mat]


def _load_graph(path):
    with open(path) as fh:
        obj = json.load(fh)
    loaded = Multigraph.from_json(obj)
    return loaded


def _as_pointed(loaded, what):
    if isinstance(loaded, PointedGraph):
        return loaded
    raise SystemExit(f"{what}: graph file needs a \"basepoint\" field")


def _require_connected(g, what):
    if not is_connected(g):
        raise SystemExit(f"{what}: violated precondition: graph is not connected")


def _require_bridgeless(g, what):
    _require_connected(g, what)
    if not is_bridgeless(g):
        raise SystemExit(f"{what}: violated precondition: graph has a bridge")


def parse_loop_spec(spec: str, edge_count: int) -> EdgeWord:
    """Comma-separated signed edge ids: "e0+,e1-,2+" (0-based)."""
    letters = []
    for pos, token in enumerate(spec.split(",")):
        token = token.strip()
        m = re.fullmatch(r"e?(\d+)([+-])", token)
        if not m:
            raise SystemExit(f"loop spec: malformed token {token!r} at position {pos}")
        e = int(m.group(1))
        if e >= edge_count:
            raise SystemExit(f"loop spec: edge id {e} out of range at position {pos}")
        letters.append((e, 1 if m.group(2) == "+" else -1))
    return EdgeWord(tuple(letters))


def parse_tensor_spec(spec: str, genus: int):
    """Comma-separated bracketed combinations of basis cycles, e.g.
    "[b1],[b1-2b2]" (basis indices 1..g). Empty spec is the unit tensor."""
    spec = spec.strip()
    if not spec:
        return ()
    factors = []
    for pos, token in enumerate(re.split(r",(?![^\[]*\])", spec)):
        token = token.strip()
        if not (token.startswith("[") and token.endswith("]")):
            raise SystemExit(f"tensor spec: factor {pos} must be bracketed, got {token!r}")
        body = token[1:-1].replace(" ", "")
        coords = [0] * genus
        matched = 0
        for m in re.finditer(r"([+-]?\d*)b(\d+)", body):
            matched += len(m.group(0))
            coeff = m.group(1)
            coeff = int(coeff) if coeff not in ("", "+", "-") else (1 if coeff != "-" else -1)
            idx = int(m.group(2))
            if not (1 <= idx <= genus):
                raise SystemExit(f"tensor spec: basis index b{idx} out of range in factor {pos}")
            coords[idx - 1] += coeff
        if matched != len(body):
            raise SystemExit(f"tensor spec: malformed factor {pos}: {token!r}")
        factors.append(tuple(coords))
    return tuple(factors)


def _emit(obj):
    print(json.dumps(obj, sort_keys=True, indent=1))


def _certificate_json(cert):
    return {
        "isomorphic": True,
        "edge_map": list(cert.edge_map),
        "edge_signs": list(cert.edge_signs),
        "vertex_map": list(cert.vertex_map),
        "class_pairs": [list(p) for p in cert.class_pairs],
        "cyclic_orders": [[list(a), list(b)] for a, b in cert.cyclic_orders],
        "join_constants": [[list(a), list(b)] for a, b in cert.join_constants],
        "residual_zero": cert.residual_zero,
    }


def cmd_pairing(args, config):
    g = _load_graph(args.graph)
    graph = g.graph if isinstance(g, PointedGraph) else g
    _require_bridgeless(graph, "pairing")
    cb = cycle_basis(graph)
    loop = parse_loop_spec(args.loop, graph.edge_count)
    tensor = parse_tensor_spec(args.tensor, cb.genus)
    value = integrate_word(loop, tensor, cb, k_max=config.k_max)
    print(_rat(value))
    return 0


def cmd_concyclicity(args, config):
    g = _load_graph(args.graph)
    graph = g.graph if isinstance(g, PointedGraph) else g
    _require_bridgeless(graph, "concyclicity")
    oriented, signs = cyclic_orientation(graph)
    cb = cycle_basis(oriented)
    parts = concyclicity(oriented, cb)
    _emit({
        "classes": [list(c) for c in parts.classes],
        "functionals": [[str(x) for x in f] for f in parts.functionals],
        "gram": _int_matrix(cb.gram),
        "orientation_signs": list(signs),
    })
    return 0


def cmd_isometries(args, config):
    a = _load_graph(args.a)
    b = _load_graph(args.b)
    ga = a.graph if isinstance(a, PointedGraph) else a
    gb = b.graph if isinstance(b, PointedGraph) else b
    _require_bridgeless(ga, "isometries")
    _require_bridgeless(gb, "isometries")
    oa, _ = cyclic_orientation(ga)
    ob, _ = cyclic_orientation(gb)
    cba, cbb = cycle_basis(oa), cycle_basis(ob)
    if cba.genus != cbb.genus:
        _emit({"isometries": [], "truncated": False, "note": "rank mismatch"})
        return 0
    res = enumerate_isometries(cba.gram, cbb.gram, limit=config.isometry_limit)
    parts_a, parts_b = concyclicity(oa), concyclicity(ob)
    out = []
    for iso in res.isometries:
        bij = class_bijection_from_isometry(iso, parts_a, parts_b)
        out.append({
            "matrix": _int_matrix(iso.matrix),
            "class_bijection": None if bij is None else [list(p) for p in bij.pairs],
        })
    _emit({"isometries": out, "truncated": res.truncated})
    return 0


def cmd_decide(args, config):
    a = _as_pointed(_load_graph(args.a), "decide")
    b = _as_pointed(_load_graph(args.b), "decide")
    _require_bridgeless(a.graph, "decide")
    _require_bridgeless(b.graph, "decide")
    cert = decide_pointed_isomorphism(a, b, isometry_limit=config.isometry_limit,
                                      jobs=args.jobs)
    if cert is None:
        _emit({"isomorphic": False})
        return 1
    _emit(_certificate_json(cert))
    return 0


def cmd_reconstruct(args, config):
    a = _as_pointed(_load_graph(args.a), "reconstruct")
    b = _as_pointed(_load_graph(args.b), "reconstruct")
    _require_bridgeless(a.graph, "reconstruct")
    _require_bridgeless(b.graph, "reconstruct")
    oa, _ = cyclic_orientation(a.graph)
    ob, _ = cyclic_orientation(b.graph)
    pa, pb = PointedGraph(oa, a.basepoint), PointedGraph(ob, b.basepoint)
    if args.isometry:
        from .torelli import Isometry
        matrix = tuple(tuple(int(x) for x in row) for row in json.loads(args.isometry))
        phi = canonical_phi(pa, pb, Isometry(matrix))
        if not phi.is_integral():
            _emit({"isomorphic": False, "note": "canonical map is not integral"})
            return 1
        cert = reconstruct(pa, pb, phi)
    else:
        cert = decide_pointed_isomorphism(pa, pb, isometry_limit=config.isometry_limit,
                                          jobs=args.jobs)
        if cert is None:
            _emit({"isomorphic": False})
            return 1
    _emit(_certificate_json(cert))
    return 0


def cmd_harmonic_volume(args, config):
    g = _load_graph(args.graph)
    if args.basepoint is not None:
        base = args.basepoint
        graph = g.graph if isinstance(g, PointedGraph) else g
    else:
        pg = _as_pointed(g, "harmonic-volume")
        graph, base = pg.graph, pg.basepoint
    _require_bridgeless(graph, "harmonic-volume")
    oriented, _ = cyclic_orientation(graph)
    pg = PointedGraph(oriented, base)
    hv = harmonic_volume(pg)
    j2 = j2_group(cycle_basis(oriented))
    _emit({
        "mu": _int_matrix(hv.mu),
        "invariant_factors": [str(d) for d in j2.invariant_factors],
        "normal_form": [str(x) for x in hv.normal_form],
    })
    return 0


def cmd_nu_experiment(args, config):
    g = _load_graph(args.graph)
    graph = g.graph if isinstance(g, PointedGraph) else g
    _require_bridgeless(graph, "nu-experiment")
    report = nu_injectivity_experiment(graph, budget=args.budget or config.orbit_budget)
    report["nu_values"] = [[ [str(x) for x in val] for val in orbit]
                           for orbit in report["nu_values"]]
    _emit(report)
    return 0 if report["agrees_with_oracle"] else 1


def cmd_orbit(args, config):
    g = _load_graph(args.graph)
    graph = g.graph if isinstance(g, PointedGraph) else g
    _require_bridgeless(graph, "orbit")
    orbit = enumerate_two_move_orbit(graph, args.budget or config.orbit_budget)
    _emit({"orbit": [item.to_json() for item in orbit]})
    return 0


def cmd_selftest(args, config):
    report = selftest_mod.run(seed=config.seed,
                              corpus_override=args.corpus,
                              inject_bug=args.inject_bug,
                              quick=args.quick)
    for line in report.lines:
        print(line)
    if report.warnings:
        for w in report.warnings:
            print(f"warning: {w}", file=sys.stderr)
    return 0 if report.ok else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="cyclepair", description=__doc__)
    parser.add_argument("--k-max", type=int, default=None)
    parser.add_argument("--isometry-limit", type=int, default=None)
    parser.add_argument("--orbit-budget", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pairing", help="evaluate the higher cycle pairing")
    p.add_argument("--graph", required=True)
    p.add_argument("--loop", required=True)
    p.add_argument("--tensor", default="")
    p.set_defaults(func=cmd_pairing)

    p = sub.add_parser("concyclicity", help="classes, functionals, gram")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=cmd_concyclicity)

    p = sub.add_parser("isometries", help="lattice isometries and class bijections")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_isometries)

    p = sub.add_parser("decide", help="pointed isomorphism decision")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("reconstruct", help="full reconstruction certificate")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--isometry", default=None,
                   help="JSON matrix of a homology isometry to transport")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("harmonic-volume", help="mu matrix and normal form")
    p.add_argument("--graph", required=True)
    p.add_argument("--basepoint", type=int, default=None)
    p.set_defaults(func=cmd_harmonic_volume)

    p = sub.add_parser("nu-experiment", help="injectivity experiment report")
    p.add_argument("--graph", required=True)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_nu_experiment)

    p = sub.add_parser("orbit", help="2-move orbit up to isomorphism")
    p.add_argument("--graph", required=True)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("selftest", help="run the full invariant suite")
    p.add_argument("--corpus", default=None,
                   help="JSON file with a list of graphs (overrides builtin)")
    p.add_argument("--inject-bug", default=None,
                   help="testing hook: sabotage a named computation")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    seed_env = os.environ.get("CYCLEPAIR_SEED")
    config = Config(
        k_max=args.k_max or 6,
        isometry_limit=args.isometry_limit or 10000,
        orbit_budget=args.orbit_budget or 4,
        seed=args.seed if args.seed is not None else int(seed_env or 0),
    )
    try:
        return args.func(args, config)
    except (NotConnected, HasBridge, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
