"""Built-in invariant suite: every proved identity re-checked on a corpus of
small graphs plus seeded random words. Exposed through `cyclepair selftest`.

The `inject_bug` hook sabotages a named computation so tests can confirm the
suite actually detects breakage (a poor man's mutation harness).
"""

import contextlib
import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import cycle_pairing as cp
from .corpus import bouquet, corpus, cycle, theta, wedge_cycles
from .homology import (boundary_matrix, concyclicity, cycle_basis,
                       cyclic_orientation, jacobian)
from .multigraph import (Multigraph, PointedGraph, contract, delete,
                         is_bridgeless, is_connected, isomorphic)
from .truncated_algebra import (EdgeWord, antipode_expand, elem_one,
                                generator_element, generators, loop_to_pi1,
                                multiply, reduce_word, vertex_join_parts,
                                word2_expand)
from .cycle_pairing import (check_antipode, check_conjugation, check_coproduct,
                            check_iterated_coproduct, check_shuffle,
                            check_symmetrization, integrate_word,
                            integrate_word_combinatorial, pairing_tensor)
from .extension import harmonic_volume, mu_two_term, section_ambiguity_check
from .unipotent import decide_pointed_isomorphism, joint_contraction_injectivity
from . import _intmat


@dataclass
class SelfTestReport:
    lines: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    ok: bool = True


def random_loop(rng, pg: PointedGraph, length: int) -> EdgeWord:
    """Seeded random closed walk at the basepoint (tree-path closure)."""
    g = pg.graph
    cb = cycle_basis(g)
    from .homology import tree_path
    letters = []
    v = pg.basepoint
    for _ in range(length):
        options = []
        for e in g.incident(v):
            t, h = g.edges[e]
            if t == v:
                options.append((e, 1, h))
            if h == v:
                options.append((e, -1, t))
        e, s, v = rng.choice(sorted(options))
        letters.append((e, s))
    letters.extend(tree_path(g, cb.parents, v, pg.basepoint))
    return EdgeWord(tuple(letters))


def random_tensor(rng, genus, k):
    return tuple(tuple(rng.randint(-2, 2) for _ in range(genus)) for _ in range(k))


def _default_corpus():
    return [g for g in corpus(4) if g.edge_count >= 1]


@contextlib.contextmanager
def _sabotage(name):
    """Break a named computation for the duration (testing hook)."""
    if name is None:
        yield
        return
    if name == "pairing-sign":
        original = cp._letter_pairings

        def broken(cb, omegas, word):
            return original(cb, omegas, EdgeWord(tuple((e, 1) for e, _ in word.letters)))

        cp._letter_pairings = broken
        try:
            yield
        finally:
            cp._letter_pairings = original
    else:
        raise ValueError(f"unknown bug injection {name!r}")


def _brute_force_spanning_trees(g: Multigraph) -> int:
    n, m = g.vertex_count, g.edge_count
    count = 0
    for subset in itertools.combinations(range(m), n - 1):
        sub = Multigraph(n, tuple(g.edges[e] for e in subset))
        if is_connected(sub):
            count += 1
    return count if n > 1 else 1


def run(seed=0, corpus_override=None, inject_bug=None, quick=False) -> SelfTestReport:
    report = SelfTestReport()
    rng = random.Random(seed)
    if corpus_override is not None:
        with open(corpus_override) as fh:
            items = json.load(fh)
        graphs = [Multigraph(o["vertices"], tuple(tuple(e) for e in o["edges"]))
                  for o in items]
        if not graphs:
            report.warnings.append("corpus override is empty; all checks vacuous")
    else:
        graphs = _default_corpus()
    graphs = [cyclic_orientation(g)[0] for g in graphs]
    pointed = [PointedGraph(g, rng.randrange(g.vertex_count)) for g in graphs]
    samples = 8 if quick else 25

    def record(name, fn):
        if not pointed:
            report.lines.append(f"{name}: PASS (vacuous)")
            return
        try:
            ok, detail = fn()
        except Exception as exc:  # invariant crashed: that is a failure too
            ok, detail = False, f"exception: {exc}"
        report.lines.append(f"{name}: {'PASS' if ok else 'FAIL'}"
                            + (f" ({detail})" if detail and not ok else ""))
        report.ok &= ok

    def paired_sample():
        pg = rng.choice(pointed)
        cb = cycle_basis(pg.graph)
        word = random_loop(rng, pg, rng.randint(1, 6))
        return pg, cb, word

    def inv_two_impls():
        for _ in range(samples):
            pg, cb, word = paired_sample()
            om = random_tensor(rng, cb.genus, rng.randint(0, 3))
            if integrate_word(word, om, cb) != integrate_word_combinatorial(word, om, cb):
                return False, f"{pg} {word}"
        return True, ""

    def inv_well_defined():
        for _ in range(samples):
            pg, cb, word = paired_sample()
            om = random_tensor(rng, cb.genus, rng.randint(0, 3))
            letters = list(word.letters)
            e = rng.randrange(pg.graph.edge_count)
            pos = rng.randint(0, len(letters))
            letters[pos:pos] = [(e, 1), (e, -1)]
            if integrate_word(EdgeWord(tuple(letters)), om, cb) != integrate_word(word, om, cb):
                return False, str(word)
        return True, ""

    def hopf(checker, nargs):
        def inner():
            for _ in range(samples):
                pg, cb, word = paired_sample()
                if nargs == "shuffle":
                    ok = checker(word, random_tensor(rng, cb.genus, rng.randint(0, 2)),
                                 random_tensor(rng, cb.genus, rng.randint(0, 2)), cb)
                elif nargs == "two-words":
                    other = random_loop(rng, pg, rng.randint(1, 5))
                    ok = checker(word, other, random_tensor(rng, cb.genus, rng.randint(0, 3)), cb)
                elif nargs == "words":
                    words = [random_loop(rng, pg, rng.randint(1, 4))
                             for _ in range(rng.randint(1, 3))]
                    ok = checker(words, random_tensor(rng, cb.genus, rng.randint(0, 3)), cb)
                elif nargs == "conjugation":
                    other = random_loop(rng, pg, rng.randint(1, 5))
                    om1 = tuple(rng.randint(-2, 2) for _ in range(cb.genus))
                    om2 = tuple(rng.randint(-2, 2) for _ in range(cb.genus))
                    ok = checker(word, other, om1, om2, cb)
                else:
                    ok = checker(word, random_tensor(rng, cb.genus, rng.randint(0, 3)), cb)
                if not ok:
                    return False, str(word)
            return True, ""
        return inner

    def inv_nilpotence():
        for _ in range(samples):
            pg, cb, _ = paired_sample()
            r = rng.randint(1, 3)
            words = [random_loop(rng, pg, rng.randint(1, 4)) for _ in range(r)]
            k = rng.randint(0, r)
            om = random_tensor(rng, cb.genus, k)
            total = Fraction(0)
            for bits in itertools.product((0, 1), repeat=r):
                whole = EdgeWord(())
                for w, b in zip(words, bits):
                    if b:
                        whole = whole.concat(w)
                sign = (-1) ** (r - sum(bits))
                total += sign * integrate_word(whole, om, cb)
            if k < r and total != 0:
                return False, "r>k not zero"
            if k == r:
                m = pg.graph.edge_count
                expected = Fraction(1)
                for w, omega in zip(words, om):
                    from .truncated_algebra import chain_of_word
                    chain = chain_of_word(w, m)
                    val = sum(omega[i] * sum(cb.basis[i][e] * chain[e] for e in range(m))
                              for i in range(cb.genus))
                    expected *= val
                if total != expected:
                    return False, "r=k product mismatch"
        return True, ""

    def inv_word2_multiplicative():
        for _ in range(samples):
            pg, _, w1 = paired_sample()
            w2 = random_loop(rng, pg, rng.randint(1, 5))
            m = pg.graph.edge_count
            if word2_expand(w1.concat(w2), m) != multiply(word2_expand(w1, m),
                                                          word2_expand(w2, m)):
                return False, str((w1, w2))
        return True, ""

    def inv_inverse_identity():
        # (g1^-1 - 1)(g2 - 1) = -(g1 - 1)(g2 - 1) mod I^3 for all edge pairs
        for g in graphs:
            m = g.edge_count
            for e, f in itertools.product(range(m), repeat=2):
                lhs = multiply(
                    generator_element(e, m, -1) - elem_one(m),
                    generator_element(f, m) - elem_one(m))
                rhs = multiply(generator_element(e, m) - elem_one(m),
                               generator_element(f, m) - elem_one(m)).scale(-1)
                if lhs != rhs:
                    return False, f"edges {e},{f}"
        return True, ""

    def inv_cycle_basis_kernel():
        for g in graphs:
            bmat = boundary_matrix(g)
            cb = cycle_basis(g)
            for chain in cb.basis:
                if any(sum(row[e] * chain[e] for e in range(g.edge_count)) != 0
                       for row in bmat):
                    return False, str(g)
        return True, ""

    def inv_matrix_tree():
        for g in graphs:
            cb = cycle_basis(g)
            det = _intmat.mat_det([list(r) for r in cb.gram])
            if det != _brute_force_spanning_trees(g):
                return False, str(g)
        return True, ""

    def inv_concyclicity_structure():
        from .homology import _cycle_chain
        for g in graphs:
            parts = concyclicity(g)
            for cls in parts.classes:
                contracted, _, emap = contract(g, cls)
                if _cycle_chain(contracted, tuple(range(len(cls)))) is None:
                    return False, f"{g} class {cls} contraction not a cycle"
                for piece in _deletion_components(g, cls):
                    if not is_bridgeless(piece):
                        return False, f"{g} deletion has a bridge"
            for c1, c2 in itertools.combinations(range(len(parts.classes)), 2):
                kept = tuple(sorted(parts.classes[c1] + parts.classes[c2]))
                contracted, _, _ = contract(g, kept)
                if vertex_join_parts(contracted) is None:
                    return False, f"{g} pair contraction not a vertex join"
        return True, ""

    def inv_duality():
        for pg in pointed:
            tensor = pairing_tensor(pg)
            mat = tensor.matrix()
            if mat and _intmat.mat_det(mat) == 0:
                return False, str(pg)
        return True, ""

    def inv_decide_oracle():
        count = 4 if quick else 8
        for _ in range(count):
            pa = rng.choice(pointed)
            pb = rng.choice(pointed)
            got = decide_pointed_isomorphism(pa, pb) is not None
            want = isomorphic(pa, pb) is not None
            if got != want:
                return False, f"{pa} vs {pb}"
        return True, ""

    def inv_harmonic_integral():
        for pg in pointed:
            cb = cycle_basis(pg.graph)
            gens = generators(pg)
            two = mu_two_term(pg, gens, cb)
            mu = harmonic_volume(pg, gens).mu
            if any(Fraction(a) != Fraction(b) for ra, rb in zip(two, mu)
                   for a, b in zip(ra, rb)):
                return False, str(pg)
        return True, ""

    def inv_section_independence():
        for _ in range(samples):
            pg = rng.choice(pointed)
            gens = generators(pg)
            if not gens.loops:
                continue
            conj = random_loop(rng, pg, rng.randint(1, 4))
            loops = list(gens.loops)
            idx = rng.randrange(len(loops))
            loops[idx] = conj.concat(loops[idx]).concat(conj.inverse())
            alt = type(gens)(tuple(loops), gens.nontree, gens.kind)
            if not section_ambiguity_check(pg, gens, alt):
                return False, str(pg)
        return True, ""

    def inv_joint_injectivity():
        for pg in pointed:
            if not joint_contraction_injectivity(pg):
                return False, str(pg)
        return True, ""

    with _sabotage(inject_bug):
        record("pairing-implementations-agree", inv_two_impls)
        record("pairing-well-defined", inv_well_defined)
        record("hopf-product", hopf(check_shuffle, "shuffle"))
        record("hopf-coproduct", hopf(check_coproduct, "two-words"))
        record("hopf-antipode", hopf(check_antipode, None))
        record("symmetrization", hopf(check_symmetrization, None))
        record("iterated-coproduct", hopf(check_iterated_coproduct, "words"))
        record("conjugation", hopf(check_conjugation, "conjugation"))
        record("nilpotence", inv_nilpotence)
        record("word2-multiplicative", inv_word2_multiplicative)
        record("inverse-letter-identity", inv_inverse_identity)
        record("cycle-basis-in-kernel", inv_cycle_basis_kernel)
        record("gram-matrix-tree", inv_matrix_tree)
        record("concyclicity-structure", inv_concyclicity_structure)
        record("duality-invertible", inv_duality)
        record("decide-oracle-sample", inv_decide_oracle)
        record("harmonic-volume-integral", inv_harmonic_integral)
        record("section-independence", inv_section_independence)
        record("joint-contraction-injective", inv_joint_injectivity)
    return report


def _deletion_components(g: Multigraph, removed):
    """Connected components of the deletion, each as a standalone graph."""
    from .multigraph import _components
    kept = [e for e in range(g.edge_count) if e not in set(removed)]
    _, comp = _components(g.vertex_count, [g.edges[e] for e in kept])
    out = []
    for c in sorted(set(comp)):
        verts = [v for v in range(g.vertex_count) if comp[v] == c]
        idx = {v: i for i, v in enumerate(verts)}
        edges = tuple((idx[t], idx[h]) for e in kept
                      for t, h in [g.edges[e]] if comp[t] == c)
        out.append(Multigraph(len(verts), edges))
    return out
