"""Harmonic volume of a pointed graph, valued in the finite torsion group
coker(G (x) G)^g, and the injectivity experiment over a 2-move orbit.

The volume of a basepointed graph is the matrix
    mu[alpha][(a,b)] = sum_{e,f} B(alpha)[e][f] <omega_a, e> <omega_b, f>
with B(alpha) the degree-2 block of the generator loop's word expansion; this
integer matrix represents the extension class of J/J^3 once reduced modulo the
image of G (x) G row by row (Smith coordinates). Changing the generator system
moves mu by an element of that image, so the normal form is the invariant.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import _intmat
from .homology import CycleBasis, chain_of_coords, cycle_basis, cyclic_orientation
from .multigraph import (GraphError, Multigraph, PointedGraph,
                         enumerate_two_move_orbit, isomorphic)
from .truncated_algebra import Generators, chain_of_word, generators, word2_expand
from .cycle_pairing import integrate_word
from .torelli import enumerate_isometries


@dataclass(frozen=True)
class J2Group:
    """coker(G (x) G) in Smith coordinates, repeated once per H1 generator."""
    genus: int
    diag: tuple        # SNF diagonal of G (x) G (all positive; G is definite)
    transform: tuple   # U with U (G (x) G) V = diag

    @property
    def invariant_factors(self):
        return tuple(d for d in self.diag if d != 1)

    @property
    def order(self):
        total = 1
        for d in self.diag:
            total *= d
        return total ** self.genus

    def residue(self, row):
        """Smith-coordinate residue of one H1* (x) H1* coordinate vector."""
        out = []
        for i, d in enumerate(self.diag):
            val = sum(self.transform[i][j] * row[j] for j in range(len(row)))
            out.append(val % d)
        return tuple(out)


def _kron(a, b):
    n, m = len(a), len(b)
    out = []
    for i in range(n):
        for k in range(m):
            out.append([a[i][j] * b[k][l] for j in range(n) for l in range(m)])
    return out


@lru_cache(maxsize=None)
def _j2_of_gram(gram: tuple, genus: int) -> J2Group:
    if genus == 0:
        return J2Group(0, (), ())
    kron = _kron([list(r) for r in gram], [list(r) for r in gram])
    d, u, _ = _intmat.smith_normal_form(kron)
    diag = tuple(d[i][i] for i in range(len(kron)))
    return J2Group(genus, diag, tuple(tuple(row) for row in u))


def j2_group(cb: CycleBasis) -> J2Group:
    return _j2_of_gram(cb.gram, cb.genus)


@dataclass(frozen=True)
class HarmonicVolume:
    mu: tuple            # g rows, g^2 columns (functional index (a,b) row-major)
    normal_form: tuple   # per-row Smith residues, concatenated


def _mu_matrix(pg: PointedGraph, gens: Generators, cb: CycleBasis):
    g = cb.genus
    m = cb.edge_count or 0
    rows = []
    for w in gens.loops:
        b2 = word2_expand(w, m).deg2
        row = []
        for a in range(g):
            for b in range(g):
                val = 0
                for e in range(m):
                    if cb.basis[a][e]:
                        be = b2[e]
                        for f in range(m):
                            if be[f] and cb.basis[b][f]:
                                val += be[f] * cb.basis[a][e] * cb.basis[b][f]
                row.append(val)
        rows.append(tuple(row))
    return tuple(rows)


def mu_two_term(pg: PointedGraph, gens: Generators, cb: CycleBasis):
    """The sigma/tau representative evaluated through the pairing (oracle).

    mu(alpha)(w1 (x) w2) = int_{sigma(alpha)} w1 w2 - int_{tau(word1 alpha)} w1 w2;
    the tau term pairs each chain coefficient through the single-letter rule.
    """
    g = cb.genus
    m = cb.edge_count or 0
    basis_coords = [tuple(1 if i == j else 0 for j in range(g)) for i in range(g)]
    rows = []
    for w in gens.loops:
        chain = chain_of_word(w, m)
        row = []
        for a in range(g):
            for b in range(g):
                first = integrate_word(w, (basis_coords[a], basis_coords[b]), cb)
                second = sum(Fraction(chain[e] * cb.basis[a][e] * cb.basis[b][e], 2)
                             for e in range(m))
                row.append(first - second)
        rows.append(tuple(row))
    return tuple(rows)


def harmonic_volume(pg: PointedGraph, gens: Generators = None) -> HarmonicVolume:
    cb = cycle_basis(pg.graph)
    gens = gens if gens is not None else generators(pg)
    mu = _mu_matrix(pg, gens, cb)
    j2 = j2_group(cb)
    nf = tuple(itertools.chain.from_iterable(j2.residue(row) for row in mu))
    return HarmonicVolume(mu, nf)


def section_ambiguity_check(pg: PointedGraph, gens: Generators,
                            gens_alt: Generators) -> bool:
    """Two generator systems with equal homology classes give equal normal forms."""
    cb = cycle_basis(pg.graph)
    m = cb.edge_count or 0
    for w1, w2 in zip(gens.loops, gens_alt.loops):
        if chain_of_word(w1, m) != chain_of_word(w2, m):
            raise GraphError("generator systems have different homology classes")
    return (harmonic_volume(pg, gens).normal_form
            == harmonic_volume(pg, gens_alt).normal_form)


def transport_mu(mu, minv):
    """Pull a volume matrix along an isometry with inverse matrix `minv`.

    (phi_* mu)(alpha)(w1 (x) w2) = mu(phi^-1 alpha)(phi^-1 w1 (x) phi^-1 w2).
    """
    g = len(minv)
    out = []
    for alpha in range(g):
        acc = [[0] * g for _ in range(g)]
        for beta in range(g):
            c = minv[beta][alpha]
            if not c:
                continue
            block = [[mu[beta][a * g + b] for b in range(g)] for a in range(g)]
            # Minv^T . block . Minv
            for cc in range(g):
                for dd in range(g):
                    val = 0
                    for a in range(g):
                        if minv[a][cc]:
                            for b in range(g):
                                val += minv[a][cc] * block[a][b] * minv[b][dd]
                    acc[cc][dd] += c * val
        out.append(tuple(acc[cc][dd] for cc in range(g) for dd in range(g)))
    return tuple(out)


def _flip_correction(base_parts, flipped_classes, genus):
    """tau-section discrepancy of an orientation-reversing identification.

    A signed Whitney map that reverses a target class C' moves the volume
    representative by -<C'*, alpha> * #C' * (C'* (x) C'*); without this term
    even isomorphic pointings would separate.
    """
    corr = [[0] * (genus * genus) for _ in range(genus)]
    for c in flipped_classes:
        f = base_parts.functionals[c]
        size = len(base_parts.classes[c])
        for alpha in range(genus):
            if f[alpha]:
                for a in range(genus):
                    for b in range(genus):
                        corr[alpha][a * genus + b] -= f[alpha] * size * f[a] * f[b]
    return corr


def nu_orbit(member: PointedGraph, base: Multigraph, base_j2: J2Group):
    """All Whitney transports of the member's volume into the base group.

    Every isometry H1(member) -> H1(base) is realized by a signed edge
    bijection whose class signs are forced (Torelli); the transport composes
    the isometry action with the flip correction those signs dictate.
    """
    from .homology import concyclicity
    cb = cycle_basis(member.graph)
    base_cb = cycle_basis(base)
    parts_m = concyclicity(member.graph, cb)
    parts_b = concyclicity(base, base_cb)
    mu = harmonic_volume(member).mu
    res = enumerate_isometries(cb.gram, base_cb.gram)
    g = base_cb.genus
    orbit = set()
    from .torelli import class_bijection_from_isometry
    for iso in res.isometries:
        bij = class_bijection_from_isometry(iso, parts_m, parts_b)
        if bij is None:  # pragma: no cover - Torelli guarantees a bijection
            continue
        minv = iso.inverse_matrix()
        moved = transport_mu(mu, minv)
        corr = _flip_correction(parts_b, [t for _, t, sign in bij.pairs if sign < 0], g)
        total = [tuple(moved[i][c] + corr[i][c] for c in range(g * g))
                 for i in range(g)]
        orbit.add(tuple(itertools.chain.from_iterable(
            base_j2.residue(row) for row in total)))
    return frozenset(orbit)


def nu_injectivity_experiment(g: Multigraph, budget: int = 4) -> dict:
    """Compare harmonic-volume orbits with the pointed-isomorphism oracle.

    Members are (orbit graph, basepoint) pairs reachable by <= budget 2-moves.
    Volumes transport to J2 of the input graph along every isometry; two
    members count as nu-equal iff the orbits coincide. The report lists the
    nu-partition, the oracle partition, and any mismatching pair. Collisions
    (nu-equal but non-isomorphic) are forbidden by the injectivity theorem and
    signal a bug; so do isomorphic pairs with distinct orbits.
    """
    base, _ = cyclic_orientation(g)
    base_cb = cycle_basis(base)
    j2 = j2_group(base_cb)
    members = []
    for graph in enumerate_two_move_orbit(base, budget):
        oriented, _ = cyclic_orientation(graph)
        for v in range(oriented.vertex_count):
            members.append(PointedGraph(oriented, v))
    orbits = [nu_orbit(member, base, j2) for member in members]
    collisions = []
    missed = []
    agree = True
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            nu_equal = orbits[i] == orbits[j]
            iso_equal = isomorphic(members[i], members[j]) is not None
            if nu_equal and not iso_equal:
                collisions.append((i, j))
                agree = False
            if iso_equal and not nu_equal:
                missed.append((i, j))
                agree = False
    classes = []
    assigned = [None] * len(members)
    for i in range(len(members)):
        if assigned[i] is None:
            idx = len(classes)
            classes.append([i])
            assigned[i] = idx
            for j in range(i + 1, len(members)):
                if assigned[j] is None and orbits[i] == orbits[j]:
                    assigned[j] = idx
                    classes[idx].append(j)
    return {
        "members": [m.to_json() for m in members],
        "nu_values": [sorted(orbit) for orbit in orbits],
        "nu_classes": classes,
        "collisions": collisions,
        "missed": missed,
        "agrees_with_oracle": agree,
        "invariant_factors": list(j2.invariant_factors),
    }
