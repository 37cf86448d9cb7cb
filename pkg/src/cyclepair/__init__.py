"""Higher cycle pairing on pointed bridgeless multigraphs.

Exact-arithmetic implementation of the pairing between the truncated
fundamental-group algebra Z pi_1 / J^3 and the tensor algebra on the cycle
lattice, plus the reconstruction machinery built on it: concyclicity classes,
lattice isometry enumeration, the canonical rational transport map and its
integrality test, pointed-isomorphism decision, and harmonic volumes in the
finite group coker(G (x) G)^g.
"""

__version__ = "0.1.0"
