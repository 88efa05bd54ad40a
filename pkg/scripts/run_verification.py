#!/usr/bin/env python3
"""Run the whole desk-scale verification battery and print CHECK lines.

Covers: graph axioms for every constructed flag graph and quotient,
fiber-bundle axioms and holonomy for the standard bundles, basis
verification for the rank-2 and rank-3 families, and the iteration
consistency check.  Exit code 0 iff everything passes.
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from gkmflag.gkmgraph import verify_gkm
from gkmflag.invbases import (
    check_bases_over_invariants,
    check_d3_descriptions,
    class_cI,
    index_set,
    iterated_family,
    verify_basis,
)
from gkmflag.parabolic import build_bundle, holonomy, verify_fiber_bundle
from gkmflag.rootsys import RootSystem
from gkmflag.schubert import flag_graph

CASES = [("A", 2), ("A", 3), ("B", 2), ("B", 3), ("C", 2), ("C", 3), ("D", 3)]
BUNDLES = [("A", 2, {2}), ("A", 3, {2, 3}), ("A", 3, {1, 3}),
           ("B", 2, {2}), ("C", 2, {2}), ("D", 3, {2, 3})]
BASES = [("A", 2), ("A", 3), ("B", 2), ("D", 3)]


def main() -> int:
    t0 = time.time()
    ok = True

    for kind, n in CASES:
        rs = RootSystem(kind, n)
        rep = verify_gkm(flag_graph(rs).graph)
        print(f"CHECK axioms-{kind}{n}: {'PASS' if rep.ok else 'FAIL'}")
        ok &= rep.ok

    for kind, n, sigma2 in BUNDLES:
        rs = RootSystem(kind, n)
        b = build_bundle(rs, frozenset(), frozenset(sigma2))
        rep = verify_fiber_bundle(b)
        tag = f"{kind}{n}-S2={','.join(map(str, sorted(sigma2)))}"
        print(f"CHECK bundle-{tag}: {'PASS' if rep.ok else 'FAIL'}")
        ok &= rep.ok
        group = holonomy(b, check=False)
        good = bool(group.matches_upsilon)
        print(f"CHECK holonomy-{tag}: {'PASS' if good else 'FAIL'} "
              f"(order {group.order})")
        ok &= good

    for kind, n in BASES:
        rs = RootSystem(kind, n)
        rep = verify_basis(rs)
        print(f"CHECK basis-{kind}{n}: {'PASS' if rep.ok else 'FAIL'}")
        ok &= rep.ok

    for kind, n in [("A", 2), ("B", 2), ("D", 3)]:
        rs = RootSystem(kind, n)
        fam = iterated_family(rs)
        good = all(fam[I] == class_cI(rs, I) for I in index_set(kind, n))
        print(f"CHECK iteration-{kind}{n}: {'PASS' if good else 'FAIL'}")
        ok &= good

    rep = check_d3_descriptions()
    print(f"CHECK d3-descriptions: {'PASS' if rep.ok else 'FAIL'}")
    ok &= rep.ok

    for kind, n in [("A", 2), ("B", 2), ("D", 3)]:
        rs = RootSystem(kind, n)
        rep = check_bases_over_invariants(rs, index_set(kind, n), max_degree=4)
        print(f"CHECK invariant-module-{kind}{n}: {'PASS' if rep.ok else 'FAIL'}")
        ok &= rep.ok

    print(f"total: {'PASS' if ok else 'FAIL'} in {time.time() - t0:.1f}s")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
