import copy
import random

import pytest

from gkmflag.gkmgraph import Edge, GkmGraph, verify_gkm, verify_iso
from gkmflag.linalg import identity_matrix
from gkmflag.parabolic import (
    build_bundle,
    build_coset_graph,
    bundle_from_json,
    bundle_hash,
    bundle_to_json,
    fiber_model_iso,
    holonomy,
    holonomy_exhaustive,
    make_bundle,
    minimal_representatives,
    product_bundle,
    typical_fiber,
    upsilon_elements,
    verify_fiber_bundle,
    verify_fibration,
)
from gkmflag.polyring import LinearForm
from gkmflag.rootsys import RootSystem

BUNDLES = [
    ("A", 2, frozenset({2})),
    ("A", 3, frozenset({2, 3})),
    ("A", 3, frozenset({1, 3})),
    ("B", 2, frozenset({2})),
    ("C", 2, frozenset({2})),
    ("D", 3, frozenset({2, 3})),
]


def tower(kind, n, sigma2=None):
    rs = RootSystem(kind, n)
    if sigma2 is None:
        sigma2 = rs.full_sigma() - {1}
    return rs, build_bundle(rs, frozenset(), sigma2)


def canonical_structure(cg):
    """Labeled-graph shape independent of edge ordering, for comparisons."""
    g = cg.graph
    key = {}
    for eid, e in enumerate(g.edges):
        key[eid] = (g.vertices[e.src], g.vertices[e.dst], str(e.label))
    edges = sorted(key.values())
    conn = set()
    for eid in range(len(g.edges)):
        for a, b in g.connection[eid].items():
            conn.add((key[eid], key[a], key[b]))
    return edges, conn


# ----------------------------------------------------------------------
# coset graphs


def test_flag_graph_a2(a2):
    cg = build_coset_graph(a2, frozenset(), a2.full_sigma())
    assert cg.nvertices == 6
    g = cg.graph
    eid = g.find_edges(g.vertex_index("1,2,3"), g.vertex_index("1,3,2"))[0]
    assert str(g.edges[eid].label) == "x2 - x3"
    eid = g.find_edges(g.vertex_index("2,3,1"), g.vertex_index("3,2,1"))[0]
    assert str(g.edges[eid].label) == "x2 - x3"


def test_k4_from_a3(a3):
    cg = build_coset_graph(a3, frozenset({2, 3}), a3.full_sigma())
    assert cg.nvertices == 4
    g = cg.graph
    for p in range(4):
        assert {g.edges[eid].dst for eid in g.edges_at[p]} == set(range(4)) - {p}
    assert verify_gkm(g).ok


def test_b2_base_half_label(b2):
    cg = build_coset_graph(b2, frozenset({2}), b2.full_sigma())
    g = cg.graph
    eid = g.find_edges(g.vertex_index("1,2"), g.vertex_index("-1,2"))[0]
    assert str(g.edges[eid].label) == "x1"


def test_all_built_graphs_pass_axioms():
    for kind, n in [("A", 1), ("A", 2), ("A", 3), ("B", 2), ("B", 3),
                    ("C", 2), ("C", 3), ("D", 3)]:
        rs = RootSystem(kind, n)
        assert verify_gkm(build_coset_graph(rs, frozenset(), rs.full_sigma()).graph).ok
    a3 = RootSystem("A", 3)
    assert verify_gkm(build_coset_graph(a3, frozenset({1, 3}), a3.full_sigma()).graph).ok


def test_representative_independence(a2, b2):
    rng = random.Random(17)
    for rs, sigma1 in [(a2, frozenset({2})), (b2, frozenset({2}))]:
        canonical = build_coset_graph(rs, sigma1, rs.full_sigma())
        w1 = rs.parabolic_elements(sigma1)
        reps = [w * rng.choice(w1) for w in canonical.reps]
        rebuilt = build_coset_graph(rs, sigma1, rs.full_sigma(), build_reps=reps)
        assert canonical_structure(rebuilt) == canonical_structure(canonical)


def test_sigma_ordering_enforced(a2):
    with pytest.raises(ValueError):
        build_coset_graph(a2, frozenset({1}), frozenset({2}))


def test_minimal_representatives(a2, b2):
    reps = minimal_representatives(a2, {2})
    rep_set = set(reps.values())
    assert rep_set == {
        a2.identity(),
        a2.simple_reflection(1),
        a2.simple_reflection(2) * a2.simple_reflection(1),
    }
    reps_b = minimal_representatives(b2, {2})
    assert sorted(b2.length(w) for w in set(reps_b.values())) == [0, 1, 2, 3]
    full = minimal_representatives(a2, a2.full_sigma())
    assert set(full.values()) == {a2.identity()}


# ----------------------------------------------------------------------
# bundles


def test_projection_is_first_value(a3):
    rs, b = tower("A", 3)
    for p, w in enumerate(b.total_coset.reps):
        base_rep = b.base_coset.reps[b.pi[p]]
        assert base_rep.perm[0] == w.perm[0]


def test_all_bundles_verify():
    for kind, n, sigma2 in BUNDLES:
        rs = RootSystem(kind, n)
        b = build_bundle(rs, frozenset(), sigma2)
        rep = verify_fibration(b)
        assert rep.ok, (kind, n, rep.summary())
        rep = verify_fiber_bundle(b)
        assert rep.ok, (kind, n, rep.summary())


def test_lift_paths(a2):
    rs, b = tower("A", 2)
    start = b.total.vertex_index("1,2,3")
    assert b.lift_path([], start) == [start]
    lifted = b.lift_path([0, 1, 2, 0], start)
    assert [b.total.vertices[q] for q in lifted] == ["1,2,3", "2,1,3", "3,1,2", "1,3,2"]
    # an edge followed by its reverse returns to the start
    beid = b.base.edges_at[0][0]
    back = b.base.reverse[beid]
    out = b.lift_path([beid, back], start, edges=True)
    assert out[0] == out[-1] == start


def test_lift_path_bad_start(a2):
    rs, b = tower("A", 2)
    other = b.total.vertex_index("2,1,3")
    with pytest.raises(ValueError):
        b.lift_path([0, 1], other)


def test_transition_formula_sn(a3):
    """Across the base edge i -> j the transition is left multiplication
    by the transposition (i, j)."""
    rs, b = tower("A", 3)
    for beid, e in enumerate(b.base.edges):
        refl = rs.reflection(e.label)
        t = b.transitions[beid]
        for p, q in t.vmap.items():
            assert b.total_coset.reps[q] == refl * b.total_coset.reps[p]


def test_transition_composition_with_reverse(b2):
    rs, b = tower("B", 2)
    for beid in range(len(b.base.edges)):
        t = b.transitions[beid]
        back = b.transitions[b.base.reverse[beid]]
        for p, q in t.vmap.items():
            assert back.vmap[q] == p


def test_b2_transition_psi_is_sign_flip(b2):
    rs, b = tower("B", 2)
    g = b.base
    eid = g.find_edges(g.vertex_index("1,2"), g.vertex_index("-1,2"))[0]
    psi = b.transitions[eid].psi
    assert psi == rs.reflection(LinearForm([1, 0])).matrix()
    assert psi[0][0] == -1


def test_psi_shifts_along_base_label(b2, d3):
    for rs in (b2, d3):
        b = build_bundle(rs, frozenset(), rs.full_sigma() - {1})
        for beid, e in enumerate(b.base.edges):
            t = b.transitions[beid]
            sub, _, _ = b.fiber_subgraph(e.src)
            for fe in sub.edges:
                from gkmflag.linalg import apply_matrix_form

                diff = apply_matrix_form(t.psi, fe.label) - fe.label
                assert diff.proportional_to(e.label) is not None


def test_fiber_model_isos(a3, b2):
    for rs in (a3, b2):
        b = build_bundle(rs, frozenset(), rs.full_sigma() - {1})
        fib = typical_fiber(b)
        for p in range(b.base.nvertices):
            iso = fiber_model_iso(b, p)
            sub, _, _ = b.fiber_subgraph(p)
            assert verify_iso(iso, fib.graph, sub)
        # a non-minimal representative works too
        w2 = rs.parabolic_elements(b.sigma2)
        rep = b.base_coset.reps[1] * w2[1]
        iso = fiber_model_iso(b, 1, rep=rep)
        sub, _, _ = b.fiber_subgraph(1)
        assert verify_iso(iso, fib.graph, sub)


# ----------------------------------------------------------------------
# mutation detection


def test_deleted_edge_detected(a2):
    rs, b = tower("A", 2)
    mutated = copy.deepcopy(b)
    victim = next(eid for eid in range(len(b.total.edges))
                  if b.edge_class[eid] == "h")
    # drop the edge from its vertex's star: dpi image disappears
    src = mutated.total.edges[victim].src
    mutated.total.edges_at[src].remove(victim)
    mutated.dpi.pop(victim)
    mutated.edge_class[victim] = "v"
    rep = verify_fibration(mutated)
    assert not rep.ok
    assert any("bijective" in c.name or "misclassified" in c.witness
               for c in rep.failures()) or rep.failures()


def test_label_mutation_detected(b2):
    rs, b = tower("B", 2)
    mutated = copy.deepcopy(b)
    eid = next(e for e in range(len(b.total.edges)) if b.edge_class[e] == "h")
    old = mutated.total.edges[eid]
    mutated.total.edges[eid] = Edge(old.src, old.dst, old.label + old.label)
    rep = verify_fiber_bundle(mutated)
    assert not rep.ok


def test_connection_mutation_detected(a2):
    rs, b = tower("A", 2)
    mutated = copy.deepcopy(b)
    eid = 0
    conn = mutated.total.connection[eid]
    keys = [k for k in conn if k != eid]
    a, bb = keys[0], keys[1]
    conn[a], conn[bb] = conn[bb], conn[a]
    rep = verify_fiber_bundle(mutated)
    assert not rep.ok


def test_psi_mutation_detected(b2):
    rs, b = tower("B", 2)
    mutated = copy.deepcopy(b)
    g = b.base
    eid = g.find_edges(g.vertex_index("1,2"), g.vertex_index("-2,1"))[0]
    mutated.transitions[eid].psi = identity_matrix(2)
    rep = verify_fiber_bundle(mutated)
    assert not rep.ok
    assert any("transition-gkm-iso" == c.name for c in rep.failures())


# ----------------------------------------------------------------------
# holonomy


def test_holonomy_orders():
    for kind, n, sigma2, order in [
        ("A", 2, frozenset({2}), 2),
        ("A", 3, frozenset({2, 3}), 6),
        ("A", 3, frozenset({1, 3}), 4),
        ("B", 2, frozenset({2}), 2),
        ("C", 2, frozenset({2}), 2),
        ("D", 3, frozenset({2, 3}), 4),
    ]:
        rs = RootSystem(kind, n)
        b = build_bundle(rs, frozenset(), sigma2)
        group = holonomy(b)
        assert group.order == order, (kind, n)
        assert group.matches_upsilon


def test_holonomy_base_point_independent(a2):
    rs, b = tower("A", 2)
    keys = None
    for p in range(b.base.nvertices):
        group = holonomy(b, base_point=p)
        assert group.matches_upsilon
        if keys is None:
            keys = group.element_keys()
        else:
            assert group.element_keys() == keys


def test_holonomy_exhaustive_agrees(a2, b2):
    for rs in (a2, b2):
        b = build_bundle(rs, frozenset(), rs.full_sigma() - {1})
        cons = holonomy(b)
        exh = holonomy_exhaustive(b, cons.base_point)
        assert exh.element_keys() == cons.element_keys()


def test_generators_come_from_loops(a2):
    rs, b = tower("A", 2)
    group = holonomy(b)
    for loop, iso in group.generators:
        assert loop, "generator without a loop"
        # the loop is closed at the base point
        assert b.base.edges[loop[0]].src == group.base_point
        assert b.base.edges[loop[-1]].dst == group.base_point


def test_trivial_product_bundle():
    def k2(label, names):
        edges = [Edge(0, 1, label), Edge(1, 0, -label)]
        return GkmGraph(3, names, edges, [1, 0], [{0: 1}, {1: 0}])

    base = k2(LinearForm([1, -1, 0]), ["a", "b"])
    fiber = k2(LinearForm([0, 0, 1]), ["u", "v"])
    b = product_bundle(base, fiber)
    assert verify_fibration(b).ok
    assert verify_fiber_bundle(b).ok
    group = holonomy_exhaustive(b, 0)
    assert group.order == 1


def test_make_bundle_matches_built(a2):
    """Rebuilding from raw data recovers the structure; the linear parts
    are only pinned on the fiber spans, so they are checked by axiom."""
    rs, b = tower("A", 2)
    rebuilt = make_bundle(b.total, b.base, b.pi)
    assert rebuilt.edge_class == b.edge_class
    assert rebuilt.dpi == b.dpi
    for beid in range(len(b.base.edges)):
        assert rebuilt.transitions[beid].vmap == b.transitions[beid].vmap
    assert verify_fiber_bundle(rebuilt).ok


# ----------------------------------------------------------------------
# serialization


def test_bundle_json_round_trip(b2):
    rs, b = tower("B", 2)
    data = bundle_to_json(b)
    b2_ = bundle_from_json(data)
    assert bundle_hash(b2_) == bundle_hash(b)
    assert verify_fiber_bundle(b2_).ok


def test_d3_base_partition_structure(d3):
    """The type-D base is complete multipartite: each vertex misses
    exactly its opposite, the vertex with negated degree-one value."""
    b = build_bundle(d3, frozenset(), frozenset({2, 3}))
    g = b.base
    tau_vals = [w.act_poly(__import__("gkmflag.polyring", fromlist=["Polynomial"])
                .Polynomial.variable(3, 1)) for w in b.base_coset.reps]
    for p in range(g.nvertices):
        missing = set(range(g.nvertices)) - {p} - {
            g.edges[eid].dst for eid in g.edges_at[p]
        }
        assert len(missing) == 1
        q = missing.pop()
        assert tau_vals[q] == -tau_vals[p]


def test_holonomy_all_base_points_d3(d3):
    b = build_bundle(d3, frozenset(), frozenset({2, 3}))
    keys = None
    for p in range(b.base.nvertices):
        group = holonomy(b, base_point=p)
        assert group.matches_upsilon
        keys = group.element_keys() if keys is None else keys
        assert group.element_keys() == keys
