import math
import random

import pytest

from gkmflag.gkmgraph import CohClass, is_coh_class
from gkmflag.invbases import (
    BasisFamily,
    base_eta,
    base_power_classes,
    base_tau,
    basis_family,
    check_bases_over_invariants,
    class_cI,
    express_in_basis,
    extend_invariant,
    fiber_invariant_classes,
    index_family_size,
    index_set,
    invariant_generators,
    iterated_family,
    tower_bundle,
    verify_basis,
)
from gkmflag.linalg import det_fraction
from gkmflag.parabolic import holonomy, typical_fiber
from gkmflag.polyring import Polynomial
from gkmflag.schubert import permuted_class, seeded_random_class


# ----------------------------------------------------------------------
# index sets


def test_index_set_a2():
    got = index_set("A", 2)
    assert len(got) == 6
    assert set(got) == {(i, j) for i in range(3) for j in range(2)}


def test_index_set_b2():
    got = index_set("B", 2)
    assert set(got) == {(i, j) for i in range(4) for j in range(2)}


def test_index_set_d2():
    assert set(index_set("D", 2)) == {(0, 0), (1, 0), (2, 0), (0, 1)}


def test_index_set_d3_two_descriptions_agree():
    """The recursion and the explicit description enumerate the same set."""
    recursive = set(index_set("D", 3))
    explicit = {
        (i1, i2, i3)
        for i1 in range(5) for i2 in range(3) for i3 in range(2)
        if i1 * i2 * i3 == 0
    } | {(0, 1, 2), (0, 3, 1)}
    assert recursive == explicit
    assert len(recursive) == 24


def test_family_sizes_up_to_5():
    for n in range(1, 6):
        assert index_family_size("A", n) == math.factorial(n + 1)
        assert index_family_size("B", n) == 2**n * math.factorial(n)
        assert index_family_size("C", n) == 2**n * math.factorial(n)
        if n >= 2:
            assert index_family_size("D", n) == 2**(n - 1) * math.factorial(n)


# ----------------------------------------------------------------------
# the classes c_I


def test_class_cI_values(a2, b2):
    assert all(v == Polynomial.one(3) for v in class_cI(a2, (0, 0)).values)
    c21 = class_cI(a2, (2, 1))
    assert str(c21.value_at("2,3,1")) == "x2^2*x3"
    c21b = class_cI(b2, (2, 1))
    assert str(c21b.value_at("-2,1")) == "x1*x2^2"


def test_class_cI_invariant_and_valid(a2, b2, d3):
    for rs in (a2, b2, d3):
        for I in index_set(rs.kind, rs.rank):
            c = class_cI(rs, I)
            assert is_coh_class(c)
            for w in rs.elements():
                assert permuted_class(rs, c, w) == c


def test_class_cI_length_check(a2):
    with pytest.raises(ValueError):
        class_cI(a2, (1, 2, 3))


# ----------------------------------------------------------------------
# base classes


def test_base_tau_a(a2):
    b = tower_bundle(a2)
    tau = base_tau(b)
    g = b.base
    for eid, e in enumerate(g.edges):
        assert e.label.to_polynomial() == tau.values[e.src] - tau.values[e.dst]


def test_base_tau_b_half_edge(b2):
    b = tower_bundle(b2)
    tau = base_tau(b)
    g = b.base
    p, q = g.vertex_index("1,2"), g.vertex_index("-1,2")
    eid = g.find_edges(p, q)[0]
    half = (tau.values[p] - tau.values[q]).scale(1) # x1 - (-x1) = 2x1
    assert g.edges[eid].label.to_polynomial().scale(2) == half


def test_b_base_is_not_plain_complete_graph(b2):
    """Triangle labels do not sum to zero: the quotient carries its own
    labels, not the complete graph's."""
    b = tower_bundle(b2)
    g = b.base
    p1 = g.vertex_index("1,2")    # omega_1^+
    m1 = g.vertex_index("-1,2")   # omega_1^-
    m2 = g.vertex_index("-2,1")   # omega_2^-
    total = (
        g.edges[g.find_edges(p1, m1)[0]].label
        + g.edges[g.find_edges(m1, m2)[0]].label
        + g.edges[g.find_edges(m2, p1)[0]].label
    )
    assert str(total) == "-x1"


def test_base_eta_d3(d3):
    b = tower_bundle(d3)
    eta = base_eta(b)
    assert is_coh_class(eta)
    tau = base_tau(b)
    # eta * tau is the full coordinate product at every vertex
    prod = Polynomial.one(3)
    for i in (1, 2, 3):
        prod = prod * Polynomial.variable(3, i)
    for p in range(b.base.nvertices):
        assert eta.values[p] * tau.values[p] == prod


def test_eta_outside_type_d(a2):
    with pytest.raises(ValueError):
        base_eta(tower_bundle(a2))


def test_base_power_classes_independent(a2, b2, d3):
    for rs in (a2, b2, d3):
        b = tower_bundle(rs)
        classes = base_power_classes(b)
        assert len(classes) == b.base.nvertices
        for c in classes:
            assert is_coh_class(c)
        pt = [2**k for k in range(rs.varcount)]
        mat = [[c.values[p].evaluate(pt) for c in classes]
               for p in range(b.base.nvertices)]
        assert det_fraction(mat) != 0


# ----------------------------------------------------------------------
# extension


def test_extend_constant(a2):
    b = tower_bundle(a2)
    fib = typical_fiber(b)
    one = CohClass.constant(fib.graph, 1)
    ext = extend_invariant(b, one)
    assert all(v == Polynomial.one(3) for v in ext.values)


def test_extend_reproduces_shifted_class(a2, b2):
    for rs in (a2, b2):
        b = tower_bundle(rs)
        hol = holonomy(b)
        for J, fc in fiber_invariant_classes(b):
            ext = extend_invariant(b, fc, hol=hol)
            assert ext == class_cI(rs, (0,) + tuple(J))


def test_extend_rejects_non_invariant(a2):
    b = tower_bundle(a2)
    fib = typical_fiber(b)
    # x_{u(2)} with a sign flip at one vertex is not holonomy invariant
    vals = [Polynomial.variable(3, 2), Polynomial.variable(3, 3).scale(-1)]
    bad = CohClass(fib.graph, vals, check=False)
    with pytest.raises(ValueError, match="holonomy invariant"):
        extend_invariant(b, bad)


# ----------------------------------------------------------------------
# expressing over the bundle


def test_express_constant(a2):
    b = tower_bundle(a2)
    one = class_cI(a2, (0, 0))
    c01 = class_cI(a2, (0, 1))
    betas = express_in_basis(b, [one, c01], one)
    assert all(v == Polynomial.one(3) for v in betas[0].values)
    assert all(v.is_zero() for v in betas[1].values)


def test_express_table_classes(a2):
    b = tower_bundle(a2)
    one = class_cI(a2, (0, 0))
    c01 = class_cI(a2, (0, 1))
    betas = express_in_basis(b, [one, c01], class_cI(a2, (1, 1)))
    tau = base_tau(b)
    assert betas[1] == tau
    betas = express_in_basis(b, [one, c01], class_cI(a2, (2, 0)))
    assert betas[0] == tau * tau
    assert all(v.is_zero() for v in betas[1].values)


def test_express_random_classes(a2):
    b = tower_bundle(a2)
    classes = [class_cI(a2, (0, 0)), class_cI(a2, (0, 1))]
    rng = random.Random(123)
    for _ in range(3):
        target = seeded_random_class(a2, rng.randint(0, 5), rng)
        betas = express_in_basis(b, classes, target)  # raises on failure
        for beta in betas:
            assert is_coh_class(beta)


def test_express_wrong_arity(a2):
    b = tower_bundle(a2)
    with pytest.raises(ValueError, match="fiber"):
        express_in_basis(b, [class_cI(a2, (0, 0))], class_cI(a2, (0, 0)))


# ----------------------------------------------------------------------
# basis verification


def test_verify_basis_a2_b2(a2, b2):
    assert verify_basis(a2).ok
    assert verify_basis(b2).ok


def test_verify_basis_detects_duplicates(a2):
    fam = basis_family(a2)
    broken = BasisFamily(a2, fam.indices,
                         [fam.classes[0]] + fam.classes[:1] + fam.classes[2:])
    rep = verify_basis(a2, broken)
    assert not rep.ok
    assert any(c.name == "independence" for c in rep.failures())


def test_iterated_family_matches_closed_form(a2):
    fam = iterated_family(a2)
    for I in index_set("A", 2):
        assert fam[I] == class_cI(a2, I)


def test_invariant_generators_are_invariant(a2, b2, d3):
    for rs in (a2, b2, d3):
        for g in invariant_generators(rs):
            for i in range(1, rs.rank + 1):
                assert rs.simple_reflection(i).act_poly(g) == g


def test_bases_over_invariants(a2, d3):
    rep = check_bases_over_invariants(a2, index_set("A", 2), max_degree=4)
    assert rep.ok, rep.summary()
    rep = check_bases_over_invariants(d3, index_set("D", 3), max_degree=4)
    assert rep.ok, rep.summary()


def test_bases_over_invariants_detects_bad_family(a2):
    bad = [I for I in index_set("A", 2) if I != (2, 1)] + [(0, 0)]
    rep = check_bases_over_invariants(a2, bad, max_degree=4)
    assert not rep.ok


def test_d3_description_check_report():
    from gkmflag.invbases import check_d3_descriptions

    rep = check_d3_descriptions()
    assert rep.ok, rep.summary()


def test_basis_report_json(a2):
    from gkmflag.invbases import basis_report_json

    rep = verify_basis(a2)
    data = basis_report_json(rep)
    assert data == {"independent": True, "spanning": True, "witness": ""}


def test_vandermonde_determinant_brute_force(a2):
    """The base power classes evaluated at (1,2,4) give determinant +-6."""
    b = tower_bundle(a2)
    classes = base_power_classes(b)
    mat = [[c.values[p].evaluate([1, 2, 4]) for c in classes]
           for p in range(b.base.nvertices)]
    det = det_fraction(mat)
    assert abs(det) == 6


def test_class_cI_invariance_rank3_exhaustive(a3):
    for I in index_set("A", 3):
        c = class_cI(a3, I)
        for w in a3.elements():
            assert permuted_class(a3, c, w) == c


def test_iterated_family_rank3(a3):
    fam = iterated_family(a3)
    for I in index_set("A", 3):
        assert fam[I] == class_cI(a3, I), I
