"""Coset graphs of Weyl groups, their fiber bundles, and holonomy.

For nested subsets Sigma1 within Sigma2 of simple roots, the vertices of
the coset graph are the cosets w*W(Sigma1) with w in W(Sigma2); [w] and
[w s_beta] are joined for every beta in <Sigma2> \\ <Sigma1>, the edge is
labeled w*beta, and the connection along ([w], [w s_beta]) sends
([w], [w s_beta']) to ([w s_beta], [w s_beta s_beta']).  Everything is
stored relative to the canonical minimal-length coset representatives;
labels and the connection do not depend on that choice (tests rebuild
from random representatives and compare).

The projection W/W1 -> W/W2 is a fiber bundle of such graphs: an edge in
direction beta is vertical when beta lies in <Sigma2> and horizontal
otherwise, horizontal edges project isomorphically, and the transition
across a base edge labeled w*beta is left multiplication by the
reflection s_{w beta} together with that same reflection on coordinates.
Holonomy around based loops is computed from a finite set of explicit
loops (one per simple root of Sigma2, plus triangles when the base is
complete) and, optionally, by exhausting short based cycles; for these
bundles the group is the image of W(Sigma2) acting on the typical fiber
by left multiplication, and that identity is asserted.

Bundles assembled from raw graph data (no Weyl group behind them) are
also supported for axiom verification; see :func:`make_bundle` and
:func:`product_bundle`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .gkmgraph import (
    CohClass,
    Edge,
    GkmGraph,
    GkmIso,
    Report,
    induced_subgraph,
    verify_gkm,
    verify_iso,
)
from .polyring import LinearForm
from .rootsys import RootSystem, WeylElement

__all__ = [
    "CosetGraph",
    "BundleMap",
    "Transition",
    "HolonomyGroup",
    "build_coset_graph",
    "build_bundle",
    "make_bundle",
    "product_bundle",
    "minimal_representatives",
    "verify_fibration",
    "bundle_to_json",
    "bundle_from_json",
    "bundle_hash",
    "verify_fiber_bundle",
    "holonomy",
    "upsilon_elements",
    "lift_class",
]


class CosetGraph:
    """The labeled graph of W(Sigma2)/W(Sigma1) with its connection."""

    def __init__(self, rs: RootSystem, sigma1, sigma2, build_reps=None):
        sigma1 = frozenset(sigma1)
        sigma2 = frozenset(sigma2)
        if not sigma1 <= sigma2:
            raise ValueError("Sigma1 must be contained in Sigma2")
        if not sigma2 <= rs.full_sigma():
            raise ValueError("Sigma2 must consist of simple-root indices")
        self.rs = rs
        self.sigma1 = sigma1
        self.sigma2 = sigma2
        self.roots = [
            beta for beta in rs.closure(sigma2).roots
            if beta not in set(rs.closure(sigma1).roots)
        ]
        w2 = rs.parabolic_elements(sigma2)
        w1 = rs.parabolic_elements(sigma1)
        self._w1 = set(w1)
        self._w2 = set(w2)
        self.reps: list[WeylElement] = []
        self.elem_vertex: dict[WeylElement, int] = {}
        for w in w2:  # canonical order; first element of each coset is minimal
            if w in self.elem_vertex:
                continue
            coset = [w * u for u in w1]
            min_len = min(rs.length(x) for x in coset)
            if sum(1 for x in coset if rs.length(x) == min_len) != 1:
                raise AssertionError("minimal coset representative is not unique")
            idx = len(self.reps)
            self.reps.append(w)
            for x in coset:
                self.elem_vertex[x] = idx
        if build_reps is None:
            build_reps = self.reps
        else:
            build_reps = list(build_reps)
            for i, w in enumerate(build_reps):
                if self.elem_vertex.get(w) != i:
                    raise ValueError("build representative lies in the wrong coset")
        self.build_reps = build_reps
        self.graph = self._build_graph()

    # ------------------------------------------------------------------

    def _build_graph(self) -> GkmGraph:
        rs = self.rs
        d = len(self.roots)
        nverts = len(self.reps)
        edges = []
        for p in range(nverts):
            w = self.build_reps[p]
            for beta in self.roots:
                q = self.elem_vertex[w * rs.reflection(beta)]
                edges.append(Edge(p, q, w.act_linear(beta)))
        # reject exact duplicates and proportional parallel labels
        for p in range(nverts):
            by_dst: dict = {}
            for k in range(d):
                e = edges[p * d + k]
                by_dst.setdefault(e.dst, []).append(e.label)
            for labels in by_dst.values():
                for i in range(len(labels)):
                    for j in range(i + 1, len(labels)):
                        if labels[i].proportional_to(labels[j]) is not None:
                            raise ValueError(
                                "parallel edges with proportional labels"
                            )
        root_index = {beta: k for k, beta in enumerate(self.roots)}
        connection = []
        reverse = []
        for p in range(nverts):
            w = self.build_reps[p]
            for k, beta in enumerate(self.roots):
                eid = p * d + k
                q = edges[eid].dst
                u = (w * rs.reflection(beta)).inverse() * self.build_reps[q]
                if u not in self._w1:
                    raise AssertionError("coset transport left W(Sigma1)")
                uinv = u.inverse()
                conn = {}
                for k2, beta2 in enumerate(self.roots):
                    gamma = rs.positive_part(uinv.act_linear(beta2))
                    conn[p * d + k2] = q * d + root_index[gamma]
                connection.append(conn)
                reverse.append(conn[eid])
        names = [w.one_line_str() for w in self.reps]
        return GkmGraph(rs.varcount, names, edges, reverse, connection)

    # ------------------------------------------------------------------

    @property
    def nvertices(self) -> int:
        return len(self.reps)

    def vertex_of(self, w: WeylElement) -> int:
        return self.elem_vertex[w]

    def rep_of(self, p: int) -> WeylElement:
        return self.reps[p]

    def direction(self, eid: int) -> LinearForm:
        return self.roots[eid % len(self.roots)]

    def edge_id(self, p: int, beta: LinearForm) -> int:
        return p * len(self.roots) + self.roots.index(beta)

    def __repr__(self):
        return (f"CosetGraph({self.rs.kind}{self.rs.rank}, "
                f"S1={sorted(self.sigma1)}, S2={sorted(self.sigma2)}, "
                f"{self.nvertices} vertices)")


def build_coset_graph(rs: RootSystem, sigma1, sigma2, build_reps=None) -> CosetGraph:
    """Build (and cache, per root system) the coset graph for the pair.

    Passing explicit build representatives bypasses the cache; that path
    exists so tests can confirm representative independence.
    """
    if build_reps is not None:
        return CosetGraph(rs, sigma1, sigma2, build_reps)
    key = (frozenset(sigma1), frozenset(sigma2))
    cache = getattr(rs, "_coset_cache", None)
    if cache is None:
        cache = {}
        rs._coset_cache = cache
    if key not in cache:
        cache[key] = CosetGraph(rs, key[0], key[1])
    return cache[key]


def minimal_representatives(rs: RootSystem, sigma):
    """Map each group element to the minimal-length representative of its coset."""
    sigma = frozenset(sigma)
    wsub = rs.parabolic_elements(sigma)
    out = {}
    for w in rs.elements():
        if w in out:
            continue
        coset = [w * u for u in wsub]
        min_len = min(rs.length(x) for x in coset)
        best = [x for x in coset if rs.length(x) == min_len]
        if len(best) != 1:
            raise AssertionError("minimal coset representative is not unique")
        for x in coset:
            out[x] = best[0]
    return out


# ----------------------------------------------------------------------
# bundles


@dataclass
class Transition:
    """Fiber transport across one base edge: vertex map plus linear part."""

    base_edge: int
    vmap: dict  # total vertex -> total vertex, defined on the source fiber
    psi: tuple  # m x m rational matrix


@dataclass
class BundleMap:
    total: GkmGraph
    base: GkmGraph
    pi: list
    edge_class: list  # 'v' or 'h' per total oriented edge
    dpi: dict  # horizontal total edge -> base edge
    transitions: dict  # base edge -> Transition
    total_coset: CosetGraph | None = None
    base_coset: CosetGraph | None = None
    rs: RootSystem | None = None
    sigma1: frozenset | None = None
    sigma2: frozenset | None = None
    _fiber_cache: dict = field(default_factory=dict, repr=False)

    # -- fibers --------------------------------------------------------

    def fiber_vertices(self, p: int):
        return [q for q in range(self.total.nvertices) if self.pi[q] == p]

    def fiber_subgraph(self, p: int):
        """(subgraph, old->new vertex map, old->new edge map), cached."""
        if p not in self._fiber_cache:
            self._fiber_cache[p] = induced_subgraph(self.total, self.fiber_vertices(p))
        return self._fiber_cache[p]

    def base_point(self) -> int:
        """Default base point: the coset of the identity when available."""
        if self.base_coset is not None:
            return self.base_coset.vertex_of(self.rs.identity())
        return 0

    # -- lifting -------------------------------------------------------

    def lift_edge(self, base_eid: int, start: int):
        """The unique horizontal edge at ``start`` projecting onto base_eid."""
        hits = [
            eid for eid in self.total.edges_at[start]
            if self.edge_class[eid] == "h" and self.dpi.get(eid) == base_eid
        ]
        if len(hits) != 1:
            raise ValueError(
                f"edge {self.base.edge_str(base_eid)} has {len(hits)} lifts at "
                f"{self.total.vertices[start]}"
            )
        return hits[0]

    def lift_path(self, path, start: int, edges: bool = False):
        """Lift a base path starting at ``start``; returns the visited
        total vertices.

        ``path`` is a list of base vertices by default (each consecutive
        pair must be joined by a unique edge); pass ``edges=True`` to give
        base edge ids instead, which disambiguates parallel edges.
        """
        path_edges = list(path) if edges else self._path_edges(path)
        if path_edges and self.base.edges[path_edges[0]].src != self.pi[start]:
            raise ValueError("start vertex does not lie over the path head")
        out = [start]
        cur = start
        for beid in path_edges:
            te = self.lift_edge(beid, cur)
            cur = self.total.edges[te].dst
            out.append(cur)
        return out

    def _path_edges(self, path):
        edges = []
        for a, b in zip(path, path[1:]):
            cands = self.base.find_edges(a, b)
            if len(cands) != 1:
                raise ValueError(
                    f"path step {a}->{b} matches {len(cands)} base edges; "
                    "pass edge ids with edges=True instead"
                )
            edges.append(cands[0])
        return edges

    def transition(self, base_eid: int) -> Transition:
        return self.transitions[base_eid]

    def transition_iso(self, base_eid: int) -> GkmIso:
        """The stored transition as an isomorphism of fiber subgraphs."""
        t = self.transitions[base_eid]
        e = self.base.edges[base_eid]
        sub_p, vmap_p, _ = self.fiber_subgraph(e.src)
        sub_q, vmap_q, _ = self.fiber_subgraph(e.dst)
        phi = {vmap_p[a]: vmap_q[b] for a, b in t.vmap.items()}
        return GkmIso(tuple(phi[i] for i in range(sub_p.nvertices)), t.psi)


def build_bundle(rs: RootSystem, sigma1, sigma2) -> BundleMap:
    """The bundle W/W(Sigma1) -> W/W(Sigma2) with its transition data."""
    sigma1 = frozenset(sigma1)
    sigma2 = frozenset(sigma2)
    if not sigma1 <= sigma2:
        raise ValueError("Sigma1 must be contained in Sigma2")
    full = rs.full_sigma()
    total = build_coset_graph(rs, sigma1, full)
    base = build_coset_graph(rs, sigma2, full)
    closure2 = set(rs.closure(sigma2).roots)
    pi = [base.vertex_of(w) for w in total.reps]
    edge_class = []
    dpi = {}
    for eid in range(len(total.graph.edges)):
        beta = total.direction(eid)
        if beta in closure2:
            edge_class.append("v")
            continue
        edge_class.append("h")
        p = total.graph.edges[eid].src
        bp = pi[p]
        u = base.reps[bp].inverse() * total.reps[p]
        gamma = rs.positive_part(u.act_linear(beta))
        dpi[eid] = base.edge_id(bp, gamma)
    transitions = {}
    for beid in range(len(base.graph.edges)):
        e = base.graph.edges[beid]
        refl = rs.reflection(e.label)
        vmap = {}
        for p in range(total.nvertices):
            if pi[p] != e.src:
                continue
            vmap[p] = total.vertex_of(refl * total.reps[p])
        transitions[beid] = Transition(beid, vmap, refl.matrix())
    return BundleMap(
        total=total.graph,
        base=base.graph,
        pi=pi,
        edge_class=edge_class,
        dpi=dpi,
        transitions=transitions,
        total_coset=total,
        base_coset=base,
        rs=rs,
        sigma1=sigma1,
        sigma2=sigma2,
    )


def make_bundle(total: GkmGraph, base: GkmGraph, pi, transitions=None) -> BundleMap:
    """Assemble a bundle from raw graph data (for user-supplied bundles).

    Edge classes, the projection on edges, and (if absent) the transition
    maps are derived from the data: lifts by endpoint-plus-label matching,
    linear parts by solving the intertwining condition on fiber labels.
    """
    pi = list(pi)
    edge_class = []
    dpi = {}
    for eid, e in enumerate(total.edges):
        if pi[e.src] == pi[e.dst]:
            edge_class.append("v")
            continue
        edge_class.append("h")
        cands = base.find_edges(pi[e.src], pi[e.dst])
        if len(cands) > 1:
            cands = [c for c in cands if base.edges[c].label == e.label]
        if len(cands) != 1:
            raise ValueError(f"cannot project edge {total.edge_str(eid)}")
        dpi[eid] = cands[0]
    b = BundleMap(total=total, base=base, pi=pi, edge_class=edge_class,
                  dpi=dpi, transitions={})
    if transitions is None:
        transitions = {}
        for beid in range(len(base.edges)):
            e = base.edges[beid]
            vmap = {}
            for p in b.fiber_vertices(e.src):
                te = b.lift_edge(beid, p)
                vmap[p] = total.edges[te].dst
            psi = _solve_transition_psi(b, beid, vmap)
            transitions[beid] = Transition(beid, vmap, psi)
    b.transitions = transitions
    return b


def _solve_transition_psi(b: BundleMap, beid: int, vmap):
    """Linear part x -> x + c(x)*alpha_e pinned by the fiber labels."""
    m = b.total.varcount
    alpha = b.base.edges[beid].label
    pairs = []
    src = b.base.edges[beid].src
    for p in b.fiber_vertices(src):
        for eid in b.total.edges_at[p]:
            if b.edge_class[eid] != "v":
                continue
            e = b.total.edges[eid]
            # the matching fiber edge between the transported endpoints
            targets = [
                t for t in b.total.edges_at[vmap[p]]
                if b.total.edges[t].dst == vmap[e.dst]
            ]
            if len(targets) != 1:
                raise ValueError("ambiguous transported fiber edge")
            pairs.append((e.label, b.total.edges[targets[0]].label))
    rows = []
    rhs = []
    for v, w in pairs:
        diff = w - v
        c = diff.proportional_to(alpha)
        if c is None:
            raise ValueError("fiber labels do not shift along the base label")
        rows.append(list(v.coeffs))
        rhs.append(c)
    cvec = linalg.solve_fraction(rows, rhs) if rows else [Fraction(0)] * m
    if cvec is None:
        raise ValueError("no linear transition exists")
    # x -> x + c(x) alpha has determinant 1 + c(alpha); the data pins c only
    # on the fiber-label span, so steer the free part away from -1.
    c_alpha = sum(a * b for a, b in zip(cvec, alpha.coeffs))
    if 1 + c_alpha == 0:
        z = linalg.solve_fraction(rows + [list(alpha.coeffs)],
                                  [Fraction(0)] * len(rows) + [Fraction(1)])
        if z is None:
            raise ValueError("transition is singular on the fiber span")
        cvec = [c - c_alpha * zi for c, zi in zip(cvec, z)]
    ident = linalg.identity_matrix(m)
    return tuple(
        tuple(ident[i][j] + alpha.coeffs[i] * cvec[j] for j in range(m))
        for i in range(m)
    )


def product_bundle(base: GkmGraph, fiber: GkmGraph) -> BundleMap:
    """The trivial bundle base x fiber -> base (labels share one space)."""
    if base.varcount != fiber.varcount:
        raise ValueError("base and fiber labels must share a coordinate space")
    nf = fiber.nvertices
    vertices = [
        f"{bv}|{fv}" for bv in base.vertices for fv in fiber.vertices
    ]

    def vid(b_, f_):
        return b_ * nf + f_

    edges = []
    eid_h = {}
    eid_v = {}
    for b_ in range(base.nvertices):
        for f_ in range(nf):
            p = vid(b_, f_)
            for beid in base.edges_at[b_]:
                eid_h[(beid, f_)] = len(edges)
                edges.append(Edge(p, vid(base.edges[beid].dst, f_),
                                  base.edges[beid].label))
            for feid in fiber.edges_at[f_]:
                eid_v[(b_, feid)] = len(edges)
                edges.append(Edge(p, vid(b_, fiber.edges[feid].dst),
                                  fiber.edges[feid].label))
    reverse = [0] * len(edges)
    connection = [dict() for _ in edges]
    for (beid, f_), eid in eid_h.items():
        reverse[eid] = eid_h[(base.reverse[beid], f_)]
        conn = {}
        b_ = base.edges[beid].src
        b2 = base.edges[beid].dst
        for beid2, image in base.connection[beid].items():
            conn[eid_h[(beid2, f_)]] = eid_h[(image, f_)]
        for feid in fiber.edges_at[f_]:
            conn[eid_v[(b_, feid)]] = eid_v[(b2, feid)]
        connection[eid] = conn
    for (b_, feid), eid in eid_v.items():
        reverse[eid] = eid_v[(b_, fiber.reverse[feid])]
        conn = {}
        f_ = fiber.edges[feid].src
        for feid2, image in fiber.connection[feid].items():
            conn[eid_v[(b_, feid2)]] = eid_v[(b_, image)]
        for beid in base.edges_at[b_]:
            conn[eid_h[(beid, f_)]] = eid_h[(beid, fiber.edges[feid].dst)]
        connection[eid] = conn
    total = GkmGraph(base.varcount, vertices, edges, reverse, connection)
    pi = [b_ for b_ in range(base.nvertices) for _ in range(nf)]
    return make_bundle(total, base, pi)


# ----------------------------------------------------------------------
# verification


def verify_fibration(b: BundleMap) -> Report:
    rep = Report()
    bad = ""
    for eid, e in enumerate(b.total.edges):
        if b.pi[e.src] == b.pi[e.dst]:
            if b.edge_class[eid] != "v":
                bad = f"edge {b.total.edge_str(eid)} misclassified"
                break
        else:
            if b.edge_class[eid] != "h":
                bad = f"edge {b.total.edge_str(eid)} misclassified"
                break
            beid = b.dpi.get(eid)
            if beid is None:
                bad = f"horizontal edge {b.total.edge_str(eid)} has no projection"
                break
            be = b.base.edges[beid]
            if (be.src, be.dst) != (b.pi[e.src], b.pi[e.dst]):
                bad = (f"projection of {b.total.edge_str(eid)} has wrong "
                       f"endpoints")
                break
    rep.add("graph-morphism", not bad, bad)

    bad = ""
    for q in range(b.total.nvertices):
        horiz = [eid for eid in b.total.edges_at[q] if b.edge_class[eid] == "h"]
        images = [b.dpi.get(eid) for eid in horiz]
        base_edges = b.base.edges_at[b.pi[q]]
        if None in images or sorted(images) != sorted(base_edges):
            bad = (f"horizontal differential not bijective at vertex "
                   f"{b.total.vertices[q]}")
            break
    rep.add("dpi-bijective", not bad, bad)
    return rep


def verify_fiber_bundle(b: BundleMap) -> Report:
    """All the fiber-bundle axioms, data-driven so mutations are caught."""
    rep = verify_fibration(b)
    for check in verify_gkm(b.total).checks:
        rep.add("total-" + check.name, check.passed, check.witness)
    for check in verify_gkm(b.base).checks:
        rep.add("base-" + check.name, check.passed, check.witness)

    bad = ""
    for eid, beid in b.dpi.items():
        if b.total.edges[eid].label != b.base.edges[beid].label:
            bad = (f"lift {b.total.edge_str(eid)} does not carry the base "
                   f"label {b.base.edges[beid].label}")
            break
    rep.add("lifted-labels", not bad, bad)

    bad = ""
    for eid in range(len(b.total.edges)):
        for e1, e2 in b.total.connection[eid].items():
            if b.edge_class[e1] != b.edge_class[e2]:
                bad = (f"connection along {b.total.edge_str(eid)} mixes "
                       f"vertical and horizontal at {b.total.edge_str(e1)}")
                break
        if bad:
            break
    rep.add("connection-preserves-class", not bad, bad)

    bad = ""
    for eid, beid in b.dpi.items():
        src = b.total.edges[eid].src
        conn = b.total.connection[eid]
        for e1 in b.total.edges_at[src]:
            if b.edge_class[e1] != "h":
                continue
            want = (b.base.connection[beid]).get(b.dpi[e1])
            got = b.dpi.get(conn[e1])
            if want != got:
                bad = (f"horizontal connection over {b.base.edge_str(beid)} "
                       f"is not compatible at {b.total.edge_str(e1)}")
                break
        if bad:
            break
    rep.add("horizontal-connection-compatible", not bad, bad)

    bad = ""
    for beid in range(len(b.base.edges)):
        t = b.transitions.get(beid)
        e = b.base.edges[beid]
        fib_p = b.fiber_vertices(e.src)
        fib_q = b.fiber_vertices(e.dst)
        if t is None:
            bad = f"no transition stored for {b.base.edge_str(beid)}"
            break
        if sorted(t.vmap) != sorted(fib_p) or sorted(t.vmap.values()) != sorted(fib_q):
            bad = f"transition across {b.base.edge_str(beid)} is not a bijection"
            break
        for p in fib_p:
            lifted = b.lift_edge(beid, p)
            if b.total.edges[lifted].dst != t.vmap[p]:
                bad = (f"transition across {b.base.edge_str(beid)} disagrees "
                       f"with path lifting at {b.total.vertices[p]}")
                break
        if bad:
            break
    rep.add("transition-from-lifts", not bad, bad)

    bad = ""
    for beid in range(len(b.base.edges)):
        if bad:
            break
        t = b.transitions.get(beid)
        if t is None:
            continue
        e = b.base.edges[beid]
        for p in b.fiber_vertices(e.src):
            lifted = b.lift_edge(beid, p)
            conn = b.total.connection[lifted]
            for e1 in b.total.edges_at[p]:
                if b.edge_class[e1] != "v":
                    continue
                e2 = conn[e1]
                if (b.total.edges[e2].src != t.vmap[p]
                        or b.total.edges[e2].dst != t.vmap[b.total.edges[e1].dst]):
                    bad = (f"connection along a lift of {b.base.edge_str(beid)} "
                           f"does not follow the transition at "
                           f"{b.total.edge_str(e1)}")
                    break
            if bad:
                break
    rep.add("transition-connection-compatible", not bad, bad)

    bad = ""
    for beid in range(len(b.base.edges)):
        t = b.transitions.get(beid)
        if t is None:
            continue
        try:
            iso = b.transition_iso(beid)
        except Exception as exc:  # broken vmap already reported above
            bad = f"transition across {b.base.edge_str(beid)}: {exc}"
            break
        e = b.base.edges[beid]
        sub_p, _, _ = b.fiber_subgraph(e.src)
        sub_q, _, _ = b.fiber_subgraph(e.dst)
        if not verify_iso(iso, sub_p, sub_q):
            bad = (f"transition across {b.base.edge_str(beid)} is not an "
                   f"isomorphism of labeled fibers")
            break
        alpha = e.label
        for fe in sub_p.edges:
            shifted = iso.apply_form(fe.label) - fe.label
            if shifted.proportional_to(alpha) is None:
                bad = (f"linear part across {b.base.edge_str(beid)} does not "
                       f"shift {fe.label} along {alpha}")
                break
        if bad:
            break
    rep.add("transition-gkm-iso", not bad, bad)
    return rep


# ----------------------------------------------------------------------
# holonomy


@dataclass
class HolonomyGroup:
    base_point: int
    fiber: "CosetGraph | GkmGraph"
    generators: list  # (loop description, GkmIso)
    elements: list  # GkmIso, canonically ordered
    matches_upsilon: bool | None = None

    @property
    def order(self) -> int:
        return len(self.elements)

    def element_keys(self):
        return {iso.key() for iso in self.elements}


def typical_fiber(b: BundleMap) -> CosetGraph:
    if b.rs is None:
        raise ValueError("typical fiber as a coset graph needs Weyl-group data")
    return build_coset_graph(b.rs, b.sigma1, b.sigma2)


def fiber_model_iso(b: BundleMap, p: int, rep: WeylElement | None = None) -> GkmIso:
    """(phi_w, psi_w): typical fiber -> fiber subgraph over base vertex p."""
    fib = typical_fiber(b)
    if rep is None:
        rep = b.base_coset.reps[p]
    elif b.base_coset.vertex_of(rep) != p:
        raise ValueError("representative lies over a different base vertex")
    sub, vmap, _ = b.fiber_subgraph(p)
    phi = tuple(
        vmap[b.total_coset.vertex_of(rep * u)] for u in fib.reps
    )
    return GkmIso(phi, rep.matrix())


def _base_element_lifts(b: BundleMap):
    """BFS factorization data: base vertex -> (element, list of roots).

    The element is a product of reflections in roots outside <Sigma2> and
    lies in the vertex's coset; the root list multiplies left to right.
    """
    rs = b.rs
    base = b.base_coset
    start = base.vertex_of(rs.identity())
    data = {start: (rs.identity(), [])}
    frontier = [start]
    while frontier:
        nxt = []
        for p in frontier:
            w_p, roots_p = data[p]
            rep_p = base.reps[p]
            for eid in base.graph.edges_at[p]:
                q = base.graph.edges[eid].dst
                if q in data:
                    continue
                gamma = base.direction(eid)
                delta = rs.positive_part(
                    w_p.inverse().act_linear(rep_p.act_linear(gamma))
                )
                data[q] = (w_p * rs.reflection(delta), roots_p + [delta])
                nxt.append(q)
        frontier = nxt
    return data


def _sigma2_factorization(b: BundleMap, w: WeylElement):
    """w = u * s_{r1} ... s_{rk} with u in W(Sigma2), r_i outside <Sigma2>."""
    rs = b.rs
    lifts = _base_element_lifts(b)
    p = b.base_coset.vertex_of(w.inverse())
    vtil, roots = lifts[p]
    u = (vtil.inverse() * w.inverse()).inverse()
    vroots = list(reversed(roots))
    # sanity: the factorization really multiplies back to w
    v = rs.identity()
    for r in vroots:
        v = v * rs.reflection(r)
    assert u * v == w
    return u, vroots


def _loop_for_simple(b: BundleMap, base_point: int, i: int):
    """A based loop whose holonomy is left multiplication by s_i (i in Sigma2)."""
    rs = b.rs
    closure2 = set(rs.closure(b.sigma2).roots)
    alpha_i = rs.simple_roots[i - 1]
    chosen = None
    for w in rs.elements():
        img = w.act_linear(alpha_i)
        if rs.is_positive_root(img) and img not in closure2:
            chosen = w
            break
    if chosen is None:
        raise AssertionError("no element throws the simple root out of <Sigma2>")
    u, vroots = _sigma2_factorization(b, chosen)
    delta_mid = rs.positive_part(
        u.inverse().act_linear(chosen.act_linear(alpha_i))
    )
    steps = list(reversed(vroots)) + [delta_mid] + list(vroots)
    return _steps_to_edges(b, base_point, steps)


def _steps_to_edges(b: BundleMap, base_point: int, steps):
    """Convert right multiplications by reflections into base edge ids."""
    rs = b.rs
    base = b.base_coset
    z = base.reps[base_point]
    edges = []
    for delta in steps:
        p = base.vertex_of(z)
        c = base.reps[p].inverse() * z
        gamma = rs.positive_part(c.act_linear(delta))
        edges.append(base.edge_id(p, gamma))
        z = z * rs.reflection(delta)
    assert base.vertex_of(z) == base_point
    return edges


def holonomy_of_loop(b: BundleMap, loop_edges) -> tuple:
    """(vertex map on the start fiber, linear part) of transport around a loop."""
    if not loop_edges:
        raise ValueError("need a non-empty loop")
    cur = {p: p for p in b.fiber_vertices(b.base.edges[loop_edges[0]].src)}
    psi = linalg.identity_matrix(b.total.varcount)
    for beid in loop_edges:
        t = b.transitions[beid]
        cur = {p: t.vmap[q] for p, q in cur.items()}
        psi = linalg.mat_mul(t.psi, psi)
    return cur, psi


def _conjugate_to_typical(b: BundleMap, base_point: int, vmap, psi) -> GkmIso:
    fib = typical_fiber(b)
    rep = b.base_coset.reps[base_point]
    phi = []
    inv = rep.inverse()
    for u in fib.reps:
        total_v = b.total_coset.vertex_of(rep * u)
        image = vmap[total_v]
        phi.append(fib.vertex_of(inv * b.total_coset.reps[image]))
    psi_conj = linalg.mat_mul(
        linalg.mat_mul(inv.matrix(), psi), rep.matrix()
    )
    return GkmIso(tuple(phi), psi_conj)


def _close_group(gens):
    """Finite closure of a set of GkmIso under composition."""
    from .gkmgraph import compose_iso

    n = len(gens[0].phi) if gens else 0
    ident = GkmIso(tuple(range(n)), linalg.identity_matrix(len(gens[0].psi))) \
        if gens else None
    seen = {}
    frontier = []
    if ident is not None:
        seen[ident.key()] = ident
        frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                comp = compose_iso(g, h)
                if comp.key() not in seen:
                    seen[comp.key()] = comp
                    nxt.append(comp)
        frontier = nxt
    return sorted(seen.values(), key=lambda iso: iso.key())


def upsilon_elements(b: BundleMap):
    """Left multiplication by W(Sigma2) on the typical fiber, as iso pairs."""
    rs = b.rs
    fib = typical_fiber(b)
    out = {}
    for w in rs.parabolic_elements(b.sigma2):
        phi = tuple(fib.vertex_of(w * u) for u in fib.reps)
        iso = GkmIso(phi, w.matrix())
        out[iso.key()] = iso
    return sorted(out.values(), key=lambda iso: iso.key())


def _is_complete(g: GkmGraph) -> bool:
    n = g.nvertices
    for p in range(n):
        if {g.edges[eid].dst for eid in g.edges_at[p]} != set(range(n)) - {p}:
            return False
    return True


def holonomy(b: BundleMap, base_point: int | None = None,
             include_triangles: bool = True, check: bool = True) -> HolonomyGroup:
    """Holonomy from explicit generating loops, compared with W(Sigma2).

    One constructive loop per simple root of Sigma2; when the base is a
    complete graph all triangle loops are thrown in as extra generators.
    For coset bundles the computed group is asserted (check=True) to be
    exactly the left-multiplication action of W(Sigma2) on the typical
    fiber.
    """
    if b.rs is None:
        raise ValueError("constructive holonomy needs Weyl-group data; "
                         "use holonomy_exhaustive for raw bundles")
    if base_point is None:
        base_point = b.base_point()
    gens = []
    for i in sorted(b.sigma2):
        loop = _loop_for_simple(b, base_point, i)
        vmap, psi = holonomy_of_loop(b, loop)
        gens.append((loop, _conjugate_to_typical(b, base_point, vmap, psi)))
    if include_triangles and _is_complete(b.base):
        n = b.base.nvertices
        for i in range(n):
            for j in range(n):
                if len({base_point, i, j}) != 3:
                    continue
                loop = [
                    b.base.find_edges(base_point, i)[0],
                    b.base.find_edges(i, j)[0],
                    b.base.find_edges(j, base_point)[0],
                ]
                vmap, psi = holonomy_of_loop(b, loop)
                gens.append((loop, _conjugate_to_typical(b, base_point, vmap, psi)))
    elements = _close_group([iso for _, iso in gens])
    group = HolonomyGroup(base_point, typical_fiber(b), gens, elements)
    ups = upsilon_elements(b)
    group.matches_upsilon = (
        {iso.key() for iso in ups} == group.element_keys()
    )
    if check and not group.matches_upsilon:
        have = group.element_keys()
        want = {iso.key() for iso in ups}
        diff = have.symmetric_difference(want)
        raise AssertionError(
            f"holonomy group differs from the W(Sigma2) action; "
            f"{len(diff)} mismatching elements"
        )
    return group


def holonomy_exhaustive(b: BundleMap, base_point: int = 0, max_len: int = 6,
                        max_base: int = 8) -> HolonomyGroup:
    """Subgroup generated by all based cycles up to a length bound.

    Only guaranteed to exhaust the holonomy group for the coset bundles
    (where it is cross-checked against the constructive generators); for
    arbitrary data it reports the subgroup its cycles happen to generate.
    """
    if b.base.nvertices > max_base:
        raise ValueError("base too large for exhaustive cycle enumeration")
    loops = []

    def extend(path, cur):
        if len(path) >= 1 and cur == base_point:
            loops.append(list(path))
        if len(path) >= max_len:
            return
        for eid in b.base.edges_at[cur]:
            path.append(eid)
            extend(path, b.base.edges[eid].dst)
            path.pop()

    extend([], base_point)
    gens = []
    for loop in loops:
        vmap, psi = holonomy_of_loop(b, loop)
        if b.rs is not None:
            gens.append((loop, _conjugate_to_typical(b, base_point, vmap, psi)))
        else:
            sub, vm, _ = b.fiber_subgraph(base_point)
            phi = tuple(vm[vmap[p]] for p in sorted(vm))
            gens.append((loop, GkmIso(phi, psi)))
    if not gens:
        sub, vm, _ = b.fiber_subgraph(base_point)
        ident = GkmIso(tuple(range(sub.nvertices)),
                       linalg.identity_matrix(b.total.varcount))
        gens = [([], ident)]
    elements = _close_group([iso for _, iso in gens])
    fib = typical_fiber(b) if b.rs is not None else b.fiber_subgraph(base_point)[0]
    return HolonomyGroup(base_point, fib, gens, elements)


# ----------------------------------------------------------------------
# classes


def bundle_to_json(b: BundleMap) -> dict:
    """Bundle serialization: graphs, per-edge classes, and the projection."""
    from .gkmgraph import graph_to_json

    total = graph_to_json(b.total)
    for eid, entry in enumerate(total["edges"]):
        entry["class"] = "vertical" if b.edge_class[eid] == "v" else "horizontal"
    return {
        "total": total,
        "base": graph_to_json(b.base),
        "projection": {
            b.total.vertices[q]: b.base.vertices[b.pi[q]]
            for q in range(b.total.nvertices)
        },
    }


def bundle_from_json(data: dict) -> BundleMap:
    from .gkmgraph import graph_from_json

    total = graph_from_json(data["total"])
    base = graph_from_json(data["base"])
    pi = [
        base.vertex_index(data["projection"][name]) for name in total.vertices
    ]
    return make_bundle(total, base, pi)


def bundle_hash(b: BundleMap) -> str:
    import hashlib
    import json as _json

    text = _json.dumps(bundle_to_json(b), separators=(",", ":"), sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()


def lift_class(b: BundleMap, base_class: CohClass) -> CohClass:
    """Pull a base class up to the total space through the projection."""
    if base_class.graph is not b.base:
        raise ValueError("class does not live on the base")
    vals = [base_class.values[b.pi[q]] for q in range(b.total.nvertices)]
    return CohClass(b.total, vals)
