"""Equivariant Schubert classes via the nilCoxeter product formula.

The nilCoxeter ring has one generator per simple reflection, squaring to
zero and satisfying the braid relations, with basis u_w indexed by the
Weyl group: u_w u_v = u_{wv} when lengths add and 0 otherwise.  For a
reduced word w = s_{i_1} ... s_{i_r} set

    H_w = (1 + a_1 u_{i_1}) (1 + a_2 u_{i_2}) ... (1 + a_r u_{i_r}),
    a_k = s_{i_1} ... s_{i_{k-1}} (alpha_{i_k}),

a product that does not depend on the chosen word.  Expanding it in the
u-basis produces, all at once, the column of Schubert-class values at w:
the coefficient of u_v is tau_v(w), the value at w of the unique class of
degree 2*len(v) supported on the Bruhat up-set of v and normalized at v
by the product of its inversion roots.  Reversing the factors with
negated arguments inverts H_w, which is where the alternating formula
and the transition matrices between permuted Schubert bases come from.

The Weyl group acts on classes by f^w(v) = w^{-1} f(wv); averaging over
the group symmetrizes a class, and the change of basis from symmetrized
Schubert classes back to Schubert classes is unitriangular for the weak
left order.  Divided differences decompose any invariant class c_T(f),
f a polynomial, with coefficient (-1)^len(w) * partial_w(f) on tau_w.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .gkmgraph import CohClass
from .parabolic import CosetGraph, build_coset_graph
from .polyring import LinearForm, Polynomial
from .rootsys import RootSystem, WeylElement

__all__ = [
    "NilCoxElt",
    "SchubertTable",
    "TransitionMatrix",
    "flag_graph",
    "nilcox_one",
    "nilcox_generator",
    "H",
    "H_inv",
    "schubert_table",
    "key_identity_check",
    "permuted_class",
    "symmetrize",
    "transition_matrices",
    "symmetrized_matrix",
    "divided_difference",
    "partial_w",
    "sign_of",
    "invariant_class",
    "invariant_decomposition",
    "reassemble",
    "seeded_random_class",
    "invariant_table_tsv",
    "schubert_table_tsv",
    "matrix_to_json",
]


def flag_graph(rs: RootSystem) -> CosetGraph:
    """The full graph on W (vertices = group elements), cached on rs."""
    return build_coset_graph(rs, frozenset(), rs.full_sigma())


class NilCoxElt:
    """A finitely supported map from the Weyl group to polynomials."""

    __slots__ = ("rs", "coeffs")

    def __init__(self, rs: RootSystem, coeffs: dict | None = None):
        self.rs = rs
        clean = {}
        if coeffs:
            for w, c in coeffs.items():
                if not c.is_zero():
                    clean[w] = c
        self.coeffs = clean

    def __add__(self, other: "NilCoxElt") -> "NilCoxElt":
        self._check(other)
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            s = out.get(w)
            out[w] = c if s is None else s + c
        return NilCoxElt(self.rs, out)

    def __mul__(self, other) -> "NilCoxElt":
        if isinstance(other, Polynomial):
            return NilCoxElt(self.rs, {w: c * other for w, c in self.coeffs.items()})
        self._check(other)
        rs = self.rs
        out: dict = {}
        for w1, c1 in self.coeffs.items():
            l1 = rs.length(w1)
            for w2, c2 in other.coeffs.items():
                if rs.length(w2) + l1 != rs.length(w1 * w2):
                    continue
                w = w1 * w2
                c = c1 * c2
                s = out.get(w)
                out[w] = c if s is None else s + c
        return NilCoxElt(self.rs, out)

    def act(self, w: WeylElement) -> "NilCoxElt":
        """Apply w to every coefficient (the basis elements are untouched)."""
        return NilCoxElt(self.rs, {v: w.act_poly(c) for v, c in self.coeffs.items()})

    def coefficient(self, w: WeylElement) -> Polynomial:
        return self.coeffs.get(w, Polynomial.zero(self.rs.varcount))

    def _check(self, other):
        if not isinstance(other, NilCoxElt) or other.rs is not self.rs:
            raise ValueError("nilCoxeter elements over different groups")

    def __eq__(self, other):
        return (
            isinstance(other, NilCoxElt)
            and other.rs is self.rs
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        if not self.coeffs:
            return "NilCox(0)"
        parts = [
            f"({c})*u[{w.one_line_str()}]"
            for w, c in sorted(self.coeffs.items(), key=lambda kv: self.rs.sort_key(kv[0]))
        ]
        return "NilCox(" + " + ".join(parts) + ")"


def nilcox_one(rs: RootSystem) -> NilCoxElt:
    return NilCoxElt(rs, {rs.identity(): Polynomial.one(rs.varcount)})


def nilcox_generator(rs: RootSystem, i: int, form: LinearForm) -> NilCoxElt:
    """h_i(x) = 1 + x*u_i for a linear form x (central over the generators)."""
    return NilCoxElt(rs, {
        rs.identity(): Polynomial.one(rs.varcount),
        rs.simple_reflection(i): form.to_polynomial(),
    })


def H(rs: RootSystem, w: WeylElement, word=None) -> NilCoxElt:
    """The distinguished invertible element whose u_v coefficients are tau_v(w)."""
    if word is None:
        word = rs.reduced_word(w)
    elif rs.from_word(word) != w or len(word) != rs.length(w):
        raise ValueError("not a reduced word for w")
    out = nilcox_one(rs)
    prefix = rs.identity()
    for i in word:
        arg = prefix.act_linear(rs.simple_roots[i - 1])
        out = out * nilcox_generator(rs, i, arg)
        prefix = prefix * rs.simple_reflection(i)
    return out


def H_inv(rs: RootSystem, w: WeylElement, word=None) -> NilCoxElt:
    """Inverse of H(w): the reversed product with negated arguments."""
    if word is None:
        word = rs.reduced_word(w)
    elif rs.from_word(word) != w or len(word) != rs.length(w):
        raise ValueError("not a reduced word for w")
    args = []
    prefix = rs.identity()
    for i in word:
        args.append((i, prefix.act_linear(rs.simple_roots[i - 1])))
        prefix = prefix * rs.simple_reflection(i)
    out = nilcox_one(rs)
    for i, arg in reversed(args):
        out = out * nilcox_generator(rs, i, -arg)
    return out


class SchubertTable:
    """All values tau_u(w) for one Weyl group, plus class accessors."""

    def __init__(self, rs: RootSystem):
        self.rs = rs
        self.flag = flag_graph(rs)
        self.order = list(rs.elements())
        self.values: dict = {u: {} for u in self.order}
        for w in self.order:
            hw = H(rs, w)
            for u in self.order:
                self.values[u][w] = hw.coefficient(u)

    def tau_value(self, u: WeylElement, w: WeylElement) -> Polynomial:
        return self.values[u][w]

    def tau(self, u: WeylElement) -> CohClass:
        vals = [self.values[u][w] for w in self.flag.reps]
        return CohClass(self.flag.graph, vals)

    def classes(self) -> dict:
        return {u: self.tau(u) for u in self.order}


def schubert_table(rs: RootSystem) -> SchubertTable:
    cached = getattr(rs, "_schubert_table", None)
    if cached is None:
        cached = SchubertTable(rs)
        rs._schubert_table = cached
    return cached


def key_identity_check(rs: RootSystem, pairs=None):
    """Does H(w*v) == H(w) * (w applied to H(v)) on the given pairs?

    Returns (ok, first bad pair or None).  Defaults to all pairs.
    """
    elems = rs.elements()
    if pairs is None:
        pairs = [(w, v) for w in elems for v in elems]
    hcache = {w: H(rs, w) for w in {x for p in pairs for x in p}}
    for w, v in pairs:
        if H(rs, w * v) != hcache[w] * hcache[v].act(w):
            return False, (w, v)
    return True, None


# ----------------------------------------------------------------------
# the group action on classes


def permuted_class(rs: RootSystem, c: CohClass, w: WeylElement) -> CohClass:
    """f^w(v) = w^{-1} f(wv), a class again on the full flag graph."""
    flag = flag_graph(rs)
    if c.graph is not flag.graph:
        raise ValueError("class does not live on the flag graph")
    winv = w.inverse()
    vals = [
        winv.act_poly(c.values[flag.vertex_of(w * v)]) for v in flag.reps
    ]
    return CohClass(flag.graph, vals)


def symmetrize(rs: RootSystem, c: CohClass) -> CohClass:
    """Average the permuted classes f^w over the whole group."""
    flag = flag_graph(rs)
    acc = [Polynomial.zero(rs.varcount)] * flag.nvertices
    for w in rs.elements():
        cw = permuted_class(rs, c, w)
        acc = [a + b for a, b in zip(acc, cw.values)]
    scale = Fraction(1, len(rs.elements()))
    return CohClass(flag.graph, [a.scale(scale) for a in acc])


@dataclass
class TransitionMatrix:
    """Square matrix over the polynomial ring indexed by group elements."""

    rs: RootSystem
    order: tuple
    entries: dict  # (u, v) -> Polynomial, zeros omitted

    def entry(self, u, v) -> Polynomial:
        return self.entries.get((u, v), Polynomial.zero(self.rs.varcount))

    def __matmul__(self, other: "TransitionMatrix") -> "TransitionMatrix":
        out = {}
        for u in self.order:
            for v in other.order:
                acc = Polynomial.zero(self.rs.varcount)
                for t in self.order:
                    a = self.entries.get((u, t))
                    b = other.entries.get((t, v))
                    if a is not None and b is not None:
                        acc = acc + a * b
                if not acc.is_zero():
                    out[(u, v)] = acc
        return TransitionMatrix(self.rs, self.order, out)

    def is_identity(self) -> bool:
        one = Polynomial.one(self.rs.varcount)
        for u in self.order:
            for v in self.order:
                want = one if u == v else None
                got = self.entries.get((u, v))
                if want is None and got is not None:
                    return False
                if want is not None and got != want:
                    return False
        return True

    def is_unitriangular_weak_left(self) -> bool:
        one = Polynomial.one(self.rs.varcount)
        for (u, v), val in self.entries.items():
            if u == v:
                if val != one:
                    return False
            elif not self.rs.weak_left_leq(v, u):
                return False
        return True


def transition_matrices(rs: RootSystem, w: WeylElement, table: SchubertTable | None = None):
    """The pair (a^w, b^w) relating permuted and plain Schubert bases.

    a^w expresses tau_u^w in the tau basis with entries
    (-1)^len(v u^-1) tau_{v u^-1}(w^-1) for v weakly below u, and b^w is
    its inverse, with entries tau_{u v^-1}(w^-1).
    """
    table = table or schubert_table(rs)
    winv = w.inverse()
    order = tuple(table.order)
    a_entries = {}
    b_entries = {}
    for u in order:
        for v in order:
            if not rs.weak_left_leq(v, u):
                continue
            t = v * u.inverse()
            val = table.tau_value(t, winv)
            if not val.is_zero():
                sgn = -1 if rs.length(t) % 2 else 1
                a_entries[(u, v)] = val.scale(sgn)
            t2 = u * v.inverse()
            val2 = table.tau_value(t2, winv)
            if not val2.is_zero():
                b_entries[(u, v)] = val2
    return (
        TransitionMatrix(rs, order, a_entries),
        TransitionMatrix(rs, order, b_entries),
    )


def symmetrized_matrix(rs: RootSystem, table: SchubertTable | None = None) -> TransitionMatrix:
    """Average of the a^w over the group: tau_u^sym = sum_v a_{u,v} tau_v."""
    table = table or schubert_table(rs)
    order = tuple(table.order)
    acc: dict = {}
    for w in rs.elements():
        aw, _ = transition_matrices(rs, w, table)
        for key, val in aw.entries.items():
            cur = acc.get(key)
            acc[key] = val if cur is None else cur + val
    scale = Fraction(1, len(rs.elements()))
    return TransitionMatrix(
        rs, order,
        {k: v.scale(scale) for k, v in acc.items() if not v.scale(scale).is_zero()},
    )


# ----------------------------------------------------------------------
# divided differences and invariant classes


def divided_difference(rs: RootSystem, f: Polynomial, i: int) -> Polynomial:
    """(f - s_i f) / alpha_i; the division is always exact."""
    si = rs.simple_reflection(i)
    num = f - si.act_poly(f)
    q, r = num.divrem_linear(rs.simple_roots[i - 1])
    if not r.is_zero():
        raise ArithmeticError("divided difference left a remainder")
    return q


def partial_w(rs: RootSystem, f: Polynomial, w: WeylElement | None = None, word=None) -> Polynomial:
    """Compose divided differences along a reduced word of w."""
    if word is None:
        if w is None:
            raise ValueError("need w or a word")
        word = rs.reduced_word(w)
    for i in reversed(word):
        f = divided_difference(rs, f, i)
    return f


def sign_of(rs: RootSystem, w: WeylElement) -> int:
    return -1 if rs.length(w) % 2 else 1


def invariant_class(rs: RootSystem, f: Polynomial) -> CohClass:
    """c_T(f): the invariant class v -> v . f on the full flag graph."""
    flag = flag_graph(rs)
    return CohClass(flag.graph, [v.act_poly(f) for v in flag.reps])


def invariant_decomposition(rs: RootSystem, f: Polynomial) -> dict:
    """Coefficients of c_T(f) on the Schubert basis: w -> sign * partial_w f."""
    out = {}
    for w in rs.elements():
        coeff = partial_w(rs, f, w)
        if not coeff.is_zero():
            coeff = coeff.scale(sign_of(rs, w))
            out[w] = coeff
    return out


def reassemble(rs: RootSystem, coeffs: dict, table: SchubertTable | None = None) -> CohClass:
    """sum_w coeffs[w] * tau_w as a class on the flag graph."""
    table = table or schubert_table(rs)
    flag = table.flag
    vals = [Polynomial.zero(rs.varcount) for _ in range(flag.nvertices)]
    for w, coeff in coeffs.items():
        for p, v in enumerate(flag.reps):
            vals[p] = vals[p] + coeff * table.tau_value(w, v)
    return CohClass(flag.graph, vals)


def seeded_random_class(rs: RootSystem, degree: int, rng,
                        table: SchubertTable | None = None) -> CohClass:
    """A reproducible random class: a polynomial combination of tau's.

    Homogeneous of the requested degree; coefficients are random small
    integers on random monomials, so the result is a genuine class by
    construction.
    """
    table = table or schubert_table(rs)
    coeffs = {}
    for u in table.order:
        rem = degree - rs.length(u)
        if rem < 0:
            continue
        terms = {}
        for _ in range(rng.randint(1, 2)):
            exps = [0] * rs.varcount
            for _ in range(rem):
                exps[rng.randrange(rs.varcount)] += 1
            c = rng.randint(-3, 3)
            if c:
                terms[tuple(exps)] = terms.get(tuple(exps), 0) + c
        poly = Polynomial(rs.varcount, {e: Fraction(c) for e, c in terms.items() if c})
        if not poly.is_zero():
            coeffs[u] = poly
    if not coeffs:
        coeffs[rs.identity()] = Polynomial.one(rs.varcount)
    return reassemble(rs, coeffs, table)


# ----------------------------------------------------------------------
# emitters


def _row_labels(rs: RootSystem, w: WeylElement):
    return rs.word_str(w), w.one_line_str()


def invariant_table_tsv(rs: RootSystem, indices) -> str:
    """Rows = group elements, columns = c_I values; layout of the worked tables."""
    names = ["c[" + ",".join(str(i) for i in I) + "]" for I in indices]
    lines = ["\t".join(["word", "one_line"] + names)]
    monos = []
    for I in indices:
        exps = list(I) + [0] * (rs.varcount - len(I))
        monos.append(Polynomial.monomial(rs.varcount, exps))
    for w in rs.elements():
        word, one = _row_labels(rs, w)
        cells = [str(w.act_poly(m)) for m in monos]
        lines.append("\t".join([word, one] + cells))
    return "\n".join(lines) + "\n"


def schubert_table_tsv(rs: RootSystem, table: SchubertTable | None = None) -> str:
    """Rows = evaluation points w, columns = Schubert classes tau_u."""
    table = table or schubert_table(rs)
    names = ["tau[" + u.one_line_str() + "]" for u in table.order]
    lines = ["\t".join(["word", "one_line"] + names)]
    for w in table.order:
        word, one = _row_labels(rs, w)
        cells = [str(table.tau_value(u, w)) for u in table.order]
        lines.append("\t".join([word, one] + cells))
    return "\n".join(lines) + "\n"


def matrix_to_json(mat: TransitionMatrix) -> dict:
    return {
        "order": [u.one_line_str() for u in mat.order],
        "entries": {
            f"{u.one_line_str()};{v.one_line_str()}": str(val)
            for (u, v), val in sorted(
                mat.entries.items(),
                key=lambda kv: (mat.rs.sort_key(kv[0][0]), mat.rs.sort_key(kv[0][1])),
            )
        },
    }
