"""Finite metric groups: quadratic forms q on abelian p-groups, Gauss
sums, the group-algebra Fourier transform, the ribbon element, and
pointed modular data.

A form is stored by its values on generators together with the Gram
matrix of the induced pairing B(x, y) = q(x+y) - q(x) - q(y); for odd p
this data determines q everywhere through the quadratic expansion, and
the construction-time checks confirm q(nx) = n^2 q(x) and the B identity
exhaustively.  All values live in Q_p/Z_p and exponentiate to exact roots
of unity in Q(zeta_{p^K}).
"""

from __future__ import annotations

import itertools
from collections import namedtuple
from fractions import Fraction
from math import isqrt

from .arith import QpModZp, inv_mod, is_prime
from .cyclotomic import CycNumber
from .lazard import conjugate

CHECK_CAP = 4096


class MetricError(ValueError):
    pass


def _as_value(p, v, level_cap):
    if isinstance(v, str):
        v = QpModZp.parse(p, v)
    elif not isinstance(v, QpModZp):
        v = QpModZp.from_fraction(p, v)
    if v.level > level_cap:
        raise MetricError(f"value {v} has level above {level_cap}")
    return v


class MetricGroup:
    """(p, q) with underlying group ⊕_i Z/p^{k_i}, p odd."""

    def __init__(self, p, exponents, q_gens, gram, name="", check=True):
        if not is_prime(p) or p == 2:
            raise MetricError(f"p = {p} must be an odd prime")
        self.p = p
        self.exponents = tuple(int(k) for k in exponents)
        if any(k < 1 for k in self.exponents):
            raise MetricError("exponents must be >= 1")
        self.rank = len(self.exponents)
        self.orders = tuple(p ** k for k in self.exponents)
        self.level = max(self.exponents, default=1)
        self.modulus = p ** self.level
        self.name = name
        if len(q_gens) != self.rank or len(gram) != self.rank:
            raise MetricError("q values and Gram rows must match the rank")
        self.q_gens = tuple(_as_value(p, v, k)
                            for v, k in zip(q_gens, self.exponents))
        self.gram = tuple(
            tuple(_as_value(p, v, min(self.exponents[i], self.exponents[j]))
                  for j, v in enumerate(row))
            for i, row in enumerate(gram))
        lift = lambda v: v.numerator * p ** (self.level - v.level)
        # integer tables at the common level; diagonal of B is forced to 2q
        self._qd = tuple(lift(v) for v in self.q_gens)
        self._b = [[lift(v) for v in row] for row in self.gram]
        for i in range(self.rank):
            for j in range(self.rank):
                if self._b[i][j] != self._b[j][i]:
                    raise MetricError(f"Gram matrix not symmetric at ({i},{j})")
            if self._b[i][i] != 2 * self._qd[i] % self.modulus:
                raise MetricError(
                    f"Gram diagonal at {i} is not 2 q(g_{i})")
        if check:
            self._check_axioms()
        self.nondegenerate = self._kernel_scan()

    def size(self):
        n = 1
        for o in self.orders:
            n *= o
        return n

    def elements(self):
        return itertools.product(*(range(o) for o in self.orders))

    def add(self, x, y):
        return tuple((a + b) % o for a, b, o in zip(x, y, self.orders))

    def neg(self, x):
        return tuple(-a % o for a, o in zip(x, self.orders))

    def scale(self, n, x):
        return tuple(n * a % o for a, o in zip(x, self.orders))

    def q_num(self, x):
        """Numerator of q(x) at the common level."""
        n = sum(a * a * d for a, d in zip(x, self._qd))
        n += sum(x[i] * x[j] * self._b[i][j]
                 for i in range(self.rank) for j in range(i + 1, self.rank))
        return n % self.modulus

    def b_num(self, x, y):
        return sum(x[i] * self._b[i][j] * y[j]
                   for i in range(self.rank)
                   for j in range(self.rank)) % self.modulus

    def q(self, x):
        return QpModZp(self.p, self.q_num(x), self.level)

    def b(self, x, y):
        return QpModZp(self.p, self.b_num(x, y), self.level)

    def qt(self, x):
        return CycNumber.root(self.p, self.level, self.q_num(x))

    def bt(self, x, y):
        return CycNumber.root(self.p, self.level, self.b_num(x, y))

    def _check_axioms(self):
        n = self.size()
        if n > CHECK_CAP:
            raise MetricError(
                f"|p| = {n} too large for exhaustive construction checks")
        exponent = self.modulus
        for x in self.elements():
            qx = self.q_num(x)
            for m in range(exponent):
                if self.q_num(self.scale(m, x)) != m * m * qx % self.modulus:
                    raise MetricError(
                        f"q({m}*{x}) != {m}^2 q({x})")
        for x in self.elements():
            qx = self.q_num(x)
            for y in self.elements():
                want = (self.q_num(self.add(x, y)) - qx - self.q_num(y))
                if self.b_num(x, y) % self.modulus != want % self.modulus:
                    raise MetricError(
                        f"B({x},{y}) != q(x+y) - q(x) - q(y)")

    def _kernel_scan(self):
        gens = [tuple(int(i == j) for j in range(self.rank))
                for i in range(self.rank)]
        for x in self.elements():
            if any(x) and all(self.b_num(x, g) == 0 for g in gens):
                return False
        return True

    def __repr__(self):
        shape = " + ".join(f"Z/{o}" for o in self.orders) or "0"
        return f"MetricGroup({shape}, nondegenerate={self.nondegenerate})"


def gauss_sum(m):
    """Sum of q-tilde over the group; for nondegenerate q the modulus
    identity G conj(G) = |p| is a theorem and is enforced."""
    total = CycNumber.zero(m.p, m.level)
    for x in m.elements():
        total = total + m.qt(x)
    if m.nondegenerate:
        norm = total * total.conj()
        if not (norm.is_rational() and norm.rational_value() == m.size()):
            raise MetricError(
                f"Gauss sum modulus broken: G conj(G) = {norm}, "
                f"expected {m.size()}")
    return total


def _char_exponent(m, b, a):
    """Exponent e with phi_b(a) = zeta_{p^level}^e for the standard
    duality of ⊕ Z/p^{k_i}."""
    return sum(ai * bi * m.p ** (m.level - k)
               for ai, bi, k in zip(a, b, m.exponents)) % m.modulus


def fourier(m, e):
    """Group-algebra element to function on the dual: phi |-> sum of
    coefficient(a) phi(a)^{-1}."""
    out = {}
    for b in m.elements():
        acc = CycNumber.zero(m.p, m.level)
        for a, c in e.items():
            acc = acc + c.mul_root(-_char_exponent(m, b, a))
        out[b] = acc
    return out


def fourier_inverse(m, h):
    """Function on the dual back to the group algebra:
    coefficient(a) = 1/|p| sum over phi of h(phi) phi(a)."""
    n = m.size()
    out = {}
    for a in m.elements():
        acc = CycNumber.zero(m.p, m.level)
        for b, c in h.items():
            acc = acc + c.mul_root(_char_exponent(m, b, a))
        out[a] = acc.scale(Fraction(1, n))
    return out


def ribbon_qhat(m):
    """The central element q-hat, computed along two independent routes.

    (i) closed form: (G/|p|) sum of q̃(a)^{-1} [a];
    (ii) definitional: transport q̃ to the dual through the B-isomorphism
    a -> B(., a) and pull the resulting function back through the inverse
    Fourier transform.  Any disagreement is an internal error.
    """
    if not m.nondegenerate:
        raise MetricError("q-hat needs a nondegenerate form")
    g = gauss_sum(m)
    n = m.size()
    closed = {a: g.mul_root(-m.q_num(a)).scale(Fraction(1, n))
              for a in m.elements()}

    iso = {}
    gens = [tuple(int(i == j) for j in range(m.rank)) for i in range(m.rank)]
    for a in m.elements():
        # b-coordinates of the character B(., a)
        b = tuple(m.b_num(gi, a) // m.p ** (m.level - k) % m.p ** k
                  if m.b_num(gi, a) % m.p ** (m.level - k) == 0 else None
                  for gi, k in zip(gens, m.exponents))
        if any(v is None for v in b):
            raise MetricError(f"B(., {a}) is not a character of the group")
        if b in iso:
            raise MetricError(f"B-isomorphism not injective at {a}")
        iso[b] = a
    if len(iso) != n:
        raise MetricError("B-isomorphism is not onto the dual")
    transported = {b: m.qt(iso[b]) for b in iso}
    definitional = fourier_inverse(m, transported)

    for a in closed:
        if closed[a] != definitional[a]:
            raise RuntimeError(
                f"q-hat paths disagree at {a}: {closed[a]} vs {definitional[a]}")
    return closed


def _matmul(rows_a, rows_b):
    n = len(rows_b)
    cols = len(rows_b[0])
    return [[sum((rows_a[i][l] * rows_b[l][j] for l in range(n)),
                 start=rows_a[i][0].__class__.zero(rows_a[i][0].p,
                                                   rows_a[i][0].m))
             for j in range(cols)] for i in range(len(rows_a))]


def st_matrices(m):
    """Pointed modular data: T = diag(q̃(a)), S = B̃(a, b)^{-1}/Card.

    The inverse in the S entries is what makes all three relations hold
    with T = diag(q̃): with B̃(a, b) itself, (ST)^3 collapses to a scalar
    times the identity rather than S^2.  Requires |p| to be a perfect
    square so the normalization is the integer Card = sqrt(|p|); verifies
    S conj(S) = 1, S^2 = the a -> -a permutation, and
    (ST)^3 = (G/Card) S^2 before returning.
    """
    n = m.size()
    card = isqrt(n)
    if card * card != n:
        raise MetricError(f"|p| = {n} is not a perfect square")
    if not m.nondegenerate:
        raise MetricError("modular data needs a nondegenerate form")
    elems = list(m.elements())
    idx = {a: i for i, a in enumerate(elems)}
    zero = CycNumber.zero(m.p, m.level)
    scale = Fraction(1, card)
    s_rows = [[CycNumber.root(m.p, m.level, -m.b_num(a, b)).scale(scale)
               for b in elems] for a in elems]
    t_rows = [[m.qt(a) if i == j else zero for j, a in enumerate(elems)]
              for i, _ in enumerate(elems)]

    ident = [[CycNumber.one(m.p, m.level) if i == j else zero
              for j in range(n)] for i in range(n)]
    sbar = [[v.conj() for v in row] for row in s_rows]
    if _matmul(s_rows, sbar) != ident:
        raise MetricError("S conj(S) != identity")
    s2 = _matmul(s_rows, s_rows)
    perm = [[CycNumber.one(m.p, m.level)
             if idx[m.neg(a)] == j else zero
             for j in range(n)] for a in elems]
    if s2 != perm:
        raise MetricError("S^2 is not the negation permutation")
    st = _matmul(s_rows, t_rows)
    st3 = _matmul(_matmul(st, st), st)
    g = gauss_sum(m).scale(scale)
    want = [[g * v for v in row] for row in s2]
    if st3 != want:
        raise MetricError("(ST)^3 != (G/Card) S^2")
    return s_rows, t_rows


def isotropic_subgroups(m, max_size=None):
    """All subgroups on which q vanishes identically, grown by adjoining
    q-null elements orthogonal to the current generators."""
    target = max_size or m.size()
    zero = tuple(0 for _ in range(m.rank))
    nulls = [x for x in m.elements() if m.q_num(x) == 0]
    seen = {frozenset([zero]): []}
    frontier = [(frozenset([zero]), [])]
    while frontier:
        nxt = []
        for span, gens in frontier:
            if len(span) >= target:
                continue
            for y in nulls:
                if y in span or any(m.b_num(y, g) for g in gens):
                    continue
                new = set(span)
                for s in span:
                    v = s
                    for _ in range(1, m.modulus):
                        v = m.add(v, y)
                        new.add(v)
                key = frozenset(new)
                if key not in seen:
                    seen[key] = gens + [y]
                    nxt.append((key, gens + [y]))
        frontier = nxt
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def lagrangians(m):
    """Subgroups with q = 0 and |a|^2 = |p|; with nondegenerate q these
    are exactly the self-orthogonal ones."""
    n = m.size()
    card = isqrt(n)
    if card * card != n:
        return []
    return [s for s in isotropic_subgroups(m, max_size=card)
            if len(s) == card]


SearchResult = namedtuple("SearchResult", ["forms", "complete", "candidates"])


def search_invariant_forms(ring, cap=200000):
    """Conjugation-invariant nondegenerate forms on a Lie ring's additive
    group that vanish on some Lagrangian ideal.

    Enumerates symmetric Gram matrices at level k (the diagonal determines
    q since p is odd); a candidate survives when the Gram is invertible
    mod p, invariant under Ad(Exp(e_t)) for every basis generator, and
    kills a Lie ideal of square-root order.  Survivors are rebuilt with
    the full exhaustive checks.  complete=True means the whole candidate
    space was scanned.
    """
    if ring.size() > ring.p ** 4:
        raise MetricError(
            f"|p| = {ring.size()} exceeds the search cap {ring.p ** 4}")
    n, pk, p = ring.rank, ring.pk, ring.p
    entries = n * (n + 1) // 2
    total = pk ** entries
    if total > cap:
        raise MetricError(f"{total} candidate forms exceed the cap {cap}")

    conj_mats = []
    for t in range(n):
        cols = [conjugate(ring, ring.basis(t), ring.basis(j)) for j in range(n)]
        conj_mats.append([[cols[j][i] for j in range(n)] for i in range(n)])

    ideals = _square_root_ideals(ring)
    if not ideals:
        return SearchResult([], True, total)
    inv2 = inv_mod(2, pk)
    found = []
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    for combo in itertools.product(range(pk), repeat=entries):
        gram = [[0] * n for _ in range(n)]
        for (i, j), v in zip(pairs, combo):
            gram[i][j] = gram[j][i] = v
        if not _unit_det(gram, p, pk):
            continue
        if not all(_gram_invariant(gram, c, pk) for c in conj_mats):
            continue
        qd = [gram[i][i] * inv2 % pk for i in range(n)]
        if not any(_vanishes_on(gram, qd, members, pk)
                   for members in ideals):
            continue
        q_gens = [QpModZp(p, v, ring.k) for v in qd]
        b_rows = [[QpModZp(p, gram[i][j], ring.k) for j in range(n)]
                  for i in range(n)]
        mg = MetricGroup(p, [ring.k] * n, q_gens, b_rows,
                         name=f"invariant on {ring.name}")
        if mg.nondegenerate:
            found.append(mg)
    return SearchResult(found, True, total)


def _unit_det(gram, p, pk):
    n = len(gram)
    a = [row[:] for row in gram]
    det = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] % p), None)
        if piv is None:
            return False
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c] % pk
        inv = inv_mod(a[c][c], pk)
        for i in range(c + 1, n):
            f = a[i][c] * inv % pk
            a[i] = [(x - f * y) % pk for x, y in zip(a[i], a[c])]
    return det % p != 0


def _gram_invariant(gram, conj, pk):
    n = len(gram)
    for i in range(n):
        for j in range(i, n):
            v = sum(conj[l][i] * gram[l][s] * conj[s][j]
                    for l in range(n) for s in range(n)) % pk
            if v != gram[i][j] % pk:
                return False
    return True


def _square_root_ideals(ring):
    """Element sets of Lie ideals a with |a|^2 = |ring|, found by closure
    growth inside the additive group."""
    total = ring.size()
    card = isqrt(total)
    if card * card != total:
        return []
    zero = ring.zero()
    basis = [ring.basis(i) for i in range(ring.rank)]
    seen = {frozenset([zero])}
    frontier = [frozenset([zero])]
    ideals = []
    while frontier:
        nxt = []
        for span in frontier:
            if len(span) >= card:
                if len(span) == card and all(
                        ring.bracket(b, x) in span
                        for b in basis for x in span):
                    ideals.append(sorted(span))
                continue
            for y in ring.elements():
                if y in span:
                    continue
                new = set(span)
                for s in span:
                    v = s
                    for _ in range(1, ring.pk):
                        v = ring.add(v, y)
                        new.add(v)
                key = frozenset(new)
                if key not in seen:
                    seen.add(key)
                    nxt.append(key)
        frontier = nxt
    return sorted(ideals)


def _vanishes_on(gram, qd, members, pk):
    n = len(gram)
    for x in members:
        v = sum(x[i] * x[i] * qd[i] for i in range(n))
        v += sum(x[i] * x[j] * gram[i][j]
                 for i in range(n) for j in range(i + 1, n))
        if v % pk:
            return False
    return True


# plain-text serialization for metric-group files

def serialize_metric(m):
    lines = [f"metric {m.name or 'unnamed'}",
             f"p {m.p}",
             "type " + " ".join(str(k) for k in m.exponents),
             "q " + " ".join(str(v) for v in m.q_gens)]
    for row in m.gram:
        lines.append("B " + " ".join(str(v) for v in row))
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_metric(text):
    lines = [ln.strip() for ln in text.splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or not lines[0].startswith("metric"):
        raise ValueError("metric file must start with a 'metric' line")
    name = lines[0].split(maxsplit=1)[1] if " " in lines[0] else "unnamed"
    p = None
    exponents = None
    q_gens = None
    b_rows = []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "end":
            break
        if parts[0] == "p":
            p = int(parts[1])
        elif parts[0] == "type":
            exponents = [int(v) for v in parts[1:]]
        elif parts[0] == "q":
            q_gens = parts[1:]
        elif parts[0] == "B":
            b_rows.append(parts[1:])
        else:
            raise ValueError(f"unknown line {ln!r}")
    else:
        raise ValueError("missing 'end' line")
    if p is None or exponents is None or q_gens is None:
        raise ValueError("missing p, type, or q line")
    return MetricGroup(p, exponents, q_gens, b_rows, name=name)
