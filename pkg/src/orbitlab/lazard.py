"""Finite nilpotent Lie rings over Z/p^k and their exponential groups.

A ring is given by structure constants on a free Z/p^k-module of finite
rank.  When the nilpotency class c satisfies c < p, the truncated BCH
series has all its denominators invertible mod p^k, so the same coordinate
tuples carry both the ring and the group Exp(ring); exp_mul evaluates the
group law and log_group recovers the ring operations from a black-box
multiplication on the same carrier.
"""

from __future__ import annotations

import itertools
from math import factorial

import numpy as np

from .arith import Modulus, ModMatrix, howell, inv_mod, mat_inverse, member, reduce_mod_span, span_size
from .freelie import bch, tree_degree

MAX_CLASS = 6


class LazardError(ValueError):
    pass


def _vec(ring, v):
    t = tuple(int(c) % ring.pk for c in v)
    if len(t) != ring.rank:
        raise ValueError(f"expected {ring.rank} coordinates, got {len(t)}")
    return t


class LieRing:
    """Nilpotent Lie ring of finite rank over Z/p^k with class < p.

    brackets maps 0-based basis pairs (i, j) with i < j to the coordinate
    vector of [e_i, e_j]; omitted pairs commute.  Construction checks
    antisymmetry conventions are consistent, verifies the Jacobi identity
    on all basis triples, computes the lower central series, and rejects
    rings whose class is >= p or > MAX_CLASS.
    """

    def __init__(self, p, k, rank, brackets, name="unnamed", check=True):
        self.modulus = Modulus(p, k)
        self.p = p
        self.k = k
        self.pk = self.modulus.pk
        if rank < 1:
            raise ValueError("rank must be positive")
        self.rank = rank
        self.name = name
        table = [[(0,) * rank for _ in range(rank)] for _ in range(rank)]
        for (i, j), v in brackets.items():
            if not 0 <= i < j < rank:
                raise ValueError(f"bad bracket pair ({i}, {j})")
            w = tuple(int(c) % self.pk for c in v)
            if len(w) != rank:
                raise ValueError(f"bracket ({i}, {j}) has wrong length")
            table[i][j] = w
            table[j][i] = tuple(-c % self.pk for c in w)
        self.table = tuple(tuple(row) for row in table)
        self.tensor = np.array(self.table, dtype=np.int64)
        if check:
            self._check_jacobi()
        self.lcs = self._lower_central_series()
        self.cls = len(self.lcs)
        if self.cls >= p:
            raise LazardError(
                f"nilpotency class {self.cls} is not < p = {p}; "
                "the Lazard correspondence does not apply")
        if self.cls > MAX_CLASS:
            raise LazardError(f"class {self.cls} exceeds supported bound {MAX_CLASS}")
        self._bch_table = None
        self._exp_ad_coeffs = None

    # vector arithmetic on coordinate tuples

    def zero(self):
        return (0,) * self.rank

    def add(self, x, y):
        return tuple((a + b) % self.pk for a, b in zip(x, y))

    def neg(self, x):
        return tuple(-a % self.pk for a in x)

    def sub(self, x, y):
        return tuple((a - b) % self.pk for a, b in zip(x, y))

    def scale(self, m, x):
        return tuple(m * a % self.pk for a in x)

    def basis(self, i):
        return tuple(int(i == j) for j in range(self.rank))

    def bracket(self, x, y):
        pk = self.pk
        out = [0] * self.rank
        for i, a in enumerate(x):
            if not a:
                continue
            row = self.table[i]
            for j, b in enumerate(y):
                if not b:
                    continue
                c = row[j]
                ab = a * b
                for l, cl in enumerate(c):
                    if cl:
                        out[l] = (out[l] + ab * cl) % pk
        return tuple(out)

    def elements(self):
        """All coordinate tuples in lexicographic order."""
        return itertools.product(range(self.pk), repeat=self.rank)

    def size(self):
        return self.pk ** self.rank

    def random_element(self, rng):
        return tuple(rng.randrange(self.pk) for _ in range(self.rank))

    def _check_jacobi(self):
        n = self.rank
        for i in range(n):
            for j in range(i + 1, n):
                for l in range(j + 1, n):
                    ei, ej, el = self.basis(i), self.basis(j), self.basis(l)
                    s = self.add(
                        self.bracket(self.bracket(ei, ej), el),
                        self.add(self.bracket(self.bracket(ej, el), ei),
                                 self.bracket(self.bracket(el, ei), ej)))
                    if any(s):
                        raise ValueError(
                            f"Jacobi identity fails on basis triple ({i}, {j}, {l})")

    def _lower_central_series(self):
        """Howell generators of L_1 > L_2 > ... down to the last nonzero term."""
        mod = self.modulus
        series = []
        current = howell([list(self.basis(i)) for i in range(self.rank)], mod)
        while current:
            series.append(current)
            nxt = [list(self.bracket(self.basis(i), tuple(v)))
                   for i in range(self.rank) for v in current]
            current = howell(nxt, mod)
            if current == series[-1]:
                raise LazardError("lower central series does not terminate")
        return series

    def __eq__(self, other):
        return (isinstance(other, LieRing)
                and (self.p, self.k, self.rank) == (other.p, other.k, other.rank)
                and self.table == other.table)

    def __repr__(self):
        return (f"LieRing({self.name!r}, p={self.p}, k={self.k}, "
                f"rank={self.rank}, class={self.cls})")


def validate(ring):
    """Re-run the construction checks and report the ring's shape."""
    LieRing(ring.p, ring.k, ring.rank,
            {(i, j): ring.table[i][j]
             for i in range(ring.rank) for j in range(i + 1, ring.rank)},
            name=ring.name)
    return {
        "name": ring.name,
        "p": ring.p,
        "k": ring.k,
        "rank": ring.rank,
        "class": ring.cls,
        "order": ring.size(),
        "lcs_sizes": [span_size(term, ring.modulus) for term in ring.lcs],
        "condition": f"class {ring.cls} < p = {ring.p}",
    }


# group law by specialization of the BCH series

def _bch_table(ring):
    if ring._bch_table is None:
        series = bch(ring.cls)
        pk = ring.pk
        table = []
        for tree, coeff in sorted(series.coeffs.items(),
                                  key=lambda it: (tree_degree(it[0]), str(it[0]))):
            c = coeff.numerator * inv_mod(coeff.denominator, pk) % pk
            if c:
                table.append((tree, c))
        ring._bch_table = table
    return ring._bch_table


def _eval_tree(ring, tree, x, y, memo):
    val = memo.get(tree)
    if val is None:
        left, right = tree
        val = ring.bracket(_eval_tree(ring, left, x, y, memo),
                           _eval_tree(ring, right, x, y, memo))
        memo[tree] = val
    return val


def exp_mul(ring, x, y):
    """Product Exp(x) Exp(y) in exponential coordinates."""
    x, y = _vec(ring, x), _vec(ring, y)
    if ring.cls == 1:
        return ring.add(x, y)
    memo = {0: x, 1: y}
    out = (0,) * ring.rank
    for tree, c in _bch_table(ring):
        out = ring.add(out, ring.scale(c, _eval_tree(ring, tree, x, y, memo)))
    return out


def exp_inv(ring, x):
    """Inverse of Exp(x) is Exp(-x): the BCH series of (x, -x) collapses."""
    return ring.neg(_vec(ring, x))


def exp_pow(ring, x, m):
    """Exp(x)^m = Exp(m x); powers of one element stay on one line."""
    return ring.scale(int(m), _vec(ring, x))


def _exp_ad_coeffs(ring):
    if ring._exp_ad_coeffs is None:
        ring._exp_ad_coeffs = [inv_mod(factorial(n), ring.pk) % ring.pk
                               for n in range(ring.cls)]
    return ring._exp_ad_coeffs


def conjugate(ring, g, x):
    """Coordinates of Exp(g) Exp(x) Exp(g)^-1.

    Evaluates both the multiplicative route g*x*(-g) and the truncated
    exponential of ad_g; the two must agree for a correct BCH table, so
    disagreement is an internal error rather than bad input.
    """
    g, x = _vec(ring, g), _vec(ring, x)
    via_mul = exp_mul(ring, exp_mul(ring, g, x), ring.neg(g))
    term = x
    via_ad = (0,) * ring.rank
    for c in _exp_ad_coeffs(ring):
        via_ad = ring.add(via_ad, ring.scale(c, term))
        term = ring.bracket(g, term)
    if via_mul != via_ad:
        raise RuntimeError(
            f"conjugation routes disagree at g={g}, x={x}: "
            f"{via_mul} vs {via_ad}")
    return via_mul


# vectorized versions for bulk checks; rows of X, Y are coordinate tuples

def batch_bracket(ring, X, Y):
    return np.einsum("ai,aj,ijl->al", X, Y, ring.tensor) % ring.pk


def batch_exp_mul(ring, X, Y):
    X = np.asarray(X, dtype=np.int64) % ring.pk
    Y = np.asarray(Y, dtype=np.int64) % ring.pk
    out = (X + Y) % ring.pk
    if ring.cls == 1:
        return out
    memo = {0: X, 1: Y}

    def ev(tree):
        val = memo.get(tree)
        if val is None:
            val = batch_bracket(ring, ev(tree[0]), ev(tree[1]))
            memo[tree] = val
        return val

    for tree, c in _bch_table(ring):
        if tree_degree(tree) == 1:
            continue
        out = (out + c * ev(tree)) % ring.pk
    return out


def batch_conjugate(ring, G, X):
    G = np.asarray(G, dtype=np.int64) % ring.pk
    term = np.asarray(X, dtype=np.int64) % ring.pk
    out = np.zeros_like(term)
    for c in _exp_ad_coeffs(ring):
        out = (out + c * term) % ring.pk
        term = batch_bracket(ring, G, term)
    return out


def all_elements(ring):
    """(|G|, rank) array of every coordinate tuple, lexicographic."""
    return np.array(list(ring.elements()), dtype=np.int64)


def check_exp_associative(ring, samples=10000, seed=0, exhaustive_limit=32768):
    """Compare (x*y)*z with x*(y*z); exhaustive when |G|^3 is small.

    Returns (number of triples checked, exhaustive flag); raises with a
    witness triple on any defect.
    """
    n = ring.size()
    if n ** 3 <= exhaustive_limit:
        elems = all_elements(ring)
        idx = np.indices((n, n, n)).reshape(3, -1)
        X, Y, Z = elems[idx[0]], elems[idx[1]], elems[idx[2]]
        exhaustive = True
    else:
        rng = np.random.default_rng(seed)
        X, Y, Z = (rng.integers(0, ring.pk, size=(samples, ring.rank), dtype=np.int64)
                   for _ in range(3))
        exhaustive = False
    left = batch_exp_mul(ring, batch_exp_mul(ring, X, Y), Z)
    right = batch_exp_mul(ring, X, batch_exp_mul(ring, Y, Z))
    bad = np.nonzero((left != right).any(axis=1))[0]
    if bad.size:
        i = int(bad[0])
        raise LazardError(
            f"associativity defect at x={tuple(X[i])}, y={tuple(Y[i])}, z={tuple(Z[i])}")
    return len(X), exhaustive


# recovery of the ring from a black-box group law

def log_group(mul, p, k, rank, class_bound=None, samples=2000, seed=0):
    """Recover (+, [,]) from a multiplication law on (Z/p^k)^rank tuples.

    Writes the law as mul(x^m, y^m) = sum_d m^d T_d(x, y) and peels the
    graded pieces with a Vandermonde solve over m = 1..c (unit determinant
    since c < p).  T_1 must match coordinate addition, which pins the
    carrier as exponential coordinates; the bracket is 2 T_2 on basis
    pairs.  Returns (ring, report) after checking Exp(ring) reproduces mul
    pointwise, exhaustively when the group is small.
    """
    mod = Modulus(p, k)
    pk = mod.pk
    c = min(p - 1, MAX_CLASS if class_bound is None else class_bound)
    if c < 1:
        raise LazardError("no admissible class below p")
    zero = (0,) * rank

    def power(x, m):
        acc, base = zero, x
        while m:
            if m & 1:
                acc = mul(acc, base)
            base = mul(base, base)
            m >>= 1
        return acc

    if mul(zero, zero) != zero:
        raise LazardError("the zero tuple is not the group identity")

    vand = ModMatrix(mod, [[pow(m, d, pk) for d in range(1, c + 1)]
                           for m in range(1, c + 1)])
    vinv = mat_inverse(vand)

    def graded_parts(x, y):
        rows = [mul(power(x, m), power(y, m)) for m in range(1, c + 1)]
        return [tuple(sum(vinv.rows[d][m] * rows[m][l] for m in range(c)) % pk
                      for l in range(rank))
                for d in range(c)]

    basis = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    rng = np.random.default_rng(seed)

    def check_addition(x, y):
        parts = graded_parts(x, y)
        want = tuple((a + b) % pk for a, b in zip(x, y))
        if parts[0] != want:
            raise LazardError(
                f"degree-1 part of the law at x={x}, y={y} is {parts[0]}, "
                f"not coordinate addition; not exponential coordinates")
        return parts

    brackets = {}
    for i in range(rank):
        for j in range(i + 1, rank):
            parts = check_addition(basis[i], basis[j])
            if c >= 2:
                brackets[(i, j)] = tuple(2 * v % pk for v in parts[1])
    for _ in range(16):
        x = tuple(int(v) for v in rng.integers(0, pk, size=rank))
        y = tuple(int(v) for v in rng.integers(0, pk, size=rank))
        check_addition(x, y)

    try:
        ring = LieRing(p, k, rank, brackets, name="recovered")
    except ValueError as e:
        raise LazardError(f"recovered constants are not a Lie ring: {e}") from e

    total = pk ** rank
    if total * total <= 65536:
        pairs = [(x, y) for x in ring.elements() for y in ring.elements()]
        exhaustive = True
    else:
        pairs = [(tuple(int(v) for v in rng.integers(0, pk, size=rank)),
                  tuple(int(v) for v in rng.integers(0, pk, size=rank)))
                 for _ in range(samples)]
        exhaustive = False
    for x, y in pairs:
        got = exp_mul(ring, x, y)
        want = mul(x, y)
        if got != want:
            raise LazardError(
                f"Exp of the recovered ring disagrees with the law at "
                f"x={x}, y={y}: {got} vs {want}")
    report = {"class": ring.cls, "pairs_checked": len(pairs), "exhaustive": exhaustive}
    return ring, report


# subrings and quotients

class Subring:
    """Submodule of a ring in Howell form, with bracket-closure queries."""

    def __init__(self, ring, generators):
        self.ring = ring
        self.rows = howell([list(_vec(ring, g)) for g in generators], ring.modulus)

    @classmethod
    def zero(cls, ring):
        return cls(ring, [])

    @classmethod
    def full(cls, ring):
        return cls(ring, [ring.basis(i) for i in range(ring.rank)])

    def generators(self):
        return tuple(tuple(r) for r in self.rows)

    def size(self):
        return span_size(self.rows, self.ring.modulus)

    def contains(self, x):
        return member(list(_vec(self.ring, x)), self.rows, self.ring.modulus)

    def reduce(self, x):
        return tuple(reduce_mod_span(list(_vec(self.ring, x)), self.rows,
                                     self.ring.modulus))

    def sum_with(self, other):
        return Subring(self.ring, list(self.generators()) + list(other.generators()))

    def elements(self):
        """All members, by enumerating coefficient tuples on Howell rows."""
        ring = self.ring
        seen = set()
        for coeffs in itertools.product(range(ring.pk), repeat=len(self.rows)):
            v = ring.zero()
            for c, row in zip(coeffs, self.rows):
                v = ring.add(v, ring.scale(c, tuple(row)))
            seen.add(v)
        return sorted(seen)

    def is_lie_subring(self):
        gens = self.generators()
        return all(self.contains(self.ring.bracket(a, b))
                   for a in gens for b in gens)

    def is_ideal(self):
        ring = self.ring
        return all(self.contains(ring.bracket(ring.basis(i), g))
                   for i in range(ring.rank) for g in self.generators())

    def __eq__(self, other):
        return (isinstance(other, Subring) and self.ring is other.ring
                and self.rows == other.rows)

    def __repr__(self):
        return f"Subring(rank {len(self.rows)} span, size {self.size()})"


def bracket_span(a, b):
    """[A, B] as a submodule: the span of pairwise generator brackets."""
    if a.ring is not b.ring:
        raise ValueError("subrings of different rings")
    ring = a.ring
    return Subring(ring, [ring.bracket(x, y)
                          for x in a.generators() for y in b.generators()])


def quotient_ring(ring, ideal, name=None):
    """Quotient by a split ideal; returns (quotient, project, lift).

    The ideal's Howell rows must have unit pivots, so the non-pivot
    coordinates form a free complement.  project sends x to its residue on
    those coordinates; lift places a residue back with zeros at the pivot
    columns, which is the lexicographically least coset representative.
    """
    if not ideal.is_ideal():
        raise ValueError("submodule is not an ideal")
    pk = ring.pk
    pivots = {}
    for row in ideal.rows:
        j = next(i for i, v in enumerate(row) if v)
        if row[j] % ring.p == 0 or pivots.get(j) is not None:
            raise ValueError("ideal is not a split submodule")
        pivots[j] = row
    free = [j for j in range(ring.rank) if j not in pivots]
    if not free:
        raise ValueError("quotient is trivial")

    def project(x):
        r = ideal.reduce(x)
        assert all(r[j] == 0 for j in pivots)
        return tuple(r[j] for j in free)

    def lift(beta):
        if len(beta) != len(free):
            raise ValueError(f"expected {len(free)} coordinates")
        out = [0] * ring.rank
        for j, b in zip(free, beta):
            out[j] = int(b) % pk
        return tuple(out)

    brackets = {}
    for a in range(len(free)):
        for b in range(a + 1, len(free)):
            v = project(ring.bracket(ring.basis(free[a]), ring.basis(free[b])))
            if any(v):
                brackets[(a, b)] = v
    q = LieRing(ring.p, ring.k, len(free), brackets,
                name=name or f"{ring.name}/ideal")
    return q, project, lift


# bundled rings

def _entries(p, k=1):
    pairs = []
    for r in (1, 2, 3):
        pairs.append((f"abelian{r}", (r, {})))
    pairs.append(("h3", (3, {(0, 1): (0, 0, 1)})))
    pairs.append(("h3xa1", (4, {(0, 1): (0, 0, 1, 0)})))
    pairs.append(("u3", (3, {(0, 1): (0, 0, 1)})))
    if p > 3:
        # strictly upper triangular 4x4: basis e12, e23, e34, e13, e24, e14
        pairs.append(("u4", (6, {
            (0, 1): (0, 0, 0, 1, 0, 0),
            (1, 2): (0, 0, 0, 0, 1, 0),
            (0, 4): (0, 0, 0, 0, 0, 1),
            (2, 3): (0, 0, 0, 0, 0, -1),
        })))
    return pairs


def catalog():
    """Name -> LieRing for the bundled test rings (class < p throughout)."""
    out = {}
    for p in (3, 5, 7):
        for stem, (rank, brackets) in _entries(p):
            name = f"{stem}_p{p}"
            out[name] = LieRing(p, 1, rank, brackets, name=name)
    out["h3_z9"] = LieRing(3, 2, 3, {(0, 1): (0, 0, 1)}, name="h3_z9")
    return out


# plain-text serialization; canonical output round-trips bit for bit

def serialize_ring(ring):
    lines = [f"ring {ring.name}",
             f"p {ring.p}", f"k {ring.k}",
             f"rank {ring.rank}", f"class {ring.cls}"]
    for i in range(ring.rank):
        for j in range(i + 1, ring.rank):
            v = ring.table[i][j]
            if any(v):
                lines.append(f"bracket {i + 1} {j + 1} " + " ".join(map(str, v)))
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_ring(text):
    lines = [ln.strip() for ln in text.splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or not lines[0].startswith("ring"):
        raise ValueError("ring file must start with a 'ring' line")
    name = lines[0].split(maxsplit=1)[1] if " " in lines[0] else "unnamed"
    fields = {}
    brackets = {}
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "end":
            break
        if parts[0] in ("p", "k", "rank", "class"):
            fields[parts[0]] = int(parts[1])
        elif parts[0] == "bracket":
            i, j = int(parts[1]) - 1, int(parts[2]) - 1
            brackets[(i, j)] = tuple(int(v) for v in parts[3:])
        else:
            raise ValueError(f"unknown line {ln!r}")
    else:
        raise ValueError("missing 'end' line")
    for key in ("p", "k", "rank"):
        if key not in fields:
            raise ValueError(f"missing field {key!r}")
    ring = LieRing(fields["p"], fields["k"], fields["rank"], brackets, name=name)
    if "class" in fields and fields["class"] != ring.cls:
        raise ValueError(
            f"declared class {fields['class']} but computed {ring.cls}")
    return ring
