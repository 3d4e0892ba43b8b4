"""Symmetrizable Cartan data and weight-lattice combinatorics.

Everything downstream grades by scaled integer exponents; the scale for
a datum is ``2 * |det C|``, which clears every denominator produced by
the weight-lattice pairing.
"""

from fractions import Fraction
from functools import lru_cache

BUILTIN = {
    ("A", 1): ([[2]], (1,)),
    ("A", 2): ([[2, -1], [-1, 2]], (1, 1)),
    ("A", 3): ([[2, -1, 0], [-1, 2, -1], [0, -1, 2]], (1, 1, 1)),
    ("B", 2): ([[2, -1], [-2, 2]], (2, 1)),
    ("G", 2): ([[2, -1], [-3, 2]], (3, 1)),
}


def _det(m):
    n = len(m)
    if n == 1:
        return Fraction(m[0][0])
    total = Fraction(0)
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        total += (-1) ** j * m[0][j] * _det(minor)
    return total


def _inverse(m):
    n = len(m)
    aug = [[Fraction(m[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ValueError("Cartan matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        f = aug[col][col]
        aug[col] = [x / f for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                g = aug[r][col]
                aug[r] = [x - g * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


class CartanDatum:
    """A symmetrizable generalized Cartan matrix of finite type plus its
    minimal symmetrizers.  Instances are immutable and hashable."""

    __slots__ = ("cartan", "d", "label")

    def __init__(self, cartan, d, label=""):
        object.__setattr__(self, "cartan", tuple(tuple(int(x) for x in row) for row in cartan))
        object.__setattr__(self, "d", tuple(int(x) for x in d))
        object.__setattr__(self, "label", label)
        self._validate()

    def __setattr__(self, *a):
        raise AttributeError("CartanDatum is immutable")

    def _validate(self):
        c, d = self.cartan, self.d
        n = len(c)
        if any(len(row) != n for row in c):
            raise ValueError("Cartan matrix must be square")
        for i in range(n):
            if c[i][i] != 2:
                raise ValueError("diagonal entries must equal 2")
            for j in range(n):
                if i != j:
                    if c[i][j] > 0:
                        raise ValueError("off-diagonal entries must be <= 0")
                    if (c[i][j] == 0) != (c[j][i] == 0):
                        raise ValueError("zero pattern must be symmetric")
                    if d[i] * c[i][j] != d[j] * c[j][i]:
                        raise ValueError("d does not symmetrize the matrix")
        if any(x <= 0 for x in d):
            raise ValueError("symmetrizers must be positive")
        if _det(c) == 0:
            raise ValueError("Cartan matrix must be invertible")

    @staticmethod
    def by_type(letter, rank):
        key = (letter.upper(), int(rank))
        if key not in BUILTIN:
            raise ValueError(f"no built-in datum of type {letter}{rank}")
        c, d = BUILTIN[key]
        return CartanDatum(c, d, label=f"{key[0]}{key[1]}")

    @staticmethod
    def from_matrix(rows):
        """Build from a user Cartan matrix, computing minimal symmetrizers."""
        n = len(rows)
        d = [Fraction(0)] * n
        d[0] = Fraction(1)
        changed = True
        while changed:
            changed = False
            for i in range(n):
                for j in range(n):
                    if i != j and rows[i][j] != 0 and d[i] and not d[j]:
                        d[j] = d[i] * rows[i][j] / rows[j][i]
                        changed = True
        if any(x == 0 for x in d):
            # disconnected diagram: restart propagation from each untouched node
            for i in range(n):
                if d[i] == 0:
                    d[i] = Fraction(1)
        den = 1
        for x in d:
            den = den * x.denominator // _gcd_int(den, x.denominator)
        ints = [int(x * den) for x in d]
        g = 0
        for x in ints:
            g = _gcd_int(g, x)
        return CartanDatum(rows, [x // g for x in ints], label="user")

    @property
    def rank(self):
        return len(self.cartan)

    @property
    def det(self):
        v = _det(self.cartan)
        assert v.denominator == 1
        return int(v)

    @property
    def scale(self):
        return 2 * abs(self.det)

    def __eq__(self, other):
        return (
            isinstance(other, CartanDatum)
            and self.cartan == other.cartan
            and self.d == other.d
        )

    def __hash__(self):
        return hash((self.cartan, self.d))

    def __repr__(self):
        return f"CartanDatum({self.label or self.cartan})"

    def to_json(self):
        return {"cartan": [list(r) for r in self.cartan], "d": list(self.d), "label": self.label}

    # -- lattice geometry ------------------------------------------------

    def inverse_cartan(self):
        return _inverse([list(r) for r in self.cartan])

    def omega_pairing(self, i, j):
        """<omega_i, omega_j> as an exact Fraction."""
        return self.d[i] * self.inverse_cartan()[i][j]

    def alpha(self, i):
        # column i of the Cartan matrix, in fundamental coordinates
        return WeightVec(self, tuple(self.cartan[k][i] for k in range(self.rank)))

    def omega(self, i):
        return WeightVec(self, tuple(int(k == i) for k in range(self.rank)))

    def zero(self):
        return WeightVec(self, (0,) * self.rank)

    def rho(self):
        return WeightVec(self, (1,) * self.rank)

    def positive_roots(self):
        """All positive roots in simple-root coordinates."""
        return _positive_roots(self.cartan)

    def root_coords(self, wt):
        """Coordinates of wt in the root basis (exact Fractions)."""
        inv = self.inverse_cartan()
        n = self.rank
        # coords_k = sum_j b_j c_kj  =>  b = C^{-1} applied on the right
        return tuple(
            sum(inv[j][k] * wt.coords[k] for k in range(n)) for j in range(n)
        )


def _gcd_int(a, b):
    from math import gcd

    return gcd(a, b)


@lru_cache(maxsize=None)
def _positive_roots(cartan):
    n = len(cartan)
    simples = [tuple(int(k == i) for k in range(n)) for i in range(n)]
    roots = set(simples)
    frontier = set(simples)
    while frontier:
        new = set()
        for r in frontier:
            for i in range(n):
                coeff = sum(r[j] * cartan[i][j] for j in range(n))
                rr = list(r)
                rr[i] -= coeff
                rr = tuple(rr)
                if rr not in roots:
                    new.add(rr)
        roots |= new
        frontier = new
    pos = sorted(r for r in roots if all(x >= 0 for x in r))
    return tuple(pos)


class WeightVec:
    """An integral weight in fundamental-weight coordinates."""

    __slots__ = ("datum", "coords")

    def __init__(self, datum, coords):
        object.__setattr__(self, "datum", datum)
        object.__setattr__(self, "coords", tuple(int(x) for x in coords))
        if len(self.coords) != datum.rank:
            raise ValueError("coordinate length does not match rank")

    def __setattr__(self, *a):
        raise AttributeError("WeightVec is immutable")

    def coord(self, i):
        """<self, alpha_i^vee>."""
        return self.coords[i]

    def __add__(self, other):
        self._chk(other)
        return WeightVec(self.datum, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._chk(other)
        return WeightVec(self.datum, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return WeightVec(self.datum, tuple(-a for a in self.coords))

    def __rmul__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return WeightVec(self.datum, tuple(k * a for a in self.coords))

    def _chk(self, other):
        if not isinstance(other, WeightVec) or other.datum != self.datum:
            raise TypeError("weight arithmetic requires a common Cartan datum")

    def __eq__(self, other):
        return (
            isinstance(other, WeightVec)
            and other.datum == self.datum
            and other.coords == self.coords
        )

    def __hash__(self):
        return hash((self.datum, self.coords))

    def pairing(self, other):
        """Symmetric bilinear form <.,.>, normalized so <a_i,a_i> = 2 d_i."""
        self._chk(other)
        dat = self.datum
        inv = dat.inverse_cartan()
        total = Fraction(0)
        for i in range(dat.rank):
            for j in range(dat.rank):
                total += self.coords[i] * other.coords[j] * dat.d[i] * inv[i][j]
        return total

    def scaled_pairing(self, other):
        """<self, other> * datum.scale, guaranteed integral."""
        v = self.pairing(other) * self.datum.scale
        assert v.denominator == 1
        return int(v)

    def is_dominant(self):
        return all(x >= 0 for x in self.coords)

    def reflect(self, i):
        """Simple reflection s_i."""
        return self - self.coords[i] * self.datum.alpha(i)

    def dominant_conjugate(self):
        v = self
        while not v.is_dominant():
            i = next(k for k in range(self.datum.rank) if v.coords[k] < 0)
            v = v.reflect(i)
        return v

    def render(self):
        if all(x == 0 for x in self.coords):
            return "0"
        parts = []
        for i, x in enumerate(self.coords):
            if x == 0:
                continue
            name = f"w{i + 1}"
            if x == 1:
                term = name
            elif x == -1:
                term = f"-{name}"
            else:
                term = f"{x}*{name}"
            if parts and not term.startswith("-"):
                parts.append("+" + term)
            else:
                parts.append(term)
        return "".join(parts)

    def __repr__(self):
        return f"WeightVec({self.render()})"

    def to_json(self):
        return list(self.coords)


def _root_sign(datum, root_coord_frac):
    # a root is positive iff its pairing with rho is positive
    s = sum(datum.d[k] * root_coord_frac[k] for k in range(datum.rank))
    return 1 if s > 0 else (-1 if s < 0 else 0)


def _reflection_matrix(datum, i):
    n = datum.rank
    return tuple(
        tuple((1 if k == j else 0) - (datum.cartan[k][i] if j == i else 0) for j in range(n))
        for k in range(n)
    )


def _mat_apply(m, v):
    return tuple(sum(m[k][j] * v[j] for j in range(len(v))) for k in range(len(m)))


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[k][m] * b[m][j] for m in range(n)) for j in range(n))
        for k in range(n)
    )


@lru_cache(maxsize=None)
def w0_word(datum):
    """Lexicographically least reduced word for the longest Weyl element.

    Greedy: the first letter of some reduced word of w is exactly a left
    descent, so repeatedly take the smallest left descent.
    """
    n = datum.rank
    npos = len(datum.positive_roots())
    # materialize w0 by driving rho to -rho; w0 is an involution, so the
    # same matrix serves as w^{-1} for the descent test
    w0 = tuple(tuple(int(k == j) for j in range(n)) for k in range(n))
    v = datum.rho()
    while not (-v).is_dominant():
        i = next(k for k in range(n) if v.coords[k] > 0)
        v = v.reflect(i)
        w0 = _mat_mul(_reflection_matrix(datum, i), w0)
    w_inv = w0
    word = []
    for _ in range(npos):
        chosen = None
        for i in range(n):
            # alpha_i in fundamental coords is column i of C
            ai = tuple(datum.cartan[k][i] for k in range(n))
            img = _mat_apply(w_inv, ai)
            rc = datum.root_coords(WeightVec(datum, img))
            if _root_sign(datum, rc) < 0:
                chosen = i
                break
        if chosen is None:
            raise AssertionError("ran out of descents before exhausting length")
        word.append(chosen)
        # w -> s_i w, so w^{-1} -> w^{-1} s_i
        w_inv = _mat_mul(w_inv, _reflection_matrix(datum, chosen))
    return tuple(word)


def longest_sequence(datum, lam):
    """Multiplicity-decorated letters along the least reduced word of w0.

    Returns a tuple of (index, multiplicity): the k-th entry reflects the
    partially reflected weight against the k-th simple coroot.
    """
    if not lam.is_dominant():
        raise ValueError("highest weight must be dominant")
    out = []
    v = lam
    for i in w0_word(datum):
        out.append((i, v.coord(i)))
        v = v.reflect(i)
    return tuple(out)


def dual_weight(datum, lam):
    """The highest weight of the dual module, -w0(lam)."""
    v = lam
    for i in w0_word(datum):
        v = v.reflect(i)
    return -v


def rho_pair(datum, lam):
    """(2 rho^vee applied to lam, 2<lam, rho>) as (int, Fraction)."""
    cov = Fraction(0)
    form = Fraction(0)
    for root in datum.positive_roots():
        # <lam, root> where root = sum root_i alpha_i
        pair = sum(
            Fraction(root[i]) * datum.d[i] * lam.coords[i]
            for i in range(datum.rank)
        )
        norm = Fraction(0)
        for i in range(datum.rank):
            for j in range(datum.rank):
                norm += root[i] * root[j] * datum.d[i] * datum.cartan[i][j]
        cov += 2 * pair / norm  # <lam, root^vee>
        form += pair
    assert cov.denominator == 1
    return int(cov), form


def weyl_dim(datum, lam):
    """Weyl dimension formula, exact."""
    if not lam.is_dominant():
        raise ValueError("highest weight must be dominant")
    num = Fraction(1)
    den = Fraction(1)
    rho = datum.rho()
    lam_rho = lam + rho
    for root in datum.positive_roots():
        a = sum(Fraction(root[i]) * datum.d[i] * lam_rho.coords[i] for i in range(datum.rank))
        b = sum(Fraction(root[i]) * datum.d[i] * rho.coords[i] for i in range(datum.rank))
        num *= a
        den *= b
    v = num / den
    assert v.denominator == 1
    return int(v)
