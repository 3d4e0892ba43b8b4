"""Exact arithmetic in Laurent polynomials of a scaled root of q.

Everything downstream grades by powers of q^(1/denom_scale) where
denom_scale is fixed per session (2*|det C| for the Cartan matrix C in
use).  Exponents are stored pre-scaled as plain integers, so no
fraction arithmetic happens on the hot path.  Coefficients are Python
ints, hence arbitrary precision.

Three layers:

  ScaledLaurent   the ring Z[q^(1/s), q^(-1/s)]
  RationalScalar  its field of fractions, gcd-reduced on construction
  PoincareSeries  two-variable data (homological degree, q-exponent)
                  with a truncation floor

plus exact linear algebra (rref / solve / kernel) over RationalScalar.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


class ScaleMismatch(ValueError):
    pass


class ScaledLaurent:
    """Laurent polynomial in q^(1/scale) with integer coefficients.

    terms: tuple of (scaled_exponent, coefficient), sorted by exponent,
    no zero coefficients.  Immutable and hashable.
    """

    __slots__ = ("scale", "terms")

    def __init__(self, scale, terms=()):
        if scale <= 0:
            raise ValueError("scale must be positive")
        object.__setattr__(self, "scale", int(scale))
        if isinstance(terms, dict):
            items = terms.items()
        else:
            items = terms
        merged = {}
        for e, c in items:
            if c:
                merged[int(e)] = merged.get(int(e), 0) + int(c)
        object.__setattr__(
            self,
            "terms",
            tuple(sorted((e, c) for e, c in merged.items() if c)),
        )

    def __setattr__(self, name, value):
        raise AttributeError("ScaledLaurent is immutable")

    # -- constructors ------------------------------------------------

    @staticmethod
    def zero(scale):
        return ScaledLaurent(scale)

    @staticmethod
    def one(scale):
        return ScaledLaurent(scale, ((0, 1),))

    @staticmethod
    def monomial(scale, scaled_exp, coeff=1):
        return ScaledLaurent(scale, ((scaled_exp, coeff),))

    @staticmethod
    def from_int(scale, n):
        return ScaledLaurent(scale, ((0, n),))

    # -- basic queries -----------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_one(self):
        return self.terms == ((0, 1),)

    def min_exp(self):
        if not self.terms:
            raise ValueError("zero polynomial has no exponents")
        return self.terms[0][0]

    def max_exp(self):
        if not self.terms:
            raise ValueError("zero polynomial has no exponents")
        return self.terms[-1][0]

    def coeff(self, scaled_exp):
        for e, c in self.terms:
            if e == scaled_exp:
                return c
        return 0

    def _check(self, other):
        if self.scale != other.scale:
            raise ScaleMismatch(
                f"scale mismatch: {self.scale} vs {other.scale}"
            )

    # -- ring ops ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = ScaledLaurent.from_int(self.scale, other)
        if not isinstance(other, ScaledLaurent):
            return NotImplemented
        self._check(other)
        acc = dict(self.terms)
        for e, c in other.terms:
            acc[e] = acc.get(e, 0) + c
        return ScaledLaurent(self.scale, acc)

    __radd__ = __add__

    def __neg__(self):
        return ScaledLaurent(self.scale, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other):
        if isinstance(other, int):
            other = ScaledLaurent.from_int(self.scale, other)
        if not isinstance(other, ScaledLaurent):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return ScaledLaurent(self.scale)
            return ScaledLaurent(
                self.scale, tuple((e, c * other) for e, c in self.terms)
            )
        if not isinstance(other, ScaledLaurent):
            return NotImplemented
        self._check(other)
        acc = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                k = e1 + e2
                acc[k] = acc.get(k, 0) + c1 * c2
        return ScaledLaurent(self.scale, acc)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            # only monomials invert inside the ring
            if len(self.terms) == 1:
                e, c = self.terms[0]
                if c in (1, -1):
                    return ScaledLaurent.monomial(self.scale, -e * (-n), c)
            raise ValueError("negative power of a non-unit Laurent polynomial")
        out = ScaledLaurent.one(self.scale)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = ScaledLaurent.from_int(self.scale, other)
        if not isinstance(other, ScaledLaurent):
            return NotImplemented
        return self.scale == other.scale and self.terms == other.terms

    def __hash__(self):
        return hash((self.scale, self.terms))

    def __bool__(self):
        return bool(self.terms)

    # -- involutions and specializations ------------------------------

    def bar(self):
        """q -> q^-1 on every exponent."""
        return ScaledLaurent(self.scale, tuple((-e, c) for e, c in self.terms))

    def shift(self, scaled_exp):
        """Multiply by q^(scaled_exp/scale)."""
        return ScaledLaurent(
            self.scale, tuple((e + scaled_exp, c) for e, c in self.terms)
        )

    def at_one(self):
        """Specialize q = 1 (sum of coefficients)."""
        return sum(c for _, c in self.terms)

    def eval_fraction(self, x):
        """Evaluate at q^(1/scale) = x for a Fraction x.  Oracle hook."""
        x = Fraction(x)
        total = Fraction(0)
        for e, c in self.terms:
            total += c * x ** e
        return total

    def rescale(self, new_scale):
        """Re-express with a different denominator scale (must be exact)."""
        if new_scale == self.scale:
            return self
        out = {}
        for e, c in self.terms:
            num = e * new_scale
            if num % self.scale:
                raise ScaleMismatch(
                    f"exponent {e}/{self.scale} not representable over {new_scale}"
                )
            out[num // self.scale] = c
        return ScaledLaurent(new_scale, out)

    # -- rendering -----------------------------------------------------

    def _exp_str(self, e):
        f = Fraction(e, self.scale)
        if f.denominator == 1:
            return str(f.numerator)
        return f"{f.numerator}/{f.denominator}"

    def render(self):
        """Deterministic text form, ascending exponents.

        Integer exponents print bare (q^-2), fractional ones braced
        (q^{3/2}); unit coefficients drop the 1.
        """
        if not self.terms:
            return "0"
        parts = []
        for idx, (e, c) in enumerate(self.terms):
            f = Fraction(e, self.scale)
            if f == 0:
                body = str(abs(c))
            else:
                if f.denominator == 1:
                    qs = "q" if f == 1 else f"q^{f.numerator}"
                else:
                    qs = f"q^{{{f.numerator}/{f.denominator}}}"
                body = qs if abs(c) == 1 else f"{abs(c)}*{qs}"
            if idx == 0:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def to_json(self):
        return {
            "terms": [
                {"q": self._exp_str(e), "c": c} for e, c in self.terms
            ]
        }

    def __repr__(self):
        return f"ScaledLaurent({self.render()!r}, scale={self.scale})"


def qnum(scale, n, d=1):
    """Quantum integer [n] in q_i = q^d, as a ScaledLaurent.

    [n] = q^{d(n-1)} + q^{d(n-3)} + ... + q^{-d(n-1)}, exponents here in
    unscaled units of d; requires d*scale exponents integral (d integer).
    """
    if n < 0:
        return -qnum(scale, -n, d)
    terms = {}
    for k in range(n):
        terms[(n - 1 - 2 * k) * d * scale] = 1
    return ScaledLaurent(scale, terms)


def qfactorial(scale, n, d=1):
    out = ScaledLaurent.one(scale)
    for k in range(2, n + 1):
        out = out * qnum(scale, k, d)
    return out


# ---------------------------------------------------------------------
# polynomial helpers for gcd reduction (dense lists over Z, used solely
# inside RationalScalar normal forms; inputs are small)


def _to_poly(a):
    """ScaledLaurent -> (shift, [c0, c1, ...]) with c0 != 0 unless zero."""
    if not a.terms:
        return 0, []
    lo = a.terms[0][0]
    hi = a.terms[-1][0]
    coeffs = [0] * (hi - lo + 1)
    for e, c in a.terms:
        coeffs[e - lo] = c
    return lo, coeffs


def _from_poly(scale, shift, coeffs):
    return ScaledLaurent(
        scale, {shift + i: c for i, c in enumerate(coeffs) if c}
    )


def _poly_degree(p):
    for i in range(len(p) - 1, -1, -1):
        if p[i]:
            return i
    return -1


def _poly_trim(p):
    d = _poly_degree(p)
    return p[: d + 1]


def _poly_content(p):
    g = 0
    for c in p:
        g = gcd(g, abs(c))
    return g or 1


def _poly_primitive(p):
    g = _poly_content(p)
    return [c // g for c in p]


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_divmod_frac(a, b):
    """Exact division with remainder over Q. a, b lists of Fractions."""
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in b]
    db = _poly_degree(b)
    if db < 0:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(0, len(a) - db)
    lead = b[db]
    r = a[:]
    dr = _poly_degree(r)
    while dr >= db:
        f = r[dr] / lead
        q[dr - db] = f
        for i in range(db + 1):
            r[dr - db + i] -= f * b[i]
        dr = _poly_degree(r)
    return q, _poly_trim(r)


def _poly_gcd(a, b):
    """Primitive gcd in Z[x] (dense int lists), via monic Euclid over Q."""
    a = _poly_trim(a)
    b = _poly_trim(b)
    if not a:
        return _poly_primitive(b) if b else []
    if not b:
        return _poly_primitive(a)
    fa = [Fraction(c) for c in a]
    fb = [Fraction(c) for c in b]
    while fb and _poly_degree(fb) >= 0:
        _, r = _poly_divmod_frac(fa, fb)
        fa, fb = fb, r
        if not fb:
            break
    # clear denominators, make primitive, positive lead
    den = 1
    for c in fa:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in fa]
    ints = _poly_primitive(ints)
    if ints and ints[_poly_degree(ints)] < 0:
        ints = [-c for c in ints]
    return ints


def _poly_exact_div(a, b):
    """a // b in Z[x], assuming exact divisibility."""
    q, r = _poly_divmod_frac([Fraction(c) for c in a], [Fraction(c) for c in b])
    if any(r):
        raise ArithmeticError("inexact polynomial division")
    out = []
    for c in q:
        if c.denominator != 1:
            raise ArithmeticError("inexact polynomial division")
        out.append(int(c))
    return _poly_trim(out)


class RationalScalar:
    """Element of the fraction field of ScaledLaurent.

    Reduced on construction: numerator/denominator share no polynomial
    factor or integer content, the denominator is a genuine polynomial
    in q^(1/scale) with constant term nonzero (Laurent shift pushed to
    the numerator) and positive leading coefficient.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = ScaledLaurent.one(num.scale)
        if num.scale != den.scale:
            raise ScaleMismatch("numerator/denominator scale mismatch")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            object.__setattr__(self, "num", ScaledLaurent.zero(num.scale))
            object.__setattr__(self, "den", ScaledLaurent.one(num.scale))
            return
        if den.is_one():
            object.__setattr__(self, "num", num)
            object.__setattr__(self, "den", den)
            return
        scale = num.scale
        nsh, np = _to_poly(num)
        dsh, dp = _to_poly(den)
        g = _poly_gcd(np, dp)
        if _poly_degree(g) > 0 or (g and g != [1]):
            np = _poly_exact_div(np, g)
            dp = _poly_exact_div(dp, g)
        cn, cd = _poly_content(np), _poly_content(dp)
        cg = gcd(cn, cd)
        np = [c // cg for c in np]
        dp = [c // cg for c in dp]
        if dp[_poly_degree(dp)] < 0:
            np = [-c for c in np]
            dp = [-c for c in dp]
        # net Laurent shift lives on the numerator
        object.__setattr__(self, "num", _from_poly(scale, nsh - dsh, np))
        object.__setattr__(self, "den", _from_poly(scale, 0, dp))

    def __setattr__(self, name, value):
        raise AttributeError("RationalScalar is immutable")

    @staticmethod
    def zero(scale):
        return RationalScalar(ScaledLaurent.zero(scale))

    @staticmethod
    def one(scale):
        return RationalScalar(ScaledLaurent.one(scale))

    @staticmethod
    def of(x):
        if isinstance(x, RationalScalar):
            return x
        if isinstance(x, ScaledLaurent):
            return RationalScalar(x)
        raise TypeError(f"cannot coerce {type(x).__name__}")

    @property
    def scale(self):
        return self.num.scale

    def is_zero(self):
        return self.num.is_zero()

    def is_laurent(self):
        return self.den.is_one() or (
            len(self.den.terms) == 1 and self.den.terms[0][1] in (1, -1)
        )

    def as_laurent(self):
        """Return the ScaledLaurent value, or raise if a true fraction."""
        if self.den.is_one():
            return self.num
        if len(self.den.terms) == 1:
            e, c = self.den.terms[0]
            if c == 1:
                return self.num.shift(-e)
            if c == -1:
                return (-self.num).shift(-e)
        raise ArithmeticError(f"not a Laurent polynomial: {self!r}")

    def _coerce(self, other):
        if isinstance(other, RationalScalar):
            return other
        if isinstance(other, ScaledLaurent):
            return RationalScalar(other)
        if isinstance(other, int):
            return RationalScalar(ScaledLaurent.from_int(self.scale, other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RationalScalar(self.num + o.num, self.den)
        return RationalScalar(
            self.num * o.den + o.num * self.den, self.den * o.den
        )

    __radd__ = __add__

    def __neg__(self):
        out = object.__new__(RationalScalar)
        object.__setattr__(out, "num", -self.num)
        object.__setattr__(out, "den", self.den)
        return out

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RationalScalar(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError
        return RationalScalar(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return o / self

    def inv(self):
        if self.num.is_zero():
            raise ZeroDivisionError
        return RationalScalar(self.den, self.num)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        # normal forms are canonical
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.num.is_zero()

    def bar(self):
        return RationalScalar(self.num.bar(), self.den.bar())

    def render(self):
        if self.den.is_one():
            return self.num.render()
        return f"({self.num.render()}) / ({self.den.render()})"

    def __repr__(self):
        return f"RationalScalar({self.render()})"


# ---------------------------------------------------------------------
# exact linear algebra over RationalScalar


def rs_matrix(scale, rows):
    """Coerce a nested list of int/ScaledLaurent/RationalScalar."""
    out = []
    for row in rows:
        r = []
        for x in row:
            if isinstance(x, int):
                r.append(RationalScalar(ScaledLaurent.from_int(scale, x)))
            else:
                r.append(RationalScalar.of(x))
        out.append(r)
    return out


def rref(matrix, ncols=None):
    """Row-reduce in place logically (returns a new matrix).

    INPUTS: matrix as list of lists of RationalScalar.
    OUTPUTS: (reduced matrix, pivot column list).
    """
    if not matrix:
        return [], []
    m = [row[:] for row in matrix]
    rows = len(m)
    cols = ncols if ncols is not None else len(m[0])
    pivots = []
    r = 0
    for c in range(cols):
        # prefer a Laurent (denominator-free) pivot to limit blowup
        pivot_row = None
        for rr in range(r, rows):
            if m[rr][c]:
                if pivot_row is None:
                    pivot_row = rr
                if m[rr][c].is_laurent():
                    pivot_row = rr
                    break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = m[r][c].inv()
        m[r] = [x * inv for x in m[r]]
        for rr in range(rows):
            if rr != r and m[rr][c]:
                f = m[rr][c]
                m[rr] = [a - f * b for a, b in zip(m[rr], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(matrix):
    _, p = rref(matrix)
    return len(p)


def kernel_basis(matrix, ncols):
    """Basis of the right kernel of matrix (rows = equations)."""
    red, pivots = rref(matrix, ncols)
    if not red:
        scale = None
        raise ValueError("kernel_basis needs at least one row; pad with zeros")
    scale = red[0][0].scale
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [RationalScalar.zero(scale) for _ in range(ncols)]
        vec[fc] = RationalScalar.one(scale)
        for ri, pc in enumerate(pivots):
            vec[pc] = -red[ri][fc]
        basis.append(vec)
    return basis


def rational_solve(matrix, rhs):
    """Solve matrix * x = rhs exactly.

    INPUTS: matrix list of rows of RationalScalar, rhs list.
    OUTPUTS: (particular solution or None, kernel basis).  None means
    certified inconsistency.
    """
    if not matrix:
        return [], []
    rows = len(matrix)
    cols = len(matrix[0])
    scale = None
    for row in matrix:
        for x in row:
            scale = RationalScalar.of(x).scale
            break
        if scale:
            break
    aug = [list(row) + [RationalScalar.of(b)] for row, b in zip(matrix, rhs)]
    red, pivots = rref(aug, ncols=cols + 1)
    if cols in pivots:
        return None, kernel_basis([row[:cols] for row in matrix], cols)
    x = [RationalScalar.zero(scale) for _ in range(cols)]
    for ri, pc in enumerate(pivots):
        x[pc] = red[ri][cols]
    return x, kernel_basis([list(row) for row in matrix], cols)


# ---------------------------------------------------------------------


class PoincareSeries:
    """Graded dimensions of a complex's homology, with truncation floor.

    qt_terms maps (homological degree i, scaled q-exponent) to the
    dimension of that piece (a positive integer).  Terms with i below
    t_floor are unknown (an infinite tail may live there); t_floor None
    means the data is complete.
    """

    __slots__ = ("scale", "qt_terms", "t_floor")

    def __init__(self, scale, qt_terms, t_floor=None):
        clean = {}
        for (i, e), c in qt_terms.items():
            if c:
                if t_floor is not None and i < t_floor:
                    raise ValueError(f"term at i={i} below floor {t_floor}")
                clean[(int(i), int(e))] = int(c)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "qt_terms", dict(clean))
        object.__setattr__(self, "t_floor", t_floor)

    def __setattr__(self, name, value):
        raise AttributeError("PoincareSeries is immutable")

    def dim_q(self, i):
        """dim_q of homology in homological degree i, as ScaledLaurent."""
        return ScaledLaurent(
            self.scale,
            {e: c for (j, e), c in self.qt_terms.items() if j == i},
        )

    def homological_range(self):
        if not self.qt_terms:
            return None
        degs = [i for i, _ in self.qt_terms]
        return min(degs), max(degs)

    def euler(self):
        """Sum of (-1)^i dim_q H^i.  Exact only when complete."""
        acc = {}
        for (i, e), c in self.qt_terms.items():
            s = c if i % 2 == 0 else -c
            acc[e] = acc.get(e, 0) + s
        return ScaledLaurent(self.scale, acc)

    def phi_terms(self):
        """Signed series coefficients: list of (t_exp, scaled_q_exp, coeff).

        The series convention is sum over i of (-t)^(-i) dim_q H^i, so a
        homology class in degree i contributes at t-exponent -i with
        sign (-1)^i.  Sorted by (t_exp, q_exp).
        """
        out = []
        for (i, e), c in self.qt_terms.items():
            out.append((-i, e, c if i % 2 == 0 else -c))
        out.sort(key=lambda t: (t[0], t[1]))
        return out

    def t_ceiling(self):
        """Largest certified t-exponent (= -t_floor), or None if complete."""
        return None if self.t_floor is None else -self.t_floor

    def render(self):
        terms = self.phi_terms()
        if not terms:
            return "0"
        parts = []
        for idx, (ti, e, c) in enumerate(terms):
            f = Fraction(e, self.scale)
            atoms = []
            if f != 0:
                if f.denominator == 1:
                    atoms.append("q" if f == 1 else f"q^{f.numerator}")
                else:
                    atoms.append(f"q^{{{f.numerator}/{f.denominator}}}")
            if ti != 0:
                atoms.append("t" if ti == 1 else f"t^{ti}")
            if not atoms:
                body = str(abs(c))
            else:
                body = "*".join(atoms)
                if abs(c) != 1:
                    body = f"{abs(c)}*{body}"
            if idx == 0:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def to_json(self):
        terms = [
            {
                "t": ti,
                "q": ScaledLaurent(self.scale, {e: 1})._exp_str(e),
                "c": c,
            }
            for ti, e, c in self.phi_terms()
        ]
        out = {"terms": terms}
        if self.t_floor is not None:
            out["t_max"] = -self.t_floor
        return out

    def __eq__(self, other):
        if not isinstance(other, PoincareSeries):
            return NotImplemented
        return (
            self.scale == other.scale
            and self.qt_terms == other.qt_terms
            and self.t_floor == other.t_floor
        )

    def __repr__(self):
        tail = "" if self.t_floor is None else f" [t<={-self.t_floor}]"
        return f"PoincareSeries({self.render()}{tail})"
