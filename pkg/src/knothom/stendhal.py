"""Diagram algebras for tensor products of highest-weight modules.

Diagrams live on N = n + ell vertical slots: ell red strands, each
labeled by a dominant weight, and n black strands labeled by Dynkin
nodes.  Black strands may carry dots and may cross each other and red
strands; red strands never cross each other.  Words of elementary
events (crossings, dots) are straightened onto a canonical basis:

    psi_w  e(I, kappa)  y^a

where w is a slot permutation realized by its lexicographically least
reduced word, e(I, kappa) records the bottom label arrangement, and the
dot vector a sits at the bottom of the diagram.  Straightening applies
the local relations (nilHecke, bigon, triple corrections, red-strand
cost and slide rules); every correction strictly drops the crossing
count, so rewriting terminates.

Weight blocks of the quotient by the left-violation ideal are built
degree by degree: the span of products through violated idempotents is
row-reduced out of each graded piece, and the surviving graded
dimension is checked per corner against the tensor-form oracle.  A
mismatch raises; it signals a straightening bug, never data to accept.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .qring import ScaledLaurent
from .rootdata import WeightVec
from .uqrep import pword_tokens, tensor_form


class BlockOracleError(ValueError):
    """Graded dimension of a built block disagrees with the form oracle."""


# ---------------------------------------------------------------------------
# Q polynomials


class QMatrix:
    """Choice of polynomials Q_ij(u, v) governing same/distinct bigons.

    polys maps ordered pairs (i, j), i != j, to {(k, m): coeff} with
    integer coefficients.  Validated against: Q_ii = 0 (absent keys),
    Q_ij(u,v) = Q_ji(v,u), homogeneity for deg u = <a_i,a_i>,
    deg v = <a_j,a_j>, total -2<a_i,a_j>, and leading u-order -c_ij.
    """

    def __init__(self, datum, polys):
        self.datum = datum
        self.polys = {}
        for (i, j), mono in polys.items():
            if i == j:
                raise ValueError("Q_ii must be zero; omit diagonal entries")
            clean = {km: int(c) for km, c in mono.items() if c}
            self.polys[(i, j)] = clean
        self._validate()

    def _validate(self):
        dat = self.datum
        for i in range(dat.rank):
            for j in range(dat.rank):
                if i == j:
                    continue
                p = self.polys.get((i, j))
                q = self.polys.get((j, i))
                if p is None or q is None:
                    raise ValueError("missing Q_%d%d" % (i, j))
                # mirror symmetry Q_ij(u,v) = Q_ji(v,u)
                if {(m, k): c for (k, m), c in q.items()} != p:
                    raise ValueError("Q_%d%d and Q_%d%d are not mirror" % (i, j, j, i))
                ai, aj = dat.alpha(i), dat.alpha(j)
                du = ai.scaled_pairing(ai)
                dv = aj.scaled_pairing(aj)
                target = -2 * ai.scaled_pairing(aj)
                lead = -dat.cartan[i][j]
                for (k, m), c in p.items():
                    if k * du + m * dv != target:
                        raise ValueError("Q_%d%d not homogeneous" % (i, j))
                if max((k for (k, m) in p), default=0) != lead and target != 0:
                    raise ValueError("Q_%d%d has wrong leading u-order" % (i, j))

    @classmethod
    def standard(cls, datum):
        """Default choice: u - v with the natural orientation when both
        Cartan entries are -1, the plain two-monomial form otherwise."""
        polys = {}
        for i in range(datum.rank):
            for j in range(datum.rank):
                if i == j:
                    continue
                cij = datum.cartan[i][j]
                cji = datum.cartan[j][i]
                if cij == 0:
                    polys[(i, j)] = {(0, 0): 1}
                elif cij == -1 and cji == -1:
                    sign = 1 if i > j else -1
                    polys[(i, j)] = {(1, 0): sign, (0, 1): -sign}
                else:
                    polys[(i, j)] = {(-cij, 0): 1, (0, -cji): 1}
        return cls(datum, polys)

    def poly(self, i, j):
        if i == j:
            return {}
        return self.polys[(i, j)]

    def t(self, i, j):
        """t_ij = Q_ij(1, 0); t_ii = 1 by convention."""
        if i == j:
            return 1
        return sum(c for (k, m), c in self.polys[(i, j)].items() if m == 0)


# ---------------------------------------------------------------------------
# slot permutations


def _inv_count(sigma):
    n = len(sigma)
    c = 0
    for a in range(n):
        sa = sigma[a]
        for b in range(a + 1, n):
            if sa > sigma[b]:
                c += 1
    return c


@lru_cache(maxsize=None)
def _lexword(sigma):
    """Lexicographically least reduced word, letters read bottom to top."""
    word = []
    cur = list(sigma)
    while True:
        b = -1
        for s in range(len(cur) - 1):
            if cur[s] > cur[s + 1]:
                b = s
                break
        if b < 0:
            return tuple(word)
        word.append(b)
        cur[b], cur[b + 1] = cur[b + 1], cur[b]


def _word_perm(word, n):
    sig = list(range(n))
    pos = list(range(n))
    for p in word:
        s1, s2 = pos[p], pos[p + 1]
        sig[s1], sig[s2] = p + 1, p
        pos[p], pos[p + 1] = s2, s1
    return tuple(sig)


def _swap_top(sigma, p):
    # t_p composed on top of sigma
    return tuple(p + 1 if x == p else p if x == p + 1 else x for x in sigma)


def _word_moves(word):
    """Neighbors of a reduced word under commutation and braid moves."""
    out = []
    for h in range(len(word) - 1):
        a, b = word[h], word[h + 1]
        if abs(a - b) >= 2:
            out.append(word[:h] + (b, a) + word[h + 2 :])
    for h in range(len(word) - 2):
        a, b = word[h], word[h + 1]
        if word[h + 2] == a and abs(a - b) == 1:
            out.append(word[:h] + (b, a, b) + word[h + 3 :])
    return out


# ---------------------------------------------------------------------------
# label sequences


def build_seq(i_seq, kappa, ell):
    """Slot sequence for the idempotent: ("r", k) and ("b", node) entries.

    kappa[k] counts the black strands left of red k+1.
    """
    n = len(i_seq)
    seq = []
    pos = 0
    for k in range(ell):
        while pos < kappa[k]:
            seq.append(("b", i_seq[pos]))
            pos += 1
        seq.append(("r", k))
    while pos < n:
        seq.append(("b", i_seq[pos]))
        pos += 1
    return tuple(seq)


def _black_slots(seq):
    return tuple(s for s, e in enumerate(seq) if e[0] == "b")


def is_violated(i_seq, kappa, ell):
    """A straight-line idempotent is violated iff a black strand is leftmost."""
    if ell == 0:
        return len(i_seq) > 0
    return kappa[0] > 0


# ---------------------------------------------------------------------------
# triples and words


@dataclass(frozen=True)
class StendhalTriple:
    """Bottom datum: black labels, red weight list, red positions."""

    i_seq: tuple
    lam: tuple
    kappa: tuple
    mult: tuple = None

    def __post_init__(self):
        n, ell = len(self.i_seq), len(self.lam)
        if len(self.kappa) != ell:
            raise ValueError("kappa length must match the red list")
        if any(self.kappa[k] > self.kappa[k + 1] for k in range(ell - 1)):
            raise ValueError("kappa must be weakly increasing")
        if ell and (self.kappa[0] < 0 or self.kappa[-1] > n):
            raise ValueError("kappa values must lie in [0, n]")
        if self.mult is not None and len(self.mult) != n:
            raise ValueError("multiplicity vector must match the black list")

    @property
    def n(self):
        return len(self.i_seq)

    @property
    def ell(self):
        return len(self.lam)

    def seq(self):
        return build_seq(self.i_seq, self.kappa, self.ell)


@dataclass(frozen=True)
class DiagramWord:
    """A stacked word of elementary events over a bottom triple.

    events run bottom to top: ("cross", p) crosses slots p, p+1 and
    ("dot", s) puts a dot on the strand at slot s.
    """

    bottom: StendhalTriple
    events: tuple

    def __post_init__(self):
        seq = list(self.bottom.seq())
        for kind, arg in self.events:
            if kind == "cross":
                if not 0 <= arg < len(seq) - 1:
                    raise ValueError("crossing slot out of range")
                if seq[arg][0] == "r" and seq[arg + 1][0] == "r":
                    raise ValueError("red strands may not cross")
                seq[arg], seq[arg + 1] = seq[arg + 1], seq[arg]
            elif kind == "dot":
                if not 0 <= arg < len(seq):
                    raise ValueError("dot slot out of range")
                if seq[arg][0] == "r":
                    raise ValueError("dot on a red strand")
            else:
                raise ValueError("unknown event %r" % (kind,))

    def top_arrangement(self):
        seq = list(self.bottom.seq())
        for kind, arg in self.events:
            if kind == "cross":
                seq[arg], seq[arg + 1] = seq[arg + 1], seq[arg]
        return tuple(seq)


# ---------------------------------------------------------------------------
# elements


class AlgElement:
    """Finite combination of canonical basis keys.

    Keys are (i_bot, kappa_bot, sigma, dots) with sigma the bottom-to-top
    slot permutation and dots indexed by bottom black strands.  Values
    are exact Fractions (integral for everything the relations produce).
    """

    __slots__ = ("alg", "terms")

    def __init__(self, alg, terms=None):
        self.alg = alg
        self.terms = {}
        if terms:
            for k, v in terms.items():
                if v:
                    self.terms[k] = v

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, AlgElement)
            and self.alg is other.alg
            and self.terms == other.terms
        )

    def __hash__(self):
        raise TypeError("AlgElement is unhashable")

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            w = out.get(k, 0) + v
            if w:
                out[k] = w
            elif k in out:
                del out[k]
        return AlgElement(self.alg, out)

    def __neg__(self):
        return AlgElement(self.alg, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar):
        if isinstance(scalar, (int, Fraction)):
            return AlgElement(self.alg, {k: scalar * v for k, v in self.terms.items()})
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgElement(self.alg, {k: v * other for k, v in self.terms.items()})
        return self.alg.multiply(self, other)

    def degree_terms(self):
        """Split into degree -> sub-element (scaled degrees)."""
        out = {}
        for key, c in self.terms.items():
            d = self.alg.key_degree(key)
            out.setdefault(d, {})[key] = c
        return {d: AlgElement(self.alg, t) for d, t in sorted(out.items())}

    def render_words(self):
        """A word realization of each key: bottom dots then crossings."""
        out = []
        for (i_bot, k_bot, sigma, dots), c in sorted(self.terms.items()):
            trip = StendhalTriple(i_bot, self.alg.lam, k_bot)
            bsl = _black_slots(trip.seq())
            events = []
            for b, a in enumerate(dots):
                events.extend([("dot", bsl[b])] * a)
            events.extend(("cross", p) for p in _lexword(sigma))
            out.append((c, DiagramWord(trip, tuple(events))))
        return out

    def to_json_obj(self):
        items = []
        for key, c in sorted(self.terms.items()):
            d = self.alg.key_json(key)
            d["coeff"] = (
                int(c) if c.denominator == 1 else [c.numerator, c.denominator]
            )
            items.append(d)
        return {"terms": items}


def _acc(table, key, val):
    w = table.get(key, 0) + val
    if w:
        table[key] = w
    elif key in table:
        del table[key]


# ---------------------------------------------------------------------------
# the straightening engine


class StendhalAlgebra:
    """Straightening engine over a fixed red-strand weight list."""

    def __init__(self, datum, lam, qmatrix=None):
        self.datum = datum
        self.lam = tuple(lam)
        for w in self.lam:
            if not isinstance(w, WeightVec) or not w.is_dominant():
                raise ValueError("red labels must be dominant weights")
        self.q = qmatrix if qmatrix is not None else QMatrix.standard(datum)
        self.scale = datum.scale
        self._letter_memo = {}
        self._dot_memo = {}
        self._path_memo = {}
        # scaled degree constants per node pair
        r = datum.rank
        self._dot_deg = [datum.alpha(i).scaled_pairing(datum.alpha(i)) for i in range(r)]
        self._bb_deg = [
            [-datum.alpha(i).scaled_pairing(datum.alpha(j)) for j in range(r)]
            for i in range(r)
        ]
        self._rb_deg = [
            [lamk.scaled_pairing(datum.alpha(i)) for i in range(r)] for lamk in self.lam
        ]

    @property
    def ell(self):
        return len(self.lam)

    # -- degrees ----------------------------------------------------------

    def _cross_deg(self, e1, e2):
        if e1[0] == "b" and e2[0] == "b":
            return self._bb_deg[e1[1]][e2[1]]
        if e1[0] == "r" and e2[0] == "r":
            raise ValueError("red strands may not cross")
        red, black = (e1, e2) if e1[0] == "r" else (e2, e1)
        return self._rb_deg[red[1]][black[1]]

    def degree(self, dw):
        """Scaled degree of a diagram word (q-power times datum.scale)."""
        seq = list(dw.bottom.seq())
        total = 0
        for kind, arg in dw.events:
            if kind == "cross":
                total += self._cross_deg(seq[arg], seq[arg + 1])
                seq[arg], seq[arg + 1] = seq[arg + 1], seq[arg]
            else:
                total += self._dot_deg[seq[arg][1]]
        return total

    def sigma_degree(self, seq, sigma):
        N = len(sigma)
        total = 0
        for a in range(N):
            for b in range(a + 1, N):
                if sigma[a] > sigma[b]:
                    total += self._cross_deg(seq[a], seq[b])
        return total

    def key_degree(self, key):
        i_bot, k_bot, sigma, dots = key
        seq = build_seq(i_bot, k_bot, self.ell)
        total = self.sigma_degree(seq, sigma)
        for b, a in enumerate(dots):
            total += a * self._dot_deg[i_bot[b]]
        return total

    # -- idempotents and generators ---------------------------------------

    def idempotent(self, i_seq, kappa):
        i_seq, kappa = tuple(i_seq), tuple(kappa)
        StendhalTriple(i_seq, self.lam, kappa)
        N = len(i_seq) + self.ell
        key = (i_seq, kappa, tuple(range(N)), (0,) * len(i_seq))
        return AlgElement(self, {key: 1})

    def dot_gen(self, i_seq, kappa, black):
        i_seq, kappa = tuple(i_seq), tuple(kappa)
        dots = tuple(int(b == black) for b in range(len(i_seq)))
        if len(dots) <= black:
            raise ValueError("black index out of range")
        N = len(i_seq) + self.ell
        key = (i_seq, kappa, tuple(range(N)), dots)
        return AlgElement(self, {key: 1})

    def crossing_gen(self, i_seq, kappa, p):
        i_seq, kappa = tuple(i_seq), tuple(kappa)
        trip = StendhalTriple(i_seq, self.lam, kappa)
        seq = trip.seq()
        if seq[p][0] == "r" and seq[p + 1][0] == "r":
            raise ValueError("red strands may not cross")
        sigma = _swap_top(tuple(range(len(seq))), p)
        key = (i_seq, kappa, sigma, (0,) * len(i_seq))
        return AlgElement(self, {key: 1})

    def top_idem(self, key):
        """(I, kappa) of the top arrangement of a canonical key."""
        i_bot, k_bot, sigma, _ = key
        seq = build_seq(i_bot, k_bot, self.ell)
        top = [None] * len(seq)
        for s, e in enumerate(seq):
            top[sigma[s]] = e
        i_top = tuple(e[1] for e in top if e[0] == "b")
        kappa_top = []
        blacks = 0
        for e in top:
            if e[0] == "b":
                blacks += 1
            else:
                kappa_top.append(blacks)
        return i_top, tuple(kappa_top)

    def key_json(self, key):
        i_bot, k_bot, sigma, dots = key
        seq = build_seq(i_bot, k_bot, self.ell)
        bsl = _black_slots(seq)
        i_top, kappa_top = self.top_idem(key)
        # w maps bottom black position to top black position, 1-indexed
        top_black_slots = sorted(sigma[s] for s in bsl)
        w = [top_black_slots.index(sigma[s]) + 1 for s in bsl]
        return {
            "w": w,
            "kappa_top": list(kappa_top),
            "kappa_bot": list(k_bot),
            "i": [x + 1 for x in i_bot],
            "dots": list(dots),
        }

    # -- rewrite templates --------------------------------------------------

    def _move_path(self, start, target):
        """Braid events along a move path between two reduced words.

        Returns a tuple of (word_before, h, sign); commutations are
        exact so only braid moves are recorded.
        """
        memo = self._path_memo
        hit = memo.get((start, target))
        if hit is not None:
            return hit
        if start == target:
            memo[(start, target)] = ()
            return ()
        parents = {start: None}
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            if cur == target:
                break
            for nxt in _word_moves(cur):
                if nxt not in parents:
                    parents[nxt] = cur
                    queue.append(nxt)
        else:
            raise RuntimeError("reduced words not connected; bug")
        chain = []
        node = target
        while node is not None:
            chain.append(node)
            node = parents[node]
        chain.reverse()
        events = []
        for prev, new in zip(chain, chain[1:]):
            h = 0
            while prev[h] == new[h]:
                h += 1
            if prev[h + 1 : h + 2] == new[h : h + 1] and len(prev) >= h + 3 and prev[h] == prev[h + 2]:
                sign = 1 if prev[h] < prev[h + 1] else -1
                events.append((prev, h, sign))
            # otherwise a commutation: exact
        out = tuple(events)
        memo[(start, target)] = out
        return out

    def _braid_corr(self, seq, word, h):
        """Terms replacing the braid triple at height h of word."""
        N = len(seq)
        p = min(word[h], word[h + 1])
        pre, post = word[:h], word[h + 3 :]
        sig_h = _word_perm(pre, N)
        inv_h = {v: s for s, v in enumerate(sig_h)}
        s1, s2, s3 = inv_h[p], inv_h[p + 1], inv_h[p + 2]
        l1, l2, l3 = seq[s1], seq[s2], seq[s3]
        out = {}

        def add(powers, coeff):
            items = [("x", q) for q in pre]
            for slot, pw in powers:
                items.extend([("y", slot)] * pw)
            items.extend(("x", q) for q in post)
            for k, v in self._push_items(seq, items).items():
                _acc(out, k, coeff * v)

        if l2[0] == "r":
            if l1[0] == "b" and l3[0] == "b" and l1[1] == l3[1]:
                tot = self.lam[l2[1]].coords[l1[1]]
                for a in range(tot):
                    add(((p + 2, a), (p, tot - 1 - a)), 1)
        elif l1[0] == "b" and l2[0] == "b" and l3[0] == "b":
            if l1[1] == l3[1]:
                i, j = l1[1], l2[1]
                for (k, m), qc in self.q.poly(i, j).items():
                    # (u3^k - u1^k)/(u3 - u1), v stays on the middle slot
                    for s in range(k):
                        add(((p + 2, s), (p, k - 1 - s), (p + 1, m)), qc)
        # an outer red strand crossing corner to corner is exact
        return out

    def _letter_template(self, seq, sigma, p):
        key = (seq, sigma, p)
        hit = self._letter_memo.get(key)
        if hit is not None:
            return hit
        inv = {v: s for s, v in enumerate(sigma)}
        su, sv = inv[p], inv[p + 1]
        if seq[su][0] == "r" and seq[sv][0] == "r":
            raise ValueError("red strands may not cross")
        nb = len(_black_slots(seq))
        zero = (0,) * nb
        sigma2 = _swap_top(sigma, p)
        out = {}
        if _inv_count(sigma2) == _inv_count(sigma) + 1:
            start = _lexword(sigma) + (p,)
            target = _lexword(sigma2)
            _acc(out, (sigma2, zero), 1)
            for word, h, sign in self._move_path(start, target):
                for k, v in self._braid_corr(seq, word, h).items():
                    _acc(out, k, sign * v)
        else:
            # psi_p on a descent: express the key through the shorter
            # permutation, square the top letter into a bigon, and push
            # the loose corrections back up through psi_p
            up = self._letter_template(seq, sigma2, p)
            lu, lv = seq[sigma2.index(p)], seq[sigma2.index(p + 1)]
            start_elem = {(sigma2, zero): 1}
            if lu[0] == "b" and lv[0] == "b":
                if lu[1] != lv[1]:
                    for (k, m), qc in self.q.poly(lu[1], lv[1]).items():
                        items = [("y", p)] * k + [("y", p + 1)] * m
                        for kk, v in self._push_items(seq, items, start_elem).items():
                            _acc(out, kk, qc * v)
                # same label: the bigon vanishes
            else:
                red, bslot = (lu, p + 1) if lu[0] == "r" else (lv, p)
                black = lv if lu[0] == "r" else lu
                power = self.lam[red[1]].coords[black[1]]
                items = [("y", bslot)] * power
                for kk, v in self._push_items(seq, items, start_elem).items():
                    _acc(out, kk, v)
            for sc, dc, vc in up:
                if sc == sigma and not any(dc):
                    continue
                for s3, d3, c3 in self._letter_template(seq, sc, p):
                    _acc(out, (s3, tuple(x + y for x, y in zip(dc, d3))), -vc * c3)
        result = tuple(
            (s, d, c) for (s, d), c in sorted(out.items(), key=lambda kv: kv[0]) if c
        )
        self._letter_memo[key] = result
        return result

    def _dot_template(self, seq, sigma, t):
        key = (seq, sigma, t)
        hit = self._dot_memo.get(key)
        if hit is not None:
            return hit
        strand = sigma.index(t)
        if seq[strand][0] == "r":
            raise ValueError("dot on a red strand")
        word = _lexword(sigma)
        N = len(seq)
        sigs = [tuple(range(N))]
        for p in word:
            sigs.append(_swap_top(sigs[-1], p))
        out = {}
        s = t
        for j in range(len(word) - 1, -1, -1):
            p = word[j]
            if s != p and s != p + 1:
                continue
            below = sigs[j]
            u, v = below.index(p), below.index(p + 1)
            other = v if u == strand else u
            lo = seq[other]
            le = seq[strand]
            if le[0] == "b" and lo[0] == "b" and le[1] == lo[1]:
                sign = 1 if s == p else -1
                rest = [("x", q) for q in word[:j] + word[j + 1 :]]
                for k, v2 in self._push_items(seq, rest).items():
                    _acc(out, k, sign * v2)
            s = p + 1 if s == p else p
        assert s == strand
        bsl = _black_slots(seq)
        einc = tuple(int(x == strand) for x in bsl)
        _acc(out, (sigma, einc), 1)
        result = tuple(
            (sg, d, c) for (sg, d), c in sorted(out.items(), key=lambda kv: kv[0]) if c
        )
        self._dot_memo[key] = result
        return result

    def _push_items(self, seq, items, start=None):
        nb = len(_black_slots(seq))
        if start is None:
            elem = {(tuple(range(len(seq))), (0,) * nb): 1}
        else:
            elem = dict(start)
        for kind, arg in items:
            new = {}
            for (sigma, dots), c in elem.items():
                if kind == "x":
                    terms = self._letter_template(seq, sigma, arg)
                else:
                    terms = self._dot_template(seq, sigma, arg)
                for s2, dinc, c2 in terms:
                    if any(dinc):
                        dots2 = tuple(map(int.__add__, dots, dinc))
                    else:
                        dots2 = dots
                    k2 = (s2, dots2)
                    w = new.get(k2)
                    if w is None:
                        new[k2] = c * c2
                    else:
                        w += c * c2
                        if w:
                            new[k2] = w
                        else:
                            del new[k2]
            elem = new
            if not elem:
                break
        return elem

    # -- public operations --------------------------------------------------

    def straighten(self, dw):
        """Expand a diagram word in the canonical basis."""
        if tuple(dw.bottom.lam) != self.lam:
            raise ValueError("word belongs to a different red list")
        i_bot, k_bot = tuple(dw.bottom.i_seq), tuple(dw.bottom.kappa)
        seq = dw.bottom.seq()
        items = [("x" if k == "cross" else "y", a) for k, a in dw.events]
        folded = self._push_items(seq, items)
        return AlgElement(
            self, {(i_bot, k_bot, s, d): c for (s, d), c in folded.items()}
        )

    def multiply(self, a, b):
        """Stack a on top of b and straighten; mismatched tops give 0."""
        if a.alg is not self or b.alg is not self:
            raise ValueError("elements from a different algebra")
        out = {}
        for (i_b, k_b, sig_b, dots_b), cb in b.terms.items():
            seq = build_seq(i_b, k_b, self.ell)
            top = self.top_idem((i_b, k_b, sig_b, dots_b))
            top_bsl = _black_slots(build_seq(top[0], top[1], self.ell))
            for (i_a, k_a, sig_a, dots_a), ca in a.terms.items():
                if (i_a, k_a) != top:
                    continue
                items = []
                for bl, cnt in enumerate(dots_a):
                    items.extend([("y", top_bsl[bl])] * cnt)
                items.extend(("x", p) for p in _lexword(sig_a))
                folded = self._push_items(
                    seq, items, {(sig_b, dots_b): 1}
                )
                for (s2, d2), c2 in folded.items():
                    _acc(out, (i_b, k_b, s2, d2), ca * cb * c2)
        return AlgElement(self, out)

    def divided_power_idempotent(self, i_seq, kappa, groups):
        """Idempotent projecting onto divided-power blocks.

        groups lists (start_black, size); each group must consist of
        equal labels on adjacent slots.  Built as the staircase
        psi_{w0} y_1^{s-1} ... y_{s-1} on each group.
        """
        trip = StendhalTriple(tuple(i_seq), self.lam, tuple(kappa))
        seq = trip.seq()
        bsl = _black_slots(seq)
        events = []
        for start, size in groups:
            slots = [bsl[start + t] for t in range(size)]
            if any(slots[t + 1] - slots[t] != 1 for t in range(size - 1)):
                raise ValueError("divided-power group must be adjacent")
            if len({i_seq[start + t] for t in range(size)}) != 1:
                raise ValueError("divided-power group must share one label")
            for t in range(size):
                events.extend([("dot", slots[t])] * (size - 1 - t))
            base = slots[0]
            # longest element on the group, built from adjacent swaps
            for width in range(1, size):
                for p in range(base + width - 1, base - 1, -1):
                    events.append(("cross", p))
        return self.straighten(DiagramWord(trip, tuple(events)))


# ---------------------------------------------------------------------------
# weight blocks


def _alpha_counts(datum, lam, mu):
    """Express sum(lam) - mu in simple roots; None when not a nonneg
    integer combination."""
    rhs = datum.zero()
    for w in lam:
        rhs = rhs + w
    rhs = rhs - mu
    inv = datum.inverse_cartan()
    counts = []
    for j in range(datum.rank):
        a = sum(Fraction(inv[j][i]) * rhs.coords[i] for i in range(datum.rank))
        if a.denominator != 1 or a < 0:
            return None
        counts.append(int(a))
    return counts


def _frac_rref(rows, width, modulus=None):
    """Reduced row echelon form over Fraction or GF(modulus)."""
    if modulus is None:
        mat = [[Fraction(x) for x in r] for r in rows]
    else:
        mat = [[int(x.numerator * pow(x.denominator, -1, modulus)) % modulus for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(width):
        pr = None
        for rr in range(r, len(mat)):
            if mat[rr][c]:
                pr = rr
                break
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        if modulus is None:
            pv = mat[r][c]
            mat[r] = [x / pv for x in mat[r]]
        else:
            pv = pow(mat[r][c], -1, modulus)
            mat[r] = [(x * pv) % modulus for x in mat[r]]
        for rr in range(len(mat)):
            if rr != r and mat[rr][c]:
                f = mat[rr][c]
                if modulus is None:
                    mat[rr] = [a - f * b for a, b in zip(mat[rr], mat[r])]
                else:
                    mat[rr] = [(a - f * b) % modulus for a, b in zip(mat[rr], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[: len(pivots)], pivots


class TLambdaBlock:
    """One weight block of the quotient algebra, built degree by degree."""

    def __init__(self, algebra, mu, window, modulus=None):
        self.alg = algebra
        self.datum = algebra.datum
        self.lam = algebra.lam
        self.mu = mu
        self.modulus = modulus
        self.certified = modulus is None
        counts = _alpha_counts(self.datum, self.lam, mu)
        self.empty = counts is None
        self._basis_cache = {}
        self._sigma_cache = {}
        self._mindeg_cache = {}
        self._ideal_cache = {}
        self._oracle_cache = {}
        if self.empty:
            self.idems = []
            self.valid_idems = []
            self.window = (0, -1) if window == "auto" else window
            self.corner_dims = {}
            return
        self.counts = counts
        self.n = sum(counts)
        labels = []
        for i, c in enumerate(counts):
            labels.extend([i] * c)
        iseqs = sorted(set(itertools.permutations(labels)))
        kappas = list(
            itertools.combinations_with_replacement(range(self.n + 1), algebra.ell)
        )
        self.idems = sorted((k, i) for i in iseqs for k in kappas)
        self.idems = [(i, k) for (k, i) in self.idems]
        self.valid_idems = [
            (i, k) for (i, k) in self.idems if not is_violated(i, k, algebra.ell)
        ]
        if window == "auto":
            lo = min(
                self._min_sigma_degree(bot, top)
                for bot in self.idems
                for top in self.idems
            )
            hi = lo - 1
            for bot in self.idems:
                for top in self.idems:
                    orc = self.oracle(bot, top)
                    if not orc.is_zero():
                        hi = max(hi, orc.max_exp())
            hi = max(hi, lo, 0)
            self.window = (lo, hi)
        else:
            self.window = tuple(window)
        self.corner_dims = {}
        self._build_and_gate()

    # -- oracles ------------------------------------------------------------

    def oracle(self, bot, top):
        key = (bot, top)
        hit = self._oracle_cache.get(key)
        if hit is not None:
            return hit
        tb = pword_tokens(bot[0], bot[1], self.alg.ell)
        tt = pword_tokens(top[0], top[1], self.alg.ell)
        if tb is None or tt is None:
            val = ScaledLaurent.zero(self.alg.scale)
        else:
            val = tensor_form(self.datum, self.lam, tb, tt)
        self._oracle_cache[key] = val
        return val

    # -- tilde basis ----------------------------------------------------------

    def _sigmas(self, bot, top):
        key = (bot, top)
        hit = self._sigma_cache.get(key)
        if hit is not None:
            return hit
        seq_b = build_seq(bot[0], bot[1], self.alg.ell)
        seq_t = build_seq(top[0], top[1], self.alg.ell)
        N = len(seq_b)
        red_t = [s for s, e in enumerate(seq_t) if e[0] == "r"]
        black_t = [s for s, e in enumerate(seq_t) if e[0] == "b"]
        out = []
        bsl = _black_slots(seq_b)
        for assign in itertools.permutations(range(len(black_t))):
            ok = all(
                seq_t[black_t[assign[b]]][1] == seq_b[bsl[b]][1]
                for b in range(len(bsl))
            )
            if not ok:
                continue
            sigma = [None] * N
            ri = 0
            for s, e in enumerate(seq_b):
                if e[0] == "r":
                    sigma[s] = red_t[e[1]]
                else:
                    sigma[s] = black_t[assign[bsl.index(s)]]
            out.append(tuple(sigma))
        out = sorted(set(out))
        self._sigma_cache[key] = out
        return out

    def _min_sigma_degree(self, bot, top):
        key = (bot, top)
        hit = self._mindeg_cache.get(key)
        if hit is None:
            seq_b = build_seq(bot[0], bot[1], self.alg.ell)
            hit = min(self.alg.sigma_degree(seq_b, s) for s in self._sigmas(bot, top))
            self._mindeg_cache[key] = hit
        return hit

    def tilde_basis(self, bot, top, d):
        """Ordered basis keys (sigma, dots) of the free corner in degree d."""
        key = (bot, top, d)
        hit = self._basis_cache.get(key)
        if hit is not None:
            return hit
        seq_b = build_seq(bot[0], bot[1], self.alg.ell)
        weights = [self.alg._dot_deg[i] for i in bot[0]]
        out = []
        for sigma in self._sigmas(bot, top):
            rem = d - self.alg.sigma_degree(seq_b, sigma)
            if rem < 0:
                continue
            for dots in _weighted_fills(weights, rem):
                out.append((sigma, dots))
        out.sort()
        self._basis_cache[key] = out
        return out

    # -- the violation ideal ---------------------------------------------------

    def _ideal(self, bot, top, d):
        key = (bot, top, d)
        hit = self._ideal_cache.get(key)
        if hit is not None:
            return hit
        basis = self.tilde_basis(bot, top, d)
        index = {k: i for i, k in enumerate(basis)}
        rows = []
        seen = set()
        seq_b = build_seq(bot[0], bot[1], self.alg.ell)
        for v in self.idems:
            if not is_violated(v[0], v[1], self.alg.ell):
                continue
            lo_up = self._min_sigma_degree(v, top)
            lo_dn = self._min_sigma_degree(bot, v)
            v_bsl = _black_slots(build_seq(v[0], v[1], self.alg.ell))
            for d_up in range(lo_up, d - lo_dn + 1):
                ups = self.tilde_basis(v, top, d_up)
                dns = self.tilde_basis(bot, v, d - d_up)
                for sig_u, dots_u in ups:
                    items = []
                    for bl, cnt in enumerate(dots_u):
                        items.extend([("y", v_bsl[bl])] * cnt)
                    items.extend(("x", p) for p in _lexword(sig_u))
                    for sig_d, dots_d in dns:
                        folded = self.alg._push_items(
                            seq_b, items, {(sig_d, dots_d): 1}
                        )
                        vec = [0] * len(basis)
                        for k2, c2 in folded.items():
                            vec[index[k2]] += c2
                        t = tuple(vec)
                        if any(t) and t not in seen:
                            seen.add(t)
                            rows.append(list(t))
        red, pivots = _frac_rref(rows, len(basis), self.modulus)
        self._ideal_cache[key] = (red, pivots)
        return red, pivots

    def corner_dim(self, bot, top, d):
        basis = self.tilde_basis(bot, top, d)
        if not basis:
            return 0
        _, pivots = self._ideal(bot, top, d)
        return len(basis) - len(pivots)

    # -- build and gate ----------------------------------------------------------

    def _build_and_gate(self):
        lo, hi = self.window
        for bot in self.idems:
            for top in self.idems:
                orc = self.oracle(bot, top)
                if not orc.is_zero() and (orc.min_exp() < lo or orc.max_exp() > hi):
                    raise BlockOracleError(
                        "oracle support escapes the degree window at corner "
                        "%r -> %r" % (bot, top)
                    )
                terms = []
                for d in range(lo, hi + 1):
                    k = self.corner_dim(bot, top, d)
                    if k:
                        terms.append((d, k))
                got = ScaledLaurent(self.alg.scale, terms)
                if got != orc:
                    raise BlockOracleError(
                        "corner %r -> %r has graded dimension %s, oracle %s"
                        % (bot, top, got.render(), orc.render())
                    )
                self.corner_dims[(bot, top)] = got

    # -- classes ------------------------------------------------------------------

    def dim_q(self, bot=None, top=None):
        if bot is not None:
            return self.corner_dims[(bot, top)]
        total = ScaledLaurent.zero(self.alg.scale)
        for v in self.corner_dims.values():
            total = total + v
        return total

    def class_basis(self, bot, top, d):
        basis = self.tilde_basis(bot, top, d)
        _, pivots = self._ideal(bot, top, d)
        piv = set(pivots)
        return [k for i, k in enumerate(basis) if i not in piv]

    def reduce(self, elem):
        """Canonical representative of the class of elem in the block."""
        if elem.alg is not self.alg:
            raise ValueError("element from a different algebra")
        if self.modulus is not None:
            raise ValueError(
                "class reduction needs the exact block; rebuild without modulus"
            )
        groups = {}
        for key, c in elem.terms.items():
            i_bot, k_bot, sigma, dots = key
            bot = (i_bot, k_bot)
            top = self.alg.top_idem(key)
            d = self.alg.key_degree(key)
            groups.setdefault((bot, top, d), {})[(sigma, dots)] = c
        out = {}
        for (bot, top, d), vecmap in groups.items():
            basis = self.tilde_basis(bot, top, d)
            index = {k: i for i, k in enumerate(basis)}
            vec = [Fraction(0)] * len(basis)
            for k, c in vecmap.items():
                vec[index[k]] += c
            red, pivots = self._ideal(bot, top, d)
            for row, pc in zip(red, pivots):
                f = vec[pc]
                if f:
                    vec = [a - f * b for a, b in zip(vec, row)]
            for i, c in enumerate(vec):
                if c:
                    out[(bot[0], bot[1], basis[i][0], basis[i][1])] = c
        return AlgElement(self.alg, out)

    def is_zero_class(self, elem):
        return self.reduce(elem).is_zero()

    # -- export --------------------------------------------------------------------

    def generator_action_tables(self):
        """Left action of dots and crossings on the class basis, per corner."""
        tables = []
        if self.modulus is not None:
            return tables
        lo, hi = self.window
        for bot in self.valid_idems:
            for top in self.valid_idems:
                for d in range(lo, hi + 1):
                    cls = self.class_basis(bot, top, d)
                    if not cls:
                        continue
                    for gen in self._corner_generators(top):
                        gname, gel, gtop, gdeg = gen
                        d2 = d + gdeg
                        if not (lo <= d2 <= hi):
                            continue
                        target = self.class_basis(bot, gtop, d2)
                        tindex = {k: i for i, k in enumerate(target)}
                        mat = []
                        for sigma, dots in cls:
                            rep = AlgElement(
                                self.alg,
                                {(bot[0], bot[1], sigma, dots): 1},
                            )
                            prod = self.reduce(self.alg.multiply(gel, rep))
                            row = [0] * len(target)
                            for key2, c2 in prod.terms.items():
                                row[tindex[(key2[2], key2[3])]] = (
                                    int(c2) if c2.denominator == 1 else str(c2)
                                )
                            mat.append(row)
                        if any(any(r) for r in mat):
                            tables.append(
                                {
                                    "bottom": _idem_json(bot),
                                    "top": _idem_json(top),
                                    "degree": d,
                                    "generator": gname,
                                    "target_top": _idem_json(gtop),
                                    "matrix": mat,
                                }
                            )
        return tables

    def _corner_generators(self, idem):
        i_seq, kappa = idem
        seq = build_seq(i_seq, kappa, self.alg.ell)
        out = []
        for b in range(len(i_seq)):
            el = self.alg.dot_gen(i_seq, kappa, b)
            out.append(
                ({"type": "dot", "black": b}, el, idem, self.alg._dot_deg[i_seq[b]])
            )
        for p in range(len(seq) - 1):
            if seq[p][0] == "r" and seq[p + 1][0] == "r":
                continue
            el = self.alg.crossing_gen(i_seq, kappa, p)
            (key,) = el.terms
            gtop = self.alg.top_idem(key)
            out.append(
                (
                    {"type": "cross", "slot": p},
                    el,
                    gtop,
                    self.alg._cross_deg(seq[p], seq[p + 1]),
                )
            )
        return out

    def export_json(self):
        corners = []
        for bot in self.valid_idems:
            for top in self.valid_idems:
                dq = self.corner_dims.get((bot, top))
                if dq is None or dq.is_zero():
                    continue
                lo, hi = self.window
                bas = {}
                for d in range(lo, hi + 1):
                    cls = self.class_basis(bot, top, d)
                    if cls:
                        bas[str(d)] = [
                            self.alg.key_json((bot[0], bot[1], s, dd)) for s, dd in cls
                        ]
                corners.append(
                    {
                        "bottom": _idem_json(bot),
                        "top": _idem_json(top),
                        "dim_q": dq.to_json(),
                        "basis": bas,
                    }
                )
        obj = {
            "labels": [list(w.coords) for w in self.lam],
            "mu": list(self.mu.coords),
            "scale": self.alg.scale,
            "window": list(self.window),
            "certified": self.certified,
            "corners": corners,
            "generator_action": self.generator_action_tables(),
        }
        return json.dumps(obj, sort_keys=True, indent=1)


def _idem_json(idem):
    return {"i": [x + 1 for x in idem[0]], "kappa": list(idem[1])}


def _weighted_fills(weights, total):
    """All nonneg integer tuples a with sum a_b * weights[b] == total."""
    if not weights:
        if total == 0:
            yield ()
        return
    w = weights[0]
    top = total // w if w > 0 else 0
    for a in range(top + 1):
        for rest in _weighted_fills(weights[1:], total - a * w):
            yield (a,) + rest


def build_tlambda_block(datum, lam, mu, degree_window="auto", qmatrix=None, modulus=None):
    """Build one weight block of the quotient algebra.

    modulus switches row reduction to GF(modulus); the result is then
    marked non-certifying (certified=False).
    """
    alg = StendhalAlgebra(datum, lam, qmatrix)
    return TLambdaBlock(alg, mu, degree_window, modulus)


def corner_iso_checks(block):
    """Structural cross-checks of a built block against smaller data.

    Verifies the far-right red corner against the one-fewer-reds
    algebra, the single-red identification with the cyclotomic quotient
    (the defining dot-power relation), and the ground-field degeneration
    for an empty red list.  Returns a report dict; ok is the conjunction.
    """
    checks = []
    alg = block.alg
    if block.empty:
        return {"ok": True, "checks": [{"name": "empty-weight", "ok": True}]}
    if alg.ell == 0:
        ok = True
        if block.n == 0:
            got = block.dim_q()
            ok = got == ScaledLaurent.one(alg.scale)
        else:
            ok = block.dim_q().is_zero()
        checks.append({"name": "ground-field", "ok": ok})
    if alg.ell == 1 and block.modulus is None:
        ok = True
        detail = []
        for i_seq, kappa in block.valid_idems:
            if block.n == 0:
                continue
            power = alg.lam[0].coords[i_seq[0]]
            dw = DiagramWord(
                StendhalTriple(i_seq, alg.lam, kappa),
                (("dot", 1),) * power,
            )
            el = alg.straighten(dw)
            dead = block.is_zero_class(el)
            detail.append({"i": list(i_seq), "dies": dead})
            ok = ok and dead
        checks.append({"name": "cyclotomic-dot-power", "ok": ok, "detail": detail})
    if alg.ell >= 1:
        sub = build_tlambda_block(
            block.datum,
            alg.lam[:-1],
            block.mu - alg.lam[-1],
            modulus=block.modulus,
        )
        ok = True
        detail = []
        for bot in block.valid_idems:
            if bot[1][-1] != block.n:
                continue
            for top in block.valid_idems:
                if top[1][-1] != block.n:
                    continue
                big = block.corner_dims[(bot, top)]
                sbot = (bot[0], bot[1][:-1])
                stop = (top[0], top[1][:-1])
                small = (
                    sub.corner_dims.get((sbot, stop), ScaledLaurent.zero(alg.scale))
                    if not sub.empty
                    else ScaledLaurent.zero(alg.scale)
                )
                same = big == small
                ok = ok and same
                if not same:
                    detail.append({"bottom": _idem_json(bot), "top": _idem_json(top)})
        checks.append({"name": "far-right-red", "ok": ok, "detail": detail})
    return {"ok": all(c["ok"] for c in checks), "checks": checks}
