"""Integrable representations of the quantized enveloping algebra,
tensor-product word calculus, braidings, and a semisimple tangle
evaluator used as the decategorified reference.

Scalars are exact: ScaledLaurent where possible, RationalScalar where
inverses of quantum numbers appear.  The exponent scale is always
``datum.scale``.
"""

from .qring import (
    RationalScalar,
    ScaledLaurent,
    qnum,
    rational_solve,
    rref,
)
from .rootdata import WeightVec, dual_weight, rho_pair

# ------------------------------------------------------------------ irreps


class Irrep:
    """Finite-dimensional irreducible with an explicit weight basis.

    Basis vectors are images of lowering-operator words applied to the
    highest weight vector; index 0 is the highest weight vector.
    """

    __slots__ = ("datum", "lam", "dim", "weights", "words", "f", "e", "_windex")

    def __init__(self, datum, lam, weights, words, f, e):
        self.datum = datum
        self.lam = lam
        self.dim = len(weights)
        self.weights = weights
        self.words = words
        self.f = f  # f[i][col] = {row: scalar}
        self.e = e
        self._windex = {w: k for k, w in enumerate(words)}

    @property
    def hw_index(self):
        return 0

    def lowest_index(self):
        # lowest weight is w0(lam) = -dual_weight(lam)
        target = -dual_weight(self.datum, self.lam)
        cands = [k for k, w in enumerate(self.weights) if w == target]
        assert len(cands) == 1
        return cands[0]

    def weight_space(self, mu):
        return [k for k, w in enumerate(self.weights) if w == mu]


def _qi(datum, i, n):
    return qnum(datum.scale, n, d=datum.d[i])


class _FormCalc:
    """Contravariant form on lowering words over one highest weight."""

    def __init__(self, datum, lam):
        self.datum = datum
        self.lam = lam
        self.cache = {}

    def weight_of(self, word):
        v = self.lam
        for i in word:
            v = v - self.datum.alpha(i)
        return v

    def e_apply(self, i, word):
        """E_i on a lowering word, as {word: ScaledLaurent}."""
        out = {}
        if not word:
            return out
        j, rest = word[0], word[1:]
        for w, c in self.e_apply(i, rest).items():
            key = (j,) + w
            out[key] = out.get(key, ScaledLaurent.zero(self.datum.scale)) + c
        if j == i:
            n = self.weight_of(rest).coord(i)
            c = _qi(self.datum, i, n)
            out[rest] = out.get(rest, ScaledLaurent.zero(self.datum.scale)) + c
        return {w: c for w, c in out.items() if not c.is_zero()}

    def pair(self, w1, w2):
        key = (w1, w2)
        if key in self.cache:
            return self.cache[key]
        if len(w1) != len(w2):
            val = ScaledLaurent.zero(self.datum.scale)
        elif not w1:
            val = ScaledLaurent.one(self.datum.scale)
        else:
            i, rest = w1[0], w1[1:]
            val = ScaledLaurent.zero(self.datum.scale)
            for w, c in self.e_apply(i, w2).items():
                val = val + c * self.pair(rest, w)
        self.cache[key] = val
        return val


_IRREP_CACHE = {}


def build_irrep(datum, lam):
    """Construct the irreducible with highest weight lam.

    Weight-space dimensions are ranks of the contravariant Gram matrix
    on spanning lowering words; the total is checked against the Weyl
    dimension formula.
    """
    key = (datum, lam)
    if key in _IRREP_CACHE:
        return _IRREP_CACHE[key]
    if not lam.is_dominant():
        raise ValueError("highest weight must be dominant")
    from .rootdata import weyl_dim

    fc = _FormCalc(datum, lam)
    scale = datum.scale
    basis_words = [()]
    level_words = [()]
    while level_words:
        cands = []
        seen = set()
        for w in level_words:
            for i in range(datum.rank):
                cw = (i,) + w
                if cw not in seen:
                    seen.add(cw)
                    cands.append(cw)
        # group by weight, keep a Gram-independent subset per weight
        groups = {}
        for w in cands:
            groups.setdefault(fc.weight_of(w).coords, []).append(w)
        chosen = []
        for _, ws in sorted(groups.items()):
            gram = [
                [RationalScalar.of(fc.pair(a, b)) for b in ws] for a in ws
            ]
            _, pivots = rref(gram)
            chosen.extend(ws[p] for p in pivots)
        basis_words.extend(chosen)
        level_words = chosen

    weights = [fc.weight_of(w) for w in basis_words]
    assert len(basis_words) == weyl_dim(datum, lam), "Gram ranks disagree with Weyl dimension"

    index = {w: k for k, w in enumerate(basis_words)}
    by_weight = {}
    for k, w in enumerate(basis_words):
        by_weight.setdefault(weights[k].coords, []).append(k)

    def express(word_combo):
        """Expand {word: laurent} over the chosen basis at its weight."""
        if not word_combo:
            return {}
        some = next(iter(word_combo))
        mu = fc.weight_of(some).coords
        cols = by_weight.get(mu, [])
        if not cols:
            return {}
        rhs = []
        for b in cols:
            acc = ScaledLaurent.zero(scale)
            for w, c in word_combo.items():
                acc = acc + c * fc.pair(basis_words[b], w)
            rhs.append(RationalScalar.of(acc))
        gram = [
            [RationalScalar.of(fc.pair(basis_words[a], basis_words[b])) for b in cols]
            for a in cols
        ]
        sol, ker = rational_solve(gram, rhs)
        assert sol is not None and not ker
        return {
            cols[t]: sol[t] for t in range(len(cols)) if not sol[t].is_zero()
        }

    f = [dict() for _ in range(datum.rank)]
    e = [dict() for _ in range(datum.rank)]
    one = ScaledLaurent.one(scale)
    for k, w in enumerate(basis_words):
        for i in range(datum.rank):
            col = express({(i,) + w: one})
            if col:
                f[i][k] = col
            col_e = express(fc.e_apply(i, w))
            if col_e:
                e[i][k] = col_e

    out = Irrep(datum, lam, weights, basis_words, f, e)
    _IRREP_CACHE[key] = out
    return out


# ------------------------------------------------------- tensor products


class TensorSpace:
    """Ordered tensor product of irreps with the coproduct action

    F_i(x (x) y) = F_i x (x) Kt_i^{-1} y + x (x) F_i y
    E_i(x (x) y) = E_i x (x) y + Kt_i x (x) E_i y
    """

    def __init__(self, datum, labels):
        self.datum = datum
        self.labels = tuple(labels)
        self.factors = [build_irrep(datum, lam) for lam in self.labels]

    def basis(self):
        idx = [range(f.dim) for f in self.factors]
        from itertools import product

        return list(product(*idx))

    def weight(self, key):
        v = self.datum.zero()
        for f, k in zip(self.factors, key):
            v = v + f.weights[k]
        return v

    def _add(self, vec, key, scalar):
        cur = vec.get(key)
        if cur is None:
            vec[key] = scalar
        else:
            s = cur + scalar
            if s.is_zero():
                del vec[key]
            else:
                vec[key] = s

    def _kt_exp(self, i, factor_idx, basis_idx):
        # Kt_i acts on a weight-mu vector by q^{d_i mu^i}
        mu = self.factors[factor_idx].weights[basis_idx]
        return self.datum.d[i] * mu.coord(i) * self.datum.scale

    def apply_f(self, i, vec):
        out = {}
        scale = self.datum.scale
        for key, c in vec.items():
            for slot in range(len(self.factors)):
                col = self.factors[slot].f[i].get(key[slot])
                if not col:
                    continue
                # twist by Kt_i^{-1} on factors right of slot
                tw = 0
                for r in range(slot + 1, len(self.factors)):
                    tw -= self._kt_exp(i, r, key[r])
                mono = ScaledLaurent.monomial(scale, tw)
                for row, fc in col.items():
                    nk = key[:slot] + (row,) + key[slot + 1 :]
                    self._add(out, nk, c * fc * mono)
        return out

    def apply_e(self, i, vec):
        out = {}
        scale = self.datum.scale
        for key, c in vec.items():
            for slot in range(len(self.factors)):
                col = self.factors[slot].e[i].get(key[slot])
                if not col:
                    continue
                # twist by Kt_i on factors left of slot
                tw = 0
                for l in range(slot):
                    tw += self._kt_exp(i, l, key[l])
                mono = ScaledLaurent.monomial(scale, tw)
                for row, fc in col.items():
                    nk = key[:slot] + (row,) + key[slot + 1 :]
                    self._add(out, nk, c * fc * mono)
        return out


# -------------------------------------------------- tensor word calculus

APPEND = "A"


def pword_tokens(I, kappa, nreds):
    """Token list for the tensor word with black labels I and red-position
    function kappa (kappa[r] = number of blacks left of red r+1)."""
    n = len(I)
    kappa = tuple(kappa)
    if len(kappa) != nreds or any(
        kappa[r] > kappa[r + 1] for r in range(nreds - 1)
    ) or (nreds and (kappa[0] < 0 or kappa[-1] > n)):
        raise ValueError("kappa must be nondecreasing within 0..n")
    toks = []
    pos = 0
    for r in range(nreds):
        # blacks with index < kappa[r] sit left of red r
        while pos < kappa[r]:
            toks.append(("F", I[pos]))
            pos += 1
        toks.append((APPEND,))
    while pos < n:
        toks.append(("F", I[pos]))
        pos += 1
    if toks and toks[0][0] != APPEND:
        # a black left of every red: the word starts with lowering
        # operators applied to the empty tensor, which is zero
        return None
    return tuple(toks)


def pword_vector(space, tokens):
    """Materialize a tensor word as a vector in the tensor product."""
    datum = space.datum
    used = 0
    cur = {(): RationalScalar.one(datum.scale)}
    for tok in tokens:
        if tok[0] == APPEND:
            # append the highest weight vector of the next factor
            cur = {key + (0,): c for key, c in cur.items()}
            used += 1
        else:
            sub = TensorSpace(datum, space.labels[:used])
            cur = sub.apply_f(tok[1], cur)
    assert used == len(space.labels)
    return cur


class TensorFormCalc:
    """Bilinear form on tensor words, by peeling the trailing token.

    Symmetric, integral, and matching the graded corner dimensions of
    the diagram algebras.  Not bar-symmetric.
    """

    def __init__(self, datum, labels):
        self.datum = datum
        self.labels = tuple(labels)
        self.cache = {}

    def weight_of(self, toks):
        v = self.datum.zero()
        nred = 0
        for t in toks:
            if t[0] == APPEND:
                v = v + self.labels[nred]
                nred += 1
            else:
                v = v - self.datum.alpha(t[1])
        return v

    def e_apply(self, i, toks):
        """E_i in the word calculus: commute through appended highest
        weight vectors freely, pick up a quantum integer on matching
        lowering tokens."""
        out = {}
        scale = self.datum.scale
        if not toks:
            return out
        head, last = toks[:-1], toks[-1]
        if last[0] == APPEND:
            for w, c in self.e_apply(i, head).items():
                k = w + (last,)
                out[k] = out.get(k, ScaledLaurent.zero(scale)) + c
        else:
            for w, c in self.e_apply(i, head).items():
                k = w + (last,)
                out[k] = out.get(k, ScaledLaurent.zero(scale)) + c
            if last[1] == i:
                n = self.weight_of(head).coord(i)
                out[head] = out.get(head, ScaledLaurent.zero(scale)) + _qi(
                    self.datum, i, n
                )
        return {w: c for w, c in out.items() if not c.is_zero()}

    def pair(self, w1, w2):
        """<w1, w2>: semilinear in the first slot, linear in the second."""
        key = (w1, w2)
        if key in self.cache:
            return self.cache[key]
        scale = self.datum.scale
        if self.weight_of(w1) != self.weight_of(w2):
            val = ScaledLaurent.zero(scale)
        elif not w1:
            val = ScaledLaurent.one(scale)
        elif w1[-1][0] == APPEND and w2[-1][0] == APPEND:
            # appended highest weight vectors pair to 1 against each other
            val = self.pair(w1[:-1], w2[:-1])
        elif w1[-1][0] == "F":
            i = w1[-1][1]
            mu = self.weight_of(w2)
            tw = (
                self.datum.alpha(i).scaled_pairing(mu)
                + self.datum.d[i] * self.datum.scale
            )
            mono = ScaledLaurent.monomial(scale, tw)
            val = ScaledLaurent.zero(scale)
            for w, c in self.e_apply(i, w2).items():
                val = val + c * self.pair(w1[:-1], w)
            val = mono * val
        else:
            # the table of word pairings is symmetric; peel from the
            # side that ends with a lowering token
            val = self.pair(w2, w1)
        self.cache[key] = val
        return val


def tensor_form(datum, labels, word1, word2):
    """Pairing of two tensor words over the given label list."""
    calc = TensorFormCalc(datum, labels)
    return calc.pair(tuple(word1), tuple(word2))


def pwords_by_weight(datum, labels, nblacks):
    """All (I, kappa) tensor words with the given number of lowering
    tokens, grouped by weight coordinate tuple.  Words that would start
    with a lowering token (zero vectors) are excluded."""
    from itertools import product

    nreds = len(labels)
    out = {}
    for I in product(range(datum.rank), repeat=nblacks):
        for kappa in _nondecreasing(nreds, nblacks):
            toks = pword_tokens(I, kappa, nreds)
            if toks is None:
                continue
            calc = TensorFormCalc(datum, labels)
            mu = calc.weight_of(toks)
            out.setdefault(mu.coords, []).append((I, kappa, toks))
    return out


def _nondecreasing(length, top):
    if length == 0:
        yield ()
        return
    for first in range(top + 1):
        for rest in _nondecreasing(length - 1, top):
            if not rest or first <= rest[0]:
                yield (first,) + tuple(rest)


# --------------------------------------------------------------- braiding


def _weight_blocks(space):
    blocks = {}
    for key in space.basis():
        blocks.setdefault(space.weight(key).coords, []).append(key)
    return blocks


_BRAID_CACHE = {}


def quasi_R_braiding(datum, lam_v, lam_w):
    """The braiding V_{lam_v} (x) V_{lam_w} -> V_{lam_w} (x) V_{lam_v}.

    Solved exactly per weight block from: leading coefficient
    q^{<wt v, wt w>} on the flipped pair, triangular corrections raising
    the first output slot, and intertwining with every E_i and F_i.
    Uniqueness of the solution is asserted.
    """
    ckey = (datum, lam_v, lam_w)
    if ckey in _BRAID_CACHE:
        return _BRAID_CACHE[ckey]
    src = TensorSpace(datum, (lam_v, lam_w))
    dst = TensorSpace(datum, (lam_w, lam_v))
    scale = datum.scale
    V, W = src.factors

    def wt_v(k):
        return V.weights[k]

    def wt_w(k):
        return W.weights[k]

    # unknown entries: X[(out_pair, in_pair)] subject to weight match and
    # triangularity: out = (b', a') from in = (a, b) needs wt(b') >= wt(b)
    # in the dominance order, with equality only for the flip itself
    unknowns = []
    uindex = {}
    for (a, b) in src.basis():
        mu = src.weight((a, b))
        for (bp, ap) in dst.basis():
            if dst.weight((bp, ap)) != mu:
                continue
            diffw = wt_w(bp) - wt_w(b)
            rc = datum.root_coords(diffw)
            if any(x.denominator != 1 or x < 0 for x in rc):
                continue
            if all(x == 0 for x in rc) and (bp, ap) != (b, a):
                continue
            uindex[((bp, ap), (a, b))] = len(unknowns)
            unknowns.append(((bp, ap), (a, b)))

    rows = []
    rhs = []
    one = RationalScalar.one(scale)
    zero = RationalScalar.zero(scale)

    # leading coefficients
    for (a, b) in src.basis():
        row = [zero] * len(unknowns)
        row[uindex[((b, a), (a, b))]] = one
        rows.append(row)
        rhs.append(RationalScalar.of(
            ScaledLaurent.monomial(scale, wt_v(a).scaled_pairing(wt_w(b)))
        ))

    # intertwining with F_i and E_i
    for i in range(datum.rank):
        for op in ("f", "e"):
            for (a, b) in src.basis():
                vec = {(a, b): RationalScalar.one(scale)}
                pushed = (src.apply_f if op == "f" else src.apply_e)(i, vec)
                # op(sigma(in)): sigma(in) = sum over unknowns with in_pair == (a,b)
                rhs_terms = {}
                for (out_pair, in_pair), uix in uindex.items():
                    if in_pair != (a, b):
                        continue
                    moved = (dst.apply_f if op == "f" else dst.apply_e)(
                        i, {out_pair: RationalScalar.one(scale)}
                    )
                    for okey, c in moved.items():
                        cc = c if isinstance(c, RationalScalar) else RationalScalar.of(c)
                        rhs_terms.setdefault(okey, {})
                        rhs_terms[okey][uix] = rhs_terms[okey].get(uix, zero) + cc
                # build one equation per output basis vector of dst
                outs = set(rhs_terms)
                for key2 in pushed:
                    for (out_pair, in_pair) in uindex:
                        if in_pair == key2:
                            outs.add(out_pair)
                for okey in outs:
                    row = [zero] * len(unknowns)
                    # sigma after op
                    for key2, c in pushed.items():
                        cc = c if isinstance(c, RationalScalar) else RationalScalar.of(c)
                        u = uindex.get((okey, key2))
                        if u is not None:
                            row[u] = row[u] + cc
                    # minus op after sigma
                    for uix, c in rhs_terms.get(okey, {}).items():
                        row[uix] = row[uix] - c
                    if any(not x.is_zero() for x in row):
                        rows.append(row)
                        rhs.append(zero)

    sol, ker = rational_solve(rows, rhs)
    assert sol is not None, "braiding system inconsistent"
    assert not ker, "braiding system underdetermined"
    mat = {}
    for ((out_pair, in_pair), uix) in uindex.items():
        c = sol[uix]
        if not c.is_zero():
            mat.setdefault(in_pair, {})[out_pair] = c
    _BRAID_CACHE[ckey] = mat
    return mat


def invert_pair_map(datum, labels_in, mat):
    """Invert a weight-preserving map given as {in: {out: c}}; returns
    {in: {out: c}} for the inverse (labels swap back)."""
    scale = datum.scale
    src = TensorSpace(datum, labels_in)
    dst = TensorSpace(datum, (labels_in[1], labels_in[0]))
    blocks_src = _weight_blocks(src)
    blocks_dst = _weight_blocks(dst)
    inv = {}
    for mu, ins in blocks_src.items():
        outs = blocks_dst.get(mu, [])
        m = [
            [
                mat.get(i_, {}).get(o_, RationalScalar.zero(scale))
                for i_ in ins
            ]
            for o_ in outs
        ]
        # solve m X = Id blockwise
        n = len(outs)
        assert n == len(ins)
        for t, o_ in enumerate(outs):
            rhsv = [
                RationalScalar.one(scale) if s == t else RationalScalar.zero(scale)
                for s in range(n)
            ]
            sol, ker = rational_solve(m, rhsv)
            assert sol is not None and not ker
            for s, i_ in enumerate(ins):
                if not sol[s].is_zero():
                    inv.setdefault(o_, {})[i_] = sol[s]
    return inv


# ------------------------------------------------------------ ribbon, caps


def ribbon_scalar(datum, lam):
    """Ribbon element eigenvalue on the irrep of highest weight lam:
    sign (-1)^{2 rho^vee(lam)} times q^{<lam, lam + 2 rho>}."""
    cov, form2 = rho_pair(datum, lam)
    expo = lam.pairing(lam) + form2
    scaled = expo * datum.scale
    assert scaled.denominator == 1
    sign = -1 if cov % 2 else 1
    return ScaledLaurent(datum.scale, [(int(scaled), sign)])


def _invariant_vectors(space):
    """Basis of the invariant subspace: weight 0, killed by all E_i, F_i."""
    datum = space.datum
    scale = datum.scale
    zero_keys = [
        k for k in space.basis() if space.weight(k) == datum.zero()
    ]
    if not zero_keys:
        return [], zero_keys
    rows = []
    cols = {k: t for t, k in enumerate(zero_keys)}
    for i in range(datum.rank):
        for op in ("e", "f"):
            images = {}
            for k in zero_keys:
                img = (space.apply_e if op == "e" else space.apply_f)(
                    i, {k: RationalScalar.one(scale)}
                )
                for okey, c in img.items():
                    images.setdefault(okey, {})[k] = (
                        c if isinstance(c, RationalScalar) else RationalScalar.of(c)
                    )
            for okey, colmap in images.items():
                row = [RationalScalar.zero(scale)] * len(zero_keys)
                for k, c in colmap.items():
                    row[cols[k]] = c
                rows.append(row)
    if not rows:
        rows = [[RationalScalar.zero(scale)] * len(zero_keys)]
    from .qring import kernel_basis

    ker = kernel_basis(rows, len(zero_keys))
    vecs = []
    for kv in ker:
        vecs.append(
            {
                zero_keys[t]: kv[t]
                for t in range(len(zero_keys))
                if not kv[t].is_zero()
            }
        )
    return vecs, zero_keys


def _invariant_functionals(space):
    """Functionals phi with phi(E_i x) = phi(F_i x) = 0, supported on
    weight zero."""
    datum = space.datum
    scale = datum.scale
    zero_keys = [k for k in space.basis() if space.weight(k) == datum.zero()]
    rows = []
    for i in range(datum.rank):
        for op in ("e", "f"):
            for k in space.basis():
                img = (space.apply_e if op == "e" else space.apply_f)(
                    i, {k: RationalScalar.one(scale)}
                )
                row = [RationalScalar.zero(scale)] * len(zero_keys)
                hit = False
                for okey, c in img.items():
                    if okey in zero_keys:
                        row[zero_keys.index(okey)] = (
                            c if isinstance(c, RationalScalar) else RationalScalar.of(c)
                        )
                        hit = True
                if hit:
                    rows.append(row)
    if not rows:
        rows = [[RationalScalar.zero(scale)] * len(zero_keys)]
    from .qring import kernel_basis

    ker = kernel_basis(rows, len(zero_keys))
    return [
        {zero_keys[t]: kv[t] for t in range(len(zero_keys)) if not kv[t].is_zero()}
        for kv in ker
    ], zero_keys


class CupCapData:
    """The four duality maps for one label.

    ev   : V* (x) V -> K      normalized ev(lowest (x) highest) = 1
    coev : K -> V (x) V*      scaled so both zigzags with ev are exact
    qtr  : V (x) V* -> K      quantum trace
    qcotr: K -> V* (x) V      quantum cotrace, zigzags with qtr exact

    Cross circles qtr . coev = ev . qcotr give the signed balanced
    dimension (-1)^{2 rho^vee(lam)} sum_mu q^{<mu, 2 rho^vee-ish>}.
    """

    __slots__ = ("datum", "lam", "lam_dual", "ev", "coev", "qtr", "qcotr", "circle")

    def __init__(self, datum, lam, ev, coev, qtr, qcotr, circle):
        self.datum = datum
        self.lam = lam
        self.lam_dual = dual_weight(datum, lam)
        self.ev = ev
        self.coev = coev
        self.qtr = qtr
        self.qcotr = qcotr
        self.circle = circle


_CUPCAP_CACHE = {}


def cup_cap_maps(datum, lam):
    key = (datum, lam)
    if key in _CUPCAP_CACHE:
        return _CUPCAP_CACHE[key]
    scale = datum.scale
    lam_d = dual_weight(datum, lam)
    V = build_irrep(datum, lam)
    Vd = build_irrep(datum, lam_d)
    space_da = TensorSpace(datum, (lam_d, lam))  # V* (x) V : ev, qcotr
    space_ad = TensorSpace(datum, (lam, lam_d))  # V (x) V* : coev, qtr

    funcs_da, keys_da = _invariant_functionals(space_da)
    assert len(funcs_da) == 1, "evaluation functional not unique"
    ev = funcs_da[0]
    low_hi = (Vd.lowest_index(), V.hw_index)
    c0 = ev.get(low_hi)
    assert c0 is not None and not c0.is_zero()
    ev = {k: v / c0 for k, v in ev.items()}

    vecs_ad, _ = _invariant_vectors(space_ad)
    assert len(vecs_ad) == 1, "coevaluation vector not unique"
    coev = vecs_ad[0]

    # zigzag on V: x -> coev (x) x -> x ev-contracted; demand identity
    def zig_scalar():
        # evaluate on the highest weight vector of V
        x = V.hw_index
        total = RationalScalar.zero(scale)
        for (a, b), c in coev.items():
            # (a (x) b (x) x): contract (b, x) with ev
            c2 = ev.get((b, x))
            if c2 is None:
                continue
            if a == x:
                total = total + c * c2
        return total

    s = zig_scalar()
    assert not s.is_zero(), "zigzag degenerate"
    coev = {k: v / s for k, v in coev.items()}

    # verify both zigzags fully in the caller's test suite; here cheap:
    # (1 (x) ev)(coev (x) 1) == id on every basis vector of V
    for x in range(V.dim):
        got = {}
        for (a, b), c in coev.items():
            c2 = ev.get((b, x))
            if c2 is not None:
                got[a] = got.get(a, RationalScalar.zero(scale)) + c * c2
        assert set(got) == {x} and got[x] == RationalScalar.one(scale), (
            "first zigzag failed"
        )

    # quantum trace and cotrace: the other invariant pair, normalized so
    # their own zigzags are exact
    funcs_ad, _ = _invariant_functionals(space_ad)
    assert len(funcs_ad) == 1
    qtr = funcs_ad[0]
    vecs_da, _ = _invariant_vectors(space_da)
    assert len(vecs_da) == 1
    qcotr = vecs_da[0]

    def zig2_scalar():
        x = V.hw_index
        total = RationalScalar.zero(scale)
        for (b, a), c in qcotr.items():
            c2 = qtr.get((x, b))
            if c2 is None:
                continue
            if a == x:
                total = total + c2 * c
        return total

    s2 = zig2_scalar()
    assert not s2.is_zero()
    qcotr = {k: v / s2 for k, v in qcotr.items()}
    for x in range(V.dim):
        got = {}
        for (b, a), c in qcotr.items():
            c2 = qtr.get((x, b))
            if c2 is not None:
                got[a] = got.get(a, RationalScalar.zero(scale)) + c2 * c
        assert set(got) == {x} and got[x] == RationalScalar.one(scale), (
            "quantum trace zigzag failed"
        )

    # circle value: qtr . coev
    circ = RationalScalar.zero(scale)
    for kk, c in coev.items():
        c2 = qtr.get(kk)
        if c2 is not None:
            circ = circ + c * c2
    circ2 = RationalScalar.zero(scale)
    for kk, c in qcotr.items():
        c2 = ev.get(kk)
        if c2 is not None:
            circ2 = circ2 + c * c2
    assert circ == circ2, "the two circle values disagree"
    data = CupCapData(datum, lam, ev, coev, qtr, qcotr, circ.as_laurent())
    _CUPCAP_CACHE[key] = data
    return data


# ------------------------------------------------------- tangle evaluator


def tangle_writhes(datum, ops):
    """Orientation-aware self-writhe per link component.

    Crossing sign: a positive braid generator on strands of equal
    orientation is a positive oriented crossing; opposite orientations
    flip the sign.  Crossings between distinct components do not enter
    (they are linking, not framing).

    Returns (components, crossings_total) where components is a list of
    (label, self_writhe) with one entry per closed component.
    """
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    strands = []  # per slot: (strand_id, flag_dual, weight)
    crossings = []
    labels_of = {}
    nxt = 0
    for op in ops:
        kind = op[0]
        if kind in ("coev", "qcotr"):
            _, pos, lam = op
            lam_d = dual_weight(datum, lam)
            a, b = nxt, nxt + 1
            nxt += 2
            parent[a] = a
            parent[b] = b
            union(a, b)
            labels_of[a] = lam
            labels_of[b] = lam
            if kind == "coev":
                pair = [(a, False, lam), (b, True, lam_d)]
            else:
                pair = [(a, True, lam_d), (b, False, lam)]
            strands = strands[:pos] + pair + strands[pos:]
        elif kind in ("braid+", "braid-"):
            _, k = op
            (ia, fa, wa), (ib, fb, wb) = strands[k], strands[k + 1]
            sign = 1 if kind == "braid+" else -1
            if fa != fb:
                sign = -sign
            crossings.append((ia, ib, sign))
            strands[k], strands[k + 1] = strands[k + 1], strands[k]
        elif kind in ("ev", "qtr"):
            _, k = op
            (ia, _, _), (ib, _, _) = strands[k], strands[k + 1]
            union(ia, ib)
            strands = strands[:k] + strands[k + 2 :]
        else:
            raise ValueError(f"unknown tangle operation {kind!r}")
    if strands:
        raise ValueError("tangle is not closed")
    comps = {}
    for sid, lam in labels_of.items():
        comps.setdefault(find(sid), lam)
    writhes = {root: 0 for root in comps}
    for ia, ib, sign in crossings:
        ra, rb = find(ia), find(ib)
        if ra == rb:
            writhes[ra] += sign
    return [(comps[r], writhes[r]) for r in comps], len(crossings)


def framing_normalization(datum, ops):
    """Product of ribbon scalars undoing each component's self-writhe."""
    comps, _ = tangle_writhes(datum, ops)
    out = ScaledLaurent.one(datum.scale)
    for lam, wr in comps:
        (exp, coeff), = ribbon_scalar(datum, lam).terms
        # ribbon is a signed monomial, so powering it stays exact
        out = out * ScaledLaurent(datum.scale, [(-wr * exp, coeff ** abs(wr))])
    return out


class TangleState:
    __slots__ = ("datum", "labels", "vec")

    def __init__(self, datum):
        self.datum = datum
        self.labels = ()
        self.vec = {(): RationalScalar.one(datum.scale)}


def _as_rs(scale, x):
    return x if isinstance(x, RationalScalar) else RationalScalar.of(x)


def evaluate_tangle_semisimple(datum, ops):
    """Evaluate a closed tangle presented as a list of operations:

    ("coev", pos, lam)   insert (lam, lam*) at slot pos
    ("qcotr", pos, lam)  insert (lam*, lam) at slot pos
    ("braid+", k) / ("braid-", k)   cross slots k, k+1
    ("ev", k)    contract slots (k, k+1), labels (lam*, lam)
    ("qtr", k)   contract slots (k, k+1), labels (lam, lam*)

    Labels are tracked as (weight, is_dual) pairs so that ev/qtr arity
    errors surface early.  Returns the closed evaluation as a Laurent
    polynomial.
    """
    st = TangleState(datum)
    scale = datum.scale
    typed = []  # (weight, flag) per strand; flag True = dual copy

    for op in ops:
        kind = op[0]
        if kind in ("coev", "qcotr"):
            _, pos, lam = op
            lam_d = dual_weight(datum, lam)
            if kind == "coev":
                pair_labels = ((lam, False), (lam_d, True))
                data = cup_cap_maps(datum, lam)
                tensor2 = data.coev
            else:
                pair_labels = ((lam_d, True), (lam, False))
                data = cup_cap_maps(datum, lam)
                tensor2 = data.qcotr
            if pos < 0 or pos > len(typed):
                raise ValueError("insertion position out of range")
            nvec = {}
            for key, c in st.vec.items():
                for (a, b), c2 in tensor2.items():
                    nk = key[:pos] + (a, b) + key[pos:]
                    cur = nvec.get(nk)
                    s = c * c2
                    nvec[nk] = s if cur is None else cur + s
            st.vec = {k: v for k, v in nvec.items() if not v.is_zero()}
            typed = typed[:pos] + list(pair_labels) + typed[pos:]
        elif kind in ("ev", "qtr"):
            _, k = op
            if k + 1 >= len(typed):
                raise ValueError("contraction position out of range")
            (w1, f1), (w2, f2) = typed[k], typed[k + 1]
            if kind == "ev":
                # expects (lam*, lam)
                if not (f1 and not f2 and dual_weight(datum, w2) == w1):
                    raise ValueError("ev applied to a non-dual pair")
                data = cup_cap_maps(datum, w2)
                functional = data.ev
            else:
                if not (not f1 and f2 and dual_weight(datum, w1) == w2):
                    raise ValueError("qtr applied to a non-dual pair")
                data = cup_cap_maps(datum, w1)
                functional = data.qtr
            nvec = {}
            for key, c in st.vec.items():
                c2 = functional.get((key[k], key[k + 1]))
                if c2 is None:
                    continue
                nk = key[:k] + key[k + 2 :]
                s = c * c2
                cur = nvec.get(nk)
                nvec[nk] = s if cur is None else cur + s
            st.vec = {k2: v for k2, v in nvec.items() if not v.is_zero()}
            typed = typed[:k] + typed[k + 2 :]
        elif kind in ("braid+", "braid-"):
            _, k = op
            if k + 1 >= len(typed):
                raise ValueError("braid position out of range")
            (w1, f1), (w2, f2) = typed[k], typed[k + 1]
            if kind == "braid+":
                mat = quasi_R_braiding(datum, w1, w2)
            else:
                mat = invert_pair_map(datum, (w2, w1), quasi_R_braiding(datum, w2, w1))
            nvec = {}
            for key, c in st.vec.items():
                col = mat.get((key[k], key[k + 1]), {})
                for (bp, ap), c2 in col.items():
                    nk = key[:k] + (bp, ap) + key[k + 2 :]
                    s = c * c2
                    cur = nvec.get(nk)
                    nvec[nk] = s if cur is None else cur + s
            st.vec = {k2: v for k2, v in nvec.items() if not v.is_zero()}
            typed = typed[:k] + [typed[k + 1], typed[k]] + typed[k + 2 :]
        else:
            raise ValueError(f"unknown tangle operation {kind!r}")

    if typed:
        raise ValueError("tangle is not closed")
    total = st.vec.get((), RationalScalar.zero(scale))
    return total.as_laurent()
