"""Independent oracle computations for test freezing.

Nothing in here imports the package under test.  Each oracle is a
deliberately naive reimplementation used to derive expected values;
tests freeze those values as literals and also re-run the oracle.
"""

from fractions import Fraction


# -- naive Laurent arithmetic on {Fraction exponent: int coeff} dicts --


def lpoly(*pairs):
    out = {}
    for e, c in pairs:
        e = Fraction(e)
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def lp_add(a, b):
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def lp_mul(a, b):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            k = e1 + e2
            out[k] = out.get(k, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def lp_qint(n):
    """Quantum integer [n] = q^(n-1) + q^(n-3) + ... + q^(1-n)."""
    return lpoly(*((n - 1 - 2 * k, 1) for k in range(n)))


# -- root systems and Freudenthal dimension oracle ---------------------

CARTAN = {
    ("A", 1): [[2]],
    ("A", 2): [[2, -1], [-1, 2]],
    ("A", 3): [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
    ("B", 2): [[2, -1], [-2, 2]],
    ("G", 2): [[2, -1], [-3, 2]],
}


def symmetrizers(cartan):
    """Minimal positive integers d with d_i c_ij = d_j c_ji."""
    n = len(cartan)
    d = [0] * n
    d[0] = 1
    # propagate through the Dynkin graph
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                if i != j and cartan[i][j] != 0:
                    if d[i] and not d[j]:
                        dj = Fraction(d[i] * cartan[i][j], cartan[j][i])
                        d[j] = dj
                        changed = True
    den = 1
    for x in d:
        den = den * Fraction(x).denominator
    d = [Fraction(x) * den for x in d]
    from math import gcd

    g = 0
    for x in d:
        g = gcd(g, int(x))
    return [int(x) // g for x in d]


def root_system(cartan):
    """All roots in simple-root coordinates, by reflection closure."""
    n = len(cartan)
    simples = [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)]

    def reflect(root, i):
        # s_i(beta) = beta - <beta, alpha_i^vee> alpha_i ;
        # <alpha_j, alpha_i^vee> = c_ij ... pairing of root beta = sum b_j a_j
        coeff = sum(root[j] * cartan[i][j] for j in range(n))
        out = list(root)
        out[i] -= coeff
        return tuple(out)

    roots = set(simples)
    frontier = set(simples)
    while frontier:
        new = set()
        for r in frontier:
            for i in range(n):
                rr = reflect(r, i)
                if rr not in roots:
                    new.add(rr)
        roots |= new
        frontier = new
    return roots


def positive_roots(cartan):
    return [r for r in root_system(cartan) if all(x >= 0 for x in r)]


def freudenthal_dim(cartan, hw):
    """Dimension of the irrep with highest weight hw (fund. coords),
    by the Freudenthal multiplicity recursion (dim = sum of mults)."""
    n = len(cartan)
    d = symmetrizers(cartan)
    pos = positive_roots(cartan)

    def form_rr(a, b):  # bilinear form on root-coordinate vectors
        return sum(
            Fraction(a[i]) * b[j] * d[i] * cartan[i][j]
            for i in range(n)
            for j in range(n)
        )

    # express weights in root coordinates: lambda = sum x_j alpha_j with
    # C^T x = hw ... <lambda, alpha_i^vee> = sum_j x_j c_ij = hw_i
    def to_root_coords(fund):
        # solve sum_j x_j c_ij = fund_i
        m = [[Fraction(cartan[i][j]) for j in range(n)] + [Fraction(fund[i])] for i in range(n)]
        for col in range(n):
            piv = next(r for r in range(col, n) if m[r][col])
            m[col], m[piv] = m[piv], m[col]
            f = m[col][col]
            m[col] = [x / f for x in m[col]]
            for r in range(n):
                if r != col and m[r][col]:
                    g = m[r][col]
                    m[r] = [x - g * y for x, y in zip(m[r], m[col])]
        return tuple(m[i][n] for i in range(n))

    lam = to_root_coords(hw)
    rho = to_root_coords([1] * n)

    def coeval(weight_rc, i):  # <weight, alpha_i^vee>
        return sum(weight_rc[j] * cartan[i][j] for j in range(n))

    # collect dominant weights below lambda, then recurse on multiplicity
    mults = {}

    def weight_key(rc):
        return tuple(rc)

    def mult(rc):
        key = weight_key(rc)
        if key in mults:
            return mults[key]
        if all(x == 0 for x in (Fraction(a) - Fraction(b) for a, b in zip(rc, lam))):
            mults[key] = 1
            return 1
        diff = [Fraction(a) - Fraction(b) for a, b in zip(lam, rc)]
        if any(x < 0 or x.denominator != 1 for x in diff):
            mults[key] = 0
            return 0
        num = form_rr(
            [a + b for a, b in zip(lam, rho)],
            [a + b for a, b in zip(lam, rho)],
        ) - form_rr(
            [a + b for a, b in zip(rc, rho)], [a + b for a, b in zip(rc, rho)]
        )
        if num == 0:
            mults[key] = 0
            return 0
        total = Fraction(0)
        for alpha in pos:
            k = 1
            while True:
                shifted = tuple(a + k * b for a, b in zip(rc, alpha))
                m = mult(shifted)
                if m == 0:
                    diff2 = [Fraction(x) - Fraction(y) for x, y in zip(lam, shifted)]
                    if any(x < 0 for x in diff2):
                        break
                    k += 1
                    continue
                total += 2 * m * (form_rr(shifted, alpha))
                k += 1
        val = total / num
        assert val.denominator == 1
        mults[key] = int(val)
        return int(val)

    # walk the weight diagram downward along simple roots; every weight
    # of the module is reachable this way through positive-mult weights
    seen = set()
    stack = [tuple(lam)]
    total_dim = 0
    while stack:
        rc = stack.pop()
        if rc in seen:
            continue
        seen.add(rc)
        m = mult(rc)
        if m == 0:
            continue
        total_dim += m
        for i in range(n):
            nxt = tuple(
                a - b
                for a, b in zip(rc, (1 if k == i else 0 for k in range(n)))
            )
            diff = [Fraction(x) - Fraction(y) for x, y in zip(lam, nxt)]
            if all(x >= 0 for x in diff):
                stack.append(nxt)
    return total_dim
