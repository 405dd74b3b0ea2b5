"""Error-free transformations of floating-point sums and products.

Written with plain arithmetic only, so each function works on scalars and
elementwise on numpy arrays alike; the numba backend compiles them as-is.
"""

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def td_horner_step(r0, r1, r2, x, c0, c1, c2):
    """One step ``r * x + c`` in triple-double arithmetic, ``x`` an exact double."""
    p0, e0 = two_prod(r0, x)
    p1, e1 = two_prod(r1, x)
    p2 = r2 * x
    s0, f0 = two_sum(p0, c0)
    t1, g1 = two_sum(p1, c1)
    t2, g2 = two_sum(e0, f0)
    s1, g3 = two_sum(t1, t2)
    s2 = ((e1 + p2) + (c2 + g1)) + (g2 + g3)
    # renormalise so the components stay ordered by magnitude
    u1, v1 = two_sum(s1, s2)
    q0, w = two_sum(s0, u1)
    q1, q2 = two_sum(w, v1)
    return q0, q1, q2
