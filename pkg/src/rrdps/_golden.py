import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQUARE = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section(f, a, b, rel_tol=1e-10, abs_tol=1e-15, max_iter=500):
    """Minimize a unimodal scalar function on [a, b] by golden-section search.

    Stops once the bracket width drops below ``rel_tol * |midpoint| + abs_tol``.
    Returns ``(x, f(x))`` for the best point evaluated.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    fc = f(c)
    fd = f(d)
    for _ in range(max_iter):
        if b - a <= rel_tol * abs(0.5 * (a + b)) + abs_tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + INV_PHI_SQUARE * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + INV_PHI * h
            fd = f(d)
    if fc <= fd:
        return c, fc
    return d, fd
