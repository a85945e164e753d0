"""Compiled inner loops.

Everything here works on plain numpy arrays so that the public modules keep
their own validation and documentation.  Vertex labels are 1-based and
per-vertex arrays are 0-based (``parent[i - 1]`` is the parent label of
vertex ``i``).
"""
import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def heights_from_parents(parent):
    n = parent.shape[0]
    h = np.zeros(n, dtype=np.int64)
    for i in range(1, n):
        h[i] = h[parent[i] - 1] + 1
    return h


@njit(cache=True, nogil=True)
def subtree_mask(parent, k):
    n = parent.shape[0]
    mask = np.zeros(n, dtype=np.bool_)
    mask[k - 1] = True
    for i in range(k, n):
        mask[i] = mask[parent[i] - 1]
    return mask


@njit(cache=True, nogil=True)
def subtree_sizes(parent):
    n = parent.shape[0]
    size = np.ones(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        size[parent[i] - 1] += size[i]
    return size


# ---------------------------------------------------------------------------
# Fenwick tree on a flat array (1-based internally)
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def fenwick_add(tree, i, v):
    size = tree.shape[0] - 1
    while i <= size:
        tree[i] += v
        i += i & (-i)


@njit(cache=True, nogil=True)
def fenwick_build(values):
    """Fenwick array for ``values`` (0-based input, returns length n + 1)."""
    n = values.shape[0]
    tree = np.zeros(n + 1)
    for i in range(1, n + 1):
        tree[i] += values[i - 1]
        j = i + (i & (-i))
        if j <= n:
            tree[j] += tree[i]
    return tree


@njit(cache=True, nogil=True)
def fenwick_prefix(tree, i):
    s = 0.0
    while i > 0:
        s += tree[i]
        i -= i & (-i)
    return s


@njit(cache=True, nogil=True)
def fenwick_search(tree, top_bit, x):
    """Smallest index whose prefix sum exceeds ``x``.

    Entries with zero mass are never returned because the comparison keeps
    walking right while the running prefix is ``<= x``.
    """
    size = tree.shape[0] - 1
    pos = 0
    step = top_bit
    while step > 0:
        nxt = pos + step
        if nxt <= size and tree[nxt] <= x:
            pos = nxt
            x -= tree[nxt]
        step >>= 1
    return pos + 1


@njit(cache=True, nogil=True)
def _top_bit(n):
    b = 1
    while b * 2 <= n:
        b *= 2
    return b


@njit(cache=True, nogil=True)
def pat_grow(a, parent, deg, m0, n, u):
    """Grow a preferential attachment tree from ``m0`` to ``n`` vertices.

    ``parent`` and ``deg`` have length ``n`` and hold a valid state for the
    first ``m0`` vertices.  ``u`` supplies one uniform per step from size
    ``max(m0, 2)`` onward.  The sampling weight of vertex ``k`` is
    ``max(a_k + deg_k, 0)``.
    """
    wt = np.zeros(n)
    for k in range(m0):
        wt[k] = max(a[k] + deg[k], 0.0)
    tree = fenwick_build(wt)
    top = _top_bit(n)
    m = m0
    if m == 1 and n >= 2:
        parent[1] = 1
        deg[0] += 1
        new = max(a[0] + deg[0], 0.0)
        fenwick_add(tree, 1, new - wt[0])
        wt[0] = new
        wt[1] = max(a[1], 0.0)
        fenwick_add(tree, 2, wt[1])
        m = 2
    total = 0.0
    for k in range(m):
        total += wt[k]
    j = 0
    while m < n:
        x = u[j] * total
        j += 1
        k = fenwick_search(tree, top, x)
        if k > m or wt[k - 1] <= 0.0:
            # rounding pushed the target past the last positive entry
            k = m
            while wt[k - 1] <= 0.0:
                k -= 1
        parent[m] = k
        deg[k - 1] += 1
        new = max(a[k - 1] + deg[k - 1], 0.0)
        fenwick_add(tree, k, new - wt[k - 1])
        total += new - wt[k - 1]
        wt[k - 1] = new
        wt[m] = max(a[m], 0.0)
        fenwick_add(tree, m + 1, wt[m])
        total += wt[m]
        m += 1
    return j


# ---------------------------------------------------------------------------
# Urns
# ---------------------------------------------------------------------------


@njit(cache=True)
def nested_urn_grow(a, A, n, betas, definetti, rng):
    """Preferential attachment tree grown by the downward pass through urns.

    Urn ``k`` (opened when ``u_{k+1}`` arrives) holds red mass ``A_k + k``
    and total mass ``A_{k+1} + k``.  A newcomer visits urns ``m-1, m-2, ...``
    and stops at ``u_{k+1}`` on the first white draw at urn ``k``.  One
    uniform per step drives the whole pass: it stops at urn ``k`` once the
    uniform exceeds the product of the red probabilities seen so far.  In
    de Finetti mode the red probability of urn ``k`` is ``betas[k - 1]``.
    """
    parent = np.zeros(n, dtype=np.int64)
    red = np.zeros(n)
    tot = np.zeros(n)
    if n >= 2:
        parent[1] = 1
        red[1] = A[0] + 1
        tot[1] = A[1] + 1
    for m in range(2, n):
        u = rng.random()
        s = 1.0
        k = m - 1
        chosen = 1
        while k >= 1:
            if definetti:
                r = betas[k - 1]
            else:
                r = red[k] / tot[k]
            s_next = s * r
            if u >= s_next:
                if not definetti:
                    tot[k] += 1.0
                chosen = k + 1
                break
            if not definetti:
                red[k] += 1.0
                tot[k] += 1.0
            s = s_next
            k -= 1
        parent[m] = chosen
        red[m] = A[m - 1] + m
        tot[m] = A[m] + m
    return parent


@njit(cache=True)
def immigration_events_step(a, n, rng):
    """Times ``t`` at which vertex ``u_t`` attaches to ``u_1``, up to ``n``.

    Generic fitness: one Bernoulli draw per arrival.
    """
    cap = 1024
    ev = np.empty(cap, dtype=np.int64)
    cnt = 0
    if n < 2:
        return ev[:0]
    red = a[0] + 1.0
    tot = a[0] + 1.0 + a[1]
    ev[0] = 2
    cnt = 1
    for t in range(2, n):
        # vertex u_{t+1} arrives into a tree of size t
        if rng.random() * tot < red:
            red += 1.0
            if cnt == cap:
                new = np.empty(2 * cap, dtype=np.int64)
                new[:cap] = ev
                ev = new
                cap *= 2
            ev[cnt] = t + 1
            cnt += 1
        tot += 1.0 + a[t]
    return ev[:cnt]


@njit(cache=True)
def _log_survival(j, t, x, rho):
    return (math.lgamma(t + j + x - rho) - math.lgamma(t + x - rho)
            + math.lgamma(t + x) - math.lgamma(t + j + x))


@njit(cache=True)
def immigration_events_skip(a, b, n, rng):
    """Same as :func:`immigration_events_step` for constant fitness ``(a, b, b, ...)``.

    With ``T_t = (b+1)(t + x)``, ``x = a/(b+1) - 1``, the chance of ``j``
    arrivals in a row missing ``u_1`` is a ratio of Gamma functions, which
    is inverted by doubling and bisection.  Needs ``b > 0``.
    """
    cap = 1024
    ev = np.empty(cap, dtype=np.int64)
    if n < 2:
        return ev[:0]
    x = a / (b + 1.0) - 1.0
    red = a + 1.0
    t = 2
    ev[0] = 2
    cnt = 1
    while t < n:
        rho = red / (b + 1.0)
        log_u = math.log(rng.random())
        limit = n - t
        if _log_survival(limit, t, x, rho) > log_u:
            break
        hi = 1
        while hi < limit and _log_survival(hi, t, x, rho) > log_u:
            hi *= 2
        if hi > limit:
            hi = limit
        lo = hi // 2
        # invariant: survival(lo) > u >= survival(hi), with survival(0) = 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if _log_survival(mid, t, x, rho) > log_u:
                lo = mid
            else:
                hi = mid
        t += hi
        red += 1.0
        if cnt == cap:
            new = np.empty(2 * cap, dtype=np.int64)
            new[:cap] = ev
            ev = new
            cap *= 2
        ev[cnt] = t
        cnt += 1
    return ev[:cnt]


# ---------------------------------------------------------------------------
# (m, alpha) multigraph
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def pa_graph_grow(seed_deg, m, alpha, n, u):
    """Targets of the ``m (n - 1)`` edges of an ``(m, alpha)`` multigraph.

    Vertices ``1..k`` form the seed and arrival ``v_i`` (``i >= 2``) gets
    label ``k + i - 1``.  Each edge picks an existing vertex with weight
    ``alpha + deg``; the newcomer joins the candidates after its ``m``
    edges.  ``u`` holds one uniform per edge.
    """
    k = seed_deg.shape[0]
    V = k + n - 1
    wt = np.zeros(V)
    for i in range(k):
        wt[i] = alpha + seed_deg[i]
    tree = fenwick_build(wt)
    top = _top_bit(V)
    total = 0.0
    for i in range(k):
        total += wt[i]
    targets = np.empty(m * (n - 1), dtype=np.int64)
    j = 0
    for t in range(n - 1):
        live = k + t
        for e in range(m):
            x = u[j] * total
            v = fenwick_search(tree, top, x)
            if v > live:
                v = live
                while wt[v - 1] <= 0.0:
                    v -= 1
            targets[j] = v
            j += 1
            wt[v - 1] += 1.0
            fenwick_add(tree, v, 1.0)
            total += 1.0
        new = alpha + m
        wt[live] = new
        fenwick_add(tree, live + 1, new)
        total += new
    return targets
