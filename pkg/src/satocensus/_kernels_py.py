"""Pure-Python kernels: reference implementations of the hot loops.

The compiled module `_kernels_c` mirrors these signatures exactly; the
backend selector picks whichever is importable.  These versions lean on
numpy vectorization where it helps but stay exact (integer arithmetic
throughout, float only for transport costs).
"""

from __future__ import annotations

import heapq
import math

import numpy as np

BACKEND_NAME = "python"


def curve_trace(p: int, a: int, b: int, chi: np.ndarray, cube: np.ndarray) -> int:
    """Frobenius trace of y^2 = x^3 + a x + b over F_p via a character sum."""
    x = np.arange(p, dtype=np.int64)
    u = (cube + a * x + b) % p
    return -int(chi[u].sum())


def inverse_table(p: int, inv: np.ndarray) -> None:
    inv[1] = 1
    for i in range(2, p):
        inv[i] = (p - p // i) * inv[p % i] % p


def generic_j_hist(
    p: int,
    j_lo: int,
    j_hi: int,
    chi: np.ndarray,
    cube: np.ndarray,
    inv: np.ndarray,
    hist: np.ndarray,
) -> None:
    """Accumulate twist-pair trace counts for j-invariants in [j_lo, j_hi).

    Skips j = 0 and j = 1728 mod p.  For every other j the two quadratic
    twists contribute one isomorphism class each, with traces t and -t, so
    hist[H - s] and hist[H + s] (s = sum of character values) each gain 1.
    """
    h = (hist.shape[0] - 1) // 2
    j1728 = 1728 % p
    x = np.arange(p, dtype=np.int64)
    for j in range(j_lo, j_hi):
        if j == 0 or j == j1728:
            continue
        kk = j * int(inv[(1728 - j) % p]) % p
        a = 3 * kk % p
        b = 2 * kk % p
        s = int(chi[(cube + a * x + b) % p].sum())
        if not -h <= s <= h:
            raise ArithmeticError("Hasse bound violated in census kernel")
        hist[h - s] += 1
        hist[h + s] += 1


def pair_census_hists(
    p: int,
    chi: np.ndarray,
    cube: np.ndarray,
    pair_hist: np.ndarray,
    aut_hist: np.ndarray,
) -> None:
    """Trace histogram over all nonsingular Weierstrass pairs (a, b).

    pair_hist[t + H] counts pairs with trace t; aut_hist[t + H] accumulates
    the automorphism-group order of each pair's curve (2 generically,
    gcd(6, p-1) for a = 0, gcd(4, p-1) for b = 0).
    """
    h = (pair_hist.shape[0] - 1) // 2
    aut6 = math.gcd(6, p - 1)
    aut4 = math.gcd(4, p - 1)
    bs = np.arange(p, dtype=np.int64)
    for a in range(p):
        u = (cube + a * np.arange(p, dtype=np.int64))[:, None] + bs[None, :]
        traces = -chi[u % p].sum(axis=0)
        nonsingular = (4 * a * a * a + 27 * bs * bs) % p != 0
        auts = np.full(p, 2, dtype=np.int64)
        if a == 0:
            auts[:] = aut6
        else:
            auts[0] = aut4
        kept = traces[nonsingular]
        if kept.size and (kept.max() > h or kept.min() < -h):
            raise ArithmeticError("Hasse bound violated in pair census kernel")
        idx = (kept + h).astype(np.intp)
        np.add.at(pair_hist, idx, 1)
        np.add.at(aut_hist, idx, auts[nonsingular])


def hurwitz6(delta: int) -> int:
    """Six times the Hurwitz-Kronecker class number H(delta), delta < 0.

    Scans all reduced positive-definite forms (a, b, c) of discriminant
    delta, including imprimitive ones; a form whose primitive part has
    discriminant -3 or -4 carries weight 2 or 3 instead of 6.
    """
    total = 0
    amax = math.isqrt(-delta // 3)
    parity = delta & 1
    for a in range(1, amax + 1):
        a4 = 4 * a
        for b in range(parity, a + 1, 2):
            num = b * b - delta
            if num % a4:
                continue
            c = num // a4
            if c < a:
                continue
            if b == 0 and a == c:
                w = 3  # g*(x^2 + y^2)
            elif a == b == c:
                w = 2  # g*(x^2 + xy + y^2)
            else:
                w = 6
            if b != 0 and b != a and a != c:
                w *= 2  # mirror form (a, -b, c) is reduced and distinct
            total += w
    return total


def vlk_histogram(
    l: int, k: int, p: int, nums: np.ndarray, dens: np.ndarray, counts: np.ndarray
) -> int:
    """Exact law of the depth-k local factor at l over one full period.

    Evaluates the capped local factor on t^2 - 4p for t = 0 .. l^(2k) - 1
    and bins identical values.  Fills (nums, dens, counts) with the reduced
    value fractions and their residue counts; returns the number of bins.
    """
    l2k = l ** (2 * k)
    table: dict[tuple[int, int], int] = {}
    for t in range(l2k):
        num, den = _vlk_pair(l, k, t * t - 4 * p)
        table[(num, den)] = table.get((num, den), 0) + 1
    if len(table) > nums.shape[0]:
        raise ValueError("vlk_histogram: output arrays too small")
    for i, ((num, den), cnt) in enumerate(sorted(table.items())):
        nums[i] = num
        dens[i] = den
        counts[i] = cnt
    return len(table)


def _vlk_pair(l: int, k: int, delta: int) -> tuple[int, int]:
    """Capped local factor value as a reduced fraction (num, den)."""
    l2k = l ** (2 * k)
    if delta % l2k == 0:
        return l, l - 1
    # extract the even power of l (with the mod-4 condition at l = 2)
    d = 0
    ll = l * l
    while delta % ll == 0:
        nxt = delta // ll
        if l == 2 and nxt % 4 not in (0, 1):
            break
        delta = nxt
        d += 1
    if l == 2:
        r = delta & 7
        s = 0 if r % 2 == 0 else (1 if r in (1, 7) else -1)
    else:
        r = delta % l
        s = 0 if r == 0 else (1 if pow(r, (l - 1) // 2, l) == 1 else -1)
    if s == 1:
        return l, l - 1
    ld = l**d
    if s == 0:
        num = l * l * (l + 1) * (l * ld - 1)
        den = (l * l - 1) * ld * l * l
    else:
        num = l * l * ((l + 1) * ld - 2)
        den = (l * l - 1) * ld * l
    g = math.gcd(num, den)
    return num // g, den // g


def dinic_maxflow(
    dist2: np.ndarray, eps2: float, supply: np.ndarray, demand: np.ndarray
) -> int:
    """Max flow from supplies to demands across pairs with dist2 <= eps2.

    Bipartite Dinic with integer capacities; pair arcs are uncapacitated.
    Returns the integer flow value.
    """
    n, m = dist2.shape
    src, snk = n + m, n + m + 1
    # adjacency as edge lists: (to, cap, rev_index)
    graph: list[list[list[int]]] = [[] for _ in range(n + m + 2)]

    def add_edge(u: int, v: int, cap: int) -> None:
        graph[u].append([v, cap, len(graph[v])])
        graph[v].append([u, 0, len(graph[u]) - 1])

    big = int(supply.sum()) + 1
    for i in range(n):
        if supply[i] > 0:
            add_edge(src, i, int(supply[i]))
    for j in range(m):
        if demand[j] > 0:
            add_edge(n + j, snk, int(demand[j]))
    ii, jj = np.nonzero(dist2 <= eps2)
    for i, j in zip(ii.tolist(), jj.tolist()):
        add_edge(i, n + int(j), big)

    flow = 0
    while True:
        level = [-1] * (n + m + 2)
        level[src] = 0
        queue = [src]
        for u in queue:
            for e in graph[u]:
                if e[1] > 0 and level[e[0]] < 0:
                    level[e[0]] = level[u] + 1
                    queue.append(e[0])
        if level[snk] < 0:
            return flow
        it = [0] * (n + m + 2)

        def dfs(u: int, f: int) -> int:
            if u == snk:
                return f
            while it[u] < len(graph[u]):
                e = graph[u][it[u]]
                if e[1] > 0 and level[e[0]] == level[u] + 1:
                    d = dfs(e[0], min(f, e[1]))
                    if d > 0:
                        e[1] -= d
                        graph[e[0]][e[2]][1] += d
                        return d
                it[u] += 1
            return 0

        while True:
            pushed = dfs(src, big)
            if pushed == 0:
                break
            flow += pushed


def transport_cost(dist: np.ndarray, supply: np.ndarray, demand: np.ndarray) -> float:
    """Minimum-cost transportation of integer supplies to integer demands.

    Successive shortest paths with potentials (Dijkstra); ground costs are
    the float entries of dist.  Returns the optimal total cost
    sum f_ij * dist[i, j]; exactness is limited only by float cost sums.
    """
    n, m = dist.shape
    sup = supply.astype(np.int64).copy()
    dem = demand.astype(np.int64).copy()
    if int(sup.sum()) != int(dem.sum()):
        raise ValueError("transport_cost: supply and demand totals differ")
    flow: dict[tuple[int, int], int] = {}
    pot = np.zeros(n + m)
    inf = math.inf
    total_cost = 0.0
    remaining = int(dem.sum())
    while remaining > 0:
        distv = np.full(n + m, inf)
        parent = [-1] * (n + m)
        heap = []
        for i in range(n):
            if sup[i] > 0:
                distv[i] = 0.0
                heapq.heappush(heap, (0.0, i))
        target = -1
        visited = [False] * (n + m)
        while heap:
            du, u = heapq.heappop(heap)
            if visited[u]:
                continue
            visited[u] = True
            if u >= n and dem[u - n] > 0:
                target = u
                break
            if u < n:
                rc = dist[u] + pot[u] - pot[n:]
                for j in range(m):
                    nd = du + max(rc[j], 0.0)
                    if nd < distv[n + j] and not visited[n + j]:
                        distv[n + j] = nd
                        parent[n + j] = u
                        heapq.heappush(heap, (nd, n + j))
            else:
                j = u - n
                for (i, jj), f in flow.items():
                    if jj == j and f > 0 and not visited[i]:
                        nd = du + max(-dist[i, j] + pot[u] - pot[i], 0.0)
                        if nd < distv[i]:
                            distv[i] = nd
                            parent[i] = u
                            heapq.heappush(heap, (nd, i))
        if target < 0:
            raise ArithmeticError("transport_cost: no augmenting path")
        # recover path, find bottleneck
        path = [target]
        while parent[path[-1]] >= 0:
            path.append(parent[path[-1]])
        path.reverse()
        delta = min(int(sup[path[0]]), int(dem[target - n]))
        for a, b in zip(path, path[1:]):
            if a >= n:  # backward arc sink->source
                delta = min(delta, flow[(b, a - n)])
        for a, b in zip(path, path[1:]):
            if a < n:
                flow[(a, b - n)] = flow.get((a, b - n), 0) + delta
            else:
                flow[(b, a - n)] -= delta
        sup[path[0]] -= delta
        dem[target - n] -= delta
        remaining -= delta
        dmax = distv[target]
        for v in range(n + m):
            pot[v] += min(distv[v], dmax) if distv[v] != inf else dmax
    for (i, j), f in flow.items():
        total_cost += f * float(dist[i, j])
    return total_cost
