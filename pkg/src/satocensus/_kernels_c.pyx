# cython: language_level=3
"""Compiled kernels for the hot loops.

Mirrors `_kernels_py` exactly: same signatures, bit-identical integer
outputs.  The census scan, the reduced-form scan, the residue
enumeration, and both flow solvers release the GIL.
"""

from libc.math cimport INFINITY, sqrt
from libc.stdlib cimport free, malloc

import numpy as np

BACKEND_NAME = "c"


cdef inline long long pymod(long long x, long long m) nogil:
    cdef long long r = x % m
    if r < 0:
        r += m
    return r


cdef inline long long gcd_ll(long long a, long long b) nogil:
    cdef long long t
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef inline long long ll_isqrt(long long x) nogil:
    cdef long long r = <long long>sqrt(<double>x)
    while r > 0 and r * r > x:
        r -= 1
    while (r + 1) * (r + 1) <= x:
        r += 1
    return r


cdef long long _trace_sum(long long p, long long a, long long b,
                          signed char* chi, long long* cube) nogil:
    # sum_x chi(x^3 + a x + b); trace is the negative of this.
    # branchless reductions (the comparisons are data-dependent coin flips)
    # and two interleaved lanes to break the a*x dependency chain.
    cdef long long x, u0, u1, s = 0
    cdef long long ax0 = 0, ax1 = a
    cdef long long a2 = a + a
    a2 -= p * (a2 >= p)
    for x in range(0, p - 1, 2):
        u0 = cube[x] + ax0 + b
        u0 -= p * (u0 >= p)
        u0 -= p * (u0 >= p)
        u1 = cube[x + 1] + ax1 + b
        u1 -= p * (u1 >= p)
        u1 -= p * (u1 >= p)
        s += chi[u0]
        s += chi[u1]
        ax0 += a2
        ax0 -= p * (ax0 >= p)
        ax1 += a2
        ax1 -= p * (ax1 >= p)
    u0 = cube[p - 1] + ax0 + b
    u0 -= p * (u0 >= p)
    u0 -= p * (u0 >= p)
    return s + chi[u0]


def curve_trace(long long p, long long a, long long b,
                signed char[::1] chi, long long[::1] cube):
    cdef long long s
    with nogil:
        s = _trace_sum(p, a, b, &chi[0], &cube[0])
    return -s


def inverse_table(long long p, long long[::1] inv):
    # inv[i] = i^-1 mod p for 1 <= i < p, via the standard recurrence
    cdef long long i
    with nogil:
        inv[1] = 1
        for i in range(2, p):
            inv[i] = (p - p / i) * inv[p % i] % p


def generic_j_hist(long long p, long long j_lo, long long j_hi,
                   signed char[::1] chi, long long[::1] cube,
                   long long[::1] inv, long long[::1] hist):
    cdef long long h = (hist.shape[0] - 1) // 2
    cdef long long j1728 = 1728 % p
    cdef long long j, kk, a, b, s, bad = 0
    with nogil:
        for j in range(j_lo, j_hi):
            if j == 0 or j == j1728:
                continue
            kk = j * inv[pymod(1728 - j, p)] % p
            a = 3 * kk % p
            b = 2 * kk % p
            s = _trace_sum(p, a, b, &chi[0], &cube[0])
            if s > h or s < -h:
                bad += 1
            else:
                hist[h - s] += 1
                hist[h + s] += 1
    if bad:
        raise ArithmeticError("Hasse bound violated in census kernel")


def pair_census_hists(long long p, signed char[::1] chi, long long[::1] cube,
                      long long[::1] pair_hist, long long[::1] aut_hist):
    cdef long long h = (pair_hist.shape[0] - 1) // 2
    cdef long long aut6 = gcd_ll(6, p - 1)
    cdef long long aut4 = gcd_ll(4, p - 1)
    cdef long long a, b, x, s, u, ax, a3, aut, bad = 0
    cdef long long* w = <long long*>malloc(p * sizeof(long long))
    if w == NULL:
        raise MemoryError()
    try:
        with nogil:
            for a in range(p):
                ax = 0
                for x in range(p):
                    u = cube[x] + ax
                    if u >= p:
                        u -= p
                    w[x] = u
                    ax += a
                    if ax >= p:
                        ax -= p
                a3 = 4 * (a * a % p) % p * a % p
                for b in range(p):
                    if (a3 + 27 * b % p * b) % p == 0:
                        continue
                    s = 0
                    for x in range(p):
                        u = w[x] + b
                        if u >= p:
                            u -= p
                        s += chi[u]
                    if s > h or s < -h:
                        bad += 1
                        continue
                    pair_hist[h - s] += 1
                    if a == 0:
                        aut = aut6
                    elif b == 0:
                        aut = aut4
                    else:
                        aut = 2
                    aut_hist[h - s] += aut
    finally:
        free(w)
    if bad:
        raise ArithmeticError("Hasse bound violated in pair census kernel")


cdef long long _hurwitz6(long long delta) nogil:
    cdef long long amax = ll_isqrt((-delta) / 3)
    cdef long long parity = pymod(delta, 2)
    cdef long long a, b, a4, num, c, w, total = 0
    for a in range(1, amax + 1):
        a4 = 4 * a
        b = parity
        while b <= a:
            num = b * b - delta
            if num % a4 == 0:
                c = num / a4
                if c >= a:
                    if b == 0 and a == c:
                        w = 3
                    elif a == b and b == c:
                        w = 2
                    else:
                        w = 6
                    if b != 0 and b != a and a != c:
                        w *= 2
                    total += w
            b += 2
    return total


def hurwitz6(long long delta):
    if delta >= 0:
        raise ValueError("hurwitz6 needs delta < 0")
    cdef long long total
    with nogil:
        total = _hurwitz6(delta)
    return total


cdef void _vlk_pair(long long l, long long l2k, long long delta,
                    signed char* qr, long long* onum, long long* oden) nogil:
    cdef long long d = 0, ll = l * l, nxt, r, s, ld = 1, num, den, g, i
    if pymod(delta, l2k) == 0:
        onum[0] = l
        oden[0] = l - 1
        return
    while pymod(delta, ll) == 0:
        nxt = delta / ll
        if l == 2 and pymod(nxt, 4) > 1:
            break
        delta = nxt
        d += 1
    if l == 2:
        r = pymod(delta, 8)
        if r % 2 == 0:
            s = 0
        elif r == 1 or r == 7:
            s = 1
        else:
            s = -1
    else:
        s = qr[pymod(delta, l)]
    if s == 1:
        onum[0] = l
        oden[0] = l - 1
        return
    for i in range(d):
        ld *= l
    if s == 0:
        num = l * l * (l + 1) * (l * ld - 1)
        den = (l * l - 1) * ld * l * l
    else:
        num = l * l * ((l + 1) * ld - 2)
        den = (l * l - 1) * ld * l
    g = gcd_ll(num, den)
    onum[0] = num / g
    oden[0] = den / g


def vlk_histogram(long long l, long long k, long long p,
                  long long[::1] nums, long long[::1] dens,
                  long long[::1] counts):
    cdef long long l2k = 1, i, t, delta, num, den
    for i in range(2 * k):
        l2k *= l
    cdef signed char* qr = <signed char*>malloc(l * sizeof(signed char))
    if qr == NULL:
        raise MemoryError()
    cdef long long cap = nums.shape[0]
    cdef long long* vn = <long long*>malloc(cap * sizeof(long long))
    cdef long long* vd = <long long*>malloc(cap * sizeof(long long))
    cdef long long* vc = <long long*>malloc(cap * sizeof(long long))
    cdef long long nbins = 0, hit, j
    cdef long long tn, td, tc
    if vn == NULL or vd == NULL or vc == NULL:
        free(qr); free(vn); free(vd); free(vc)
        raise MemoryError()
    try:
        with nogil:
            for i in range(l):
                qr[i] = -1
            qr[0] = 0
            for i in range(1, l):
                qr[i * i % l] = 1
            for t in range(l2k):
                delta = t * t - 4 * p
                _vlk_pair(l, l2k, delta, qr, &num, &den)
                hit = -1
                for j in range(nbins):
                    if vn[j] == num and vd[j] == den:
                        hit = j
                        break
                if hit >= 0:
                    vc[hit] += 1
                elif nbins < cap:
                    vn[nbins] = num
                    vd[nbins] = den
                    vc[nbins] = 1
                    nbins += 1
                else:
                    nbins = -1
                    break
            if nbins > 0:
                # insertion sort by (num, den), matching the pure lane
                for i in range(1, nbins):
                    tn = vn[i]; td = vd[i]; tc = vc[i]
                    j = i - 1
                    while j >= 0 and (vn[j] > tn or (vn[j] == tn and vd[j] > td)):
                        vn[j + 1] = vn[j]; vd[j + 1] = vd[j]; vc[j + 1] = vc[j]
                        j -= 1
                    vn[j + 1] = tn; vd[j + 1] = td; vc[j + 1] = tc
        if nbins < 0:
            raise ValueError("vlk_histogram: output arrays too small")
        for i in range(nbins):
            nums[i] = vn[i]
            dens[i] = vd[i]
            counts[i] = vc[i]
    finally:
        free(qr); free(vn); free(vd); free(vc)
    return nbins


def dinic_maxflow(double[:, ::1] dist, double eps,
                  long long[::1] supply, long long[::1] demand):
    """Max flow supplies -> demands across pairs with dist[i,j] <= eps."""
    cdef Py_ssize_t n = dist.shape[0], m = dist.shape[1]
    cdef long long V = n + m + 2, src = n + m, snk = n + m + 1
    cdef long long i, j, cnt = 0, big = 1
    for i in range(n):
        big += supply[i]
        for j in range(m):
            if dist[i, j] <= eps:
                cnt += 1
    for j in range(m):
        cnt += 1
    cnt += n
    cdef long long E = 2 * cnt
    eto_a = np.empty(E, dtype=np.int64)
    ecap_a = np.empty(E, dtype=np.int64)
    enext_a = np.empty(E, dtype=np.int64)
    ehead_a = np.full(V, -1, dtype=np.int64)
    cdef long long[::1] eto = eto_a, ecap = ecap_a, enext = enext_a, ehead = ehead_a
    cdef long long ecnt = 0

    # source -> X, Y -> sink, and threshold edges X -> Y (each with reverse)
    for i in range(n):
        eto[ecnt] = i; ecap[ecnt] = supply[i]; enext[ecnt] = ehead[src]; ehead[src] = ecnt; ecnt += 1
        eto[ecnt] = src; ecap[ecnt] = 0; enext[ecnt] = ehead[i]; ehead[i] = ecnt; ecnt += 1
    for j in range(m):
        eto[ecnt] = snk; ecap[ecnt] = demand[j]; enext[ecnt] = ehead[n + j]; ehead[n + j] = ecnt; ecnt += 1
        eto[ecnt] = n + j; ecap[ecnt] = 0; enext[ecnt] = ehead[snk]; ehead[snk] = ecnt; ecnt += 1
    for i in range(n):
        for j in range(m):
            if dist[i, j] <= eps:
                eto[ecnt] = n + j; ecap[ecnt] = big; enext[ecnt] = ehead[i]; ehead[i] = ecnt; ecnt += 1
                eto[ecnt] = i; ecap[ecnt] = 0; enext[ecnt] = ehead[n + j]; ehead[n + j] = ecnt; ecnt += 1

    level_a = np.empty(V, dtype=np.int64)
    queue_a = np.empty(V, dtype=np.int64)
    it_a = np.empty(V, dtype=np.int64)
    path_a = np.empty(V + 2, dtype=np.int64)
    cdef long long[::1] level = level_a, queue = queue_a, it = it_a, path_e = path_a
    cdef long long flow = 0
    with nogil:
        flow = _dinic_run(V, src, snk, eto, ecap, enext, ehead,
                          level, queue, it, path_e, big)
    return flow


cdef long long _dinic_run(long long V, long long src, long long snk,
                          long long[::1] eto, long long[::1] ecap,
                          long long[::1] enext, long long[::1] ehead,
                          long long[::1] level, long long[::1] queue,
                          long long[::1] it, long long[::1] path_e,
                          long long big) nogil:
    cdef long long total = 0, qh, qt, u, v, e, top, bn, idx, tail
    while True:
        for u in range(V):
            level[u] = -1
        level[src] = 0
        queue[0] = src
        qh = 0
        qt = 1
        while qh < qt:
            u = queue[qh]
            qh += 1
            e = ehead[u]
            while e != -1:
                v = eto[e]
                if ecap[e] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue[qt] = v
                    qt += 1
                e = enext[e]
        if level[snk] < 0:
            return total
        for u in range(V):
            it[u] = ehead[u]
        top = 0
        u = src
        while True:
            if u == snk:
                bn = big
                for idx in range(top):
                    if ecap[path_e[idx]] < bn:
                        bn = ecap[path_e[idx]]
                for idx in range(top):
                    ecap[path_e[idx]] -= bn
                    ecap[path_e[idx] ^ 1] += bn
                total += bn
                idx = 0
                while idx < top and ecap[path_e[idx]] > 0:
                    idx += 1
                top = idx
                u = src if top == 0 else eto[path_e[top - 1]]
                continue
            e = it[u]
            while e != -1:
                if ecap[e] > 0 and level[eto[e]] == level[u] + 1:
                    break
                e = enext[e]
            it[u] = e
            if e != -1:
                path_e[top] = e
                top += 1
                u = eto[e]
            else:
                level[u] = -1
                if u == src:
                    break
                top -= 1
                tail = src if top == 0 else eto[path_e[top - 1]]
                it[tail] = enext[path_e[top]]
                u = tail


def transport_cost(double[:, ::1] dist, long long[::1] supply,
                   long long[::1] demand):
    """Min-cost transportation via successive shortest paths (Dijkstra
    with potentials); returns the optimal total cost."""
    cdef Py_ssize_t n = dist.shape[0], m = dist.shape[1]
    cdef long long i, j, total_sup = 0, total_dem = 0
    for i in range(n):
        total_sup += supply[i]
    for j in range(m):
        total_dem += demand[j]
    if total_sup != total_dem:
        raise ValueError("transport_cost: supply and demand totals differ")

    sup_a = np.array(supply, dtype=np.int64, copy=True)
    dem_a = np.array(demand, dtype=np.int64, copy=True)
    flow_a = np.zeros((n, m), dtype=np.int64)
    pot_a = np.zeros(n + m)
    dist_v_a = np.empty(n + m)
    parent_a = np.empty(n + m, dtype=np.int64)
    visited_a = np.empty(n + m, dtype=np.int8)
    heap_cap = 2 * n * m + 2 * (n + m) + 16
    hkey_a = np.empty(heap_cap)
    hnode_a = np.empty(heap_cap, dtype=np.int64)
    cdef long long[::1] sup = sup_a, dem = dem_a, parent = parent_a, hnode = hnode_a
    cdef long long[:, ::1] flow = flow_a
    cdef double[::1] pot = pot_a, dist_v = dist_v_a, hkey = hkey_a
    cdef signed char[::1] visited = visited_a
    cdef double cost = 0.0
    cdef long long ok
    with nogil:
        ok = _ssp_run(dist, sup, dem, flow, pot, dist_v, parent, visited,
                      hkey, hnode, heap_cap, n, m, total_dem)
    if ok < 0:
        raise ArithmeticError("transport_cost: no augmenting path")
    for i in range(n):
        for j in range(m):
            if flow[i, j]:
                cost += flow[i, j] * dist[i, j]
    return cost


cdef long long _ssp_run(double[:, ::1] dist, long long[::1] sup,
                        long long[::1] dem, long long[:, ::1] flow,
                        double[::1] pot, double[::1] dist_v,
                        long long[::1] parent, signed char[::1] visited,
                        double[::1] hkey, long long[::1] hnode,
                        long long heap_cap, Py_ssize_t n, Py_ssize_t m,
                        long long remaining) nogil:
    cdef long long hsize, u, v, i, j, target, delta, a, b
    cdef double du, rc, nd, dtarget
    while remaining > 0:
        for u in range(n + m):
            dist_v[u] = INFINITY
            visited[u] = 0
            parent[u] = -1
        hsize = 0
        for i in range(n):
            if sup[i] > 0:
                dist_v[i] = 0.0
                hsize = _heap_push(hkey, hnode, hsize, 0.0, i)
        target = -1
        while hsize > 0:
            du = hkey[0]
            u = hnode[0]
            hsize = _heap_pop(hkey, hnode, hsize)
            if visited[u]:
                continue
            visited[u] = 1
            if u >= n and dem[u - n] > 0:
                target = u
                dtarget = du
                break
            if u < n:
                for j in range(m):
                    v = n + j
                    if visited[v]:
                        continue
                    rc = dist[u, j] + pot[u] - pot[v]
                    if rc < 0:
                        rc = 0
                    nd = du + rc
                    if nd < dist_v[v]:
                        dist_v[v] = nd
                        parent[v] = u
                        if hsize >= heap_cap:
                            return -2
                        hsize = _heap_push(hkey, hnode, hsize, nd, v)
            else:
                j = u - n
                for i in range(n):
                    if flow[i, j] > 0 and not visited[i]:
                        rc = -dist[i, j] + pot[u] - pot[i]
                        if rc < 0:
                            rc = 0
                        nd = du + rc
                        if nd < dist_v[i]:
                            dist_v[i] = nd
                            parent[i] = u
                            if hsize >= heap_cap:
                                return -2
                            hsize = _heap_push(hkey, hnode, hsize, nd, i)
        if target < 0:
            return -1
        delta = dem[target - n]
        u = target
        while parent[u] >= 0:
            v = parent[u]
            if v >= n:  # backward arc over flow[u, v - n]
                if flow[u, v - n] < delta:
                    delta = flow[u, v - n]
            u = v
        if sup[u] < delta:
            delta = sup[u]
        a = target
        while parent[a] >= 0:
            b = parent[a]
            if b < n:
                flow[b, a - n] += delta
            else:
                flow[a, b - n] -= delta
            a = b
        sup[a] -= delta
        dem[target - n] -= delta
        remaining -= delta
        for u in range(n + m):
            if dist_v[u] < dtarget:
                pot[u] += dist_v[u]
            else:
                pot[u] += dtarget
    return 0


cdef inline long long _heap_push(double[::1] hkey, long long[::1] hnode,
                                 long long hsize, double key, long long node) nogil:
    cdef long long i = hsize, par
    hkey[i] = key
    hnode[i] = node
    while i > 0:
        par = (i - 1) >> 1
        if hkey[par] <= hkey[i]:
            break
        hkey[par], hkey[i] = hkey[i], hkey[par]
        hnode[par], hnode[i] = hnode[i], hnode[par]
        i = par
    return hsize + 1


cdef inline long long _heap_pop(double[::1] hkey, long long[::1] hnode,
                                long long hsize) nogil:
    cdef long long i = 0, child
    hsize -= 1
    hkey[0] = hkey[hsize]
    hnode[0] = hnode[hsize]
    while True:
        child = 2 * i + 1
        if child >= hsize:
            break
        if child + 1 < hsize and hkey[child + 1] < hkey[child]:
            child += 1
        if hkey[i] <= hkey[child]:
            break
        hkey[i], hkey[child] = hkey[child], hkey[i]
        hnode[i], hnode[child] = hnode[child], hnode[i]
        i = child
    return hsize
