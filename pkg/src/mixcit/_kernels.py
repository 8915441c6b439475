"""Compiled brute-force neighbour kernels.

Distances are built per coordinate block as max-norms; a differing
categorical code adds ``penalty`` (1.0 for the discrete metric, inf for the
0-inf metric) to its block.
"""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _block(num, cat, i, j, penalty):
    d = 0.0
    for c in range(num.shape[1]):
        a = abs(num[i, c] - num[j, c])
        if a > d:
            d = a
    for c in range(cat.shape[1]):
        if cat[i, c] != cat[j, c]:
            if penalty > d:
                d = penalty
            break
    return d


@njit(cache=True)
def _quickselect(a, n, k):
    """k-th smallest (0-based) of a[:n]; reorders a in place."""
    lo = 0
    hi = n - 1
    while hi > lo:
        pivot = a[(lo + hi) >> 1]
        i = lo
        j = hi
        while i <= j:
            while a[i] < pivot:
                i += 1
            while a[j] > pivot:
                j -= 1
            if i <= j:
                t = a[i]
                a[i] = a[j]
                a[j] = t
                i += 1
                j -= 1
        if k <= j:
            hi = j
        elif k >= i:
            lo = i
        else:
            break
    return a[k]


@njit(cache=True)
def _select(a, n, k, buf, samp):
    """k-th smallest (0-based) of a[:n] without reordering a.

    A strided sample gives an upper bound on the answer; only values below
    it are copied into ``buf`` and selected from. Falls back to a full
    selection on a copy when the bound turns out too small.
    """
    s = samp.shape[0]
    if n <= 2 * s:
        for t in range(n):
            buf[t] = a[t]
        return _quickselect(buf, n, k)
    step = n // s
    for t in range(s):
        samp[t] = a[t * step]
    p = (k + 1.0) / n
    hi = int(p * s + 3.0 * np.sqrt(s * p * (1.0 - p)) + 2.0)
    if hi < s:
        tau = _quickselect(samp, s, hi)
        c = 0
        for j in range(n):
            v = a[j]
            buf[c] = v
            c += v <= tau
        if c > k:
            return _quickselect(buf, c, k)
    for t in range(n):
        buf[t] = a[t]
    return _quickselect(buf, n, k)


@njit(cache=True)
def _fill_block(out, num, cat, i, lo, hi, penalty):
    m = hi - lo
    for t in range(m):
        out[t] = 0.0
    for c in range(num.shape[0]):
        v = num[c, i]
        for t in range(m):
            a = abs(num[c, lo + t] - v)
            if a > out[t]:
                out[t] = a
    for c in range(cat.shape[0]):
        v = cat[c, i]
        for t in range(m):
            if cat[c, lo + t] != v and penalty > out[t]:
                out[t] = penalty


@njit(cache=True)
def radius_and_counts(xn, xc, yn, yc, zn, zc, group_ptr, group_of, k, penalty, strict):
    """k-th neighbour radius in XYZ and the XYZ/XZ/YZ/Z counts at that radius.

    Arrays are feature-major (one row per coordinate) with samples sorted so
    that group g occupies ``group_ptr[g]:group_ptr[g + 1]``. Neighbours of a
    sample are searched only inside its group; samples outside the group
    must be at infinite distance (or the group must hold every sample). A
    sample whose group has fewer than ``k[i]`` other members gets radius inf
    and counts equal to the number of other group members.
    """
    n = group_of.shape[0]
    rho = np.empty(n)
    cxyz = np.empty(n, np.int64)
    cxz = np.empty(n, np.int64)
    cyz = np.empty(n, np.int64)
    cz = np.empty(n, np.int64)
    maxm = 0
    for g in range(group_ptr.shape[0] - 1):
        m = group_ptr[g + 1] - group_ptr[g]
        if m > maxm:
            maxm = m
    da = np.empty(maxm)
    db = np.empty(maxm)
    dc = np.empty(maxm)
    dj = np.empty(maxm)
    buf = np.empty(maxm)
    samp = np.empty(128)
    for i in range(n):
        g = group_of[i]
        lo = group_ptr[g]
        hi = group_ptr[g + 1]
        m = hi - lo
        _fill_block(da, xn, xc, i, lo, hi, penalty)
        _fill_block(db, yn, yc, i, lo, hi, penalty)
        _fill_block(dc, zn, zc, i, lo, hi, penalty)
        for t in range(m):
            dj[t] = max(da[t], db[t], dc[t])
        # self sits at distance 0 inside its own group, so the k-th other
        # neighbour is the (k + 1)-th smallest value including self
        ki = k[i]
        if ki > m - 1:
            r = np.inf
        else:
            r = _select(dj, m, ki, buf, samp)
        rho[i] = r
        n1 = 0
        n2 = 0
        n3 = 0
        n4 = 0
        if strict:
            for t in range(m):
                a = da[t]
                b = db[t]
                c = dc[t]
                n1 += dj[t] < r
                n2 += max(a, c) < r
                n3 += max(b, c) < r
                n4 += c < r
            self_hit = 1 if r > 0.0 else 0
        else:
            for t in range(m):
                a = da[t]
                b = db[t]
                c = dc[t]
                n1 += dj[t] <= r
                n2 += max(a, c) <= r
                n3 += max(b, c) <= r
                n4 += c <= r
            self_hit = 1
        cxyz[i] = n1 - self_hit
        cxz[i] = n2 - self_hit
        cyz[i] = n3 - self_hit
        cz[i] = n4 - self_hit
    return rho, cxyz, cxz, cyz, cz


@njit(cache=True)
def knn_radius(num, k):
    """Max-norm distance of every row to its k-th nearest other row."""
    n = num.shape[0]
    out = np.empty(n)
    d = np.empty(n - 1)
    buf = np.empty(n - 1)
    samp = np.empty(128)
    cat = np.zeros((n, 0), np.int64)
    for i in range(n):
        t = 0
        for j in range(n):
            if j != i:
                d[t] = _block(num, cat, i, j, 1.0)
                t += 1
        out[i] = _select(d, n - 1, k - 1, buf, samp)
    return out


@njit(cache=True)
def knn_pools(num, group_ptr, members, group_of, k_perm):
    """Rows of the same group within the k_perm-th smallest distance (self included)."""
    n = num.shape[0]
    cat = np.zeros((n, 0), np.int64)
    ptr = np.zeros(n + 1, np.int64)
    maxm = 0
    for g in range(group_ptr.shape[0] - 1):
        m = group_ptr[g + 1] - group_ptr[g]
        if m > maxm:
            maxm = m
    d = np.empty(maxm)
    cand = np.empty(maxm, np.int64)
    buf = np.empty(maxm)
    samp = np.empty(128)
    out = np.empty(n * min(maxm, 4 * k_perm + 4), np.int64)
    used = 0
    for i in range(n):
        g = group_of[i]
        lo = group_ptr[g]
        hi = group_ptr[g + 1]
        m = hi - lo
        for p in range(lo, hi):
            j = members[p]
            d[p - lo] = _block(num, cat, i, j, 1.0)
            cand[p - lo] = j
        if m <= k_perm:
            r = np.inf
        else:
            r = _select(d, m, k_perm - 1, buf, samp)
        cnt = 0
        for s in range(m):
            if d[s] <= r:
                cnt += 1
        if used + cnt > out.shape[0]:
            grown = np.empty(max(2 * out.shape[0], used + cnt), np.int64)
            grown[:used] = out[:used]
            out = grown
        for s in range(m):
            if d[s] <= r:
                out[used] = cand[s]
                used += 1
        ptr[i + 1] = used
    return ptr, out[:used].copy()


@njit(cache=True)
def pool_matching(ptr, pool, visit, u):
    """Random bijection sigma with sigma[i] in pool[i] for every row.

    Rows are visited in ``visit`` order and take a uniformly chosen unused
    pool member (``u`` holds one uniform draw per visit). When a pool is
    exhausted, an augmenting path through already assigned rows frees a
    member; one always exists because every pool contains its own row.
    """
    n = ptr.shape[0] - 1
    sigma = np.full(n, -1, np.int64)
    owner = np.full(n, -1, np.int64)
    parent = np.empty(n, np.int64)
    seen = np.zeros(n, np.int64)
    queue = np.empty(n, np.int64)
    stamp = 0
    for t in range(n):
        i = visit[t]
        free = 0
        for p in range(ptr[i], ptr[i + 1]):
            if owner[pool[p]] < 0:
                free += 1
        if free > 0:
            pick = min(int(u[t] * free), free - 1)
            for p in range(ptr[i], ptr[i + 1]):
                j = pool[p]
                if owner[j] < 0:
                    if pick == 0:
                        sigma[i] = j
                        owner[j] = i
                        break
                    pick -= 1
            continue
        stamp += 1
        head = 0
        tail = 0
        for p in range(ptr[i], ptr[i + 1]):
            j = pool[p]
            if seen[j] != stamp:
                seen[j] = stamp
                parent[j] = -1
                queue[tail] = j
                tail += 1
        end = -1
        while head < tail and end < 0:
            j = queue[head]
            head += 1
            r = owner[j]
            for p in range(ptr[r], ptr[r + 1]):
                v = pool[p]
                if seen[v] == stamp:
                    continue
                seen[v] = stamp
                parent[v] = j
                if owner[v] < 0:
                    end = v
                    break
                queue[tail] = v
                tail += 1
        if end < 0:
            return sigma  # unreachable when every pool contains its own row
        cur = end
        while parent[cur] >= 0:
            prev = parent[cur]
            r = owner[prev]
            sigma[r] = cur
            owner[cur] = r
            cur = prev
        sigma[i] = cur
        owner[cur] = i
    return sigma
