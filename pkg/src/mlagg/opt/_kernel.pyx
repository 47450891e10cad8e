# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled branch-and-bound over request-to-time assignments.

Same search as ``_kernel_py.solve`` with 64-bit vertex masks and int64
costs.  The caller guarantees at most 64 vertices and no overflow.
"""
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free


cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef struct Ctx:
    int m
    int n_times
    uint64_t *masks
    int *opt_start
    int *opt_len
    int *opts
    int64_t *costs
    uint64_t *buckets
    int *assign
    int *best_assign
    int64_t best
    int64_t *scratch_inc
    int *scratch_k


cdef inline int64_t mask_cost(uint64_t mask, int64_t *costs) noexcept nogil:
    cdef int64_t c = 0
    while mask:
        c += costs[__builtin_ctzll(mask)]
        mask &= mask - 1
    return c


cdef int64_t lower_bound(Ctx *ctx, int i) noexcept nogil:
    cdef int64_t lb = 0, low, c
    cdef int j, q, k
    for j in range(i, ctx.m):
        low = -1
        for q in range(ctx.opt_len[j]):
            k = ctx.opts[ctx.opt_start[j] + q]
            c = mask_cost(ctx.masks[j] & ~ctx.buckets[k], ctx.costs)
            if low < 0 or c < low:
                low = c
                if c == 0:
                    break
        if low > lb:
            lb = low
    return lb


cdef void rec(Ctx *ctx, int i, int64_t cost) noexcept nogil:
    cdef int q, k, n, a, b
    cdef uint64_t mi, old
    cdef int64_t inc, ti
    cdef int tk
    cdef int64_t *incs
    cdef int *ks
    if i == ctx.m:
        if cost < ctx.best:
            ctx.best = cost
            for q in range(ctx.m):
                ctx.best_assign[q] = ctx.assign[q]
        return
    if cost + lower_bound(ctx, i) >= ctx.best:
        return
    mi = ctx.masks[i]
    n = ctx.opt_len[i]
    for q in range(n):
        k = ctx.opts[ctx.opt_start[i] + q]
        if ctx.buckets[k] & mi == mi:
            ctx.assign[i] = k
            rec(ctx, i + 1, cost)
            return
    # candidates for this level live in the scratch slice starting at i * n_times
    incs = ctx.scratch_inc + i * ctx.n_times
    ks = ctx.scratch_k + i * ctx.n_times
    for q in range(n):
        k = ctx.opts[ctx.opt_start[i] + q]
        incs[q] = mask_cost(mi & ~ctx.buckets[k], ctx.costs)
        ks[q] = k
    # insertion sort by (inc, k), same order as the Python fallback
    for a in range(1, n):
        ti = incs[a]
        tk = ks[a]
        b = a - 1
        while b >= 0 and (incs[b] > ti or (incs[b] == ti and ks[b] > tk)):
            incs[b + 1] = incs[b]
            ks[b + 1] = ks[b]
            b -= 1
        incs[b + 1] = ti
        ks[b + 1] = tk
    for q in range(n):
        inc = incs[q]
        k = ks[q]
        if cost + inc >= ctx.best:
            break
        old = ctx.buckets[k]
        ctx.buckets[k] = old | mi
        ctx.assign[i] = k
        rec(ctx, i + 1, cost + inc)
        ctx.buckets[k] = old


def solve(masks, options, int n_times, costs):
    """See ``_kernel_py.solve``."""
    cdef Ctx ctx
    cdef int m = len(masks)
    cdef int total = sum(len(o) for o in options)
    cdef int i, q, pos = 0
    cdef int64_t start_cost = 0
    ctx.m = m
    ctx.n_times = n_times
    ctx.masks = <uint64_t *> malloc(max(m, 1) * sizeof(uint64_t))
    ctx.opt_start = <int *> malloc(max(m, 1) * sizeof(int))
    ctx.opt_len = <int *> malloc(max(m, 1) * sizeof(int))
    ctx.opts = <int *> malloc(max(total, 1) * sizeof(int))
    ctx.costs = <int64_t *> malloc(64 * sizeof(int64_t))
    ctx.buckets = <uint64_t *> malloc(max(n_times, 1) * sizeof(uint64_t))
    ctx.assign = <int *> malloc(max(m, 1) * sizeof(int))
    ctx.best_assign = <int *> malloc(max(m, 1) * sizeof(int))
    ctx.scratch_inc = <int64_t *> malloc(max(m * n_times, 1) * sizeof(int64_t))
    ctx.scratch_k = <int *> malloc(max(m * n_times, 1) * sizeof(int))
    try:
        for q in range(64):
            ctx.costs[q] = costs[q] if q < len(costs) else 0
        for i in range(m):
            ctx.masks[i] = masks[i]
            ctx.opt_start[i] = pos
            ctx.opt_len[i] = len(options[i])
            for q in range(len(options[i])):
                ctx.opts[pos] = options[i][q]
                pos += 1
        for q in range(n_times):
            ctx.buckets[q] = 0
        for i in range(m):
            ctx.assign[i] = options[i][len(options[i]) - 1]
            ctx.buckets[ctx.assign[i]] |= ctx.masks[i]
            ctx.best_assign[i] = ctx.assign[i]
        for q in range(n_times):
            start_cost += mask_cost(ctx.buckets[q], ctx.costs)
            ctx.buckets[q] = 0
        ctx.best = start_cost
        with nogil:
            rec(&ctx, 0, 0)
        return ctx.best, [ctx.best_assign[i] for i in range(m)]
    finally:
        free(ctx.masks); free(ctx.opt_start); free(ctx.opt_len); free(ctx.opts)
        free(ctx.costs); free(ctx.buckets); free(ctx.assign); free(ctx.best_assign)
        free(ctx.scratch_inc); free(ctx.scratch_k)
