"""Pure-Python branch-and-bound over request-to-time assignments.

Mirrors ``_kernel.pyx`` line for line; used when the extension is not built
or when a mask does not fit in 64 bits.
"""


def mask_cost(mask, costs, cache):
    c = cache.get(mask)
    if c is None:
        c = 0
        m = mask
        while m:
            low = m & -m
            c += costs[low.bit_length() - 1]
            m ^= low
        cache[mask] = c
    return c


def solve(masks, options, n_times, costs):
    """Minimise sum over times of the cost of the union of assigned masks.

    ``masks[i]`` is the root-path bitmask of request i, ``options[i]`` the
    ascending time indices it may use (the last one is its own deadline).
    Returns (best cost, chosen time index per request).
    """
    m = len(masks)
    cache = {}
    buckets = [0] * n_times
    assign = [0] * m

    # start from the solution that serves every request at its own deadline
    for i in range(m):
        k = options[i][-1]
        buckets[k] |= masks[i]
        assign[i] = k
    best = [sum(mask_cost(b, costs, cache) for b in buckets), list(assign)]
    buckets = [0] * n_times

    def lower_bound(i):
        lb = 0
        for j in range(i, m):
            mj = masks[j]
            low = None
            for k in options[j]:
                c = mask_cost(mj & ~buckets[k], costs, cache)
                if low is None or c < low:
                    low = c
                    if c == 0:
                        break
            if low > lb:
                lb = low
        return lb

    def rec(i, cost):
        if i == m:
            if cost < best[0]:
                best[0] = cost
                best[1] = list(assign)
            return
        if cost + lower_bound(i) >= best[0]:
            return
        mi = masks[i]
        opts = options[i]
        # a time that already covers this request's path costs nothing and
        # dominates every alternative
        for k in opts:
            if buckets[k] & mi == mi:
                assign[i] = k
                rec(i + 1, cost)
                return
        cand = sorted((mask_cost(mi & ~buckets[k], costs, cache), k) for k in opts)
        for inc, k in cand:
            if cost + inc >= best[0]:
                break
            old = buckets[k]
            buckets[k] = old | mi
            assign[i] = k
            rec(i + 1, cost + inc)
            buckets[k] = old

    rec(0, 0)
    return best[0], best[1]
