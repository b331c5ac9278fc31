"""Pure-Python kernels; same interface as the compiled ``_ckernels`` module."""


def best_subsets(m, k, ballot_masks, sizes, weights, table):
    """Maximise the integer committee score over all k-subsets of range(m).

    ``table[y][x]`` is the (integer-scaled) score one voter with a ballot of
    size y gives a committee containing x of her candidates.  Returns
    ``(best, masks)`` where ``masks`` lists every optimal committee bitmask in
    increasing order.
    """
    groups = list(zip(ballot_masks, sizes, weights))
    best = None
    winners = []
    mask = (1 << k) - 1
    limit = 1 << m
    while mask < limit:
        score = 0
        for bm, y, w in groups:
            score += w * table[y][(mask & bm).bit_count()]
        if best is None or score > best:
            best = score
            winners = [mask]
        elif score == best:
            winners.append(mask)
        # next integer with the same popcount
        low = mask & -mask
        ripple = mask + low
        mask = (((ripple ^ mask) >> 2) // low) | ripple
    return best, winners


def has_independent_set(n, adj, t):
    """True iff the graph given by neighbour bitmasks has an independent set of size t."""
    return _search((1 << n) - 1, adj, t)


def _search(avail, adj, need):
    if need <= 0:
        return True
    if avail.bit_count() < need:
        return False
    best_v = -1
    best_deg = -1
    rest = avail
    while rest:
        low = rest & -rest
        v = low.bit_length() - 1
        rest ^= low
        deg = (adj[v] & avail).bit_count()
        if deg <= 1:
            # some maximum independent set contains v
            return _search(avail & ~(adj[v] | low), adj, need - 1)
        if deg > best_deg:
            best_v, best_deg = v, deg
    bit = 1 << best_v
    if _search(avail & ~(adj[best_v] | bit), adj, need - 1):
        return True
    return _search(avail & ~bit, adj, need)
