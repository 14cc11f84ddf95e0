"""Pure-Python recommendation kernel, used when the compiled one is unavailable."""

from __future__ import annotations

import numpy as np

from .rng import WordStream


def advance(stocks, owns, counts, bitgen, n_steps, pressure, hist=None):
    """Apply ``n_steps`` recommendations in place.

    Returns the kind (+1, -1, 0) of the last step, 0 when ``n_steps == 0``.
    ``hist``, when given, gets ``hist[advertised owners] += 1`` after every step.
    """
    n_agents, capacity = stocks.shape
    adv = owns.shape[1] - 1
    st = stocks.tolist()
    ow = [bytearray(row) for row in owns]
    cn = counts.tolist()
    occ = [0] * len(hist) if hist is not None else None
    kind = 0
    p = float(pressure)

    with WordStream(bitgen) as words:
        below = words.below
        coin = words.coin
        for _ in range(n_steps):
            g = below(n_agents)
            t = below(n_agents - 1)
            if t >= g:
                t += 1
            r = st[g][below(capacity)]
            beta = adv if coin(p) else r
            row = ow[t]
            if row[beta]:
                kind = 0
            else:
                k = below(capacity)
                stock = st[t]
                f = stock[k]
                stock[k] = beta
                row[f] = 0
                row[beta] = 1
                cn[f] -= 1
                cn[beta] += 1
                kind = 1 if beta == adv else (-1 if f == adv else 0)
            if occ is not None:
                occ[cn[adv]] += 1

    stocks[:] = np.asarray(st, dtype=stocks.dtype)
    owns[:] = np.asarray([list(row) for row in ow], dtype=owns.dtype)
    counts[:] = cn
    if occ is not None:
        hist += np.asarray(occ, dtype=hist.dtype)
    return kind
