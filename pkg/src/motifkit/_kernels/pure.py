"""Pure-Python kernels for the hot loops.

These are the reference implementations; ``_speedups.pyx`` compiles the
same algorithms with identical operation order, so both backends produce
bit-identical results.  Inputs are flat ``array``/sequence buffers so the
two implementations share one encoding.
"""

from __future__ import annotations

from array import array

BACKEND_NAME = "py"


def scan(token_ids, pat_offsets, pos_offsets, alt_ids, clitic, allow_possessive):
    """Leftmost-longest non-overlapping scan of one rule over a document.

    token_ids: per-token vocabulary id (-1 = not in vocabulary).
    pat_offsets/pos_offsets/alt_ids: flattened pattern table; pattern p
    spans positions pat_offsets[p]:pat_offsets[p+1] of pos_offsets, and
    position q accepts the ids alt_ids[pos_offsets[q]:pos_offsets[q+1]].
    clitic: per-token possessive-clitic flag (0/1).

    Returns (start_token, n_tokens, clitic_extended) triples.
    """
    n = len(token_ids)
    n_patterns = len(pat_offsets) - 1
    out = []
    i = 0
    while i < n:
        best = 0
        for p in range(n_patterns):
            plen = pat_offsets[p + 1] - pat_offsets[p]
            if plen <= best or i + plen > n:
                continue
            ok = True
            for j in range(plen):
                q = pat_offsets[p] + j
                tid = token_ids[i + j]
                hit = False
                for a in range(pos_offsets[q], pos_offsets[q + 1]):
                    if alt_ids[a] == tid:
                        hit = True
                        break
                if not hit:
                    ok = False
                    break
            if ok:
                best = plen
        if best > 0:
            nxt = i + best
            ext = 1 if allow_possessive and nxt < n and clitic[nxt] else 0
            out.append((i, best, ext))
            i = nxt + ext
        else:
            i += 1
    return out


def svm_train(x, y, sample_weight, n, dim, n_classes, orders, epochs, lam):
    """One-vs-rest hinge training by Pegasos-style subgradient steps.

    x is the row-major n*dim feature matrix, y the class index per row,
    sample_weight the per-row loss weight, orders the concatenated visit
    order for every epoch (epochs*n entries).  The step size is
    1/(lam*t) with t counting visited examples across epochs.

    Returns (weights, biases) as flat arrays (n_classes*dim and
    n_classes).  Everything is plain double arithmetic in a fixed order
    so results are reproducible bit for bit.
    """
    w = array("d", [0.0]) * (n_classes * dim)
    b = array("d", [0.0]) * n_classes
    t = 0
    for e in range(epochs):
        base_order = e * n
        for k in range(n):
            idx = orders[base_order + k]
            t += 1
            eta = 1.0 / (lam * t)
            decay = 1.0 - eta * lam
            row = idx * dim
            for c in range(n_classes):
                yc = 1.0 if y[idx] == c else -1.0
                wc = c * dim
                score = b[c]
                for j in range(dim):
                    score += w[wc + j] * x[row + j]
                for j in range(dim):
                    w[wc + j] *= decay
                if yc * score < 1.0:
                    coef = eta * sample_weight[idx] * yc
                    for j in range(dim):
                        w[wc + j] += coef * x[row + j]
                    b[c] += coef
    return w, b
