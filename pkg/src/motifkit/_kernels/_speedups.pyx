# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; must stay operation-for-operation identical to pure.py."""

from array import array

from cpython.array cimport array as carray

BACKEND_NAME = "cy"


def scan(token_ids, pat_offsets, pos_offsets, alt_ids, clitic, bint allow_possessive):
    cdef int[::1] tid_v = token_ids
    cdef int[::1] pat_v = pat_offsets
    cdef int[::1] pos_v = pos_offsets
    cdef int[::1] alt_v = alt_ids
    cdef unsigned char[::1] cl_v = clitic

    cdef Py_ssize_t n = tid_v.shape[0]
    cdef Py_ssize_t n_patterns = pat_v.shape[0] - 1
    cdef Py_ssize_t i = 0, p, j, q, a, nxt
    cdef int plen, best, tid, ext
    cdef bint ok, hit
    out = []
    while i < n:
        best = 0
        for p in range(n_patterns):
            plen = pat_v[p + 1] - pat_v[p]
            if plen <= best or i + plen > n:
                continue
            ok = True
            for j in range(plen):
                q = pat_v[p] + j
                tid = tid_v[i + j]
                hit = False
                for a in range(pos_v[q], pos_v[q + 1]):
                    if alt_v[a] == tid:
                        hit = True
                        break
                if not hit:
                    ok = False
                    break
            if ok:
                best = plen
        if best > 0:
            nxt = i + best
            ext = 1 if allow_possessive and nxt < n and cl_v[nxt] else 0
            out.append((i, best, ext))
            i = nxt + ext
        else:
            i += 1
    return out


def svm_train(x, y, sample_weight, int n, int dim, int n_classes, orders, int epochs, double lam):
    cdef double[::1] x_v = x
    cdef int[::1] y_v = y
    cdef double[::1] s_v = sample_weight
    cdef int[::1] o_v = orders

    w_arr = array("d", [0.0]) * (n_classes * dim)
    b_arr = array("d", [0.0]) * n_classes
    cdef double[::1] w = w_arr
    cdef double[::1] b = b_arr

    cdef long t = 0
    cdef int e, k, idx, c, j, row, wc, base_order
    cdef double eta, decay, yc, score, coef
    for e in range(epochs):
        base_order = e * n
        for k in range(n):
            idx = o_v[base_order + k]
            t += 1
            eta = 1.0 / (lam * t)
            decay = 1.0 - eta * lam
            row = idx * dim
            for c in range(n_classes):
                yc = 1.0 if y_v[idx] == c else -1.0
                wc = c * dim
                score = b[c]
                for j in range(dim):
                    score += w[wc + j] * x_v[row + j]
                for j in range(dim):
                    w[wc + j] *= decay
                if yc * score < 1.0:
                    coef = eta * s_v[idx] * yc
                    for j in range(dim):
                        w[wc + j] += coef * x_v[row + j]
                    b[c] += coef
    return w_arr, b_arr
