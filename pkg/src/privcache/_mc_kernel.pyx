# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Monte Carlo loop for the two-part codec.

Consumes the flat tables built by :mod:`privcache.montecarlo` and a block of
uniforms; returns integer tallies only, so results are exactly reproducible
and identical to the numpy fallback.
"""

from libc.stdint cimport int64_t


cdef inline Py_ssize_t _upper(const double[::1] cdf, Py_ssize_t lo, Py_ssize_t hi, double u) noexcept nogil:
    # first i in [lo, hi) with cdf[i] > u
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if cdf[mid] > u:
            hi = mid
        else:
            lo = mid + 1
    return lo


def run_batch(
    const double[:, ::1] uniforms,
    const double[::1] state_cdf,
    const int64_t[::1] state_x,
    const int64_t[::1] state_c,
    const int64_t[::1] state_row,
    const int64_t[::1] row_ptr,
    const int64_t[::1] row_atom,
    const double[::1] row_cdf,
    const int64_t[::1] code_bits,
    const int64_t[::1] code_len,
    const int64_t[:, ::1] trie_child,
    const int64_t[::1] trie_symbol,
    const int64_t[:, ::1] f_table,
    int64_t x_size,
    int64_t part1_bits,
    bint otp,
    int64_t[:, ::1] counts,
):
    """Simulate ``len(uniforms)`` responses; ``counts[x, x_tilde * n_atoms + u]`` is incremented in place.

    Returns ``(total_length, total_length_squared, mismatches)``.
    """
    cdef Py_ssize_t n = uniforms.shape[0]
    cdef Py_ssize_t n_states = state_cdf.shape[0]
    cdef Py_ssize_t n_atoms = code_len.shape[0]
    cdef Py_ssize_t i, s, r, k, step
    cdef int64_t x, w, xt, u, length, bits, node, bit, xd, ud
    cdef int64_t total = 0, total_sq = 0, bad = 0
    with nogil:
        for i in range(n):
            s = _upper(state_cdf, 0, n_states, uniforms[i, 0])
            if s >= n_states:
                s = n_states - 1
            x = state_x[s]
            w = <int64_t>(uniforms[i, 1] * x_size)
            if w >= x_size:
                w = x_size - 1
            r = state_row[s]
            k = _upper(row_cdf, row_ptr[r], row_ptr[r + 1], uniforms[i, 2])
            if k >= row_ptr[r + 1]:
                k = row_ptr[r + 1] - 1
            u = row_atom[k]
            xt = (x + w) % x_size if otp else x
            length = part1_bits + code_len[u]
            total += length
            total_sq += length * length
            # receiver side: undo the pad, walk the code tree, apply f
            xd = (xt - w + x_size) % x_size if otp else xt
            bits = code_bits[u]
            node = 0
            for step in range(code_len[u]):
                bit = (bits >> (code_len[u] - 1 - step)) & 1
                node = trie_child[node, bit]
                if node < 0:
                    break
            ud = trie_symbol[node] if node >= 0 else -1
            if ud < 0 or f_table[ud, xd] != state_c[s]:
                bad += 1
            counts[x, xt * n_atoms + u] += 1
    return total, total_sq, bad
