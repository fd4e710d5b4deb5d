"""Numpy implementation of the Monte Carlo loop; same contract as the compiled one."""

from __future__ import annotations

import numpy as np


def run_batch(
    uniforms,
    state_cdf,
    state_x,
    state_c,
    state_row,
    row_ptr,
    row_atom,
    row_cdf,
    code_bits,
    code_len,
    trie_child,
    trie_symbol,
    f_table,
    x_size,
    part1_bits,
    otp,
    counts,
):
    n = uniforms.shape[0]
    if n == 0:
        return 0, 0, 0
    n_states = state_cdf.shape[0]
    n_atoms = code_len.shape[0]
    s = np.minimum(np.searchsorted(state_cdf, uniforms[:, 0], side="right"), n_states - 1)
    x = state_x[s]
    w = np.minimum((uniforms[:, 1] * x_size).astype(np.int64), x_size - 1)
    r = state_row[s]

    k = np.empty(n, dtype=np.int64)
    order = np.argsort(r, kind="stable")
    rows, starts = np.unique(r[order], return_index=True)
    bounds = np.append(starts, n)
    for row, a, b in zip(rows, bounds[:-1], bounds[1:]):
        idx = order[a:b]
        lo, hi = row_ptr[row], row_ptr[row + 1]
        k[idx] = lo + np.minimum(np.searchsorted(row_cdf[lo:hi], uniforms[idx, 2], side="right"), hi - lo - 1)
    u = row_atom[k]

    xt = (x + w) % x_size if otp else x
    length = part1_bits + code_len[u]
    total = int(length.sum())
    total_sq = int((length * length).sum())

    xd = (xt - w + x_size) % x_size if otp else xt
    lens = code_len[u]
    bits = code_bits[u]
    node = np.zeros(n, dtype=np.int64)
    for step in range(int(lens.max())):
        active = (step < lens) & (node >= 0)
        bit = (bits[active] >> (lens[active] - 1 - step)) & 1
        node[active] = trie_child[node[active], bit]
    ud = np.where(node >= 0, trie_symbol[np.maximum(node, 0)], -1)
    ok = ud >= 0
    good = np.zeros(n, dtype=bool)
    good[ok] = f_table[ud[ok], xd[ok]] == state_c[s[ok]]
    bad = int(n - good.sum())

    flat = np.bincount(x * (x_size * n_atoms) + xt * n_atoms + u, minlength=counts.size)
    counts += flat.reshape(counts.shape)
    return total, total_sq, bad
