#!/usr/bin/env python3
"""Solve an SDPA sparse problem with SCS and write the solution in the
CSDP layout (dual vector, then `matno block i j value` lines).

usage: sdpa_solve.py PROBLEM.dat-s SOLUTION.out [--eps 1e-7] [--smoothed]

By default the whole problem goes to SCS. `--smoothed` is for epigraph
problems as written by `rotsys sdp export` (one slack per constraint and a
split free variable in a trailing diagonal block), which are large enough
that any direct factorization is dense in the matrix variables: it minimizes
the largest constraint value over PSD blocks with a first-order method and
writes the resulting blocks, slacks and free variable.
"""
import argparse
import math
import re
import sys

import numpy as np
import pandas as pd
import scipy.sparse as sp
import scs


def read_sdpa(path):
    with open(path) as f:
        header = []
        while len(header) < 4:
            ln = f.readline()
            if not ln:
                raise SystemExit("truncated SDPA header")
            ln = ln.strip()
            if ln and ln[0] not in '"*':
                header.append(ln)
        ent = pd.read_csv(
            f, sep=r"\s+", header=None, names=range(5), engine="c", dtype=np.float64
        ).to_numpy()
    split = lambda s: [t for t in re.split(r"[\s{}(),]+", s) if t]
    m = int(split(header[0])[0])
    nblocks = int(split(header[1])[0])
    blocks = [int(t) for t in split(header[2])[:nblocks]]
    c = np.array([float(t) for t in split(header[3])], dtype=float)
    return m, blocks, c, ent


class Layout:
    """Column positions: diagonal blocks first, then each symmetric block as
    SCS's scaled lower triangle, column-major."""

    def __init__(self, blocks):
        self.blocks = blocks
        self.offset = {}
        pos = 0
        for b, s in enumerate(blocks):
            if s < 0:
                self.offset[b] = pos
                pos += -s
        self.n_lin = pos
        for b, s in enumerate(blocks):
            if s > 0:
                self.offset[b] = pos
                pos += s * (s + 1) // 2
        self.n = pos

    def coefficients(self, ent, m):
        """Sparse (m+1) x n matrix with <F_k, Y> = row k . x."""
        matno = ent[:, 0].astype(np.int64)
        blk = ent[:, 1].astype(np.int64) - 1
        i = ent[:, 2].astype(np.int64) - 1
        j = ent[:, 3].astype(np.int64) - 1
        val = ent[:, 4]
        lo, hi = np.maximum(i, j), np.minimum(i, j)
        size = np.array(self.blocks, dtype=np.int64)[blk]
        off = np.array([self.offset[b] for b in range(len(self.blocks))], dtype=np.int64)[blk]
        psd = size > 0
        col = np.where(psd, off + hi * size - hi * (hi - 1) // 2 + (lo - hi), off + i)
        coef = np.where(psd & (i != j), val * math.sqrt(2.0), val)
        return sp.csr_matrix((coef, (matno, col)), shape=(m + 1, self.n))

    def trace_row(self):
        t = np.zeros(self.n)
        for b, s in enumerate(self.blocks):
            if s > 0:
                p = self.offset[b]
                for jj in range(s):
                    t[p] = 1.0
                    p += s - jj
        return t

    def write(self, path, y, x):
        with open(path, "w") as out:
            out.write(" ".join(f"{v:.17g}" for v in y) + "\n")
            for bi, s in enumerate(self.blocks):
                base = self.offset[bi]
                if s < 0:
                    for k in range(-s):
                        if x[base + k] != 0.0:
                            out.write(f"2 {bi + 1} {k + 1} {k + 1} {x[base + k]:.17g}\n")
                    continue
                p = base
                for jj in range(s):
                    for ii in range(jj, s):
                        v = x[p] if ii == jj else x[p] / math.sqrt(2.0)
                        p += 1
                        if v != 0.0:
                            out.write(f"2 {bi + 1} {jj + 1} {ii + 1} {v:.17g}\n")


def solve_direct(args, m, layout, cvec, F):
    n = layout.n
    A = sp.vstack([F[1:].tocsc(), -sp.identity(n, format="csc")], format="csc")
    b = np.concatenate([cvec, np.zeros(n)])
    cone = {"z": m, "l": layout.n_lin, "s": [s for s in layout.blocks if s > 0]}
    solver = scs.SCS(
        {"A": A, "b": b, "c": -F[0].toarray().ravel()},
        cone,
        eps_abs=args.eps,
        eps_rel=args.eps,
        max_iters=args.max_iters,
        verbose=True,
        use_indirect=args.indirect,
    )
    sol = solver.solve()
    print(f"status: {sol['info']['status']}, objective: {-sol['info']['pobj']}", file=sys.stderr)
    if sol["info"]["status_val"] not in (1, 2):
        sys.exit(1)
    layout.write(args.solution, sol["y"][:m], sol["x"])


def epigraph_parts(m, layout, F):
    """Checks the epigraph shape and returns (psd column range, diag offset)."""
    blocks = layout.blocks
    if blocks[-1] != -(m + 2) or any(s < 0 for s in blocks[:-1]):
        raise SystemExit("--smoothed needs a trailing diagonal block of size m+2")
    d = layout.offset[len(blocks) - 1]
    diag = F[:, d : d + m + 2].tocsr()
    ones = np.ones(m)
    expect = sp.vstack(
        [
            sp.csr_matrix(([-1.0, 1.0], ([0, 0], [m, m + 1])), shape=(1, m + 2)),
            sp.hstack([sp.identity(m), -ones[:, None], ones[:, None]]),
        ],
        format="csr",
    )
    difference = diag - expect
    difference.eliminate_zeros()
    if difference.nnz:
        raise SystemExit("--smoothed: diagonal block is not slack / split free variable")
    if F[0, layout.n_lin :].nnz:
        raise SystemExit("--smoothed: objective touches the symmetric blocks")
    return layout.n_lin, d


class PsdProjector:
    """Euclidean projection of scaled-svec vectors onto products of PSD cones."""

    def __init__(self, sizes):
        self.parts = []
        pos = 0
        for s in sizes:
            jj, ii = np.triu_indices(s)  # column-major lower triangle order
            self.parts.append((pos, s, ii, jj))
            pos += s * (s + 1) // 2

    def __call__(self, x):
        out = np.empty_like(x)
        r2 = math.sqrt(2.0)
        for pos, s, ii, jj in self.parts:
            v = x[pos : pos + len(ii)]
            scale = np.where(ii == jj, 1.0, 1.0 / r2)
            m = np.zeros((s, s))
            m[ii, jj] = v * scale
            m[jj, ii] = v * scale
            w, q = np.linalg.eigh(m)
            p = (q * np.maximum(w, 0.0)) @ q.T
            out[pos : pos + len(ii)] = p[ii, jj] / scale
        return out


def smooth_max(v, mu):
    top = v.max()
    e = np.exp((v - top) / mu)
    total = e.sum()
    return top + mu * math.log(total), e / total


def solve_smoothed(args, m, layout, cvec, F):
    """Minimizes max_k (b_k + <G_k, x>) over PSD x by accelerated projected
    gradient on the log-sum-exp smoothing, lowering the temperature in stages."""
    start, d = epigraph_parts(m, layout, F)
    G = F[1:, start:].tocsr()
    GT = G.T.tocsr()
    base = -cvec
    proj = PsdProjector([s for s in layout.blocks if s > 0])

    x = np.zeros(G.shape[1])
    best_x, best = x, base.max()
    L = 1.0
    for mu in args.temperatures:
        y, t = x.copy(), 1.0
        fx, _ = smooth_max(base + G @ x, mu)
        for it in range(args.iters):
            fy, w = smooth_max(base + G @ y, mu)
            g = GT @ w
            while True:
                xn = proj(y - g / L)
                diff = xn - y
                vn = base + G @ xn
                fn, _ = smooth_max(vn, mu)
                if fn <= fy + g @ diff + 0.5 * L * (diff @ diff) + 1e-15:
                    break
                L *= 2.0
            worst = vn.max()
            if worst < best:
                best, best_x = worst, xn
            if fn > fx:
                # Adaptive restart.
                y, t = x.copy(), 1.0
                continue
            tn = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
            y = xn + ((t - 1.0) / tn) * (xn - x)
            x, fx, t = xn, fn, tn
            L *= 0.95
        print(f"temperature {mu:g}: smoothed {fx:.10f}, best max {best:.10f}", file=sys.stderr)

    values = base + G @ best_x
    lam = values.max()
    full = np.zeros(layout.n)
    full[start:] = best_x
    full[d : d + m] = lam - values
    full[d + m] = max(lam, 0.0)
    full[d + m + 1] = max(-lam, 0.0)
    layout.write(args.solution, np.zeros(m), full)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("problem")
    ap.add_argument("solution")
    ap.add_argument("--eps", type=float, default=1e-7)
    ap.add_argument("--max-iters", type=int, default=200000)
    ap.add_argument("--indirect", action="store_true", help="conjugate-gradient linear solves")
    ap.add_argument("--smoothed", action="store_true", help="first-order method for epigraph problems")
    ap.add_argument("--iters", type=int, default=400, help="iterations per temperature")
    ap.add_argument(
        "--temperatures", type=float, nargs="+", default=[1e-2, 3e-3, 1e-3, 3e-4, 1e-4]
    )
    args = ap.parse_args()

    m, blocks, cvec, ent = read_sdpa(args.problem)
    layout = Layout(blocks)
    F = layout.coefficients(ent, m)
    del ent
    if args.smoothed:
        solve_smoothed(args, m, layout, cvec, F)
    else:
        solve_direct(args, m, layout, cvec, F)


if __name__ == "__main__":
    main()
