"""Reference values for E[exp(i t Σ_j j^-α ReLU(j W_j x + b_j))],
W_j ~ U(-L, L), b_j ~ U(-B, B), by 2D adaptive quadrature per factor."""
from mpmath import mp, mpf, quad, expj, mpc

mp.dps = 30


def factor(x, s, j, L, B):
    kink = lambda w: -j * w * x  # ReLU argument vanishes at b = kink(w)

    def inner(w):
        k = kink(w)
        f = lambda b: expj(s * max(mpf(0), j * w * x + b))
        pts = [-B] + ([k] if -B < k < B else []) + [B]
        return quad(f, pts)

    wpts = sorted({-L, L, *[w for w in (B / (j * x), -B / (j * x)) if -L < w < L]})
    return quad(inner, wpts) / (4 * L * B)


def charfn(x, t, L, B, alpha, n):
    out = mpc(1)
    for j in range(1, n + 1):
        out *= factor(mpf(x), mpf(t) / mpf(j) ** alpha, j, mpf(L), mpf(B))
    return out


if __name__ == "__main__":
    grid = [(0.5, 1.0), (0.25, 3.0), (1.0, 2.0), (2.0, 0.7), (1.5, -1.5)]
    for x, t in grid:
        v = charfn(x, t, 1, 1, 1, 4)
        print(f"({x}, {t}) -> {mp.nstr(v.real, 17)} {mp.nstr(v.imag, 17)}")
