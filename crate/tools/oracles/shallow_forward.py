from mpmath import mp, mpf, sin, cos, exp
mp.dps = 50
# (w1,b1,w2,b2) per neuron
P = [("0.83", "-0.41", "1.27", "0.35"), ("-1.12", "0.66", "-0.58", "-0.9"), ("0.47", "0.12", "2.05", "0.18")]
P = [tuple(mpf(v) for v in p) for p in P]
def zenn(x, alpha, act):
    return sum((mpf(j+1)**(-alpha))*(w2*act(w1*(j+1)*x+b1)+b2) for j,(w1,b1,w2,b2) in enumerate(P))
def mlp(x, beta, act):
    return mpf(len(P))**(-beta)*sum(w2*act(w1*x+b1)+b2 for (w1,b1,w2,b2) in P)
sig = lambda u: 1/(1+exp(-u))
for name,act in [("sine",sin),("sigmoid",sig),("cosine",cos)]:
    print(name, "zenn", mp.nstr(zenn(mpf("0.7"), mpf("1.1"), act), 20), mp.nstr(zenn(mpf("-2.3"), mpf("1.1"), act), 20))
    print(name, "mlp", mp.nstr(mlp(mpf("0.7"), mpf("0.5"), act), 20), mp.nstr(mlp(mpf("-2.3"), mpf("0.5"), act), 20))
