"""High-precision oracle for the worked-example fridge (E1=E3=1, T=10,5,4, p=1e-3, g=1e-2).

Builds the generator entry by entry from matrix units in mpmath (40 digits),
with no code shared with the package, and prints the values frozen into
tests/test_solvers.py.
"""
import mpmath as mp
mp.mp.dps = 40
E1, E3 = mp.mpf(1), mp.mpf(1); E2 = E1 + E3
T = [mp.mpf(10), mp.mpf(5), mp.mpf(4)]; p = [mp.mpf('1e-3')]*3; g = mp.mpf('1e-2')
E = [E1, E2, E3]
r = [mp.e**(-E[i]/T[i])/(1+mp.e**(-E[i]/T[i])) for i in range(3)]
def bits(k): return [(k>>2)&1, (k>>1)&1, k&1]
H = mp.zeros(8,8)
for k in range(8):
    H[k,k] = sum(E[i]*bits(k)[i] for i in range(3))
H[2,5] = g; H[5,2] = g
def apply(rho):
    out = mp.zeros(8,8)
    c = H*rho - rho*H
    for a in range(8):
        for b in range(8):
            out[a,b] = -1j*c[a,b]
    for i in range(3):
        tau = [1-r[i], r[i]]
        for a in range(8):
            for b in range(8):
                ba, bb = bits(a), bits(b)
                # (tau_i (x) Tr_i rho)[a,b]
                val = 0
                if ba[i] == bb[i]:
                    for s in range(2):
                        a2 = list(ba); b2 = list(bb); a2[i] = s; b2[i] = s
                        val += rho[4*a2[0]+2*a2[1]+a2[2], 4*b2[0]+2*b2[1]+b2[2]]
                    val *= tau[ba[i]]
                out[a,b] += p[i]*(val - rho[a,b])
    return out
M = mp.matrix(64,64)
for col in range(64):
    rho = mp.zeros(8,8); rho[col % 8, col // 8] = 1
    o = apply(rho)
    for row in range(64):
        M[row,col] = o[row % 8, row // 8]
for col in range(64):
    M[0,col] = 1 if (col % 8) == (col // 8) else 0
b = mp.matrix(64,1); b[0] = 1
x = mp.lu_solve(M, b)
rho = lambda a, c: x[a + 8*c]
J = 2*g*mp.im(rho(5,2))
q = [sum(mp.re(rho(k,k)) for k in range(8) if bits(k)[i]) for i in range(3)]
Q = [p[i]*E[i]*(r[i]-q[i]) for i in range(3)]
print("J", mp.nstr(J, 20)); print("Q", [mp.nstr(v, 20) for v in Q]); print("q", [mp.nstr(v,20) for v in q])
