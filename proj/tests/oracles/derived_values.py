"""Independent reference computations for values frozen into the unit tests.

Each function re-derives a number from first principles without touching the
C++ sources. Run: python3 tests/oracles/derived_values.py
"""

import math

import numpy as np
from scipy import special, stats

# 802.11a/g data bits per OFDM symbol, by rate (Mbit/s).
N_DBPS = {6: 24, 9: 36, 12: 48, 18: 72, 24: 96, 36: 144, 48: 192, 54: 216}


def ofdm_airtime_us(mpdu_bytes, rate):
    bits = 16 + 8 * mpdu_bytes + 6  # SERVICE + PSDU + tail
    symbols = -(-bits // N_DBPS[rate])
    return 16 + 4 + 4 * symbols  # preamble + SIGNAL + data symbols


def dtim_release(arrival_ms, p, t_beac=102.4, count_at_0=None):
    # Beacon 0 carries count p-1; the count decrements each beacon and wraps.
    c = p - 1 if count_at_0 is None else count_at_0
    j = 0
    while True:
        t = j * t_beac
        if t >= arrival_ms and c == 0:
            return t
        c = p - 1 if c == 0 else c - 1
        j += 1


def rounded_exponential_mean(mean):
    # E[max(1, round(X))], X ~ Exp(mean); round half away from zero.
    total = 0.0
    for n in range(0, int(mean * 60)):
        lo, hi = max(n - 0.5, 0.0), n + 0.5
        prob = math.exp(-lo / mean) - math.exp(-hi / mean)
        total += max(1, n) * prob
    return total


M64 = (1 << 64) - 1


def splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return state, z ^ (z >> 31)


def rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & M64


def fnv1a(text):
    h = 0xCBF29CE484222325
    for c in text.encode():
        h = ((h ^ c) * 0x100000001B3) & M64
    return h


def xoshiro_stream(seed, label, n):
    # Reference xoshiro256** seeded by splitmix64 from a label-derived key.
    st = seed ^ rotl(fnv1a(label), 17)
    st, _ = splitmix64(st)
    st, key = splitmix64(st)
    s = []
    for _ in range(4):
        key, w = splitmix64(key)
        s.append(w)
    out = []
    for _ in range(n):
        out.append((rotl((s[1] * 5) & M64, 7) * 9) & M64)
        t = (s[1] << 17) & M64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
    return out


def compose(c1, p1, c2, p2):
    return (p1 * (1 - p2) * c2 + p2 * (1 - p1) * c1 + (1 - p1) * (1 - p2) * c1 * c2) / (1 - p1 * p2)


def main():
    print("xoshiro256** seed 42 'chan1.backoff':", [hex(v) for v in xoshiro_stream(42, "chan1.backoff", 4)])
    print("FNV-1a 'prpsim':", hex(fnv1a("prpsim")))
    print("airtime 50B+28B @54:", ofdm_airtime_us(78, 54), "us")
    print("airtime ACK 14B @24:", ofdm_airtime_us(14, 24), "us")
    print("airtime 1500B+28B @54:", ofdm_airtime_us(1528, 54), "us")
    print("airtime 0B+28B @6:", ofdm_airtime_us(28, 6), "us")
    print("airtime 50B+44B @54 (wpa2):", ofdm_airtime_us(94, 54), "us")

    difs5, difs24 = 16 + 2 * 9, 10 + 2 * 9
    print("DIFS 5 GHz / 2.4 GHz:", difs5, difs24, "us")
    print("busy +240, k=3 ->", 240 + difs5 + 3 * 9, "us after request")
    print("ACI: I from -10 for 248 us, k=2 ->", -10 + 248 + difs5 + 2 * 9, "us after request")
    print("CW by retry:", [min(2**r * 16 - 1, 1023) for r in range(8)])

    print("DTIM p=2 arrival 10 ms ->", dtim_release(10, 2), "ms")
    print("DTIM p=3 arrival 0 ms ->", dtim_release(0, 3), "ms")
    print("DTIM p=1 arrival 50 ms ->", dtim_release(50, 1), "ms")

    print("stall: t = phase + 5 ms, max 20 ms ->", 20 - 5, "ms")
    print("NM scan span:", 13 * 60 + 12 * 170, "ms; packets per 60 ms probe at Tc 10 ms:", 60 // 10)

    el = rounded_exponential_mean(300.0)
    print("E[burst length] with rounding:", f"{el:.6f}")
    print("duty cycle (nominal):", 300 * 0.4 / (300 * 0.4 + 200))
    print("duty cycle (rounded lengths):", f"{el * 0.4 / (el * 0.4 + 200):.6f}")
    print("request rate per s (rounded lengths):", f"{el / (el * 0.4e-3 + 0.2):.4f}")
    # each load frame reserves data + SIFS + ACK = 248 + 16 + 28 us
    print("busy fraction per node, 292 us exchanges:", f"{el * 0.292 / (el * 0.4 + 200):.6f}")

    print("compose_ccdf(0.5,0.1,0.5,0.2):", f"{compose(0.5, 0.1, 0.5, 0.2):.6f}")
    rng = np.random.default_rng(7)
    n = 10_000_000
    ok1, ok2 = rng.random(n) >= 0.1, rng.random(n) >= 0.2
    l1, l2 = rng.random(n), rng.random(n)  # CCDF(0.5) = 0.5 on both channels
    m = np.where(ok1 & ok2, np.minimum(l1, l2), np.where(ok1, l1, l2))
    delivered = ok1 | ok2
    print("  Monte-Carlo check:", f"{np.mean(m[delivered] > 0.5):.4f}")
    print("compose_plr 6.483% x 19.318%:", f"{6.483 * 19.318 / 100:.6f}", "%")
    print("compose_plr 5.574% x 5.477%:", f"{5.574 * 5.477 / 100:.6f}", "%")
    print("compose_plr 6.131% x 0.000278%:", f"{6.131 * 0.000278 / 100:.9f}", "%")

    a = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
    b = [3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14]
    print("KS D(a,b):", f"{stats.ks_2samp(a, b).statistic:.6f}")
    for lam in (0.5, 1.0, 1.36, 2.0):
        print(f"Q_KS({lam}) = {special.kolmogorov(lam):.9f}")
    en = math.sqrt(10 * 12 / 22)
    d = stats.ks_2samp(a, b).statistic
    print("p(a,b) with effective-n correction:", f"{special.kolmogorov((en + 0.12 + 0.11 / en) * d):.9f}")

    print("retry failure p=0.1, limit 3:", 0.1**4)
    print("binomial sd at p=5.477%, N=1e6:", f"{100 * math.sqrt(0.05477 * (1 - 0.05477) / 1e6):.5f}", "pp")
    print("ACK collision share, I defers to +100+9k, ACK window [82,110):", sum(1 for k in range(16) if 100 + 9 * k < 110) / 16)
    print("frame delaying d' peaks:", [-10 + 34 + 248 + 34 + 9 * k + 32 for k in range(4)], "us")

    # nearest rank: rank = ceil(q/100 * n)
    xs = list(range(1, 101))
    for q in (50, 99, 99.9, 99.99):
        print(f"nearest-rank p{q} of 1..100:", xs[math.ceil(q / 100 * len(xs)) - 1])


if __name__ == "__main__":
    main()
