#!/usr/bin/env python3
"""Hand/independent oracles frozen into the C++ tests.

1. Sentence BLEU for the smoothing and brevity-penalty cases
   (modified n-gram precisions, add-one smoothing on zero precisions for
   n >= 2, brevity penalty exp(min(0, 1 - r/c))).
2. RS(31,23) parity symbols over GF(32) with primitive polynomial
   x^5 + x^2 + 1 and generator roots alpha^1..alpha^8, computed by plain
   polynomial long division.
3. BPSK bit error probabilities Q(sqrt(2*snr)) for the channel tests.
"""

import math
from collections import Counter


def ngrams(toks, n):
    return Counter(tuple(toks[i:i + n]) for i in range(len(toks) - n + 1))


def bleu(refs, hyp, max_n=4):
    if not hyp:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        h = ngrams(hyp, n)
        total = sum(h.values())
        matched = 0
        for ng, c in h.items():
            matched += min(c, max(ngrams(r, n)[ng] for r in refs))
        if total == 0:
            num, den = 1.0, 1.0          # no n-grams of this order
        elif matched == 0 and n >= 2:
            num, den = 1.0, total + 1.0  # add-one smoothing
        elif matched == 0:
            return 0.0                   # unigram miss: score is zero
        else:
            num, den = float(matched), float(total)
        log_sum += math.log(num / den)
    c = len(hyp)
    # effective reference length: closest to c, ties toward the shorter
    r = min((abs(len(r) - c), len(r)) for r in refs)[1]
    bp = math.exp(min(0.0, 1.0 - r / c))
    return math.exp(log_sum / max_n) * bp


# ---- GF(32), primitive poly x^5 + x^2 + 1 (0b100101) ----

PRIM = 0b100101


def gf_mul(a, b):
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        if a & 0b100000:
            a ^= PRIM
        b >>= 1
    return r


def build_tables():
    exp = [0] * 62
    log = [0] * 32
    x = 1
    for i in range(31):
        exp[i] = x
        log[x] = i
        x = gf_mul(x, 2)
    for i in range(31, 62):
        exp[i] = exp[i - 31]
    return exp, log


def poly_mul(a, b):
    r = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            r[i + j] ^= gf_mul(ai, bj)
    return r


def rs_generator(n_parity):
    exp, _ = build_tables()
    g = [1]
    for i in range(1, n_parity + 1):
        g = poly_mul(g, [1, exp[i]])  # (x + alpha^i), coefficients high->low
    return g


def rs_parity(data, n_parity):
    """Systematic encoding: remainder of data(x)*x^p divided by g(x)."""
    g = rs_generator(n_parity)
    buf = list(data) + [0] * n_parity
    for i in range(len(data)):
        lead = buf[i]
        if lead == 0:
            continue
        for j in range(1, len(g)):
            buf[i + j] ^= gf_mul(lead, g[j])  # g[0] == 1
        buf[i] = 0
    return buf[len(data):]


def q_func(x):
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def main():
    ref = "the cat sat on the mat".split()
    hyp_rep = "the the the the the the".split()
    print(f"bleu_repeated: {bleu([ref], hyp_rep):.12f}")

    ref5 = "a b c d e".split()
    hyp4 = "a b c d".split()
    print(f"bleu_brevity: {bleu([ref5], hyp4):.12f}  (exp(-0.25)={math.exp(-0.25):.12f})")

    print(f"bleu_perfect: {bleu([ref], ref):.12f}")

    g = rs_generator(8)
    print(f"rs_generator(8): {g}")
    data = list(range(1, 24))  # fixed 23-symbol vector 1..23
    print(f"rs_parity(1..23): {rs_parity(data, 8)}")

    for snr_db in (0.0, 3.0, 6.0):
        snr = 10 ** (snr_db / 10.0)
        print(f"bpsk_ber@{snr_db}dB: {q_func(math.sqrt(2.0 * snr)):.12f}")


if __name__ == "__main__":
    main()
