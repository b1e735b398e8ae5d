#!/usr/bin/env python3
"""Reference CIDEr-D scorer used to freeze expected values for the C++ tests.

Independent port of the consensus-based TF-IDF n-gram scorer as published in
the COCO caption evaluation toolkit (ciderD_scorer): raw term frequencies
weighted by log(N/df), clipped elementwise against the reference vector,
cosine-normalized per n-gram order, Gaussian length penalty with sigma=6,
averaged over n in 1..4 and over references, scaled by 10.

Run:  python3 cider_d_oracle.py
Prints the frozen test vectors consumed by tests/test_metrics.cpp.
"""

import math
from collections import defaultdict

N_ORDERS = 4
SIGMA = 6.0


def ngram_counts(tokens):
    counts = defaultdict(int)
    for n in range(1, N_ORDERS + 1):
        for i in range(len(tokens) - n + 1):
            counts[tuple(tokens[i:i + n])] += 1
    return counts


class Corpus:
    """Document-frequency statistics over a corpus of token lists."""

    def __init__(self, docs):
        self.n_docs = len(docs)
        self.df = defaultdict(int)
        for doc in docs:
            for ng in set(ngram_counts(doc).keys()):
                self.df[ng] += 1
        self.log_n = math.log(float(self.n_docs))

    def tfidf_vec(self, tokens):
        vec = [defaultdict(float) for _ in range(N_ORDERS)]
        norm = [0.0] * N_ORDERS
        for ng, tf in ngram_counts(tokens).items():
            idf = self.log_n - math.log(max(1.0, self.df[ng]))
            n = len(ng) - 1
            vec[n][ng] = float(tf) * idf
            norm[n] += vec[n][ng] ** 2
        return vec, [math.sqrt(x) for x in norm]


def cider_d(refs, hyp, corpus):
    vec_h, norm_h = corpus.tfidf_vec(hyp)
    score = [0.0] * N_ORDERS
    for ref in refs:
        vec_r, norm_r = corpus.tfidf_vec(ref)
        delta = float(len(hyp) - len(ref))
        penalty = math.exp(-(delta ** 2) / (2.0 * SIGMA ** 2))
        for n in range(N_ORDERS):
            val = 0.0
            for ng, w in vec_h[n].items():
                val += min(w, vec_r[n][ng]) * vec_r[n][ng]
            if norm_h[n] != 0.0 and norm_r[n] != 0.0:
                val /= norm_h[n] * norm_r[n]
            score[n] += val * penalty
    return 10.0 * sum(score) / N_ORDERS / len(refs)


def main():
    corpus_lines = [
        "the cat sat on the mat",
        "a dog ran in the park",
        "the bird flew over the tree",
        "a cat chased the small dog",
        "the man walked to the store",
    ]
    docs = [s.split() for s in corpus_lines]
    corpus = Corpus(docs)

    cases = [
        ("identical", ["the cat sat on the mat"], "the cat sat on the mat"),
        ("disjoint", ["the cat sat on the mat"], "zebra quagga xylophone"),
        ("partial", ["the cat sat on the mat"], "the cat sat on a rug"),
        ("two_refs", ["the cat sat on the mat", "a cat chased the small dog"],
         "the cat sat near the dog"),
        ("short_hyp", ["the man walked to the store"], "the man walked"),
    ]
    for name, refs, hyp in cases:
        s = cider_d([r.split() for r in refs], hyp.split(), corpus)
        print(f"{name}: {s:.12f}")


if __name__ == "__main__":
    main()
