#!/usr/bin/env python3
"""Sweep the contrastive/common trade-off weights on the sample corpus
and print distinctiveness vs intra-pair similarity per grid point."""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cosum import CacheInterpolatedLM, Vocabulary, train_ngram
from cosum.decoding import DecodeConfig, SummarizerModels, summarize_pair
from cosum.metrics import distinctiveness, intra_pair_score, token_bag, tokens_of
from cosum.sample_corpus import SAMPLE_PAIRS, build_sample_corpus


def build_models():
    corpus = {es.entity_id: es for es in build_sample_corpus()}
    vocabulary = Vocabulary()
    sequences = [
        vocabulary.encode(r.text, extend=True)
        for es in corpus.values()
        for r in es.reviews
    ]
    background = train_ngram(sequences, order=3, eps=1e-4, vocabulary=vocabulary)
    lm = CacheInterpolatedLM(background, cache_order=3, lam=0.7)
    return corpus, SummarizerModels(contrastive=lm, common=lm)


def main():
    corpus, models = build_models()
    print(f"{'delta':>6} {'gamma':>6} {'DS':>8} {'IntraR1':>8}")
    for delta in (0.0, 0.5, 1.0, 2.0):
        for gamma in (0.0, 0.5, 1.0):
            cfg = DecodeConfig(
                delta=delta,
                gamma=gamma,
                min_len=5,
                max_len_contrastive=30,
                max_len_common=20,
            )
            ds_vals, intra_vals = [], []
            for a, b in SAMPLE_PAIRS:
                t = summarize_pair(models, corpus[a], corpus[b], cfg)
                ds_vals.append(
                    distinctiveness(
                        token_bag(tokens_of(t.contrastive_a)),
                        token_bag(tokens_of(t.contrastive_b)),
                        token_bag(tokens_of(t.common)),
                    )
                )
                intra_vals.append(
                    intra_pair_score(
                        tokens_of(t.contrastive_a), tokens_of(t.contrastive_b)
                    )[0].f1
                )
            k = len(ds_vals)
            print(
                f"{delta:>6.2f} {gamma:>6.2f} "
                f"{sum(ds_vals) / k:>8.4f} {sum(intra_vals) / k:>8.4f}"
            )


if __name__ == "__main__":
    main()
