"""Summary evaluation: distinctiveness, ROUGE-1/2/L, novel n-gram rates."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .vocab import tokenize_text

Tokens = Sequence[str]


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    @staticmethod
    def from_pr(precision: float, recall: float) -> "RougeScore":
        if precision + recall > 0:
            f1 = 2 * precision * recall / (precision + recall)
        else:
            f1 = 0.0
        return RougeScore(precision, recall, f1)

    def to_record(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


def token_bag(tokens: Tokens) -> Counter:
    return Counter(tokens)


def distinctiveness(
    bag_a: Counter, bag_b: Counter, bag_c: Counter, multiset: bool = True
) -> float:
    """1 - normalized overlap between the three summaries' token bags.

    Pairwise and triple intersections use min multiplicity, the union max
    multiplicity; multiset=False collapses every bag to a set first.
    """
    bags = [bag_a, bag_b, bag_c]
    if any(not bag for bag in bags):
        raise ValueError("empty summary")
    if not multiset:
        bags = [Counter(set(bag)) for bag in bags]
    a, b, c = bags
    pairwise = (
        sum((a & b).values()) + sum((a & c).values()) + sum((b & c).values())
    )
    triple = sum((a & b & c).values())
    union = sum((a | b | c).values())
    return 1.0 - (pairwise - 2 * triple) / union


def _ngrams(tokens: Tokens, n: int) -> Counter:
    return Counter(
        tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)
    )


def rouge_n(candidate: Tokens, reference: Tokens, n: int) -> RougeScore:
    """Clipped n-gram overlap precision/recall/F1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cand_grams = _ngrams(candidate, n)
    ref_grams = _ngrams(reference, n)
    total_cand = sum(cand_grams.values())
    total_ref = sum(ref_grams.values())
    if total_cand == 0 or total_ref == 0:
        return RougeScore(0.0, 0.0, 0.0)
    overlap = sum((cand_grams & ref_grams).values())
    return RougeScore.from_pr(overlap / total_cand, overlap / total_ref)


def _lcs_length(a: Tokens, b: Tokens) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: Tokens, reference: Tokens) -> RougeScore:
    """Longest-common-subsequence precision/recall/F1."""
    if not candidate or not reference:
        return RougeScore(0.0, 0.0, 0.0)
    lcs = _lcs_length(candidate, reference)
    return RougeScore.from_pr(lcs / len(candidate), lcs / len(reference))


def rouge_multi(
    candidate: Tokens, references: Sequence[Tokens], n: int | None
) -> RougeScore:
    """Arithmetic mean of per-reference scores; n=None selects ROUGE-L."""
    if not references:
        raise ValueError("empty reference list")
    scores = [
        rouge_l(candidate, ref) if n is None else rouge_n(candidate, ref, n)
        for ref in references
    ]
    k = len(scores)
    return RougeScore(
        precision=sum(s.precision for s in scores) / k,
        recall=sum(s.recall for s in scores) / k,
        f1=sum(s.f1 for s in scores) / k,
    )


def intra_pair_score(
    contrastive_a: Tokens, contrastive_b: Tokens
) -> Tuple[RougeScore, RougeScore, RougeScore]:
    """ROUGE-1/2/L between the two contrastive summaries; lower = more distinct."""
    if not contrastive_a or not contrastive_b:
        raise ValueError("empty contrastive summary")
    return (
        rouge_n(contrastive_a, contrastive_b, 1),
        rouge_n(contrastive_a, contrastive_b, 2),
        rouge_l(contrastive_a, contrastive_b),
    )


def novel_ngram_rate(summary: Tokens, input_tokens: Tokens, n: int) -> float:
    """Fraction of distinct summary n-grams absent from the input."""
    if len(summary) < n:
        raise ValueError("summary too short")
    summary_grams = set(_ngrams(summary, n))
    input_grams = set(_ngrams(input_tokens, n))
    novel = sum(1 for g in summary_grams if g not in input_grams)
    return novel / len(summary_grams)


def tokens_of(text: str) -> List[str]:
    """Metric-side tokenization; shared with the language model."""
    return tokenize_text(text)
