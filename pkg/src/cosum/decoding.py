"""Collaborative decoding: distribution aggregation and beam search.

Contrastive generation multiplies the target distribution by a powered
target/counterpart ratio (product-of-experts style); common generation
adds the two entity-specific distributions to the common one
(mixture-of-experts style). Ablation variants swap those roles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Dict, Optional, Sequence, Tuple

from .data import EntityReviewSet
from .dists import TokenDist, top_p_truncate
from .lm import ConditionalLM
from .vocab import EOS_ID

StepFn = Callable[[Tuple[int, ...]], TokenDist]

CONTRASTIVE_MODES = ("contrastive_poe", "contrastive_moe_ablation", "contrastive_vs_common")
COMMON_MODES = ("common_moe", "common_poe_ablation")
ALL_MODES = CONTRASTIVE_MODES + COMMON_MODES + ("base",)


@dataclass(frozen=True)
class DecodeConfig:
    """Decoding hyperparameters; defaults follow the reported setup."""

    delta: float = 1.0
    gamma: float = 0.5
    top_p: float = 0.9
    beam_width: int = 4
    max_len_contrastive: int = 150
    max_len_common: int = 50
    min_len: int = 10
    length_penalty: float = 1.0
    mode: str = "contrastive_poe"
    ratio_floor: float = 1e-12

    def __post_init__(self) -> None:
        if self.delta < 0 or self.gamma < 0 or self.length_penalty < 0:
            raise ValueError("delta, gamma and length_penalty must be >= 0")
        if not 0.0 < self.top_p <= 1.0:
            raise ValueError("top_p must be in (0, 1]")
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if not 1 <= self.min_len <= min(self.max_len_contrastive, self.max_len_common):
            raise ValueError("need 1 <= min_len <= max_len")
        if self.mode not in ALL_MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.ratio_floor <= 0:
            raise ValueError("ratio_floor must be > 0")


_CONFIG_TYPES = {f.name: f.type for f in fields(DecodeConfig)}


def load_decode_config(path: str, base: Optional[DecodeConfig] = None) -> DecodeConfig:
    """Parse a key=value config file; unknown keys are an error."""
    cfg = base or DecodeConfig()
    overrides: Dict[str, object] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_TYPES:
                raise ValueError(f"line {lineno}: unknown config key {key!r}")
            if key == "mode":
                overrides[key] = value
            elif key in ("beam_width", "max_len_contrastive", "max_len_common", "min_len"):
                overrides[key] = int(value)
            else:
                overrides[key] = float(value)
    return replace(cfg, **overrides)


def aggregate_contrastive(
    p_target: TokenDist,
    p_counter: TokenDist,
    delta: float,
    top_p: float,
    ratio_floor: float,
) -> TokenDist:
    """target(t) * (target(t) / counter(t))^delta over the target nucleus.

    Counterpart values come from its own renormalized nucleus when the
    token is inside it, otherwise from the raw distribution, floored so
    the ratio stays finite.
    """
    candidates = top_p_truncate(p_target, top_p)
    if delta == 0.0:
        return candidates
    counter_nucleus = top_p_truncate(p_counter, top_p)
    scores = {}
    for t, pt in candidates.entries.items():
        c = counter_nucleus.entries.get(t)
        if c is None:
            c = max(p_counter.get(t), ratio_floor)
        scores[t] = pt * (pt / c) ** delta
    return TokenDist.from_weights(scores)


def aggregate_contrastive_moe(
    p_target: TokenDist,
    p_counter: TokenDist,
    delta: float,
    top_p: float,
    ratio_floor: float,
) -> TokenDist:
    """Additive ablation: target(t) + delta * target(t)/counter(t)."""
    candidates = top_p_truncate(p_target, top_p)
    if delta == 0.0:
        return candidates
    counter_nucleus = top_p_truncate(p_counter, top_p)
    scores = {}
    for t, pt in candidates.entries.items():
        c = counter_nucleus.entries.get(t)
        if c is None:
            c = max(p_counter.get(t), ratio_floor)
        scores[t] = pt + delta * (pt / c)
    return TokenDist.from_weights(scores)


def aggregate_contrastive_vs_common(
    p_target: TokenDist,
    p_comm: TokenDist,
    delta: float,
    top_p: float,
    ratio_floor: float,
) -> TokenDist:
    """Ratio against the common-model distribution instead of the counterpart."""
    return aggregate_contrastive(p_target, p_comm, delta, top_p, ratio_floor)


def aggregate_common(
    p_comm: TokenDist, p_a: TokenDist, p_b: TokenDist, gamma: float, top_p: float
) -> TokenDist:
    """comm(t) + gamma * (a(t) + b(t)) over the union of the three nuclei."""
    comm = top_p_truncate(p_comm, top_p)
    if gamma == 0.0:
        return comm
    a = top_p_truncate(p_a, top_p)
    b = top_p_truncate(p_b, top_p)
    candidates = sorted(set(comm.support) | set(a.support) | set(b.support))
    scores = {
        t: comm.get(t) + gamma * (a.get(t) + b.get(t)) for t in candidates
    }
    return TokenDist.from_weights(scores)


def aggregate_common_poe(
    p_comm: TokenDist,
    p_a: TokenDist,
    p_b: TokenDist,
    gamma: float,
    top_p: float,
    ratio_floor: float,
) -> TokenDist:
    """Multiplicative ablation: comm(t) * (a(t) * b(t))^gamma on comm's nucleus."""
    comm = top_p_truncate(p_comm, top_p)
    if gamma == 0.0:
        return comm
    scores = {
        t: pc
        * (max(p_a.get(t), ratio_floor) * max(p_b.get(t), ratio_floor)) ** gamma
        for t, pc in comm.entries.items()
    }
    return TokenDist.from_weights(scores)


def symmetric_common_dist(
    lm_comm: ConditionalLM,
    prefix: Tuple[int, ...],
    reviews_a: EntityReviewSet,
    reviews_b: EntityReviewSet,
) -> TokenDist:
    """Mean of the two input orders, so the result is order-invariant."""
    d_ab = lm_comm.next_dist(prefix, (reviews_a, reviews_b))
    d_ba = lm_comm.next_dist(prefix, (reviews_b, reviews_a))
    tokens = sorted(set(d_ab.support) | set(d_ba.support))
    return TokenDist.from_weights(
        {t: 0.5 * (d_ab.get(t) + d_ba.get(t)) for t in tokens}
    )


@dataclass(frozen=True)
class Hypothesis:
    tokens: Tuple[int, ...]
    logscore: float
    finished: bool

    def normalized_score(self, alpha: float) -> float:
        if not self.tokens:
            return 0.0
        return self.logscore / float(len(self.tokens)) ** alpha


def beam_decode(
    step_fn: StepFn, cfg: DecodeConfig, max_len: Optional[int] = None
) -> Tuple[int, ...]:
    """Beam search over step_fn's aggregated distributions.

    EOS is masked (mass renormalized away) until min_len tokens have been
    emitted. Finished hypotheses are frozen but keep competing on their
    length-normalized score. Returns the best finished hypothesis, or the
    best unfinished one if nothing finished within max_len.
    """
    if max_len is None:
        max_len = cfg.max_len_contrastive
    alpha = cfg.length_penalty
    beams = [Hypothesis(tokens=(), logscore=0.0, finished=False)]
    for _ in range(max_len):
        if all(h.finished for h in beams):
            break
        pool = []
        for hyp in beams:
            if hyp.finished:
                pool.append(hyp)
                continue
            dist = step_fn(hyp.tokens)
            if len(hyp.tokens) < cfg.min_len:
                dist = dist.without(EOS_ID)
            if not dist.entries:
                raise ValueError("empty step distribution")
            for t, p in dist.sorted_items():
                pool.append(
                    Hypothesis(
                        tokens=hyp.tokens + (t,),
                        logscore=hyp.logscore + math.log(p),
                        finished=t == EOS_ID,
                    )
                )
        pool.sort(key=lambda h: (-h.normalized_score(alpha), h.tokens))
        beams = pool[: cfg.beam_width]
    finished = [h for h in beams if h.finished]
    ranked = finished or beams
    best = min(ranked, key=lambda h: (-h.normalized_score(alpha), h.tokens))
    return best.tokens


@dataclass(frozen=True)
class SummaryTriple:
    pair_id: str
    contrastive_a: str
    contrastive_b: str
    common: str

    def to_record(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "contrastive_a": self.contrastive_a,
            "contrastive_b": self.contrastive_b,
            "common": self.common,
        }


@dataclass
class SummarizerModels:
    """The two conditional models collaborative decoding draws from."""

    contrastive: ConditionalLM
    common: ConditionalLM


def _contrastive_step(
    models: SummarizerModels,
    target: EntityReviewSet,
    counter: EntityReviewSet,
    cfg: DecodeConfig,
) -> StepFn:
    mode = cfg.mode if cfg.mode in CONTRASTIVE_MODES + ("base",) else "contrastive_poe"

    def step(prefix: Tuple[int, ...]) -> TokenDist:
        p_target = models.contrastive.next_dist(prefix, target)
        if mode == "base":
            return top_p_truncate(p_target, cfg.top_p)
        if mode == "contrastive_vs_common":
            p_comm = symmetric_common_dist(models.common, prefix, target, counter)
            return aggregate_contrastive_vs_common(
                p_target, p_comm, cfg.delta, cfg.top_p, cfg.ratio_floor
            )
        p_counter = models.contrastive.next_dist(prefix, counter)
        if mode == "contrastive_moe_ablation":
            return aggregate_contrastive_moe(
                p_target, p_counter, cfg.delta, cfg.top_p, cfg.ratio_floor
            )
        return aggregate_contrastive(
            p_target, p_counter, cfg.delta, cfg.top_p, cfg.ratio_floor
        )

    return step


def _common_step(
    models: SummarizerModels,
    reviews_a: EntityReviewSet,
    reviews_b: EntityReviewSet,
    cfg: DecodeConfig,
) -> StepFn:
    mode = cfg.mode if cfg.mode in COMMON_MODES + ("base",) else "common_moe"

    def step(prefix: Tuple[int, ...]) -> TokenDist:
        p_comm = symmetric_common_dist(models.common, prefix, reviews_a, reviews_b)
        if mode == "base":
            return top_p_truncate(p_comm, cfg.top_p)
        p_a = models.contrastive.next_dist(prefix, reviews_a)
        p_b = models.contrastive.next_dist(prefix, reviews_b)
        if mode == "common_poe_ablation":
            return aggregate_common_poe(
                p_comm, p_a, p_b, cfg.gamma, cfg.top_p, cfg.ratio_floor
            )
        return aggregate_common(p_comm, p_a, p_b, cfg.gamma, cfg.top_p)

    return step


def summarize_pair(
    models: SummarizerModels,
    reviews_a: EntityReviewSet,
    reviews_b: EntityReviewSet,
    cfg: DecodeConfig,
    vocabulary=None,
) -> SummaryTriple:
    """Decode the two contrastive summaries and the common summary."""
    if vocabulary is None:
        vocabulary = models.contrastive.vocabulary  # type: ignore[attr-defined]
    tokens_a = beam_decode(
        _contrastive_step(models, reviews_a, reviews_b, cfg),
        cfg,
        max_len=cfg.max_len_contrastive,
    )
    tokens_b = beam_decode(
        _contrastive_step(models, reviews_b, reviews_a, cfg),
        cfg,
        max_len=cfg.max_len_contrastive,
    )
    tokens_common = beam_decode(
        _common_step(models, reviews_a, reviews_b, cfg),
        cfg,
        max_len=cfg.max_len_common,
    )
    return SummaryTriple(
        pair_id=f"{reviews_a.entity_id}|{reviews_b.entity_id}",
        contrastive_a=vocabulary.decode(tokens_a),
        contrastive_b=vocabulary.decode(tokens_b),
        common=vocabulary.decode(tokens_common),
    )
