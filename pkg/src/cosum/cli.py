"""Command-line entry point: train, build-synthetic, summarize, evaluate."""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import tempfile
import time
from typing import Dict, List, Optional, Sequence

from . import __version__
from .data import build_synthetic, load_reviews
from .decoding import (
    DecodeConfig,
    SummarizerModels,
    load_decode_config,
    summarize_pair,
)
from .lm import CacheInterpolatedLM, load_model, save_model, train_ngram
from .metrics import (
    distinctiveness,
    intra_pair_score,
    novel_ngram_rate,
    rouge_multi,
    token_bag,
    tokens_of,
)
from .vocab import Vocabulary


class CliError(Exception):
    """User-facing error; printed as one line on stderr."""


def _atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(
    out_path: str,
    command: str,
    config: Dict,
    inputs: Sequence[str],
    outputs: Sequence[str],
    model_fingerprint: Optional[str],
) -> None:
    manifest = {
        "command": command,
        "config": config,
        "inputs": sorted(inputs),
        "outputs": sorted(outputs),
        "model_fingerprint": model_fingerprint,
        "tool_version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    _atomic_write_text(out_path + ".manifest.json", _dump_json(manifest))


def cmd_train(args: argparse.Namespace) -> int:
    if not os.path.exists(args.reviews):
        raise CliError(f"corpus not found: {args.reviews}")
    corpus = load_reviews(args.reviews)
    texts = [r.text for es in corpus for r in es.reviews]
    if not texts:
        raise CliError("empty training corpus")
    vocabulary = Vocabulary()
    sequences = [vocabulary.encode(text, extend=True) for text in texts]
    background = train_ngram(sequences, args.order, args.eps, vocabulary)
    cache_order = args.cache_order if args.cache_order else args.order
    lm = CacheInterpolatedLM(background, cache_order=cache_order, lam=args.lam)
    save_model(lm, args.out)
    _write_manifest(
        args.out,
        "train",
        {
            "order": args.order,
            "cache_order": cache_order,
            "lambda": args.lam,
            "eps": args.eps,
        },
        inputs=[args.reviews],
        outputs=[args.out],
        model_fingerprint=_sha256(args.out),
    )
    return 0


def cmd_build_synthetic(args: argparse.Namespace) -> int:
    corpus = load_reviews(args.reviews)
    result = build_synthetic(corpus, args.task, args.n, args.k)
    lines = [
        json.dumps(pair.to_record(), sort_keys=True) for pair in result.pairs
    ]
    _atomic_write_text(args.out, "".join(line + "\n" for line in lines))
    skip_path = args.out + ".skips.json"
    _atomic_write_text(
        skip_path,
        _dump_json(
            {"skipped": result.skipped, "k_truncated": result.k_truncated}
        ),
    )
    _write_manifest(
        args.out,
        "build-synthetic",
        {"task": args.task, "n": args.n, "k": args.k},
        inputs=[args.reviews],
        outputs=[args.out, skip_path],
        model_fingerprint=None,
    )
    if result.k_truncated:
        print(
            f"warning: only {len(result.pairs)} pairs produced, requested {args.k}",
            file=sys.stderr,
        )
    return 0


def _effective_config(args: argparse.Namespace) -> DecodeConfig:
    # Precedence: CLI flag > config file > default.
    cfg = DecodeConfig()
    if args.config:
        cfg = load_decode_config(args.config, base=cfg)
    overrides = {}
    for name in (
        "delta",
        "gamma",
        "top_p",
        "beam_width",
        "max_len_contrastive",
        "max_len_common",
        "min_len",
        "length_penalty",
        "mode",
        "ratio_floor",
    ):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    return dataclasses.replace(cfg, **overrides)


def _parse_grid(raw: Optional[str]) -> Optional[List[float]]:
    if raw is None:
        return None
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError as exc:
        raise CliError(f"invalid grid value: {raw}") from exc


def cmd_summarize(args: argparse.Namespace) -> int:
    lm = load_model(args.model)
    corpus = {es.entity_id: es for es in load_reviews(args.reviews)}
    pairs = []
    for spec in args.pair:
        parts = [p.strip() for p in spec.split(",")]
        if len(parts) != 2:
            raise CliError(f"pair must be 'A,B', got {spec!r}")
        for entity_id in parts:
            if entity_id not in corpus:
                raise CliError(f"unknown entity id: {entity_id}")
        pairs.append((parts[0], parts[1]))
    cfg = _effective_config(args)
    models = SummarizerModels(contrastive=lm, common=lm)

    delta_grid = _parse_grid(args.delta_grid) or [cfg.delta]
    gamma_grid = _parse_grid(args.gamma_grid) or [cfg.gamma]
    sweep = args.delta_grid is not None or args.gamma_grid is not None

    outputs = []
    for delta in delta_grid:
        for gamma in gamma_grid:
            point_cfg = dataclasses.replace(cfg, delta=delta, gamma=gamma)
            records = [
                summarize_pair(
                    models, corpus[a], corpus[b], point_cfg, lm.vocabulary
                ).to_record()
                for a, b in pairs
            ]
            if sweep:
                stem, ext = os.path.splitext(args.out)
                out_path = f"{stem}.d{delta:g}_g{gamma:g}{ext or '.json'}"
            else:
                out_path = args.out
            _atomic_write_text(out_path, _dump_json(records))
            outputs.append(out_path)
            _write_manifest(
                out_path,
                "summarize",
                dataclasses.asdict(point_cfg),
                inputs=[args.model, args.reviews],
                outputs=[out_path],
                model_fingerprint=_sha256(args.model),
            )
    return 0


def _mean(values: Sequence[float]) -> Optional[float]:
    return sum(values) / len(values) if values else None


def _novel_rates(summary_text: str, input_text: str) -> Dict[str, Optional[float]]:
    summary = tokens_of(summary_text)
    source = tokens_of(input_text)
    rates: Dict[str, Optional[float]] = {}
    for n in (1, 2):
        rates[f"novel_{n}gram"] = (
            novel_ngram_rate(summary, source, n) if len(summary) >= n else None
        )
    return rates


def cmd_evaluate(args: argparse.Namespace) -> int:
    with open(args.generated, encoding="utf-8") as fh:
        generated = {rec["pair_id"]: rec for rec in json.load(fh)}
    references = {}
    with open(args.references, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CliError(f"references line {lineno}: {exc}") from exc
            references[rec["pair_id"]] = rec
    missing = sorted(set(generated) - set(references))
    if missing:
        raise CliError(f"missing reference ids: {', '.join(missing)}")

    corpus = None
    if args.reviews:
        corpus = {es.entity_id: es for es in load_reviews(args.reviews)}

    per_pair = {}
    for pair_id in sorted(generated):
        gen = generated[pair_id]
        ref = references[pair_id]
        entry: Dict[str, object] = {}
        for side in ("contrastive_a", "contrastive_b", "common"):
            cand = tokens_of(gen[side])
            refs = [tokens_of(text) for text in ref[side]]
            entry[side] = {
                "rouge1": rouge_multi(cand, refs, 1).to_record(),
                "rouge2": rouge_multi(cand, refs, 2).to_record(),
                "rougeL": rouge_multi(cand, refs, None).to_record(),
            }
        entry["distinctiveness"] = distinctiveness(
            token_bag(tokens_of(gen["contrastive_a"])),
            token_bag(tokens_of(gen["contrastive_b"])),
            token_bag(tokens_of(gen["common"])),
        )
        intra1, intra2, intral = intra_pair_score(
            tokens_of(gen["contrastive_a"]), tokens_of(gen["contrastive_b"])
        )
        entry["intra_rouge"] = {
            "rouge1": intra1.f1,
            "rouge2": intra2.f1,
            "rougeL": intral.f1,
        }
        if corpus is not None:
            entity_a, entity_b = pair_id.split("|", 1)
            for entity_id in (entity_a, entity_b):
                if entity_id not in corpus:
                    raise CliError(f"unknown entity id: {entity_id}")
            entry["novelty"] = {
                "contrastive_a": _novel_rates(
                    gen["contrastive_a"], " ".join(corpus[entity_a].texts)
                ),
                "contrastive_b": _novel_rates(
                    gen["contrastive_b"], " ".join(corpus[entity_b].texts)
                ),
                "common": _novel_rates(
                    gen["common"],
                    " ".join(corpus[entity_a].texts + corpus[entity_b].texts),
                ),
            }
        per_pair[pair_id] = entry

    means: Dict[str, object] = {
        "distinctiveness": _mean(
            [p["distinctiveness"] for p in per_pair.values()]
        ),
        "intra_rouge1": _mean(
            [p["intra_rouge"]["rouge1"] for p in per_pair.values()]
        ),
    }
    for side in ("contrastive_a", "contrastive_b", "common"):
        for metric in ("rouge1", "rouge2", "rougeL"):
            means[f"{side}_{metric}_f1"] = _mean(
                [p[side][metric]["f1"] for p in per_pair.values()]
            )
    report = {"pairs": per_pair, "means": means}
    _atomic_write_text(args.out, _dump_json(report))
    _write_manifest(
        args.out,
        "evaluate",
        {},
        inputs=[args.generated, args.references]
        + ([args.reviews] if args.reviews else []),
        outputs=[args.out],
        model_fingerprint=None,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cosum",
        description="Comparative opinion summarization via collaborative decoding.",
    )
    parser.add_argument("--seed", type=int, default=0, help="reserved; pipeline is deterministic")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train the background model")
    p_train.add_argument("--reviews", required=True)
    p_train.add_argument("--out", required=True)
    p_train.add_argument("--order", type=int, default=3)
    p_train.add_argument("--cache-order", type=int, default=None, dest="cache_order")
    p_train.add_argument("--lam", type=float, default=0.7)
    p_train.add_argument("--eps", type=float, default=1e-4)
    p_train.set_defaults(func=cmd_train)

    p_build = sub.add_parser("build-synthetic", help="build pseudo training pairs")
    p_build.add_argument("--reviews", required=True)
    p_build.add_argument("--task", choices=("contrastive", "common"), required=True)
    p_build.add_argument("--n", type=int, default=3)
    p_build.add_argument("--k", type=int, default=100)
    p_build.add_argument("--out", required=True)
    p_build.set_defaults(func=cmd_build_synthetic)

    p_sum = sub.add_parser("summarize", help="decode summaries for entity pairs")
    p_sum.add_argument("--model", required=True)
    p_sum.add_argument("--reviews", required=True)
    p_sum.add_argument("--pair", action="append", required=True, metavar="A,B")
    p_sum.add_argument("--config", default=None)
    p_sum.add_argument("--out", required=True)
    p_sum.add_argument("--delta", type=float, default=None)
    p_sum.add_argument("--gamma", type=float, default=None)
    p_sum.add_argument("--top-p", type=float, default=None, dest="top_p")
    p_sum.add_argument("--beam-width", type=int, default=None, dest="beam_width")
    p_sum.add_argument(
        "--max-len-contrastive", type=int, default=None, dest="max_len_contrastive"
    )
    p_sum.add_argument("--max-len-common", type=int, default=None, dest="max_len_common")
    p_sum.add_argument("--min-len", type=int, default=None, dest="min_len")
    p_sum.add_argument(
        "--length-penalty", type=float, default=None, dest="length_penalty"
    )
    p_sum.add_argument("--mode", default=None)
    p_sum.add_argument("--ratio-floor", type=float, default=None, dest="ratio_floor")
    p_sum.add_argument("--delta-grid", default=None, dest="delta_grid")
    p_sum.add_argument("--gamma-grid", default=None, dest="gamma_grid")
    p_sum.set_defaults(func=cmd_summarize)

    p_eval = sub.add_parser("evaluate", help="score generated summaries")
    p_eval.add_argument("--generated", required=True)
    p_eval.add_argument("--references", required=True)
    p_eval.add_argument("--reviews", default=None)
    p_eval.add_argument("--out", required=True)
    p_eval.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
