import dataclasses

import pytest

from cosum.decoding import DecodeConfig, load_decode_config, summarize_pair

FAST = dict(min_len=3, max_len_contrastive=25, max_len_common=15)


class TestDecodeConfig:
    def test_defaults(self):
        cfg = DecodeConfig()
        assert cfg.top_p == 0.9
        assert cfg.beam_width == 4
        assert cfg.max_len_contrastive == 150
        assert cfg.max_len_common == 50
        assert cfg.min_len == 10
        assert cfg.length_penalty == 1.0
        assert cfg.ratio_floor == 1e-12

    @pytest.mark.parametrize(
        "bad",
        [
            {"delta": -0.1},
            {"gamma": -1.0},
            {"top_p": 0.0},
            {"top_p": 1.2},
            {"beam_width": 0},
            {"min_len": 0},
            {"min_len": 60, "max_len_common": 50},
            {"mode": "nope"},
            {"ratio_floor": 0.0},
        ],
    )
    def test_invalid_rejected(self, bad):
        with pytest.raises(ValueError):
            DecodeConfig(**bad)


class TestConfigFile:
    def test_roundtrip_all_fields(self, tmp_path):
        path = tmp_path / "decode.cfg"
        path.write_text(
            "delta = 2.0\n"
            "gamma = 0.25\n"
            "top_p = 0.8  # nucleus size\n"
            "beam_width = 2\n"
            "max_len_contrastive = 40\n"
            "max_len_common = 20\n"
            "min_len = 4\n"
            "length_penalty = 0.5\n"
            "mode = common_moe\n"
            "ratio_floor = 1e-10\n"
        )
        cfg = load_decode_config(str(path))
        assert cfg == DecodeConfig(
            delta=2.0,
            gamma=0.25,
            top_p=0.8,
            beam_width=2,
            max_len_contrastive=40,
            max_len_common=20,
            min_len=4,
            length_penalty=0.5,
            mode="common_moe",
            ratio_floor=1e-10,
        )

    def test_missing_keys_fall_back_to_defaults(self, tmp_path):
        path = tmp_path / "decode.cfg"
        path.write_text("delta = 0.5\n")
        cfg = load_decode_config(str(path))
        assert cfg.delta == 0.5
        assert cfg.gamma == DecodeConfig().gamma

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "decode.cfg"
        path.write_text("temperature = 0.7\n")
        with pytest.raises(ValueError, match="unknown config key"):
            load_decode_config(str(path))

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "decode.cfg"
        path.write_text("just some words\n")
        with pytest.raises(ValueError, match="key=value"):
            load_decode_config(str(path))


class TestSummarizePair:
    def test_identical_entities_without_codecoding(self, summarizer, corpus_by_entity):
        cfg = DecodeConfig(delta=0.0, gamma=0.0, **FAST)
        es = corpus_by_entity["harbor_hotel"]
        triple = summarize_pair(summarizer, es, es, cfg)
        assert triple.contrastive_a == triple.contrastive_b

    def test_pair_order_equivariance(self, summarizer, corpus_by_entity):
        cfg = DecodeConfig(**FAST)
        ra = corpus_by_entity["summit_lodge"]
        rb = corpus_by_entity["lakeside_resort"]
        fwd = summarize_pair(summarizer, ra, rb, cfg)
        rev = summarize_pair(summarizer, rb, ra, cfg)
        assert fwd.contrastive_a == rev.contrastive_b
        assert fwd.contrastive_b == rev.contrastive_a
        assert fwd.common == rev.common

    def test_deterministic(self, summarizer, corpus_by_entity):
        cfg = DecodeConfig(**FAST)
        ra = corpus_by_entity["harbor_hotel"]
        rb = corpus_by_entity["garden_inn"]
        assert summarize_pair(summarizer, ra, rb, cfg) == summarize_pair(
            summarizer, ra, rb, cfg
        )

    def test_all_fields_non_empty(self, summarizer, corpus_by_entity):
        cfg = DecodeConfig(**FAST)
        ra = corpus_by_entity["vineyard_estate"]
        rb = corpus_by_entity["desert_oasis"]
        triple = summarize_pair(summarizer, ra, rb, cfg)
        assert triple.contrastive_a
        assert triple.contrastive_b
        assert triple.common

    @pytest.mark.parametrize(
        "mode",
        [
            "contrastive_poe",
            "contrastive_moe_ablation",
            "contrastive_vs_common",
            "common_moe",
            "common_poe_ablation",
            "base",
        ],
    )
    def test_all_modes_decode(self, summarizer, corpus_by_entity, mode):
        cfg = DecodeConfig(mode=mode, **FAST)
        ra = corpus_by_entity["old_town_suites"]
        rb = corpus_by_entity["airport_express"]
        triple = summarize_pair(summarizer, ra, rb, cfg)
        assert triple.contrastive_a and triple.contrastive_b and triple.common

    def test_base_mode_matches_zero_tradeoffs(self, summarizer, corpus_by_entity):
        ra = corpus_by_entity["harbor_hotel"]
        rb = corpus_by_entity["garden_inn"]
        base = summarize_pair(
            summarizer, ra, rb, DecodeConfig(mode="base", **FAST)
        )
        zeros = summarize_pair(
            summarizer, ra, rb, DecodeConfig(delta=0.0, gamma=0.0, **FAST)
        )
        assert base.contrastive_a == zeros.contrastive_a
        assert base.contrastive_b == zeros.contrastive_b
        assert base.common == zeros.common
