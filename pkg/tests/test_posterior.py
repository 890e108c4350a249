import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vowelart.errors import PosteriorgramFormatError
from vowelart.posterior import (
    CANONICAL_LABELS,
    PhoneSets,
    Posteriorgram,
    SelectionConfig,
    derive_decoded,
    read_posteriorgram,
    select_corner_frames,
    selection_stats,
    softmax_rows,
    write_posteriorgram,
)

IDX = {lab: i for i, lab in enumerate(CANONICAL_LABELS)}


def _pg(logits, decoded):
    logits = np.asarray(logits, dtype=float)
    n = logits.shape[0]
    starts = 0.030 * np.arange(n)
    return Posteriorgram(starts, starts + 0.045, logits, tuple(decoded))


def _random_pg(rng, n=30, scale=4.0):
    logits = rng.normal(0.0, scale, size=(n, 40))
    decoded = tuple(rng.choice(CANONICAL_LABELS, size=n))
    return _pg(logits, decoded)


class TestInterchange:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        pg = _random_pg(rng, n=3)
        path = tmp_path / "pg.csv"
        write_posteriorgram(pg, path)
        back = read_posteriorgram(path)
        assert back.logits.shape == (3, 40)
        assert back.decoded == pg.decoded
        np.testing.assert_allclose(back.logits, pg.logits, rtol=1e-9)

    def test_missing_column_named(self, tmp_path):
        rng = np.random.default_rng(2)
        pg = _random_pg(rng, n=2)
        path = tmp_path / "pg.csv"
        write_posteriorgram(pg, path)
        lines = path.read_text().splitlines()
        # drop the ZH column
        cols = lines[0].split(",")
        drop = cols.index("ZH")
        mutated = "\n".join(
            ",".join(c for i, c in enumerate(line.split(",")) if i != drop)
            for line in lines
        )
        path.write_text(mutated + "\n")
        with pytest.raises(PosteriorgramFormatError, match="ZH"):
            read_posteriorgram(path)

    def test_wrong_hop(self, tmp_path):
        rng = np.random.default_rng(3)
        pg = _random_pg(rng, n=4)
        starts = 0.025 * np.arange(4)
        bad = Posteriorgram(starts, starts + 0.045, pg.logits, pg.decoded)
        path = tmp_path / "pg.csv"
        write_posteriorgram(bad, path)
        with pytest.raises(PosteriorgramFormatError, match="unexpected hop"):
            read_posteriorgram(path)

    def test_missing_decoded(self, tmp_path):
        rng = np.random.default_rng(4)
        pg = _random_pg(rng, n=2)
        path = tmp_path / "pg.csv"
        write_posteriorgram(pg, path)
        lines = path.read_text().splitlines()
        fields = lines[1].split(",")
        fields[2] = ""
        lines[1] = ",".join(fields)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(PosteriorgramFormatError, match="line 2"):
            read_posteriorgram(path)

    def test_non_monotone_times(self, tmp_path):
        rng = np.random.default_rng(5)
        pg = _random_pg(rng, n=3)
        path = tmp_path / "pg.csv"
        write_posteriorgram(pg, path)
        lines = path.read_text().splitlines()
        lines[2], lines[3] = lines[3], lines[2]
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(PosteriorgramFormatError, match="monotone|hop"):
            read_posteriorgram(path)

    def test_parse_failure_line_number(self, tmp_path):
        rng = np.random.default_rng(6)
        pg = _random_pg(rng, n=3)
        path = tmp_path / "pg.csv"
        write_posteriorgram(pg, path)
        lines = path.read_text().splitlines()
        fields = lines[3].split(",")
        fields[5] = "not_a_number"
        lines[3] = ",".join(fields)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(PosteriorgramFormatError, match="line 4"):
            read_posteriorgram(path)


class TestSoftmax:
    def test_uniform_row(self):
        p = softmax_rows(np.zeros((1, 40)))
        np.testing.assert_allclose(p, 1.0 / 40.0)

    def test_saturation(self):
        row = np.zeros(40)
        row[7] = 1000.0
        p = softmax_rows(row[None, :])
        assert p[0, 7] >= 1.0 - 1e-12

    def test_two_way_closed_form(self):
        row = np.full(40, -1e9)
        row[0] = math.log(1.0)
        row[1] = math.log(3.0)
        p = softmax_rows(row[None, :])
        assert p[0, 0] == pytest.approx(0.25, abs=1e-12)
        assert p[0, 1] == pytest.approx(0.75, abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_rows_sum_to_one(self, seed):
        rng = np.random.default_rng(seed)
        logits = rng.normal(0, 100, size=(5, 40))
        sums = softmax_rows(logits).sum(axis=1)
        np.testing.assert_allclose(sums, 1.0, atol=1e-9)


def brute_force_select(pg, sets, cfg):
    """Independent re-evaluation of both criteria with naive sorting."""
    if cfg.corner_only:
        by_vowel = {"a": {"AA"}, "i": {"IY"}, "u": {"UW"}}
    else:
        by_vowel = {"a": set(sets.z_a), "i": set(sets.z_i), "u": set(sets.z_u)}
    out = {"a": set(), "i": set(), "u": set()}
    for t in range(pg.count):
        row = pg.logits[t]
        exps = [math.exp(v - max(row)) for v in row]
        total = sum(exps)
        post = [e / total for e in exps]
        ranked = sorted(
            zip(post, pg.labels), key=lambda pair: (-pair[0], pair[1])
        )[: cfg.k]
        for vowel, phones in by_vowel.items():
            crit1 = pg.decoded[t] in phones
            crit2 = any(lab in phones and p > cfg.alpha for p, lab in ranked)
            if crit1 or crit2:
                out[vowel].add(t)
    return out


class TestSelection:
    def test_consonant_decoded_uw_posterior_selected(self):
        # posterior 0.46 for UW, within top-4
        row = np.zeros(40)
        row[IDX["UW"]] = 5.0
        row[IDX["N"]] = 5.2
        pg = _pg(row[None, :], ["N"])
        sets = select_corner_frames(pg)
        assert 0 in sets.s_u

    def test_dominant_iy_posterior_selected(self):
        row = np.zeros(40)
        row[IDX["IY"]] = 6.0  # dominant -> posterior ~0.91
        pg = _pg(row[None, :], ["IY"])
        sets = select_corner_frames(pg)
        assert 0 in sets.s_i

    def test_criterion1_even_with_low_posteriors(self):
        pg = _pg(np.zeros((1, 40)), ["AH"])  # uniform posteriors 0.025 < alpha
        sets = select_corner_frames(pg)
        assert 0 in sets.s_a

    def test_below_alpha_not_selected(self):
        # IY posterior ~0.19, ranked high, decoded N -> nothing selected
        row = np.full(40, 0.0)
        row[IDX["N"]] = 2.0
        row[IDX["D"]] = 1.8
        row[IDX["IY"]] = 1.62
        pg = _pg(row[None, :], ["N"])
        p = softmax_rows(pg.logits)[0, IDX["IY"]]
        assert p < 0.2
        sets = select_corner_frames(pg)
        assert 0 not in sets.s_i

    def test_matches_brute_force(self):
        rng = np.random.default_rng(2024)
        sets = PhoneSets()
        for _ in range(25):
            pg = _random_pg(rng, n=20)
            cfg = SelectionConfig(
                k=int(rng.integers(1, 8)), alpha=float(rng.uniform(0.05, 0.5))
            )
            got = select_corner_frames(pg, sets, cfg)
            want = brute_force_select(pg, sets, cfg)
            assert set(got.s_a) == want["a"]
            assert set(got.s_i) == want["i"]
            assert set(got.s_u) == want["u"]

    def test_criterion1_subset_property(self):
        rng = np.random.default_rng(77)
        sets = PhoneSets()
        pg = _random_pg(rng, n=50)
        got = select_corner_frames(pg, sets)
        for vowel, phones in sets.by_vowel().items():
            decoded_in = {t for t in range(pg.count) if pg.decoded[t] in phones}
            assert decoded_in <= set(got.by_vowel()[vowel])

    def test_alpha_monotonicity(self):
        rng = np.random.default_rng(88)
        pg = _random_pg(rng, n=40)
        for lo, hi in [(0.1, 0.2), (0.2, 0.4), (0.3, 0.6)]:
            s_lo = select_corner_frames(pg, cfg=SelectionConfig(alpha=lo))
            s_hi = select_corner_frames(pg, cfg=SelectionConfig(alpha=hi))
            for v in ("a", "i", "u"):
                assert set(s_hi.by_vowel()[v]) <= set(s_lo.by_vowel()[v])

    def test_k_monotonicity(self):
        rng = np.random.default_rng(99)
        pg = _random_pg(rng, n=40)
        prev = None
        for k in (1, 2, 4, 8, 16):
            cur = select_corner_frames(pg, cfg=SelectionConfig(k=k))
            if prev is not None:
                for v in ("a", "i", "u"):
                    assert set(prev.by_vowel()[v]) <= set(cur.by_vowel()[v])
            prev = cur

    def test_corner_only_subset(self):
        rng = np.random.default_rng(111)
        pg = _random_pg(rng, n=60)
        full = select_corner_frames(pg, cfg=SelectionConfig())
        corner = select_corner_frames(pg, cfg=SelectionConfig(corner_only=True))
        for v in ("a", "i", "u"):
            assert set(corner.by_vowel()[v]) <= set(full.by_vowel()[v])

    def test_missing_label_warns_once(self):
        sets = PhoneSets(z_a=frozenset({"AA", "QQ"}))
        rng = np.random.default_rng(5)
        pg = _random_pg(rng, n=5)
        with pytest.warns(UserWarning, match="QQ"):
            select_corner_frames(pg, sets)


class TestSelectionStats:
    def test_empty(self):
        from vowelart.posterior import VowelFrameSets

        stats = selection_stats(VowelFrameSets(frozenset(), frozenset(), frozenset()))
        assert (stats["n_a"], stats["n_i"], stats["n_u"]) == (0, 0, 0)

    def test_counts_match_brute_force(self):
        rng = np.random.default_rng(6)
        pg = _random_pg(rng, n=80)
        cfg = SelectionConfig()
        got = select_corner_frames(pg, cfg=cfg)
        want = brute_force_select(pg, PhoneSets(), cfg)
        stats = selection_stats(got)
        assert stats["n_a"] == len(want["a"])
        assert stats["n_i"] == len(want["i"])
        assert stats["n_u"] == len(want["u"])
        assert stats["overlap_ai"] == len(want["a"] & want["i"])


def test_derive_decoded_top1():
    rng = np.random.default_rng(8)
    pg = _random_pg(rng, n=10)
    derived = derive_decoded(pg)
    for t, lab in enumerate(derived):
        assert pg.logits[t, IDX[lab]] == pg.logits[t].max()
