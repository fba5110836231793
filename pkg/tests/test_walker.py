import math

import numpy as np
import pytest

from tagembed.graph import TaggedNetwork, build_hybrid
from tagembed.walker import (
    WalkConfig,
    generate_corpus,
    read_walks,
    select_tag,
    step_from_plain,
    step_from_tag,
    tag_probabilities,
    walks_to_tokens,
    write_walks,
)

N = 100_000


def freq(draws, value):
    return np.mean(np.asarray(draws) == value)


@pytest.fixture
def star():
    """Node 0 has plain neighbours 1, 2 and tags 0 (size 1) and 1 (size 2)."""
    g = TaggedNetwork(4, [(0, 1), (0, 2), (2, 3)], {0: {0, 1}, 3: {1}}, {0: "small", 1: "big"})
    return build_hybrid(g)


class TestConfig:
    @pytest.mark.parametrize("kw", [{"p": 1.5}, {"q": -0.1}, {"walk_length": 1}, {"size_scale": 0.0},
                                    {"walks_per_node": 0}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            WalkConfig(**kw)


class TestStepFromTag:
    def test_degree_weighted(self):
        g = TaggedNetwork(5, [(0, 1), (0, 2), (0, 3), (4, 1)], {0: {0}, 4: {0}}, {0: "t"})
        h = build_hybrid(g)
        rng = np.random.default_rng(1)
        draws = [step_from_tag(h, 0, rng) for _ in range(N)]
        assert abs(freq(draws, 0) - 0.75) < 0.01

    def test_equal_degrees(self):
        g = TaggedNetwork(4, [(0, 1), (0, 2), (3, 1), (3, 2)], {0: {0}, 3: {0}}, {0: "t"})
        h = build_hybrid(g)
        rng = np.random.default_rng(2)
        draws = [step_from_tag(h, 0, rng) for _ in range(N)]
        assert abs(freq(draws, 0) - 0.5) < 0.01

    def test_single_member(self, star):
        rng = np.random.default_rng(0)
        assert {step_from_tag(star, 0, rng) for _ in range(100)} == {0}


class TestStepFromPlain:
    def test_p_one_always_tag(self, star):
        rng = np.random.default_rng(0)
        cfg = WalkConfig(p=1.0)
        assert all(star.is_tag(step_from_plain(star, 0, None, cfg, rng)) for _ in range(1000))

    def test_p_zero_never_tag(self, star):
        rng = np.random.default_rng(0)
        cfg = WalkConfig(p=0.0)
        assert not any(star.is_tag(step_from_plain(star, 0, None, cfg, rng)) for _ in range(1000))

    def test_half_mixing(self, star):
        rng = np.random.default_rng(3)
        cfg = WalkConfig(p=0.5)
        draws = [star.is_tag(step_from_plain(star, 0, None, cfg, rng)) for _ in range(N)]
        assert abs(np.mean(draws) - 0.5) < 0.01

    def test_only_tag_neighbours(self):
        h = build_hybrid(TaggedNetwork(2, [], {0: {0}, 1: {0}}, {0: "t"}))
        rng = np.random.default_rng(0)
        assert step_from_plain(h, 0, None, WalkConfig(p=0.0), rng) == h.tag_vertex(0)

    def test_isolated(self):
        h = build_hybrid(TaggedNetwork(2, []))
        assert step_from_plain(h, 0, None, WalkConfig(), np.random.default_rng(0)) is None

    def test_plain_step_weighted(self):
        h = build_hybrid(TaggedNetwork(3, {(0, 1): 3.0, (0, 2): 1.0}))
        rng = np.random.default_rng(4)
        draws = [step_from_plain(h, 0, None, WalkConfig(), rng) for _ in range(N)]
        assert abs(freq(draws, 1) - 0.75) < 0.01


class TestSelectTag:
    def test_equal_sizes_uniform(self):
        g = TaggedNetwork(4, [], {0: {0, 1, 2}, 1: {0}, 2: {1}, 3: {2}}, {0: "a", 1: "b", 2: "c"})
        h = build_hybrid(g)
        for mode in ("transverse", "vertical"):
            assert np.allclose(tag_probabilities(h, [0, 1, 2], 1, mode, 2.0), 1 / 3)

    def test_no_last_tag_uniform(self, star):
        rng = np.random.default_rng(5)
        draws = [select_tag(star, [0, 1], None, WalkConfig(q=1.0), rng) for _ in range(N)]
        assert abs(freq(draws, 0) - 0.5) < 0.01

    def test_closed_form(self, star):
        # sizes 1 and 2, last tag size 1, scale 1: delta in {0, 1}
        e = math.e
        pt = tag_probabilities(star, [0, 1], 0, "transverse", 1.0)
        pv = tag_probabilities(star, [0, 1], 0, "vertical", 1.0)
        assert pt == pytest.approx([1 / (1 + 1 / e), (1 / e) / (1 + 1 / e)], abs=1e-12)
        assert pt[0] == pytest.approx(0.7310585786, abs=1e-9)
        assert pv == pytest.approx([1 / (1 + e), e / (1 + e)], abs=1e-12)

    @pytest.mark.parametrize("q,expected", [(1.0, 1 / (1 + math.exp(-1))), (0.0, 1 / (1 + math.e)),
                                            (0.5, 0.5 / (1 + math.exp(-1)) + 0.5 / (1 + math.e))])
    def test_empirical(self, star, q, expected):
        rng = np.random.default_rng(6)
        cfg = WalkConfig(q=q, size_scale=1.0)
        draws = [select_tag(star, [0, 1], 0, cfg, rng) for _ in range(N)]
        assert abs(freq(draws, 0) - expected) < 0.01

    def test_default_scale_is_largest_community(self, star):
        # max size 2 -> delta 0.5
        cfg = WalkConfig(q=1.0)
        rng = np.random.default_rng(7)
        draws = [select_tag(star, [0, 1], 0, cfg, rng) for _ in range(N)]
        expected = 1 / (1 + math.exp(-0.25))
        assert abs(freq(draws, 0) - expected) < 0.01


class TestCorpus:
    def test_count(self):
        g = TaggedNetwork(10, [(i, (i + 1) % 10) for i in range(10)])
        walks = generate_corpus(build_hybrid(g), WalkConfig(walks_per_node=2, walk_length=5))
        assert len(walks) == 20 and all(len(w) == 5 for w in walks)

    def test_forced_path(self):
        h = build_hybrid(TaggedNetwork(2, [(0, 1)]))
        for w in generate_corpus(h, WalkConfig(walk_length=4, walks_per_node=3)):
            assert w == [w[0], 1 - w[0], w[0], 1 - w[0]]

    def test_isolated_start_terminates(self):
        h = build_hybrid(TaggedNetwork(3, [(0, 1)]))
        walks = generate_corpus(h, WalkConfig(walk_length=4, walks_per_node=1))
        assert walks[2] == [2]

    def test_ms_pattern_with_p_one(self, two_level):
        h = build_hybrid(two_level)
        for w in generate_corpus(h, WalkConfig(p=1.0, walk_length=21, walks_per_node=3)):
            is_tag = [h.is_tag(x) for x in w]
            assert is_tag[1::2] == [True] * len(is_tag[1::2])
            assert not any(is_tag[0::2])

    def test_sc_pattern_present(self, two_level):
        h = build_hybrid(two_level)
        gaps = []
        for w in generate_corpus(h, WalkConfig(p=0.3, walk_length=40, walks_per_node=5)):
            pos = [i for i, x in enumerate(w) if h.is_tag(x)]
            gaps += [b - a - 1 for a, b in zip(pos, pos[1:])]
        assert min(gaps) == 1
        assert sum(g >= 2 for g in gaps) > 0.1 * len(gaps)

    def test_no_consecutive_tags(self, two_level):
        h = build_hybrid(two_level)
        for w in generate_corpus(h, WalkConfig(p=0.7, walk_length=30, walks_per_node=2)):
            assert not any(h.is_tag(a) and h.is_tag(b) for a, b in zip(w, w[1:]))
            # consecutive vertices are adjacent in the hybrid network
            for a, b in zip(w, w[1:]):
                if h.is_tag(a):
                    assert b in h.members[a - h.n_nodes]
                elif h.is_tag(b):
                    assert b in h.tag_nbrs[a]
                else:
                    assert b in h.plain_nbrs[a]

    def test_deterministic_and_parallel(self, two_level):
        h = build_hybrid(two_level)
        cfg = WalkConfig(p=0.5, q=0.3, walk_length=15, walks_per_node=2, rng_seed=11)
        a = generate_corpus(h, cfg)
        assert a == generate_corpus(h, cfg)
        assert a == generate_corpus(h, cfg, n_jobs=2)
        assert a != generate_corpus(h, WalkConfig(p=0.5, q=0.3, walk_length=15, walks_per_node=2, rng_seed=12))

    def test_text_format(self, two_level, tmp_path):
        h = build_hybrid(two_level)
        walks = generate_corpus(h, WalkConfig(walk_length=6, walks_per_node=1))
        tokens = walks_to_tokens(h, walks)
        write_walks(tmp_path / "w.txt", tokens)
        text = (tmp_path / "w.txt").read_text()
        assert text.splitlines()[0] == " ".join(tokens[0])
        assert all(tok[0] in "nt" and tok[1:].isdigit() for line in text.splitlines() for tok in line.split(" "))
        assert read_walks(tmp_path / "w.txt") == tokens


@pytest.fixture
def two_level():
    """12 nodes in a ring; tags: 4 groups of 3 and 2 halves of 6."""
    n = 12
    edges = [(i, (i + 1) % n) for i in range(n)] + [(0, 6), (3, 9)]
    tags = {v: {v // 3, 4 + v // 6} for v in range(n)}
    names = {t: f"g{t}" for t in range(6)}
    return TaggedNetwork(n, edges, tags, names)
