import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import cantor_coords
from tkft import corpus
from tkft.cantor import (
    BlockMap,
    CantorBlock,
    CantorPoint,
    Piece,
    apply_blockmap,
    blockmap_from_dict,
    blockmap_svg,
    blockmap_to_dict,
    check_disjoint,
    check_volume,
    format_blockmap,
    gshift_to_blockmap,
    kappa,
    kappa_inv,
    parse_blockmap,
    rectangles_overlap,
    ternary_digits,
    window_pieces,
)
from tkft.errors import DomainGapError, NotInCantorImage, Refused
from tkft.gshift import BiWord, apply, full_shift, identity_shift, swap_completion, swap_shift

words = st.sets(st.integers(-12, 12), max_size=10).map(BiWord.from_ones)
F = Fraction


def test_kappa_examples():
    assert kappa(BiWord()) == CantorPoint(0, 0)
    assert kappa(BiWord.from_ones({0})) == CantorPoint(F(2, 3), 0)
    assert kappa(BiWord.from_ones({-1})) == CantorPoint(0, F(2, 3))


@given(st.sets(st.integers(-12, 12), max_size=10))
def test_kappa_matches_series(ones):
    p = kappa(BiWord.from_ones(ones))
    assert (p.x, p.y) == cantor_coords(ones)


@given(words)
def test_kappa_round_trip(t):
    assert kappa_inv(kappa(t)) == t
    p = kappa(t)
    assert kappa(kappa_inv(p)) == p
    assert all(d in (0, 2) for d in ternary_digits(p.x))


@pytest.mark.parametrize("x", [F(1, 2), F(1, 3), F(1, 4), F(5, 9)])
def test_kappa_inv_rejects_points_off_the_image(x):
    with pytest.raises(NotInCantorImage):
        kappa_inv((x, 0))


def test_full_shift_blockmap_examples():
    f = gshift_to_blockmap(full_shift(1))
    t = BiWord.from_ones({1, -1})
    assert kappa(t) == CantorPoint(F(2, 9), F(2, 3))
    assert apply_blockmap(f, kappa(t)) == CantorPoint(F(2, 3), F(2, 9))
    assert apply_blockmap(f, kappa(t)) == kappa(apply(full_shift(1), t))
    piece = f.find(F(2, 9), F(2, 3))
    assert (piece.alpha, piece.gamma) == (3, F(1, 3))


def test_full_shift_moves_cell_zero_to_minus_one():
    f = gshift_to_blockmap(full_shift(1))
    # t0 = 1 relabels to t_{-1} = 1, whose image is (0, 2/3)
    assert apply_blockmap(f, CantorPoint(F(2, 3), 0)) == CantorPoint(0, F(2, 3))
    assert kappa(apply(full_shift(1), BiWord.from_ones({0}))) == CantorPoint(0, F(2, 3))


def test_identity_blockmap():
    f = gshift_to_blockmap(identity_shift())
    for pc in f.pieces:
        assert (pc.alpha, pc.beta, pc.gamma, pc.delta) == (1, 0, 1, 0)
        assert pc.source == pc.target
    p = CantorPoint(F(20, 27), F(2, 9))
    assert apply_blockmap(f, p) == p


def test_point_off_cantor_set_is_domain_gap():
    with pytest.raises(DomainGapError):
        apply_blockmap(gshift_to_blockmap(full_shift(1)), (F(1, 2), F(0)))


def test_partial_cover_is_domain_gap():
    f = BlockMap(window_pieces((1,), (1,), 0))
    with pytest.raises(DomainGapError):
        apply_blockmap(f, CantorPoint(F(2, 9), 0))


SHIFTS = {
    "identity": identity_shift(),
    "full": full_shift(1),
    "full-left": full_shift(-2, 2),
    "swap-completion": swap_completion(),
    **{f"corpus-{n}": corpus.shift(n) for n in corpus.SHIFTS},
}


@pytest.mark.parametrize("name", sorted(SHIFTS))
def test_conjugacy_on_random_words(name):
    S = SHIFTS[name]
    f = gshift_to_blockmap(S)
    rng = random.Random(name)
    for _ in range(500):
        t = BiWord.from_ones(rng.randrange(-12, 12) for _ in range(rng.randrange(10)))
        assert kappa(apply(S, t)) == apply_blockmap(f, kappa(t))


@pytest.mark.parametrize("name", sorted(SHIFTS))
def test_volume_and_disjointness(name):
    f = gshift_to_blockmap(SHIFTS[name])
    rep = check_volume(f)
    assert rep and rep.source_area == rep.target_area
    assert all(pc.alpha * pc.gamma == 1 for pc in f.pieces)
    assert check_disjoint(f)


def test_full_shift_volume_totals():
    rep = check_volume(gshift_to_blockmap(full_shift(1)))
    assert rep.source_area == rep.target_area == F(2, 3)


def test_violating_piece_is_reported():
    src = CantorBlock((0,), ())
    bad = Piece.between(src, CantorBlock((), ()), 3, 1)
    rep = check_volume(BlockMap([bad]))
    assert not rep
    assert rep.violations[0][0] == 0


def test_non_bijective_refused_with_certificate():
    with pytest.raises(Refused) as exc:
        gshift_to_blockmap(swap_shift())
    assert exc.value.certificate is not None


def test_window_pieces_refine_long_shifts():
    assert len(window_pieces((0, 1), (1, 0), 3)) == 2
    assert len(window_pieces((0,), (0,), -2)) == 4
    assert len(window_pieces((0,), (0,), 1)) == 1


def test_block_geometry():
    b = CantorBlock((1, 0), (1,))
    assert b.rectangle() == (F(2, 3), F(2, 3) + F(1, 9), F(2, 3), F(1))
    assert b.area == F(1, 27)
    assert b.contains_word(BiWord.from_ones({0, -1}))
    assert not b.contains_word(BiWord.from_ones({0, 1, -1}))


def test_text_and_json_round_trip():
    f = gshift_to_blockmap(corpus.shift("swing"))
    assert parse_blockmap(format_blockmap(f)) == f
    assert blockmap_from_dict(blockmap_to_dict(f)) == f


def test_svg_has_a_rectangle_pair_per_piece():
    f = gshift_to_blockmap(swap_completion())
    svg = blockmap_svg(f)
    assert svg.startswith("<svg") or svg.startswith("<?xml")
    assert svg.count("<rect") >= 2 * len(f)
    assert blockmap_svg(f) == svg


bits = st.lists(st.integers(0, 1), max_size=4).map(tuple)


@given(bits, bits, bits, bits)
def test_overlap_test_matches_closed_rectangles(u1, v1, u2, v2):
    a, b = CantorBlock(u1, v1), CantorBlock(u2, v2)
    ax0, ax1, ay0, ay1 = a.rectangle()
    bx0, bx1, by0, by1 = b.rectangle()
    exact = ax0 <= bx1 and bx0 <= ax1 and ay0 <= by1 and by0 <= ay1
    assert rectangles_overlap(a, b) == exact
