"""Operator algebra: normalization, application, chaining, matching."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from melodyscope.errors import ChainTooDeep, DegenerateChain, LengthMismatch, TooShort
from melodyscope.operators import (
    ConstraintState,
    OperatorId,
    PitchMode,
    TimeMode,
    apply_operator,
    chain,
    match_window,
    normalize,
)

from conftest import random_pattern
from oracle import BruteDegenerate, replay_ops, window_matches

O = OperatorId


def q(*pitches):
    """Quarter-note pattern from bare pitches."""
    return [(p, Fraction(1)) for p in pitches]


class TestNormalize:
    def test_basic(self):
        s = normalize(q(60, 64, 67))
        assert s.pitches == (60, 64, 67)
        assert s.durations == (1, 1, 1)
        assert s.pitch_mode is PitchMode.EXACT
        assert s.time_mode is TimeMode.EXACT
        assert s.applied_chain == ()

    def test_too_short(self):
        with pytest.raises(TooShort):
            normalize(q(60))

    def test_durations_copied_in_order(self):
        s = normalize([(67, Fraction(1, 2)), (67, Fraction(1, 2)), (67, 1), (64, 1)])
        assert s.pitches == (67, 67, 67, 64)
        assert s.durations == (Fraction(1, 2), Fraction(1, 2), 1, 1)


class TestApplyOperator:
    def test_mirror_x_reflects_around_first_pitch(self):
        s = apply_operator(normalize(q(60, 64, 67)), O.MIRROR_X)
        assert s.pitches == (60, 56, 53)
        assert s.pitch_mode is PitchMode.EXACT
        assert s.time_mode is TimeMode.EXACT

    def test_mirror_y_reverses_both_sequences(self):
        s = apply_operator(
            normalize([(60, 1), (64, 2), (67, 1)]), O.MIRROR_Y
        )
        assert s.pitches == (67, 64, 60)
        assert s.durations == (1, 2, 1)

    def test_mode_assignments(self):
        base = normalize(q(60, 62))
        assert apply_operator(base, O.TRANSPOSITION).pitch_mode is PitchMode.TRANSPOSABLE
        assert apply_operator(base, O.AUGMENTATION).time_mode is TimeMode.SCALABLE_UP
        assert apply_operator(base, O.DIMINUTION).time_mode is TimeMode.SCALABLE_DOWN
        assert apply_operator(base, O.SAME_PITCH).time_mode is TimeMode.FREE
        assert apply_operator(base, O.RHYTHM_ONLY).pitch_mode is PitchMode.FREE

    def test_repetition_changes_nothing_but_chain(self):
        base = normalize(q(60, 62))
        s = apply_operator(base, O.REPETITION)
        assert s.pitches == base.pitches
        assert s.durations == base.durations
        assert s.pitch_mode is base.pitch_mode
        assert s.time_mode is base.time_mode
        assert s.applied_chain == (O.REPETITION,)

    def test_chain_is_recorded(self):
        s = chain(normalize(q(60, 62)), [O.TRANSPOSITION, O.MIRROR_X])
        assert s.applied_chain == (O.TRANSPOSITION, O.MIRROR_X)

    def test_degenerate_chain_rejected(self):
        free_time = apply_operator(normalize(q(60, 62)), O.SAME_PITCH)
        with pytest.raises(DegenerateChain):
            apply_operator(free_time, O.RHYTHM_ONLY)
        free_pitch = apply_operator(normalize(q(60, 62)), O.RHYTHM_ONLY)
        with pytest.raises(DegenerateChain):
            apply_operator(free_pitch, O.SAME_PITCH)

    def test_direct_degenerate_construction_rejected(self):
        with pytest.raises(DegenerateChain):
            ConstraintState(
                pitches=(60, 62),
                durations=(Fraction(1), Fraction(1)),
                pitch_mode=PitchMode.FREE,
                time_mode=TimeMode.FREE,
            )


class TestChainComposition:
    def test_order_sensitivity_of_mirrors(self):
        base = normalize(q(60, 64, 67))
        assert chain(base, [O.MIRROR_X, O.MIRROR_Y]).pitches == (53, 56, 60)
        assert chain(base, [O.MIRROR_Y, O.MIRROR_X]).pitches == (67, 70, 74)

    def test_mirror_x_involution(self):
        base = normalize([(60, 1), (64, 2), (67, Fraction(1, 2))])
        twice = chain(base, [O.MIRROR_X, O.MIRROR_X])
        assert twice.pitches == base.pitches
        assert twice.durations == base.durations
        assert twice.pitch_mode is base.pitch_mode
        assert twice.time_mode is base.time_mode

    def test_mirror_y_involution(self):
        base = normalize([(60, 1), (64, 2), (67, Fraction(1, 2))])
        twice = chain(base, [O.MIRROR_Y, O.MIRROR_Y])
        assert twice.pitches == base.pitches
        assert twice.durations == base.durations

    def test_empty_chain_rejected(self):
        with pytest.raises(ValueError):
            chain(normalize(q(60, 62)), [])

    def test_depth_cap_default_four(self):
        base = normalize(q(60, 62))
        chain(base, [O.MIRROR_X] * 4)
        with pytest.raises(ChainTooDeep):
            chain(base, [O.MIRROR_X] * 5)

    def test_depth_cap_configurable(self):
        base = normalize(q(60, 62))
        with pytest.raises(ChainTooDeep):
            chain(base, [O.MIRROR_X, O.MIRROR_X], max_depth=1)
        deep = chain(base, [O.MIRROR_X] * 6, max_depth=None)
        assert len(deep.applied_chain) == 6


class TestMatchWindow:
    def test_transposable_match_carries_shift(self):
        s = apply_operator(normalize(q(60, 64, 67)), O.TRANSPOSITION)
        result = match_window(s, q(62, 66, 69))
        assert result.matched and result.shift == 2 and result.scale is None

    def test_zero_shift_is_not_transposition(self):
        s = apply_operator(normalize(q(60, 64, 67)), O.TRANSPOSITION)
        assert not match_window(s, q(60, 64, 67)).matched

    def test_scalable_up_match_carries_scale(self):
        s = apply_operator(
            normalize([(60, 1), (62, 1), (64, 2)]), O.AUGMENTATION
        )
        result = match_window(s, [(60, 2), (62, 2), (64, 4)])
        assert result.matched and result.scale == 2 and result.shift is None

    def test_scale_one_is_not_augmentation(self):
        s = apply_operator(normalize([(60, 1), (62, 1)]), O.AUGMENTATION)
        assert not match_window(s, [(60, 1), (62, 1)]).matched

    def test_diminution_requires_fraction_below_one(self):
        s = apply_operator(normalize([(60, 2), (62, 2)]), O.DIMINUTION)
        assert match_window(s, [(60, 1), (62, 1)]).scale == Fraction(1, 2)
        assert not match_window(s, [(60, 4), (62, 4)]).matched

    def test_non_uniform_scaling_rejected(self):
        s = apply_operator(normalize([(60, 1), (62, 2)]), O.AUGMENTATION)
        assert not match_window(s, [(60, 2), (62, 3)]).matched

    def test_length_mismatch(self):
        s = normalize(q(60, 62))
        with pytest.raises(LengthMismatch):
            match_window(s, q(60, 62, 64))

    def test_rhythm_only_ignores_pitch(self):
        s = apply_operator(normalize([(60, 1), (62, 2)]), O.RHYTHM_ONLY)
        assert match_window(s, [(81, 1), (48, 2)]).matched
        assert not match_window(s, [(81, 1), (48, 1)]).matched

    def test_same_pitch_ignores_time(self):
        s = apply_operator(normalize([(60, 1), (62, 2)]), O.SAME_PITCH)
        assert match_window(s, [(60, Fraction(1, 4)), (62, 2)]).matched
        assert not match_window(s, [(61, 1), (62, 2)]).matched


def test_match_agrees_with_brute_force_evaluator(rng):
    # The engine's predicate and the independently coded replay/check in
    # oracle.py must agree on random (chain, window) pairs.
    ops = list(OperatorId)
    for _ in range(3000):
        pattern = random_pattern(rng, length=rng.randint(2, 5))
        chain_ops = [rng.choice(ops) for _ in range(rng.randint(1, 3))]
        window = random_pattern(rng, length=len(pattern))
        if rng.random() < 0.4:
            # Bias towards windows related to the pattern so matches happen.
            shift = rng.randint(-5, 5)
            factor = rng.choice([Fraction(1, 2), 1, 2])
            window = [(p + shift, d * factor) for p, d in pattern]

        engine_error = brute_error = False
        engine_matched = brute_matched = None
        try:
            state = chain_like(pattern, chain_ops)
            engine_matched = match_window(state, window).matched
        except DegenerateChain:
            engine_error = True
        try:
            rules = replay_ops(pattern, [op.value for op in chain_ops])
            brute_matched = window_matches(*rules, window)
        except BruteDegenerate:
            brute_error = True

        assert engine_error == brute_error, chain_ops
        if not engine_error:
            assert engine_matched == brute_matched, (pattern, chain_ops, window)


def chain_like(pattern, ops):
    state = normalize(pattern)
    for op in ops:
        state = apply_operator(state, op)
    return state


@given(
    st.lists(
        st.tuples(st.integers(min_value=40, max_value=90), st.sampled_from([1, 2])),
        min_size=2,
        max_size=8,
    ),
    st.integers(min_value=-24, max_value=24),
)
def test_transposition_invariance(pattern, k):
    # Shifting both the query basis and the window by k preserves the
    # match verdict of a transposable state.
    state = apply_operator(normalize(pattern), OperatorId.TRANSPOSITION)
    shifted_pattern = [(p + k, d) for p, d in pattern]
    shifted_state = apply_operator(normalize(shifted_pattern), OperatorId.TRANSPOSITION)
    window = [(p + 3, d) for p, d in pattern]
    shifted_window = [(p + k, d) for p, d in window]
    assert (
        match_window(state, window).matched
        == match_window(shifted_state, shifted_window).matched
    )


@given(
    st.lists(st.sampled_from([1, 2, 4]), min_size=2, max_size=6),
    st.sampled_from([2, 3, 4]),
)
def test_scaling_exactness(durations, factor):
    pattern = [(60 + i, Fraction(d)) for i, d in enumerate(durations)]
    state = apply_operator(normalize(pattern), OperatorId.AUGMENTATION)
    window = [(p, d * factor) for p, d in pattern]
    result = match_window(state, window)
    assert result.matched
    assert result.scale == Fraction(window[0][1]) / Fraction(pattern[0][1])
    assert all(
        Fraction(w) == result.scale * Fraction(d)
        for (_, w), (_, d) in zip(window, pattern)
    )


def test_interval_length_invariant(rng):
    for _ in range(100):
        pattern = random_pattern(rng)
        state = normalize(pattern)
        assert len(state.intervals) == len(state.pitches) - 1


def test_operator_serialization_round_trip():
    for op in OperatorId:
        assert OperatorId.parse(op.value) is op
    assert [op.value for op in OperatorId] == [f"O{i}" for i in range(1, 9)]
    assert OperatorId.TRANSPOSITION.label == "Transposition"
    assert OperatorId.MIRROR_X.label == "Mirror on X-Axis"
    with pytest.raises(ValueError):
        OperatorId.parse("O9")
