"""Frequency laws, temperings, scores, and the WAV renderer."""

import io
import math
import wave
from fractions import Fraction

import numpy as np
import pytest

from horomonica.audio import (
    A0_HZ,
    EQUAL,
    FRET_SPACING,
    NoteEvent,
    Score,
    SynthConfig,
    Tempering,
    arpeggio,
    compile_melody,
    freq_of_lambda,
    fret_frequency,
    hold_frequency,
    pythagorean,
    render_samples,
    render_wav,
    tap_event,
    triangle_event,
)
from horomonica.farey import INFINITY
from horomonica.tessellation import new_patch

REL_TOL = 1e-9


# ------------------------------------------------------------- frequencies

def test_equal_temperament_anchors():
    assert freq_of_lambda(48) == 440.0
    assert freq_of_lambda(12) == 55.0
    assert freq_of_lambda(24) == 110.0
    assert abs(freq_of_lambda(1) - 27.5 * 2 ** (1 / 12)) < REL_TOL


def test_octave_doubling():
    for lam in range(1, 61):
        assert math.isclose(
            freq_of_lambda(lam + 12), 2 * freq_of_lambda(lam), rel_tol=REL_TOL
        )


def test_octave_shift():
    assert freq_of_lambda(48, n_shift=5) == 220.0
    assert freq_of_lambda(48, n_shift=3) == 880.0


def test_frequency_monotone():
    freqs = [freq_of_lambda(lam) for lam in range(1, 120)]
    assert all(a < b for a, b in zip(freqs, freqs[1:]))


def test_lambda_must_be_positive():
    with pytest.raises(ValueError):
        freq_of_lambda(0)
    with pytest.raises(ValueError):
        fret_frequency(3, -5)


# -------------------------------------------------------------- temperings

def test_pythagorean_table():
    py = pythagorean()
    expected = [
        Fraction(1),
        Fraction(2187, 2048),
        Fraction(9, 8),
        Fraction(19683, 16384),
        Fraction(81, 64),
        Fraction(4, 3),
        Fraction(729, 512),
        Fraction(3, 2),
        Fraction(6561, 4096),
        Fraction(27, 16),
        Fraction(59049, 32768),
        Fraction(243, 128),
    ]
    assert list(py.ratios) == expected
    diatonic = [expected[d] for d in (0, 2, 4, 5, 7, 9, 11)]
    assert diatonic == [
        Fraction(1),
        Fraction(9, 8),
        Fraction(81, 64),
        Fraction(4, 3),
        Fraction(3, 2),
        Fraction(27, 16),
        Fraction(243, 128),
    ]


def test_pythagorean_fifth_exact():
    py = pythagorean()
    assert freq_of_lambda(48, tempering=py) == 440.0
    assert freq_of_lambda(55, tempering=py) == 660.0
    for lam in range(1, 40):
        ratio = freq_of_lambda(lam + 12, tempering=py) / freq_of_lambda(
            lam, tempering=py
        )
        assert math.isclose(ratio, 2.0, rel_tol=REL_TOL)


def test_rooted_tempering_monotone():
    for root in range(12):
        py = pythagorean(root)
        freqs = [freq_of_lambda(lam, tempering=py) for lam in range(1, 80)]
        assert all(a < b for a, b in zip(freqs, freqs[1:]))
        up = freq_of_lambda(root + 19, tempering=py)
        down = freq_of_lambda(root + 12, tempering=py)
        assert math.isclose(up / down, 1.5, rel_tol=REL_TOL)


def test_tempering_validation():
    with pytest.raises(ValueError):
        Tempering("short", tuple(Fraction(1) for _ in range(3)))
    ratios = list(pythagorean().ratios)
    bad_first = tuple([Fraction(3, 2)] + ratios[1:])
    with pytest.raises(ValueError):
        Tempering("bad", bad_first)
    bad_order = tuple(reversed(ratios))
    with pytest.raises(ValueError):
        Tempering("bad", bad_order)
    bad_top = tuple(ratios[:-1] + [Fraction(2)])
    with pytest.raises(ValueError):
        Tempering("bad", bad_top)


# ------------------------------------------------------- frets and holds

def test_fret_frequency_is_shifted_lambda():
    for i in range(-10, 11):
        assert fret_frequency(48, i) == freq_of_lambda(48 + i)


def test_hold_frequency_equal():
    assert math.isclose(
        hold_frequency(48, FRET_SPACING), freq_of_lambda(49), rel_tol=REL_TOL
    )
    mid = hold_frequency(48, FRET_SPACING / 2)
    geo = math.sqrt(freq_of_lambda(48) * freq_of_lambda(49))
    assert math.isclose(mid, geo, rel_tol=REL_TOL)
    assert math.isclose(
        hold_frequency(48, -FRET_SPACING), freq_of_lambda(47), rel_tol=REL_TOL
    )


def test_hold_frequency_table_piecewise():
    py = pythagorean()
    on_fret = hold_frequency(48, 2 * FRET_SPACING, tempering=py)
    assert math.isclose(on_fret, freq_of_lambda(50, tempering=py), rel_tol=REL_TOL)
    between = hold_frequency(48, 1.5 * FRET_SPACING, tempering=py)
    f1 = freq_of_lambda(49, tempering=py)
    f2 = freq_of_lambda(50, tempering=py)
    assert math.isclose(between, f1 * (f2 / f1) ** 0.5, rel_tol=REL_TOL)


# ----------------------------------------------------------------- scores

def test_tap_event_defaults():
    ev = tap_event(48, 1.5)
    assert ev.t == 1.5 and ev.dur == 0.3 and ev.freq == 440.0


def test_untuned_tap_is_a0():
    assert tap_event(1, 0.0, untuned=True).freq == A0_HZ
    assert tap_event(7, 0.0, untuned=True).freq == A0_HZ


def test_triangle_event_three_notes():
    evs = triangle_event((1, 2, 3), 2.0)
    assert len(evs) == 3
    assert {round(e.freq, 6) for e in evs} == {
        round(freq_of_lambda(k), 6) for k in (1, 2, 3)
    }
    assert all(e.t == 2.0 for e in evs)


def test_score_json_roundtrip():
    score = Score([tap_event(48, 0.0), tap_event(12, 0.5)], {"kind": "demo"})
    again = Score.from_json(score.to_json())
    assert again == score


def test_arpeggio_on_pristine_patch():
    score = arpeggio(new_patch(), INFINITY, 5, 0.5)
    assert len(score.events) == 6
    assert [e.t for e in score.events] == [0.0, 0.5, 1.0, 1.5, 2.0, 2.5]
    assert all(e.dur == 0.25 for e in score.events)
    assert all(e.freq == freq_of_lambda(1) for e in score.events)
    assert score.meta["kind"] == "arpeggio"


def test_compile_melody_round_trip():
    tuning, taps = compile_melody([1, 2, 3])
    assert tuning == [{"edge": ["0/1", "1/1"]}, {"edge": ["0/1", "1/2"]}]
    assert [t["edge"] for t in taps] == [
        ["1/1", "1/0"],
        ["1/2", "1/0"],
        ["1/3", "1/0"],
    ]
    patch = new_patch()
    patch.apply_tuning_script(tuning)
    from horomonica.tessellation import EdgeKey

    for m, tap in zip([1, 2, 3], taps):
        e = EdgeKey.from_json(tap["edge"])
        assert patch.contains_edge(e)
        assert patch.lambda_of(e) == m


def test_compile_melody_deep():
    melody = [1, 5, 13, 2, 13]
    tuning, taps = compile_melody(melody)
    assert len(tuning) == 12
    patch = new_patch()
    patch.apply_tuning_script(tuning)
    from horomonica.tessellation import EdgeKey

    for m, tap in zip(melody, taps):
        assert patch.lambda_of(EdgeKey.from_json(tap["edge"])) == m


def test_compile_melody_validation():
    assert compile_melody([]) == ([], [])
    with pytest.raises(ValueError):
        compile_melody([0, 2])


# ------------------------------------------------------------------ synth

def test_render_samples_peak_and_length():
    cfg = SynthConfig()
    score = Score([tap_event(48, 0.0)])
    samples = render_samples(score, cfg)
    assert np.max(np.abs(samples)) == pytest.approx(0.89, abs=1e-12)
    expected = math.ceil((0.3 + cfg.release) * cfg.sample_rate)
    assert len(samples) == expected


def test_render_samples_empty():
    assert len(render_samples(Score())) == 0


def test_render_is_deterministic():
    score = Score([tap_event(48, 0.0), tap_event(12, 0.2)])
    assert np.array_equal(render_samples(score), render_samples(score))
    assert render_wav(score) == render_wav(score)


def test_render_wav_container():
    score = Score([tap_event(48, 0.0)])
    blob = render_wav(score)
    assert blob[:4] == b"RIFF" and blob[8:12] == b"WAVE"
    with wave.open(io.BytesIO(blob)) as wav:
        assert wav.getnchannels() == 1
        assert wav.getsampwidth() == 2
        assert wav.getframerate() == 44100
        frames = wav.readframes(wav.getnframes())
    data = np.frombuffer(frames, dtype="<i2")
    assert np.max(np.abs(data)) == round(0.89 * 32767)


def test_rendered_tone_has_requested_pitch():
    sr = 44100
    score = Score([NoteEvent(0.0, 1.0, 440.0)])
    samples = render_samples(score)
    window = samples[: sr]
    spectrum = np.abs(np.fft.rfft(window))
    peak_hz = np.argmax(spectrum) * sr / len(window)
    assert abs(peak_hz - 440.0) < 1.5


def test_waveform_variants_render():
    cfg = SynthConfig(waveforms=("square", "saw", "sine"))
    assert cfg.waveform_for(0) == "square"
    assert cfg.waveform_for(4) == "saw"
    score = Score([NoteEvent(0.0, 0.1, 220.0, 1.0, ch) for ch in range(3)])
    samples = render_samples(score, cfg)
    assert np.isfinite(samples).all()
    assert np.max(np.abs(samples)) == pytest.approx(0.89, abs=1e-12)


def test_config_validation():
    assert SynthConfig().bit_depth == 16
    with pytest.raises(ValueError, match="8000"):
        SynthConfig(sample_rate=4000)
    with pytest.raises(ValueError, match="16-bit"):
        SynthConfig(bit_depth=24)
    with pytest.raises(ValueError, match="peak_target"):
        SynthConfig(peak_target=1.0)


def test_score_orders_events_by_start():
    late = tap_event(48, 1.0)
    early = tap_event(12, 0.0)
    score = Score([late, early])
    assert [e.t for e in score.events] == [0.0, 1.0]


def test_zero_crossing_period():
    sr = 44100
    score = Score([NoteEvent(0.0, 1.0, 440.0)])
    samples = render_samples(score)
    body = samples[sr // 10 : sr // 2]
    signs = np.signbit(body)
    upward = np.nonzero(~signs[1:] & signs[:-1])[0]
    mean_period = np.mean(np.diff(upward))
    assert abs(mean_period - sr / 440.0) / (sr / 440.0) < 0.005


def test_empty_score_wav_is_minimal():
    blob = render_wav(Score())
    assert len(blob) == 44
    with wave.open(io.BytesIO(blob)) as wav:
        assert wav.getnframes() == 0
        assert wav.getframerate() == 44100


def test_data_chunk_size_one_second():
    cfg = SynthConfig()
    score = Score([NoteEvent(0.0, 1.0 - cfg.release, 440.0)])
    blob = render_wav(score, cfg)
    assert blob[-88200 - 8 : -88200] == b"data" + (88200).to_bytes(4, "little")
    assert len(blob) == 44 + 88200
