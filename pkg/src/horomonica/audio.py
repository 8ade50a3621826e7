"""Tones, temperings, frets, scores, and WAV rendering.

The tone of an edge of lambda length lam is 440 * xi^(lam - 12N) Hz with
xi = 2^(1/12) and octave shift N (default 4), i.e. 27.5 * xi^lam.  Table
temperings replace xi powers inside the octave by fixed rational ratios.
"""

from __future__ import annotations

import io
import math
import wave
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

# Hyperbolic distance between consecutive frets along an edge.  The factor
# one half makes the distinguished equidistant point itself a fret.
FRET_SPACING = 0.5 * math.exp(0.5)

A0_HZ = 27.5  # anchor: lambda 0 at the default octave shift


@dataclass(frozen=True)
class Tempering:
    """Twelve ratios per octave (first 1, strictly increasing, below 2) and a
    root offset in hemitones.  ratios None selects equal temperament."""

    name: str
    ratios: tuple[Fraction, ...] | None = None
    root: int = 0

    def __post_init__(self):
        if self.ratios is None:
            return
        if len(self.ratios) != 12:
            raise ValueError("a tempering table needs 12 ratios")
        if self.ratios[0] != 1:
            raise ValueError("the first ratio must be 1")
        for lo, hi in zip(self.ratios, self.ratios[1:]):
            if not lo < hi:
                raise ValueError("ratios must be strictly increasing")
        if self.ratios[-1] >= 2:
            raise ValueError("ratios must stay below the octave")

    @property
    def is_equal(self) -> bool:
        return self.ratios is None


EQUAL = Tempering("equal")


def pythagorean(root: int = 0) -> Tempering:
    """Twelve-tone Pythagorean tuning from the stack of fifths (3/2)^k,
    k = -1..10, each reduced into [1, 2).

    The seven diatonic degrees 0,2,4,5,7,9,11 carry 1:1, 9:8, 81:64, 4:3,
    3:2, 27:16, 243:128.
    """
    table = [Fraction(1)] * 12
    for k in range(-1, 11):
        r = Fraction(3, 2) ** k
        while r >= 2:
            r /= 2
        while r < 1:
            r *= 2
        table[(7 * k) % 12] = r
    return Tempering("pythagorean", tuple(table), root)


def _degree_freq(m: int, n_shift: int, tempering: Tempering) -> float:
    """Frequency at integer hemitone m, defined for every integer."""
    if tempering.is_equal:
        return A0_HZ * 2.0 ** (m / 12 + (4 - n_shift))
    steps = m - tempering.root
    octave, degree = divmod(steps, 12)
    anchor = A0_HZ * 2.0 ** ((4 - n_shift) + tempering.root / 12)
    return anchor * (2.0**octave) * float(tempering.ratios[degree])


def freq_of_lambda(
    lam: int, n_shift: int = 4, tempering: Tempering = EQUAL
) -> float:
    """Tone frequency of a lambda length (lam >= 1).

    Equal temperament gives 440 * xi^(lam - 12 * n_shift); a table tempering
    uses its ratio for the in-octave degree, with the octave floor and
    degree both taken relative to the table's root so frequency stays
    strictly increasing and doubles every 12 hemitones.
    """
    if lam < 1:
        raise ValueError("lambda lengths are positive integers")
    return _degree_freq(lam, n_shift, tempering)


def fret_frequency(
    lam: int, i: int, n_shift: int = 4, tempering: Tempering = EQUAL
) -> float:
    """Frequency of fret i on an edge of lambda length lam: the tone of
    lam + i."""
    if lam + i < 1:
        raise ValueError("fret index leaves the positive tone range")
    return freq_of_lambda(lam + i, n_shift, tempering)


def hold_frequency(
    lam: int, d: float, n_shift: int = 4, tempering: Tempering = EQUAL
) -> float:
    """Continuous frequency at signed fret distance d along an edge.

    d is hyperbolic distance from the distinguished fret; consecutive frets
    differ by one hemitone.  Equal temperament interpolates exponentially
    everywhere; table temperings are piecewise exponential between frets and
    exact on them.
    """
    steps = d / FRET_SPACING
    if tempering.is_equal:
        return A0_HZ * 2.0 ** ((lam + steps) / 12 + (4 - n_shift))
    i = math.floor(steps)
    frac = steps - i
    f0 = _degree_freq(lam + i, n_shift, tempering)
    if frac == 0:
        return f0
    f1 = _degree_freq(lam + i + 1, n_shift, tempering)
    return f0 * (f1 / f0) ** frac


# ------------------------------------------------------------------ scores

@dataclass(frozen=True)
class NoteEvent:
    t: float
    dur: float
    freq: float
    vel: float = 1.0
    ch: int = 0

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "dur": self.dur,
            "freq": self.freq,
            "vel": self.vel,
            "ch": self.ch,
        }

    @classmethod
    def from_json(cls, d: dict) -> "NoteEvent":
        return cls(
            float(d["t"]),
            float(d["dur"]),
            float(d["freq"]),
            float(d.get("vel", 1.0)),
            int(d.get("ch", 0)),
        )


@dataclass
class Score:
    events: list[NoteEvent] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.events = sorted(self.events, key=lambda e: e.t)

    def to_json(self) -> dict:
        return {"meta": self.meta, "events": [e.to_json() for e in self.events]}

    @classmethod
    def from_json(cls, d: dict) -> "Score":
        return cls(
            [NoteEvent.from_json(e) for e in d.get("events", [])],
            dict(d.get("meta", {})),
        )


@dataclass(frozen=True)
class SynthConfig:
    sample_rate: int = 44100
    bit_depth: int = 16
    attack: float = 0.010  # linear ramp, seconds
    decay_tc: float = 0.3  # exponential time constant, seconds
    release: float = 0.020  # linear fade after the note ends, seconds
    peak_target: float = 0.89
    waveforms: tuple[str, ...] = ("sine",)  # per channel, cyclic

    def __post_init__(self):
        if self.sample_rate < 8000:
            raise ValueError("sample_rate must be at least 8000 Hz")
        if self.bit_depth != 16:
            raise ValueError("only 16-bit PCM output is supported")
        if not 0 < self.peak_target < 1:
            raise ValueError("peak_target must lie strictly between 0 and 1")

    def waveform_for(self, ch: int) -> str:
        return self.waveforms[ch % len(self.waveforms)]


def tap_event(
    lam: int,
    t: float,
    duration: float = 0.3,
    velocity: float = 1.0,
    ch: int = 0,
    n_shift: int = 4,
    tempering: Tempering = EQUAL,
    untuned: bool = False,
) -> NoteEvent:
    """A 0.3 s burst at the tone of lam.

    With untuned=True the historical convention applies and the burst is
    exactly 27.5 Hz regardless of lam (pristine tessellations only; the
    normative formula gives 27.5 * xi^lam otherwise).
    """
    freq = A0_HZ if untuned else freq_of_lambda(lam, n_shift, tempering)
    return NoteEvent(t, duration, freq, velocity, ch)


def triangle_event(
    chord: tuple[int, int, int],
    t: float,
    duration: float = 0.3,
    velocity: float = 1.0,
    ch: int = 0,
    n_shift: int = 4,
    tempering: Tempering = EQUAL,
) -> list[NoteEvent]:
    """Three simultaneous bursts, one per lambda of a face."""
    return [
        NoteEvent(t, duration, freq_of_lambda(lam, n_shift, tempering), velocity, ch)
        for lam in chord
    ]


def arpeggio(
    source,
    center,
    window: float,
    seconds_per_unit: float,
    n_shift: int = 4,
    tempering: Tempering = EQUAL,
    velocity: float = 1.0,
    ch: int = 0,
) -> Score:
    """Ride the decoration horocycle at center: one 0.25 s note per edge
    crossing, at arc position times seconds_per_unit.

    source is anything with horocycle_crossings(center, window) yielding
    (edge, position) and lambda_of(edge).
    """
    events = [
        NoteEvent(
            pos * seconds_per_unit,
            0.25,
            freq_of_lambda(source.lambda_of(e), n_shift, tempering),
            velocity,
            ch,
        )
        for e, pos in source.horocycle_crossings(center, window)
    ]
    return Score(
        events,
        {
            "kind": "arpeggio",
            "center": str(center),
            "window": window,
            "seconds_per_unit": seconds_per_unit,
        },
    )


def compile_melody(hemitones: list[int]) -> tuple[list, list]:
    """Tuning script and tap script realizing a hemitone melody on a fan.

    Serial flips of the edges {0/1, 1/k} open a fan at 1/0 whose k-th edge
    {1/k, 1/0} has lambda k; note m is a tap on fan edge m.  Fan depth is
    max(melody), so every pitch 1..max is available.
    """
    if not hemitones:
        return [], []
    if min(hemitones) < 1:
        raise ValueError("hemitones must be positive")
    depth = max(hemitones)
    tuning = [
        {"edge": ["0/1", f"1/{k}"]} for k in range(1, depth)
    ]
    taps = [{"type": "tap", "edge": [f"1/{m}", "1/0"]} for m in hemitones]
    return tuning, taps


# ------------------------------------------------------------------- synth

def _waveform(phase: np.ndarray, kind: str) -> np.ndarray:
    if kind == "sine":
        return np.sin(2 * np.pi * phase)
    if kind == "square":
        return np.where(np.sin(2 * np.pi * phase) >= 0, 1.0, -1.0)
    if kind == "saw":
        return 2.0 * (phase % 1.0) - 1.0
    raise ValueError(f"unknown waveform {kind!r}")


def render_samples(score: Score, cfg: SynthConfig = SynthConfig()) -> np.ndarray:
    """Float mix of a score, normalized to peak_target (mono, float64)."""
    sr = cfg.sample_rate
    if not score.events:
        return np.zeros(0)
    end = max(ev.t + ev.dur for ev in score.events) + cfg.release
    total = int(math.ceil(end * sr))
    mix = np.zeros(total)
    for ev in score.events:
        start = int(round(ev.t * sr))
        ns = int(round((ev.dur + cfg.release) * sr))
        if ns <= 0:
            continue
        tt = np.arange(ns) / sr
        wave_part = _waveform(ev.freq * tt, cfg.waveform_for(ev.ch))
        env = np.minimum(tt / cfg.attack, 1.0) if cfg.attack > 0 else np.ones(ns)
        env = env * np.exp(-np.maximum(tt - cfg.attack, 0.0) / cfg.decay_tc)
        fade = np.clip(1.0 - (tt - ev.dur) / cfg.release, 0.0, 1.0)
        seg = ev.vel * wave_part * env * fade
        stop = min(start + ns, total)
        mix[start:stop] += seg[: stop - start]
    peak = np.max(np.abs(mix))
    if peak > 0:
        mix *= cfg.peak_target / peak
    return mix


def render_wav(score: Score, cfg: SynthConfig = SynthConfig()) -> bytes:
    """16-bit mono PCM WAV bytes; identical scores give identical bytes.

    Samples are rounded half away from zero and clamped to the int16 range.
    An empty score yields a valid zero-length file.
    """
    mix = render_samples(score, cfg)
    scaled = mix * 32767.0
    ints = np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)
    ints = np.clip(ints, -32768, 32767).astype("<i2")
    buf = io.BytesIO()
    with wave.open(buf, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(cfg.sample_rate)
        w.writeframes(ints.tobytes())
    return buf.getvalue()
