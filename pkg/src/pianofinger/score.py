"""Monophonic scores and the plain-text score file format.

A score file is UTF-8 text.  The first meaningful line must be a
``first_finger=<1-5>`` header; every later line holds one note, written
either as a MIDI number (21..108) or as a scientific pitch name with
C4 = 60 (``C4``, ``F#2``, ``Bb5``).  A comma-separated duration token may
follow the pitch and is accepted but ignored.  ``#`` starts a comment and
blank lines are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass

PITCH_MIN = 21   # A0
PITCH_MAX = 108  # C8
FINGERS = (1, 2, 3, 4, 5)


class ScoreError(ValueError):
    """Base class for invalid scores and score files."""


class HeaderError(ScoreError):
    """Missing or malformed ``first_finger`` header."""


class ScoreParseError(ScoreError):
    """Malformed note line; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class PitchRangeError(ScoreError):
    """Pitch outside the piano range [21, 108]."""


class ScoreSizeError(ScoreError):
    """A score length constraint was violated."""


_LETTER_SEMITONE = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}


def pitch_from_name(name: str) -> int:
    """MIDI number for a scientific pitch name (C4 = 60).

    Accepts ``#``/``b`` accidentals (stackable) and any integer octave;
    raises ScoreError for anything else.  Range is not checked here.
    """
    text = name.strip()
    if not text:
        raise ScoreError("empty pitch name")
    letter = text[0].upper()
    if letter not in _LETTER_SEMITONE:
        raise ScoreError(f"unknown pitch letter {text[0]!r}")
    semitone = _LETTER_SEMITONE[letter]
    rest = text[1:]
    while rest[:1] in ("#", "b"):
        semitone += 1 if rest[0] == "#" else -1
        rest = rest[1:]
    try:
        octave = int(rest)
    except ValueError:
        raise ScoreError(f"bad octave in pitch name {name!r}") from None
    return semitone + 12 * (octave + 1)


@dataclass(frozen=True)
class Note:
    """One note; only the pitch matters for fingering."""

    pitch: int

    def __post_init__(self):
        if not PITCH_MIN <= self.pitch <= PITCH_MAX:
            raise PitchRangeError(
                f"pitch {self.pitch} outside piano range [{PITCH_MIN}, {PITCH_MAX}]"
            )


@dataclass(frozen=True)
class Score:
    """A monophonic note sequence plus the finger that plays its first note."""

    notes: tuple[Note, ...]
    first_finger: int
    name: str = "score"

    def __post_init__(self):
        object.__setattr__(self, "notes", tuple(self.notes))
        if len(self.notes) < 2:
            raise ScoreSizeError(f"score needs at least 2 notes, got {len(self.notes)}")
        if self.first_finger not in FINGERS:
            raise HeaderError(f"first_finger must be in 1..5, got {self.first_finger}")

    @classmethod
    def from_pitches(cls, pitches, first_finger: int, name: str = "score") -> "Score":
        return cls(tuple(Note(int(p)) for p in pitches), first_finger, name)

    @property
    def pitches(self) -> tuple[int, ...]:
        return tuple(n.pitch for n in self.notes)

    def __len__(self) -> int:
        return len(self.notes)


@dataclass(frozen=True)
class MelodicRange:
    """Closed pitch interval [min_pitch, max_pitch]."""

    min_pitch: int
    max_pitch: int

    def __post_init__(self):
        if self.min_pitch > self.max_pitch:
            raise ScoreError(f"empty range [{self.min_pitch}, {self.max_pitch}]")

    @property
    def size(self) -> int:
        return self.max_pitch - self.min_pitch + 1


def parse_score(text: str, name: str = "score") -> Score:
    """Parse the score file format described in the module docstring."""
    header_finger = None
    notes: list[Note] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header_finger is None:
            key, sep, value = line.partition("=")
            if not sep or key.strip() != "first_finger":
                raise HeaderError(
                    f"line {line_no}: expected a first_finger=<1-5> header, got {line!r}"
                )
            try:
                header_finger = int(value.strip())
            except ValueError:
                raise HeaderError(
                    f"line {line_no}: first_finger is not an integer: {value.strip()!r}"
                ) from None
            if header_finger not in FINGERS:
                raise HeaderError(
                    f"line {line_no}: first_finger must be in 1..5, got {header_finger}"
                )
            continue
        token, _, duration = line.partition(",")
        token = token.strip()
        duration = duration.strip()
        if duration:
            try:
                float(duration)
            except ValueError:
                raise ScoreParseError(line_no, f"bad duration token {duration!r}") from None
        try:
            pitch = int(token)
        except ValueError:
            try:
                pitch = pitch_from_name(token)
            except ValueError as exc:
                raise ScoreParseError(line_no, f"bad note token {token!r} ({exc})") from None
        if not PITCH_MIN <= pitch <= PITCH_MAX:
            raise PitchRangeError(
                f"line {line_no}: pitch {pitch} outside piano range [{PITCH_MIN}, {PITCH_MAX}]"
            )
        notes.append(Note(pitch))
    if header_finger is None:
        raise HeaderError("missing first_finger=<1-5> header")
    if len(notes) < 2:
        raise ScoreSizeError(f"score needs at least 2 notes, got {len(notes)}")
    return Score(tuple(notes), header_finger, name)


def serialize_score(score: Score) -> str:
    """Canonical text form: header line, then one MIDI number per line."""
    lines = [f"first_finger={score.first_finger}"]
    lines.extend(str(p) for p in score.pitches)
    return "\n".join(lines) + "\n"


def melodic_range(score: Score) -> MelodicRange:
    pitches = score.pitches
    return MelodicRange(min(pitches), max(pitches))


def mirror_for_left_hand(score: Score, axis_pitch: int) -> Score:
    """Reflect every pitch about ``axis_pitch`` (p -> 2*axis - p).

    Interval sizes are preserved with directions flipped, which maps a
    right-hand exercise onto the symmetric left-hand one.  Order, name and
    first_finger are kept.
    """
    mirrored = []
    for p in score.pitches:
        q = 2 * axis_pitch - p
        if not PITCH_MIN <= q <= PITCH_MAX:
            raise PitchRangeError(
                f"mirrored pitch {q} (from {p} about axis {axis_pitch}) "
                f"outside piano range [{PITCH_MIN}, {PITCH_MAX}]"
            )
        mirrored.append(q)
    return Score.from_pitches(mirrored, score.first_finger, score.name)
