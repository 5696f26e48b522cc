#!/usr/bin/env python3
"""Regenerates the bundled test corpora. Output is deterministic."""

import json
import random
import struct
from pathlib import Path

HERE = Path(__file__).resolve().parent
TPQ = 480
SIXTEENTH = TPQ // 4
MAJOR = [0, 2, 4, 5, 7, 9, 11]

# Measure rhythms as (slot, duration) pairs in sixteenths.
RHYTHMS = [
    [(0, 4), (4, 4), (8, 4), (12, 4)],
    [(0, 8), (8, 8)],
    [(0, 6), (6, 2), (8, 8)],
    [(0, 4), (4, 2), (6, 2), (8, 4), (12, 4)],
    [(0, 2), (2, 2), (4, 4), (8, 6), (14, 2)],
    [(0, 12), (12, 4)],
    [(0, 3), (3, 1), (4, 4), (8, 3), (11, 1), (12, 4)],
    [(0, 4), (8, 4), (12, 2), (14, 2)],
]


def vlq(n):
    out = [n & 0x7F]
    n >>= 7
    while n:
        out.append((n & 0x7F) | 0x80)
        n >>= 7
    return bytes(reversed(out))


def track(events):
    """events: (tick, bytes) sorted by tick."""
    data = b""
    last = 0
    for tick, payload in sorted(events, key=lambda e: (e[0], e[1][0] & 0xF0 != 0x80)):
        data += vlq(tick - last) + payload
        last = tick
    data += vlq(0) + b"\xff\x2f\x00"
    return b"MTrk" + struct.pack(">I", len(data)) + data


def meta(kind, payload):
    return bytes([0xFF, kind]) + vlq(len(payload)) + payload


def write_midi(path, melody, tonic_fifths=None, numerator=4, melody_name="MELODY", accompaniment=None):
    conductor = [(0, meta(0x51, b"\x07\xa1\x20")), (0, meta(0x58, bytes([numerator, 2, 24, 8])))]
    if tonic_fifths is not None:
        conductor.append((0, meta(0x59, struct.pack("bB", tonic_fifths, 0))))
    tracks = [track(conductor)]
    for name, notes in ((melody_name, melody), ("PIANO", accompaniment or [])):
        events = [(0, meta(0x03, name.encode()))] if name else []
        for onset, dur, pitch in notes:
            events.append((onset * SIXTEENTH, bytes([0x90, pitch, 90])))
            events.append(((onset + dur) * SIXTEENTH, bytes([0x80, pitch, 0])))
        if notes or name:
            tracks.append(track(events))
    header = b"MThd" + struct.pack(">IHHH", 6, 1, len(tracks), TPQ)
    path.write_bytes(header + b"".join(tracks))


def phrase(rng, tonic, measures):
    notes = []
    degree = rng.randrange(7)
    for m in range(measures):
        for slot, dur in rng.choice(RHYTHMS):
            degree = max(0, min(13, degree + rng.choice([-2, -1, -1, 0, 1, 1, 2])))
            pitch = 60 + tonic + 12 * (degree // 7) + MAJOR[degree % 7]
            notes.append([m * 16 + slot, dur, pitch])
    return notes


def vary(rng, notes):
    """Changes one pitch by a step."""
    out = [list(n) for n in notes]
    i = rng.randrange(len(out))
    out[i][2] += rng.choice([-2, 2])
    return out


def build_song(rng, tonic, form):
    """form: list of (letter, measures, vary) with letter None for silence."""
    contents = {}
    notes, labels, cursor = [], "", 0
    for letter, measures, varied in form:
        if letter is None:
            labels += "i" if cursor == 0 else "x"
            labels += str(measures)
        else:
            if letter not in contents:
                contents[letter] = phrase(rng, tonic, measures)
            body = vary(rng, contents[letter]) if varied else contents[letter]
            notes += [[o + cursor * 16, d, p] for o, d, p in body]
            labels += letter + str(measures)
        cursor += measures
    return notes, labels, cursor


FORMS = [
    [(None, 2, False), ("A", 8, False), ("B", 8, False), ("A", 8, True), ("B", 8, False)],
    [("A", 4, False), ("A", 4, False), ("B", 8, False), ("A", 4, False), ("C", 4, False), ("B", 8, True)],
    [("A", 8, False), ("B", 4, False), ("A", 8, False), ("B", 4, False), ("C", 8, False), ("A", 8, False)],
    [(None, 1, False), ("A", 8, False), ("A", 8, True), ("B", 8, False), ("B", 8, False), ("A", 8, False)],
    [("A", 4, False), ("B", 4, False), ("A", 4, False), ("B", 4, False), ("C", 8, False), ("C", 8, False)],
]

FIFTHS = {0: 0, 7: 1, 2: 2, 9: 3, 4: 4, 11: 5, 5: -1, 10: -2, 3: -3, 8: -4, 1: -5, 6: -6}


def musicxml(notes, num_measures, tonic):
    parts = []
    for m in range(num_measures):
        body = []
        if m == 0:
            body.append(f"<attributes><divisions>4</divisions><key><fifths>{FIFTHS[tonic]}</fifths>"
                        "<mode>major</mode></key><time><beats>4</beats><beat-type>4</beat-type></time></attributes>")
        cursor = m * 16
        for onset, dur, pitch in [n for n in notes if m * 16 <= n[0] < (m + 1) * 16]:
            if onset > cursor:
                body.append(f"<note><rest/><duration>{onset - cursor}</duration></note>")
            names = ["C", "C", "D", "D", "E", "F", "F", "G", "G", "A", "A", "B"]
            alter = "<alter>1</alter>" if pitch % 12 in (1, 3, 6, 8, 10) else ""
            body.append(f"<note><pitch><step>{names[pitch % 12]}</step>{alter}<octave>{pitch // 12 - 1}</octave>"
                        f"</pitch><duration>{dur}</duration></note>")
            cursor = onset + dur
        if cursor < (m + 1) * 16:
            body.append(f"<note><rest/><duration>{(m + 1) * 16 - cursor}</duration></note>")
        parts.append(f'<measure number="{m + 1}">' + "".join(body) + "</measure>")
    return ('<?xml version="1.0" encoding="UTF-8"?>\n<score-partwise version="3.1"><part-list>'
            '<score-part id="P1"><part-name>Melody</part-name></score-part></part-list><part id="P1">'
            + "".join(parts) + "</part></score-partwise>\n")


def synthetic10():
    out = HERE / "synthetic10"
    out.mkdir(exist_ok=True)
    rng = random.Random(909)
    files, labels = [], []
    for i in range(10):
        sid = f"song{i:02d}"
        tonic = rng.choice(sorted(FIFTHS))
        notes, label, measures = build_song(rng, tonic, FORMS[i % len(FORMS)])
        if i == 8:
            (out / f"{sid}.musicxml").write_text(musicxml(notes, measures, tonic))
            files.append({"path": f"{sid}.musicxml", "format": "musicxml"})
        elif i == 9:
            song = {"id": sid, "tonic_pc": tonic, "mode": "major", "num_measures": measures, "notes": notes}
            (out / f"{sid}.json").write_text(json.dumps(song) + "\n")
            files.append({"path": f"{sid}.json", "format": "song-json"})
        else:
            accompaniment = [[m * 16, 16, 36 + tonic] for m in range(measures) if m % 2 == 0]
            write_midi(out / f"{sid}.mid", notes, FIFTHS[tonic] if i % 2 == 0 else None,
                       melody_name="MELODY" if i != 3 else "", accompaniment=accompaniment)
            files.append(f"{sid}.mid")
        if i % 2 == 0:
            labels.append(f"{sid}\t{label}")
    (out / "labels.tsv").write_text("# song id<TAB>structure labels\n" + "\n".join(labels) + "\n")
    manifest = {"corpus_id": "synthetic10", "labels": "labels.tsv", "files": files}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def song_json_corpus(name, seed, make_phrase, form_label):
    out = HERE / name
    out.mkdir(exist_ok=True)
    rng = random.Random(seed)
    labels = []
    for i in range(6):
        sid = f"{name}{i:02d}"
        notes = []
        for p in range(4):
            notes += [[o + p * 128, d, pitch] for o, d, pitch in make_phrase(rng, p)]
        song = {"id": sid, "tonic_pc": 0, "mode": "major", "num_measures": 32, "notes": notes}
        (out / f"{sid}.json").write_text(json.dumps(song) + "\n")
        labels.append(f"{sid}\t{form_label}")
    (out / "labels.tsv").write_text("\n".join(labels) + "\n")


def repetitive_phrase(rng, index):
    # One half-note figure repeated through the whole 8-measure phrase.
    pitch = 60 + MAJOR[index % 7]
    return [[h * 8 + s, d, pitch] for h in range(16) for s, d in ((0, 4), (4, 4))]


def random_phrase(rng, index):
    notes, t = [], 0
    while t < 128:
        dur = rng.choice([1, 2, 3, 4])
        dur = min(dur, 128 - t)
        notes.append([t, dur, 60 + rng.randrange(24)])
        t += dur
    return notes


def ingest_mixed():
    out = HERE / "ingest_mixed"
    out.mkdir(exist_ok=True)
    rng = random.Random(3)
    for name, numerator in (("valid_a", 4), ("valid_b", 4), ("waltz", 3)):
        write_midi(out / f"{name}.mid", phrase(rng, 0, 4), 0, numerator=numerator)
    (out / "corrupt.mid").write_bytes(b"MThd\x00\x00\x00\x06\x00\x01\x00\x02\x01\xe0MTrk\x00\x00\x10\x00\x00\x90")
    manifest = {"corpus_id": "mixed", "files": ["valid_a.mid", "valid_b.mid", "waltz.mid", "corrupt.mid"]}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    synthetic10()
    song_json_corpus("repetitive", 1, repetitive_phrase, "A8B8C8D8")
    song_json_corpus("random", 2, random_phrase, "X8Y8Z8X8")
    ingest_mixed()
