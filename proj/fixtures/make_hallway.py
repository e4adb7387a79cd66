#!/usr/bin/env python3
"""Writes hallway.pomdp: a 12-cell corridor with four one-cell alcoves to the
south, the goal in the third alcove. 15 non-goal cells x 4 headings plus one
goal state; observations are a start marker, 16 relative wall patterns, one
landmark per non-goal alcove, a corridor-end landmark and the goal."""

import itertools
import sys

WIDTH = 12
ALCOVES = [1, 4, 7, 10]
GOAL = (7, 1)
HEADINGS = "NESW"
STEP = {"N": (0, -1), "E": (1, 0), "S": (0, 1), "W": (-1, 0)}
SENSOR = 0.9
LANDMARK = 0.8


def cells():
    out = [(x, 0) for x in range(WIDTH)]
    out += [(x, 1) for x in ALCOVES if (x, 1) != GOAL]
    return out


CELLS = cells()


def is_open(c):
    return c in CELLS or c == GOAL


def turn(h, k):
    return HEADINGS[(HEADINGS.index(h) + k) % 4]


def name(c, h):
    return f"x{c[0]}y{c[1]}{h}"


STATES = [name(c, h) for c in CELLS for h in HEADINGS] + ["goal"]
ACTIONS = ["forward", "left", "right", "around", "noop"]
PATTERNS = ["".join(bits) for bits in itertools.product("01", repeat=4)]  # L F R B
LANDMARKS = {(1, 1): "alcove1", (4, 1): "alcove4", (10, 1): "alcove10", (0, 0): "west_end"}
OBS = ["start"] + ["walls" + p for p in PATTERNS] + sorted(set(LANDMARKS.values())) + ["goal"]


def moved(c, h, d):
    """Cell reached moving from c in heading d; None if blocked."""
    dx, dy = STEP[d]
    n = (c[0] + dx, c[1] + dy)
    return n if is_open(n) else None


def target(c, h):
    return "goal" if c == GOAL else name(c, h)


def forward_row(c, h):
    row = {}

    def add(s, p):
        row[s] = row.get(s, 0.0) + p

    for d, new_h, p in [
        (h, h, 0.8),
        (turn(h, -1), turn(h, -1), 0.05),
        (turn(h, 1), turn(h, 1), 0.05),
        (turn(h, 2), h, 0.025),
        (turn(h, 2), turn(h, 2), 0.025),
    ]:
        n = moved(c, h, d)
        add(target(n, new_h) if n else name(c, h), p)
    add(name(c, h), 0.05)
    return row


def turn_row(c, h, k):
    if k == 2:
        outcomes = [(2, 0.6), (0, 0.1), (-1, 0.15), (1, 0.15)]
    else:
        outcomes = [(k, 0.7)] + [(j, 0.1) for j in (0, 1, 2, 3) if j % 4 != k % 4]
    row = {}
    for j, p in outcomes:
        s = name(c, turn(h, j))
        row[s] = row.get(s, 0.0) + p
    return row


def obs_row(c, h):
    walls = [moved(c, h, turn(h, k)) is None for k in (-1, 0, 1, 2)]
    row = {}
    scale = 1.0 - LANDMARK if c in LANDMARKS else 1.0
    for pat in PATTERNS:
        p = scale
        for bit, wall in zip(pat, walls):
            p *= SENSOR if (bit == "1") == wall else 1.0 - SENSOR
        row["walls" + pat] = p
    if c in LANDMARKS:
        row[LANDMARKS[c]] = LANDMARK
    return row


def main(out):
    w = out.write
    w("# Hallway reconstruction; targets: goal. Costs are direct.\n")
    w("discount: 1.0\nvalues: cost\n")
    w("states: " + " ".join(STATES) + "\n")
    w("actions: " + " ".join(ACTIONS) + "\n")
    w("observations: " + " ".join(OBS) + "\n")
    n = len(STATES) - 1
    w("start: " + " ".join(f"{1.0 / n:.17g}" for _ in range(n)) + " 0\n\n")
    for c in CELLS:
        for h in HEADINGS:
            s = name(c, h)
            rows = {
                "forward": forward_row(c, h),
                "left": turn_row(c, h, -1),
                "right": turn_row(c, h, 1),
                "around": turn_row(c, h, 2),
                "noop": {s: 1.0},
            }
            for a, row in rows.items():
                for t, p in sorted(row.items()):
                    w(f"T: {a} : {s} : {t} {p:.17g}\n")
    w("T: * : goal : goal 1\n\n")
    for c in CELLS:
        for h in HEADINGS:
            for z, p in sorted(obs_row(c, h).items()):
                if p > 0:
                    w(f"O: * : {name(c, h)} : {z} {p:.17g}\n")
    w("O: * : goal : goal 1\n\n")
    w("R: * : * : * : * 1\n")


if __name__ == "__main__":
    with open(sys.argv[1] if len(sys.argv) > 1 else "hallway.pomdp", "w") as f:
        main(f)
