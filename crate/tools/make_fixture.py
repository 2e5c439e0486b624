"""Writes the small ground-truth scenes and prediction dump used by the
golden-report test (crates/core/tests/fixtures/mini)."""

import math
import os
import random
import sys

ROOT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "tests", "fixtures", "mini")
OBS, PRED = 8, 12
K = 3


def recording(rng, n_frames, agents):
    """agents: list of (id, first_frame_idx, last_frame_idx, gaps)."""
    rows = []
    for aid, first, last, gaps in agents:
        x0, y0 = rng.uniform(0, 10), rng.uniform(0, 8)
        vx, vy = rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)
        curve = rng.uniform(-0.03, 0.03)
        for i in range(first, min(last, n_frames - 1) + 1):
            if i in gaps:
                continue
            x = x0 + vx * i + curve * i * i
            y = y0 + vy * i - curve * i * i * 0.5
            rows.append((10 * i, aid, round(x, 3), round(y, 3)))
    rows.sort()
    return rows


def write_gt(path, rows):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        for frame, aid, x, y in rows:
            f.write(f"{frame}.0\t{aid}.0\t{x}\t{y}\n")


def windows(rows, name):
    by_frame = {}
    for frame, aid, x, y in rows:
        by_frame.setdefault(frame, {})[aid] = (x, y)
    frames = sorted(by_frame)
    out = []
    for s in range(0, len(frames) - OBS - PRED + 1):
        win = frames[s:s + OBS + PRED]
        ids = sorted(a for a in by_frame[win[0]] if all(a in by_frame[f] for f in win))
        if ids:
            fut = {a: [by_frame[f][a] for f in win[OBS:]] for a in ids}
            out.append((f"{name}:{win[0]}", ids, fut))
    return out


def main():
    rng = random.Random(7)
    recs = {
        os.path.join("plaza", "plaza_a.txt"): recording(rng, 26, [(1, 0, 25, ()), (2, 0, 25, ()), (3, 2, 25, ()), (4, 0, 22, {9})]),
        os.path.join("plaza", "plaza_b.txt"): recording(rng, 23, [(5, 0, 22, ()), (6, 1, 22, ())]),
        "corridor.txt": recording(rng, 24, [(1, 0, 23, ()), (2, 0, 23, ()), (7, 0, 12, ())]),
    }
    # a companion walking 0.25 m beside agent 2, close enough for noisy
    # samples to clip it
    corridor = recs["corridor.txt"]
    corridor += [(f, 3, round(x + 0.05, 3), round(y + 0.25, 3)) for f, a, x, y in corridor if a == 2]
    corridor.sort()
    seqs = []
    for rel, rows in sorted(recs.items()):
        write_gt(os.path.join(ROOT, rel), rows)
        seqs.extend(windows(rows, os.path.splitext(os.path.basename(rel))[0]))

    lines = [f"#trajeval-pred v1 K={K} T={PRED}"]
    for idx, (sid, ids, fut) in enumerate(sorted(seqs)):
        if idx == 3:
            continue  # one sequence deliberately left without predictions
        for k in range(K):
            tracks = {}
            for a in ids:
                scale = 0.05 + 0.3 * ((k + a + idx) % K)
                tracks[a] = [(x + rng.gauss(0, scale), y + rng.gauss(0, scale)) for x, y in fut[a]]
            if k == idx % K and len(ids) >= 2:
                a, b = ids[0], ids[1]
                tracks[b] = [(x + 0.15 * math.cos(t), y + 0.1) for t, (x, y) in enumerate(tracks[a])]
            for a in ids:
                for t, (x, y) in enumerate(tracks[a]):
                    lines.append(f"{sid}\t{k}\t{a}\t{t + 1}\t{x:.4f}\t{y:.4f}")
    with open(os.path.join(ROOT, "..", "mini_pred.txt"), "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"{len(seqs)} sequences", file=sys.stderr)


if __name__ == "__main__":
    main()
