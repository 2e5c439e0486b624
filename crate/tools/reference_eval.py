"""Brute-force reference evaluator used to produce the committed golden
reports. Deliberately written with plain loops and a different segment
distance algorithm from the library, so the two can check each other.

usage: python3 tools/reference_eval.py GT_DIR PRED_FILE OUT_JSON
"""

import json
import math
import os
import sys

OBS, PRED, RADIUS, H_FLOOR = 8, 12, 0.1, 1e-3


def read_gt(root):
    scenes = {}
    for entry in sorted(os.listdir(root)):
        path = os.path.join(root, entry)
        if os.path.isdir(path):
            sub = os.path.join(path, "test") if os.path.isdir(os.path.join(path, "test")) else path
            files = sorted(os.path.join(sub, f) for f in os.listdir(sub) if f.endswith(".txt"))
            if files:
                scenes[entry] = files
        elif entry.endswith(".txt"):
            scenes[entry[:-4]] = [path]
    return scenes


def load_recording(path):
    by_frame = {}
    with open(path) as f:
        for line in f:
            tok = line.split()
            if len(tok) < 4:
                continue
            frame, aid = int(float(tok[0])), int(float(tok[1]))
            by_frame.setdefault(frame, {})[aid] = (float(tok[2]), float(tok[3]))
    return by_frame


def sequences(root):
    out = []
    for scene, files in read_gt(root).items():
        for path in files:
            rec = os.path.splitext(os.path.basename(path))[0]
            by_frame = load_recording(path)
            frames = sorted(by_frame)
            for s in range(len(frames) - OBS - PRED + 1):
                win = frames[s:s + OBS + PRED]
                ids = []
                for a in sorted(by_frame[win[0]]):
                    if all(a in by_frame[fr] for fr in win):
                        ids.append(a)
                if not ids:
                    continue
                fut = [[by_frame[fr][a] for fr in win[OBS:]] for a in ids]
                out.append({"id": f"{rec}:{win[0]}", "scene": scene, "ids": ids, "fut": fut})
    return out


def read_pred(path):
    preds = {}
    with open(path) as f:
        header = f.readline().split()
        k_total = int(header[2].split("=")[1])
        for line in f:
            if not line.strip():
                continue
            sid, k, aid, t, x, y = line.rstrip("\n").split("\t")
            preds.setdefault(sid, {})[(int(k), int(aid), int(t))] = (float(x), float(y))
    return k_total, preds


def dist(p, q):
    return math.hypot(p[0] - q[0], p[1] - q[1])


def seg_dist(p0, p1, q0, q1):
    """min over (s, u) in [0,1]^2 of |p0 + s a - q0 - u b| by checking the
    interior stationary point and the minimum along each edge."""
    ax, ay = p1[0] - p0[0], p1[1] - p0[1]
    bx, by = q1[0] - q0[0], q1[1] - q0[1]
    dx, dy = p0[0] - q0[0], p0[1] - q0[1]

    def f(s, u):
        return math.hypot(dx + s * ax - u * bx, dy + s * ay - u * by)

    def clamp(v):
        return min(1.0, max(0.0, v))

    aa, bb, ab = ax * ax + ay * ay, bx * bx + by * by, ax * bx + ay * by
    da, db = dx * ax + dy * ay, dx * bx + dy * by
    cands = []
    det = aa * bb - ab * ab
    if det > 1e-14 * max(aa * bb, 1e-300):
        s = (ab * db - bb * da) / det
        u = (aa * db - ab * da) / det
        if 0 <= s <= 1 and 0 <= u <= 1:
            cands.append(f(s, u))
    for s in (0.0, 1.0):
        u = clamp((db + s * ab) / bb) if bb > 0 else 0.0
        cands.append(f(s, u))
    for u in (0.0, 1.0):
        s = clamp((u * ab - da) / aa) if aa > 0 else 0.0
        cands.append(f(s, u))
    return min(cands)


def collides(ta, tb):
    if len(ta) == 1:
        return dist(ta[0], tb[0]) < 2 * RADIUS
    for t in range(len(ta) - 1):
        if seg_dist(ta[t], ta[t + 1], tb[t], tb[t + 1]) < 2 * RADIUS:
            return True
    return False


def collision_fraction(tracks):
    n = len(tracks)
    hit = 0
    for i in range(n):
        if any(j != i and collides(tracks[i], tracks[j]) for j in range(n)):
            hit += 1
    return hit / n


def kde_nll(samples, fut):
    k_total, n_agents = len(samples), len(fut)
    total = 0.0
    for n in range(n_agents):
        for t in range(PRED):
            pts = [samples[k][n][t] for k in range(k_total)]
            mx = sum(p[0] for p in pts) / k_total
            my = sum(p[1] for p in pts) / k_total
            var = sum((p[0] - mx) ** 2 + (p[1] - my) ** 2 for p in pts) / (2 * (k_total - 1))
            h = max(math.sqrt(var) * k_total ** (-1.0 / 6.0), H_FLOOR)
            logs = [-((p[0] - fut[n][t][0]) ** 2 + (p[1] - fut[n][t][1]) ** 2) / (2 * h * h) for p in pts]
            m = max(logs)
            dens = math.log(sum(math.exp(v - m) for v in logs)) + m - math.log(k_total) - math.log(2 * math.pi * h * h)
            total -= dens
    return total / (n_agents * PRED)


def score(seq, raw, k_total):
    ids, fut = seq["ids"], seq["fut"]
    n_agents = len(ids)
    samples = [[[raw[(k, a, t + 1)] for t in range(PRED)] for a in ids] for k in range(k_total)]
    err = [[[dist(samples[k][n][t], fut[n][t]) for t in range(PRED)] for n in range(n_agents)] for k in range(k_total)]
    ade = sum(min(sum(err[k][n]) / PRED for k in range(k_total)) for n in range(n_agents)) / n_agents
    fde = sum(min(err[k][n][-1] for k in range(k_total)) for n in range(n_agents)) / n_agents
    best_j, best_k = None, None
    for k in range(k_total):
        v = sum(sum(err[k][n]) for n in range(n_agents)) / (n_agents * PRED)
        if best_j is None or v < best_j:
            best_j, best_k = v, k
    jfde = min(sum(err[k][n][-1] for n in range(n_agents)) / n_agents for k in range(k_total))
    crs = [collision_fraction(samples[k]) for k in range(k_total)]
    return {
        "ade": ade,
        "fde": fde,
        "jade": best_j,
        "jfde": jfde,
        "cr_mean": sum(crs) / k_total,
        "cr_jade": crs[best_k],
        "nll": kde_nll(samples, fut),
    }


def aggregate(rows, weighting):
    names = list(rows[0]["metrics"])
    per_scene = {}
    for r in rows:
        per_scene.setdefault(r["scene"], []).append(r)
    scenes = {}
    for scene, rs in sorted(per_scene.items()):
        w = [1.0 if weighting == "per_sequence" else float(r["n"]) for r in rs]
        scenes[scene] = {m: sum(wi * r["metrics"][m] for wi, r in zip(w, rs)) / sum(w) for m in names}
    if weighting == "per_sequence":
        overall = {m: sum(s[m] for s in scenes.values()) / len(scenes) for m in names}
    else:
        tot = float(sum(r["n"] for r in rows))
        overall = {m: sum(r["n"] * r["metrics"][m] for r in rows) / tot for m in names}
    return {"per_scene": scenes, "overall": overall}


def main():
    gt_dir, pred_path, out_path = sys.argv[1:4]
    k_total, preds = read_pred(pred_path)
    rows, missing = [], []
    for seq in sequences(gt_dir):
        if seq["id"] not in preds:
            missing.append(seq["id"])
            continue
        rows.append({"id": seq["id"], "scene": seq["scene"], "n": len(seq["ids"]),
                     "metrics": score(seq, preds[seq["id"]], k_total)})
    golden = {
        "num_samples": k_total,
        "missing": missing,
        "sequences": {r["id"]: r["metrics"] for r in rows},
        "per_sequence": aggregate(rows, "per_sequence"),
        "per_agent": aggregate(rows, "per_agent"),
    }
    with open(out_path, "w") as f:
        json.dump(golden, f, indent=2, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
