"""Command-line surface: curate, stats, split, evaluate, sweep, synth and
baseline, over the JSONL interchange formats.

Exit codes: 0 success, 1 usage error, 2 unreadable or malformed input.
Angles are degrees at this boundary and radians inside. PNR_THREADS caps
the curation worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io_jsonl as io
from .curation import curate_corpus, split, stats
from .errors import MalformedFile, MissingGaze, PnrError
from .gaze import DEFAULT_TAU, DEFAULT_WINDOW
from .metrics import (
    DEFAULT_N_FRAMES,
    DEFAULT_SIGMA,
    DEFAULT_THETA_DEG,
    EvalPair,
    MetricsConfig,
    evaluate,
    prime_success_sweep,
)
from .curation import DEFAULT_MIN_MOVEMENT, DEFAULT_PREPEND
from .motion import MotionSequence, resample
from .synth import ScenarioSpec, generate_corpus, static_baseline


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _workers() -> int | None:
    env = os.environ.get("PNR_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return None


def _fail_io(exc) -> int:
    print(f"error: {exc}", file=sys.stderr)
    return 2


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    print(text)


def cmd_curate(args) -> int:
    in_dir = Path(args.in_dir)
    if not in_dir.is_dir():
        return _fail_io(f"input directory not found: {in_dir}")
    recordings, errors = io.read_recordings_dir(in_dir)
    for exc in errors:
        print(f"error: {exc}", file=sys.stderr)
    if not recordings and not errors:
        print(f"warning: no recordings under {in_dir}", file=sys.stderr)
    seen = set()
    for rec in recordings:
        if rec.id in seen:
            return _fail_io(f"duplicate recording id {rec.id!r} in {in_dir}")
        seen.add(rec.id)
    results = curate_corpus(
        recordings,
        max_workers=_workers(),
        prepend=args.prepend,
        w=args.w,
        tau=args.tau,
        min_movement=args.min_movement,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for res in results:
        io.write_sequences_dir(res.sequences, out_dir)
    io.write_curation_log(results, out_dir / "curation_log.json")
    n_seq = sum(len(r.sequences) for r in results)
    n_drop = sum(len(r.drops) for r in results)
    print(f"curated {n_seq} sequences from {len(recordings)} recordings "
          f"({n_drop} events dropped)")
    return 2 if errors else 0


def cmd_stats(args) -> int:
    try:
        sequences = io.read_sequences_dir(args.in_dir)
    except (OSError, MalformedFile) as exc:
        return _fail_io(exc)
    if not sequences:
        return _fail_io(f"no sequences under {args.in_dir}")
    _emit(stats(sequences).to_dict(), args.out)
    return 0


def cmd_split(args) -> int:
    try:
        sequences = io.read_sequences_dir(args.in_dir)
    except (OSError, MalformedFile) as exc:
        return _fail_io(exc)
    if not sequences:
        return _fail_io(f"no sequences under {args.in_dir}")
    overrides = None
    if args.override:
        try:
            overrides = json.loads(Path(args.override).read_text(encoding="utf-8"))
        except OSError as exc:
            return _fail_io(exc)
    manifest = split(sequences, ratio=args.ratio, seed=args.seed,
                     video_overrides=overrides)
    _emit(manifest.to_dict(), args.out)
    return 0


def _paired(pred_dir, gt_dir, n):
    gt_seqs = io.read_sequences_dir(gt_dir)
    preds = {p.id: p for p in io.read_sequences_dir(pred_dir)}
    pairs = []
    missing = []
    for gt in gt_seqs:
        pred = preds.get(gt.id)
        if pred is None:
            missing.append(gt.id)
            continue
        if gt.motion.gaze is None:
            raise MissingGaze(f"{gt.id}: ground-truth sequence carries no gaze")
        gt_res = resample(gt.motion, n)
        pred_res = resample(pred.motion, n)
        aligned = MotionSequence(gt_res.fps, pred_res.joints)
        gaze = gt.motion.gaze[gt.prime_frame_index]
        pairs.append(EvalPair(
            id=gt.id,
            predicted=aligned,
            ground_truth=gt_res,
            prime_frame_index=int(round(gt.prime_frame_index * (n - 1)
                                        / (gt.motion.n_frames - 1))),
            goal_location=gt.goal_location,
            prime_gaze=gaze / np.linalg.norm(gaze),
        ))
    return pairs, missing


def cmd_evaluate(args) -> int:
    try:
        pairs, missing = _paired(args.pred, args.gt, args.n)
    except (OSError, MalformedFile, PnrError) as exc:
        return _fail_io(exc)
    for mid in missing:
        print(f"warning: no prediction for {mid}", file=sys.stderr)
    if not pairs:
        return _fail_io("no (prediction, ground truth) pairs to evaluate")
    config = MetricsConfig(theta_deg=args.theta, sigma=args.sigma, n_frames=args.n)
    report = evaluate(pairs, config)
    _emit(report.to_dict(), args.out)
    return 0


def _parse_thetas(text):
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3:
            raise ValueError("theta range must be start:stop:step")
        start, stop, step = parts
        return list(np.arange(start, stop + step * 0.5, step))
    return [float(x) for x in text.split(",")]


def cmd_sweep(args) -> int:
    try:
        thetas = _parse_thetas(args.thetas)
        sigmas = [float(x) for x in args.sigmas.split(",")]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        pairs, _ = _paired(args.pred, args.gt, args.n)
    except (OSError, MalformedFile, PnrError) as exc:
        return _fail_io(exc)
    if not pairs:
        return _fail_io("no (prediction, ground truth) pairs to sweep")
    grid = prime_success_sweep(pairs, thetas, sigmas)
    if args.out:
        io.write_sweep_csv(thetas, sigmas, grid, args.out)
    else:
        print("theta_deg,sigma_s,prime_success_pct")
        for k, sigma in enumerate(sigmas):
            for j, theta in enumerate(thetas):
                print(f"{theta},{sigma},{grid[k, j]!r}")
    return 0


def cmd_synth(args) -> int:
    try:
        payload = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    except OSError as exc:
        return _fail_io(exc)
    except json.JSONDecodeError as exc:
        return _fail_io(f"{args.spec}: {exc}")
    n_recordings = int(payload.pop("n_recordings", 1))
    prime_mode = payload.pop("prime_mode", "direct_hit")
    room = payload.pop("room", None)
    if room is not None:
        from .geometry import Aabb

        payload["room"] = Aabb(room["min"], room["max"])
    mixed = prime_mode == "mixed"
    if not mixed:
        payload["prime_mode"] = prime_mode
    try:
        base = ScenarioSpec(**payload)
    except (TypeError, ValueError) as exc:
        print(f"error: bad scenario spec: {exc}", file=sys.stderr)
        return 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus = generate_corpus(base, n_recordings, seed=args.seed, mixed_modes=mixed)
    for rec, labels in corpus:
        io.write_recording(rec, out_dir / f"{rec.id}{io.RECORDING_SUFFIX}")
        io.write_labels(labels, out_dir / f"{rec.id}.labels.json")
    print(f"wrote {len(corpus)} recordings to {out_dir}")
    return 0


def cmd_baseline(args) -> int:
    if args.kind != "static":
        print(f"error: unknown baseline {args.kind!r}", file=sys.stderr)
        return 1
    try:
        train = io.read_sequences_dir(args.train)
        gt_seqs = io.read_sequences_dir(args.gt)
    except (OSError, MalformedFile) as exc:
        return _fail_io(exc)
    if not train:
        return _fail_io(f"no training sequences under {args.train}")
    if not gt_seqs:
        return _fail_io(f"no ground-truth sequences under {args.gt}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for gt in gt_seqs:
        gt_res = resample(gt.motion, args.n)
        pred = static_baseline(train, n=args.n, fps=gt_res.fps)
        scale = (args.n - 1) / (gt.motion.n_frames - 1)
        seq = replace(gt, motion=pred, goal_pose=pred.joints[-1],
                      prime_frame_index=int(round(gt.prime_frame_index * scale)))
        io.write_sequence(seq, out_dir / f"{seq.id}{io.SEQUENCE_SUFFIX}")
    print(f"wrote {len(gt_seqs)} static predictions to {out_dir}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="pnr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curate", help="slice recordings into sequences")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", dest="out_dir", required=True)
    p.add_argument("--w", type=float, default=DEFAULT_WINDOW)
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.add_argument("--prepend", type=float, default=DEFAULT_PREPEND)
    p.add_argument("--min-movement", type=float, default=DEFAULT_MIN_MOVEMENT)
    p.set_defaults(func=cmd_curate)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("split", help="video-level train/test split")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--ratio", type=float, default=0.7)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--override", help="JSON file of video_id -> side")
    p.add_argument("--out")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("evaluate", help="score predictions against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--theta", type=float, default=DEFAULT_THETA_DEG)
    p.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    p.add_argument("--n", type=int, default=DEFAULT_N_FRAMES)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="prime-success threshold sweep")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--thetas", default="0:90:2", help="start:stop:step or comma list")
    p.add_argument("--sigmas", default="0,0.2,0.4,0.8,1.0")
    p.add_argument("--n", type=int, default=DEFAULT_N_FRAMES)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="generate synthetic recordings")
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("baseline", help="non-learned baseline predictions")
    p.add_argument("kind", choices=["static"])
    p.add_argument("--train", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=DEFAULT_N_FRAMES)
    p.set_defaults(func=cmd_baseline)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
