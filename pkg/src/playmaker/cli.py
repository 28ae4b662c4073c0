"""Command-line entry points.

engine run --config team.conf [--sim] [--headless] [--ticks N] [--kickoff]
engine sim --ticks 3000 --seed 0 [--record match.log] [--config team.conf]
engine replay match.log
"""

from __future__ import annotations

import argparse
import sys
import time
from collections import Counter

from .config import load_config
from .gateway import Gateway
from .runner import EngineRunner
from .sim import read_event_log, run_match
from .world import GamePhase


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", metavar="FILE", default=None,
                        help="key = value config file (defaults otherwise)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="engine",
                                     description="robot soccer team AI engine")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the live engine")
    _add_common(run)
    run.add_argument("--sim", action="store_true",
                     help="drive the internal simulator instead of UDP vision")
    run.add_argument("--headless", action="store_true",
                     help="no operator gateway")
    run.add_argument("--ticks", type=int, default=None,
                     help="stop after N ticks (default: run forever)")
    run.add_argument("--seed", type=int, default=0, help="simulator seed")
    run.add_argument("--ours", type=int, default=6, help="friendly robots (sim)")
    run.add_argument("--theirs", type=int, default=6, help="opponent robots (sim)")
    run.add_argument("--kickoff", action="store_true",
                     help="force-start play immediately (sim)")

    sim = sub.add_parser("sim", help="batch closed-loop match, as fast as possible")
    _add_common(sim)
    sim.add_argument("--ticks", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--ours", type=int, default=8)
    sim.add_argument("--theirs", type=int, default=8)
    sim.add_argument("--record", metavar="FILE", default=None,
                     help="write the event log here")

    replay = sub.add_parser("replay", help="print a recorded event log")
    replay.add_argument("log", metavar="FILE")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    runner = EngineRunner(config, mode="sim" if args.sim else "udp",
                          seed=args.seed, n_ours=args.ours, n_theirs=args.theirs,
                          dispatch=bool(config.endpoints), max_ticks=args.ticks)
    if args.sim and args.kickoff:
        runner.kickoff()
    elif args.sim:
        runner.engine.phase = GamePhase.STOP
    gateway = None
    if not args.headless:
        gateway = Gateway(runner.engine, runner.bus, runner=runner,
                          host="0.0.0.0", port=config.gateway_port,
                          token=config.gateway_token,
                          snapshot_hz=config.snapshot_hz,
                          static_dir=_frontend_dist())
        gateway.start()
        print(f"gateway listening on http://0.0.0.0:{gateway.bound_port}")
    if not args.sim:
        print(f"vision on udp:{config.vision_port}, referee on udp:{config.referee_port}")
    runner.start()
    try:
        while runner.is_alive():
            runner.join(timeout=0.5)
    except KeyboardInterrupt:
        print("stopping")
    finally:
        runner.stop()
        runner.join(timeout=5)
        if gateway is not None:
            gateway.stop()
    return 0


def _frontend_dist() -> str | None:
    from pathlib import Path

    dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return str(dist) if (dist / "index.html").exists() else None


def _cmd_sim(args) -> int:
    config = load_config(args.config)
    started = time.perf_counter()
    events = run_match(args.ticks, args.seed, config,
                       n_ours=args.ours, n_theirs=args.theirs, record=args.record)
    elapsed = time.perf_counter() - started
    counts = Counter(e.kind.value for e in events)
    print(f"{args.ticks} ticks in {elapsed:.1f}s (seed {args.seed})")
    for kind, count in sorted(counts.items()):
        print(f"  {kind}: {count}")
    if args.record:
        print(f"event log written to {args.record}")
    return 0


def _cmd_replay(args) -> int:
    for event in read_event_log(args.log):
        print(event.to_line())
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "sim": _cmd_sim, "replay": _cmd_replay}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
