"""Command-line entry points.

    telehead avatar run [--config F] [--port N]
    telehead operator run [--config F] [--port N] [--offline] [--console]
                          [--scenario F] [--expressions F] [--duration S]
    telehead scenario play FILE [--offline|--virtual-clock] [--record OUT]
    telehead record OUT [--scenario F|NAME]
    telehead replay IN
    telehead sweep-audio [--scenario F] [--out F]
    telehead fit-mapping SAMPLES [--out F]
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from .config import load_config, save_config
from .expression import fit_mapping, load_calibration_samples
from .perception import format_sweep_table, sweep_positions
from .services.daemons import AvatarDaemon, LiveSession, OperatorDaemon
from .services.operator import ExpressionStream
from .services.runtime import OfflineSession, verify_replay
from .services.scenario import load_scenario, packaged_scenario


def _load_events(spec: str | None, default: str | None = None):
    if spec is None:
        return packaged_scenario(default) if default else []
    try:
        return load_scenario(spec)
    except FileNotFoundError:
        return packaged_scenario(spec)


def _config_from(args) -> dict:
    config = load_config(args.config)
    if getattr(args, "port", None):
        config["bus"]["port"] = args.port
    return config


def _wait_forever(stop_callback) -> None:
    try:
        while True:
            time.sleep(0.5)
    except KeyboardInterrupt:
        print("shutting down")
        stop_callback()


def cmd_avatar_run(args) -> int:
    daemon = AvatarDaemon(_config_from(args))
    daemon.start()
    print(f"avatar daemon on {daemon.server.address[0]}:{daemon.port}")
    _wait_forever(daemon.stop)
    return 0


def cmd_operator_run(args) -> int:
    config = _config_from(args)
    scenario = _load_events(args.scenario) if args.scenario else []
    if args.offline:
        session = LiveSession(config, scenario, console=args.console, loop_scenario=args.loop)
        if args.expressions:
            session.operator.expressions = ExpressionStream.load(args.expressions)
        session.start()
        if session.console_port:
            print(f"console bridge on ws://{config['console']['host']}:{session.console_port}/ws")
        print("offline loopback session running (avatar + operator in-process)")
        if args.duration:
            time.sleep(args.duration)
            session.stop()
        else:
            _wait_forever(session.stop)
        return 0
    expressions = ExpressionStream.load(args.expressions) if args.expressions else None
    daemon = OperatorDaemon(config, scenario, console=args.console)
    if expressions is not None:
        daemon.operator.expressions = expressions
    daemon.start()
    print(f"operator daemon connected to {config['bus']['host']}:{config['bus']['port']}")
    if args.duration:
        time.sleep(args.duration)
        daemon.stop()
    else:
        _wait_forever(daemon.stop)
    return 0


def cmd_scenario_play(args) -> int:
    config = _config_from(args)
    events = _load_events(args.file)
    if args.virtual_clock or args.offline:
        session = OfflineSession(config, events, record_path=args.record)
        result = session.run()
        print(f"scenario complete: {result.cycles} cycles, "
              f"{len(result.joint_states)} joint-state messages")
        if args.record:
            print(f"session recorded to {args.record}")
        return 0
    live = LiveSession(config, events)
    from .services.scenario import scenario_end_time

    live.run_for(scenario_end_time(events) + 1.0)
    print("scenario complete (live pacing)")
    return 0


def cmd_record(args) -> int:
    config = _config_from(args)
    events = _load_events(args.scenario, default="greeting")
    session = OfflineSession(config, events, record_path=args.out)
    result = session.run()
    print(f"recorded {result.cycles} cycles to {args.out}")
    return 0


def cmd_replay(args) -> int:
    config = _config_from(args)
    identical, compared, mismatches = verify_replay(args.infile, config)
    print(f"replayed {compared} joint-state messages: "
          f"{'bit-identical' if identical else f'{mismatches} mismatches'}")
    return 0 if identical else 1


def cmd_sweep_audio(args) -> int:
    kwargs = {}
    if args.scenario:
        with open(args.scenario, "r", encoding="utf-8") as fh:
            spec = json.load(fh)
        kwargs = {
            "positions": tuple(spec.get("positions", range(1, 9))),
            "tone_hz": spec.get("tone_hz", 440.0),
            "duration_s": spec.get("duration_s", 0.25),
            "distance_m": spec.get("distance_m", 1.0),
        }
    table = format_sweep_table(sweep_positions(**kwargs))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(table)
        print(f"sweep table written to {args.out}")
    else:
        sys.stdout.write(table)
    return 0


def cmd_fit_mapping(args) -> int:
    samples = load_calibration_samples(args.samples)
    params, residual = fit_mapping(samples, require_full_rank=not args.allow_degenerate)
    config = load_config(args.config)
    config["mapping"] = params.to_config()
    out = args.out or "telehead_config.json"
    save_config(config, out)
    print(f"fitted mapping from {len(samples)} samples, residual {residual:.3e}")
    print(f"config with mapping written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="telehead", description=__doc__)
    parser.add_argument("--config", help="JSON config file", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    avatar = sub.add_parser("avatar", help="avatar-side daemon").add_subparsers(
        dest="subcommand", required=True
    )
    run = avatar.add_parser("run", help="serve the bus and run the servo loop")
    run.add_argument("--port", type=int, help="bus TCP port override")
    run.set_defaults(func=cmd_avatar_run)

    operator = sub.add_parser("operator", help="operator-side daemon").add_subparsers(
        dest="subcommand", required=True
    )
    run = operator.add_parser("run", help="drive a (remote or in-process) avatar")
    run.add_argument("--port", type=int, help="bus TCP port override")
    run.add_argument("--offline", action="store_true",
                     help="run avatar and operator in-process on the loopback bus")
    run.add_argument("--console", action="store_true", help="expose the WebSocket console bridge")
    run.add_argument("--scenario", help="scenario file (or packaged name) to play")
    run.add_argument("--loop", action="store_true", help="repeat the scenario forever")
    run.add_argument("--expressions", help="expression-vector stream file (JSON lines)")
    run.add_argument("--duration", type=float, help="exit after this many seconds")
    run.set_defaults(func=cmd_operator_run)

    play = sub.add_parser("scenario", help="scripted runs").add_subparsers(
        dest="subcommand", required=True
    )
    p = play.add_parser("play", help="play a scenario file")
    p.add_argument("file", help="scenario file or packaged name (greeting, object_follow, ...)")
    p.add_argument("--offline", action="store_true", help="deterministic in-process run")
    p.add_argument("--virtual-clock", action="store_true",
                   help="run under the virtual clock (implies --offline)")
    p.add_argument("--record", help="write the session record to this file")
    p.add_argument("--port", type=int, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_scenario_play)

    rec = sub.add_parser("record", help="record a deterministic session")
    rec.add_argument("out", help="output session file")
    rec.add_argument("--scenario", help="scenario file or packaged name (default greeting)")
    rec.add_argument("--port", type=int, help=argparse.SUPPRESS)
    rec.set_defaults(func=cmd_record)

    rep = sub.add_parser("replay", help="replay a session and verify determinism")
    rep.add_argument("infile", help="session file")
    rep.add_argument("--port", type=int, help=argparse.SUPPRESS)
    rep.set_defaults(func=cmd_replay)

    sweep = sub.add_parser("sweep-audio", help="run the 8-position direction sweep")
    sweep.add_argument("--scenario", help="test-tone scenario JSON (positions, tone_hz, ...)")
    sweep.add_argument("--out", help="write the delimited table here instead of stdout")
    sweep.set_defaults(func=cmd_sweep_audio)

    fit = sub.add_parser("fit-mapping", help="fit expression-mapping parameters")
    fit.add_argument("samples", help="calibration samples (JSON lines of {t, f, w})")
    fit.add_argument("--out", help="output config file (default telehead_config.json)")
    fit.add_argument("--allow-degenerate", action="store_true",
                     help="accept rank-deficient sample sets (minimum-norm fit)")
    fit.set_defaults(func=cmd_fit_mapping)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
