"""Command-line entry point.

Exit codes: 0 success, 2 usage error (unknown flags/devices, bad combinations),
1 runtime error. Environment overrides use the QAB_ prefix (QAB_DEVICES_DIR,
QAB_JOBS).
"""
from __future__ import annotations

import argparse
import os
import sys

from .campaign import (
    MITIGATION_MODES,
    CampaignSpec,
    ResultFormatError,
    read_result,
    run_campaign,
    write_result,
)
from .simulator import NoiseModel
from .topology import DeviceError, PARAMETRIC_FAMILIES, catalog_device, list_devices


class UsageError(Exception):
    pass


def _env_default(name: str, fallback=None):
    return os.environ.get(f"QAB_{name}", fallback)


def _parse_noise(text: str | None) -> NoiseModel:
    if text is None:
        return NoiseModel.ideal()
    if text == "default":
        return NoiseModel()
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"--noise expects p1,p2,readout or 'default', got {text!r}")
    try:
        p1, p2, readout = (float(p) for p in parts)
        return NoiseModel(p1=p1, p2=p2, readout=readout)
    except ValueError as exc:
        raise UsageError(f"bad --noise value: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qabench",
        description="Random-circuit benchmarking of quantum devices, and the game it doubles as.",
    )
    parser.add_argument("--devices-dir", default=_env_default("DEVICES_DIR"),
                        help="directory of extra device JSON files (env QAB_DEVICES_DIR)")
    sub = parser.add_subparsers(dest="command", required=True)

    devices = sub.add_parser("devices", help="list or inspect coupling graphs")
    devices_sub = devices.add_subparsers(dest="devices_command", required=True)
    devices_sub.add_parser("list", help="print catalog device names")
    show = devices_sub.add_parser("show", help="print one device's coupling graph")
    show.add_argument("name")

    run = sub.add_parser("run", help="run a benchmark campaign")
    run.add_argument("--device", required=True)
    run.add_argument("--strategy", required=True,
                     help="comma-separated: true-pairs,random-pairs,mwpm-pairs,emulated-stat-noise")
    run.add_argument("--rounds", type=int, required=True)
    run.add_argument("--shots", type=int)
    run.add_argument("--exact", action="store_true", help="exact probabilities instead of shots")
    run.add_argument("--samples", type=int, default=100)
    run.add_argument("--seed", type=int, required=True)
    run.add_argument("--noise", help="p1,p2,readout (default: noiseless) or 'default'")
    run.add_argument("--mitigate", action="store_true",
                     help="also record mutual-information-mitigated metrics")
    run.add_argument("--stat-noise-random-sign", action="store_true",
                     help="emulated-stat-noise adds its offset with a random sign per pair")
    run.add_argument("--full", action="store_true", help="keep per-sample round records")
    run.add_argument("--jobs", type=int, default=None,
                     help="parallel workers (default: logical cores; env QAB_JOBS)")
    run.add_argument("--out", required=True)

    plot = sub.add_parser("plot", help="render a metric from a results file to SVG")
    plot.add_argument("--in", dest="infile", required=True)
    plot.add_argument("--metric", required=True, choices=("fuzz", "success", "diff"))
    plot.add_argument("--out", required=True)

    game = sub.add_parser("game", help="the pairing-puzzle game service")
    game_sub = game.add_subparsers(dest="game_command", required=True)
    serve = game_sub.add_parser("serve", help="serve the game HTTP API (and UI, if built)")
    serve.add_argument("--device", default="ibmqx4", help="default device for new games")
    serve.add_argument("--port", type=int, default=int(_env_default("PORT", "8000")))
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--shots", type=int, help="sampled measurement (default: exact)")
    serve.add_argument("--noise", help="p1,p2,readout or 'default' (default: noiseless)")
    serve.add_argument("--seed", type=int)
    serve.add_argument("--replay", help="campaign results file (--full) to play from saved data")
    serve.add_argument("--snapshot", help="write session snapshots to this file on shutdown")
    serve.add_argument("--ui-dir", help="directory of built UI assets to serve at /")

    return parser


def _cmd_devices(args) -> int:
    if args.devices_command == "list":
        for name in list_devices(args.devices_dir):
            print(name)
        print("parametric: " + ", ".join(f"{f}_N" for f in PARAMETRIC_FAMILIES))
        return 0
    graph = catalog_device(args.name, args.devices_dir)
    print(f"{graph.name}: {graph.num_qubits} qubits, {len(graph.edges)} edges")
    for label, (a, b) in graph.labeled_edges():
        print(f"  {label}: {a} - {b}")
    return 0


def _cmd_run(args) -> int:
    if args.shots is None and not args.exact:
        raise UsageError("one of --shots or --exact is required")
    if args.shots is not None and args.exact:
        raise UsageError("--shots and --exact are mutually exclusive")
    strategies = tuple(s.strip() for s in args.strategy.split(",") if s.strip())
    jobs = args.jobs
    if jobs is None:
        jobs = int(_env_default("JOBS", os.cpu_count() or 1))
    try:
        spec = CampaignSpec(
            device=args.device,
            strategies=strategies,
            rounds=args.rounds,
            samples=args.samples,
            seed=args.seed,
            shots=args.shots,
            noise=_parse_noise(args.noise),
            mitigation="both" if args.mitigate else "off",
            full_records=args.full,
            stat_noise_random_sign=args.stat_noise_random_sign,
        )
        catalog_device(spec.device, args.devices_dir)
    except (ValueError, DeviceError) as exc:
        raise UsageError(str(exc)) from exc
    result = run_campaign(spec, devices_dir=args.devices_dir, jobs=max(1, jobs))
    write_result(result, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_plot(args) -> int:
    from .plotting import render_plot

    result = read_result(args.infile)
    render_plot(result, args.metric, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_game(args) -> int:
    import uvicorn

    from .game import GameConfig, create_app

    try:
        config = GameConfig(
            default_device=args.device,
            shots=args.shots,
            noise=_parse_noise(args.noise),
            seed=args.seed,
            devices_dir=args.devices_dir,
            replay_path=args.replay,
            snapshot_path=args.snapshot,
            ui_dir=args.ui_dir,
        )
        app = create_app(config)
    except (ValueError, DeviceError, ResultFormatError) as exc:
        raise UsageError(str(exc)) from exc
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        if args.command == "devices":
            return _cmd_devices(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "plot":
            return _cmd_plot(args)
        if args.command == "game":
            return _cmd_game(args)
        return 2
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except DeviceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except (OSError, ValueError, ResultFormatError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())
